"""Gossip-based publish-subscribe over unstructured overlays: simulator and coverage model."""

from .analytic import (ClusterSizePMF, CoverageParams, CoveragePrediction, cluster_size_pmf,
                       forward_pmf, link_forward_pmf, predict, solve_gamma, solve_sigma,
                       threshold)
from .degree_dist import (DegreeDistribution, Moments, aiello, aiello_degree_sequence,
                          empirical, moments, poisson, power_law, sample_degree_sequence)
from .harness import ExperimentConfig, SweepRow, emit_report, phase_scan, run_sweep
from .overlay import (OverlayGraph, configuration_model, giant_component, read_edge_list,
                      write_edge_list)
from .sim import (DisseminationResult, assign_subscriptions, disseminate, disseminate_fast,
                  smallgraph_oracle, subscription_phase)

__version__ = "0.1.0"
