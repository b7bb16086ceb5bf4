import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from pubsub_gossip.overlay import OverlayGraph

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def small_graphs(draw, min_nodes=1, max_nodes=10):
    """Arbitrary simple graphs on up to ``max_nodes`` nodes."""
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return OverlayGraph.from_edges(n, [p for p, keep in zip(pairs, mask) if keep])


def random_graph(rng, n, p):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return OverlayGraph.from_edges(n, edges)


@pytest.fixture
def triangle():
    return OverlayGraph.from_edges(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def path3():
    return OverlayGraph.from_edges(3, [(0, 1), (1, 2)])


# acceptance summary: test_acceptance records one line per criterion

ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")
