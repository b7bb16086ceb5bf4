"""Experiment orchestration: sweeps over (sigma, gamma), phase scans, CSV reports.

Randomness derives only from (master_seed, network_id, purpose, index), see
:mod:`pubsub_gossip.rng`. Network k is built once and reused at every grid
point, its subscriptions are one vector of uniforms thresholded by sigma,
and event i always uses the same stream, so grid points are coupled
(common random numbers) and the output does not depend on evaluation order.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import analytic, degree_dist, overlay, rng as rngs, sim
from .errors import (ConfigError, InfeasibleSequence, InvalidDistribution,
                     NoGiantComponentPossible)

PERCOLATION_FRACTION = 0.1  # of the giant component
MAJORITY = 0.5


def parse_topology(text: str) -> dict:
    """``"poisson:lam=5"``, ``"aiello:a=6,b=1"``, ``"empirical:1=0.5,3=0.5"`` or JSON."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"bad topology JSON: {e}") from None
    kind, _, rest = text.partition(":")
    spec: dict = {"kind": kind.strip()}
    pairs = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        k, eq, v = item.partition("=")
        if not eq:
            raise ConfigError(f"bad topology parameter {item!r}")
        try:
            pairs[k.strip()] = float(v)
        except ValueError:
            raise ConfigError(f"bad topology value {item!r}") from None
    if spec["kind"] == "empirical":
        spec["pmf"] = pairs
    else:
        spec.update(pairs)
    return spec


def build_distribution(spec: dict, n: int | None = None) -> degree_dist.DegreeDistribution:
    spec = dict(spec)
    kind = spec.pop("kind", None)
    try:
        if kind == "poisson":
            return degree_dist.poisson(float(spec["lam"]),
                                       _opt_int(spec.get("k_max")))
        if kind == "power_law":
            return degree_dist.power_law(float(spec["exponent"]),
                                         int(spec.get("k_min", 1)),
                                         _opt_int(spec.get("k_max")), n)
        if kind == "aiello":
            return degree_dist.aiello(float(spec["a"]), float(spec["b"]))
        if kind == "empirical":
            return degree_dist.empirical({int(float(k)): float(v)
                                          for k, v in spec["pmf"].items()})
    except KeyError as e:
        raise ConfigError(f"topology {kind!r} missing parameter {e}") from None
    except InvalidDistribution as e:
        raise ConfigError(str(e)) from None
    raise ConfigError(f"unknown topology kind {kind!r}")


def _opt_int(v):
    return None if v is None else int(v)


def topology_label(spec: dict) -> str:
    if spec.get("kind") == "empirical":
        inner = ",".join(f"{k}={v:g}" for k, v in spec["pmf"].items())
    else:
        inner = ",".join(f"{k}={v:g}" if isinstance(v, (int, float)) else f"{k}={v}"
                         for k, v in spec.items() if k != "kind")
    return f"{spec.get('kind')}:{inner}" if inner else str(spec.get("kind"))


@dataclass
class ExperimentConfig:
    topology: dict = field(default_factory=lambda: {"kind": "poisson", "lam": 5.0})
    n: int = 10_000
    replicates: int = 20
    events_per_network: int = 400
    sigma_grid: list = field(default_factory=lambda: [0.1])
    gamma_grid: list = field(default_factory=lambda: [0.0])
    master_seed: int = 0
    ttl: int | None = None

    def __post_init__(self):
        if isinstance(self.topology, str):
            self.topology = parse_topology(self.topology)
        self.validate()

    def validate(self):
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.events_per_network < 1:
            raise ConfigError("events_per_network must be >= 1")
        if self.topology.get("kind") != "aiello" and self.n < 2:
            raise ConfigError("n must be >= 2")
        for name in ("sigma_grid", "gamma_grid"):
            grid = getattr(self, name)
            if not grid:
                raise ConfigError(f"{name} is empty")
            if any(not 0.0 <= float(x) <= 1.0 for x in grid):
                raise ConfigError(f"{name} values must lie in [0, 1]")
        if self.master_seed < 0 or self.master_seed >= 2 ** 64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if self.ttl is not None and self.ttl < 0:
            raise ConfigError("ttl must be nonnegative")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError(str(e)) from None

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def distribution(self) -> degree_dist.DegreeDistribution:
        return build_distribution(self.topology, self.n)


@dataclass(frozen=True)
class Network:
    network_id: int
    graph: overlay.OverlayGraph
    giant_size: int
    sub_uniforms: np.ndarray

    def subscriptions(self, sigma: float) -> np.ndarray:
        return self.sub_uniforms < sigma


def build_network(config: ExperimentConfig, network_id: int,
                  dist: degree_dist.DegreeDistribution | None = None) -> Network:
    rng = rngs.stream(config.master_seed, network_id, rngs.TOPOLOGY)
    if config.topology.get("kind") == "aiello":
        degrees = degree_dist.aiello_degree_sequence(float(config.topology["a"]),
                                                     float(config.topology["b"]))
    else:
        dist = dist or config.distribution()
        degrees = degree_dist.sample_degree_sequence(dist, config.n, rng)
    graph = overlay.configuration_model(degrees, rng)
    size, _ = overlay.giant_component(graph)
    u = rngs.stream(config.master_seed, network_id, rngs.SUBSCRIPTIONS).random(graph.n)
    return Network(network_id, graph, size, u)


def build_networks(config: ExperimentConfig) -> list[Network]:
    dist = None if config.topology.get("kind") == "aiello" else config.distribution()
    out = []
    for k in range(config.replicates):
        try:
            out.append(build_network(config, k, dist))
        except InfeasibleSequence as e:
            raise InfeasibleSequence(f"network {k} ({topology_label(config.topology)}): {e}") from e
    return out


@dataclass(frozen=True)
class EventRecord:
    network_id: int
    event_id: int
    publisher: int
    sigma: float
    gamma: float
    ttl: int | None
    receivers: int
    subscribers_reached: int
    messages_sent: int
    max_hops: int

    FIELDS = ("network_id", "event_id", "publisher", "sigma", "gamma", "ttl",
              "receivers", "subscribers_reached", "messages_sent", "max_hops")


def run_events(net: Network, sigma: float, gamma: float, events: int,
               master_seed: int, ttl=None) -> list[EventRecord]:
    subs = net.subscriptions(sigma)
    arcs = sim.arc_flags_from_subs(net.graph, subs)
    out = []
    for e in range(events):
        rng = rngs.stream(master_seed, net.network_id, rngs.EVENTS, e)
        publisher = int(rng.integers(net.graph.n))
        res = sim.disseminate_fast(net.graph, arcs, subs, publisher, gamma, ttl, rng)
        out.append(EventRecord(net.network_id, e, publisher, sigma, gamma, ttl,
                               res.receivers, res.subscribers_reached,
                               res.messages_sent, res.max_hops))
    return out


@dataclass(frozen=True)
class SweepRow:
    topology: str
    n: int
    replicates: int
    events_per_network: int
    sigma: float
    gamma: float
    master_seed: int
    ttl: int | None
    sim_mean_receivers: float
    sim_mean_subscribers: float
    sim_stddev_receivers: float
    model_mean_receivers: float
    model_divergent: bool
    giant_component_mean: float


@dataclass(frozen=True)
class NetworkRow:
    network_id: int
    sigma: float
    gamma: float
    mean_receivers: float
    mean_subscribers: float
    stddev_receivers: float
    giant_component_size: int
    discarded_stubs: int


@dataclass
class SweepResult:
    rows: list
    network_rows: list


def _std(x):
    return float(np.std(x, ddof=1)) if len(x) > 1 else 0.0


def run_sweep(config: ExperimentConfig, networks: list[Network] | None = None) -> SweepResult:
    """Simulate every (sigma, gamma) grid point and attach the model prediction."""
    dist = config.distribution()
    if networks is None:
        networks = build_networks(config)
    label = topology_label(config.topology)
    n = networks[0].graph.n
    giant_mean = float(np.mean([net.giant_size for net in networks]))
    rows, per_net = [], []
    for sigma in config.sigma_grid:
        for gamma in config.gamma_grid:
            sigma, gamma = float(sigma), float(gamma)
            pred = analytic.predict(dist, analytic.CoverageParams(sigma, gamma))
            rec, sub = [], []
            for net in networks:
                events = run_events(net, sigma, gamma, config.events_per_network,
                                    config.master_seed, config.ttl)
                r = [e.receivers for e in events]
                s = [e.subscribers_reached for e in events]
                rec.extend(r)
                sub.extend(s)
                per_net.append(NetworkRow(net.network_id, sigma, gamma, float(np.mean(r)),
                                          float(np.mean(s)), _std(r), net.giant_size,
                                          net.graph.discarded_stubs))
            rows.append(SweepRow(label, n, config.replicates, config.events_per_network,
                                 sigma, gamma, config.master_seed, config.ttl,
                                 float(np.mean(rec)), float(np.mean(sub)), _std(rec),
                                 pred.mean_receivers, pred.divergent, giant_mean))
    return SweepResult(rows, per_net)


@dataclass(frozen=True)
class PhaseRow:
    value: float
    fraction_percolating: float
    sim_mean_receivers: float
    model_mean_receivers: float


@dataclass
class PhaseScan:
    vary: str
    fixed: float
    rows: list
    transition: float | None       # first grid value where a majority percolates
    analytic_threshold: float | None
    analytic_in_range: bool
    note: str = ""


def phase_scan(config: ExperimentConfig, vary: str, grid, fixed: float,
               networks: list[Network] | None = None) -> PhaseScan:
    """Locate the empirical percolation transition along one parameter.

    An event percolates when it reaches more than 10% of its network's giant
    component; the empirical transition is the first grid value at which more
    than half of all events percolate. A network whose largest component has
    at most sqrt(n) nodes has no giant component, and nothing on it percolates.
    """
    if vary not in ("sigma", "gamma"):
        raise ConfigError("vary must be 'sigma' or 'gamma'")
    grid = [float(x) for x in grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ConfigError("scan grid must be monotone increasing")
    dist = config.distribution()
    if networks is None:
        networks = build_networks(config)
    rows = []
    transition = None
    for value in grid:
        sigma, gamma = (value, fixed) if vary == "sigma" else (fixed, value)
        hits = total = 0
        rec = []
        for net in networks:
            if net.giant_size <= math.sqrt(net.graph.n):
                cut = math.inf
            else:
                cut = PERCOLATION_FRACTION * net.giant_size
            for e in run_events(net, sigma, gamma, config.events_per_network,
                                config.master_seed, config.ttl):
                hits += e.receivers > cut
                total += 1
                rec.append(e.receivers)
        frac = hits / total
        pred = analytic.predict(dist, analytic.CoverageParams(sigma, gamma))
        rows.append(PhaseRow(value, frac, float(np.mean(rec)), pred.mean_receivers))
        if transition is None and frac > MAJORITY:
            transition = value
    note = ""
    try:
        solve = analytic.solve_sigma if vary == "sigma" else analytic.solve_gamma
        sol = solve(dist, fixed)
        thr, in_range = sol.raw, sol.in_range
    except NoGiantComponentPossible as e:
        thr, in_range, note = None, False, f"NoGiantComponentPossible: {e}"
    return PhaseScan(vary, fixed, rows, transition, thr, in_range, note)


# CSV

def _fmt(v) -> str:
    if v is None:
        return "inf"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.6g}"
    return str(v)


def format_rows(rows) -> list[list[str]]:
    if not rows:
        raise ValueError("no rows to report")
    names = [f.name for f in fields(rows[0])]
    return [names] + [[_fmt(getattr(r, k)) for k in names] for r in rows]


def write_csv(table, sink) -> None:
    w = csv.writer(sink, lineterminator="\n")
    w.writerows(table)


def emit_report(rows, sink, format: str = "csv") -> None:
    """Write rows as CSV: header + one line per row, floats to 6 significant digits.

    ``sink`` is a path or a text stream. Nothing is created when ``rows`` is empty.
    """
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}")
    table = format_rows(rows)
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", newline="") as f:
            write_csv(table, f)
    else:
        write_csv(table, sink)


def _parse_value(text: str, typ):
    typ = str(typ)
    if "bool" in typ:
        return text == "true"
    if typ.startswith("int"):
        # "int | None"
        return None if text == "inf" else int(text)
    if "float" in typ:
        return float(text)
    return text


def parse_report(source, row_type=SweepRow) -> list:
    reader = csv.reader(source)
    header = next(reader)
    types = {f.name: f.type for f in fields(row_type)}
    if header != list(types):
        raise ValueError(f"unexpected header {header}")
    return [row_type(**{k: _parse_value(v, types[k]) for k, v in zip(header, line)})
            for line in reader]
