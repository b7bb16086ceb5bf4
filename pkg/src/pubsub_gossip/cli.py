"""Command line entry point: ``pubsub-gossip <subcommand> ...``.

Exit codes: 0 success, 2 configuration/input error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from . import analytic, harness, overlay, rng as rngs, sim
from .errors import (ConfigError, InfeasibleSequence, InvalidDistribution,
                     InvalidPublisher, NoGiantComponentPossible, ParseError, TooLarge)

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _floats(text: str) -> list[float]:
    """``"0.1,0.2"`` or ``"start:stop:step"`` (inclusive)."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            count = int(round((stop - start) / step)) + 1
            return [round(start + i * step, 12) for i in range(count)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _ttl(text: str):
    if text.lower() in ("inf", "infinite", "none"):
        return None
    return int(text)


def _add_common(p, grids=True):
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--topology", help="e.g. poisson:lam=5, aiello:a=6,b=1, power_law:exponent=-3.3")
    p.add_argument("--n", type=int)
    p.add_argument("--replicates", type=int)
    p.add_argument("--events", type=int, dest="events_per_network")
    if grids:
        p.add_argument("--sigma", type=_floats, dest="sigma_grid")
        p.add_argument("--gamma", type=_floats, dest="gamma_grid")
    p.add_argument("--seed", type=int, dest="master_seed")
    p.add_argument("--ttl", type=_ttl, default=argparse.SUPPRESS,
                   help="hop budget per event; 'inf' (default) disables it")
    p.add_argument("--out", help="output file (default stdout)")


OVERRIDES = ("topology", "n", "replicates", "events_per_network", "sigma_grid",
             "gamma_grid", "master_seed")


def config_from_args(args) -> harness.ExperimentConfig:
    data = {}
    if args.config:
        data = harness.ExperimentConfig.from_json(args.config).to_dict()
    for name in OVERRIDES:
        v = getattr(args, name, None)
        if v is not None:
            data[name] = harness.parse_topology(v) if name == "topology" else v
    if "ttl" in vars(args):
        data["ttl"] = args.ttl
    return harness.ExperimentConfig.from_dict(data)


class _Out:
    def __init__(self, path):
        self.path = path

    def __enter__(self):
        self.f = open(self.path, "w", newline="") if self.path else sys.stdout
        return self.f

    def __exit__(self, *exc):
        if self.path:
            self.f.close()


def _read_graph(path) -> overlay.OverlayGraph:
    try:
        with open(path) as f:
            return overlay.read_edge_list(f)
    except OSError as e:
        raise ConfigError(f"cannot read graph {path}: {e}") from None


def cmd_analytic(args):
    cfg = config_from_args(args)
    dist = cfg.distribution()
    if args.threshold:
        table = [["gamma_eff_star", "fixed", "fixed_value", "solved", "solved_value", "in_range"]]
        try:
            g_star = analytic.threshold(dist)
        except NoGiantComponentPossible:
            g_star = None
        for fixed, grid, solve in (("gamma", cfg.gamma_grid, analytic.solve_sigma),
                                   ("sigma", cfg.sigma_grid, analytic.solve_gamma)):
            other = "sigma" if fixed == "gamma" else "gamma"
            for value in grid:
                if g_star is None:
                    solved, in_range = "none", "false"
                else:
                    s = solve(dist, float(value))
                    solved, in_range = harness._fmt(s.raw), harness._fmt(s.in_range)
                table.append(["none" if g_star is None else harness._fmt(g_star), fixed,
                              harness._fmt(float(value)), other, solved, in_range])
    else:
        table = [["sigma", "gamma", "gamma_eff", "mean_receivers", "mean_subscribers",
                  "branching_factor"]]
        for sigma in cfg.sigma_grid:
            for gamma in cfg.gamma_grid:
                params = analytic.CoverageParams(float(sigma), float(gamma))
                pred = analytic.predict(dist, params)
                table.append([harness._fmt(v) for v in (
                    params.sigma, params.gamma, params.gamma_eff, pred.mean_receivers,
                    pred.mean_subscribers, pred.branching_factor)])
    with _Out(args.out) as f:
        harness.write_csv(table, f)


def cmd_generate(args):
    cfg = config_from_args(args)
    net = harness.build_network(cfg, args.network_id)
    report = overlay.construction_report(net.graph, cfg.master_seed)
    with _Out(args.out) as f:
        overlay.write_edge_list(net.graph, f)
    harness.write_csv([list(overlay.ConstructionReport.FIELDS), report.as_row()],
                      sys.stderr if not args.out else sys.stdout)


def cmd_simulate(args):
    cfg = config_from_args(args)
    if args.graph:
        graph = _read_graph(args.graph)
        size, _ = overlay.giant_component(graph)
        u = rngs.stream(cfg.master_seed, args.network_id, rngs.SUBSCRIPTIONS).random(graph.n)
        net = harness.Network(args.network_id, graph, size, u)
    else:
        net = harness.build_network(cfg, args.network_id)
    records = []
    for sigma in cfg.sigma_grid:
        for gamma in cfg.gamma_grid:
            records.extend(harness.run_events(net, float(sigma), float(gamma),
                                              cfg.events_per_network, cfg.master_seed, cfg.ttl))
    with _Out(args.out) as f:
        harness.emit_report(records, f)


def cmd_sweep(args):
    cfg = config_from_args(args)
    result = harness.run_sweep(cfg)
    with _Out(args.out) as f:
        harness.emit_report(result.rows, f)
    if args.per_network:
        harness.emit_report(result.network_rows, args.per_network)


def cmd_phase(args):
    cfg = config_from_args(args)
    scan = harness.phase_scan(cfg, args.vary, args.grid, args.fixed)
    table = [[f.name for f in fields(harness.PhaseRow)]]
    table += [[harness._fmt(getattr(r, f.name)) for f in fields(harness.PhaseRow)]
              for r in scan.rows]
    with _Out(args.out) as f:
        harness.write_csv(table, f)
        f.write(f"# empirical_transition,{harness._fmt(scan.transition) if scan.transition is not None else 'none'}\n")
        if scan.analytic_threshold is None:
            f.write(f"# analytic_threshold,none,{scan.note}\n")
        else:
            f.write(f"# analytic_threshold,{harness._fmt(scan.analytic_threshold)},"
                    f"in_range={harness._fmt(scan.analytic_in_range)}\n")


def cmd_oracle(args):
    graph = _read_graph(args.graph)
    subs = [False] * graph.n
    for s in args.subscribers or []:
        if not 0 <= s < graph.n:
            raise ConfigError(f"subscriber {s} out of range")
        subs[s] = True
    pmf = sim.smallgraph_oracle(graph, subs, args.publisher, args.gamma)
    table = [["receivers", "probability"]]
    table += [[str(k), f"{p:.12g}"] for k, p in enumerate(pmf) if k >= 1]
    with _Out(args.out) as f:
        harness.write_csv(table, f)


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pubsub-gossip", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="model predictions (or thresholds) as CSV")
    _add_common(p)
    p.add_argument("--threshold", action="store_true",
                   help="print critical sigma/gamma instead of predictions")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("generate", help="write one overlay as an edge list")
    _add_common(p, grids=False)
    p.add_argument("--network-id", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("simulate", help="per-event results on a single network")
    _add_common(p)
    p.add_argument("--graph", help="edge-list file to use instead of generating")
    p.add_argument("--network-id", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="model vs simulation over the (sigma, gamma) grid")
    _add_common(p)
    p.add_argument("--per-network", help="also write per-network rows to this file")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("phase", help="scan one parameter for the empirical transition")
    _add_common(p, grids=False)
    p.add_argument("--vary", choices=("sigma", "gamma"), default="sigma")
    p.add_argument("--fixed", type=float, required=True, help="value of the other parameter")
    p.add_argument("--grid", type=_floats, required=True, help="e.g. 0:0.3:0.01")
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("oracle", help="exact receiver-count PMF on a small graph")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--subscribers", type=_int_list, help="comma-separated subscriber ids")
    p.add_argument("--publisher", type=int, default=0)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, InvalidDistribution, InfeasibleSequence, ParseError,
            InvalidPublisher, TooLarge, NoGiantComponentPossible) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001
        print(f"runtime error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
