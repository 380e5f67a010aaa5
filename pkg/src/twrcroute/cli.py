"""Command-line surface: parameter sweeps emitted as CSV (and optional SVG).

Every subcommand is deterministic -- identical invocations produce
byte-identical CSV.  Exit codes: 0 success, 2 usage error, 3 infeasible
parameters.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

from .errors import InfeasibleRateError, TwrcError, UnsupportedKError
from .radio import PhyConfig, RouteSpec, load_config
from .twrc3 import direct_vs_twrc, midpoint_threshold, placement_energy
from .metrics import compare_routes, route_metrics
from .power_alloc import rate_upper_limit, route_allocation
from .slot_sim import (build_schedule, simulate_hop_by_hop, snr_vs_sinr_error,
                       verify_rates)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

CSV_SCHEMA = "# schema=1"


def _frange(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("step must be > 0")
    if hi < lo:
        raise ValueError("empty range")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(n)]


def _fmt(value) -> str:
    if value is None:
        return "inf"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(CSV_SCHEMA + "\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _save_svg(path, draw) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "twrcroute"
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    draw(ax)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _base_config(args) -> PhyConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else PhyConfig()
    if getattr(args, "alpha", None) is not None:
        cfg = cfg.with_(alpha=args.alpha)
    if getattr(args, "eta", None) is not None:
        cfg = cfg.with_(eta=args.eta)
    if getattr(args, "p00_mj", None) is not None:
        cfg = cfg.with_(p00=args.p00_mj * 1e-3)
    if getattr(args, "rate", None) is not None:
        cfg = cfg.with_(rate_r=args.rate)
    return cfg


def _parse_route(text: str) -> RouteSpec:
    try:
        length, _, k = text.partition(":")
        return RouteSpec(d_route=float(length), k=int(k))
    except (ValueError, TwrcError):
        raise argparse.ArgumentTypeError(
            f"route must be LENGTH:K with K in 0..6, got {text!r}") from None


def _parse_int_set(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_float_set(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


# -- subcommands -----------------------------------------------------------

def cmd_threshold(args) -> int:
    rates = _frange(args.rate_min, args.rate_max, args.rate_step)
    rows = [(r, midpoint_threshold(r)) for r in rates]
    _write_csv(args.out_csv, ["rate_bpcu", "alpha_star"], rows)
    if args.out_svg:
        def draw(ax):
            ax.plot([r for r, _ in rows], [a for _, a in rows], "b-")
            ax.fill_between([r for r, _ in rows], [a for _, a in rows],
                            [max(a for _, a in rows)] * len(rows), alpha=0.15)
            ax.annotate("(2.7, 2.04)", xy=(2.7, midpoint_threshold(2.7)),
                        xytext=(2.9, 2.2),
                        arrowprops={"arrowstyle": "->"})
            ax.set_xlabel("per-link rate R (bit/cu)")
            ax.set_ylabel("path-loss exponent threshold")
            ax.set_title("Midpoint relay is the energy minimum above the curve")
        _save_svg(args.out_svg, draw)
    return EXIT_OK


def cmd_placement(args) -> int:
    cfg = _base_config(args).with_(p00=0.0 if args.p00_mj is None
                                   else args.p00_mj * 1e-3)
    alphas = args.alphas
    d = args.d_route
    n = args.grid
    rows = []
    curves = {}
    for alpha in alphas:
        local = cfg.with_(alpha=alpha)
        direct = direct_vs_twrc(args.rate, d, local).direct_energy
        pts = []
        for i in range(n):
            theta = (i + 0.5) * math.pi / 2.0 / n
            res = placement_energy(args.rate, theta, d, local)
            rows.append((alpha, res.relay_pos_fraction,
                         res.f_value / local.noise_n0,
                         direct / local.noise_n0))
            pts.append((res.relay_pos_fraction, res.f_value / local.noise_n0,
                        direct / local.noise_n0))
        curves[alpha] = pts
    _write_csv(args.out_csv,
               ["alpha", "relay_pos_fraction", "f_over_n0", "direct_over_n0"],
               rows)
    if args.out_svg:
        def draw(ax):
            for alpha, pts in curves.items():
                xs = [p[0] for p in pts]
                ax.plot(xs, [p[1] for p in pts], label=f"relayed, a={alpha}")
                ax.plot(xs, [p[2] for p in pts], "--",
                        label=f"direct, a={alpha}")
            ax.set_xlabel("relay position (fraction of the A-B line)")
            ax.set_ylabel("exchange energy / N0")
            ax.legend(fontsize=8)
        _save_svg(args.out_svg, draw)
    return EXIT_OK


def cmd_eebe(args) -> int:
    cfg = _base_config(args)
    rates = _frange(args.rate_min, args.rate_max, args.rate_step)
    rows = []
    curves = {}
    for d in args.d_routes:
        for k in args.ks:
            pts = []
            for rate in rates:
                try:
                    m = route_metrics(RouteSpec(d, k), cfg.with_(rate_r=rate))
                except InfeasibleRateError:
                    rows.append((d, k, rate, None, None))
                    continue
                rows.append((d, k, rate, m.be, m.ee))
                pts.append((m.be, m.ee))
            curves[(d, k)] = pts
    _write_csv(args.out_csv,
               ["d_route_m", "k", "rate_bpcu", "be_bps_hz", "ee_bit_per_j"],
               rows)
    if args.out_svg:
        def draw(ax):
            for (d, k), pts in curves.items():
                if pts:
                    ax.plot([p[0] for p in pts], [p[1] for p in pts],
                            label=f"d={d:g} m, k={k}")
            ax.set_xlabel("bandwidth efficiency (bit/s/Hz)")
            ax.set_ylabel("energy efficiency (bit/J)")
            ax.set_yscale("log")
            ax.legend(fontsize=8)
        _save_svg(args.out_svg, draw)
    return EXIT_OK


def cmd_sinr_error(args) -> int:
    cfg = _base_config(args)
    bes = _frange(args.be_min, args.be_max, args.be_step)
    pts = snr_vs_sinr_error(args.k, cfg, bes, d_route=args.d_route)
    rows = [(p.be, p.ee_sinr, p.ee_snr, p.error_pct, int(p.feasible))
            for p in pts]
    _write_csv(args.out_csv,
               ["be_bps_hz", "ee_sinr_bit_per_j", "ee_snr_bit_per_j",
                "error_pct", "feasible"],
               rows)
    if args.out_svg:
        def draw(ax):
            feas = [p for p in pts if p.feasible]
            ax.plot([p.be for p in feas], [p.ee_sinr for p in feas],
                    label="with interference (SINR)")
            ax.plot([p.be for p in pts], [p.ee_snr for p in pts], "--",
                    label="interference ignored (SNR)")
            ax.set_xlabel("bandwidth efficiency (bit/s/Hz)")
            ax.set_ylabel("energy efficiency (bit/J)")
            ax.set_yscale("log")
            ax.legend(fontsize=8)
        _save_svg(args.out_svg, draw)
    return EXIT_OK


def cmd_rate_limit(args) -> int:
    cfg = _base_config(args)
    rows = []
    for k in range(7):
        sup = rate_upper_limit(k, cfg.alpha)
        rows.append((k, None if math.isinf(sup) else sup, k + 1))
    if args.out_csv:
        _write_csv(args.out_csv, ["k", "rate_sup_bpcu", "latency_slots"], rows)
    print(f"{'k':>2} {'rate_sup':>12} {'latency':>8}")
    for k, sup, lat in rows:
        sup_s = "unbounded" if sup is None else f"{sup:.6f}"
        print(f"{k:>2} {sup_s:>12} {lat:>8}")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _base_config(args)
    if not args.routes:
        raise ValueError("at least one --route LENGTH:K is required")
    rates = _frange(args.rate_min, args.rate_max, args.rate_step)
    table = compare_routes(args.routes, cfg, rates)
    rows = []
    for row in table.rows:
        for cell in row.cells:
            rows.append((row.rate, cell.route.d_route, cell.route.k,
                         cell.f_over_k, int(cell.is_winner)))
    _write_csv(args.out_csv,
               ["rate_bpcu", "d_route_m", "k", "objective_f", "winner"],
               rows)
    if args.out_svg:
        def draw(ax):
            for route in args.routes:
                xs, ys = [], []
                for row in table.rows:
                    for cell in row.cells:
                        if cell.route is route and cell.feasible:
                            xs.append(row.rate)
                            ys.append(cell.f_over_k)
                ax.plot(xs, ys, label=f"{route.d_route:g} m, k={route.k}")
            ax.set_xlabel("per-link rate R (bit/cu)")
            ax.set_ylabel("objective EE*BE/latency")
            ax.set_yscale("log")
            ax.legend(fontsize=8)
        _save_svg(args.out_svg, draw)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _base_config(args)
    sched = build_schedule(args.k)
    sim = simulate_hop_by_hop(args.k, args.pairs)
    print(f"k={args.k} pairs={args.pairs} total_slots={sim.total_slots} "
          f"period={sched.period}")
    if args.out_csv:
        alloc = route_allocation(RouteSpec(args.d_route, args.k), cfg)
        budgets = verify_rates(args.k, alloc, cfg)
        by_rx = {(b.slot, b.rx_node): b for b in budgets}
        powers = {}
        for slot in range(sched.period):
            for node, (seg, role, _) in sched.transmitters(slot).items():
                powers[(slot, node)] = alloc.segments[seg].powers[role]
        rows = []
        for slot_no in range(1, sim.total_slots + 1):
            pslot = (slot_no - 1) % sched.period
            for act in sched.slot_actions(pslot):
                cp = "|".join(str(c) for c in act.counterparts)
                b = by_rx.get((pslot, act.node))
                if act.role == "rx" and b is not None:
                    rows.append((slot_no, act.node, act.role, cp,
                                 b.signal, b.interference, b.noise, b.rate))
                elif act.role.startswith(("tx", "amplify")):
                    rows.append((slot_no, act.node, act.role, cp,
                                 powers[(pslot, act.node)], 0.0, 0.0, ""))
                else:
                    rows.append((slot_no, act.node, act.role, cp,
                                 0.0, 0.0, 0.0, ""))
        _write_csv(args.out_csv,
                   ["slot", "node", "role", "counterpart", "signal_J",
                    "interference_J", "noise_J", "rate_bpcu"],
                   rows)
    return EXIT_OK


# -- argument parsing ------------------------------------------------------

def _add_common(p, rate=False, rate_range=None, alpha=True, eta=True,
                p00=True, config=True):
    if rate:
        p.add_argument("--rate", type=float, default=None,
                       help="per-link rate, bit per channel use")
    if rate_range:
        lo, hi, step = rate_range
        p.add_argument("--rate-min", type=float, default=lo)
        p.add_argument("--rate-max", type=float, default=hi)
        p.add_argument("--rate-step", type=float, default=step)
    if alpha:
        p.add_argument("--alpha", type=float, default=None,
                       help="path-loss exponent (default 4)")
    if eta:
        p.add_argument("--eta", type=float, default=None,
                       help="amplifier drain efficiency (default 0.75)")
    if p00:
        p.add_argument("--p00-mj", type=float, default=None,
                       help="baseline circuit power, mJ per channel use")
    if config:
        p.add_argument("--config", default=None,
                       help="key=value config file overriding the defaults")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="twrc",
        description="Route analysis for amplify-and-forward two-way relay "
                    "networks")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold",
                       help="path-loss threshold for the midpoint relay vs rate")
    _add_common(p, rate_range=(0.1, 5.0, 0.05), alpha=False, eta=False,
                p00=False)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg", default=None)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("placement",
                       help="exchange energy vs relay position on the A-B line")
    _add_common(p, rate=False, p00=True, eta=True, alpha=False)
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--alpha", dest="alphas", type=_parse_float_set,
                   default=[2.0, 2.1, 2.2, 2.3, 2.4],
                   help="comma-separated path-loss exponents")
    p.add_argument("--d-route", type=float, default=20.0)
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg", default=None)
    p.set_defaults(func=cmd_placement)

    p = sub.add_parser("eebe", help="energy efficiency vs bandwidth efficiency")
    _add_common(p, rate_range=(0.1, 6.0, 0.1))
    p.add_argument("--d-route", dest="d_routes", type=_parse_float_set,
                   default=[1000.0], help="comma-separated route lengths, m")
    p.add_argument("--k", dest="ks", type=_parse_int_set,
                   default=[0, 1, 2, 3, 4, 5, 6],
                   help="comma-separated relay counts")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg", default=None)
    p.set_defaults(func=cmd_eebe)

    p = sub.add_parser("sinr-error",
                       help="cost of computing capacity from SNR instead of SINR")
    _add_common(p)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--d-route", type=float, default=1000.0)
    p.add_argument("--be-min", type=float, default=0.1)
    p.add_argument("--be-max", type=float, default=3.0)
    p.add_argument("--be-step", type=float, default=0.05)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg", default=None)
    p.set_defaults(func=cmd_sinr_error)

    p = sub.add_parser("rate-limit",
                       help="feasible-rate supremum and latency per relay count")
    _add_common(p, eta=False, p00=False)
    p.add_argument("--out-csv", default=None)
    p.set_defaults(func=cmd_rate_limit)

    p = sub.add_parser("compare", help="rank candidate routes by EE*BE/latency")
    _add_common(p, rate_range=(0.1, 4.0, 0.05))
    p.add_argument("--route", dest="routes", action="append",
                   type=_parse_route, default=[],
                   help="candidate route as LENGTH:K, repeatable")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="slot-level schedule run and trace")
    _add_common(p, rate=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pairs", type=int, default=1)
    p.add_argument("--d-route", type=float, default=1000.0)
    p.add_argument("--out-csv", default=None)
    p.set_defaults(func=cmd_simulate)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (InfeasibleRateError, UnsupportedKError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (TwrcError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
