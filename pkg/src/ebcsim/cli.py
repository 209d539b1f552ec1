"""Command line front end.

Subcommands: region (closed-form geometry), simulate (Monte Carlo for
one configuration), compare (two variants on matched seeds), sweep
(convergence over message sizes).  Output is JSON (sorted keys) or CSV.

Exit codes: 0 success, 1 invalid input or configuration, 2 a trial
failed to decode in adaptive mode (which should never happen and
indicates a real problem).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import montecarlo, region, scheme
from .channel import ChannelParams
from .region import RateTriple

__all__ = ["main", "build_parser"]


def _int_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated int list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--delta1", type=float, required=True, help="erasure probability at receiver 1")
    sp.add_argument("--delta2", type=float, required=True, help="erasure probability at receiver 2")
    sp.add_argument("--delta12", type=float, required=True, help="probability both erase at once")
    sp.add_argument("--r0", type=float, default=0.0, help="common message rate")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", help="write output here instead of stdout")
    sp.add_argument("--config", help="JSON file with defaults; explicit flags win")


def _add_run_options(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--k1", type=int, default=10000, help="bits in the first private message")
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--mode", choices=("adaptive", "fixed"), default="adaptive")
    sp.add_argument("--epsilon", type=float, default=0.05, help="fixed-mode budget margin")
    sp.add_argument("--gen-size", type=int, default=scheme.DEFAULT_GEN_SIZE)
    sp.add_argument(
        "--seed",
        type=int,
        default=int(os.environ.get("EBC_SEED", "0")),
        help="base seed (env EBC_SEED, then 0)",
    )


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="ebcsim",
        description="Two-user erasure broadcast channel with delayed state feedback: "
        "capacity geometry and protocol simulation.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    table: dict[str, argparse.ArgumentParser] = {}

    sp = subs.add_parser("region", help="closed-form rate region geometry at one r0")
    _add_common(sp)
    table["region"] = sp

    sp = subs.add_parser("simulate", help="Monte Carlo trials of one scheme variant")
    _add_common(sp)
    _add_run_options(sp)
    sp.add_argument("--variant", choices=scheme.VARIANTS, default="capacity")
    table["simulate"] = sp

    sp = subs.add_parser("compare", help="two variants on matched per-trial seeds")
    _add_common(sp)
    _add_run_options(sp)
    sp.add_argument(
        "--variants", nargs=2, choices=scheme.VARIANTS, default=["capacity", "baseline"]
    )
    table["compare"] = sp

    sp = subs.add_parser("sweep", help="convergence over increasing message sizes")
    _add_common(sp)
    _add_run_options(sp)
    sp.add_argument("--variant", choices=scheme.VARIANTS, default="capacity")
    sp.add_argument(
        "--k1-values", type=_int_list, default=[1000, 4000, 16000], dest="k1_values"
    )
    table["sweep"] = sp

    return parser, table


def _apply_config(argv: list[str], table: dict[str, argparse.ArgumentParser]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    command = next((tok for tok in argv if tok in table), None)
    if command is None:
        return
    sp = table[command]
    dests = {a.dest for a in sp._actions}
    unknown = sorted(set(cfg) - dests)
    if unknown:
        raise ValueError(f"config keys not recognized by '{command}': {', '.join(unknown)}")
    sp.set_defaults(**cfg)


def _triple_dict(r: RateTriple) -> dict:
    return {"r1": r.r1, "r2": r.r2, "r0": r.r0}


def _unswap_triple(r: RateTriple, swapped: bool) -> RateTriple:
    return RateTriple(r.r2, r.r1, r.r0) if swapped else r


def cmd_region(args) -> tuple[dict, list[dict], bool]:
    p = ChannelParams(args.delta1, args.delta2, args.delta12)
    p_can, _, swapped = region.canonicalize(p)
    corner = _unswap_triple(region.target_corner(p_can, args.r0), swapped)
    rb = region.r_bar(p_can)
    case = "II" if args.r0 <= rb + 1e-15 else "I"
    sl = region.region_slice(p_can, args.r0)
    bl = region.baseline_region_slice(p_can, args.r0)

    def verts(s):
        return [[v[1], v[0]] if swapped else [v[0], v[1]] for v in s.vertices]

    payload = {
        "delta1": args.delta1,
        "delta2": args.delta2,
        "delta12": args.delta12,
        "r0": args.r0,
        "r_bar": rb,
        "case": case,
        "corner": _triple_dict(corner),
        "sum_rate_max": region.sum_rate_max(p_can, args.r0),
        "slice": {"vertices": verts(sl), "active_bounds": list(sl.active_bounds)},
        "baseline": {
            "vertices": verts(bl),
            "sum_rate_max": max(v[0] + v[1] for v in bl.vertices) + args.r0,
        },
    }
    row = {
        "delta1": args.delta1,
        "delta2": args.delta2,
        "delta12": args.delta12,
        "r0": args.r0,
        "case": case,
        "r_bar": rb,
        "corner_r1": corner.r1,
        "corner_r2": corner.r2,
        "sum_rate_max": payload["sum_rate_max"],
        "baseline_sum_rate_max": payload["baseline"]["sum_rate_max"],
    }
    return payload, [row], False


def _trial_rows(summary, variant: str) -> list[dict]:
    return [
        {
            "variant": variant,
            "trial": t.trial,
            "total_n": t.total_n,
            "r1": t.r1,
            "r2": t.r2,
            "r0": t.r0,
            "decoded_ok": t.decoded_ok,
        }
        for t in summary.trials_detail
    ]


def cmd_simulate(args) -> tuple[dict, list[dict], bool]:
    spec = montecarlo.ExperimentSpec(
        params=ChannelParams(args.delta1, args.delta2, args.delta12),
        r0=args.r0,
        k1=args.k1,
        variant=args.variant,
        trials=args.trials,
        mode=args.mode,
        epsilon=args.epsilon,
        gen_size=args.gen_size,
        base_seed=args.seed,
    )
    summary = montecarlo.run_experiment(spec)
    failed = args.mode == "adaptive" and not summary.all_decoded
    return summary.to_dict(), _trial_rows(summary, args.variant), failed


def cmd_compare(args) -> tuple[dict, list[dict], bool]:
    cmp_ = montecarlo.compare_variants(
        ChannelParams(args.delta1, args.delta2, args.delta12),
        args.r0,
        args.k1,
        trials=args.trials,
        variants=tuple(args.variants),
        mode=args.mode,
        epsilon=args.epsilon,
        gen_size=args.gen_size,
        base_seed=args.seed,
    )
    failed = args.mode == "adaptive" and not (
        cmp_.first.all_decoded and cmp_.second.all_decoded
    )
    rows = _trial_rows(cmp_.first, args.variants[0]) + _trial_rows(
        cmp_.second, args.variants[1]
    )
    return cmp_.to_dict(), rows, failed


def cmd_sweep(args) -> tuple[dict, list[dict], bool]:
    points = montecarlo.convergence_sweep(
        ChannelParams(args.delta1, args.delta2, args.delta12),
        args.r0,
        tuple(args.k1_values),
        trials=args.trials,
        variant=args.variant,
        mode=args.mode,
        epsilon=args.epsilon,
        gen_size=args.gen_size,
        base_seed=args.seed,
    )
    failed = args.mode == "adaptive" and not all(p.summary.all_decoded for p in points)
    payload = {"points": [p.to_dict() for p in points]}
    rows = [
        {
            "k1": p.k1,
            "max_rel_error": p.max_rel_error,
            "mean_r1": p.summary.mean.r1,
            "mean_r2": p.summary.mean.r2,
            "mean_r0": p.summary.mean.r0,
            "stderr_r1": p.summary.stderr.r1,
            "stderr_r2": p.summary.stderr.r2,
            "stderr_r0": p.summary.stderr.r0,
            "mean_total_n": p.summary.mean_total_n,
            "decode_success_rate": p.summary.decode_success_rate,
        }
        for p in points
    ]
    return payload, rows, failed


_COMMANDS = {
    "region": cmd_region,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


def _render(payload: dict, rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, table = build_parser()
    try:
        _apply_config(argv, table)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            # argparse uses exit code 2 for usage errors; reserve 2 for
            # decode failures and report bad usage as 1
            return 0 if exc.code == 0 else 1
        payload, rows, failed = _COMMANDS[args.command](args)
        text = _render(payload, rows, args.format)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 2 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
