"""Command-line interface.

Exit codes: 0 success, 1 I/O error, 2 invalid arguments, 3 nonphysical input,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from . import classification, montecarlo, protocols, sweep
from .core import StandardFormParams
from .errors import BadRange, GaussianWorkError, InsufficientSamples, NotPhysical
from .protocols import ProtocolKind

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_NONPHYSICAL = 3
EXIT_NUMERICAL = 4


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected X,P but got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text: str) -> tuple[int, int]:
    parts = text.split(",")
    try:
        counts = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
    if len(counts) == 1:
        counts *= 2
    if len(counts) != 2 or min(counts) < 2:
        raise argparse.ArgumentTypeError("grid must be N or N,M with N, M >= 2")
    return counts[0], counts[1]


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _add_params(p: argparse.ArgumentParser) -> None:
    for name in ("a", "b", "c1", "c2"):
        p.add_argument(f"--{name}", type=float, required=True)


def _params(args) -> StandardFormParams:
    return StandardFormParams(args.a, args.b, args.c1, args.c2)


def _print_fields(obj) -> None:
    for key, value in sweep._plain(obj).items():
        print(f"{key}: {value}")


def cmd_classify(args) -> int:
    record = classification.classify(_params(args))
    if args.json:
        sweep.emit(record, "json")
    else:
        _print_fields(record)
        print(f"class: {record.label}")
    return EXIT_OK


def cmd_work(args) -> int:
    params = _params(args)
    kind = ProtocolKind(args.protocol)
    if kind is ProtocolKind.HOMODYNE_AVERAGE:
        runs = [
            protocols.run_protocol(params, ProtocolKind.HOMODYNE_X, args.outcome),
            protocols.run_protocol(params, ProtocolKind.HOMODYNE_P, args.outcome),
        ]
        work = protocols.work_hom(params)
    else:
        runs = [protocols.run_protocol(params, kind, args.outcome)]
        work = runs[0].work
    if args.json:
        out = {"protocol": kind.value, "work": work}
        if args.trace:
            out["trajectories"] = [t.to_dict() for t in runs]
        sweep.emit(out, "json")
        return EXIT_OK
    print(f"work: {work!r}")
    if args.trace:
        for t in runs:
            print()
            sweep.emit(t, "json")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.mode == "symmetric":
        needed = ("a_min", "a_max", "c_min", "c_max")
    else:
        needed = ("a", "b", "c1_min", "c1_max", "c2_min", "c2_max")
    missing = [n for n in needed if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise BadRange(f"{args.mode} sweep needs {flags}")
    if args.mode == "symmetric":
        rows = sweep.sweep_symmetric(
            (args.a_min, args.a_max), (args.c_min, args.c_max), args.grid, workers=args.workers
        )
    else:
        rows = sweep.sweep_quadrant(
            args.a,
            args.b,
            (args.c1_min, args.c1_max),
            (args.c2_min, args.c2_max),
            args.grid,
            workers=args.workers,
        )
    if args.verify:
        checked = sweep.verify_rows(rows, seed=args.seed, protocol=args.protocol)
        print(f"verified {checked} rows against trajectories", file=sys.stderr)
    sweep.emit(rows, args.format, args.out)
    return EXIT_OK


def cmd_boundary(args) -> int:
    dot = sweep.red_dot(args.a, args.b, args.kind, args.protocol)
    if args.json:
        sweep.emit(dot, "json")
    else:
        _print_fields(dot)
    return EXIT_OK


def cmd_transition(args) -> int:
    if args.fix_b is not None:
        value = sweep.find_transition_a(args.fix_b, args.protocol)
        print(f"a: {value!r}")
    else:
        if args.a is None:
            raise BadRange("transition needs --a or --fix-b")
        value = sweep.find_transition_b(args.a, args.protocol)
        print(f"b: {value!r}")
    return EXIT_OK


def cmd_steer_vanish(args) -> int:
    print(f"b: {sweep.find_steer_vanish_b(args.a)!r}")
    return EXIT_OK


def cmd_mc(args) -> int:
    params = _params(args)
    mean, stderr = montecarlo.mc_work(params, args.protocol, args.samples, args.seed, workers=args.workers)
    closed = float(protocols.work_closed(args.protocol, *params.as_tuple()))
    out = {
        "protocol": args.protocol,
        "samples": args.samples,
        "seed": args.seed,
        "mean_work": mean,
        "stderr": stderr,
        "closed_form": closed,
    }
    if args.json:
        sweep.emit(out, "json")
    else:
        for key, value in out.items():
            print(f"{key}: {value}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussian-work",
        description="Extractable work and correlation classes of two-mode Gaussian states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    protocols_all = [k.value for k in ProtocolKind]

    p = sub.add_parser("classify", help="physicality, separability and steerability flags")
    _add_params(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("work", help="extractable work of one protocol")
    _add_params(p)
    p.add_argument("--protocol", choices=protocols_all, required=True)
    p.add_argument("--outcome", type=_pair, default=(0.0, 0.0), metavar="X,P")
    p.add_argument("--trace", action="store_true", help="print the full trajectory")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_work)

    p = sub.add_parser("sweep", help="grid sweep written as CSV or JSON")
    p.add_argument("--mode", choices=["symmetric", "quadrant"], required=True)
    for name in ("a", "b", "a-min", "a-max", "c-min", "c-max", "c1-min", "c1-max", "c2-min", "c2-max"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--grid", type=_grid, default=(41, 41), metavar="N[,M]")
    p.add_argument(
        "--protocol",
        choices=["hom", "het", "both"],
        default="both",
        help="work column(s) cross-checked by --verify; rows always carry both works",
    )
    p.add_argument("--out", required=True, help="output path, or - for stdout")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--verify", action="store_true", help="cross-check 1%% of rows with trajectories")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("boundary", help="maximum work along a class boundary (red dot)")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--kind", choices=[k.value for k in classification.BoundaryKind], required=True)
    p.add_argument("--protocol", choices=protocols_all, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("transition", help="b (or a with --fix-b) where the red dot jumps to the edges")
    p.add_argument("--a", type=float)
    p.add_argument("--fix-b", type=float)
    p.add_argument("--protocol", choices=protocols_all, required=True)
    p.set_defaults(func=cmd_transition)

    p = sub.add_parser("steer-vanish", help="b below which no Bob-to-Alice steerable state exists")
    p.add_argument("--a", type=float, required=True)
    p.set_defaults(func=cmd_steer_vanish)

    p = sub.add_parser("mc", help="Monte-Carlo estimate of the protocol work")
    _add_params(p)
    p.add_argument("--protocol", choices=protocols_all, required=True)
    p.add_argument("--samples", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_mc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotPhysical as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONPHYSICAL
    except (BadRange, InsufficientSamples) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GaussianWorkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
