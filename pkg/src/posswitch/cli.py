"""Command-line interface: ``posswitch analyze|trajectory|verify|hourglass``.

Every subcommand reads a system file, prints one JSON report on stdout and
writes diagnostics to stderr. Exit codes: 0 success (whatever the
verdict), 2 invalid input or arguments, 3 enumeration budget exceeded,
4 no dominant member at a visited trajectory state.
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import BudgetError, NoDominantMatrix, SwitchingError
from .hourglass import check_hourglass, sample_vectors
from .io import build_system, parse_system
from .matset import DEFAULT_LIMIT
from .oracle import DEFAULT_BUDGET, exhaustive_extremum
from .spectral import NORMS, analyze, product_bounds
from .trajectory import greedy_trajectory, stabilizing_sequence

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_NO_DOMINANT = 0, 2, 3, 4
FINREL_TOL = 1e-8
TRIAL_RTOL = 1e-9


class _UsageError(Exception):
    pass


def _vector(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _load(path, limit):
    desc = parse_system(path)
    system = build_system(desc, limit)
    digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return system, digest


def _document(command, path, digest, seed, flags, result):
    return {
        "tool": "posswitch",
        "version": __version__,
        "command": command,
        "input": {"path": str(path), "sha256": digest},
        "seed": seed,
        "flags": flags,
        "result": result,
    }


def cmd_analyze(args):
    system, digest = _load(args.path, args.limit)
    report = analyze(system.matrix_set, method=args.method, oracle_depth=args.oracle_depth,
                     norm=args.norm, n_samples=args.samples, seed=args.seed,
                     limit=args.limit, budget=args.budget)
    flags = {"method": args.method, "oracle_depth": args.oracle_depth, "norm": args.norm,
             "samples": args.samples}
    return _document("analyze", args.path, digest, args.seed, flags, report.to_dict())


def cmd_trajectory(args):
    system, digest = _load(args.path, args.limit)
    S = system.matrix_set
    n = S.shape[1]
    x0 = args.x0 if args.x0 is not None else [1.0] * n
    if len(x0) != n:
        raise _UsageError(f"x0 has {len(x0)} coordinates, system dimension is {n}")
    if any(not v > 0 for v in x0):
        raise _UsageError("x0 must be strictly positive")
    nus = [v for item in args.nu for v in item.split(",")] if args.nu else ["l1"]
    if args.stabilize:
        res = stabilizing_sequence(S, x0, args.steps, objective=nus[0],
                                   normalize=args.normalize, limit=args.limit)
        res.evaluate(nus[1:])
    else:
        res = greedy_trajectory(S, x0, args.steps, args.direction, objectives=nus,
                                normalize=args.normalize, limit=args.limit)
    flags = {"x0": x0, "steps": args.steps,
             "direction": "min" if args.stabilize else args.direction,
             "nu": nus, "normalize": args.normalize, "stabilize": args.stabilize}
    return _document("trajectory", args.path, digest, args.seed, flags, res.to_dict())


def _close(a, b, rtol):
    return abs(a - b) <= rtol * max(1.0, abs(a), abs(b))


def cmd_verify(args):
    system, digest = _load(args.path, args.limit)
    S = system.matrix_set
    report = analyze(S, n_samples=args.samples, seed=args.seed, limit=args.limit)
    non_h = report.hset_status == "falsified"
    properties = []

    for depth in range(1, args.max_depth + 1):
        b = product_bounds(S, depth, norm=args.norm, budget=args.budget, limit=args.limit)
        upper_ok = b.jsr_lower <= report.rho_max + FINREL_TOL
        lower_ok = b.lsr_upper >= report.rho_min - FINREL_TOL
        attained = _close(b.jsr_lower, report.rho_max, FINREL_TOL) and \
            _close(b.lsr_upper, report.rho_min, FINREL_TOL)
        ok = upper_ok and lower_ok and attained
        status = "pass" if ok else ("expected-for-non-H" if non_h else "fail")
        properties.append({"property": "finrel-consistency", "depth": depth,
                           "status": status, "rho_max": report.rho_max,
                           "rho_min": report.rho_min, **b.to_dict()})

    n = S.shape[1]
    x0s = sample_vectors(n, args.trials, seed=args.seed)
    for t, x0 in enumerate(x0s):
        for direction in ("max", "min"):
            entry = {"property": "greedy-vs-exhaustive", "trial": t,
                     "direction": direction, "steps": args.max_depth,
                     "x0": x0.tolist()}
            try:
                g = greedy_trajectory(S, x0, args.max_depth, direction,
                                      objectives=("l1", "l2", "linf"), limit=args.limit)
            except NoDominantMatrix as exc:
                entry["status"] = "expected-for-non-H" if non_h else "fail"
                entry["detail"] = str(exc)
                properties.append(entry)
                continue
            values = {}
            ok = True
            for nu in ("l1", "l2", "linf"):
                ex = exhaustive_extremum(S, x0, args.max_depth, nu, direction,
                                         budget=args.budget, limit=args.limit)
                greedy_val = float(g.nu[nu][-1])
                values[nu] = {"greedy": greedy_val, "exhaustive": ex.value}
                ok &= _close(greedy_val, ex.value, TRIAL_RTOL)
            entry["values"] = values
            entry["status"] = "pass" if ok else "fail"
            properties.append(entry)

    summary = {
        "hset_status": report.hset_status,
        "rho_max": report.rho_max,
        "rho_min": report.rho_min,
        "passed": sum(p["status"] == "pass" for p in properties),
        "failed": sum(p["status"] == "fail" for p in properties),
        "expected_for_non_h": sum(p["status"] == "expected-for-non-H" for p in properties),
    }
    summary["consistent"] = summary["failed"] == 0
    flags = {"max_depth": args.max_depth, "trials": args.trials, "norm": args.norm,
             "samples": args.samples}
    return _document("verify", args.path, digest, args.seed, flags,
                     {"summary": summary, "properties": properties})


def cmd_hourglass(args):
    if args.samples < 1:
        raise _UsageError("--samples must be at least 1")
    system, digest = _load(args.path, args.limit)
    verdict = check_hourglass(system.matrix_set, args.samples, seed=args.seed,
                              include=args.include_witness, limit=args.limit)
    flags = {"samples": args.samples, "include_witness": args.include_witness}
    return _document("hourglass", args.path, digest, args.seed, flags, verdict.to_dict())


def build_parser():
    parser = argparse.ArgumentParser(
        prog="posswitch",
        description="Stability, stabilizability and extremal trajectories of "
                    "positive switching systems.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("path", help="system description file (YAML)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--limit", type=int, default=DEFAULT_LIMIT,
                       help="maximum number of set members to enumerate")

    p = sub.add_parser("analyze", help="stability/stabilizability verdicts")
    common(p)
    p.add_argument("--oracle-depth", type=int, default=None)
    p.add_argument("--norm", choices=sorted(NORMS), default="inf")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--method", choices=("enumerate", "greedy"), default="enumerate")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("trajectory", help="greedy extremal trajectory")
    common(p)
    p.add_argument("--x0", type=_vector, default=None)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--direction", choices=("max", "min"), default="max")
    p.add_argument("--nu", action="append", default=None,
                   help="objective(s): l1, l2, linf (repeat or comma-separate)")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--stabilize", action="store_true",
                   help="minimizing trajectory with decay rate versus rho_min")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("verify", help="brute-force cross-checks")
    common(p)
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--norm", choices=sorted(NORMS), default="inf")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("hourglass", help="sampled hourglass-alternative check")
    common(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--include-witness", type=_vector, action="append", default=None,
                   help="extra vector tested before the random samples, e.g. '1,1'")
    p.set_defaults(func=cmd_hourglass)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        doc = args.func(args)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NoDominantMatrix as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.state is not None:
            print(f"witness state (step {exc.step}): {np.asarray(exc.state).tolist()}",
                  file=sys.stderr)
        return EXIT_NO_DOMINANT
    except (_UsageError, SwitchingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
