"""Command-line driver: ``apfree {gen,types,construct,verify,bounds,experiment}``.

Every command prints one canonical JSON run record (sorted keys, floats at
12 significant digits). Exit codes: 0 success / free, 1 verified not free,
2 usage or input error, 3 internal invariant failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .bounds import all_bounds, bound_kssz, bound_squares, type_upper_bound
from .constructor import DEFAULT_MC_SAMPLES, DEFAULT_SEED, DEFAULT_TRIALS, run_construction
from .datasets import (
    RandomSetModel,
    interval_set,
    random_bernoulli_set,
    squares_set,
)
from .geometry import DEFAULT_Z_CANDIDATES
from .intset import IntSetFormatError, atomic_write_text, load_set, save_set
from .progression import count_types, verify_free
from .validation import DomainError, InvariantViolation

EXIT_OK, EXIT_NOT_FREE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
SEED_ENV = "APFREE_SEED"
SQUARES_K_NOTE = (
    "squares experiment uses k=3, n=2, D=1, psi=2*pi*log2(N); "
    "the printed parameter list reads k=1, taken as a typo for k=3"
)


class UsageError(Exception):
    pass


def canonical(obj):
    """Round floats to 12 significant digits and stringify non-finite ones."""
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    return obj


def dumps_record(record: dict) -> str:
    return json.dumps(canonical(record), sort_keys=True, separators=(",", ": "), indent=2) + "\n"


def make_record(command: str, arguments: dict, seed, result: dict) -> dict:
    return {
        "command": command,
        "arguments": arguments,
        "master_seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
        "result": result,
    }


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _emit(args, record: dict) -> None:
    text = dumps_record(record)
    if getattr(args, "record", None):
        atomic_write_text(args.record, text)
    sys.stdout.write(text)


def _arguments(args) -> dict:
    skip = {"func", "record", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------- commands

def cmd_gen(args) -> int:
    if args.kind == "interval":
        values = interval_set(args.n)
    elif args.kind == "squares":
        values = squares_set(args.n)
    else:
        if args.c is None:
            raise UsageError("gen random needs --c")
        values = random_bernoulli_set(RandomSetModel(args.n, args.c, args.k, args.seed))
    if args.out:
        save_set(values, args.out)
    _emit(args, make_record("gen", _arguments(args), args.seed, {"size": len(values)}))
    return EXIT_OK


def cmd_types(args) -> int:
    values = load_set(args.input)
    result = {
        "N": len(values),
        "type_count": count_types(values, args.k, args.D),
        "upper_bounds": type_upper_bound(values, args.k, args.D).to_dict(),
    }
    _emit(args, make_record("types", _arguments(args), None, result))
    return EXIT_OK


def _construction_overrides(args) -> dict:
    return {
        "psi": args.psi, "d": args.d, "delta": args.delta, "N0": args.n0,
        "mc_samples": args.mc_samples, "z_candidates": args.z_candidates,
    }


def cmd_construct(args) -> int:
    values = load_set(args.input)
    result = run_construction(
        values, args.k, args.D, trials=args.trials, master_seed=args.seed,
        **_construction_overrides(args),
    )
    if args.out:
        save_set(result.best_subset, args.out)
    payload = result.to_dict()
    payload["subset"] = list(result.best_subset)
    _emit(args, make_record("construct", _arguments(args), args.seed, payload))
    return EXIT_OK if result.certificate.is_free else EXIT_INTERNAL


def cmd_verify(args) -> int:
    values = load_set(args.input)
    cert = verify_free(values, args.k, args.D)
    _emit(args, make_record("verify", _arguments(args), None, cert.to_dict()))
    if cert.is_free:
        print("free", file=sys.stderr)
        return EXIT_OK
    print("contains " + ",".join(map(str, cert.witness)), file=sys.stderr)
    return EXIT_NOT_FREE


def cmd_bounds(args) -> int:
    reports = [r.to_dict() for r in all_bounds(args.k, args.D, N=args.n, psi=args.psi, C=args.C)]
    if args.r_interval is not None:
        for variant in ("standard", "refined"):
            reports.append({
                "name": f"kssz_{variant}",
                "value": bound_kssz(args.r_interval, variant),
                "inputs": {"r_k_interval": args.r_interval},
            })
    if not reports:
        raise UsageError("no bound applies; the interval bound needs --n >= 4")
    _emit(args, make_record("bounds", _arguments(args), None, {"bounds": reports}))
    return EXIT_OK


def parse_range(text: str, step: int | None = None) -> list[int]:
    """'50..300' (with ``step``) or a comma list '2000,8000'."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            lo_i, hi_i = int(lo), int(hi)
        except ValueError:
            raise UsageError(f"bad range {text!r}") from None
        step = step or 1
        if step < 1:
            raise UsageError("--step must be positive")
        values = list(range(lo_i, hi_i + 1, step))
    else:
        try:
            values = [int(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"bad list {text!r}") from None
    if not values:
        raise UsageError(f"empty range {text!r}")
    if any(v < 1 for v in values):
        raise UsageError("range values must be positive")
    return values


def squares_experiment(Ns, *, trials: int, seed: int, C: float = 1.0, mc_samples=DEFAULT_MC_SAMPLES,
                       z_candidates=DEFAULT_Z_CANDIDATES) -> list[dict]:
    rows = []
    for N in Ns:
        values = squares_set(N)
        psi = max(2.0, 2 * math.pi * math.log2(N)) if N > 1 else 2.0
        result = run_construction(values, 3, 1, trials=trials, master_seed=seed, psi=psi,
                                  mc_samples=mc_samples, z_candidates=z_candidates)
        rows.append({
            "N": N,
            "type_count": result.params.type_count,
            "achieved_size": len(result.best_subset),
            "density": result.density,
            "bound_squares": bound_squares(N, C) if N >= 5 else "",
            "verified": verify_free(result.best_subset, 3, 1).is_free,
        })
    return rows


def random_experiment(ns, *, k: int, c: float, seeds: int, trials: int, seed: int,
                      mc_samples=DEFAULT_MC_SAMPLES, z_candidates=DEFAULT_Z_CANDIDATES) -> list[dict]:
    rows = []
    for n in ns:
        for s in range(seeds):
            values = random_bernoulli_set(RandomSetModel(n, c, k, seed=s))
            row = {"n": n, "seed": s, "set_size": len(values), "achieved_size": 0,
                   "density": 0.0, "verified": True}
            if values:
                result = run_construction(values, k, 1, trials=trials, master_seed=seed + s,
                                          mc_samples=mc_samples, z_candidates=z_candidates)
                row.update(achieved_size=len(result.best_subset), density=result.density,
                           verified=verify_free(result.best_subset, k, 1).is_free)
            rows.append(row)
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def cmd_experiment(args) -> int:
    notes = []
    if args.name == "squares":
        if args.N is None:
            raise UsageError("experiment squares needs --N")
        rows = squares_experiment(parse_range(args.N, args.step), trials=args.trials,
                                  seed=args.seed, C=args.C, mc_samples=args.mc_samples,
                                  z_candidates=args.z_candidates)
        notes.append(SQUARES_K_NOTE)
    else:
        if args.n is None:
            raise UsageError("experiment random needs --n")
        if args.seeds < 1:
            raise UsageError("--seeds must be positive")
        rows = random_experiment(parse_range(args.n, args.step), k=args.k, c=args.c,
                                 seeds=args.seeds, trials=args.trials, seed=args.seed,
                                 mc_samples=args.mc_samples, z_candidates=args.z_candidates)
    text = rows_to_csv(rows)
    if args.out:
        atomic_write_text(args.out, text)
    all_verified = all(r["verified"] for r in rows)
    result = {"rows": rows, "all_verified": all_verified, "notes": notes}
    _emit(args, make_record("experiment", _arguments(args), args.seed, result))
    return EXIT_OK if all_verified else EXIT_INTERNAL


# ------------------------------------------------------------------ parser

def _add_kD(p, k_default=None):
    p.add_argument("--k", type=int, required=k_default is None, default=k_default)
    p.add_argument("--D", type=int, default=1)


def _add_construction_flags(p):
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mc-samples", type=int, default=DEFAULT_MC_SAMPLES)
    p.add_argument("--z-candidates", type=int, default=DEFAULT_Z_CANDIDATES)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apfree", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write an interval, squares or random set")
    p.add_argument("kind", choices=["interval", "squares", "random"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--record")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("types", help="count progression types in a set")
    p.add_argument("--in", dest="input", required=True)
    _add_kD(p)
    p.add_argument("--record")
    p.set_defaults(func=cmd_types)

    p = sub.add_parser("construct", help="build a progression-free subset")
    p.add_argument("--in", dest="input", required=True)
    _add_kD(p)
    _add_construction_flags(p)
    p.add_argument("--psi", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--n0", type=int)
    p.add_argument("--out")
    p.add_argument("--record")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="check a set for k-term D-progressions")
    p.add_argument("--in", dest="input", required=True)
    _add_kD(p)
    p.add_argument("--record")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="evaluate the closed-form bounds")
    _add_kD(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=int)
    group.add_argument("--psi", type=float)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--r-interval", type=float, help="r_k([N]) value for the transfer bound")
    p.add_argument("--record")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("experiment", help="run the squares or random-set sweep")
    p.add_argument("name", choices=["squares", "random"])
    p.add_argument("--N", help="squares: range '50..300' or list '50,100'")
    p.add_argument("--n", help="random: list '2000,8000' or range")
    p.add_argument("--step", type=int)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--C", type=float, default=1.0)
    _add_construction_flags(p)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--record")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = default_seed()
        return args.func(args)
    except (UsageError, DomainError, IntSetFormatError, OSError) as exc:
        print(f"apfree {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"apfree {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
