"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 property or certification failure.
The default seed is 42, overridable through ``ISOTONE_KIT_SEED``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bkc, certify, choquet, demos
from .capacity import Capacity, DistortionFn, distort, is_submodular, validate_capacity
from .errors import CapabilityError, IsotoneKitError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_FAILED = 3


class InputError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get("ISOTONE_KIT_SEED")
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"ISOTONE_KIT_SEED must be an integer, got {raw!r}") from None


def load_json(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{path}: no such file")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _read(path: str, reader, what: str):
    data = load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object for {what}")
    try:
        return reader(data)
    except (IsotoneKitError, ValueError, TypeError) as exc:
        raise InputError(f"{path}: invalid {what}: {exc}") from None


def read_capacity(path: str) -> Capacity:
    return _read(path, Capacity.from_dict, "capacity")


def read_function(path: str) -> np.ndarray:
    def parse(d):
        if "values" not in d:
            raise InputError(f"{path}: function file lacks field 'values'")
        vals = np.asarray(d["values"], dtype=float)
        if vals.ndim != 1 or not np.all(np.isfinite(vals)):
            raise InputError(f"{path}: 'values' must be a list of finite numbers")
        return vals

    return _read(path, parse, "function")


def emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


# -- subcommands --------------------------------------------------------------


def cmd_capacity_check(args) -> int:
    c = read_capacity(args.capacity)
    rep = validate_capacity(c)
    out = {"n": c.n, "validation": rep.to_dict()}
    if rep.ok:
        try:
            sub = is_submodular(c)
            out["submodular"] = sub.ok
            if not sub.ok:
                out["submodularity_counterexample"] = list(sub.counterexample)
        except CapabilityError as exc:
            out["submodular"] = None
            out["submodular_note"] = str(exc)
    emit(_dump(out), args.output)
    return EXIT_OK if rep.ok else EXIT_FAILED


def cmd_distort(args) -> int:
    try:
        weights = [float(w) for w in args.weights.split(",")]
    except ValueError:
        raise InputError(f"--weights must be comma-separated numbers, got {args.weights!r}") from None
    try:
        u = DistortionFn.parse(args.distortion)
        c = distort(weights, u)
    except IsotoneKitError as exc:
        raise InputError(str(exc)) from None
    emit(c.to_json(), args.output)
    return EXIT_OK


def cmd_integrate(args) -> int:
    c = read_capacity(args.capacity)
    f = read_function(args.function)
    A = c.full if args.set is None else args.set
    try:
        value = choquet.choquet_discrete(f, c, A)
    except IsotoneKitError as exc:
        raise InputError(str(exc)) from None
    if args.output:
        emit(json.dumps({"set": A, "value": value}), args.output)
    print(f"{value:.8f}")
    return EXIT_OK


def cmd_properties(args) -> int:
    c = read_capacity(args.capacity)
    out = {}
    ok = True
    if args.suite in ("axioms", "all"):
        rep = choquet.check_integral_axioms(c, args.trials, args.seed, args.tol)
        out["axioms"] = rep.to_dict()
        ok &= rep.passed
    if args.suite in ("subadditivity", "all"):
        try:
            rep = choquet.check_subadditivity(c, args.trials, args.seed, args.tol)
        except IsotoneKitError as exc:
            raise InputError(str(exc)) from None
        out["subadditivity"] = rep.to_dict()
        ok &= rep.passed
    emit(_dump(out), args.output)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_bkc(args) -> int:
    if args.function not in bkc.FUNCTIONS:
        raise InputError(f"unknown function {args.function!r}; choose from {sorted(bkc.FUNCTIONS)}")
    try:
        u = DistortionFn.parse(args.distortion)
        grid = np.linspace(0.0, 1.0, args.grid_points)
        rows = bkc.bkc_error_table(bkc.FUNCTIONS[args.function], u, args.degree, args.samples, grid)
    except IsotoneKitError as exc:
        raise InputError(str(exc)) from None
    emit(bkc.error_table_csv(rows), args.output)
    return EXIT_OK


def cmd_certify(args) -> int:
    fmap = _read(args.map, certify.MaxAffineMap.from_dict, "max-affine map")
    verdict = certify.certify_isotone(fmap, args.cone)
    out = verdict.to_dict()
    if verdict.certified and args.probes > 0:
        worst = certify.probe_monotone_pairs(fmap, args.probes, args.seed, args.cone)
        out["probe_check"] = {"probes": args.probes, "max_violation": worst, "pass": worst <= 1e-9}
    emit(_dump(out), args.output)
    return EXIT_OK if verdict.certified else EXIT_FAILED


def cmd_sym_demo(args) -> int:
    out = demos.symmetric_demo(args.dim, args.trials, args.seed, args.p)
    emit(_dump(out), args.output)
    return EXIT_OK if out["pass"] else EXIT_FAILED


def cmd_choquet_demo(args) -> int:
    if not 2 <= len(args.capacity) <= 4:
        raise InputError("choquet-demo takes 2 to 4 --capacity files")
    caps = [read_capacity(p) for p in args.capacity]
    h = read_function(args.function)
    try:
        rep = demos.tangent_minorant(caps, h, args.probes, args.seed)
    except IsotoneKitError as exc:
        raise InputError(str(exc)) from None
    emit(_dump(rep.to_dict()), args.output)
    return EXIT_OK if rep.passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="isotone-kit",
        description="Choquet integrals, capacities, Loewner-order checks and isotonicity certification.",
    )
    sub = p.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--output", "-o", help="write the result here instead of stdout")
        return sp

    sp = add("capacity-check", cmd_capacity_check, "validate a capacity and test submodularity")
    sp.add_argument("--capacity", required=True)

    sp = add("distort", cmd_distort, "build the distorted probability u(P(S))")
    sp.add_argument("--weights", required=True, help="comma-separated probabilities")
    sp.add_argument("--distortion", default="identity", help="identity | power:A | pwl:x,y;... | table:v,...")

    sp = add("integrate", cmd_integrate, "Choquet integral of a discrete function")
    sp.add_argument("--capacity", required=True)
    sp.add_argument("--function", required=True)
    sp.add_argument("--set", type=int, default=None, help="subset bitmask (default: whole set)")

    sp = add("properties", cmd_properties, "randomized Choquet property suites")
    sp.add_argument("--capacity", required=True)
    sp.add_argument("--suite", choices=["axioms", "subadditivity", "all"], default="all")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--tol", type=float, default=choquet.PROPERTY_TOL)

    sp = add("bkc", cmd_bkc, "sup-error table of the Bernstein-Kantorovich-Choquet operator (CSV)")
    sp.add_argument("--function", default="identity", help=f"one of {', '.join(sorted(bkc.FUNCTIONS))}")
    sp.add_argument("--degree", type=int, nargs="+", default=[4, 16, 64])
    sp.add_argument("--distortion", default="identity")
    sp.add_argument("--samples", type=int, default=10_000, help="quadrature samples per cell")
    sp.add_argument("--grid-points", type=int, default=201)

    sp = add("certify", cmd_certify, "certify isotonicity of a max-affine map")
    sp.add_argument("--map", required=True)
    sp.add_argument("--cone", action="store_true", help="restrict to the nonnegative orthant")
    sp.add_argument("--probes", type=int, default=10_000, help="random monotone pairs to re-check a certificate")
    sp.add_argument("--seed", type=int, default=None)

    sp = add("sym-demo", cmd_sym_demo, "largest-eigenvalue subgradients and Weyl / Loewner-Heinz checks")
    sp.add_argument("--dim", type=int, default=4)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--seed", type=int, default=None)

    sp = add("choquet-demo", cmd_choquet_demo, "positive linear minorant tangent to Choquet integrals")
    sp.add_argument("--capacity", action="append", required=True, help="repeat 2 to 4 times")
    sp.add_argument("--function", required=True, help="h: nonnegative, distinct values")
    sp.add_argument("--probes", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=None)
    return p


def run(args: argparse.Namespace) -> int:
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = default_seed()
        return args.func(args)
    except (InputError, IsotoneKitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main(argv=None) -> int:
    return run(build_parser().parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
