"""Command line front end: ``grunbaum verify|extremal|oracle``.

Exit codes: 0 when every check passes, 1 when a bound is violated beyond
the tolerance, 2 for bad input or configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import extremal, verify
from .gammafn import GammaFunction
from .polytope import VPolytope, cube, standard_simplex

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


def _gamma(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("gamma must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grunbaum", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log skipped trials")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="randomised bound checks")
    v.add_argument("kind", choices=verify.KINDS)
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--k", type=int, default=None, help="section/projection dimension (default n)")
    v.add_argument("--gamma", type=_gamma, default=None)
    v.add_argument("--bodies", type=int, default=200, help="number of random instances")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-6)
    v.add_argument("--grid", type=int, default=64, help="directions per θ-grid")
    v.add_argument("--refine", type=int, default=40, help="Nelder–Mead iterations")
    v.add_argument("--frames", type=int, default=2, help="random k-frames per body")
    v.add_argument("--points", type=int, default=None, help="vertices per random body")
    v.add_argument("--mc-samples", type=int, default=0)
    v.add_argument("--out", default=None)
    v.add_argument("--format", choices=("json", "csv"), default=None,
                   help="report format (default from the --out suffix)")

    e = sub.add_parser("extremal", help="write an equality body or function as JSON")
    e.add_argument("what", choices=("body", "function"))
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--k", type=int, default=None)
    e.add_argument("--gamma", type=_gamma, default=1.0)
    e.add_argument("--family", choices=("sections", "projections", "theorem", "corollary"), default=None,
                   help="body: sections|projections; function: theorem|corollary")
    e.add_argument("--M", type=int, default=None, help="vertices of the ball approximants")
    e.add_argument("--out", default=None)

    o = sub.add_parser("oracle", help="Monte Carlo estimate for a JSON body/function or a built-in body")
    src = o.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="JSON file from `grunbaum extremal` (or to_json)")
    src.add_argument("--builtin", choices=("cube", "simplex"))
    o.add_argument("--n", type=int, default=2)
    o.add_argument("--quantity", choices=("volume", "centroid", "integral"), default="volume")
    o.add_argument("--samples", type=int, default=10 ** 6)
    o.add_argument("--seed", type=int, default=0)
    return p


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text + "\n")
        return
    with open(path, "w") as fh:
        fh.write(text + "\n")


def _cmd_verify(args) -> int:
    k = args.k if args.k is not None else args.n
    if args.kind in ("minkrad", "theorem", "chain"):
        k = 1
    config = verify.TrialConfig(
        n=args.n, k=k, gamma=args.gamma, num_bodies=args.bodies, seed=args.seed,
        theta_grid_size=args.grid, refine_iters=args.refine, mc_samples=args.mc_samples,
        tolerance=args.tol, num_frames=args.frames, num_points=args.points,
    )
    report = verify.run_verification(args.kind, config)
    if args.out:
        fmt = args.format or ("csv" if args.out.endswith(".csv") else "json")
        verify.emit_report(report, args.out, fmt)
    summary = report.summary
    sys.stdout.write(json.dumps(summary) + "\n")
    return EXIT_VIOLATION if summary["violations"] else EXIT_OK


def _cmd_extremal(args) -> int:
    n = args.n
    k = args.k if args.k is not None else n
    if args.what == "body":
        family = args.family or "sections"
        if family == "sections":
            K, E, theta = extremal.ball_sections_data(n, k, args.M)
        elif family == "projections":
            K, E, theta = extremal.projections_equality_body(n, k, M=args.M)
        else:
            raise ValueError(f"{family!r} is not a body family")
        payload = {"body": K.to_dict(), "E": E.basis.tolist(), "theta": theta.tolist(),
                   "bound": extremal.grunbaum_bound(n, k)}
    else:
        family = args.family or "theorem"
        if family == "theorem":
            f = extremal.theorem_equality_function(n, args.gamma)
            E, theta = extremal.standard_frame(n, 1)
            bound = extremal.theorem_bound(n, args.gamma)
        elif family == "corollary":
            f, E, theta = extremal.corollary_equality_function(n, k, args.gamma, args.M)
            bound = extremal.functional_bound(n, k, args.gamma)
        else:
            raise ValueError(f"{family!r} is not a function family")
        payload = {"function": f.to_dict(), "E": E.basis.tolist(), "theta": theta.tolist(), "bound": bound}
    _write(json.dumps(payload), args.out)
    return EXIT_OK


def _load(path: str):
    with open(path) as fh:
        data = json.load(fh)
    if "body" in data:
        data = data["body"]
    elif "function" in data:
        data = data["function"]
    if "gamma" in data:
        return GammaFunction.from_dict(data)
    return VPolytope.from_dict(data)


def _cmd_oracle(args) -> int:
    if args.input:
        obj = _load(args.input)
    else:
        obj = cube(args.n) if args.builtin == "cube" else standard_simplex(args.n)
    quantity = args.quantity
    if isinstance(obj, VPolytope) and quantity == "integral":
        quantity = "volume"
    est, sig = verify.mc_oracle(obj, quantity, args.samples, args.seed)
    out = {"quantity": quantity, "samples": args.samples, "seed": args.seed,
           "estimate": np.asarray(est).tolist(), "sigma": np.asarray(sig).tolist()}
    if isinstance(obj, VPolytope):
        exact = obj.volume if quantity == "volume" else obj.centroid
    else:
        exact = obj.integrate() if quantity == "integral" else obj.fn_centroid()
    out["exact"] = np.asarray(exact).tolist()
    sys.stdout.write(json.dumps(out) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with status 2 on bad usage
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        verify.thread_count()
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "extremal":
            return _cmd_extremal(args)
        return _cmd_oracle(args)
    except (ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"grunbaum: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
