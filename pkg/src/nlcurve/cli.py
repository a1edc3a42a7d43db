"""Command line front end.

Verbs
-----
compute         one value with the per-piece breakdown
converge        spline refinement sweep over --n
limit           sweep over --sigma for z on the curve, with (1 - sigma) * kappa
oracle-compare  pipeline against the quadrature reference

Exit status is 0 on success, 2 for invalid input and 3 when the geometry
stays degenerate after the automatic retry.  NLCURVE_THREADS caps the
number of worker threads used for sweeps.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import os
import sys
import warnings

import numpy as np

from .decompose import ON_CURVE_TOL, distance_to_curve
from .errors import DegenerateRayError, NlcurveError
from .geometry import CurveSet, Frame
from .io import SpecError, load_spec, parse_list, parse_pair, render
from .oracle import OracleOptions, kappa_oracle
from .pipeline import DegeneracyError, PipelineOptions, _parameter_of, kappa_parametric, kappa_polyline

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_DEGENERATE = 3


class ValidationError(Exception):
    pass


def _threads():
    raw = os.environ.get("NLCURVE_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else min(4, os.cpu_count() or 1)


def _sweep(fn, items):
    """Map in threads; results stay in input order."""
    if len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        return list(pool.map(fn, items))


def evaluate(spec, frame, sigma, n, rho=None, seed=0):
    opts = PipelineOptions(rho=rho, spline_n=n, seed=seed)
    if spec.has_smooth:
        return kappa_parametric(spec.curves, frame, sigma, opts, extra=spec.polylines)
    return kappa_polyline(CurveSet(spec.polylines, validate=False), frame, sigma, opts)


def z_on_curve(spec, z):
    if spec.polylines and distance_to_curve(CurveSet(spec.polylines, validate=False), z) <= ON_CURVE_TOL:
        return True
    return any(_parameter_of(c, z)[1] <= ON_CURVE_TOL for c in spec.curves)


def _oracle(spec, frame, sigma, seed):
    return kappa_oracle(spec.oracle_curves(), frame, sigma, OracleOptions(perturbation_seed=seed))


def _sigmas(text):
    vals = parse_list(text, "--sigma")
    for s in vals:
        if not 0.0 < s < 1.0:
            raise ValidationError(f"sigma must lie in (0, 1), got {s}")
    return vals


def _ns(text):
    vals = parse_list(text, "--n", int)
    for n in vals:
        if n < 2:
            raise ValidationError(f"spline n must be at least 2, got {n}")
    return vals


def _collect(args, reports):
    for rep in reports:
        for w in rep.warnings:
            if w not in args.notes:
                args.notes.append(w)


def cmd_compute(args, spec, frame):
    sigma = _sigmas(args.sigma)
    if len(sigma) != 1:
        raise ValidationError("compute takes a single --sigma")
    n = _ns(args.n)
    if len(n) != 1:
        raise ValidationError("compute takes a single --n")
    rep = evaluate(spec, frame, sigma[0], n[0], args.rho, args.seed)
    _collect(args, [rep])
    meta = {"kappa": rep.value, "sigma": sigma[0]}
    if spec.has_smooth:
        meta["spline_n"] = n[0]
    if rep.removed_disk is not None:
        meta["rho"] = rep.removed_disk
    if args.oracle:
        meta["oracle"] = _oracle(spec, frame, sigma[0], args.seed)
    cols = ["piece_id", "sign", "layer", "side", "n_segments", "contribution"]
    rows = [[p.piece_id, p.sign, p.layer, p.side, p.n_segments, p.contribution] for p in rep.per_piece]
    if args.format == "csv":
        rows.append(["total", None, None, None, None, rep.value])
    return cols, rows, meta


def cmd_converge(args, spec, frame):
    sigma = _sigmas(args.sigma)
    if len(sigma) != 1:
        raise ValidationError("converge takes a single --sigma")
    ns = _ns(args.n)
    reps = _sweep(lambda n: evaluate(spec, frame, sigma[0], n, args.rho, args.seed), ns)
    _collect(args, reps)
    ref = _oracle(spec, frame, sigma[0], args.seed) if args.oracle else None
    cols = ["n", "kappa", "diff_prev"] + (["oracle_err"] if args.oracle else [])
    rows = []
    prev = None
    for n, rep in zip(ns, reps):
        row = [n, rep.value, None if prev is None else abs(rep.value - prev)]
        if args.oracle:
            row.append(abs(rep.value - ref))
        rows.append(row)
        prev = rep.value
    meta = {"sigma": sigma[0]}
    if ref is not None:
        meta["oracle"] = ref
    return cols, rows, meta


def cmd_limit(args, spec, frame):
    sigmas = _sigmas(args.sigma)
    n = _ns(args.n)
    if len(n) != 1:
        raise ValidationError("limit takes a single --n")
    if not z_on_curve(spec, frame.z):
        raise ValidationError("limit requires z on the curve (the classical limit is stated for points of the curve)")
    reps = _sweep(lambda s: evaluate(spec, frame, s, n[0], args.rho, args.seed), sigmas)
    _collect(args, reps)
    cols = ["sigma", "kappa", "scaled"]
    rows = [[s, r.value, (1.0 - s) * r.value] for s, r in zip(sigmas, reps)]
    if args.oracle:
        refs = _sweep(lambda s: _oracle(spec, frame, s, args.seed), sigmas)
        cols += ["oracle", "oracle_scaled"]
        for row, s, ref in zip(rows, sigmas, refs):
            row += [ref, (1.0 - s) * ref]
    return cols, rows, {}


def cmd_oracle_compare(args, spec, frame):
    sigmas = _sigmas(args.sigma)
    ns = _ns(args.n)
    jobs = [(s, n) for s in sigmas for n in ns]
    reps = _sweep(lambda j: evaluate(spec, frame, j[0], j[1], args.rho, args.seed), jobs)
    _collect(args, reps)
    refs = dict(zip(sigmas, _sweep(lambda s: _oracle(spec, frame, s, args.seed), sigmas)))
    cols = ["sigma", "n", "kappa", "oracle", "abs_err"]
    rows = [[s, n, r.value, refs[s], abs(r.value - refs[s])] for (s, n), r in zip(jobs, reps)]
    return cols, rows, {}


COMMANDS = {
    "compute": cmd_compute,
    "converge": cmd_converge,
    "limit": cmd_limit,
    "oracle-compare": cmd_oracle_compare,
}


def build_parser():
    p = argparse.ArgumentParser(prog="nlcurve", description="Nonlocal curvature of planar curves.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--curve", required=True, help="JSON curve spec")
    p.add_argument("--z", required=True, help="evaluation point x,y (use --z=-1,0 for negatives)")
    p.add_argument("--u", required=True, help="direction x,y; normalised on load")
    p.add_argument("--sigma", default="0.5", help="sigma or comma-separated list")
    p.add_argument("--n", default="256", help="spline size or comma-separated list")
    p.add_argument("--rho", type=float, default=None, help="disk radius when z is on the curve")
    p.add_argument("--oracle", action="store_true", help="also compute the quadrature reference")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    args.notes = []
    try:
        spec = load_spec(args.curve)
        z = parse_pair(args.z, "--z")
        u = parse_pair(args.u, "--u")
        if not np.any(u):
            raise ValidationError("unit vector must be nonzero")
        frame = Frame.make(z, u)
        if args.rho is not None and not args.rho > 0:
            raise ValidationError("--rho must be positive")
        with warnings.catch_warnings():
            # reports carry the same messages; main prints each once
            warnings.simplefilter("ignore", RuntimeWarning)
            cols, rows, meta = COMMANDS[args.command](args, spec, frame)
    except (DegeneracyError, DegenerateRayError) as exc:
        print(f"error: degenerate geometry: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValidationError, SpecError, NlcurveError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    for note in args.notes:
        print(f"warning: {note}", file=sys.stderr)
    text = render(cols, rows, args.format, meta)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
