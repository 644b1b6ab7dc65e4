"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .adapt import InterpolationMethod, RefineConfig, coarsen_repeated, refine_loop, sample_points
from .bspline import eval_spline
from .errors import NoConvergence, SplineWaveError, VerifyFailed
from .io import (
    SplineFile,
    dumps_decomposition,
    dumps_spline,
    loads_decomposition,
    loads_spline,
)
from .oracle import oracle_decompose
from .transform import MultiscaleDecomposition, build_levels, pyramid_decompose, reconstruct
from .wavelets import WaveletParams, grid_chain

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_VERIFY = 0, 1, 2, 3
VERIFY_MAX_KNOTS = 64
VERIFY_TOL = 1e-8

BUILTINS = {
    "tanh-step": lambda t: np.tanh(100.0 * (t - 0.5)),
    "sine": lambda t: np.sin(2 * np.pi * t),
    "sawtooth-smooth": lambda t: t - 0.5 - 0.5 * np.tanh(40.0 * (t - 0.5)),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _num(v) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _csv(header, rows) -> str:
    lines = [",".join(header)] + [",".join(_num(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _params(args, sf: SplineFile) -> WaveletParams:
    if args.order is not None and args.order != sf.spline.order:
        raise SplineWaveError(f"--order {args.order} disagrees with the file's order {sf.spline.order}")
    mode = sf.boundary_mode
    if getattr(args, "periodic", None) is not None or getattr(args, "interval", False):
        mode = "periodic" if args.periodic is not None else "interval"
    if (mode == "periodic") != (sf.spline.period is not None):
        raise SplineWaveError(f"boundary mode {mode!r} does not match the file's periodicity")
    return WaveletParams(sf.spline.order, args.moments, mode)


def cmd_eval(args) -> int:
    sf = loads_spline(_read(args.input))
    s = sf.spline
    if args.at:
        try:
            x = np.array([float(v) for v in args.at.split(",")])
        except ValueError:
            raise SplineWaveError(f"cannot parse sample list {args.at!r}") from None
    else:
        x = sample_points(s, args.samples)
    y = eval_spline(s, x)
    _write(args.output, _csv(["t"] + sf.channel_labels(), np.column_stack([x, y])))
    return EXIT_OK


def _verify(md: MultiscaleDecomposition):
    for j, dl in enumerate(md.levels):
        lv = dl.level
        if lv.fine.size > VERIFY_MAX_KNOTS:
            print(f"verify: level {j} skipped ({lv.fine.size} knots > {VERIFY_MAX_KNOTS})",
                  file=sys.stderr)
            continue
        fine = reconstruct(dl)
        oc, od = oracle_decompose(fine, lv)
        err = max(np.abs(oc - dl.coarse_coeffs).max(initial=0.0),
                  np.abs(od - dl.detail_coeffs).max(initial=0.0))
        if err > VERIFY_TOL:
            raise VerifyFailed(f"level {j}: oracle disagreement {err:.3e} > {VERIFY_TOL:g}")
        print(f"verify: level {j} ok (max difference {err:.2e})", file=sys.stderr)


def cmd_decompose(args) -> int:
    sf = loads_spline(_read(args.input))
    p = _params(args, sf)
    s = sf.spline
    if args.levels < 0:
        raise SplineWaveError("--levels must be nonnegative")
    grids = grid_chain(s.knots, args.levels, p)
    md = pyramid_decompose(s, grids, p, build_levels(grids, p, s.period))
    if args.verify:
        _verify(md)
    _write(args.output, dumps_decomposition(md, p, sf.labels))
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    df = loads_decomposition(_read(args.input))
    _write(args.output, dumps_spline(df.reconstruct()))
    return EXIT_OK


def cmd_compress(args) -> int:
    sf = loads_spline(_read(args.input))
    p = _params(args, sf)
    s = sf.spline
    rep = coarsen_repeated(s, p, args.epsilon, args.passes)
    x = sample_points(s, args.samples)
    dev = float(np.abs(eval_spline(rep.result, x) - eval_spline(s, x)).max())
    lo, hi = s.span
    edges = np.linspace(lo, hi, 11)
    counts, _ = np.histogram(np.unique(rep.result.knots), bins=edges)
    print(f"knots: {s.knots.size} -> {rep.result.knots.size} in {rep.passes} passes", file=sys.stderr)
    print(f"bound: {rep.error_bound:.6e}  measured: {dev:.6e}", file=sys.stderr)
    print("knots per tenth of the span: " + " ".join(str(c) for c in counts), file=sys.stderr)
    _write(args.output, dumps_spline(SplineFile(rep.result, p.boundary_mode, labels=sf.labels)))
    return EXIT_OK


def _target(name: str):
    if name in BUILTINS:
        return BUILTINS[name]
    try:
        data = np.loadtxt(name, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise SplineWaveError(f"--function {name!r} is neither builtin nor a readable CSV: {exc}") from None
    if data.shape[1] < 2 or np.any(np.diff(data[:, 0]) <= 0):
        raise SplineWaveError("sample file needs increasing t in column 1 and values in column 2")
    t, y = data[:, 0], data[:, 1]
    return lambda x: np.interp(x, t, y)


def cmd_refine(args) -> int:
    f = _target(args.function)
    m = args.order if args.order is not None else 4
    if args.periodic is not None:
        period = args.periodic
        params = WaveletParams(m, args.moments, "periodic")
        grid = np.linspace(0.0, period, args.initial, endpoint=False)
    else:
        period = None
        params = WaveletParams(m, args.moments, "interval")
        base = np.linspace(0.0, 1.0, args.initial + 1)
        grid = np.r_[np.zeros(m - 1), base, np.ones(m - 1)]
    cfg = RefineConfig(alpha=args.alpha, epsilon=args.epsilon, max_iters=args.max_iters,
                       final_coarsen=args.final_coarsen)
    res = refine_loop(f, InterpolationMethod(m, period), grid, params, cfg, period)
    for h in res.history:
        print(f"iteration {h['iteration']}: {h['knots']} knots, change {h['change']:.3e}, "
              f"error {h['error']:.3e}", file=sys.stderr)
    _write(args.output, dumps_spline(SplineFile(res.spline, params.boundary_mode)))
    if not res.converged:
        raise NoConvergence(f"no convergence after {cfg.max_iters} iterations; wrote last iterate")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="splinewave", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, moments=True):
        p.add_argument("--order", type=int, help="spline order m (must match the file)")
        if moments:
            p.add_argument("--moments", type=int, default=2, help="vanishing moments (default 2)")
        p.add_argument("--output", "-o", help="output path (default stdout)")

    def modes(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--periodic", type=float, metavar="P", help="periodic with period P")
        g.add_argument("--interval", action="store_true", help="interval wavelets")

    p = sub.add_parser("eval", help="sample a spline file as CSV")
    p.add_argument("input")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--at", help="comma separated sample points")
    common(p, moments=False)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("decompose", help="multilevel wavelet decomposition")
    p.add_argument("input")
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--verify", action="store_true", help="check against the dense oracle")
    common(p)
    modes(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("reconstruct", help="invert a decomposition file")
    p.add_argument("input")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("compress", help="coarsen by thresholding details")
    p.add_argument("input")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--passes", type=int, default=1)
    p.add_argument("--samples", type=int, default=2000)
    common(p)
    modes(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("refine", help="adaptive approximation of a target function")
    p.add_argument("--function", required=True,
                   help=f"one of {', '.join(BUILTINS)} or a CSV file of t,y samples")
    p.add_argument("--alpha", type=float, default=2.5)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=20)
    p.add_argument("--initial", type=int, default=16, help="intervals of the initial grid")
    p.add_argument("--final-coarsen", action="store_true")
    common(p)
    modes(p)
    p.set_defaults(func=cmd_refine)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except VerifyFailed as exc:
        print(f"splinewave: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (SplineWaveError, OSError) as exc:
        print(f"splinewave: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
