"""Command-line interface.

Subcommands cover the whole pipeline: ``gen`` (synthetic data), ``fit``,
``transform``, ``preimage``, ``roundtrip``, ``eval`` and ``plot``.

Exit codes: 0 success, 1 usage error, 2 data/file error, 3 numerical
failure. Diagnostics go to stderr; results go to the requested output
files (or stdout for ``eval``).
"""

import argparse
import os
import sys

import numpy as np

from .datasets import FAMILIES, DatasetSpec, generate
from .exceptions import DataFormatError, DimensionMismatchError, NumericalError
from .io import load_csv, load_model, save_csv, save_model
from .kpca import KernelPCA
from .preimage import solve_preimage

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

_KERNELS = {"gaussian": "gaussian", "linear": "linear", "poly": "polynomial"}
_OBJECTIVES = {"residual": "residual", "log": "gaussian_log"}
_INITS = {"invd": "inv_dist", "invd2": "inv_dist_sq", "expd": "exp_neg_dist"}


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="kpcalib", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = commands.add_parser("gen", help="generate a synthetic dataset")
    gen.add_argument("--family", choices=FAMILIES, required=True)
    gen.add_argument("--n", type=int, required=True, help="number of samples")
    gen.add_argument("--dim", type=int, required=True, help="ambient dimension")
    gen.add_argument("--noise", type=float, default=0.0, help="per-coordinate sigma")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="training CSV (row per sample)")
    gen.add_argument("--heldout", help="optional CSV for the held-out sample")
    gen.set_defaults(func=_cmd_gen)

    fit = commands.add_parser("fit", help="fit a kernel PCA model")
    fit.add_argument("--data", required=True, help="training CSV (row per sample)")
    fit.add_argument("--kernel", choices=sorted(_KERNELS), default="gaussian")
    fit.add_argument("--beta", default="auto", help="gaussian width or 'auto'")
    fit.add_argument("--degree", type=int, default=2)
    fit.add_argument("--offset", type=float, default=0.0)
    dims = fit.add_mutually_exclusive_group()
    dims.add_argument("--eps", type=float, help="captured-variance tolerance in [0, 1)")
    dims.add_argument("--k", type=int, help="explicit reduced dimension")
    fit.add_argument("--no-center", action="store_true", help="skip Gram centering")
    fit.add_argument("--normalization", choices=("unit", "feature"), default="unit")
    fit.add_argument("--out", required=True, help="model file to write")
    fit.set_defaults(func=_cmd_fit)

    transform = commands.add_parser("transform", help="map samples to reduced space")
    transform.add_argument("--model", required=True)
    transform.add_argument("--data", required=True, help="CSV of samples (row each)")
    transform.add_argument("--out", required=True, help="CSV of reduced rows")
    transform.set_defaults(func=_cmd_transform)

    preimage = commands.add_parser("preimage", help="reconstruct pre-images")
    preimage.add_argument("--model", required=True)
    preimage.add_argument("--z", required=True, help="CSV of reduced rows")
    preimage.add_argument("--objective", choices=sorted(_OBJECTIVES))
    preimage.add_argument("--neighbors", type=int, help="active-set size")
    preimage.add_argument("--init", choices=sorted(_INITS), default="invd2")
    preimage.add_argument("--out", required=True, help="CSV of pre-image rows")
    preimage.add_argument("--report", help="optional per-row diagnostics CSV")
    preimage.set_defaults(func=_cmd_preimage)

    roundtrip = commands.add_parser(
        "roundtrip", help="forward+backward map samples, report relative errors"
    )
    roundtrip.add_argument("--model", required=True)
    roundtrip.add_argument("--data", required=True)
    roundtrip.add_argument("--out", required=True, help="CSV with one error per row")
    roundtrip.set_defaults(func=_cmd_roundtrip)

    evaluate = commands.add_parser("eval", help="print the model spectrum")
    evaluate.add_argument("--model", required=True)
    evaluate.set_defaults(func=_cmd_eval)

    plot = commands.add_parser("plot", help="scatter reduced coordinates as SVG")
    plot.add_argument("--z", required=True, help="CSV of reduced rows")
    plot.add_argument("--out", required=True, help="SVG file to write")
    plot.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # raised by --help (0) and usage errors (1)
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DataFormatError, DimensionMismatchError, OSError) as exc:
        print(f"kpcalib: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"kpcalib: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"kpcalib: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _cmd_gen(args):
    spec = DatasetSpec(
        family=args.family,
        ambient_dim=args.dim,
        n_samples=args.n,
        noise_sigma=args.noise,
        seed=args.seed,
    )
    data = generate(spec)
    save_csv(args.out, data.samples)
    if args.heldout:
        save_csv(
            args.heldout,
            data.heldout[:, None],
            comment=f"family={args.family} seed={args.seed} param={data.heldout_param!r}",
        )
    return EXIT_OK


def _cmd_fit(args):
    if args.eps is not None and not 0.0 <= args.eps < 1.0:
        print("kpcalib: error: --eps must lie in [0, 1)", file=sys.stderr)
        return EXIT_USAGE
    if args.k is not None and args.k < 1:
        print("kpcalib: error: --k must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    if args.beta == "auto":
        beta = None
    else:
        try:
            beta = float(args.beta)
        except ValueError:
            print("kpcalib: error: --beta must be a number or 'auto'", file=sys.stderr)
            return EXIT_USAGE
    X = load_csv(args.data).T  # rows become samples again
    model = KernelPCA(
        kernel=_KERNELS[args.kernel],
        beta=beta,
        degree=args.degree,
        offset=args.offset,
        epsilon=args.eps if args.eps is not None else 1e-4,
        k=args.k,
        center=not args.no_center,
        normalization=args.normalization,
    )
    model.fit(X)
    save_model(args.out, model)
    return EXIT_OK


def _cmd_transform(args):
    model = load_model(args.model)
    X = load_csv(args.data).T
    Z = model.transform(X)
    save_csv(args.out, Z.T)
    return EXIT_OK


def _solve_options(args):
    options = {"scheme": _INITS[args.init]}
    if args.objective is not None:
        options["objective"] = _OBJECTIVES[args.objective]
    if args.neighbors is not None:
        options["neighbors"] = args.neighbors
    return options


def _cmd_preimage(args):
    model = load_model(args.model)
    Z = load_csv(args.z)  # (k, n_points)
    options = _solve_options(args)
    results = [solve_preimage(model, z, **options) for z in Z.T]
    save_csv(args.out, np.column_stack([r.x_star for r in results]))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as handle:
            handle.write(
                "objective_value,iterations,converged,grad_norm_proj,nonpositive_target\n"
            )
            for r in results:
                handle.write(
                    f"{r.objective_value!r},{r.report.iterations},"
                    f"{int(r.report.converged)},{r.report.grad_norm_proj!r},"
                    f"{int(r.nonpositive_target)}\n"
                )
    return EXIT_OK


def _cmd_roundtrip(args):
    model = load_model(args.model)
    samples = load_csv(args.data)  # (d, n)
    Z = model.transform(samples.T)
    errors = []
    for x, z in zip(samples.T, Z):
        x_star = solve_preimage(model, z).x_star
        scale = float(np.linalg.norm(x))
        gap = float(np.linalg.norm(x_star - x))
        errors.append(gap / scale if scale > 0 else gap)
    save_csv(args.out, np.array(errors)[None, :])
    return EXIT_OK


def _cmd_eval(args):
    model = load_model(args.model)
    eigenvalues = np.asarray(model.eigenvalues_, dtype=float)
    total = float(eigenvalues.sum())
    kind = "kpca" if isinstance(model, KernelPCA) else "pca"
    print(f"kind: {kind}")
    print(f"k: {model.k_}")
    print(f"total_variance: {total!r}")
    cumulative = 0.0
    for i, value in enumerate(eigenvalues):
        cumulative += float(value)
        share = cumulative / total if total > 0 else float("nan")
        print(f"{i + 1}\t{value!r}\t{share:.6f}")
    return EXIT_OK


def _project_2d(Z):
    """Reduce k-dimensional rows to 2-D plot coordinates.

    k == 1 plots value against sample index; k == 2 plots the two
    coordinates; k >= 3 uses a fixed cabinet projection of the first three:
    (z1 - 0.35*z3, z2 - 0.35*z3).
    """
    if Z.shape[1] == 1:
        return np.column_stack([np.arange(Z.shape[0], dtype=float), Z[:, 0]])
    if Z.shape[1] == 2:
        return Z[:, :2].copy()
    return np.column_stack([Z[:, 0] - 0.35 * Z[:, 2], Z[:, 1] - 0.35 * Z[:, 2]])


def _scatter_svg(points, path, size=480, margin=40):
    xs, ys = points[:, 0], points[:, 1]
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0
    inner = size - 2 * margin

    def sx(v):
        return margin + inner * (v - x_lo) / x_span

    def sy(v):
        return size - margin - inner * (v - y_lo) / y_span

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{inner}" height="{inner}" '
        'fill="none" stroke="#888" stroke-width="1"/>',
    ]
    for x, y in points:
        lines.append(
            f'<circle cx="{sx(x):.3f}" cy="{sy(y):.3f}" r="3" '
            'fill="#1f77b4" fill-opacity="0.8"/>'
        )
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def _cmd_plot(args):
    Z = load_csv(args.z).T  # rows are reduced points
    points = _project_2d(Z)
    _scatter_svg(points, args.out)
    companion = os.path.splitext(args.out)[0] + ".csv"
    save_csv(companion, points.T)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
