"""Command-line front end.

Subcommands: ``gen``, ``fit``, ``transform``, ``reconstruct``, ``report`` and
``manifold``. Exit codes: 0 success, 1 computation error, 2 usage or I/O
error. Any subcommand accepts ``--config FILE`` holding ``key=value`` lines
named after the long flags; flags given on the command line win.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .data import load_csv
from .errors import (
    AAMError,
    EmptyInput,
    FormatError,
    ParseError,
    ShapeError,
    Unsupported,
)
from .indices import index_from_name
from .model import fit, load, save
from .regressors import RegressorSpec
from .synthetic import KINDS, GeneratorSpec, generate, pca_oracle

_IO_ERRORS = (OSError, ParseError, EmptyInput, FormatError, ShapeError)


class UsageError(Exception):
    pass


def _bandwidth(text):
    if text == "silverman":
        return text
    try:
        h = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("bandwidth must be a number or 'silverman'") from None
    if not h > 0:
        raise argparse.ArgumentTypeError("bandwidth must be positive")
    return h


def _fmt(x):
    return repr(float(x))


def _write_csv(path, rows, header=None):
    lines = []
    if header:
        lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _write_json(path, obj):
    text = json.dumps(obj, indent=1) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _require_files(*paths):
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise UsageError(f"input file not found: {p}")


def cmd_gen(args):
    spec = GeneratorSpec(
        kind=args.kind, n=args.n, noise_sd=args.noise, seed=args.seed,
        ambient_p=args.p, rank=args.rank, separation=args.separation, spread=args.spread,
    )
    X = generate(spec).values
    _write_csv(args.out, X, [f"x{j + 1}" for j in range(X.shape[1])] if args.header else None)
    return 0


def cmd_fit(args):
    _require_files(args.data)
    data = load_csv(args.data, has_header=args.header)
    d = args.d if args.d is not None else data.p
    if args.d is None and args.q_threshold is None:
        raise UsageError("give --d or --q-threshold")
    opts = {"symmetrize": True} if args.index == "contiguity" and args.symmetrize else {}
    index = index_from_name(args.index, **opts)
    if args.regressor == "kernel":
        spec = RegressorSpec("kernel", bandwidth=args.bandwidth)
    elif args.regressor == "spline":
        spec = RegressorSpec("spline", knot_count=args.knots, ridge=args.ridge)
    else:
        spec = RegressorSpec("linear")

    start = time.perf_counter()
    model, report = fit(data, d, index, spec, q_threshold=args.q_threshold)
    elapsed = time.perf_counter() - start
    save(model, args.model)
    if args.report:
        out = {
            "status": report.status,
            "stopped_at": report.stopped_at,
            "total_variance": report.total_variance,
            "q_curve": report.q_curve.tolist(),
            "index_values": report.index_values,
            "residual_variances": [s.residual_variance for s in report.steps],
            "axes": [s.axis.tolist() for s in report.steps],
            "centering": [s.centering for s in report.steps],
            "correlations": [c if c == c else None for c in report.correlations()],
            "y_range": model.y_range.tolist(),
        }
        # wall-clock time breaks byte-reproducibility, so it is opt-in
        if args.timings:
            out["timings"] = {"fit_seconds": elapsed}
        _write_json(args.report, out)
    return 0


def cmd_transform(args):
    _require_files(args.model, args.data)
    model = load(args.model)
    X = load_csv(args.data, has_header=args.header).values
    Y = model.transform(X)
    _write_csv(args.out, Y, [f"y{k + 1}" for k in range(model.d)] if args.header else None)
    return 0


def cmd_reconstruct(args):
    _require_files(args.model, args.data)
    model = load(args.model)
    Y = load_csv(args.data, has_header=args.header).values
    X = model.reconstruct(Y)
    _write_csv(args.out, X, [f"x{j + 1}" for j in range(model.p)] if args.header else None)
    return 0


def report_table(model, X, compare_pca=False):
    """Rows (k, Q_k, sigma^2(R^k)[, PCA ratio]) for k = 0..d on data ``X``."""
    var = model.residual_variances(X)
    q = 1.0 - var / var[0] if var[0] > 0 else np.zeros_like(var)
    q[0] = 0.0
    rows = [[k, q[k], var[k]] for k in range(model.d + 1)]
    if compare_pca:
        _, ratios = pca_oracle(X, model.d)
        for row, r in zip(rows, ratios):
            row.append(r)
    return rows


def cmd_report(args):
    _require_files(args.model, args.data)
    model = load(args.model)
    X = load_csv(args.data, has_header=args.header).values
    if X.shape[1] != model.p:
        raise ShapeError(f"data has {X.shape[1]} columns, model expects {model.p}")
    rows = report_table(model, X, args.compare_pca)
    cols = ["k", "Q", "residual_variance"] + (["pca_Q"] if args.compare_pca else [])
    if args.json:
        _write_json(args.out, {"columns": cols, "rows": [[int(r[0])] + [float(v) for v in r[1:]] for r in rows]})
        return 0
    lines = ["\t".join(cols)]
    for r in rows:
        lines.append("\t".join([str(int(r[0]))] + [f"{v:.6g}" for v in r[1:]]))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def manifold_points(model, samples=200, ranges=None):
    """Grid of principal values and their reconstructions.

    Returns ``(Y, X)``: a sweep of ``samples`` values for d = 1, a
    ``samples x samples`` grid (first coordinate slowest) for d = 2.
    """
    if model.d not in (1, 2):
        raise Unsupported(
            f"manifold output needs d in {{1, 2}}, model has d = {model.d}; "
            "refit with a smaller d or project the data first"
        )
    if samples < 2:
        raise UsageError("need at least two samples per axis")
    ranges = model.y_range if ranges is None else np.asarray(ranges, dtype=float)
    grids = [np.linspace(lo, hi, samples) for lo, hi in ranges[: model.d]]
    if model.d == 1:
        Y = grids[0][:, None]
    else:
        g1, g2 = np.meshgrid(grids[0], grids[1], indexing="ij")
        Y = np.column_stack([g1.ravel(), g2.ravel()])
    return Y, model.reconstruct(Y)


def cmd_manifold(args):
    _require_files(args.model)
    model = load(args.model)
    ranges = None
    if args.range:
        if len(args.range) != model.d:
            raise UsageError(f"give one --range per axis ({model.d})")
        ranges = args.range
    Y, X = manifold_points(model, args.samples, ranges)
    header = [f"y{k + 1}" for k in range(model.d)] + [f"x{j + 1}" for j in range(model.p)]
    _write_csv(args.out, np.hstack([Y, X]), header)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="aam", description="Auto-associative models (nonlinear PCA).")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--config", help="key=value file mirroring the flags")
        subs[name] = p
        return p

    p = add("gen", cmd_gen, "generate a synthetic dataset")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--separation", type=float, default=3.0)
    p.add_argument("--spread", type=float, default=0.5)
    p.add_argument("--header", action="store_true")
    p.add_argument("--out", required=True)

    p = add("fit", cmd_fit, "fit a model")
    p.add_argument("--data", required=True)
    p.add_argument("--header", action="store_true")
    p.add_argument("--d", type=int)
    p.add_argument("--index", choices=("variance", "contiguity"), default="contiguity")
    p.add_argument("--symmetrize", action="store_true")
    p.add_argument("--regressor", choices=("linear", "kernel", "spline"), default="spline")
    p.add_argument("--bandwidth", type=_bandwidth, default="silverman")
    p.add_argument("--knots", type=int, default=4)
    p.add_argument("--ridge", type=float, default=0.0)
    p.add_argument("--q-threshold", type=float)
    p.add_argument("--model", required=True)
    p.add_argument("--report")
    p.add_argument("--timings", action="store_true")

    for name, func, what in (("transform", cmd_transform, "principal values of data"),
                             ("reconstruct", cmd_reconstruct, "manifold points from principal values")):
        p = add(name, func, what)
        p.add_argument("--model", required=True)
        p.add_argument("--data", required=True)
        p.add_argument("--header", action="store_true")
        p.add_argument("--out")

    p = add("report", cmd_report, "information ratio table")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--header", action="store_true")
    p.add_argument("--compare-pca", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")

    p = add("manifold", cmd_manifold, "sample the fitted manifold")
    p.add_argument("--model", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--range", type=float, nargs=2, action="append", metavar=("LO", "HI"))
    p.add_argument("--out")

    return parser, subs


def _apply_config(parser, subs, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config or known.command not in subs:
        return
    path = Path(known.config)
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    target = subs[known.command]
    actions = {a.dest: a for a in target._actions}
    defaults = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        dest = key.lstrip("-").replace("-", "_")
        action = actions.get(dest)
        if action is None or dest in ("help", "config"):
            raise UsageError(f"{path}:{lineno}: unknown option {key!r}")
        if action.nargs == 0:
            defaults[dest] = value.lower() in ("1", "true", "yes", "on")
        else:
            defaults[dest] = action.type(value) if action.type else value
        action.required = False
    target.set_defaults(**defaults)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser, subs = build_parser()
    try:
        _apply_config(parser, subs, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"aam: {exc}", file=sys.stderr)
        return 2
    except Unsupported as exc:
        print(f"aam: {exc}", file=sys.stderr)
        return 2
    except _IO_ERRORS as exc:
        print(f"aam: {exc}", file=sys.stderr)
        return 2
    except AAMError as exc:
        where = f" in step [{exc.step}]" if exc.step else ""
        print(f"aam: error{where}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
