"""Command-line interface: ``isotensor emit|avg|reduce|verify``.

Exit codes: 0 success, 1 verification failure, 2 bad arguments or input,
3 size cap exceeded, 4 dimension mismatch.  Errors go to standard error and
nothing is written to standard output in that case.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from fractions import Fraction

from .combinatorics import DEFAULT_CAP, check_rank
from .errors import DimensionError, IsotensorError, SizeCapError
from .exact_arith import RationalFunction
from .minkowski import reduce_minkowski_isotropic, reduce_minkowski_one_vector
from .sphere_average import average_product
from .subspace_reduction import (
    ReductionResult,
    ReductionTerm,
    reduce_isotropic,
    reduce_multi_vector,
    reduce_one_vector,
)
from .tensor_core import Space, iso_tensor_or_zero
from .vectors import to_fraction

EXIT_FAIL, EXIT_USAGE, EXIT_CAP, EXIT_DIM = 1, 2, 3, 4


class UsageError(Exception):
    pass


def _dim(text: str):
    text = text.strip()
    if text.isdigit() and int(text) > 0:
        return int(text)
    if text.isidentifier():
        return text
    raise argparse.ArgumentTypeError(f"--dim must be a positive integer or a symbol, got {text!r}")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("--seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=_dim, default=None,
                        help="dimension: positive integer or symbol (default n, or d in Minkowski)")
    common.add_argument("--space", choices=("euclidean", "minkowski"), default="euclidean")
    common.add_argument("--dim-symbol", default=None, help="name of the dimension symbol")
    common.add_argument("--format", choices=("text", "json", "latex"), default="text")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest rank allowed")

    parser = argparse.ArgumentParser(
        prog="isotensor", description="Totally symmetric isotropic tensors and tensor-integral reduction.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emit", parents=[common], help="print the isotropic tensor of a given rank")
    p.add_argument("--rank", type=int, required=True)

    p = sub.add_parser("avg", parents=[common], help="exact sphere average of a product of projections")
    p.add_argument("vectors_file", help='JSON file {"n": 3, "vectors": [[...], ...]}')

    p = sub.add_parser("reduce", parents=[common], help="reduce a tensor integral")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--external", type=int, default=0, help="number of external vectors")
    p.add_argument("--scalar", default=None, help="name of the scalar function")

    p = sub.add_parser("verify", parents=[common], help="run the symbolic-vs-numeric battery")
    p.add_argument("--suite", choices=("smoke", "full"), default="smoke")
    p.add_argument("--tolerance-scale", type=float, default=1.0)
    return parser


def _symbol(args) -> str:
    if isinstance(args.dim, str):
        return args.dim
    if args.dim_symbol:
        return args.dim_symbol
    return "d" if args.space == "minkowski" else "n"


def _space(args) -> Space:
    symbol = _symbol(args)
    space = Space.minkowski(symbol) if args.space == "minkowski" else Space(symbol=symbol)
    if isinstance(args.dim, int):
        space = space.with_dim(args.dim)
    return space


def cmd_emit(args, out) -> int:
    if args.rank < 0:
        raise UsageError("--rank must be non-negative")
    check_rank(args.rank + args.rank % 2, args.cap)
    expr = iso_tensor_or_zero(args.rank, space=_space(args), cap=args.cap)
    out.write(expr.render("json" if args.format == "json" else args.format) + "\n")
    if args.rank % 2:
        note = f"note: rank {args.rank} is odd, so the isotropic tensor vanishes\n"
        (sys.stderr if args.format == "json" else out).write(note)
    return 0


def _load_vectors(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        vectors = [[to_fraction(x) for x in v] for v in data["vectors"]]
        n = data.get("n")
    except (OSError, ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot read vectors file {path!r}: {exc}") from exc
    if n is not None and (not isinstance(n, int) or n < 1):
        raise UsageError("'n' must be a positive integer")
    return n, vectors


def _render_scalar(value, fmt, symbol):
    if isinstance(value, RationalFunction):
        if fmt == "latex":
            return value.latex(symbol)
        return value.render(symbol)
    if fmt == "latex":
        v = Fraction(value)
        if v.denominator == 1:
            return str(v.numerator)
        sign = "-" if v < 0 else ""
        return f"{sign}\\frac{{{abs(v.numerator)}}}{{{v.denominator}}}"
    return str(value)


def cmd_avg(args, out) -> int:
    n_file, vectors = _load_vectors(args.vectors_file)
    dims = {len(v) for v in vectors}
    if len(dims) > 1:
        raise DimensionError(f"vectors have mismatched dimensions {sorted(dims)}")
    vec_dim = dims.pop() if dims else None
    if n_file is not None and vec_dim is not None and n_file != vec_dim:
        raise DimensionError(f"vectors have dimension {vec_dim}, file says n={n_file}")
    if isinstance(args.dim, int) and vec_dim is not None and args.dim != vec_dim:
        raise DimensionError(f"vectors have dimension {vec_dim}, not {args.dim}")
    symbol = _symbol(args)
    if isinstance(args.dim, str):
        gram = [[sum(x * y for x, y in zip(u, v)) for v in vectors] for u in vectors]
        value = average_product(gram=gram, n_value="n", cap=args.cap)
        as_float = None
    else:
        n_value = args.dim or n_file or vec_dim
        if n_value is None:
            raise UsageError("empty vector list needs --dim or 'n'")
        value = average_product(vectors, n_value, cap=args.cap) if vectors else Fraction(1)
        as_float = float(value)
    if args.format == "json":
        payload = {"exact": _render_scalar(value, "text", symbol)}
        if as_float is not None:
            payload["float"] = as_float
        out.write(json.dumps(payload) + "\n")
    else:
        out.write(_render_scalar(value, args.format, symbol) + "\n")
        if as_float is not None:
            out.write(f"{as_float!r}\n")
    return 0


def _at_dim(result: ReductionResult, space: Space, m: int) -> ReductionResult:
    if space.dim_value is None:
        return result
    if m > space.dim_value:
        raise DimensionError(f"{m} external vectors cannot be independent in {space.dim_value} dimensions")
    # with no transverse directions left, every q_perp term is zero
    terms = tuple(
        ReductionTerm(t.tensor.at_dim(space.dim_value), t.integrand)
        for t in result.terms
        if m < space.dim_value or t.integrand.transverse_power == 0
    )
    return ReductionResult(terms, result.rank)


def cmd_reduce(args, out) -> int:
    k, m = args.rank, args.external
    if k < 0 or m < 0:
        raise UsageError("--rank and --external must be non-negative")
    check_rank(k + k % 2, args.cap)
    symbol = _symbol(args)
    if args.space == "minkowski":
        if m == 0:
            result = reduce_minkowski_isotropic(k, args.scalar or "f", symbol=symbol)
        elif m == 1:
            result = reduce_minkowski_one_vector(k, args.scalar or "f", symbol=symbol)
        else:
            raise UsageError("Minkowski reduction supports at most one external momentum")
    elif m == 0:
        result = reduce_isotropic(k, args.scalar or "f", space=Space(symbol=symbol))
    elif m == 1:
        result = reduce_one_vector(k, args.scalar or "g", symbol=symbol)
    else:
        result = reduce_multi_vector(k, m, args.scalar or "h", symbol=symbol)
    result = _at_dim(result, _space(args), m)
    out.write(result.render(args.format) + "\n")
    if result.is_empty():
        note = "note: the integral vanishes by isotropy\n"
        (sys.stderr if args.format == "json" else out).write(note)
    return 0


def cmd_verify(args, out) -> int:
    from .verification import report, run_suite

    text, ok = report(run_suite(args.suite, args.seed), args.tolerance_scale)
    out.write(text)
    return 0 if ok else EXIT_FAIL


COMMANDS = {"emit": cmd_emit, "avg": cmd_avg, "reduce": cmd_reduce, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    # buffer so that nothing reaches stdout when the command fails
    buf = io.StringIO()
    try:
        code = COMMANDS[args.command](args, buf)
    except SizeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIM
    except (UsageError, IsotensorError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(buf.getvalue())
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
