"""Reduction formulas written out by hand, used as golden values."""

from itertools import product

from isotensor.exact_arith import parse_rational_function
from isotensor.tensor_core import PERP, DeltaFactor, Space, SymTensorExpr, UnitVectorFactor


def golden_expr(labels, ids, terms):
    """Build an expression from ``(coefficient_text, [factor_spec, ...])``.

    A spec ``"x.i"`` is a vector factor, ``"i~j"`` a transverse delta.
    """
    space = Space.orthonormal(ids)
    raw = []
    for coef, specs in terms:
        factors = []
        for spec in specs:
            if "~" in spec:
                a, b = spec.split("~")
                factors.append(DeltaFactor(a, b, PERP))
            else:
                v, i = spec.split(".")
                factors.append(UnitVectorFactor(v, i))
        raw.append((parse_rational_function(coef), factors))
    return SymTensorExpr.build(labels, raw, space)


IJKL = ["i", "j", "k", "l"]

# one-vector E-tensors, written out term by term
E_TABLE = {
    (1, 1): [("1", ["a.i"])],
    (0, 2): [("1/(n-1)", ["i~j"])],
    (2, 2): [("1", ["a.i", "a.j"])],
    (1, 3): [("1/(n-1)", ["a.i", "j~k"]), ("1/(n-1)", ["a.j", "k~i"]), ("1/(n-1)", ["a.k", "i~j"])],
    (3, 3): [("1", ["a.i", "a.j", "a.k"])],
    (0, 4): [("1/((n-1)*(n+1))", ["i~j", "k~l"]), ("1/((n-1)*(n+1))", ["i~k", "j~l"]),
             ("1/((n-1)*(n+1))", ["i~l", "j~k"])],
    (2, 4): [("1/(n-1)", ["a.i", "a.j", "k~l"]), ("1/(n-1)", ["a.i", "a.k", "j~l"]),
             ("1/(n-1)", ["a.i", "a.l", "k~j"]), ("1/(n-1)", ["a.j", "a.k", "l~i"]),
             ("1/(n-1)", ["a.j", "a.l", "k~i"]), ("1/(n-1)", ["a.k", "a.l", "i~j"])],
    (4, 4): [("1", ["a.i", "a.j", "a.k", "a.l"])],
}


M2_LABELS = ["i", "j", "k", "l"]


def m2_golden(k):
    """The m = 2 reductions written out term by term, summed over raw axis tuples and grouped
    by the multiset of axes (the scalar h_{p1..pr} is symmetric)."""
    ids = ("e1", "e2")
    out = {}

    def add(axes, terms):
        expr = golden_expr(M2_LABELS[:k], ids, terms)
        key = tuple(sorted(axes))
        out[key] = out[key] + expr if key in out else expr

    if k == 1:
        for a in (1, 2):
            add((a,), [("1", [f"e{a}.i"])])
    if k == 2:
        for a, b in product((1, 2), repeat=2):
            add((a, b), [("1", [f"e{a}.i", f"e{b}.j"])])
        add((), [("1/(n-2)", ["i~j"])])
    if k == 3:
        for a, b, c in product((1, 2), repeat=3):
            add((a, b, c), [("1", [f"e{a}.i", f"e{b}.j", f"e{c}.k"])])
        for a in (1, 2):
            add((a,), [("1/(n-2)", [f"e{a}.i", "j~k"]), ("1/(n-2)", [f"e{a}.j", "k~i"]),
                       ("1/(n-2)", [f"e{a}.k", "i~j"])])
    if k == 4:
        for a, b, c, d in product((1, 2), repeat=4):
            add((a, b, c, d), [("1", [f"e{a}.i", f"e{b}.j", f"e{c}.k", f"e{d}.l"])])
        for a, b in product((1, 2), repeat=2):
            ea, eb = f"e{a}", f"e{b}"
            add((a, b), [
                ("1/(n-2)", [f"{ea}.i", f"{eb}.j", "k~l"]),
                ("1/(n-2)", [f"{ea}.i", f"{eb}.k", "j~l"]),
                ("1/(n-2)", [f"{ea}.i", f"{eb}.l", "j~k"]),
                ("1/(n-2)", [f"{ea}.k", f"{eb}.l", "i~j"]),
                ("1/(n-2)", [f"{ea}.j", f"{eb}.l", "i~k"]),
                ("1/(n-2)", [f"{ea}.j", f"{eb}.k", "i~l"]),
            ])
        add((), [("1/((n-2)*n)", ["i~j", "k~l"]), ("1/((n-2)*n)", ["i~k", "j~l"]),
                 ("1/((n-2)*n)", ["i~l", "j~k"])])
    return out
