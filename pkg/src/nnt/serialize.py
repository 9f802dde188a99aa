"""JSON encodings.

Rationals are ``"p/q"`` strings (``"p"`` when q = 1); multivector and form
indices are 1-based on the wire and 0-based in memory.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .connection import ConnectionGauge
from .core import Frame, NeutralSpace
from .exterior import GradedElement, Subspace
from .forms import ExpPoly, KForm
from .linalg import Mat, as_rational, format_rational
from .structures import NilpotentStructure


class SchemaError(ValueError):
    """Malformed JSON input."""


def _need(obj: Any, key: str, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"missing field {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise SchemaError(f"field {key!r} has the wrong type")
    return val


def rational_from_json(x) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise SchemaError(f"rationals are encoded as 'p/q' strings or integers, got {x!r}")
    try:
        return as_rational(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad rational {x!r}") from exc


# -- matrices --------------------------------------------------------------------

def mat_to_json(A: Mat) -> dict:
    r, c = A.shape
    return {"rows": r, "cols": c, "entries": [[format_rational(x) for x in row] for row in A.rows]}


def mat_from_json(obj) -> Mat:
    r, c = _need(obj, "rows", int), _need(obj, "cols", int)
    entries = _need(obj, "entries", list)
    if len(entries) != r or any(not isinstance(row, list) or len(row) != c for row in entries):
        raise SchemaError("matrix entries do not match rows/cols")
    if r < 1 or c < 1:
        raise SchemaError("matrices need at least one row and column")
    return Mat([[rational_from_json(x) for x in row] for row in entries])


# -- multivectors ------------------------------------------------------------------

def graded_to_json(x: GradedElement) -> dict:
    return {
        "degree": x.degree,
        "terms": [{"idx": [i + 1 for i in k], "coeff": format_rational(c)} for k, c in sorted(x.terms.items())],
    }


def graded_from_json(obj, dim: int) -> GradedElement:
    degree = _need(obj, "degree", int)
    items = []
    for t in _need(obj, "terms", list):
        idx = _need(t, "idx", list)
        if any(not isinstance(i, int) or not 1 <= i <= dim for i in idx) or len(idx) != degree:
            raise SchemaError(f"bad index tuple {idx!r}")
        items.append(([i - 1 for i in idx], rational_from_json(_need(t, "coeff"))))
    try:
        return GradedElement.from_terms(dim, degree, items)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def subspace_from_json(obj, space: NeutralSpace) -> Subspace:
    try:
        return Subspace(space, mat_from_json(obj))
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


# -- exp-polys and forms --------------------------------------------------------------

def exppoly_to_json(f: ExpPoly) -> dict:
    return {
        "m": f.m,
        "terms": [
            {"mono": list(mono), "exp": [format_rational(x) for x in lam], "coeff": format_rational(c)}
            for (mono, lam), c in sorted(f.terms.items())
        ],
    }


def exppoly_from_json(obj) -> ExpPoly:
    m = _need(obj, "m", int)
    terms = {}
    for t in _need(obj, "terms", list):
        mono = _need(t, "mono", list)
        lam = t.get("exp", ["0"] * m)
        if len(mono) != m or len(lam) != m or any(not isinstance(a, int) or a < 0 for a in mono):
            raise SchemaError("malformed exp-poly term")
        key = (tuple(mono), tuple(rational_from_json(x) for x in lam))
        terms[key] = terms.get(key, Fraction(0)) + rational_from_json(_need(t, "coeff"))
    return ExpPoly(m, terms)


def kform_to_json(w: KForm) -> dict:
    return {
        "degree": w.degree,
        "coeffs": [{"idx": [i + 1 for i in k], "poly": exppoly_to_json(f)} for k, f in sorted(w.coeffs.items())],
    }


def kform_from_json(obj, m: int) -> KForm:
    degree = _need(obj, "degree", int)
    acc: dict[tuple[int, ...], ExpPoly] = {}
    for t in _need(obj, "coeffs", list):
        idx = _need(t, "idx", list)
        if len(idx) != degree or any(not isinstance(i, int) or not 1 <= i <= m for i in idx):
            raise SchemaError(f"bad form index {idx!r}")
        f = exppoly_from_json(_need(t, "poly"))
        if f.m != m:
            raise SchemaError("coefficient dimension mismatch")
        zero_based = [i - 1 for i in idx]
        key = tuple(sorted(zero_based))
        if len(set(key)) != len(key):
            continue
        # odd permutations flip the sign
        inv = sum(1 for a in range(len(zero_based)) for b in range(a + 1, len(zero_based)) if zero_based[a] > zero_based[b])
        f = -f if inv % 2 else f
        acc[key] = acc[key] + f if key in acc else f
    return KForm(m, degree, acc)


def connection_to_json(cg: ConnectionGauge) -> dict:
    return {
        "n": cg.n,
        "eps": cg.eps,
        "m": cg.m,
        "omega": [[kform_to_json(w) for w in row] for row in cg.omega],
    }


def connection_from_json(obj, metric: bool = True) -> ConnectionGauge:
    n, m = _need(obj, "n", int), _need(obj, "m", int)
    eps = _need(obj, "eps", str)
    grid = _need(obj, "omega", list)
    dim = 4 * n
    if n < 1 or m < 1 or len(grid) != dim or any(not isinstance(r, list) or len(r) != dim for r in grid):
        raise SchemaError(f"omega must be a {dim}x{dim} grid of 1-forms")
    omega = tuple(tuple(kform_from_json(w, m) for w in row) for row in grid)
    try:
        return ConnectionGauge(NeutralSpace(n), eps, m, omega, metric)
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


# -- nilpotent structures ----------------------------------------------------------------

def structure_to_json(ns: NilpotentStructure) -> dict:
    return {"n": ns.space.n, "eps": ns.eps, "N": mat_to_json(ns.N), "frame": mat_to_json(ns.frame.E)}


def structure_from_json(obj) -> NilpotentStructure:
    n = _need(obj, "n", int)
    space = NeutralSpace(n)
    try:
        return NilpotentStructure(space, mat_from_json(_need(obj, "N")), _need(obj, "eps", str),
                                  Frame(space, mat_from_json(_need(obj, "frame"))))
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def form_matrix_to_json(W) -> list:
    return [[kform_to_json(w) for w in row] for row in W]
