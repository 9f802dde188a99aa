"""Exact differential forms on Q^m with exp-polynomial coefficients.

An :class:`ExpPoly` is a finite sum ``c * x^alpha * exp(lam . x)`` with
rational ``c`` and ``lam``; the ring is closed under products and partial
derivatives, so d and the wedge product never leave it.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exterior import _canonical, _merge_sign
from .linalg import as_rational, format_rational

Key = tuple[tuple[int, ...], tuple[Fraction, ...]]


@dataclass(frozen=True)
class ExpPoly:
    m: int
    terms: Mapping[Key, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (mono, lam), c in self.terms.items():
            c = as_rational(c)
            if not c:
                continue
            mono = tuple(int(a) for a in mono)
            lam = tuple(as_rational(x) for x in lam)
            if len(mono) != self.m or len(lam) != self.m or any(a < 0 for a in mono):
                raise ValueError("malformed exp-poly term")
            clean[(mono, lam)] = c
        object.__setattr__(self, "terms", clean)

    # constructors -------------------------------------------------------
    @classmethod
    def const(cls, m: int, c=1) -> "ExpPoly":
        z = (0,) * m
        return cls(m, {(z, (Fraction(0),) * m): c})

    @classmethod
    def zero(cls, m: int) -> "ExpPoly":
        return cls(m, {})

    @classmethod
    def var(cls, m: int, i: int) -> "ExpPoly":
        """The coordinate x_{i+1} (0-based ``i``)."""
        if not 0 <= i < m:
            raise ValueError(f"no coordinate x{i + 1} in dimension {m}")
        mono = tuple(1 if k == i else 0 for k in range(m))
        return cls(m, {(mono, (Fraction(0),) * m): 1})

    @classmethod
    def exp_linear(cls, m: int, lam: Sequence) -> "ExpPoly":
        return cls(m, {((0,) * m, tuple(as_rational(x) for x in lam)): 1})

    # ring -----------------------------------------------------------------
    def _coerce(self, other) -> "ExpPoly":
        if isinstance(other, ExpPoly):
            if other.m != self.m:
                raise ValueError("dimension mismatch")
            return other
        return ExpPoly.const(self.m, as_rational(other))

    def __add__(self, other) -> "ExpPoly":
        other = self._coerce(other)
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc.get(k, Fraction(0)) + c
        return ExpPoly(self.m, acc)

    __radd__ = __add__

    def __neg__(self) -> "ExpPoly":
        return ExpPoly(self.m, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "ExpPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "ExpPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            c = as_rational(other)
            return ExpPoly(self.m, {k: c * v for k, v in self.terms.items()})
        other = self._coerce(other)
        acc: dict[Key, Fraction] = {}
        for (ma, la), ca in self.terms.items():
            for (mb, lb), cb in other.terms.items():
                key = (tuple(x + y for x, y in zip(ma, mb)), tuple(x + y for x, y in zip(la, lb)))
                acc[key] = acc.get(key, Fraction(0)) + ca * cb
        return ExpPoly(self.m, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ExpPoly":
        out = ExpPoly.const(self.m)
        for _ in range(k):
            out = out * self
        return out

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def diff(self, i: int) -> "ExpPoly":
        """Partial derivative along x_{i+1}."""
        acc: dict[Key, Fraction] = {}
        for (mono, lam), c in self.terms.items():
            if mono[i]:
                lower = mono[:i] + (mono[i] - 1,) + mono[i + 1:]
                acc[(lower, lam)] = acc.get((lower, lam), Fraction(0)) + c * mono[i]
            if lam[i]:
                acc[(mono, lam)] = acc.get((mono, lam), Fraction(0)) + c * lam[i]
        return ExpPoly(self.m, acc)

    # inspection -------------------------------------------------------------
    def is_polynomial(self) -> bool:
        return all(not any(lam) for _, lam in self.terms)

    def linear_part(self) -> tuple[Fraction, ...] | None:
        """Coefficients of a homogeneous linear polynomial, else None."""
        out = [Fraction(0)] * self.m
        for (mono, lam), c in self.terms.items():
            if any(lam) or sum(mono) != 1:
                return None
            out[mono.index(1)] = c
        return tuple(out)

    def exp(self) -> "ExpPoly":
        """exp(self) for a homogeneous linear self; other exponents leave the ring."""
        lam = self.linear_part()
        if lam is None:
            raise ValueError("exp is only available for homogeneous linear arguments")
        return ExpPoly.exp_linear(self.m, lam)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (mono, lam), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            factors = []
            for i, a in enumerate(mono):
                if a == 1:
                    factors.append(f"x{i + 1}")
                elif a:
                    factors.append(f"x{i + 1}**{a}")
            if any(lam):
                lin = " + ".join(f"{format_rational(l)}*x{i + 1}" for i, l in enumerate(lam) if l)
                factors.append(f"exp({lin})")
            body = "*".join(factors)
            if not body:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{format_rational(c)}*{body}")
        return " + ".join(parts).replace("+ -", "- ")


# -- parsing ------------------------------------------------------------------

def parse_exppoly(text: str | int | Fraction | ExpPoly, m: int) -> ExpPoly:
    """Parse expressions like ``"x1*x2 - 3/2*exp(x1 - 2*x2)"``.

    Supports + - * /(by rationals) **(nonnegative integers), ``x1..xm`` and
    ``exp`` of homogeneous linear arguments.
    """
    if isinstance(text, ExpPoly):
        if text.m != m:
            raise ValueError("dimension mismatch")
        return text
    if isinstance(text, (int, Fraction)):
        return ExpPoly.const(m, text)
    try:
        tree = ast.parse(str(text).replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}") from exc
    return _eval(tree.body, m, text)


def _eval(node, m: int, src) -> ExpPoly:
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return ExpPoly.const(m, node.value)
    if isinstance(node, ast.Name):
        name = node.id
        if name.startswith("x") and name[1:].isdigit():
            return ExpPoly.var(m, int(name[1:]) - 1)
        raise ValueError(f"unknown symbol {name!r} in {src!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, m, src)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        left = _eval(node.left, m, src)
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int) and node.right.value >= 0):
                raise ValueError(f"exponent must be a nonnegative integer in {src!r}")
            return left ** node.right.value
        right = _eval(node.right, m, src)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if not right.is_polynomial() or any(sum(k[0]) for k in right.terms) or right.is_zero():
                raise ValueError(f"can only divide by nonzero rationals in {src!r}")
            return left * (1 / next(iter(right.terms.values())))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "exp" and len(node.args) == 1:
        return _eval(node.args[0], m, src).exp()
    raise ValueError(f"unsupported expression in {src!r}")


# -- k-forms --------------------------------------------------------------------

@dataclass(frozen=True)
class KForm:
    """sum_I f_I dx_I over strictly increasing 0-based index tuples I."""

    m: int
    degree: int
    coeffs: Mapping[tuple[int, ...], ExpPoly] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for idx, f in self.coeffs.items():
            idx = tuple(idx)
            if len(idx) != self.degree or any(b <= a for a, b in zip(idx, idx[1:])):
                raise ValueError(f"bad form index {idx}")
            if idx and (idx[0] < 0 or idx[-1] >= self.m):
                raise ValueError(f"form index {idx} out of range")
            if f.m != self.m:
                raise ValueError("coefficient dimension mismatch")
            if not f.is_zero():
                clean[idx] = f
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def zero(cls, m: int, degree: int) -> "KForm":
        return cls(m, degree, {})

    @classmethod
    def function(cls, f: ExpPoly) -> "KForm":
        return cls(f.m, 0, {(): f})

    @classmethod
    def dx(cls, m: int, i: int) -> "KForm":
        return cls(m, 1, {(i,): ExpPoly.const(m)})

    @classmethod
    def one_form(cls, components: Sequence[ExpPoly]) -> "KForm":
        m = len(components)
        return cls(m, 1, {(i,): f for i, f in enumerate(components)})

    def component(self, idx: tuple[int, ...]) -> ExpPoly:
        return self.coeffs.get(tuple(idx), ExpPoly.zero(self.m))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def _check(self, other: "KForm"):
        if (self.m, self.degree) != (other.m, other.degree):
            raise ValueError("form dimension or degree mismatch")

    def __add__(self, other: "KForm") -> "KForm":
        self._check(other)
        acc = dict(self.coeffs)
        for k, f in other.coeffs.items():
            acc[k] = acc[k] + f if k in acc else f
        return KForm(self.m, self.degree, acc)

    def __neg__(self) -> "KForm":
        return KForm(self.m, self.degree, {k: -f for k, f in self.coeffs.items()})

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def scale(self, f) -> "KForm":
        """Multiply by a function or rational."""
        return KForm(self.m, self.degree, {k: g * f for k, g in self.coeffs.items()})

    def __mul__(self, f) -> "KForm":
        return self.scale(f)

    __rmul__ = __mul__

    def __xor__(self, other: "KForm") -> "KForm":
        return wedge_forms(self, other)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for idx, f in sorted(self.coeffs.items()):
            basis = "^".join(f"dx{i + 1}" for i in idx)
            parts.append(f"({f})" + (f" {basis}" if basis else ""))
        return " + ".join(parts)


def d(x: ExpPoly | KForm) -> KForm:
    """Exterior derivative."""
    if isinstance(x, ExpPoly):
        x = KForm.function(x)
    acc: dict[tuple[int, ...], ExpPoly] = {}
    for idx, f in x.coeffs.items():
        for v in range(x.m):
            if v in idx:
                continue
            g = f.diff(v)
            if g.is_zero():
                continue
            s, key = _canonical((v,) + idx)
            g = g if s > 0 else -g
            acc[key] = acc[key] + g if key in acc else g
    return KForm(x.m, x.degree + 1, acc)


def wedge_forms(a: KForm, b: KForm) -> KForm:
    if a.m != b.m:
        raise ValueError("dimension mismatch")
    if a.degree + b.degree > a.m:
        # every product vanishes; keep the degree bookkeeping honest
        raise ValueError("degree overflow")
    acc: dict[tuple[int, ...], ExpPoly] = {}
    for ka, fa in a.coeffs.items():
        for kb, fb in b.coeffs.items():
            if set(ka).intersection(kb):
                continue
            key = tuple(sorted(ka + kb))
            g = fa * fb
            if _merge_sign(ka, kb) < 0:
                g = -g
            acc[key] = acc[key] + g if key in acc else g
    return KForm(a.m, a.degree + b.degree, acc)


# -- matrices of forms ----------------------------------------------------------

FormMatrix = tuple[tuple[KForm, ...], ...]


def form_matrix_zero(size: int, m: int, degree: int) -> FormMatrix:
    z = KForm.zero(m, degree)
    return tuple((z,) * size for _ in range(size))


def matrix_d(W: FormMatrix) -> FormMatrix:
    return tuple(tuple(d(w) for w in row) for row in W)


def matrix_wedge(A: FormMatrix, B: FormMatrix) -> FormMatrix:
    """(A ^ B)_{ij} = sum_k A_ik ^ B_kj."""
    size = len(A)
    m = A[0][0].m
    degree = A[0][0].degree + B[0][0].degree
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            acc = KForm.zero(m, degree)
            for k in range(size):
                if A[i][k] and B[k][j]:
                    acc = acc + wedge_forms(A[i][k], B[k][j])
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def matrix_add(A: FormMatrix, B: FormMatrix) -> FormMatrix:
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def matrix_is_zero(A: FormMatrix) -> bool:
    return all(w.is_zero() for row in A for w in row)


def const_times(C, W: FormMatrix) -> FormMatrix:
    """Rational matrix C times form matrix W."""
    size = len(W)
    m, deg = W[0][0].m, W[0][0].degree
    return tuple(
        tuple(
            _lincomb([(C[i, k], W[k][j]) for k in range(size) if C[i, k]], m, deg)
            for j in range(size)
        )
        for i in range(size)
    )


def times_const(W: FormMatrix, C) -> FormMatrix:
    size = len(W)
    m, deg = W[0][0].m, W[0][0].degree
    return tuple(
        tuple(
            _lincomb([(C[k, j], W[i][k]) for k in range(size) if C[k, j]], m, deg)
            for j in range(size)
        )
        for i in range(size)
    )


def _lincomb(items, m: int, degree: int) -> KForm:
    acc = KForm.zero(m, degree)
    for c, w in items:
        if w:
            acc = acc + w.scale(c)
    return acc
