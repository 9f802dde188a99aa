"""Sparse exterior algebra of Q^dim.

A :class:`GradedElement` of degree k is a map from strictly increasing
index tuples (0-based internally, 1-based in JSON) to nonzero rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from bisect import bisect_left
from math import factorial, lcm
from typing import Iterable, Mapping, Sequence

from .core import NeutralSpace
from .linalg import Mat, as_rational, is_antisymmetric, same_span, span_contains


def _canonical(idx: Sequence[int]) -> tuple[int, tuple[int, ...]] | None:
    """Sort ``idx`` returning (sign, sorted tuple); None if an index repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return None
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


def _merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    # parity of the shuffle that sorts a + b, both already increasing
    inv = 0
    j = 0
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        inv += j
    return -1 if inv % 2 else 1


@dataclass(frozen=True)
class GradedElement:
    dim: int
    degree: int
    terms: Mapping[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[tuple[int, ...], Fraction] = {}
        for idx, c in self.terms.items():
            c = as_rational(c)
            if not c:
                continue
            idx = tuple(idx)
            if len(idx) != self.degree or any(b <= a for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index tuple {idx} is not strictly increasing of length {self.degree}")
            if idx and (idx[0] < 0 or idx[-1] >= self.dim):
                raise ValueError(f"index tuple {idx} out of range for dimension {self.dim}")
            clean[idx] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_terms(cls, dim: int, degree: int, items: Iterable[tuple[Sequence[int], object]]) -> "GradedElement":
        """Accumulate arbitrary-order index tuples, absorbing permutation signs."""
        acc: dict[tuple[int, ...], Fraction] = {}
        for idx, c in items:
            canon = _canonical(idx)
            if canon is None:
                continue
            s, key = canon
            acc[key] = acc.get(key, Fraction(0)) + s * as_rational(c)
        return cls(dim, degree, acc)

    @classmethod
    def zero(cls, dim: int, degree: int) -> "GradedElement":
        return cls(dim, degree, {})

    @classmethod
    def scalar(cls, dim: int, c=1) -> "GradedElement":
        return cls(dim, 0, {(): c})

    @classmethod
    def vector(cls, coords: Sequence) -> "GradedElement":
        return cls(len(coords), 1, {(i,): c for i, c in enumerate(coords)})

    @classmethod
    def basis(cls, dim: int, *idx: int) -> "GradedElement":
        """e_{i1} ^ ... ^ e_{ik} (0-based indices)."""
        return cls.from_terms(dim, len(idx), [(idx, 1)])

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "GradedElement"):
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise ValueError("dimension or degree mismatch")

    def __add__(self, other: "GradedElement") -> "GradedElement":
        self._check(other)
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc.get(k, Fraction(0)) + c
        return GradedElement(self.dim, self.degree, acc)

    def __neg__(self) -> "GradedElement":
        return GradedElement(self.dim, self.degree, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        return self + (-other)

    def scale(self, c) -> "GradedElement":
        c = as_rational(c)
        return GradedElement(self.dim, self.degree, {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c) -> "GradedElement":
        return self.scale(c)

    def __xor__(self, other: "GradedElement") -> "GradedElement":
        return wedge(self, other)

    def ratio_to(self, other: "GradedElement") -> Fraction | None:
        """The scalar c with self == c * other, if any (other nonzero)."""
        self._check(other)
        if other.is_zero():
            raise ValueError("reference element is zero")
        k0 = next(iter(other.terms))
        c = self.terms.get(k0, Fraction(0)) / other.terms[k0]
        return c if self == other.scale(c) else None

    def support(self) -> set[int]:
        return {i for k in self.terms for i in k}


def wedge(a: GradedElement, b: GradedElement) -> GradedElement:
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    if a.degree + b.degree > a.dim:
        raise ValueError("degree overflow")
    acc: dict[tuple[int, ...], Fraction] = {}
    for ka, ca in a.terms.items():
        sa = set(ka)
        for kb, cb in b.terms.items():
            if sa.intersection(kb):
                continue
            key = tuple(sorted(ka + kb))
            acc[key] = acc.get(key, Fraction(0)) + _merge_sign(ka, kb) * ca * cb
    return GradedElement(a.dim, a.degree + b.degree, acc)


def wedge_all(elements: Sequence[GradedElement]) -> GradedElement:
    out = GradedElement.scalar(elements[0].dim)
    for e in elements:
        out = wedge(out, e)
    return out


def wedge_columns(B: Mat) -> GradedElement:
    """b_1 ^ ... ^ b_r for the columns of B."""
    return wedge_all([GradedElement.vector(c) for c in B.columns()])


def power(theta: GradedElement, k: int) -> GradedElement:
    out = GradedElement.scalar(theta.dim)
    for _ in range(k):
        out = wedge(out, theta)
    return out


def theta_power_xi(theta: GradedElement, n: int) -> GradedElement:
    """((-1)^{n(n-1)/2} / n!) * theta^n."""
    if theta.degree != 2:
        raise ValueError("theta must have degree 2")
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return power(theta, n).scale(Fraction(sign, factorial(n)))


def induced_endo_action(A: Mat, x: GradedElement) -> GradedElement:
    """Action of the k-th exterior power of A."""
    if A.shape != (x.dim, x.dim):
        raise ValueError("matrix does not match the dimension")
    # clear denominators once and expand over the integers
    D = 1
    for row in A.rows:
        for a in row:
            D = lcm(D, a.denominator)
    cols = [[(i, int(a * D)) for i, a in enumerate(A.col(j)) if a] for j in range(x.dim)]
    cache: dict[tuple[int, ...], dict[tuple[int, ...], int]] = {(): {(): 1}}

    def image(idx: tuple[int, ...]) -> dict[tuple[int, ...], int]:
        if idx not in cache:
            prev, out = image(idx[:-1]), {}
            for key, c in prev.items():
                for i, a in cols[idx[-1]]:
                    if i in key:
                        continue
                    pos = bisect_left(key, i)
                    # moving e_i past the factors after it
                    sign = -1 if (len(key) - pos) % 2 else 1
                    k2 = key[:pos] + (i,) + key[pos:]
                    out[k2] = out.get(k2, 0) + sign * c * a
            cache[idx] = out
        return cache[idx]

    acc: dict[tuple[int, ...], Fraction] = {}
    scale = Fraction(1, D ** x.degree)
    for idx, c in x.terms.items():
        for k, v in image(idx).items():
            if v:
                acc[k] = acc.get(k, Fraction(0)) + c * v * scale
    return GradedElement(x.dim, x.degree, acc)


def derivation_action(X, x: GradedElement) -> GradedElement:
    """Leibniz extension of X: replace each factor v_j by X v_j in turn.

    ``X`` is a :class:`Mat` or any object supporting ``X[i, j]`` returning
    rationals.
    """
    dim = x.dim
    cols = []
    for j in range(dim):
        cols.append([(i, X[i, j]) for i in range(dim) if X[i, j]])
    acc: dict[tuple[int, ...], Fraction] = {}
    for idx, c in x.terms.items():
        for pos, j in enumerate(idx):
            rest = set(idx)
            for i, a in cols[j]:
                if i != j and i in rest:
                    continue
                new = idx[:pos] + (i,) + idx[pos + 1:]
                s, key = _canonical(new)
                acc[key] = acc.get(key, Fraction(0)) + s * a * c
    return GradedElement(dim, x.degree, acc)


# -- bivectors and matrices ---------------------------------------------------

def coefficient_matrix(theta: GradedElement) -> Mat:
    """Antisymmetric M with theta = sum_{a<b} M[a,b] e_a ^ e_b."""
    if theta.degree != 2:
        raise ValueError("expected a bivector")
    d = theta.dim
    M = [[Fraction(0)] * d for _ in range(d)]
    for (a, b), c in theta.terms.items():
        M[a][b] = c
        M[b][a] = -c
    return Mat(M)


def bivector_from_matrix(M: Mat) -> GradedElement:
    if not is_antisymmetric(M):
        raise ValueError("matrix is not antisymmetric")
    d = M.shape[0]
    return GradedElement(d, 2, {(a, b): M[a, b] for a in range(d) for b in range(a + 1, d) if M[a, b]})


def bivector_of(space: NeutralSpace, X: Mat) -> GradedElement:
    """The 2-vector (phi, psi) -> h*(phi, psi o X); coefficient matrix S X^T.

    Defined for X with S X antisymmetric (X skew for the metric).
    """
    return bivector_from_matrix(space.S @ X.T)


def endo_of_bivector(space: NeutralSpace, theta: GradedElement) -> Mat:
    """Inverse of :func:`bivector_of`: X = -M S for coefficient matrix M."""
    return -(coefficient_matrix(theta) @ space.S)


# -- subspaces ----------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    space: NeutralSpace
    basis: Mat

    def __post_init__(self):
        if self.basis.shape[0] != self.space.dim:
            raise ValueError("basis vectors have the wrong length")
        if self.basis.rank() != self.basis.shape[1]:
            raise ValueError("basis columns are not independent")

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def is_light_like(self) -> bool:
        return self.space.gram(self.basis).is_zero()

    def contains(self, vectors: Mat) -> bool:
        return span_contains(self.basis, vectors)

    def same_as(self, other: "Subspace") -> bool:
        return same_span(self.basis, other.basis)

    def top(self) -> GradedElement:
        return wedge_columns(self.basis)


def in_exterior_square(theta: GradedElement, L: Subspace) -> bool:
    """theta lies in the second exterior power of L."""
    M = coefficient_matrix(theta)
    # M = X C X^T  <=>  the column span of M is inside L
    return L.contains(M)


def restricted_form(theta: GradedElement, L: Subspace) -> Mat:
    """Skew 2n x 2n C with coefficient matrix X C X^T, X = L.basis."""
    if not in_exterior_square(theta, L):
        raise ValueError("theta is not in the exterior square of L")
    X = L.basis
    M = coefficient_matrix(theta)
    # left inverse of X
    P = (X.T @ X).inverse() @ X.T
    return P @ M @ P.T


def is_nondegenerate_on(theta: GradedElement, L: Subspace) -> bool:
    if theta.degree != 2:
        raise ValueError("theta must have degree 2")
    if not in_exterior_square(theta, L):
        raise ValueError("theta is not in the exterior square of L")
    if L.rank % 2:
        return False
    return not power(theta, L.rank // 2).is_zero()


def pfaffian(C: Mat) -> Fraction:
    """Pfaffian by expansion along the first row."""
    m = C.shape[0]
    if m % 2:
        return Fraction(0)
    if m == 2:
        return C[0, 1]
    total = Fraction(0)
    for j in range(1, m):
        if not C[0, j]:
            continue
        keep = [k for k in range(1, m) if k != j]
        sign = -1 if (j - 1) % 2 else 1
        total += sign * C[0, j] * pfaffian(C.submatrix(keep, keep))
    return total
