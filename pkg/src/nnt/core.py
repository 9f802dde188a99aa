"""Neutral spaces, model matrices and subgroup membership.

The fiber is Q^{4n} with the split metric ``<u, v> = u^T S v`` where
``S = diag(I_2n, -I_2n)``.  Model endomorphisms are expressed in the
reference pseudo-orthonormal basis.  Group elements are produced by the
Cayley transform of Lie-algebra elements, which keeps everything rational.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal

from .linalg import Mat, commutator, is_antisymmetric, is_symmetric, span_contains

Sign = Literal["+", "-"]
GROUPS = ("so", "g", "h", "sow")
ALGEBRAS = ("so", "g", "h", "sow")


def sign_value(eps: str) -> int:
    if eps in ("+", "+1", 1):
        return 1
    if eps in ("-", "-1", -1):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {eps!r}")


def sign_str(value: int) -> Sign:
    return "+" if value > 0 else "-"


@dataclass(frozen=True)
class NeutralSpace:
    """Q^{4n} with the neutral metric of signature (2n, 2n)."""

    n: int
    S: Mat = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("n must be a positive integer")
        object.__setattr__(self, "S", signature_matrix(self.n))

    @property
    def dim(self) -> int:
        return 4 * self.n

    def h(self, u, v) -> Fraction:
        """Metric pairing of two coordinate vectors."""
        s = self.S
        return sum((u[i] * s[i, i] * v[i] for i in range(self.dim)), Fraction(0))

    def gram(self, B: Mat) -> Mat:
        return B.T @ self.S @ B

    def check(self, A: Mat):
        if A.shape != (self.dim, self.dim):
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix, got {A.shape[0]}x{A.shape[1]}")


@dataclass(frozen=True)
class Frame:
    """A frame of the fiber; columns of ``E`` are e_1..e_4n in reference coordinates."""

    space: NeutralSpace
    E: Mat

    def __post_init__(self):
        self.space.check(self.E)

    def is_pseudo_orthonormal(self) -> bool:
        return self.space.gram(self.E) == self.space.S

    def is_oriented(self) -> bool:
        return self.E.det() == 1

    def twisted(self, eps: str) -> Mat:
        """The basis ``E I'_{4n,eps}``."""
        return self.E @ i_prime(self.space.n, eps)


# -- model matrices ---------------------------------------------------------

def _blocks4(n: int, pattern) -> Mat:
    """Build a 4n x 4n matrix from a 4x4 grid of scalars times I_n."""
    I = Mat.identity(n)
    return Mat.from_blocks([[I.scale(c) for c in row] for row in pattern])


@lru_cache(maxsize=None)
def signature_matrix(n: int) -> Mat:
    return Mat.diag([1] * (2 * n) + [-1] * (2 * n))


@lru_cache(maxsize=None)
def lambda_n(n: int) -> Mat:
    """The model nilpotent structure; squares to zero and has rank 2n."""
    _check_n(n)
    return _blocks4(n, [[0, -1, 0, 1], [1, 0, 1, 0], [0, 1, 0, -1], [1, 0, 1, 0]])


@lru_cache(maxsize=None)
def lambda_pm(n: int, sign: str) -> Mat:
    """Model complex (``+``) or paracomplex (``-``) structure."""
    _check_n(n)
    if sign_value(sign) > 0:
        return _blocks4(n, [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
    return _blocks4(n, [[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]])


@lru_cache(maxsize=None)
def kappa_n(n: int) -> Mat:
    """Second paracomplex model, the J_2 part of lambda_n split against its dual."""
    _check_n(n)
    return _blocks4(n, [[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]])


@lru_cache(maxsize=None)
def i_prime(n: int, eps: str) -> Mat:
    """Identity except entry (3n+1, 3n+1) (1-based), which is eps."""
    _check_n(n)
    d = [1] * (4 * n)
    d[3 * n] = sign_value(eps)
    return Mat.diag(d)


@lru_cache(maxsize=None)
def i_2n2n(n: int) -> Mat:
    """diag(I_2n, -I_2n); conjugation by it passes to the dual frame."""
    return signature_matrix(n)


def _check_n(n: int):
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")


# -- blocks -----------------------------------------------------------------

def blocks(X: Mat, n: int) -> list[list[Mat]]:
    """The 4x4 grid of n x n blocks; ``blocks(X, n)[k][l]`` is D_{k+1,l+1}."""
    if X.shape != (4 * n, 4 * n):
        raise ValueError(f"expected a {4 * n}x{4 * n} matrix")
    return [[X.submatrix(range(k * n, (k + 1) * n), range(l * n, (l + 1) * n)) for l in range(4)] for k in range(4)]


def reassemble(grid: list[list[Mat]]) -> Mat:
    return Mat.from_blocks(grid)


# -- membership -------------------------------------------------------------

def in_SO(A: Mat, space: NeutralSpace) -> bool:
    space.check(A)
    return A.T @ space.S @ A == space.S and A.det() == 1


def in_G(A: Mat, space: NeutralSpace) -> bool:
    L = lambda_n(space.n)
    return in_SO(A, space) and A @ L == L @ A


def h_pattern_holds(A: Mat, n: int) -> bool:
    """Block pattern shared by the group H and its Lie algebra."""
    D = blocks(A, n)
    a11, a21, a31, a41 = D[0][0], D[1][0], D[2][0], D[3][0]
    expected = [
        [a11, -a21, a31, a41],
        [a21, a11, -a41, a31],
        [a31, -a41, a11, a21],
        [a41, a31, -a21, a11],
    ]
    return all(D[k][l] == expected[k][l] for k in range(4) for l in range(4))


def in_H(A: Mat, space: NeutralSpace) -> bool:
    return in_SO(A, space) and h_pattern_holds(A, space.n)


@lru_cache(maxsize=None)
def w_basis(n: int) -> Mat:
    """Basis eta_1..eta_2n of the model light-like plane W = Im lambda_n."""
    L = lambda_n(n)
    eta = [tuple(-x for x in L.col(n + i)) for i in range(n)] + [L.col(i) for i in range(n)]
    return Mat.from_columns(eta)


def in_SO_W(A: Mat, space: NeutralSpace) -> bool:
    if not in_SO(A, space):
        return False
    W = w_basis(space.n)
    return span_contains(W, A @ W)


def in_group(A: Mat, space: NeutralSpace, which: str) -> bool:
    try:
        pred = {"so": in_SO, "g": in_G, "h": in_H, "sow": in_SO_W}[which]
    except KeyError:
        raise ValueError(f"unknown group {which!r}") from None
    return pred(A, space)


def in_lie(X: Mat, space: NeutralSpace, which: str) -> bool:
    """Lie algebra membership for ``so``, ``g``, ``h`` (and ``sow``)."""
    space.check(X)
    S = space.S
    if which == "so":
        return X.T @ S + S @ X == Mat.zeros(space.dim)
    if which == "g":
        L = lambda_n(space.n)
        return in_lie(X, space, "so") and X @ L == L @ X
    if which == "h":
        if not h_pattern_holds(X, space.n):
            return False
        D = blocks(X, space.n)
        return is_antisymmetric(D[0][0]) and all(is_symmetric(D[k][0]) for k in (1, 2, 3))
    if which == "sow":
        W = w_basis(space.n)
        return in_lie(X, space, "so") and span_contains(W, X @ W)
    raise ValueError(f"unknown Lie algebra {which!r}")


def so_block_relations_hold(X: Mat, n: int) -> bool:
    """The so(2n,2n) condition written as block relations."""
    D = blocks(X, n)
    return (
        all(D[i][i].T == -D[i][i] for i in range(4))
        and D[1][0].T == -D[0][1]
        and D[3][2].T == -D[2][3]
        and D[2][0].T == D[0][2]
        and D[3][0].T == D[0][3]
        and D[2][1].T == D[1][2]
        and D[3][1].T == D[1][3]
    )


def cayley(X: Mat) -> Mat:
    """``(I + X)(I - X)^{-1}``; raises ZeroDivisionError when I - X is singular."""
    I = Mat.identity(X.shape[0])
    return (I + X) @ (I - X).inverse()


# -- Lie algebra bases and samplers ------------------------------------------

def _skew_coordinates(dim: int):
    return [(i, j) for i in range(dim) for j in range(i + 1, dim)]


def _so_element(space: NeutralSpace, coeffs) -> Mat:
    # so(2n,2n) = { S K : K antisymmetric }
    dim = space.dim
    K = [[Fraction(0)] * dim for _ in range(dim)]
    for (i, j), c in zip(_skew_coordinates(dim), coeffs):
        K[i][j] = c
        K[j][i] = -c
    return space.S @ Mat(K)


@lru_cache(maxsize=None)
def lie_basis(n: int, which: str) -> tuple[Mat, ...]:
    """Exact basis of so, g, h or sow as subalgebras of so(2n,2n)."""
    space = NeutralSpace(n)
    dim = space.dim
    coords = _skew_coordinates(dim)
    so = []
    for k in range(len(coords)):
        c = [0] * len(coords)
        c[k] = 1
        so.append(_so_element(space, c))
    if which == "so":
        return tuple(so)
    if which == "h":
        return tuple(_h_basis(n))
    if which == "g":
        L = lambda_n(n)
        constraint = lambda X: commutator(X, L)
    elif which == "sow":
        W = w_basis(n)
        # X W in W  <=>  W^T S X W = 0, since W is its own orthogonal
        constraint = lambda X: W.T @ space.S @ X @ W
    else:
        raise ValueError(f"unknown Lie algebra {which!r}")
    images = [constraint(X) for X in so]
    rows = []
    r, c = images[0].shape
    for i in range(r):
        for j in range(c):
            rows.append([M[i, j] for M in images])
    null = Mat(rows).nullspace()
    if null is None:
        return ()
    out = []
    for col in null.columns():
        out.append(_so_element(space, col))
    return tuple(out)


def _h_basis(n: int) -> list[Mat]:
    z = Mat.zeros(n)

    def assemble(d11, d21, d31, d41):
        return Mat.from_blocks([
            [d11, -d21, d31, d41],
            [d21, d11, -d41, d31],
            [d31, -d41, d11, d21],
            [d41, d31, -d21, d11],
        ])

    def unit(i, j, sym):
        e = [[0] * n for _ in range(n)]
        e[i][j] = 1
        e[j][i] = 1 if sym else -1
        return Mat(e)

    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            basis.append(assemble(unit(i, j, False), z, z, z))
    for slot in range(3):
        for i in range(n):
            for j in range(i, n):
                parts = [z, z, z]
                parts[slot] = unit(i, j, True)
                basis.append(assemble(z, *parts))
    return basis


def random_rational(rng: random.Random, size: int = 3, den: int = 3) -> Fraction:
    return Fraction(rng.randint(-size, size), rng.randint(1, den))


def random_lie(space: NeutralSpace, which: str, rng: random.Random, size: int = 3, den: int = 3) -> Mat:
    """Random element of the chosen Lie algebra with small rational coordinates."""
    basis = lie_basis(space.n, which)
    out = Mat.zeros(space.dim)
    for b in basis:
        c = random_rational(rng, size, den)
        if c:
            out = out + b.scale(c)
    return out


def random_group_element(space: NeutralSpace, which: str, rng: random.Random, size: int = 2, den: int = 3) -> Mat:
    """Cayley transform of a random Lie algebra element, resampling on singularity."""
    while True:
        X = random_lie(space, which, rng, size, den)
        try:
            return cayley(X)
        except ZeroDivisionError:
            continue


def random_rational_matrix(rows: int, cols: int, rng: random.Random, size: int = 3, den: int = 3) -> Mat:
    return Mat([[random_rational(rng, size, den) for _ in range(cols)] for _ in range(rows)])
