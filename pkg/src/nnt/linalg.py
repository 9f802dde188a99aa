"""Dense exact-rational matrices.

Entries are :class:`fractions.Fraction`; every operation is exact, so
equality is a decidable entrywise comparison and there is no tolerance
anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Q = Fraction


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass 'p/q' strings or Fractions")
    return Fraction(x)


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Mat:
    """Immutable dense matrix over Q.

    Indexing is 0-based: ``A[i, j]`` is row ``i`` column ``j``.
    """

    __slots__ = ("_rows", "shape", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(as_rational(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise ValueError("matrices must have at least one row and one column")
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise ValueError("ragged rows")
        self._rows = data
        self.shape = (len(data), width)
        self._hash = None

    @classmethod
    def _wrap(cls, rows: tuple) -> "Mat":
        # trusted constructor: rows already tuples of Fractions
        m = object.__new__(cls)
        m._rows = rows
        m.shape = (len(rows), len(rows[0]))
        m._hash = None
        return m

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, r: int, c: int | None = None) -> "Mat":
        c = r if c is None else c
        z = Fraction(0)
        return cls._wrap(tuple((z,) * c for _ in range(r)))

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls.diag([1] * n)

    @classmethod
    def diag(cls, values: Sequence) -> "Mat":
        vals = [as_rational(v) for v in values]
        z = Fraction(0)
        return cls._wrap(tuple(tuple(vals[i] if i == j else z for j in range(len(vals))) for i in range(len(vals))))

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "Mat":
        cols = [[as_rational(x) for x in c] for c in cols]
        return cls._wrap(tuple(tuple(c[i] for c in cols) for i in range(len(cols[0]))))

    @classmethod
    def from_blocks(cls, grid: Sequence[Sequence["Mat"]]) -> "Mat":
        rows = []
        for brow in grid:
            for i in range(brow[0].shape[0]):
                rows.append(tuple(x for b in brow for x in b._rows[i]))
        return cls._wrap(tuple(rows))

    @classmethod
    def hstack(cls, mats: Sequence["Mat"]) -> "Mat":
        return cls.from_blocks([list(mats)])

    # access -------------------------------------------------------------
    @property
    def rows(self) -> tuple:
        return self._rows

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.shape[1])]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat._wrap(tuple(tuple(self._rows[i][j] for j in cols) for i in rows))

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._rows]

    # algebra ------------------------------------------------------------
    @property
    def T(self) -> "Mat":
        return Mat._wrap(tuple(zip(*self._rows)))

    def _check_same(self, other: "Mat"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same(other)
        return Mat._wrap(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)))

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_same(other)
        return Mat._wrap(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)))

    def __neg__(self) -> "Mat":
        return Mat._wrap(tuple(tuple(-a for a in r) for r in self._rows))

    def scale(self, c) -> "Mat":
        c = as_rational(c)
        return Mat._wrap(tuple(tuple(c * a for a in r) for r in self._rows))

    def __mul__(self, c) -> "Mat":
        if isinstance(c, Mat):
            return self @ c
        return self.scale(c)

    def __rmul__(self, c) -> "Mat":
        return self.scale(c)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        # row-by-row accumulation skips zeros on both sides
        sparse = [[(j, b) for j, b in enumerate(row) if b] for row in other._rows]
        width = other.shape[1]
        out = []
        for r in self._rows:
            acc = [0] * width
            for k, a in enumerate(r):
                if a:
                    for j, b in sparse[k]:
                        acc[j] += a * b
            out.append(tuple(Fraction(x) for x in acc))
        return Mat._wrap(tuple(out))

    def apply(self, v: Sequence) -> tuple:
        """Matrix-vector product ``A v``."""
        return tuple(sum((a * b for a, b in zip(r, v) if a), Fraction(0)) for r in self._rows)

    def __pow__(self, k: int) -> "Mat":
        out = Mat.identity(self.shape[0])
        for _ in range(k):
            out = out @ self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Mat) and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._rows)
        return self._hash

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._rows)

    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(x) for x in r) for r in self._rows)
        return f"Mat([{body}])"

    # elimination --------------------------------------------------------
    def rref(self) -> tuple["Mat", list[int]]:
        """Reduced row echelon form and pivot columns."""
        a = [list(r) for r in self._rows]
        m, n = self.shape
        pivots: list[int] = []
        row = 0
        for c in range(n):
            p = next((i for i in range(row, m) if a[i][c]), None)
            if p is None:
                continue
            a[row], a[p] = a[p], a[row]
            inv = 1 / a[row][c]
            a[row] = [x * inv for x in a[row]]
            for i in range(m):
                if i != row and a[i][c]:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[row])]
            pivots.append(c)
            row += 1
            if row == m:
                break
        return Mat._wrap(tuple(tuple(r) for r in a)), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def det(self) -> Fraction:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        a = [list(r) for r in self._rows]
        n = len(a)
        d = Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c]), None)
            if p is None:
                return Fraction(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                d = -d
            d *= a[c][c]
            inv = 1 / a[c][c]
            for i in range(c + 1, n):
                if a[i][c]:
                    f = a[i][c] * inv
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return d

    def inverse(self) -> "Mat":
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.shape[0]
        aug = Mat.hstack([self, Mat.identity(n)])
        r, piv = aug.rref()
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return r.submatrix(range(n), range(n, 2 * n))

    def solve(self, b: "Mat") -> "Mat":
        return self.inverse() @ b

    def nullspace(self) -> "Mat | None":
        """Basis of the right kernel as columns, or None if trivial."""
        r, piv = self.rref()
        n = self.shape[1]
        free = [j for j in range(n) if j not in piv]
        if not free:
            return None
        cols = []
        for f in free:
            v = [Fraction(0)] * n
            v[f] = Fraction(1)
            for i, p in enumerate(piv):
                v[p] = -r[i, f]
            cols.append(v)
        return Mat.from_columns(cols)

    def column_basis(self) -> "Mat | None":
        """Maximal independent subset of the columns (first-come order)."""
        _, piv = self.rref()
        if not piv:
            return None
        return self.submatrix(range(self.shape[0]), piv)


def span_contains(basis: Mat, vectors: Mat) -> bool:
    """True iff every column of ``vectors`` lies in the column span of ``basis``."""
    return Mat.hstack([basis, vectors]).rank() == basis.rank()


def same_span(a: Mat, b: Mat) -> bool:
    ra = a.rank()
    return ra == b.rank() and Mat.hstack([a, b]).rank() == ra


def is_antisymmetric(a: Mat) -> bool:
    return a.T == -a


def is_symmetric(a: Mat) -> bool:
    return a.T == a


def commutator(a: Mat, b: Mat) -> Mat:
    return a @ b - b @ a
