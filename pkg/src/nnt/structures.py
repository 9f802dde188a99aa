"""Nilpotent, complex and paracomplex structures on a single fiber.

Throughout, a realization of an endomorphism X by a model matrix M is a
pseudo-orthonormal basis B with ``X B = B M``.  For a frame E and sign eps
the realizing basis is ``B = E I'_{4n,eps}``; since ``det I' = eps`` a
realization B with ``E`` orientation-giving forces ``eps = det B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Frame,
    NeutralSpace,
    i_2n2n,
    i_prime,
    kappa_n,
    lambda_n,
    lambda_pm,
    sign_str,
    sign_value,
)
from .exterior import (
    GradedElement,
    Subspace,
    bivector_of,
    endo_of_bivector,
    in_exterior_square,
    is_nondegenerate_on,
    wedge,
    wedge_columns,
)
from .linalg import Mat, as_rational, is_antisymmetric


class StructureError(ValueError):
    """An endomorphism does not satisfy the axioms required of it."""


# -- axioms -------------------------------------------------------------------

def verify_axioms(N: Mat, space: NeutralSpace) -> bool:
    """Im N = Ker N of rank 2n, light-like, and S N antisymmetric."""
    space.check(N)
    n2 = 2 * space.n
    if N.rank() != n2:
        return False
    if not (N @ N).is_zero():
        # Im N inside Ker N; with equal ranks this is Im = Ker
        return False
    if not is_antisymmetric(space.S @ N):
        return False
    image = N.column_basis()
    return space.gram(image).is_zero()


def axiom_failure(N: Mat, space: NeutralSpace) -> str | None:
    if N.rank() != 2 * space.n:
        return f"rank is {N.rank()}, expected {2 * space.n}"
    if not (N @ N).is_zero():
        return "image is not contained in the kernel"
    if not is_antisymmetric(space.S @ N):
        return "h(phi, N phi) does not vanish identically"
    if not space.gram(N.column_basis()).is_zero():
        return "image is not light-like"
    return None


# -- frames -------------------------------------------------------------------

def _complete_basis(X: Mat) -> Mat:
    """Standard basis vectors extending the columns of X to a basis, greedily."""
    dim = X.shape[0]
    chosen = []
    current = X
    r = X.rank()
    for j in range(dim):
        e = [0] * dim
        e[j] = 1
        trial = Mat.hstack([current, Mat.from_columns([e])])
        if trial.rank() > r:
            chosen.append(e)
            current = trial
            r += 1
        if r == dim:
            break
    return Mat.from_columns(chosen)


def isotropic_complement(X: Mat, space: NeutralSpace) -> Mat:
    """A light-like complement Y of the light-like span of X (Witt extension)."""
    Y = _complete_basis(X)
    S = space.S
    P = X.T @ S @ Y
    G = Y.T @ S @ Y
    # Y + X K is isotropic for K = -(1/2) P^{-T} G
    K = (P.T.inverse() @ G).scale(Fraction(-1, 2))
    return Y + X @ K


def symplectic_basis(vectors: list[tuple], form) -> tuple[list[tuple], list[tuple]]:
    """Darboux basis (p_i, q_i) with form(p_i, q_j) = delta_ij.

    Pivots on the first vector pairing nontrivially with the current one.
    """
    def comb(u, a, v, b):
        return tuple(a * x + b * y for x, y in zip(u, v))

    pool = list(vectors)
    ps, qs = [], []
    while pool:
        p = pool.pop(0)
        k = next((i for i, w in enumerate(pool) if form(p, w)), None)
        if k is None:
            raise StructureError("pairing is degenerate")
        w = pool.pop(k)
        q = tuple(x / form(p, w) for x in w)
        rest = []
        for v in pool:
            v = comb(v, Fraction(1), p, form(q, v))
            v = comb(v, Fraction(1), q, -form(p, v))
            rest.append(v)
        pool = rest
        ps.append(p)
        qs.append(q)
    return ps, qs


def _basis_from_null_pairs(xi: list[tuple], xi_p: list[tuple], n: int) -> Mat:
    """Pseudo-orthonormal basis b with the model xi / xi' pattern."""
    half = Fraction(1, 2)
    cols = [None] * (4 * n)
    for i in range(n):
        for off in (0, n):
            a, ap = xi[off + i], xi_p[off + i]
            plus = tuple(half * (x + y) for x, y in zip(a, ap))
            if off == 0:
                minus = tuple(half * (y - x) for x, y in zip(a, ap))
            else:
                minus = tuple(half * (x - y) for x, y in zip(a, ap))
            cols[off + i] = plus
            cols[2 * n + off + i] = minus
    return Mat.from_columns(cols)


def nilpotent_realization(N: Mat, space: NeutralSpace) -> Mat:
    """Pseudo-orthonormal B with N B = B Lambda_n."""
    failure = axiom_failure(N, space)
    if failure:
        raise StructureError(f"not a nilpotent structure: {failure}")
    n = space.n
    S = space.S
    X = N.column_basis()
    Yp = isotropic_complement(X, space)
    # on the complement, -(1/4) h(y, N y') is a symplectic form
    SN = S @ N
    quarter = Fraction(-1, 4)

    def form(u, v):
        return quarter * sum((u[i] * w for i, w in enumerate(SN.apply(v)) if u[i]), Fraction(0))

    ps, qs = symplectic_basis(Yp.columns(), form)
    xi_p = ps + qs
    xi = [None] * (2 * n)
    for i in range(n):
        xi[i] = tuple(Fraction(-1, 2) * x for x in N.apply(qs[i]))
        xi[n + i] = tuple(Fraction(1, 2) * x for x in N.apply(ps[i]))
    return _basis_from_null_pairs(xi, xi_p, n)


def _frame_from_realization(B: Mat, space: NeutralSpace) -> tuple[Frame, str]:
    eps = sign_str(int(B.det()))
    return Frame(space, B @ i_prime(space.n, eps)), eps


def realizes(frame: Frame, eps: str, X: Mat, model: Mat) -> bool:
    """X (E I') = (E I') model, with E pseudo-orthonormal and oriented."""
    B = frame.twisted(eps)
    return frame.is_pseudo_orthonormal() and frame.is_oriented() and X @ B == B @ model


def admissible_frame(N: Mat, space: NeutralSpace, hint: Frame | None = None) -> tuple[Frame, str]:
    """An oriented pseudo-orthonormal frame E and eps with N E I' = E I' Lambda_n.

    ``hint`` (default: the reference frame) is returned unchanged when it is
    already admissible.
    """
    hint = hint if hint is not None else Frame(space, Mat.identity(space.dim))
    L = lambda_n(space.n)
    for eps in ("+", "-"):
        if realizes(hint, eps, N, L):
            return hint, eps
    B = nilpotent_realization(N, space)
    frame, eps = _frame_from_realization(B, space)
    assert realizes(frame, eps, N, L)
    return frame, eps


def transition(e: Frame, f: Frame, eps: str) -> Mat:
    """A with f I' = e I' A."""
    return e.twisted(eps).inverse() @ f.twisted(eps)


# -- xi vectors -----------------------------------------------------------------

def xi_vectors(frame: Frame, eps: str) -> Mat:
    """Columns xi_1..xi_2n spanning the image of the structure."""
    n = frame.space.n
    B = frame.twisted(eps)
    cols = []
    for i in range(n):
        cols.append(tuple(x - y for x, y in zip(B.col(i), B.col(2 * n + i))))
    for i in range(n):
        cols.append(tuple(x + y for x, y in zip(B.col(n + i), B.col(3 * n + i))))
    return Mat.from_columns(cols)


def xi_prime_vectors(frame: Frame, eps: str) -> Mat:
    n = frame.space.n
    B = frame.twisted(eps)
    cols = []
    for i in range(n):
        cols.append(tuple(x + y for x, y in zip(B.col(i), B.col(2 * n + i))))
    for i in range(n):
        cols.append(tuple(x - y for x, y in zip(B.col(n + i), B.col(3 * n + i))))
    return Mat.from_columns(cols)


def reference_xi(n: int) -> Mat:
    space = NeutralSpace(n)
    return xi_vectors(Frame(space, Mat.identity(space.dim)), "+")


def theta_from_xi(xi: Mat) -> GradedElement:
    n = xi.shape[1] // 2
    v = [GradedElement.vector(c) for c in xi.columns()]
    out = GradedElement.zero(xi.shape[0], 2)
    for i in range(n):
        out = out + wedge(v[i], v[n + i])
    return out


# -- nilpotent structures ---------------------------------------------------------

@dataclass(frozen=True)
class NilpotentStructure:
    space: NeutralSpace
    N: Mat
    eps: str
    frame: Frame

    def __post_init__(self):
        sign_value(self.eps)
        if not realizes(self.frame, self.eps, self.N, lambda_n(self.space.n)):
            raise StructureError("frame is not admissible for N")

    @classmethod
    def from_endo(cls, N: Mat, space: NeutralSpace, hint: Frame | None = None) -> "NilpotentStructure":
        frame, eps = admissible_frame(N, space, hint)
        return cls(space, N, eps, frame)

    @classmethod
    def model(cls, n: int) -> "NilpotentStructure":
        space = NeutralSpace(n)
        return cls(space, lambda_n(n), "+", Frame(space, Mat.identity(space.dim)))

    @property
    def basis(self) -> Mat:
        return self.frame.twisted(self.eps)

    def xi(self) -> Mat:
        return xi_vectors(self.frame, self.eps)

    def xi_prime(self) -> Mat:
        return xi_prime_vectors(self.frame, self.eps)

    def pi(self) -> Subspace:
        return Subspace(self.space, self.xi())

    def conjugate(self, A: Mat) -> "NilpotentStructure":
        """Push forward by A in SO(2n,2n): N -> A N A^{-1}, E -> A E."""
        return NilpotentStructure(self.space, A @ self.N @ A.inverse(), self.eps, Frame(self.space, A @ self.frame.E))


def theta_of(ns: NilpotentStructure) -> GradedElement:
    """sum_i xi_i ^ xi_{n+i} from the admissible frame."""
    return theta_from_xi(ns.xi())


def xi_of(ns: NilpotentStructure) -> GradedElement:
    return wedge_columns(ns.xi())


def theta_coordinates(N: Mat, space: NeutralSpace) -> GradedElement:
    """Frame-free bivector (phi*, psi*) -> h*(phi*, psi* o N)."""
    return bivector_of(space, N)


def from_theta(L: Subspace, theta: GradedElement) -> NilpotentStructure:
    """The nilpotent structure with image L and bivector theta."""
    space = L.space
    if L.rank != 2 * space.n or not L.is_light_like():
        raise StructureError("L must be a light-like subspace of rank 2n")
    if not in_exterior_square(theta, L):
        raise StructureError("theta is not in the exterior square of L")
    if not is_nondegenerate_on(theta, L):
        raise StructureError("theta is degenerate on L")
    N = endo_of_bivector(space, theta)
    return NilpotentStructure.from_endo(N, space)


# -- duals and hyperKahler triples ---------------------------------------------------

def dual(ns: NilpotentStructure) -> NilpotentStructure:
    """Dual structure realized by e' = (e_1..e_2n, -e_2n+1..-e_4n)."""
    n = ns.space.n
    J = i_2n2n(n)
    B = ns.basis
    Nx = B @ J @ lambda_n(n) @ J @ B.inverse()
    return NilpotentStructure(ns.space, Nx, ns.eps, Frame(ns.space, ns.frame.E @ J))


@dataclass(frozen=True)
class HyperKahlerTriple:
    space: NeutralSpace
    I: Mat
    J1: Mat
    J2: Mat

    def __post_init__(self):
        bad = self.violations()
        if bad:
            raise StructureError("not a paraquaternionic triple adapted to h: " + ", ".join(bad))

    def violations(self) -> list[str]:
        S = self.space.S
        one = Mat.identity(self.space.dim)
        checks = {
            "I^2 = -1": self.I @ self.I == -one,
            "J1^2 = 1": self.J1 @ self.J1 == one,
            "J2^2 = 1": self.J2 @ self.J2 == one,
            "I J1 = J2": self.I @ self.J1 == self.J2,
            "I preserves h": self.I.T @ S @ self.I == S,
            "J1 reverses h": self.J1.T @ S @ self.J1 == -S,
            "J2 reverses h": self.J2.T @ S @ self.J2 == -S,
        }
        return [k for k, ok in checks.items() if not ok]

    @classmethod
    def from_basis(cls, space: NeutralSpace, B: Mat) -> "HyperKahlerTriple":
        """Triple with I b_i = b_{n+i}, J1 b_i = b_{2n+i}, J2 b_i = b_{3n+i}."""
        n = space.n
        Bi = B.inverse()
        return cls(space, B @ lambda_pm(n, "+") @ Bi, B @ lambda_pm(n, "-") @ Bi, B @ kappa_n(n) @ Bi)


def split(ns: NilpotentStructure) -> HyperKahlerTriple:
    Nx = dual(ns).N
    half = Fraction(1, 2)
    I = (ns.N + Nx).scale(half)
    J2 = (ns.N - Nx).scale(half)
    return HyperKahlerTriple(ns.space, I, -(I @ J2), J2)


def assemble(t: HyperKahlerTriple, r, cs) -> Mat:
    """r (I - s J1 + c J2) for a rational point (c, s) of the unit circle."""
    r = as_rational(r)
    c, s = (as_rational(x) for x in cs)
    if r == 0:
        raise StructureError("r must be nonzero")
    if c * c + s * s != 1:
        raise StructureError("(c, s) is not on the unit circle")
    return (t.I - t.J1.scale(s) + t.J2.scale(c)).scale(r)


# -- complex and paracomplex structures ------------------------------------------

def para_realization(J: Mat, space: NeutralSpace) -> Mat | None:
    """Pseudo-orthonormal B with J B = B Lambda_{n,-}, or None."""
    space.check(J)
    S = space.S
    one = Mat.identity(space.dim)
    if J @ J != one or J.T @ S @ J != -S:
        return None
    n = space.n
    Vp = (J - one).nullspace()
    Vm = (J + one).nullspace()
    if Vp is None or Vm is None or Vp.shape[1] != 2 * n or Vm.shape[1] != 2 * n:
        return None
    # dual basis of V- against V+: h(u_a, w_b) = 2 delta_ab
    W = Vm @ (Vp.T @ S @ Vm).inverse().scale(2)
    u, w = Vp.columns(), W.columns()
    half = Fraction(1, 2)
    cols = [None] * (4 * n)
    for i in range(n):
        cols[i] = tuple(half * (x + y) for x, y in zip(u[i], w[i]))
        cols[2 * n + i] = tuple(half * (x - y) for x, y in zip(u[i], w[i]))
        cols[n + i] = tuple(half * (x + y) for x, y in zip(u[n + i], w[n + i]))
        cols[3 * n + i] = tuple(half * (y - x) for x, y in zip(u[n + i], w[n + i]))
    B = Mat.from_columns(cols)
    assert J @ B == B @ lambda_pm(n, "-") and space.gram(B) == S
    return B


def para_frame(J: Mat, space: NeutralSpace) -> tuple[Frame, str] | None:
    B = para_realization(J, space)
    return None if B is None else _frame_from_realization(B, space)


def is_para_structure(J: Mat, space: NeutralSpace, eps: str) -> bool:
    """h-reversing paracomplex J realized by Lambda_{n,-} in an eps-twisted oriented frame.

    The realizing basis is unique up to the centralizer of Lambda_{n,-},
    which lies in SO(2n,2n), so eps is determined by J.
    """
    found = para_frame(J, space)
    return found is not None and found[1] == sign_str(sign_value(eps))


def cx_orthogonal_basis(I: Mat, space: NeutralSpace) -> tuple[Mat, list[Fraction]] | None:
    """h-orthogonal basis (v_k, I v_k) with norms; orders space-like pairs first.

    Normalizing would need square roots, so the pseudo-orthonormal frame is
    this basis scaled by positive reals; its orientation is that of the
    returned rational basis.
    """
    space.check(I)
    S = space.S
    one = Mat.identity(space.dim)
    if I @ I != -one or I.T @ S @ I != S:
        return None
    pos: list[tuple] = []
    neg: list[tuple] = []
    norms_pos, norms_neg = [], []
    found: list[tuple] = []
    while len(found) < space.dim:
        if found:
            C = (Mat.from_columns(found).T @ S).nullspace()
            cand = C.columns()
        else:
            cand = Mat.identity(space.dim).columns()
        v = next((c for c in cand if space.h(c, c)), None)
        if v is None:
            v = next(
                tuple(x + y for x, y in zip(a, b))
                for k, a in enumerate(cand) for b in cand[k + 1:] if space.h(a, b)
            )
        q = space.h(v, v)
        Iv = I.apply(v)
        found += [v, Iv]
        if q > 0:
            pos.append((v, Iv))
            norms_pos.append(q)
        else:
            neg.append((v, Iv))
            norms_neg.append(q)
    n = space.n
    if len(pos) != n or len(neg) != n:
        return None
    cols = [p[0] for p in pos] + [p[1] for p in pos] + [p[0] for p in neg] + [p[1] for p in neg]
    B = Mat.from_columns(cols)
    assert I @ B == B @ lambda_pm(n, "+")
    return B, norms_pos + norms_neg


def cx_sign(I: Mat, space: NeutralSpace) -> str | None:
    found = cx_orthogonal_basis(I, space)
    if found is None:
        return None
    return "+" if found[0].det() > 0 else "-"


def is_cx_structure(I: Mat, space: NeutralSpace, eps: str) -> bool:
    """h-preserving complex I realized by Lambda_{n,+} in an eps-twisted oriented frame."""
    s = cx_sign(I, space)
    return s is not None and s == sign_str(sign_value(eps))


def theta_of_para(J: Mat, frame: Frame, eps: str) -> GradedElement:
    """sum_i e_i ^ e_{2n+i} + eps^{delta_i1} e_{3n+i} ^ e_{n+i}."""
    n = frame.space.n
    e = [GradedElement.vector(c) for c in frame.E.columns()]
    s = sign_value(eps)
    out = GradedElement.zero(frame.space.dim, 2)
    for i in range(n):
        f = s if i == 0 else 1
        out = out + wedge(e[i], e[2 * n + i]) + wedge(e[3 * n + i], e[n + i]).scale(f)
    return out


def theta_of_cx(I: Mat, frame: Frame, eps: str) -> GradedElement:
    """sum_i e_i ^ e_{n+i} - eps^{delta_i1} e_{2n+i} ^ e_{3n+i}."""
    n = frame.space.n
    e = [GradedElement.vector(c) for c in frame.E.columns()]
    s = sign_value(eps)
    out = GradedElement.zero(frame.space.dim, 2)
    for i in range(n):
        f = s if i == 0 else 1
        out = out + wedge(e[i], e[n + i]) - wedge(e[2 * n + i], e[3 * n + i]).scale(f)
    return out


def j2_frame(ns: NilpotentStructure) -> Frame:
    """(e_{n+1}..e_{2n}, -e_1..-e_n, e_{2n+1}..e_{4n}): admissible for J_2 of the split."""
    n = ns.space.n
    E = ns.frame.E
    cols = E.columns()
    new = cols[n:2 * n] + [tuple(-x for x in c) for c in cols[:n]] + cols[2 * n:]
    return Frame(ns.space, Mat.from_columns(new))
