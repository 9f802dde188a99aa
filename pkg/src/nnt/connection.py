"""Connection forms in the admissible gauge.

A :class:`ConnectionGauge` holds the matrix of 1-forms omega with
``nabla b = b omega`` for the twisted frame ``b = e I'``.  In this gauge the
structure tensors are constant: N is Lambda_n, xi_i are the reference
vectors, and every condition on the connection is a linear block equation.

omega splits as ``sum_atom C_atom * x^mono * exp(lam . x) dx_v`` with
constant matrices ``C_atom``; linear conditions are checked atom by atom,
which is exact because distinct atoms are linearly independent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .core import (
    NeutralSpace,
    blocks,
    i_2n2n,
    i_prime,
    in_lie,
    lambda_n,
    lie_basis,
    random_rational,
    sign_value,
)
from .exterior import GradedElement, derivation_action, wedge_columns
from .forms import (
    ExpPoly,
    FormMatrix,
    KForm,
    const_times,
    matrix_add,
    matrix_d,
    matrix_is_zero,
    matrix_wedge,
    times_const,
)
from .linalg import Mat
from .structures import reference_xi, theta_from_xi

Atom = tuple[int, tuple[int, ...], tuple[Fraction, ...]]


def _atom_form(m: int, atom: Atom, c=1) -> KForm:
    v, mono, lam = atom
    return KForm(m, 1, {(v,): ExpPoly(m, {(mono, lam): c})})


def form_from_atoms(m: int, coeffs: dict[Atom, Fraction]) -> KForm:
    """Rebuild a 1-form from atom coefficients."""
    acc: dict[tuple[int, ...], dict] = {}
    for (v, mono, lam), c in coeffs.items():
        acc.setdefault((v,), {})[(mono, lam)] = c
    return KForm(m, 1, {k: ExpPoly(m, t) for k, t in acc.items()})


def atoms_of(form: KForm) -> dict[Atom, Fraction]:
    if form.degree != 1:
        raise ValueError("expected a 1-form")
    out = {}
    for (v,), f in form.coeffs.items():
        for (mono, lam), c in f.terms.items():
            out[(v, mono, lam)] = c
    return out


@dataclass(frozen=True)
class ConnectionGauge:
    space: NeutralSpace
    eps: str
    m: int
    omega: FormMatrix
    metric: bool = True
    _atoms: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sign_value(self.eps)
        dim = self.space.dim
        if len(self.omega) != dim or any(len(r) != dim for r in self.omega):
            raise ValueError(f"omega must be {dim}x{dim}")
        for row in self.omega:
            for w in row:
                if w.m != self.m or w.degree != 1:
                    raise ValueError("omega entries must be 1-forms on the same base")
        atoms: dict[Atom, list[list[Fraction]]] = {}
        for i, row in enumerate(self.omega):
            for j, w in enumerate(row):
                for a, c in atoms_of(w).items():
                    grid = atoms.setdefault(a, [[Fraction(0)] * dim for _ in range(dim)])
                    grid[i][j] = c
        object.__setattr__(self, "_atoms", {a: Mat(g) for a, g in sorted(atoms.items())})
        if self.metric and not self.is_metric():
            raise ValueError("omega is not so(2n,2n)-valued; pass metric=False to build it anyway")

    # construction ---------------------------------------------------------
    @classmethod
    def zero(cls, n: int, m: int = 2, eps: str = "+") -> "ConnectionGauge":
        dim = 4 * n
        z = KForm.zero(m, 1)
        return cls(NeutralSpace(n), eps, m, tuple((z,) * dim for _ in range(dim)))

    @classmethod
    def from_atoms(cls, space: NeutralSpace, eps: str, m: int, atoms: dict[Atom, Mat], metric: bool = True) -> "ConnectionGauge":
        dim = space.dim
        entries = [[{} for _ in range(dim)] for _ in range(dim)]
        for atom, C in atoms.items():
            for i in range(dim):
                for j in range(dim):
                    if C[i, j]:
                        d = entries[i][j]
                        d[atom] = d.get(atom, Fraction(0)) + C[i, j]
        omega = tuple(tuple(form_from_atoms(m, entries[i][j]) for j in range(dim)) for i in range(dim))
        return cls(space, eps, m, omega, metric)

    @property
    def n(self) -> int:
        return self.space.n

    def coefficient_matrices(self) -> dict[Atom, Mat]:
        return dict(self._atoms)

    def entry(self, i: int, j: int) -> KForm:
        """omega^{i+1}_{j+1} (0-based row i, column j)."""
        return self.omega[i][j]

    def is_metric(self) -> bool:
        return all(in_lie(C, self.space, "so") for C in self._atoms.values())

    def _require_metric(self):
        if not self.is_metric():
            raise ValueError("connection is not metric-compatible")

    def map_matrices(self, f: Callable[[Mat], Mat]) -> FormMatrix:
        """Apply a linear map to every coefficient matrix."""
        dim = self.space.dim
        out = {a: f(C) for a, C in self._atoms.items()}
        entries = [[{} for _ in range(dim)] for _ in range(dim)]
        for atom, C in out.items():
            for i in range(dim):
                for j in range(dim):
                    if C[i, j]:
                        entries[i][j][atom] = C[i, j]
        return tuple(tuple(form_from_atoms(self.m, entries[i][j]) for j in range(dim)) for i in range(dim))

    def dual(self) -> "ConnectionGauge":
        """omega' = I22 omega I22, the gauge of the sign-flipped frame e'."""
        J = i_2n2n(self.n)
        return ConnectionGauge(self.space, self.eps, self.m, const_times(J, times_const(self.omega, J)), self.metric)


# -- curvature ------------------------------------------------------------------

def curvature(cg: ConnectionGauge) -> FormMatrix:
    """d omega + omega ^ omega."""
    return matrix_add(matrix_d(cg.omega), matrix_wedge(cg.omega, cg.omega))


def is_flat(cg: ConnectionGauge) -> bool:
    return matrix_is_zero(curvature(cg))


# -- block conditions -------------------------------------------------------------

def _walker_identities(D):
    return {
        "D11-D13+D31-D33": D[0][0] - D[0][2] + D[2][0] - D[2][2],
        "D21-D23-D41+D43": D[1][0] - D[1][2] - D[3][0] + D[3][2],
        "D22+D24-D42-D44": D[1][1] + D[1][3] - D[3][1] - D[3][3],
    }


def _both_walker_identities(D):
    return {
        "D11-D33": D[0][0] - D[2][2],
        "D22-D44": D[1][1] - D[3][3],
        "D13-D31": D[0][2] - D[2][0],
        "D24-D42": D[1][3] - D[3][1],
        "D43+D21": D[3][2] + D[1][0],
        "D41+D23": D[3][0] + D[1][2],
    }


def _residuals(cg: ConnectionGauge, identities) -> dict[str, dict[Atom, Mat]]:
    out: dict[str, dict[Atom, Mat]] = {}
    for atom, C in cg._atoms.items():
        for name, R in identities(blocks(C, cg.n)).items():
            if not R.is_zero():
                out.setdefault(name, {})[atom] = R
    return out


def walker_residuals(cg: ConnectionGauge) -> dict[str, dict[Atom, Mat]]:
    """Nonzero residuals of the Walker block identities, keyed by identity then atom."""
    cg._require_metric()
    return _residuals(cg, _walker_identities)


def walker(cg: ConnectionGauge) -> bool:
    return not walker_residuals(cg)


def both_walker_residuals(cg: ConnectionGauge) -> dict[str, dict[Atom, Mat]]:
    cg._require_metric()
    out = _residuals(cg, _walker_identities)
    out.update(_residuals(cg, _both_walker_identities))
    return out


def both_walker(cg: ConnectionGauge) -> bool:
    return not both_walker_residuals(cg)


def first_violation(residuals: dict[str, dict[Atom, Mat]], m: int) -> dict | None:
    """JSON-friendly description of the first failing identity."""
    if not residuals:
        return None
    name = sorted(residuals)[0]
    atom, R = next(iter(sorted(residuals[name].items())))
    return {"identity": name, "form": str(_atom_form(m, atom)), "block": [[str(x) for x in r] for r in R.rows]}


def nabla_N(cg: ConnectionGauge) -> FormMatrix:
    """Coefficient matrix of nabla N: omega Lambda - Lambda omega."""
    L = lambda_n(cg.n)
    return cg.map_matrices(lambda C: C @ L - L @ C)


def nabla_commutator(cg: ConnectionGauge, T: Mat) -> FormMatrix:
    """omega T - T omega, the gauge form of nabla of a constant tensor T."""
    return cg.map_matrices(lambda C: C @ T - T @ C)


def is_parallel(cg: ConnectionGauge) -> bool:
    cg._require_metric()
    return matrix_is_zero(nabla_N(cg))


def alpha_form(cg: ConnectionGauge) -> KForm:
    n = cg.n
    acc = KForm.zero(cg.m, 1)
    for i in range(n):
        acc = acc - cg.omega[2 * n + i][i] + cg.omega[3 * n + i][n + i]
    return acc


def is_lie_valued(cg: ConnectionGauge, which: str) -> bool:
    return all(in_lie(C, cg.space, which) for C in cg._atoms.values())


def is_lie_h_valued(cg: ConnectionGauge) -> bool:
    return is_lie_valued(cg, "h")


# -- covariant derivatives of Theta_N and xi_N -------------------------------------

WedgeForm = dict  # Atom -> GradedElement, meaning sum_atom value (x) atom


def model_theta(n: int) -> GradedElement:
    return theta_from_xi(reference_xi(n))


def model_xi(n: int) -> GradedElement:
    return wedge_columns(reference_xi(n))


def model_theta_J(n: int) -> GradedElement:
    """Theta_J in the twisted basis b, where the sign factors cancel."""
    dim = 4 * n
    out = GradedElement.zero(dim, 2)
    for i in range(n):
        out = out + GradedElement.basis(dim, i, 2 * n + i) + GradedElement.basis(dim, 3 * n + i, n + i)
    return out


def nabla_hat(cg: ConnectionGauge, x: GradedElement) -> WedgeForm:
    """Leibniz derivative of a constant multivector x in the gauge."""
    out = {}
    for atom, C in cg._atoms.items():
        y = derivation_action(C, x)
        if not y.is_zero():
            out[atom] = y
    return out


def nabla_hat_xi(cg: ConnectionGauge) -> WedgeForm:
    cg._require_metric()
    return nabla_hat(cg, model_xi(cg.n))


def nabla_hat_theta(cg: ConnectionGauge) -> WedgeForm:
    cg._require_metric()
    return nabla_hat(cg, model_theta(cg.n))


def tensor(alpha: KForm, x: GradedElement) -> WedgeForm:
    """alpha (x) x as a wedge-valued form."""
    return {a: x.scale(c) for a, c in atoms_of(alpha).items()}


def factor_along(wf: WedgeForm, x: GradedElement, m: int) -> KForm | None:
    """The 1-form beta with wf == beta (x) x, if one exists."""
    coeffs = {}
    for atom, y in wf.items():
        c = y.ratio_to(x)
        if c is None:
            return None
        coeffs[atom] = c
    return form_from_atoms(m, coeffs)


def wedge_form_to_json(wf: WedgeForm, m: int) -> list[dict]:
    from .serialize import graded_to_json

    return [{"form": str(_atom_form(m, a)), "value": graded_to_json(y)} for a, y in sorted(wf.items())]


# -- nabla J = alpha (x) N -------------------------------------------------------------

def remark_J_residuals(cg: ConnectionGauge, alpha: KForm) -> list[str]:
    """Failing relations tying omega to nabla J = alpha (x) N.

    The relations carry sign factors eps^{delta} because they are written for
    the connection matrix of the untwisted frame e, which is I' omega I'.
    """
    n = cg.n
    Ip = i_prime(n, cg.eps)
    w = const_times(Ip, times_const(cg.omega, Ip))
    s = sign_value(cg.eps)
    f = [s if i == 0 else 1 for i in range(n)]
    zero = KForm.zero(cg.m, 1)
    bad = []

    def expect(lhs: KForm, rhs: KForm, label: str):
        if not (lhs - rhs).is_zero():
            bad.append(label)

    for i in range(n):
        for j in range(n):
            target = alpha if i == j else zero
            fi, fij = f[i], f[i] * f[j]
            expect(w[n + i][j] + w[3 * n + i][2 * n + j].scale(fi), target, f"row1a({i + 1},{j + 1})")
            expect(w[n + i][2 * n + j] + w[3 * n + i][j].scale(fi), target, f"row1b({i + 1},{j + 1})")
            expect(w[i][j] - w[2 * n + i][2 * n + j], zero, f"row2a({i + 1},{j + 1})")
            expect(w[i][2 * n + j] - w[2 * n + i][j], zero, f"row2b({i + 1},{j + 1})")
            expect(w[n + i][n + j] - w[3 * n + i][3 * n + j].scale(fij), zero, f"row3a({i + 1},{j + 1})")
            expect(w[n + i][3 * n + j] - w[3 * n + i][n + j].scale(fij), zero, f"row3b({i + 1},{j + 1})")
    return bad


def remark_J_leibniz_holds(cg: ConnectionGauge, alpha: KForm) -> bool:
    """nabla-hat Theta_J == alpha (x) Theta_N."""
    n = cg.n
    return nabla_hat(cg, model_theta_J(n)) == tensor(alpha, model_theta(n))


def verify_remark_J(cg: ConnectionGauge, alpha: KForm) -> bool:
    cg._require_metric()
    return not remark_J_residuals(cg, alpha) and remark_J_leibniz_holds(cg, alpha)


# -- random connections ----------------------------------------------------------------

def random_exppoly(m: int, rng: random.Random, terms: int = 2, max_deg: int = 2) -> ExpPoly:
    """Small random polynomial (no exponentials) with rational coefficients."""
    acc = ExpPoly.zero(m)
    zero_lam = (Fraction(0),) * m
    for _ in range(terms):
        mono = tuple(rng.randint(0, max_deg) for _ in range(m))
        acc = acc + ExpPoly(m, {(mono, zero_lam): random_rational(rng)})
    return acc


def random_connection(space: NeutralSpace, which: str, rng: random.Random, m: int = 2, eps: str = "+",
                      terms: int = 2) -> ConnectionGauge:
    """omega = sum_v sum_k p_vk(x) B_k dx_v over a basis B_k of the chosen Lie algebra."""
    basis = lie_basis(space.n, which)
    atoms: dict[Atom, Mat] = {}
    zero_lam = (Fraction(0),) * m
    for v in range(m):
        for B in basis:
            for _ in range(terms):
                c = random_rational(rng)
                if not c or rng.random() < 0.5:
                    continue
                mono = tuple(rng.randint(0, 2) for _ in range(m))
                key = (v, mono, zero_lam)
                atoms[key] = atoms[key] + B.scale(c) if key in atoms else B.scale(c)
    return ConnectionGauge.from_atoms(space, eps, m, atoms)


def random_non_walker(space: NeutralSpace, rng: random.Random, m: int = 2, eps: str = "+") -> ConnectionGauge:
    """Random so-valued connection that violates the Walker identities."""
    while True:
        cg = random_connection(space, "so", rng, m, eps, terms=1)
        if not walker(cg):
            return cg


def random_non_parallel(space: NeutralSpace, rng: random.Random, m: int = 2, eps: str = "+") -> ConnectionGauge:
    while True:
        cg = random_connection(space, "so", rng, m, eps, terms=1)
        if not is_parallel(cg):
            return cg
