"""Flat connection gauges for the worked examples.

Each builder checks its own preconditions and raises ``ValueError`` with a
short reason when they fail.
"""

from __future__ import annotations

from typing import Sequence

from .connection import ConnectionGauge
from .core import NeutralSpace
from .forms import ExpPoly, FormMatrix, KForm, d, matrix_is_zero, matrix_wedge, parse_exppoly, wedge_forms


def _grid(n: int, m: int, placements: dict[tuple[int, int], list[list[KForm]]]) -> FormMatrix:
    """Place n x n form blocks at 0-based block positions; zeros elsewhere."""
    z = KForm.zero(m, 1)
    dim = 4 * n
    out = [[z] * dim for _ in range(dim)]
    for (k, l), blk in placements.items():
        for i in range(n):
            for j in range(n):
                out[k * n + i][l * n + j] = blk[i][j]
    return tuple(tuple(r) for r in out)


def _d_matrix(F: Sequence[Sequence[ExpPoly]]) -> list[list[KForm]]:
    return [[d(f) for f in row] for row in F]


def _check_closed_square(dF: list[list[KForm]], label: str):
    if not matrix_is_zero(matrix_wedge(tuple(map(tuple, dF)), tuple(map(tuple, dF)))):
        raise ValueError(f"{label} ^ {label} is not zero")


def _polys(values, m: int) -> list[ExpPoly]:
    return [parse_exppoly(v, m) for v in values]


def tridiagonal(n: int, a: ExpPoly, b: ExpPoly) -> list[list[ExpPoly]]:
    z = ExpPoly.zero(a.m)
    return [[a if i == j else b if abs(i - j) == 1 else z for j in range(n)] for i in range(n)]


def build_wnp(n: int, a1, b1, a2, b2, m: int = 2, eps: str = "+") -> ConnectionGauge:
    """Antidiagonal dF_1 / dF_2 layout with tridiagonal F_k."""
    if n < 2:
        raise ValueError("this layout needs n >= 2")
    a1, b1, a2, b2 = _polys((a1, b1, a2, b2), m)
    dF1 = _d_matrix(tridiagonal(n, a1, b1))
    dF2 = _d_matrix(tridiagonal(n, a2, b2))
    _check_closed_square(dF1, "dF1")
    _check_closed_square(dF2, "dF2")
    omega = _grid(n, m, {(0, 2): dF1, (2, 0): dF1, (1, 3): dF2, (3, 1): dF2})
    return ConnectionGauge(NeutralSpace(n), eps, m, omega)


def build_wnp_n1(a1, a2, m: int = 2, eps: str = "+") -> ConnectionGauge:
    a1, a2 = _polys((a1, a2), m)
    omega = _grid(1, m, {(0, 2): [[d(a1)]], (2, 0): [[d(a1)]], (1, 3): [[d(a2)]], (3, 1): [[d(a2)]]})
    return ConnectionGauge(NeutralSpace(1), eps, m, omega)


def gen_n1_forms(a, c, phi, psi, m: int = 2) -> dict[str, KForm]:
    """omega^2_1, omega^3_1, omega^4_1 and da from the data (a, c, phi, psi)."""
    a, c, phi, psi = _polys((a, c, phi, psi), m)
    dphi, dpsi = d(phi), d(psi)
    if not wedge_forms(dphi, dpsi).is_zero():
        raise ValueError("dphi ^ dpsi is not zero")
    shift = a - 2 * c
    if shift.linear_part() is None:
        raise ValueError("a - 2c must be a homogeneous linear function")
    up, down = shift.exp(), (-shift).exp()
    half = ExpPoly.const(m, "1/2")
    return {
        "w21": (dphi * up + dpsi * down) * half,
        "w31": d(c),
        "w41": (dphi * up - dpsi * down) * half,
        "da": d(a),
    }


def build_gen_n1(a, c, phi, psi, b_const=0, m: int = 2, eps: str = "+") -> ConnectionGauge:
    """General n = 1 Walker gauge with constant b (so e^a db = 0).

    ``b_const`` only records the constant; it does not enter omega.
    """
    f = gen_n1_forms(a, c, phi, psi, m)
    w21, w31, w41, da = f["w21"], f["w31"], f["w41"], f["da"]
    w32 = -w41
    w43 = -w21
    w42 = w31 - da
    z = KForm.zero(m, 1)
    # rows i, columns j hold omega^i_j; skew or symmetric mirrors per so(2,2)
    omega = (
        (z, -w21, w31, w41),
        (w21, z, w32, w42),
        (w31, w32, z, -w43),
        (w41, w42, w43, z),
    )
    return ConnectionGauge(NeutralSpace(1), eps, m, omega)


def gen_n1_system_residuals(a, c, phi, psi, m: int = 2) -> list[str]:
    """Failing equations of the reduced structure system for constant b."""
    f = gen_n1_forms(a, c, phi, psi, m)
    w21, w31, w41, da = f["w21"], f["w31"], f["w41"], f["da"]
    eqs = {
        "d w21 + 2 w31^w41 - da^w41": d(w21) + wedge_forms(w31, w41).scale(2) - wedge_forms(da, w41),
        "d w31 + 2 w21^w41": d(w31) + wedge_forms(w21, w41).scale(2),
        "d w41 - 2 w21^w31 - da^w21": d(w41) - wedge_forms(w21, w31).scale(2) - wedge_forms(da, w21),
    }
    return [k for k, v in eqs.items() if not v.is_zero()]


def build_diag(n: int, a: Sequence, b: Sequence, m: int = 2, eps: str = "+") -> ConnectionGauge:
    if n < 2:
        raise ValueError("this layout needs n >= 2")
    if len(a) != n or len(b) != n:
        raise ValueError("a and b need n entries each")
    a, b = _polys(a, m), _polys(b, m)
    if sum(a, ExpPoly.zero(m)) != sum(b, ExpPoly.zero(m)):
        raise ValueError("sum of a_i must equal sum of b_i")
    z = KForm.zero(m, 1)
    dA = [[d(a[i]) if i == j else z for j in range(n)] for i in range(n)]
    dB = [[d(b[i]) if i == j else z for j in range(n)] for i in range(n)]
    omega = _grid(n, m, {(0, 2): dA, (2, 0): dA, (1, 3): dB, (3, 1): dB})
    return ConnectionGauge(NeutralSpace(n), eps, m, omega)


def build_dF(n: int, F: Sequence[Sequence], m: int = 2, eps: str = "+") -> ConnectionGauge:
    """Anti-diagonal dF layout."""
    if len(F) != n or any(len(r) != n for r in F):
        raise ValueError("F must be n x n")
    F = [_polys(r, m) for r in F]
    if any(F[i][j] != F[j][i] for i in range(n) for j in range(n)):
        raise ValueError("F must be symmetric")
    dF = _d_matrix(F)
    _check_closed_square(dF, "dF")
    omega = _grid(n, m, {(0, 3): dF, (1, 2): dF, (2, 1): dF, (3, 0): dF})
    return ConnectionGauge(NeutralSpace(n), eps, m, omega)
