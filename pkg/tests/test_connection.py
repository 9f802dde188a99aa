import random
from fractions import Fraction

import pytest

from nnt import connection as conn
from nnt.connection import ConnectionGauge
from nnt.core import NeutralSpace, lambda_n, lie_basis
from nnt.exterior import derivation_action
from nnt.forms import ExpPoly, KForm, parse_exppoly
from nnt.linalg import Mat
from nnt.structures import NilpotentStructure, split

from conftest import M


def constant_gauge(n, mats, eps="+", metric=True):
    """omega = sum_v mats[v] dx_v with constant coefficients."""
    m = len(mats)
    zero_lam = (Fraction(0),) * m
    atoms = {(v, (0,) * m, zero_lam): C for v, C in enumerate(mats) if not C.is_zero()}
    return ConnectionGauge.from_atoms(NeutralSpace(n), eps, m, atoms, metric)


def random_gauges(n, which, count, seed, m=2):
    rng = random.Random(seed)
    space = NeutralSpace(n)
    return [conn.random_connection(space, which, rng, m) for _ in range(count)]


def test_zero_connection():
    cg = ConnectionGauge.zero(1)
    assert conn.is_flat(cg) and conn.walker(cg) and conn.both_walker(cg)
    assert conn.is_parallel(cg)
    assert conn.alpha_form(cg).is_zero()
    assert conn.first_violation(conn.walker_residuals(cg), 2) is None


def test_non_metric_rejected():
    E = M([0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0])
    with pytest.raises(ValueError):
        constant_gauge(1, [E])
    cg = constant_gauge(1, [E], metric=False)
    assert not cg.is_metric()
    with pytest.raises(ValueError):
        conn.walker(cg)
    with pytest.raises(ValueError):
        conn.is_parallel(cg)


def test_shape_and_base_checks():
    z1, z3 = KForm.zero(1, 1), KForm.zero(3, 1)
    with pytest.raises(ValueError):
        ConnectionGauge(NeutralSpace(1), "+", 1, ((z1,) * 3,) * 3)
    with pytest.raises(ValueError):
        ConnectionGauge(NeutralSpace(1), "+", 1, ((z1, z1, z1, z3),) * 4)
    with pytest.raises(ValueError):
        ConnectionGauge(NeutralSpace(1), "x", 1, ((z1,) * 4,) * 4)


def test_nonflat_constant_connection():
    A, B = lie_basis(1, "so")[:2]
    assert A @ B != B @ A
    cg = constant_gauge(1, [A, B])
    F = conn.curvature(cg)
    # curvature is [A, B] dx1 ^ dx2
    K = A @ B - B @ A
    for i in range(4):
        for j in range(4):
            assert F[i][j].component((0, 1)) == ExpPoly.const(2, K[i, j])


def test_nonflat_single_entry():
    x2 = parse_exppoly("x2", 2)
    z = KForm.zero(2, 1)
    w = KForm.one_form([x2, ExpPoly.zero(2)])
    omega = [[z] * 4 for _ in range(4)]
    omega[0][1] = w
    cg = ConnectionGauge(NeutralSpace(1), "+", 2, tuple(map(tuple, omega)), metric=False)
    F = conn.curvature(cg)
    assert F[0][1].component((0, 1)) == ExpPoly.const(2, -1)
    assert not conn.is_flat(cg)


def test_commuting_constant_connection_is_flat():
    A = lie_basis(1, "so")[0]
    assert conn.is_flat(constant_gauge(1, [A, A.scale(3)]))


def test_walker_witness_names_identity():
    cg = conn.random_non_walker(NeutralSpace(1), random.Random(1))
    w = conn.first_violation(conn.walker_residuals(cg), cg.m)
    assert w["identity"] in {"D11-D13+D31-D33", "D21-D23-D41+D43", "D22+D24-D42-D44"}
    assert w["block"]


@pytest.mark.parametrize("n", [1, 2])
def test_walker_matches_sow_valuedness(n):
    for cg in random_gauges(n, "so", 15, seed=n) + random_gauges(n, "sow", 10, seed=10 + n):
        assert conn.walker(cg) == conn.is_lie_valued(cg, "sow")


@pytest.mark.parametrize("n", [1, 2])
def test_walker_iff_xi_factorization(n):
    for cg in random_gauges(n, "so", 10, seed=20 + n) + random_gauges(n, "sow", 10, seed=30 + n):
        xi = conn.model_xi(n)
        factor = conn.factor_along(conn.nabla_hat_xi(cg), xi, cg.m)
        assert conn.walker(cg) == (factor is not None)
        if factor is not None:
            assert factor == conn.alpha_form(cg)
            assert conn.nabla_hat_xi(cg) == conn.tensor(conn.alpha_form(cg), xi)


@pytest.mark.parametrize("n", [1, 2])
def test_both_walker_is_walker_and_dual_walker(n):
    for cg in random_gauges(n, "sow", 8, seed=40 + n) + random_gauges(n, "h", 5, seed=50 + n):
        assert conn.both_walker(cg) == (conn.walker(cg) and conn.walker(cg.dual()))
    assert cg.dual().dual().omega == cg.omega


@pytest.mark.parametrize("n", [1, 2])
def test_parallel_iff_g_valued_iff_theta_constant(n):
    for cg in random_gauges(n, "so", 8, seed=60 + n) + random_gauges(n, "g", 8, seed=70 + n):
        p = conn.is_parallel(cg)
        assert p == conn.is_lie_valued(cg, "g")
        assert p == (not conn.nabla_hat_theta(cg))
        if p:
            assert not conn.nabla_hat_xi(cg)


@pytest.mark.parametrize("n", [1, 2])
def test_h_valued_connections(n):
    t = split(NilpotentStructure.model(n))
    for cg in random_gauges(n, "h", 6, seed=80 + n):
        assert conn.is_lie_h_valued(cg)
        assert conn.both_walker(cg) and conn.is_parallel(cg)
        for T in (t.I, t.J1, t.J2):
            assert all(w.is_zero() for row in conn.nabla_commutator(cg, T) for w in row)


def test_n1_walker_in_entries():
    for cg in random_gauges(1, "so", 20, seed=90) + random_gauges(1, "sow", 10, seed=91):
        w = cg.entry
        combo = w(0, 1) + w(0, 3) + w(2, 1) + w(2, 3)
        assert conn.walker(cg) == combo.is_zero()


def test_n1_parallel_in_entries():
    for cg in random_gauges(1, "sow", 15, seed=92) + random_gauges(1, "g", 10, seed=93):
        w = cg.entry
        expected = conn.walker(cg) and (w(2, 0) - w(3, 1)).is_zero()
        assert conn.is_parallel(cg) == expected


def test_alpha_formula():
    n = 2
    cg = random_gauges(n, "so", 1, seed=94)[0]
    expected = KForm.zero(2, 1)
    for i in range(n):
        expected = expected - cg.entry(2 * n + i, i) + cg.entry(3 * n + i, n + i)
    assert conn.alpha_form(cg) == expected


def test_nabla_N_is_commutator():
    cg = random_gauges(1, "so", 1, seed=95)[0]
    L = lambda_n(1)
    for atom, C in cg.coefficient_matrices().items():
        R = C @ L - L @ C
        v, mono, lam = atom
        for i in range(4):
            for j in range(4):
                got = conn.nabla_N(cg)[i][j].component((v,))
                assert got.terms.get((mono, lam), 0) == R[i, j]


def test_factor_along_rejects_non_multiples():
    cg = conn.random_non_walker(NeutralSpace(1), random.Random(3))
    assert conn.factor_along(conn.nabla_hat_xi(cg), conn.model_xi(1), cg.m) is None


def _paracomplex_solutions(n):
    """Constant (C, t) with C in so and nabla-hat Theta_J = t Theta_N, via a nullspace."""
    basis = lie_basis(n, "so")
    TJ, TN = conn.model_theta_J(n), conn.model_theta(n)
    keys = sorted(set().union(TN.terms, *(derivation_action(B, TJ).terms for B in basis)))
    cols = [[derivation_action(B, TJ).terms.get(k, 0) for k in keys] for B in basis]
    cols.append([-TN.terms.get(k, 0) for k in keys])
    ns = Mat.from_columns(cols).nullspace()
    out = []
    for v in ns.columns():
        C = Mat.zeros(4 * n)
        for c, B in zip(v, basis):
            C = C + B.scale(c)
        out.append((C, v[-1]))
    return out


@pytest.mark.parametrize("eps", ["+", "-"])
@pytest.mark.parametrize("n", [1, 2])
def test_remark_J_relations_match_leibniz_form(n, eps):
    sols = _paracomplex_solutions(n)
    assert any(t for _, t in sols)
    dx1 = KForm.dx(1, 0)
    for C, t in sols:
        cg = constant_gauge(n, [C], eps)
        alpha = dx1.scale(t)
        assert conn.remark_J_leibniz_holds(cg, alpha)
        assert conn.remark_J_residuals(cg, alpha) == []
        assert conn.verify_remark_J(cg, alpha)
    # a random so-valued connection fails both forms together
    for cg in random_gauges(n, "so", 5, seed=100 + n, m=1):
        a = conn.alpha_form(cg)
        assert bool(conn.remark_J_residuals(cg, a)) == (not conn.remark_J_leibniz_holds(cg, a))


def test_wedge_form_json():
    cg = conn.random_non_walker(NeutralSpace(1), random.Random(4))
    out = conn.wedge_form_to_json(conn.nabla_hat_xi(cg), cg.m)
    assert out and all("form" in r and "value" in r for r in out)


def test_lie_h_implies_both_parallel_and_walker_strictly():
    # a g-valued connection that is not h-valued
    for cg in random_gauges(2, "g", 10, seed=120):
        if not conn.is_lie_h_valued(cg):
            assert conn.is_parallel(cg)
            break
    else:
        pytest.fail("no g-valued connection outside h")
