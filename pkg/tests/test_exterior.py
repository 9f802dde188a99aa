import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from nnt.core import NeutralSpace, lambda_n, random_group_element
from nnt.exterior import (
    GradedElement,
    Subspace,
    bivector_from_matrix,
    derivation_action,
    induced_endo_action,
    is_nondegenerate_on,
    pfaffian,
    power,
    theta_power_xi,
    wedge,
    wedge_all,
    wedge_columns,
)
from nnt.linalg import Mat
from nnt.structures import reference_xi, theta_from_xi

DIM = 4
e = [GradedElement.basis(DIM, i) for i in range(DIM)]
coeff = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def element(degree, dim=DIM):
    keys = list(itertools.combinations(range(dim), degree))
    return st.lists(coeff, min_size=len(keys), max_size=len(keys)).map(
        lambda cs: GradedElement(dim, degree, dict(zip(keys, cs))))


def minors_oracle(B: Mat) -> dict:
    """Coefficients of b_1 ^ ... ^ b_k as k x k minors (sympy determinants)."""
    d, k = B.shape
    out = {}
    for rows in itertools.combinations(range(d), k):
        sub = sympy.Matrix([[sympy.Rational(B[i, j].numerator, B[i, j].denominator) for j in range(k)] for i in rows])
        val = Fraction(str(sub.det()))
        if val:
            out[rows] = val
    return out


def test_basic_antisymmetry():
    assert wedge(e[0], e[1]) == -wedge(e[1], e[0])
    assert wedge(e[0], e[0]).is_zero()


def test_expansion_example():
    lhs = wedge(e[0] - e[2], e[1] + e[3])
    want = GradedElement(DIM, 2, {(0, 1): 1, (0, 3): 1, (1, 2): 1, (2, 3): -1})
    assert lhs == want


def test_degree_overflow():
    top = wedge_all(e)
    with pytest.raises(ValueError):
        wedge(top, e[0])


@given(element(1), element(2))
def test_graded_anticommutativity(a, b):
    assert wedge(a, b) == wedge(b, a)
    assert wedge(a, a).is_zero()


@given(element(1), element(1), element(2))
def test_associativity(a, b, c):
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@given(st.lists(st.lists(coeff, min_size=3, max_size=3), min_size=6, max_size=6))
def test_wedge_columns_matches_minors(rows):
    B = Mat(rows)
    assert wedge_columns(B).terms == minors_oracle(B)


def test_theta_power_examples():
    theta = GradedElement(DIM, 2, {(0, 1): 5})
    assert theta_power_xi(theta, 1) == theta
    # n = 2 with abstract xi as reference vectors e1..e4 (dim 8 not needed)
    t2 = GradedElement(DIM, 2, {(0, 2): 1, (1, 3): 1})
    assert theta_power_xi(t2, 2) == wedge_all(e)
    assert theta_power_xi(GradedElement(DIM, 2, {(0, 1): 1}), 2).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_theta_power_of_reference_is_top_vector(n):
    X = reference_xi(n)
    assert theta_power_xi(theta_from_xi(X), n) == wedge_columns(X)


def test_induced_action():
    x = wedge(e[0], e[1])
    assert induced_endo_action(Mat.identity(4), x) == x
    assert induced_endo_action(Mat.identity(4).scale(2), x) == x.scale(4)
    A = Mat([[1, 2, 0, 1], [0, 3, 1, 0], [2, 0, 1, 1], [1, 1, 0, 2]])
    top = wedge_all(e)
    assert induced_endo_action(A, top) == top.scale(A.det())


@given(st.lists(st.lists(coeff, min_size=4, max_size=4), min_size=4, max_size=4),
       st.lists(st.lists(coeff, min_size=4, max_size=4), min_size=4, max_size=4), element(2))
def test_induced_action_is_functorial(a, b, x):
    A, B = Mat(a), Mat(b)
    assert induced_endo_action(A @ B, x) == induced_endo_action(A, induced_endo_action(B, x))


def test_derivation_examples():
    x = wedge(e[0], e[1])
    assert derivation_action(Mat.identity(4), x) == x.scale(2)
    want = GradedElement(DIM, 2, {(1, 3): -1, (0, 2): 1})
    assert derivation_action(lambda_n(1), x) == want


@given(st.lists(st.lists(coeff, min_size=4, max_size=4), min_size=4, max_size=4), element(1), element(2))
def test_leibniz(x, a, b):
    X = Mat(x)
    assert derivation_action(X, wedge(a, b)) == wedge(derivation_action(X, a), b) + wedge(a, derivation_action(X, b))


@pytest.mark.parametrize("n", [1, 2])
def test_g_fixes_reference_top_vector(n):
    space = NeutralSpace(n)
    rng = random.Random(n)
    xi = wedge_columns(reference_xi(n))
    for _ in range(10):
        assert induced_endo_action(random_group_element(space, "g", rng), xi) == xi


def test_nondegeneracy_and_pfaffian():
    space = NeutralSpace(2)
    L = Subspace(space, reference_xi(2))
    xi = [GradedElement.vector(c) for c in L.basis.columns()]
    assert not is_nondegenerate_on(wedge(xi[0], xi[1]), L)
    assert is_nondegenerate_on(theta_from_xi(L.basis), L)
    rng = random.Random(4)
    for _ in range(10):
        C = [[Fraction(0)] * 4 for _ in range(4)]
        for i in range(4):
            for j in range(i + 1, 4):
                C[i][j] = Fraction(rng.randint(-2, 2))
                C[j][i] = -C[i][j]
        Cm = Mat(C)
        pf = pfaffian(Cm)
        assert pf * pf == Cm.det()
        theta = GradedElement.zero(8, 2)
        for i in range(4):
            for j in range(i + 1, 4):
                theta = theta + wedge(xi[i], xi[j]).scale(C[i][j])
        assert is_nondegenerate_on(theta, L) == (pf != 0)


def test_theta_outside_subspace_rejected():
    space = NeutralSpace(1)
    L = Subspace(space, reference_xi(1))
    with pytest.raises(ValueError):
        is_nondegenerate_on(GradedElement.basis(4, 0, 1), L)


def test_bivector_matrix_roundtrip():
    M = Mat([[0, 1, -2, 0], [-1, 0, 3, 1], [2, -3, 0, 0], [0, -1, 0, 0]])
    from nnt.exterior import coefficient_matrix

    assert coefficient_matrix(bivector_from_matrix(M)) == M
    assert power(bivector_from_matrix(M), 2).terms[(0, 1, 2, 3)] == 2 * pfaffian(M)
