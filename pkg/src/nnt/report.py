"""Worked-example and randomized-suite reports.

``run_report(name, params)`` builds a worked example or a randomized suite,
evaluates every predicate, compares against the expected verdicts and
returns an :class:`ExampleReport`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import builders
from .connection import (
    ConnectionGauge,
    alpha_form,
    both_walker,
    factor_along,
    first_violation,
    is_flat,
    is_lie_h_valued,
    is_lie_valued,
    is_parallel,
    model_theta_J,
    model_xi,
    nabla_commutator,
    nabla_hat_theta,
    nabla_hat_xi,
    nabla_N,
    random_connection,
    random_non_parallel,
    random_non_walker,
    tensor,
    walker,
    walker_residuals,
)
from .core import NeutralSpace, in_G, kappa_n, lambda_n, lambda_pm, random_group_element
from .exterior import induced_endo_action
from .forms import ExpPoly, KForm, d, matrix_is_zero, parse_exppoly
from .linalg import Mat
from .serialize import form_matrix_to_json
from .structures import (
    NilpotentStructure,
    assemble,
    dual,
    from_theta,
    split,
    theta_of,
    transition,
    verify_axioms,
    xi_of,
)

DEFAULT_SEED = 0
DEFAULT_SAMPLES = 20
CIRCLE_POINTS = ((1, 0), (Fraction(3, 5), Fraction(4, 5)), (Fraction(-5, 13), Fraction(12, 13)))
SCALES = (1, -2, Fraction(1, 3))


@dataclass
class Check:
    claim: str
    paper_ref: str
    verdict: bool
    witness: Any = None

    def to_json(self) -> dict:
        out = {"claim": self.claim, "paper_ref": self.paper_ref, "verdict": "pass" if self.verdict else "fail"}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class ExampleReport:
    name: str
    params: dict
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.verdict for c in self.checks)

    def add(self, claim: str, ref: str, verdict: bool, witness: Any = None):
        self.checks.append(Check(claim, ref, bool(verdict), witness))

    def expect(self, claim: str, ref: str, observed, expected, witness: Any = None):
        ok = observed == expected
        if not ok and witness is None:
            witness = {"observed": _show(observed), "expected": _show(expected)}
        self.add(claim, ref, ok, witness)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "verdict": "pass" if self.passed else "fail",
            "checks": [c.to_json() for c in sorted(self.checks, key=lambda c: c.claim)],
        }


def _show(x):
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    return str(x)


class ReportError(ValueError):
    """Unknown report name or malformed parameters."""


# -- shared connection checks --------------------------------------------------------

REF_FLAT = "flat connection: d omega + omega ^ omega = 0"
REF_WALKER = "Walker block identities"
REF_BOTH = "Walker identities for the structure and its sign-flipped partner"
REF_PARALLEL = "parallel structure: omega commutes with the model nilpotent"
REF_XI = "covariant derivative of the top vector is alpha times itself"
REF_XI_DUAL = "covariant derivative of the partner's top vector"
REF_ALPHA = "trace 1-form alpha of the Walker connection"


def _connection_checks(rep: ExampleReport, cg: ConnectionGauge, expect_walker: bool, expect_both: bool,
                       expect_parallel: bool, expect_xi: KForm | None, expect_xi_dual: KForm | None):
    rep.add("flat", REF_FLAT, is_flat(cg))
    rep.expect("walker", REF_WALKER, walker(cg), expect_walker, first_violation(walker_residuals(cg), cg.m) if not expect_walker else None)
    rep.expect("both_walker", REF_BOTH, both_walker(cg), expect_both)
    rep.expect("parallel", REF_PARALLEL, is_parallel(cg), expect_parallel)
    n = cg.n
    fac = factor_along(nabla_hat_xi(cg), model_xi(n), cg.m)
    rep.expect("nabla_hat_xi-factorization", REF_XI, fac, expect_xi)
    if expect_xi is not None:
        rep.expect("alpha", REF_ALPHA, alpha_form(cg), expect_xi)
    if expect_xi_dual is not None or expect_both:
        dual_cg = cg.dual()
        fac_d = factor_along(nabla_hat_xi(dual_cg), model_xi(n), cg.m)
        rep.expect("nabla_hat_xi-factorization (dual)", REF_XI_DUAL, fac_d, expect_xi_dual)


def _p(params: dict, key: str, default):
    return params.get(key, default)


def _int(params: dict, key: str, default: int, low: int = 1) -> int:
    v = params.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v < low:
        raise ReportError(f"parameter {key!r} must be an integer >= {low}")
    return v


def _poly(params: dict, key: str, default, m: int) -> ExpPoly:
    try:
        return parse_exppoly(params.get(key, default), m)
    except (ValueError, TypeError) as exc:
        raise ReportError(f"parameter {key!r}: {exc}") from exc


# -- example reports ----------------------------------------------------------------

def _wnp(params: dict) -> ExampleReport:
    n, m = _int(params, "n", 2, 2), _int(params, "m", 2)
    eps = _p(params, "eps", "+")
    a1, b1, a2, b2 = (_poly(params, k, dflt, m) for k, dflt in (("a1", "x1"), ("b1", 0), ("a2", "x2"), ("b2", 0)))
    rep = ExampleReport("wnp", {"n": n, "m": m, "eps": eps, "a1": str(a1), "b1": str(b1), "a2": str(a2), "b2": str(b2)})
    cg = builders.build_wnp(n, a1, b1, a2, b2, m, eps)
    expected = (-d(a1) + d(a2)).scale(n)
    _connection_checks(rep, cg, True, True, d(a1) == d(a2), expected, -expected)
    return rep


def _wnp_n1(params: dict) -> ExampleReport:
    m = _int(params, "m", 2)
    eps = _p(params, "eps", "+")
    a1, a2 = _poly(params, "a1", "x1", m), _poly(params, "a2", "x2", m)
    rep = ExampleReport("wnp_n1", {"m": m, "eps": eps, "a1": str(a1), "a2": str(a2)})
    cg = builders.build_wnp_n1(a1, a2, m, eps)
    expected = -d(a1) + d(a2)
    _connection_checks(rep, cg, True, True, d(a1) == d(a2), expected, -expected)
    return rep


def _gen_n1(params: dict) -> ExampleReport:
    m = _int(params, "m", 2)
    eps = _p(params, "eps", "+")
    a = _poly(params, "a", "x1", m)
    c = _poly(params, "c", "x2", m)
    phi = _poly(params, "phi", "x1 + x2", m)
    psi = _poly(params, "psi", "(x1 + x2)**2", m)
    b = params.get("b", 0)
    rep = ExampleReport("gen_n1", {"m": m, "eps": eps, "a": str(a), "c": str(c), "phi": str(phi), "psi": str(psi), "b": str(b)})
    residuals = builders.gen_n1_system_residuals(a, c, phi, psi, m)
    rep.add("reduced structure system", "reduced flatness system for constant b", not residuals, residuals or None)
    cg = builders.build_gen_n1(a, c, phi, psi, b, m, eps)
    da = d(a)
    _connection_checks(rep, cg, True, True, da.is_zero(), -da, da)
    return rep


def _diag(params: dict) -> ExampleReport:
    n, m = _int(params, "n", 2, 2), _int(params, "m", 2)
    eps = _p(params, "eps", "+")
    default_a = ["x1", "x2"] + ["0"] * (n - 2)
    default_b = ["x2", "x1"] + ["0"] * (n - 2)
    raw_a, raw_b = params.get("a", default_a), params.get("b", default_b)
    if not isinstance(raw_a, list) or not isinstance(raw_b, list):
        raise ReportError("parameters 'a' and 'b' must be lists")
    try:
        a = [parse_exppoly(x, m) for x in raw_a]
        b = [parse_exppoly(x, m) for x in raw_b]
    except (ValueError, TypeError) as exc:
        raise ReportError(str(exc)) from exc
    rep = ExampleReport("diag", {"n": n, "m": m, "eps": eps, "a": [str(x) for x in a], "b": [str(x) for x in b]})
    cg = builders.build_diag(n, a, b, m, eps)
    equal = all(d(x) == d(y) for x, y in zip(a, b))
    zero = KForm.zero(m, 1)
    _connection_checks(rep, cg, True, True, equal, zero, zero)
    rep.expect("nabla_N nonzero", "nonzero covariant derivative of N when dA differs from dB",
               not matrix_is_zero(nabla_N(cg)), not equal)
    return rep


def _dF(params: dict) -> ExampleReport:
    n, m = _int(params, "n", 1), _int(params, "m", 2)
    eps = _p(params, "eps", "+")
    raw = params.get("F", [["1/2*x1" if i == j else "0" for j in range(n)] for i in range(n)])
    if not isinstance(raw, list) or len(raw) != n or any(not isinstance(r, list) for r in raw):
        raise ReportError("parameter 'F' must be an n x n list")
    try:
        F = [[parse_exppoly(x, m) for x in row] for row in raw]
    except (ValueError, TypeError) as exc:
        raise ReportError(str(exc)) from exc
    rep = ExampleReport("dF", {"n": n, "m": m, "eps": eps, "F": [[str(x) for x in r] for r in F]})
    cg = builders.build_dF(n, F, m, eps)
    nonzero = any(not d(f).is_zero() for r in F for f in r)
    _connection_checks(rep, cg, not nonzero, not nonzero, not nonzero, None if nonzero else KForm.zero(m, 1), None)
    # nabla N = 2 * (dF in the Lambda_- layout)
    dim = 4 * n
    dF = [[d(f) for f in r] for r in F]
    Lm = lambda_pm(n, "-")
    want = tuple(
        tuple(dF[i % n][j % n].scale(2 * Lm[i // n * n, j // n * n]) for j in range(dim))
        for i in range(dim)
    )
    got = nabla_N(cg)
    rep.add("nabla_N = 2 dF pattern", "covariant derivative of N in the dF layout", got == want,
            None if got == want else {"nabla_N": form_matrix_to_json(got)})
    scalar = all(F[i][j].is_zero() for i in range(n) for j in range(n) if i != j) and all(F[i][i] == F[0][0] for i in range(n))
    if scalar:
        df = d(F[0][0]).scale(2)
        want_J = tuple(tuple(df.scale(Lm[i, j]) for j in range(dim)) for i in range(dim))
        rep.expect("nabla_N = df (x) J", "scalar dF gives nabla N = df (x) J", got == want_J, True)
        rep.expect("nabla_hat_theta = df (x) Theta_J", "scalar dF gives the mirrored bivector identity",
                   nabla_hat_theta(cg) == tensor(df, model_theta_J(n)), True)
    return rep


# -- randomized suites -------------------------------------------------------------------

def _suite_params(params: dict, name: str, n_default: int = 1):
    n = _int(params, "n", n_default)
    seed = params.get("seed", DEFAULT_SEED)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ReportError("parameter 'seed' must be an integer")
    samples = _int(params, "samples", DEFAULT_SAMPLES)
    return n, seed, samples, ExampleReport(name, {"n": n, "seed": seed, "samples": samples})


def random_structure(space: NeutralSpace, rng: random.Random) -> tuple[NilpotentStructure, Mat]:
    """Conjugate of the model by a random SO element, with its frame rebuilt from N alone."""
    A = random_group_element(space, "so", rng)
    N = A @ lambda_n(space.n) @ A.inverse()
    return NilpotentStructure.from_endo(N, space), A


def _tally(rep: ExampleReport, claim: str, ref: str, results: list[tuple[bool, Any]]):
    bad = [w for ok, w in results if not ok]
    rep.add(claim, ref, not bad, {"failures": len(bad), "first": bad[0]} if bad else {"samples": len(results)})


def _theorem_onetoone(params: dict) -> ExampleReport:
    n, seed, samples, rep = _suite_params(params, "theorem_onetoone")
    space, rng = NeutralSpace(n), random.Random(seed)
    fwd, back, trans, xi_inv, axioms = [], [], [], [], []
    for k in range(samples):
        ns, A = random_structure(space, rng)
        axioms.append((verify_axioms(ns.N, space), k))
        theta = theta_of(ns)
        L = ns.pi()
        rebuilt = from_theta(L, theta)
        fwd.append((rebuilt.N == ns.N, k))
        back.append((rebuilt.pi().same_as(L) and theta_of(rebuilt) == theta, k))
        # two admissible frames of one N are related by G
        other = NilpotentStructure.model(n).conjugate(A)
        T = transition(ns.frame, other.frame, ns.eps) if other.eps == ns.eps else None
        trans.append((T is not None and in_G(T, space), k))
        g = random_group_element(space, "g", rng)
        x = xi_of(NilpotentStructure.model(n))
        xi_inv.append((induced_endo_action(g, x) == x, k))
    _tally(rep, "axioms hold on conjugates", "conditions (a) and (b) for nilpotent structures", axioms)
    _tally(rep, "N -> (pi, Theta) -> N", "bivector correspondence, forward roundtrip", fwd)
    _tally(rep, "(L, Theta) -> N -> (pi, Theta)", "bivector correspondence, backward roundtrip", back)
    _tally(rep, "admissible transitions lie in G", "transition functions are G-valued", trans)
    _tally(rep, "G fixes the top vector", "top vector is independent of the admissible frame", xi_inv)
    return rep


def _theorem_nh(params: dict) -> ExampleReport:
    n, seed, samples, rep = _suite_params(params, "theorem_nh")
    space, rng = NeutralSpace(n), random.Random(seed)
    ok_axioms, ok_split, ok_recover = [], [], []
    for k in range(samples):
        ns, _ = random_structure(space, rng)
        t = split(ns)
        ok_split.append((not t.violations(), k))
        ok_recover.append((assemble(t, 1, (1, 0)) == ns.N, k))
        r = SCALES[k % len(SCALES)]
        cs = CIRCLE_POINTS[(k // len(SCALES)) % len(CIRCLE_POINTS)]
        ok_axioms.append((verify_axioms(assemble(t, r, cs), space), {"sample": k, "r": str(r), "cs": [str(x) for x in cs]}))
    _tally(rep, "assembled N_{r,theta} are nilpotent structures", "rotated and scaled triples give nilpotent structures", ok_axioms)
    _tally(rep, "split gives a paraquaternionic triple", "split of N is adapted to h", ok_split)
    _tally(rep, "N = I + J2", "split reassembles to N", ok_recover)
    return rep


def _theorem_dual(params: dict) -> ExampleReport:
    n, seed, samples, rep = _suite_params(params, "theorem_dual")
    space, rng = NeutralSpace(n), random.Random(seed)
    inv, comp, hk, par = [], [], [], []
    tensors = {"N": lambda_n(n), "I": lambda_pm(n, "+"), "J1": lambda_pm(n, "-"), "J2": kappa_n(n)}
    for k in range(samples):
        ns, _ = random_structure(space, rng)
        nx = dual(ns)
        inv.append((dual(nx).N == ns.N, k))
        comp.append((Mat.hstack([ns.xi(), nx.xi()]).rank() == 4 * n, k))
        hk.append((not split(ns).violations(), k))
        cg = random_connection(space, "h", rng)
        par.append((is_lie_h_valued(cg) and all(matrix_is_zero(nabla_commutator(cg, T)) for T in tensors.values()), k))
    _tally(rep, "dual is an involution", "the dual of the dual is N", inv)
    _tally(rep, "image and dual image are complementary", "direct sum decomposition of the fiber", comp)
    _tally(rep, "split triple is paraquaternionic", "I, J1, J2 relations and metric behavior", hk)
    _tally(rep, "Lie(H)-valued connections keep N, I, J1, J2 parallel", "neutral hyperKahler in gauge", par)
    return rep


def wcond_corpus(n: int, rng: random.Random, samples: int, violators: int) -> list[ConnectionGauge]:
    """Examples, random Walker-pattern connections and random violators."""
    out = [
        builders.build_wnp(2, "x1", 0, "x2", 0),
        builders.build_wnp_n1("x1", "x2"),
        builders.build_gen_n1("x1", "x2", "x1 + x2", "(x1 + x2)**2"),
        builders.build_diag(2, ["x1", "x2"], ["x2", "x1"]),
        builders.build_dF(1, [["1/2*x1"]]),
    ]
    space = NeutralSpace(n)
    out += [random_connection(space, "sow", rng) for _ in range(samples)]
    out += [random_non_walker(space, rng) for _ in range(violators)]
    return out


def wcond_a_holds(cg: ConnectionGauge) -> bool:
    """walker(cg) <=> nabla-hat xi = alpha (x) xi."""
    return walker(cg) == (nabla_hat_xi(cg) == tensor(alpha_form(cg), model_xi(cg.n)))


def wcond_b_holds(cg: ConnectionGauge) -> bool:
    """parallel <=> nabla-hat Theta = 0, and parallel => nabla-hat xi = 0."""
    par = is_parallel(cg)
    return par == (not nabla_hat_theta(cg)) and (not par or not nabla_hat_xi(cg))


def _prop_wcond(params: dict) -> ExampleReport:
    n, seed, samples, rep = _suite_params(params, "prop_wcond")
    violators = _int(params, "violators", max(1, samples // 5))
    rep.params["violators"] = violators
    rng = random.Random(seed)
    corpus = wcond_corpus(n, rng, samples, violators)
    _tally(rep, "walker <=> nabla_hat_xi = alpha (x) xi", REF_XI, [(wcond_a_holds(cg), k) for k, cg in enumerate(corpus)])
    _tally(rep, "parallel <=> nabla_hat_theta = 0 => nabla_hat_xi = 0", "parallel structures have horizontal bivector",
           [(wcond_b_holds(cg), k) for k, cg in enumerate(corpus)])
    strict = builders.build_diag(2, ["x1", "x2"], ["x2", "x1"])
    rep.add("xi horizontal without N parallel", "diagonal example separates the two conditions",
            not nabla_hat_xi(strict) and not is_parallel(strict))
    return rep


def _prop_g2(params: dict) -> ExampleReport:
    n, seed, samples, rep = _suite_params(params, "prop_g2")
    space, rng = NeutralSpace(n), random.Random(seed)
    results = []
    for k in range(samples):
        cg = random_connection(space, "g", rng) if k % 2 == 0 else random_non_parallel(space, rng)
        results.append((is_lie_valued(cg, "g") == matrix_is_zero(nabla_N(cg)), k))
    _tally(rep, "Lie(G)-valued <=> nabla N = 0", "parallel nilpotent structures have Lie(G)-valued gauge", results)
    return rep


REPORTS: dict[str, Callable[[dict], ExampleReport]] = {
    "wnp": _wnp,
    "wnp_n1": _wnp_n1,
    "gen_n1": _gen_n1,
    "diag": _diag,
    "dF": _dF,
    "theorem_onetoone": _theorem_onetoone,
    "theorem_nh": _theorem_nh,
    "theorem_dual": _theorem_dual,
    "prop_wcond": _prop_wcond,
    "prop_g2": _prop_g2,
}


def run_report(name: str, params: dict | None = None) -> ExampleReport:
    if name not in REPORTS:
        raise ReportError(f"unknown report {name!r}; choose from {', '.join(sorted(REPORTS))}")
    if params is not None and not isinstance(params, dict):
        raise ReportError("params must be a JSON object")
    params = dict(params or {})
    try:
        return REPORTS[name](params)
    except ReportError:
        raise
    except (ValueError, TypeError) as exc:
        raise ReportError(str(exc)) from exc
