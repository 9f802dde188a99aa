"""Exact-rational toolkit for nilpotent structures on neutral vector spaces."""

from .core import (
    Frame,
    NeutralSpace,
    blocks,
    cayley,
    i_2n2n,
    i_prime,
    in_G,
    in_H,
    in_lie,
    in_SO,
    in_SO_W,
    kappa_n,
    lambda_n,
    lambda_pm,
    reassemble,
)
from .exterior import GradedElement, Subspace, derivation_action, induced_endo_action, theta_power_xi, wedge
from .forms import ExpPoly, KForm, d, parse_exppoly, wedge_forms
from .linalg import Mat
from .structures import (
    HyperKahlerTriple,
    NilpotentStructure,
    StructureError,
    admissible_frame,
    assemble,
    dual,
    from_theta,
    split,
    theta_of,
    verify_axioms,
    xi_of,
)
from .connection import ConnectionGauge, alpha_form, both_walker, curvature, is_parallel, walker
from .report import run_report

__version__ = "0.1.0"
