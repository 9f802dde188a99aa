"""``nnt`` command line.

Exit status: 0 when every check passes, 1 when a check fails, 2 on bad
input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import connection as conn
from .core import NeutralSpace, in_group, in_lie, sign_value
from .forms import matrix_is_zero
from .linalg import Mat
from .report import REPORTS, ReportError, run_report
from .serialize import (
    SchemaError,
    connection_from_json,
    form_matrix_to_json,
    graded_from_json,
    graded_to_json,
    kform_to_json,
    mat_from_json,
    mat_to_json,
    structure_from_json,
    structure_to_json,
    subspace_from_json,
)
from .structures import (
    NilpotentStructure,
    StructureError,
    axiom_failure,
    dual,
    from_theta,
    split,
    theta_of,
    xi_of,
)


class InputError(Exception):
    pass


def _load(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _space(n: int) -> NeutralSpace:
    if n < 1:
        raise InputError("--n must be a positive integer")
    return NeutralSpace(n)


def _matrix(path: str, space: NeutralSpace) -> Mat:
    A = mat_from_json(_load(path))
    if A.shape != (space.dim, space.dim):
        raise InputError(f"expected a {space.dim}x{space.dim} matrix for n={space.n}")
    return A


def _emit(obj, out: str | None = None):
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    print(text)


# -- check ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    space = _space(args.n)
    A = _matrix(args.file, space)
    if args.kind == "group":
        ok = in_group(A, space, args.which)
    else:
        ok = in_lie(A, space, args.which)
    _emit({"kind": args.kind, "which": args.which, "n": args.n, "member": ok})
    return 0 if ok else 1


# -- nilpotent -------------------------------------------------------------------------

def _structure(args, space: NeutralSpace) -> NilpotentStructure | str:
    """A structure from a record or a bare matrix, or the reason it fails."""
    obj = _load(args.file)
    if isinstance(obj, dict) and "N" in obj and "frame" in obj:
        if obj.get("n") != space.n:
            raise InputError("record n does not match --n")
        try:
            ns = structure_from_json(obj)
        except SchemaError as exc:
            if "admissible" in str(exc):
                return str(exc)
            raise
    else:
        N = mat_from_json(obj)
        if N.shape != (space.dim, space.dim):
            raise InputError(f"expected a {space.dim}x{space.dim} matrix for n={space.n}")
        reason = axiom_failure(N, space)
        if reason:
            return reason
        ns = NilpotentStructure.from_endo(N, space)
    if args.eps is not None and ns.eps != args.eps:
        return f"structure realizes eps={ns.eps}, not {args.eps}"
    return ns


def cmd_nilpotent(args) -> int:
    space = _space(args.n)
    if args.eps is not None:
        sign_value(args.eps)
    if args.action == "from-theta":
        L = subspace_from_json(_load(args.subspace), space)
        theta = graded_from_json(_load(args.theta), space.dim)
        try:
            ns = from_theta(L, theta)
        except StructureError as exc:
            _emit({"ok": False, "reason": str(exc)})
            return 1
        _emit(structure_to_json(ns))
        return 0
    ns = _structure(args, space)
    if args.action == "verify":
        ok = not isinstance(ns, str)
        _emit({"axioms": ok, "reason": None if ok else ns})
        return 0 if ok else 1
    if isinstance(ns, str):
        _emit({"ok": False, "reason": ns})
        return 1
    if args.action == "frame":
        _emit(structure_to_json(ns))
    elif args.action == "theta":
        _emit(graded_to_json(theta_of(ns)))
    elif args.action == "xi":
        _emit(graded_to_json(xi_of(ns)))
    elif args.action == "dual":
        _emit(structure_to_json(dual(ns)))
    elif args.action == "split":
        t = split(ns)
        _emit({"n": space.n, "I": mat_to_json(t.I), "J1": mat_to_json(t.J1), "J2": mat_to_json(t.J2)})
    return 0


# -- conn ---------------------------------------------------------------------------------

def cmd_conn(args) -> int:
    obj = _load(args.file)
    if isinstance(obj, dict):
        if obj.get("n") != args.n:
            raise InputError("connection n does not match --n")
        if obj.get("eps") != args.eps:
            raise InputError("connection eps does not match --eps")
    cg = connection_from_json(obj)
    a = args.action
    if a == "curvature":
        F = conn.curvature(cg)
        flat = matrix_is_zero(F)
        _emit({"flat": flat, "curvature": form_matrix_to_json(F)})
        return 0 if flat else 1
    if a == "walker":
        w = conn.walker(cg)
        bw = conn.both_walker(cg)
        _emit({
            "walker": w,
            "both_walker": bw,
            "witness": conn.first_violation(conn.walker_residuals(cg), cg.m),
            "both_witness": conn.first_violation(conn.both_walker_residuals(cg), cg.m),
        })
        return 0 if w else 1
    if a == "parallel":
        p = conn.is_parallel(cg)
        _emit({"parallel": p, "nabla_N": form_matrix_to_json(conn.nabla_N(cg))})
        return 0 if p else 1
    if a == "alpha":
        _emit(kform_to_json(conn.alpha_form(cg)))
        return 0
    # report: every predicate, no expectations attached
    xi_factor = conn.factor_along(conn.nabla_hat_xi(cg), conn.model_xi(cg.n), cg.m)
    _emit({
        "n": cg.n,
        "eps": cg.eps,
        "m": cg.m,
        "flat": conn.is_flat(cg),
        "walker": conn.walker(cg),
        "both_walker": conn.both_walker(cg),
        "parallel": conn.is_parallel(cg),
        "lie_h_valued": conn.is_lie_h_valued(cg),
        "alpha": kform_to_json(conn.alpha_form(cg)),
        "nabla_hat_xi_factor": None if xi_factor is None else kform_to_json(xi_factor),
        "nabla_hat_theta_zero": not conn.nabla_hat_theta(cg),
    })
    return 0


# -- example ---------------------------------------------------------------------------------

def cmd_example(args) -> int:
    params = _load(args.params) if args.params else {}
    if not isinstance(params, dict):
        raise InputError("--params must hold a JSON object")
    if args.seed is not None:
        params["seed"] = args.seed
    if args.samples is not None:
        params["samples"] = args.samples
    rep = run_report(args.name, params)
    _emit(rep.to_json(), args.out)
    return 0 if rep.passed else 1


# -- parser ------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nnt", description="Exact checks for nilpotent structures on neutral fibers.")
    sub = p.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="group and Lie algebra membership")
    csub = check.add_subparsers(dest="kind", required=True)
    g = csub.add_parser("group")
    g.add_argument("--which", choices=["so", "g", "h", "sow"], required=True)
    alg = csub.add_parser("algebra")
    alg.add_argument("--which", choices=["so", "g", "h"], required=True)
    for q in (g, alg):
        q.add_argument("--n", type=int, required=True)
        q.add_argument("file")
        q.set_defaults(func=cmd_check)

    nil = sub.add_parser("nilpotent", help="nilpotent structures")
    nsub = nil.add_subparsers(dest="action", required=True)
    for action in ("verify", "frame", "theta", "xi", "dual", "split"):
        q = nsub.add_parser(action)
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--eps", choices=["+", "-"])
        q.add_argument("file")
        q.set_defaults(func=cmd_nilpotent)
    q = nsub.add_parser("from-theta")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--eps", choices=["+", "-"])
    q.add_argument("--subspace", required=True)
    q.add_argument("--theta", required=True)
    q.set_defaults(func=cmd_nilpotent)

    c = sub.add_parser("conn", help="connection forms in the admissible gauge")
    c.add_argument("action", choices=["curvature", "walker", "parallel", "alpha", "report"])
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--eps", choices=["+", "-"], required=True)
    c.add_argument("file")
    c.set_defaults(func=cmd_conn)

    ex = sub.add_parser("example", help="worked examples and randomized suites")
    exsub = ex.add_subparsers(dest="example_cmd", required=True)
    run = exsub.add_parser("run")
    run.add_argument("name", choices=sorted(REPORTS))
    run.add_argument("--params")
    run.add_argument("--seed", type=int)
    run.add_argument("--samples", type=int)
    run.add_argument("--out")
    run.set_defaults(func=cmd_example)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, SchemaError, ReportError, ValueError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
