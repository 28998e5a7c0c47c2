"""Batch front-end: solve and verify commands driven by a config file.

Consumers are scripts and CI. Outputs are CSV tables and key: value
report files, written with full decimal precision so that identical
config and seed give byte-identical files.

Exit codes: 0 all requested checks passed; 1 config error; 2 a theorem
hypothesis failed its runtime gate; 3 a check ran but did not pass.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Optional

import numpy as np

from .backend import backend_name
from .config import (
    Section,
    build_mesh_params,
    build_problem,
    build_psi,
    build_solve_params,
    root_section,
)
from .errors import ConfigError, DomainError, HypothesisError
from .fracops import FracOrder, frac_integral, psi_images, raw_values
from .mesh import GradedMesh, GridFunction, default_grading
from .operators import RHSFunction
from .solver import ProblemSpec, default_start, picard_solve
from .verify import (
    PerturbationSpec,
    check_caplygin,
    check_comparison,
    data_dependence_bound,
    hausdorff_bound,
    inversion_identity_check,
    ml_integral_identity_check,
)

_CHECKS = ("identity", "inversion", "caplygin", "comparison", "data_dep", "hausdorff")


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write(path: str, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def _report_lines(pairs) -> list:
    return [f"{key}: {val}" for key, val in pairs]


def _overridden(sec: Section, args) -> tuple:
    """(mesh params, solve params, seed) with CLI flags taking precedence."""
    mesh = build_mesh_params(sec.child("mesh", required=False))
    solve = build_solve_params(sec.child("solve", required=False))
    seed = sec.scalar("seed", int, required=False, default=0)
    if args.mesh_n is not None:
        mesh = type(mesh)(args.mesh_n, mesh.grading)
    if args.grading is not None:
        mesh = type(mesh)(mesh.n, args.grading)
    if args.seed is not None:
        seed = args.seed
    return mesh, solve, seed


# --------------------------------------------------------------------------
# solve

def cmd_solve(args) -> int:
    sec = root_section(args.config)
    sec.require_keys({"problem", "mesh", "solve", "seed"})
    problem = build_problem(sec.child("problem"))
    mesh_params, solve_params, seed = _overridden(sec, args)
    mesh = mesh_params.build(problem)
    start = default_start(problem, mesh)
    x, rep = picard_solve(
        problem, start, tol=solve_params.tol, max_iter=solve_params.max_iter
    )
    os.makedirs(args.out, exist_ok=True)
    u = psi_images(problem.psi, mesh)
    xr = raw_values(problem.psi, x)
    rows = ["t,Psi_t,x_weighted,x_raw"]
    for i in range(mesh.n):
        rows.append(
            ",".join((_fmt(mesh.nodes[i]), _fmt(u[i]), _fmt(x.values[i]), _fmt(xr[i])))
        )
    _write(os.path.join(args.out, "solution.csv"), rows)
    pairs = [
        ("command", "solve"),
        ("seed", seed),
        ("backend", backend_name()),
        ("mesh_n", mesh.n),
        ("grading", _fmt(mesh.r)),
        ("tol", _fmt(solve_params.tol)),
        ("converged", rep.converged),
        ("iterations", rep.iterates),
        ("q_theoretical", _fmt(rep.q_theoretical)),
        ("q_coarse", _fmt(rep.q_coarse)),
        ("q_empirical_max", _fmt(max(rep.q_empirical) if rep.q_empirical else 0.0)),
        ("c_constant", _fmt(rep.c_constant) if rep.c_constant is not None else "undefined"),
        ("residual", _fmt(rep.residual)),
        ("apost_bound", _fmt(rep.apost_bound)),
        ("apost_bound_coarse", _fmt(rep.apost_bound_coarse)),
        ("last_update", _fmt(rep.last_update)),
    ]
    for w in rep.warnings:
        pairs.append(("warning", w))
    _write(os.path.join(args.out, "report.txt"), _report_lines(pairs))
    return 0 if rep.converged else 3


# --------------------------------------------------------------------------
# verify

def _verify_identity(sec: Section, mesh_params, seed: int):
    body = sec.child("identity")
    body.require_keys({"psi", "mu", "xi", "a", "b", "points", "tolerance"})
    psi = build_psi(body)
    mu = body.scalar("mu", float)
    xi = body.scalar("xi", float)
    a = body.scalar("a", float, required=False, default=0.0)
    b = body.scalar("b", float, required=False, default=1.0)
    points = body.float_list("points") if body.has("points") else [0.25, 0.5, 1.0]
    tolerance = body.scalar("tolerance", float, required=False, default=1e-4)
    grading = mesh_params.grading if mesh_params.grading is not None else 2.0
    mesh = GradedMesh(a, b, mesh_params.n, grading)
    rep = ml_integral_identity_check(psi, mu, xi, mesh, points)
    passed = rep.worst <= tolerance
    pairs = [
        ("check", "identity"),
        ("passed", passed),
        ("seed", seed),
        ("mesh_n", mesh.n),
        ("grading", _fmt(mesh.r)),
        ("tolerance", _fmt(tolerance)),
        ("worst_defect", _fmt(rep.worst)),
    ]
    for t, dfc in zip(rep.points, rep.defects):
        pairs.append((f"defect_at_{_fmt(t)}", _fmt(dfc)))
    return passed, pairs


def _verify_inversion(sec: Section, mesh_params, seed: int):
    body = sec.child("inversion")
    body.require_keys({"psi", "mu", "nu", "a", "b", "function", "tolerance"})
    psi = build_psi(body)
    order = FracOrder(body.scalar("mu", float), body.scalar("nu", float))
    a = body.scalar("a", float, required=False, default=0.0)
    b = body.scalar("b", float, required=False, default=1.0)
    which = body.scalar("function", str, choices=("one", "psi_increment"))
    tolerance = body.scalar("tolerance", float, required=False, default=1e-3)
    grading = mesh_params.grading
    if grading is None:
        grading = default_grading(order.eps)
    mesh = GradedMesh(a, b, mesh_params.n, grading)
    sup = inversion_identity_check(psi, order, mesh, which)
    passed = sup <= tolerance
    pairs = [
        ("check", "inversion"),
        ("passed", passed),
        ("seed", seed),
        ("mesh_n", mesh.n),
        ("grading", _fmt(mesh.r)),
        ("function", which),
        ("tolerance", _fmt(tolerance)),
        ("sup_defect", _fmt(sup)),
    ]
    return passed, pairs


def _verify_caplygin(sec: Section, mesh_params, solve_params, seed: int):
    problem = build_problem(sec.child("problem"))
    sub = sec.child("subsolution")
    sub.require_keys({"x0", "rhs_shift"})
    x0 = sub.scalar("x0", float, required=False, default=problem.x0)
    shift = sub.scalar("rhs_shift", float, required=False, default=0.0)
    base_f = problem.f
    f_sub = RHSFunction(
        lambda t, u: np.asarray(base_f.f(t, u), dtype=float) + shift,
        base_f.lipschitz,
        base_f.monotone_in_u,
        f"{base_f.label}{shift:+g}",
    )
    p_sub = ProblemSpec(
        problem.psi, problem.order, problem.a, problem.b, x0, f_sub,
        problem.U, problem.xi,
    )
    grading = mesh_params.grading if mesh_params.grading is not None else 4.0
    mesh = GradedMesh(problem.a, problem.b, mesh_params.n, grading)
    y, _ = picard_solve(
        p_sub, default_start(p_sub, mesh),
        tol=solve_params.tol, max_iter=solve_params.max_iter,
    )
    rep = check_caplygin(
        problem, y, tol=solve_params.tol, max_iter=solve_params.max_iter, seed=seed
    )
    pairs = [
        ("check", "caplygin"),
        ("passed", rep.passed),
        ("seed", seed),
        ("mesh_n", mesh.n),
        ("grading", _fmt(mesh.r)),
        ("subsolution_x0", _fmt(x0)),
        ("subsolution_rhs_shift", _fmt(shift)),
        ("worst_violation", _fmt(rep.worst_violation)),
        ("slack", _fmt(rep.slack)),
        ("boundary_layer", _fmt(rep.layer_cut)),
    ]
    return rep.passed, pairs


def _verify_comparison(sec: Section, mesh_params, solve_params, seed: int):
    problems = [build_problem(s) for s in sec.children("problems")]
    if len(problems) != 3:
        raise ConfigError("comparison needs exactly three problems", sec._loc("problems"))
    rng_range = (-5.0, 5.0)
    if sec.has("state_range"):
        bounds = sec.float_list("state_range")
        if len(bounds) != 2 or bounds[0] >= bounds[1]:
            raise ConfigError(
                "state_range must be [lo, hi] with lo < hi", sec._loc("state_range")
            )
        rng_range = (bounds[0], bounds[1])
    rep = check_comparison(
        *problems, n=mesh_params.n, tol=solve_params.tol,
        max_iter=solve_params.max_iter, seed=seed, state_range=rng_range,
    )
    pairs = [
        ("check", "comparison"),
        ("passed", rep.passed),
        ("seed", seed),
        ("mesh_n", mesh_params.n),
        ("state_range", f"[{_fmt(rng_range[0])}, {_fmt(rng_range[1])}]"),
        ("worst_lower_violation", _fmt(rep.worst_lower)),
        ("worst_upper_violation", _fmt(rep.worst_upper)),
        ("slack", _fmt(rep.slack)),
        ("boundary_layer", _fmt(rep.layer_cut)),
    ]
    return rep.passed, pairs


def _verify_data_dep(sec: Section, mesh_params, solve_params, seed: int):
    problems = [build_problem(s) for s in sec.children("problems")]
    if len(problems) != 2:
        raise ConfigError("data_dep needs exactly two problems", sec._loc("problems"))
    pert_sec = sec.child("perturbation")
    pert_sec.require_keys({"eta1", "eta2", "eta3"})
    pert = PerturbationSpec(
        pert_sec.scalar("eta1", float, required=False, default=0.0),
        pert_sec.scalar("eta2", float, required=False, default=0.0),
        pert_sec.scalar("eta3", float, required=False, default=0.0),
    )
    rep = data_dependence_bound(
        problems[0], problems[1], pert, n=mesh_params.n,
        tol=solve_params.tol, max_iter=solve_params.max_iter, seed=seed,
    )
    pairs = [
        ("check", "data_dep"),
        ("passed", rep.holds),
        ("seed", seed),
        ("mesh_n", mesh_params.n),
        ("lhs_distance", _fmt(rep.lhs)),
        ("rhs_bound", _fmt(rep.rhs)),
        ("slack", _fmt(rep.slack)),
    ]
    if rep.note:
        pairs.append(("note", rep.note))
    return rep.holds, pairs


def _verify_hausdorff(sec: Section, mesh_params, solve_params, seed: int):
    problems = [build_problem(s) for s in sec.children("problems")]
    if len(problems) != 2:
        raise ConfigError("hausdorff needs exactly two problems", sec._loc("problems"))
    data_set = sec.float_list("data_set")
    eta_u = sec.scalar("eta_U", float, required=False, default=0.0)
    eta_f = sec.scalar("eta_f", float, required=False, default=0.0)
    rep = hausdorff_bound(
        problems[0], problems[1], data_set, eta_u, eta_f,
        n=mesh_params.n, tol=solve_params.tol,
        max_iter=solve_params.max_iter, seed=seed,
    )
    pairs = [
        ("check", "hausdorff"),
        ("passed", rep.holds),
        ("seed", seed),
        ("mesh_n", mesh_params.n),
        ("family_size", rep.family_size),
        ("distance", _fmt(rep.distance)),
        ("bound", _fmt(rep.bound)),
        ("slack", _fmt(rep.slack)),
    ]
    return rep.holds, pairs


def cmd_verify(args) -> int:
    sec = root_section(args.config)
    which = args.which
    allowed = {
        "identity": {"identity", "mesh", "seed"},
        "inversion": {"inversion", "mesh", "seed"},
        "caplygin": {"problem", "subsolution", "mesh", "solve", "seed"},
        "comparison": {"problems", "state_range", "mesh", "solve", "seed"},
        "data_dep": {"problems", "perturbation", "mesh", "solve", "seed"},
        "hausdorff": {"problems", "data_set", "eta_U", "eta_f", "mesh", "solve", "seed"},
    }[which]
    sec.require_keys(allowed)
    mesh_params, solve_params, seed = _overridden(sec, args)
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, f"verify_{which}.txt")
    try:
        if which == "identity":
            passed, pairs = _verify_identity(sec, mesh_params, seed)
        elif which == "inversion":
            passed, pairs = _verify_inversion(sec, mesh_params, seed)
        elif which == "caplygin":
            passed, pairs = _verify_caplygin(sec, mesh_params, solve_params, seed)
        elif which == "comparison":
            passed, pairs = _verify_comparison(sec, mesh_params, solve_params, seed)
        elif which == "data_dep":
            passed, pairs = _verify_data_dep(sec, mesh_params, solve_params, seed)
        else:
            passed, pairs = _verify_hausdorff(sec, mesh_params, solve_params, seed)
    except HypothesisError as exc:
        _write(
            out_path,
            _report_lines(
                [
                    ("check", which),
                    ("passed", False),
                    ("hypothesis_failed", exc.condition),
                    ("detail", str(exc)),
                    ("seed", seed),
                ]
            ),
        )
        print(f"hypothesis failure [{exc.condition}]: {exc}", file=sys.stderr)
        return 2
    _write(out_path, _report_lines(pairs))
    print(f"{which}: {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 3


# --------------------------------------------------------------------------
# convergence table

def cmd_table(args) -> int:
    sec = root_section(args.config)
    sec.require_keys({"table", "seed"})
    body = sec.child("table")
    body.require_keys(
        {"target", "sizes", "psi", "mu", "k", "a", "b", "grading", "problem"}
    )
    target = body.scalar("target", str, choices=("power", "solve"))
    sizes = [int(v) for v in body.float_list("sizes")]
    if any(n < 8 for n in sizes) or len(sizes) < 2:
        raise ConfigError(
            "table.sizes needs at least two entries, each >= 8", body._loc("sizes")
        )
    sizes = sorted(sizes)
    seed = sec.scalar("seed", int, required=False, default=0)
    a = body.scalar("a", float, required=False, default=0.0)
    b = body.scalar("b", float, required=False, default=1.0)

    def power_value(n: int) -> float:
        psi = build_psi(body)
        mu = body.scalar("mu", float)
        k = body.scalar("k", int, required=False, default=2)
        grading = body.scalar("grading", float, required=False, default=4.0)
        mesh = GradedMesh(a, b, n, grading)
        u = psi_images(psi, mesh)
        d = u - u[0]
        x = GridFunction(mesh, d ** (k * mu), 0.0)
        return frac_integral(psi, mu, x, b)

    def solve_value(n: int) -> float:
        problem = build_problem(body.child("problem"))
        mesh = GradedMesh(problem.a, problem.b, n, default_grading(problem.order.eps))
        x, _ = picard_solve(problem, default_start(problem, mesh))
        return float(raw_values(problem.psi, x)[-1])

    value = power_value if target == "power" else solve_value
    finest = value(2 * sizes[-1])
    errors = [abs(value(n) - finest) for n in sizes]
    rows = ["n,error_vs_finest,observed_order"]
    prev = None
    for n, err in zip(sizes, errors):
        if prev is None or err == 0.0:
            order = ""
        else:
            order = _fmt(math.log2(prev / err)) if prev > 0 else ""
        rows.append(f"{n},{_fmt(err)},{order}")
        prev = err
    os.makedirs(args.out, exist_ok=True)
    _write(os.path.join(args.out, "convergence.csv"), rows)
    return 0


# --------------------------------------------------------------------------

def main(argv: Optional[list] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fracfde",
        description="Solve and verify fractional functional differential "
        "equations with causal operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--mesh-n", type=int, default=None, help="override mesh size")
        p.add_argument(
            "--grading", type=float, default=None, help="override mesh grading"
        )

    common(sub.add_parser("solve", help="run the fixed-point solver"))
    p_verify = sub.add_parser("verify", help="run one verification check")
    p_verify.add_argument("which", choices=_CHECKS)
    common(p_verify)
    common(sub.add_parser("table", help="mesh-convergence table"))

    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_table(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except HypothesisError as exc:
        print(f"hypothesis failure [{exc.condition}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
