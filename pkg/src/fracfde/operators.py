"""Causal (Volterra) operators, right-hand sides, and the proportional-delay
integral kernel used as the worked example.

Operators act on grid functions and must be causal: the value at t may
depend only on the history on [a, t]. Lipschitz constants are declared
by the instance (they are hypotheses, not derived quantities) and can be
spot-validated; causality is checked by randomized tail perturbation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .fracops import psi_images, raw_values, weight_matrix
from .mesh import GridFunction
from .psi import PsiMap
from .special import gamma


@dataclass(frozen=True, eq=False)
class RHSFunction:
    """Pointwise right-hand side f(t, u) with declared Lipschitz constant in u."""

    f: Callable
    lipschitz: float
    monotone_in_u: bool = False
    label: str = ""

    def __call__(self, t, u):
        return self.f(t, u)


@dataclass(frozen=True, eq=False)
class VolterraOperator:
    """A causal operator with declared history-sup Lipschitz constant.

    apply(x, t) evaluates at one mesh node; apply_all(x), when provided,
    evaluates at every node at once (entry 0 may be meaningless when x
    carries a boundary-layer weight; the solver replaces it).
    """

    apply: Callable
    lipschitz: float
    label: str
    increasing: Optional[bool] = None
    apply_all: Optional[Callable] = None

    def values_on_mesh(self, x: GridFunction) -> np.ndarray:
        if self.apply_all is not None:
            return np.asarray(self.apply_all(x), dtype=float)
        return np.array([self.apply(x, float(t)) for t in x.mesh.nodes])


@dataclass(frozen=True, eq=False)
class PantographKernel:
    """Integral kernel A(t, s, x(s), x(lam*s)) under the weakly singular weight.

    lipschitz_A bounds |A(t,s,u1,u2) - A(t,s,v1,v2)| by
    lipschitz_A * (|u1-v1| + |u2-v2|).
    """

    lam: float
    A: Callable
    lipschitz_A: float
    mu: float
    psi: PsiMap
    increasing: bool = False
    label: str = "pantograph"

    def __post_init__(self):
        if not (0.0 < self.lam < 1.0):
            raise DomainError(f"delay ratio must lie in (0, 1), got {self.lam}")
        if not (0.0 < self.mu <= 1.0):
            raise DomainError(f"mu must lie in (0, 1], got {self.mu}")


def interp_at(psi: PsiMap, x: GridFunction, s) -> np.ndarray:
    """Raw values of x at off-mesh points by linear interpolation of the
    stored (compensated) values in the transformed variable."""
    u = psi_images(psi, x.mesh)
    us = np.asarray(psi.psi(np.asarray(s, dtype=float)), dtype=float)
    z = np.interp(us, u, x.values)
    if not x.is_weighted:
        return z
    d = us - u[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(
            d > 0.0,
            z * d ** (-x.weight_exponent),
            np.where(z == 0.0, 0.0, np.inf * np.sign(z)),
        )
    return out


def _integrand_rows(k: PantographKernel, x: GridFunction) -> np.ndarray:
    """Matrix A(t_i, s_j, x(s_j), x(lam s_j)) over the mesh."""
    mesh = x.mesh
    t = mesh.nodes
    xr = raw_values(k.psi, x)
    xl = interp_at(k.psi, x, k.lam * t)
    if x.is_weighted:
        # endpoint raw values are unbounded; rows never use column 0 raw
        xr = xr.copy()
        xr[0] = 0.0
        xl = xl.copy()
        if not np.isfinite(xl[0]):
            xl[0] = 0.0
    return np.asarray(k.A(t[:, None], t[None, :], xr[None, :], xl[None, :]), dtype=float)


def pantograph_apply(k: PantographKernel, x: GridFunction, t: float) -> float:
    """Quadrature of the delayed-kernel integral at one mesh node."""
    mesh = x.mesh
    i = mesh.index_of(t)
    if i == 0:
        return 0.0
    u = psi_images(k.psi, mesh)
    s = mesh.nodes[: i + 1]
    xr = raw_values(k.psi, x)[: i + 1]
    xl = interp_at(k.psi, x, k.lam * s)
    if x.is_weighted:
        xr[0] = 0.0
        if not np.isfinite(xl[0]):
            xl[0] = 0.0
    vals = np.asarray(k.A(t, s, xr, xl), dtype=float)
    we = x.weight_exponent
    row = weight_matrix(u, k.mu, we)[i]
    if we > 0.0:
        d = u - u[0]
        zeta = np.zeros(mesh.n)
        zeta[1 : i + 1] = d[1 : i + 1] ** we * vals[1:]
        # causality: the endpoint extrapolation may only read history <= t
        if i >= 2:
            zeta[0] = zeta[1] - d[1] * (zeta[2] - zeta[1]) / (d[2] - d[1])
        else:
            zeta[0] = zeta[1]
        return float(row @ zeta)
    full = np.zeros(mesh.n)
    full[: i + 1] = vals
    return float(row @ full)


def pantograph_apply_all(k: PantographKernel, x: GridFunction) -> np.ndarray:
    """Quadrature of the delayed-kernel integral at every mesh node."""
    mesh = x.mesh
    u = psi_images(k.psi, mesh)
    A = _integrand_rows(k, x)
    we = x.weight_exponent
    W = weight_matrix(u, k.mu, we)
    if we > 0.0:
        d = u - u[0]
        Z = A * (d**we)[None, :]
        Z[:, 0] = Z[:, 1] - d[1] * (Z[:, 2] - Z[:, 1]) / (d[2] - d[1])
        if mesh.n > 1:
            # row 1 may only read history <= t_1
            Z[1, 0] = Z[1, 1]
        return np.einsum("ij,ij->i", W, Z)
    return np.einsum("ij,ij->i", W, A)


def pantograph_operator(k: PantographKernel, a: float, b: float) -> VolterraOperator:
    """Wrap the kernel as a causal operator with its contraction-grade
    Lipschitz constant 2 L_A (psi(b)-psi(a))^mu / Gamma(mu+1)."""
    span = float(k.psi.psi(b) - k.psi.psi(a))
    lip = 2.0 * k.lipschitz_A * span**k.mu / gamma(k.mu + 1.0)
    return VolterraOperator(
        apply=lambda x, t: pantograph_apply(k, x, t),
        lipschitz=lip,
        label=k.label,
        increasing=k.increasing if k.increasing else None,
        apply_all=lambda x: pantograph_apply_all(k, x),
    )


def zero_operator() -> VolterraOperator:
    return VolterraOperator(
        apply=lambda x, t: 0.0,
        lipschitz=0.0,
        label="zero",
        increasing=True,
        apply_all=lambda x: np.zeros(x.mesh.n),
    )


def delay_operator(
    psi: PsiMap,
    g: Callable,
    rho: float,
    lipschitz: float,
    increasing: Optional[bool] = None,
    label: str = "delay",
) -> VolterraOperator:
    """Proportional-delay composition operator g(t) x(rho t).

    Causal for rho in (0, 1]; Lipschitz in the history sup with constant
    sup |g| (declared by the caller).
    """
    if not (0.0 < rho <= 1.0):
        raise DomainError(f"delay ratio must lie in (0, 1], got {rho}")

    def apply(x: GridFunction, t: float) -> float:
        return float(g(t)) * float(interp_at(psi, x, rho * t))

    def apply_all(x: GridFunction) -> np.ndarray:
        t = x.mesh.nodes
        vals = np.asarray(g(t), dtype=float) * interp_at(psi, x, rho * t)
        if x.is_weighted and not np.isfinite(vals[0]):
            vals = vals.copy()
            vals[0] = 0.0
        return vals

    return VolterraOperator(apply, lipschitz, label, increasing, apply_all)


def shifted_operator(op: VolterraOperator, offset: float) -> VolterraOperator:
    """op + constant offset; same Lipschitz constant, monotonicity preserved."""
    return VolterraOperator(
        apply=lambda x, t: op.apply(x, t) + offset,
        lipschitz=op.lipschitz,
        label=f"{op.label}+{offset:g}",
        increasing=op.increasing,
        apply_all=(
            None
            if op.apply_all is None
            else lambda x: np.asarray(op.apply_all(x), dtype=float) + offset
        ),
    )


@dataclass(frozen=True)
class CausalityReport:
    passed: bool
    max_violation: float
    trials: int
    t: float
    label: str


def causality_check(
    op: VolterraOperator,
    x: GridFunction,
    t: float,
    trials: int = 16,
    seed: int = 0,
) -> CausalityReport:
    """Randomized check that op(x)(t) ignores the future of x.

    Perturbs the stored values strictly beyond t and reports the largest
    change in op(x)(t); machine-level agreement passes.
    """
    mesh = x.mesh
    i = mesh.index_of(t)
    if i >= mesh.n - 1:
        raise DomainError("choose an interior node so a future exists to perturb")
    rng = np.random.default_rng(seed)
    base = float(op.apply(x, t))
    scale = 1.0 + float(np.max(np.abs(x.values)))
    worst = 0.0
    for _ in range(trials):
        bump = np.zeros(mesh.n)
        bump[i + 1 :] = rng.standard_normal(mesh.n - i - 1) * scale
        perturbed = x.with_values(x.values + bump)
        worst = max(worst, abs(float(op.apply(perturbed, t)) - base))
    passed = worst <= 1e-10 * (1.0 + abs(base) + scale)
    return CausalityReport(passed, worst, trials, t, op.label)


@dataclass(frozen=True)
class ConditionDReport:
    printed_value: float
    printed_holds: bool
    standard_value: float
    standard_holds: bool


def check_condition_D(
    k: PantographKernel,
    rhs: RHSFunction,
    xi: float,
    a: float = 0.0,
    b: float = 1.0,
) -> ConditionDReport:
    """Smallness condition of the worked example, both readings.

    The printed inequality contains a bracket 1/xi - span^mu/Gamma(mu+1)
    that can go negative, which makes it weaker than the contraction
    estimate it is presumably meant to imply; both the literal value and
    the contraction-style value (L_f + L_op)/xi are reported side by
    side so the discrepancy is never silently corrected.
    """
    if not xi > 0.0:
        raise DomainError(f"xi must be positive, got {xi}")
    span = float(k.psi.psi(b) - k.psi.psi(a))
    moment = span**k.mu / gamma(k.mu + 1.0)
    printed = rhs.lipschitz / xi + (2.0 * k.lipschitz_A / xi) * (1.0 / xi - moment)
    standard = (rhs.lipschitz + 2.0 * k.lipschitz_A * moment) / xi
    return ConditionDReport(printed, printed < 1.0, standard, standard < 1.0)


@dataclass(frozen=True)
class LipschitzReport:
    declared: float
    worst_observed: float
    passed: bool


def sample_rhs_lipschitz(
    rhs: RHSFunction,
    t_range: tuple,
    u_range: tuple,
    trials: int = 64,
    seed: int = 0,
) -> LipschitzReport:
    """Spot-validate the declared Lipschitz constant of f(t, .)."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(*t_range, trials)
    u1 = rng.uniform(*u_range, trials)
    u2 = rng.uniform(*u_range, trials)
    keep = np.abs(u1 - u2) > 1e-9
    t, u1, u2 = t[keep], u1[keep], u2[keep]
    f1 = np.asarray(rhs.f(t, u1), dtype=float)
    f2 = np.asarray(rhs.f(t, u2), dtype=float)
    ratio = np.abs(f1 - f2) / np.abs(u1 - u2)
    worst = float(ratio.max()) if ratio.size else 0.0
    return LipschitzReport(rhs.lipschitz, worst, worst <= rhs.lipschitz * (1 + 1e-9))
