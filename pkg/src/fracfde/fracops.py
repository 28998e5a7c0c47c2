"""Fractional integral and derivative machinery in psi coordinates.

Everything is built in the transformed variable u = psi(t). The integral
operator of order s with respect to psi reduces there to the classical
left-sided weakly singular convolution, discretized by product
integration: the non-singular factor of the integrand is interpolated
piecewise-linearly between node images and each panel is integrated
against the kernel in closed form.

For a compensated GridFunction (weight exponent w > 0) the interpolated
factor is the stored z, and the panel moments carry the extra algebraic
factor (u - u_a)^(-w); those moments are incomplete-beta integrals. The
rule is therefore exact whenever z is linear in psi(t) - psi(a), which is
the natural regularity class of the compensated representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc
from scipy.special import beta as beta_fn

from . import backend
from .errors import DomainError, ResolutionError, SingularityError
from .mesh import GradedMesh, GridFunction
from .psi import PsiMap
from .special import gamma

_EXP_TOL = 1e-12
_ROW_BLOCK = 256


@dataclass(frozen=True)
class FracOrder:
    """Order/type pair (mu, nu) with the derived exponent eps.

    eps = mu + nu (1 - mu) governs the initial-condition weight: solutions
    carry a (psi(t)-psi(a))^(eps-1) boundary factor.
    """

    mu: float
    nu: float
    eps: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.mu <= 1.0):
            raise DomainError(f"mu must lie in (0, 1], got {self.mu}")
        if not (0.0 <= self.nu <= 1.0):
            raise DomainError(f"nu must lie in [0, 1], got {self.nu}")
        object.__setattr__(self, "eps", self.mu + self.nu * (1.0 - self.mu))

    @property
    def inner_order(self) -> float:
        """Order of the inner smoothing integral, (1-nu)(1-mu)."""
        return (1.0 - self.nu) * (1.0 - self.mu)

    @property
    def outer_order(self) -> float:
        """Order of the outer integral, nu (1-mu)."""
        return self.nu * (1.0 - self.mu)


# --------------------------------------------------------------------------
# caches: node images and quadrature weight matrices

_image_cache: dict = {}
_matrix_cache: dict = {}
_MAX_CACHE = 64


def psi_images(psi: PsiMap, mesh: GradedMesh) -> np.ndarray:
    """psi evaluated on the mesh nodes (cached per psi/mesh pair)."""
    key = (id(psi), id(mesh))
    hit = _image_cache.get(key)
    if hit is not None and hit[0] is psi and hit[1] is mesh:
        return hit[2]
    u = np.asarray(psi.psi(mesh.nodes), dtype=float)
    if not np.all(np.diff(u) > 0.0):
        raise DomainError(f"psi {psi.label!r} is not increasing on the mesh")
    u.setflags(write=False)
    if len(_image_cache) >= _MAX_CACHE:
        _image_cache.clear()
    _image_cache[key] = (psi, mesh, u)
    return u


def weight_matrix(u: np.ndarray, order: float, weight_exponent: float = 0.0) -> np.ndarray:
    """Quadrature weight matrix for the transformed-variable integral.

    Acts on stored GridFunction values: raw samples when weight_exponent
    is zero, compensated z values otherwise.
    """
    key = (u.tobytes(), float(order), float(weight_exponent))
    W = _matrix_cache.get(key)
    if W is None:
        if weight_exponent == 0.0:
            W = backend.pi_weight_matrix(u, order)
        else:
            W = _weighted_weight_matrix(u, order, weight_exponent)
        W.setflags(write=False)
        if len(_matrix_cache) >= _MAX_CACHE:
            _matrix_cache.clear()
        _matrix_cache[key] = W
    return W


def _weighted_weight_matrix(u: np.ndarray, order: float, we: float) -> np.ndarray:
    """Weights acting on z where the integrand is z(u) (u-u_a)^(-we).

    Panel moments of (T-u)^(order-1) (u-u_a)^(-we) {1, u-u_j} reduce to
    incomplete-beta integrals after rescaling to [0, 1].
    """
    u = np.ascontiguousarray(u, dtype=float)
    n = u.size
    d = u - u[0]
    h = np.diff(u)
    c = 1.0 - we
    inv_g = 1.0 / math.gamma(order)
    b0 = beta_fn(c, order)
    b1 = beta_fn(c + 1.0, order)
    W = np.zeros((n, n))
    for lo in range(1, n, _ROW_BLOCK):
        hi = min(lo + _ROW_BLOCK, n)
        D = d[lo:hi, None]
        tau = np.clip(d[None, :] / D, 0.0, 1.0)
        # cumulative integrals from u_a to u_j of the two moment kernels
        I0 = b0 * betainc(c, order, tau) * D ** (order + c - 1.0)
        IA = b1 * betainc(c + 1.0, order, tau) * D ** (order + c)
        m0 = I0[:, 1:] - I0[:, :-1]
        mA = IA[:, 1:] - IA[:, :-1]
        m1 = mA - d[:-1][None, :] * m0
        s = m1 / h
        W[lo:hi, :-1] += (m0 - s) * inv_g
        W[lo:hi, 1:] += s * inv_g
    return W


def _weighted_weight_row(u: np.ndarray, order: float, we: float, i: int) -> np.ndarray:
    """Single row of the compensated weight matrix."""
    n = u.size
    w = np.zeros(n)
    if i <= 0:
        return w
    d = u - u[0]
    h = np.diff(u[: i + 1])
    c = 1.0 - we
    tau = d[: i + 1] / d[i]
    tau[-1] = 1.0
    I0 = beta_fn(c, order) * betainc(c, order, tau) * d[i] ** (order + c - 1.0)
    IA = beta_fn(c + 1.0, order) * betainc(c + 1.0, order, tau) * d[i] ** (order + c)
    m0 = np.diff(I0)
    mA = np.diff(IA)
    m1 = mA - d[:i] * m0
    s = m1 / h
    inv_g = 1.0 / math.gamma(order)
    w[:i] += (m0 - s) * inv_g
    w[1 : i + 1] += s * inv_g
    return w


# --------------------------------------------------------------------------
# pointwise operations

def kernel(psi: PsiMap, mu: float, t: float, s: float) -> float:
    """Weakly singular kernel psi'(s) (psi(t) - psi(s))^(mu-1)."""
    _check_order(mu)
    if not s < t:
        raise DomainError(f"kernel requires s < t, got s={s}, t={t}")
    return float(psi.psi_prime(s)) * float(psi.psi(t) - psi.psi(s)) ** (mu - 1.0)


def resolvent(psi: PsiMap, order: FracOrder, t: float, a: float) -> float:
    """Boundary-layer factor (psi(t)-psi(a))^(eps-1) / Gamma(eps)."""
    return resolvent_eps(psi, order.eps, t, a)


def resolvent_eps(psi: PsiMap, eps: float, t: float, a: float) -> float:
    if t < a:
        raise DomainError(f"resolvent requires t >= a, got t={t}, a={a}")
    du = float(psi.psi(t) - psi.psi(a))
    if du <= 0.0:
        if eps >= 1.0 - _EXP_TOL:
            return 1.0 / gamma(eps)
        raise SingularityError(
            "resolvent is singular at t = a for eps < 1; use the "
            "compensated representation"
        )
    return du ** (eps - 1.0) / gamma(eps)


def _check_order(order: float):
    if not (0.0 < order <= 1.0):
        raise DomainError(f"integral order must lie in (0, 1], got {order}")


def raw_values(psi: PsiMap, x: GridFunction) -> np.ndarray:
    """Reconstruct raw samples from the stored representation.

    At the left endpoint a compensated function with nonzero limit maps to
    +-inf; a vanishing compensated limit maps to 0 (the stored z decays at
    least as fast as the weight grows for every representation produced
    here).
    """
    if not x.is_weighted:
        return x.values.copy()
    u = psi_images(psi, x.mesh)
    d = u - u[0]
    out = np.empty_like(x.values)
    out[1:] = x.values[1:] * d[1:] ** (-x.weight_exponent)
    z0 = x.values[0]
    out[0] = 0.0 if z0 == 0.0 else math.copysign(math.inf, z0)
    return out


# --------------------------------------------------------------------------
# the fractional integral

def frac_integral_grid(psi: PsiMap, order: float, x: GridFunction) -> GridFunction:
    """Integral of order `order` of x, sampled on the whole mesh.

    The output representation follows the exponent bookkeeping: a
    compensated input with weight w yields a compensated output with
    weight w - order while that stays positive, and a raw output (with
    the correct left-endpoint limit) otherwise.
    """
    _check_order(order)
    mesh = x.mesh
    u = psi_images(psi, mesh)
    W = weight_matrix(u, order, x.weight_exponent)
    vals = W @ x.values
    we = x.weight_exponent
    if we == 0.0:
        vals[0] = 0.0
        return GridFunction(mesh, vals, 0.0)
    d = u - u[0]
    gap = we - order
    if gap > _EXP_TOL:
        z = np.empty_like(vals)
        z[1:] = d[1:] ** gap * vals[1:]
        z[0] = x.values[0] * gamma(1.0 - we) / gamma(1.0 - we + order)
        return GridFunction(mesh, z, gap)
    if gap >= -_EXP_TOL:
        vals[0] = x.values[0] * gamma(1.0 - we)
    else:
        vals[0] = 0.0
    return GridFunction(mesh, vals, 0.0)


def frac_integral(psi: PsiMap, order: float, x: GridFunction, t: float) -> float:
    """Integral of order `order` of x, evaluated at one mesh node."""
    _check_order(order)
    i = x.mesh.index_of(t)
    if i == 0:
        return frac_integral_at_left(psi, order, x)
    u = psi_images(psi, x.mesh)
    if x.weight_exponent == 0.0:
        row = backend.pi_weight_row(u, order, i)
    else:
        row = _weighted_weight_row(u, order, x.weight_exponent, i)
    return float(row @ x.values)


def frac_integral_at_left(psi: PsiMap, order: float, x: GridFunction) -> float:
    """Limit of the order-`order` integral of x at the left endpoint.

    Finite exactly when the input's singularity is no stronger than the
    smoothing order; the boundary case order == weight reproduces the
    Gamma-ratio limit used to read off initial data.
    """
    we = x.weight_exponent
    if order == 0.0:
        if we == 0.0:
            return float(x.values[0])
        raise SingularityError("raw limit of a compensated function at t = a")
    _check_order(order)
    if we < order - _EXP_TOL:
        return 0.0
    if we <= order + _EXP_TOL:
        return float(x.values[0]) * gamma(1.0 - we)
    raise SingularityError(
        f"integral of order {order} cannot absorb weight exponent {we}"
    )


# --------------------------------------------------------------------------
# derivatives

def d_du(u: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """First derivative with respect to u on a nonuniform grid.

    Three-point formulas, exact for quadratics; one-sided at both ends.
    """
    n = vals.size
    if n < 3:
        raise ResolutionError("need at least 3 nodes for differentiation")
    out = np.empty(n)
    h1 = u[1:-1] - u[:-2]
    h2 = u[2:] - u[1:-1]
    out[1:-1] = (
        -h2 / (h1 * (h1 + h2)) * vals[:-2]
        + (h2 - h1) / (h1 * h2) * vals[1:-1]
        + h1 / (h2 * (h1 + h2)) * vals[2:]
    )
    a1 = u[1] - u[0]
    a2 = u[2] - u[1]
    out[0] = (
        -(2 * a1 + a2) / (a1 * (a1 + a2)) * vals[0]
        + (a1 + a2) / (a1 * a2) * vals[1]
        - a1 / (a2 * (a1 + a2)) * vals[2]
    )
    b1 = u[-2] - u[-3]
    b2 = u[-1] - u[-2]
    out[-1] = (
        b2 / (b1 * (b1 + b2)) * vals[-3]
        - (b1 + b2) / (b1 * b2) * vals[-2]
        + (b1 + 2 * b2) / (b2 * (b1 + b2)) * vals[-1]
    )
    return out


def _log_power_fit(d: np.ndarray, vals: np.ndarray, p_min: float, p_max: float):
    """Least-squares fit vals ~ C d^p over the first few interior nodes.

    Returns (C, p) or None when the data does not look like a clean power
    there (sign changes, zeros, or poor fit quality).
    """
    n = vals.size
    hi = min(9, n // 4 + 2)
    window = vals[1:hi]
    dw = d[1:hi]
    if window.size < 3 or not np.all(np.isfinite(window)):
        return None
    if not (np.all(window > 0.0) or np.all(window < 0.0)):
        return None
    sign = 1.0 if window[0] > 0 else -1.0
    ly = np.log(np.abs(window))
    lx = np.log(dw)
    lxm = lx - lx.mean()
    denom = float(lxm @ lxm)
    if denom <= 0.0:
        return None
    p = float(lxm @ (ly - ly.mean())) / denom
    p = float(np.clip(p, p_min, p_max))
    lc = float(ly.mean() - p * lx.mean())
    if lc > 300.0:
        return None
    C = sign * math.exp(lc)
    model = C * dw**p
    rel = np.abs(model - window) / np.maximum(np.abs(window), 1e-300)
    if float(rel.max()) > 0.25:
        return None
    return C, p


def _derivative_model(d: np.ndarray, v: np.ndarray, antiderivative):
    """Power model C d^p for a derivative sample near the left endpoint.

    Differenced data is unreliable exactly where the model matters, so the
    fit is taken on the antiderivative (which the quadrature produced to
    full relative accuracy) and differentiated analytically: y ~ A d^q
    with y(a) = 0 gives v ~ A q d^(q-1). Falls back to fitting v itself
    when no antiderivative is supplied.
    """
    if antiderivative is not None:
        fit = _log_power_fit(d, antiderivative, 0.05, 3.0)
        if fit is None:
            return None
        A, q = fit
        return A * q, q - 1.0
    return _log_power_fit(d, v, -0.95, 3.0)


def _classify_sample(
    mesh: GradedMesh, d: np.ndarray, v: np.ndarray, antiderivative=None
) -> GridFunction:
    """Wrap a derivative sample (possibly power-singular at a) as a GridFunction."""
    fit = _derivative_model(d, v, antiderivative)
    if fit is not None:
        C, p = fit
        if p < -_EXP_TOL:
            we = -p
            z = np.empty_like(v)
            z[1:] = d[1:] ** we * v[1:]
            z[0] = C
            return GridFunction(mesh, z, we)
        vals = v.copy()
        vals[0] = C if abs(p) <= _EXP_TOL else 0.0
        return GridFunction(mesh, vals, 0.0)
    vals = v.copy()
    vals[0] = _extrapolate_left(d, v)
    return GridFunction(mesh, vals, 0.0)


def _extrapolate_left(d: np.ndarray, v: np.ndarray) -> float:
    """Linear-in-u extrapolation of interior samples to the left endpoint."""
    return float(v[1] - d[1] * (v[2] - v[1]) / (d[2] - d[1]))


def integral_of_derivative(
    psi: PsiMap, mesh: GradedMesh, order: float, v: np.ndarray, antiderivative=None
) -> GridFunction:
    """Apply the order-`order` integral to a derivative sample v.

    v may carry an algebraic singularity at the left endpoint (its node-0
    entry is ignored). A fitted power model C d^p is integrated in closed
    form and only the remainder goes through the piecewise-linear rule,
    which keeps the boundary panel accurate without classifying v by hand.
    When the antiderivative (of v) is supplied the model is fitted on
    that, far more robustly than on differenced data.
    """
    u = psi_images(psi, mesh)
    d = u - u[0]
    if order == 0.0:
        return _classify_sample(mesh, d, v, antiderivative)
    _check_order(order)
    fit = _derivative_model(d, v, antiderivative)
    W = weight_matrix(u, order, 0.0)
    if fit is None:
        vals = v.copy()
        vals[0] = _extrapolate_left(d, v)
        out = W @ vals
        out[0] = 0.0
        return GridFunction(mesh, out, 0.0)
    C, p = fit
    rem = np.empty_like(v)
    rem[1:] = v[1:] - C * d[1:] ** p
    rem[0] = 0.0
    out = W @ rem
    coef = C * gamma(p + 1.0) / gamma(p + 1.0 + order)
    q = p + order
    if q < -_EXP_TOL:
        we = -q
        z = np.empty_like(out)
        z[1:] = coef + d[1:] ** we * out[1:]
        z[0] = coef
        return GridFunction(mesh, z, we)
    vals = coef * d**q + out
    vals[0] = coef if abs(q) <= _EXP_TOL else 0.0
    return GridFunction(mesh, vals, 0.0)


def hilfer_derivative(psi: PsiMap, order: FracOrder, x: GridFunction) -> GridFunction:
    """Two-parameter fractional derivative of order mu and type nu.

    The constant (or compensated-constant) part of x is differentiated
    analytically; for the remainder, which vanishes at the left endpoint,
    the derivative reduces to an order-(1-mu) integral of its first
    u-derivative, taken through the composed inner-integral route when the
    input carries the solution-class boundary layer.

    Supports raw inputs (smooth enough for finite differences) and
    compensated inputs whose weight matches the inner smoothing order,
    which is the class produced by the fixed-point machinery.
    """
    mesh = x.mesh
    if mesh.n < 32:
        raise ResolutionError(
            f"mesh with n = {mesh.n} is too coarse for differentiation (need >= 32)"
        )
    mu = order.mu
    delta = order.inner_order
    sig = order.outer_order
    u = psi_images(psi, mesh)
    d = u - u[0]
    we = x.weight_exponent
    if we == 0.0:
        xa = float(x.values[0])
        y = x.values - xa
        dy = d_du(u, y)
        if mu == 1.0:
            return GridFunction(mesh, dy, 0.0)
        numeric = integral_of_derivative(psi, mesh, 1.0 - mu, dy, antiderivative=y)
        if delta > _EXP_TOL and xa != 0.0:
            # derivative of the constant part: xa d^(-mu) / Gamma(1-mu),
            # present for every type except the one annihilating constants
            coef = xa / gamma(1.0 - mu)
            if numeric.is_weighted:
                raise DomainError("unexpected singular numeric part for raw input")
            z = np.empty(mesh.n)
            z[1:] = coef + d[1:] ** mu * numeric.values[1:]
            z[0] = coef
            return GridFunction(mesh, z, mu)
        return numeric
    if abs(we - delta) <= _EXP_TOL:
        # solution class: the compensated-constant part is exactly the
        # kernel of the operator, so only the shifted remainder survives
        za = float(x.values[0])
        ygrid = GridFunction(mesh, x.values - za, we)
        wgrid = frac_integral_grid(psi, delta, ygrid)
        dw = d_du(u, wgrid.values)
        return integral_of_derivative(psi, mesh, sig, dw, antiderivative=wgrid.values)
    raise DomainError(
        f"weight exponent {we} is not differentiable here: expected 0 or "
        f"the inner smoothing order {delta}"
    )


# --------------------------------------------------------------------------
# inversion identities as checkable defects

def inversion_defect(psi: PsiMap, order: FracOrder, x: GridFunction) -> GridFunction:
    """Defect of the integral-then-derivative inversion identity.

    Computes I^mu D^(mu,nu) x minus (x - R_eps(t, a) * L) where L is the
    left-endpoint limit of the order-(1-eps) integral of x. Zero for exact
    arithmetic; mesh-sized for the discretization.
    """
    mesh = x.mesh
    u = psi_images(psi, mesh)
    d = u - u[0]
    eps = order.eps
    D = hilfer_derivative(psi, order, x)
    IDx = frac_integral_grid(psi, order.mu, D)
    L = frac_integral_at_left(psi, 1.0 - eps, x) if eps < 1.0 - _EXP_TOL else float(
        x.values[0] if not x.is_weighted else x.values[0] * gamma(eps)
    )
    idx_raw = raw_values(psi, IDx)
    x_raw = raw_values(psi, x)
    defect = np.empty(mesh.n)
    if eps >= 1.0 - _EXP_TOL:
        res_vec = np.full(mesh.n, 1.0 / gamma(eps))
        defect = idx_raw - x_raw + L * res_vec
    else:
        res_tail = d[1:] ** (eps - 1.0) / gamma(eps)
        defect[1:] = idx_raw[1:] - x_raw[1:] + L * res_tail
        if x.is_weighted:
            # compensated balance at the endpoint is exact by construction
            defect[0] = 0.0
        else:
            defect[0] = idx_raw[0] - x_raw[0]
    return GridFunction(mesh, defect, 0.0)


def composition_defect(psi: PsiMap, order: FracOrder, x: GridFunction) -> GridFunction:
    """Defect of D^(mu,nu) I^mu x = x on a raw input.

    The printed two-operator composition in the source material uses the
    inner smoothing order in place of mu; the identity actually consistent
    with the inversion theorem (and checked here) composes with I^mu.
    """
    if x.is_weighted:
        raise DomainError("composition defect expects a raw input")
    y = frac_integral_grid(psi, order.mu, x)
    D = hilfer_derivative(psi, order, y)
    d_raw = raw_values(psi, D)
    defect = d_raw - x.values
    if D.is_weighted:
        defect[0] = defect[1]
    return GridFunction(x.mesh, defect, 0.0)
