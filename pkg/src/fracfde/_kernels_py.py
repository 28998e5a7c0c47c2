"""Numpy reference implementations of the hot kernels.

These mirror the compiled extension (_kernels_c) exactly; the backend
module picks whichever is available. Row blocking keeps the O(n^2)
weight-matrix build within a bounded memory footprint.

Panel moments are evaluated in cancellation-free form. With v the
distance from the panel's left edge to the target and x = h/v the
relative panel width,

    M0 = integral of (v - w)^(mu-1) dw       = v^mu  * (1-(1-x)^mu) / mu
    M1 = integral of (v - w)^(mu-1) w dw     = v^(mu+1) * B(x) / (mu (mu+1))
    B(x) = 1 - (1-x)^mu (1 + mu x)

Both brackets lose all significance for x << 1 if expanded naively
(B ~ x^2 while the separate terms are O(x)), so M0 uses expm1/log1p and
B switches to its power series for x < 1/2.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"

_ROW_BLOCK = 256
_SERIES_TERMS = 64


def _bracket_coeffs(mu: float) -> np.ndarray:
    """Series coefficients of B(x) = sum_{k>=2} a_k x^k (a_k > 0)."""
    a = np.zeros(_SERIES_TERMS + 2)
    bk = 1.0  # (-1)^k binom(mu, k)
    prev = 1.0
    for k in range(1, _SERIES_TERMS + 2):
        bk = bk * (k - 1.0 - mu) / k
        if k >= 2:
            a[k] = -(bk + mu * prev)
        prev = bk
    return a


def _bracket(x: np.ndarray, mu: float, coeffs: np.ndarray) -> np.ndarray:
    """B(x) = 1 - (1-x)^mu (1 + mu x), accurate for all x in [0, 1]."""
    out = np.empty_like(x)
    small = x < 0.5
    xs = x[small]
    acc = np.zeros_like(xs)
    for k in range(coeffs.size - 1, 1, -1):
        acc = acc * xs + coeffs[k]
    out[small] = acc * xs * xs
    xl = x[~small]
    with np.errstate(divide="ignore"):
        out[~small] = 1.0 - np.exp(mu * np.log1p(-xl)) * (1.0 + mu * xl)
    return out


def pi_weight_matrix(u: np.ndarray, mu: float) -> np.ndarray:
    """Product-integration weights for the left-sided weakly singular kernel.

    Returns W such that sum_j W[i, j] g_j approximates
    (1/Gamma(mu)) * integral_{u_0}^{u_i} (u_i - s)^(mu-1) g(s) ds
    with g interpolated linearly between the nodes u_j; exact for
    piecewise-linear g.
    """
    u = np.ascontiguousarray(u, dtype=float)
    n = u.size
    W = np.zeros((n, n))
    if n < 2:
        return W
    h = np.diff(u)
    inv_g = 1.0 / math.gamma(mu)
    coeffs = _bracket_coeffs(mu)
    for lo in range(1, n, _ROW_BLOCK):
        hi = min(lo + _ROW_BLOCK, n)
        V = u[lo:hi, None] - u[None, :-1]  # distance to panel left edges
        rows = np.arange(lo, hi)[:, None]
        panel = np.arange(n - 1)[None, :]
        mask = panel < rows
        V = np.where(mask, V, 1.0)  # dummy positive value off the domain
        X = np.clip(h[None, :] / V, 0.0, 1.0)
        with np.errstate(divide="ignore"):
            M0 = -np.expm1(mu * np.log1p(-X)) * V**mu / mu
        M1 = _bracket(X, mu, coeffs) * V ** (mu + 1.0) / (mu * (mu + 1.0))
        M0 = np.where(mask, M0, 0.0)
        M1 = np.where(mask, M1, 0.0)
        S = M1 / h
        W[lo:hi, :-1] += (M0 - S) * inv_g
        W[lo:hi, 1:] += S * inv_g
    return W


def pi_weight_row(u: np.ndarray, mu: float, i: int) -> np.ndarray:
    """Single row of pi_weight_matrix, for one-off integral evaluations."""
    u = np.ascontiguousarray(u, dtype=float)
    n = u.size
    w = np.zeros(n)
    if i <= 0:
        return w
    v = u[i] - u[:i]
    h = np.diff(u[: i + 1])
    X = np.clip(h / v, 0.0, 1.0)
    coeffs = _bracket_coeffs(mu)
    with np.errstate(divide="ignore"):
        M0 = -np.expm1(mu * np.log1p(-X)) * v**mu / mu
    M1 = _bracket(X, mu, coeffs) * v ** (mu + 1.0) / (mu * (mu + 1.0))
    S = M1 / h
    inv_g = 1.0 / math.gamma(mu)
    w[:i] += (M0 - S) * inv_g
    w[1 : i + 1] += S * inv_g
    return w


def ml_series_vec(
    mu: float,
    nu: float,
    z: np.ndarray,
    term_tol: float = 1e-16,
    max_terms: int = 50_000,
) -> np.ndarray:
    """Elementwise Mittag-Leffler series with compensated accumulation.

    Callers are responsible for range gating (|z| bound, overflow scale);
    this kernel raises OverflowError only if a term or sum overflows.
    """
    z = np.ascontiguousarray(z, dtype=float)
    out = np.zeros_like(z)
    nonzero = z != 0.0
    out[~nonzero] = 1.0 / math.gamma(nu)
    if not np.any(nonzero):
        return out
    zz = z[nonzero]
    ln_az = np.log(np.abs(zz))
    neg = zz < 0.0
    peak = np.abs(zz) ** (1.0 / mu)
    total = np.zeros_like(zz)
    carry = np.zeros_like(zz)
    max_ln = np.full_like(zz, -np.inf)
    k = 0
    while k < max_terms:
        ln_term = k * ln_az - math.lgamma(mu * k + nu)
        np.maximum(max_ln, ln_term, out=max_ln)
        term = np.exp(ln_term)
        if neg.any() and (k & 1):
            term = np.where(neg, -term, term)
        if not np.all(np.isfinite(term)):
            raise OverflowError("Mittag-Leffler series term overflow")
        t = total + term
        big = np.abs(total) >= np.abs(term)
        carry += np.where(big, (total - t) + term, (term - t) + total)
        total = t
        if k > peak.max() and np.all(
            np.abs(term) < term_tol * np.maximum(np.abs(total + carry), 1e-300)
        ):
            break
        k += 1
    else:
        raise OverflowError("Mittag-Leffler series did not converge")
    res = total + carry
    if not np.all(np.isfinite(res)):
        raise OverflowError("Mittag-Leffler series sum overflow")
    err_est = 32.0 * 2.2e-16 * np.exp(max_ln)
    if np.any(err_est > 1e-5 * np.maximum(np.abs(res), 1e-300)):
        raise OverflowError(
            "Mittag-Leffler series cancellation exceeds double precision"
        )
    out[nonzero] = res
    return out
