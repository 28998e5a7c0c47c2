# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels; behavioural twin of _kernels_py.

Panel moments use the same cancellation-free forms as the reference
implementation (expm1/log1p for the zeroth moment, a power series for
the first-moment bracket when the relative panel width is below 1/2).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, expm1, fabs, isfinite, lgamma, log, log1p, pow, tgamma

BACKEND_NAME = "c"

DEF SERIES_TERMS = 64


cdef void _bracket_coeffs(double mu, double* a) noexcept nogil:
    # series coefficients of B(x) = sum_{k>=2} a_k x^k
    cdef double bk = 1.0, prev = 1.0
    cdef int k
    for k in range(1, SERIES_TERMS + 2):
        bk = bk * (k - 1.0 - mu) / k
        if k >= 2:
            a[k] = -(bk + mu * prev)
        prev = bk


cdef inline double _bracket(double x, double mu, const double* a) noexcept nogil:
    # B(x) = 1 - (1-x)^mu (1 + mu x); the coefficients are positive and the
    # powers decay geometrically for x < 1/2, so upward summation with an
    # early exit is stable
    cdef double acc, xk, term
    cdef int k
    if x < 0.5:
        acc = 0.0
        xk = 1.0
        for k in range(2, SERIES_TERMS + 2):
            term = a[k] * xk
            acc += term
            if term < 1e-17 * acc:
                break
            xk *= x
        return acc * x * x
    if x >= 1.0:
        return 1.0
    return 1.0 - exp(mu * log1p(-x)) * (1.0 + mu * x)


cdef inline double _m0(double x, double v, double mu) noexcept nogil:
    # integral of (v-w)^(mu-1) over a panel of relative width x = h/v
    if x >= 1.0:
        return pow(v, mu) / mu
    return -expm1(mu * log1p(-x)) * pow(v, mu) / mu


def pi_weight_matrix(u, double mu):
    """Product-integration weight matrix; see _kernels_py for the contract."""
    cdef const double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = uu.shape[0]
    out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] W = out
    if n < 2:
        return out
    cdef double coeffs[SERIES_TERMS + 2]
    _bracket_coeffs(mu, coeffs)
    cdef double inv_g = 1.0 / tgamma(mu)
    cdef double mm1 = mu * (mu + 1.0)
    cdef Py_ssize_t i, j
    cdef double T, v, h, x, m0, m1, s
    with nogil:
        for i in range(1, n):
            T = uu[i]
            for j in range(i):
                v = T - uu[j]
                h = uu[j + 1] - uu[j]
                x = h / v
                if x > 1.0:
                    x = 1.0
                m0 = _m0(x, v, mu)
                m1 = _bracket(x, mu, coeffs) * pow(v, mu + 1.0) / mm1
                s = m1 / h
                W[i, j] += (m0 - s) * inv_g
                W[i, j + 1] += s * inv_g
    return out


def pi_weight_row(u, double mu, Py_ssize_t i):
    """Single row of pi_weight_matrix."""
    cdef const double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = uu.shape[0]
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] w = out
    if i <= 0:
        return out
    cdef double coeffs[SERIES_TERMS + 2]
    _bracket_coeffs(mu, coeffs)
    cdef double inv_g = 1.0 / tgamma(mu)
    cdef double mm1 = mu * (mu + 1.0)
    cdef double T = uu[i]
    cdef Py_ssize_t j
    cdef double v, h, x, m0, m1, s
    for j in range(i):
        v = T - uu[j]
        h = uu[j + 1] - uu[j]
        x = h / v
        if x > 1.0:
            x = 1.0
        m0 = _m0(x, v, mu)
        m1 = _bracket(x, mu, coeffs) * pow(v, mu + 1.0) / mm1
        s = m1 / h
        w[j] += (m0 - s) * inv_g
        w[j + 1] += s * inv_g
    return out


def ml_series_vec(double mu, double nu, z, double term_tol=1e-16,
                  int max_terms=50000):
    """Elementwise Mittag-Leffler series; see _kernels_py for the contract."""
    cdef const double[::1] zz = np.ascontiguousarray(z, dtype=np.float64)
    cdef Py_ssize_t n = zz.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    cdef Py_ssize_t idx
    cdef double zi, ln_az, peak, total, carry, term, t, ln_term, max_ln
    cdef double at_zero = 1.0 / tgamma(nu)
    cdef int k, sign
    cdef bint overflow = 0, diverged = 0, cancelled = 0
    for idx in range(n):
        zi = zz[idx]
        if zi == 0.0:
            res[idx] = at_zero
            continue
        ln_az = log(fabs(zi))
        sign = 1 if zi > 0.0 else -1
        peak = pow(fabs(zi), 1.0 / mu)
        total = 0.0
        carry = 0.0
        max_ln = -1e308
        k = 0
        while k < max_terms:
            ln_term = k * ln_az - lgamma(mu * k + nu)
            if ln_term > max_ln:
                max_ln = ln_term
            term = exp(ln_term)
            if sign < 0 and (k & 1):
                term = -term
            if not isfinite(term):
                overflow = 1
                break
            t = total + term
            if fabs(total) >= fabs(term):
                carry += (total - t) + term
            else:
                carry += (term - t) + total
            total = t
            if k > peak and fabs(term) < term_tol * max(fabs(total + carry), 1e-300):
                break
            k += 1
        else:
            diverged = 1
        if overflow or diverged:
            break
        res[idx] = total + carry
        if not isfinite(res[idx]):
            overflow = 1
            break
        if 32.0 * 2.2e-16 * exp(max_ln) > 1e-5 * max(fabs(res[idx]), 1e-300):
            cancelled = 1
            break
    if overflow:
        raise OverflowError("Mittag-Leffler series term overflow")
    if diverged:
        raise OverflowError("Mittag-Leffler series did not converge")
    if cancelled:
        raise OverflowError(
            "Mittag-Leffler series cancellation exceeds double precision"
        )
    return out
