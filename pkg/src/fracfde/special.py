"""Gamma and Mittag-Leffler evaluation on the real axis.

Everything downstream (kernels, weights, resolvents, contraction factors)
reduces to these two families. Series summation is compensated and the
truncation rule refuses to stop before the term-ratio peak, so a result
is either accurate to ~1e-13 relative or an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ArgumentRangeError, DomainError

#: Largest |z| accepted by the series evaluators. Past this point an
#: asymptotic regime would be needed, which is out of scope; we refuse
#: rather than return a silently degraded value.
ML_Z_MAX = 100.0

#: Relative size at which a series term is considered negligible.
ML_TERM_TOL = 1e-16

#: Refusal threshold: alternating sums whose cancellation error estimate
#: exceeds this relative level raise instead of returning (kept in sync
#: with the kernel backends).
ML_CANCEL_RTOL = 1e-5

#: ln of the largest representable double, with margin.
_LN_OVERFLOW = 708.0

_MAX_TERMS = 50_000


@dataclass(frozen=True)
class MLParams:
    """Order pair (mu, nu) of a two-parameter Mittag-Leffler function."""

    mu: float
    nu: float = 1.0

    def __post_init__(self):
        if not self.mu > 0.0:
            raise DomainError(f"mu must be positive, got {self.mu}")
        if not self.nu > 0.0:
            raise DomainError(f"nu must be positive, got {self.nu}")


def gamma(z: float) -> float:
    """Gamma function for real z > 0.

    Raises DomainError for z <= 0 and OverflowError once the value
    exceeds double range (z > ~171.6).
    """
    if not z > 0.0:
        raise DomainError(f"gamma requires z > 0, got {z}")
    try:
        return math.gamma(z)
    except OverflowError:
        raise OverflowError(f"gamma({z}) exceeds double range") from None


def _ml_series(mu: float, nu: float, z: float) -> float:
    """Compensated summation of sum_k z^k / Gamma(mu*k + nu).

    Terms grow before they decay, so the stop rule requires both a small
    current term and k past the term-ratio peak k* ~ |z|^(1/mu).

    Accuracy model: the absolute error is a small multiple of
    eps * max_k |term_k|. For z >= 0 that is a relative error near eps;
    for z < 0 the alternating sum can be ill conditioned, and when the
    estimated error would exceed ML_CANCEL_RTOL of the result the evaluation
    refuses instead of returning a silently degraded value.
    """
    if abs(z) > ML_Z_MAX:
        raise ArgumentRangeError(
            f"|z| = {abs(z)} exceeds the supported series range {ML_Z_MAX}"
        )
    if z == 0.0:
        return 1.0 / gamma(nu)
    az = abs(z)
    peak = az ** (1.0 / mu)
    if peak > _LN_OVERFLOW:
        # exp-scale estimate of the dominant term / result size
        raise OverflowError(
            f"E_({mu},{nu})({z}) is not representable in double precision"
        )
    ln_az = math.log(az)
    negative = z < 0.0
    total = 0.0
    comp = 0.0  # Neumaier compensation
    max_ln = -math.inf
    k = 0
    while k < _MAX_TERMS:
        ln_term = k * ln_az - math.lgamma(mu * k + nu)
        if ln_term > _LN_OVERFLOW:
            raise OverflowError(
                f"series term overflow for E_({mu},{nu})({z}) at k={k}"
            )
        if ln_term > max_ln:
            max_ln = ln_term
        term = math.exp(ln_term)
        if negative and (k & 1):
            term = -term
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        past_peak = mu * k + nu > peak * mu + nu
        if past_peak and abs(term) < ML_TERM_TOL * max(abs(total + comp), 1e-300):
            break
        k += 1
    else:
        raise ArgumentRangeError(
            f"Mittag-Leffler series did not converge in {_MAX_TERMS} terms"
        )
    result = total + comp
    if not math.isfinite(result):
        raise OverflowError(f"E_({mu},{nu})({z}) overflowed during summation")
    err_est = 32.0 * 2.2e-16 * math.exp(max_ln)
    if err_est > ML_CANCEL_RTOL * max(abs(result), 1e-300):
        raise ArgumentRangeError(
            f"E_({mu},{nu})({z}): alternating-series cancellation exceeds "
            "double precision"
        )
    return result


def ml1(mu: float, z: float) -> float:
    """One-parameter Mittag-Leffler function E_mu(z), real z."""
    if not mu > 0.0:
        raise DomainError(f"mu must be positive, got {mu}")
    return _ml_series(mu, 1.0, z)


def ml2(mu: float, nu: float, z: float) -> float:
    """Two-parameter Mittag-Leffler function E_{mu,nu}(z), real z."""
    p = MLParams(mu, nu)
    return _ml_series(p.mu, p.nu, z)


def ml(params: MLParams, z: float) -> float:
    """Evaluate E_{mu,nu}(z) for a parameter pair."""
    return _ml_series(params.mu, params.nu, z)
