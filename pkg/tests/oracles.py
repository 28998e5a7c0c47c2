"""Independent high-precision oracles used to freeze expected values.

Everything here goes through mpmath at 50 digits and never touches the
package's own evaluation paths.
"""

import mpmath as mp

mp.mp.dps = 50


def ml_max_term_ln(mu, nu, z):
    """Natural log of the largest series term (cancellation scale)."""
    if z == 0:
        return mp.mpf(0)
    mu = mp.mpf(mu)
    z = mp.mpf(z)
    k_peak = max(abs(z) ** (1 / mu) / mu, mp.mpf(1))
    best = mp.mpf("-inf")
    for k in range(0, int(2 * k_peak) + 10):
        best = max(best, k * mp.log(abs(z)) - mp.loggamma(mu * k + nu))
    return best


def ml_series(mu, nu, z, kmax=200_000):
    """Brute-force Mittag-Leffler series; working precision is scaled to
    the alternating-series cancellation so digits are never lost."""
    extra = int(0.44 * float(ml_max_term_ln(mu, nu, z))) + 30
    with mp.workdps(max(50, extra)):
        mu = mp.mpf(mu)
        nu = mp.mpf(nu)
        z = mp.mpf(z)
        tol = mp.mpf(10) ** (-mp.mp.dps + 10)
        total = mp.mpf(0)
        peak = abs(z) ** (1 / mu) / mu if z != 0 else mp.mpf(0)
        for k in range(kmax):
            term = z**k / mp.gamma(mu * k + nu)
            total += term
            if k > 5 and k > peak and abs(term) < tol * abs(total):
                return total
        raise RuntimeError("oracle series did not converge")


def gamma(z):
    return mp.gamma(mp.mpf(z))


def frac_integral_power(mu, p, span):
    """Closed form of the order-mu integral of (psi - psi(a))^p at span."""
    mu = mp.mpf(mu)
    p = mp.mpf(p)
    span = mp.mpf(span)
    return mp.gamma(p + 1) / mp.gamma(p + 1 + mu) * span ** (p + mu)
