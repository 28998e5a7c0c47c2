"""Coordinate maps: the increasing weight function and its derivative.

All kernels are built in the transformed variable u = psi(t), so the map
must be strictly increasing on the working interval. The derivative is
supplied analytically (built-in or user expression) to keep kernel
evaluation free of differentiation noise; a consistency check guards
user-supplied pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError


@dataclass(frozen=True, eq=False)
class PsiMap:
    """An increasing map psi with analytic derivative psi_prime.

    Both callables must accept scalars and numpy arrays.
    """

    psi: Callable
    psi_prime: Callable
    label: str


def _identity(t):
    return np.asarray(t, dtype=float) + 0.0


def _one(t):
    return np.ones_like(np.asarray(t, dtype=float))


BUILTIN_PSI = {
    "identity": PsiMap(_identity, _one, "identity"),
    "power2": PsiMap(lambda t: np.square(np.asarray(t, dtype=float)),
                     lambda t: 2.0 * np.asarray(t, dtype=float),
                     "power2"),
    "exp": PsiMap(lambda t: np.exp(np.asarray(t, dtype=float)),
                  lambda t: np.exp(np.asarray(t, dtype=float)),
                  "exp"),
    "log1p": PsiMap(lambda t: np.log1p(np.asarray(t, dtype=float)),
                    lambda t: 1.0 / (1.0 + np.asarray(t, dtype=float)),
                    "log1p"),
}


def get_psi(label: str) -> PsiMap:
    try:
        return BUILTIN_PSI[label]
    except KeyError:
        raise DomainError(
            f"unknown psi map {label!r}; built-ins: {sorted(BUILTIN_PSI)}"
        ) from None


def validate_psi(psi: PsiMap, nodes: np.ndarray, check_derivative: bool = True):
    """Check monotonicity and derivative consistency on a node set.

    The map only needs to be increasing on the half-open interval, so a
    vanishing derivative at the left endpoint is tolerated (psi(t) = t^2
    at t = 0).
    """
    vals = np.asarray(psi.psi(nodes), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise DomainError(f"psi {psi.label!r} is not finite on the mesh")
    if not np.all(np.diff(vals) > 0.0):
        raise DomainError(f"psi {psi.label!r} is not strictly increasing on the mesh")
    dvals = np.asarray(psi.psi_prime(nodes), dtype=float)
    if not np.all(dvals[1:] > 0.0):
        raise DomainError(f"psi_prime of {psi.label!r} must be positive on (a, b]")
    if dvals[0] < 0.0:
        raise DomainError(f"psi_prime of {psi.label!r} is negative at the left endpoint")
    if check_derivative:
        span = float(nodes[-1] - nodes[0])
        h = 1e-5 * span
        probes = nodes[1:-1]
        if probes.size:
            approx = (np.asarray(psi.psi(probes + h), dtype=float)
                      - np.asarray(psi.psi(probes - h), dtype=float)) / (2.0 * h)
            exact = np.asarray(psi.psi_prime(probes), dtype=float)
            rel = np.abs(approx - exact) / np.maximum(np.abs(exact), 1e-30)
            worst = float(rel.max())
            if worst > 1e-6:
                raise DomainError(
                    f"psi_prime of {psi.label!r} disagrees with a central "
                    f"difference of psi (relative error {worst:.2e})"
                )
