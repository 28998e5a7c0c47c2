"""Mittag-Leffler-weighted sup norms and metrics on grid functions.

The weight E_mu(xi (psi(t)-psi(a))^mu) grows fast enough that the
integral operator contracts in this norm over the whole interval; xi
trades contraction strength against resolution of the norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fracops import psi_images, raw_values
from .mesh import GradedMesh, GridFunction, grid_sub
from .psi import PsiMap, get_psi
from .special import ML_Z_MAX
from . import backend


@dataclass(frozen=True, eq=False)
class BieleckiWeight:
    """Weight family w(t) = E_mu(xi (psi(t)-psi(a))^mu), w >= 1, nondecreasing."""

    xi: float
    mu: float
    psi: PsiMap
    a: float

    def __post_init__(self):
        if not self.xi > 0.0:
            raise DomainError(f"xi must be positive, got {self.xi}")
        if not (0.0 < self.mu <= 1.0):
            raise DomainError(f"mu must lie in (0, 1], got {self.mu}")


_weight_cache: dict = {}
_MAX_CACHE = 64


def weight_values(w: BieleckiWeight, mesh: GradedMesh) -> np.ndarray:
    """Weight evaluated on the mesh nodes (cached)."""
    key = (id(w), id(mesh))
    hit = _weight_cache.get(key)
    if hit is not None and hit[0] is w and hit[1] is mesh:
        return hit[2]
    u = psi_images(w.psi, mesh)
    arg = w.xi * (u - u[0]) ** w.mu
    if arg.max() > ML_Z_MAX:
        raise DomainError(
            "weight argument exceeds the Mittag-Leffler series range; "
            "reduce xi or the interval"
        )
    vals = backend.ml_series_vec(w.mu, 1.0, arg)
    vals.setflags(write=False)
    if len(_weight_cache) >= _MAX_CACHE:
        _weight_cache.clear()
    _weight_cache[key] = (w, mesh, vals)
    return vals


def bielecki_norm(w: BieleckiWeight, x: GridFunction) -> float:
    """Weighted mesh-sup norm max_i |x(t_i)| / w(t_i).

    For compensated functions the raw value is reconstructed away from
    the left endpoint; at the endpoint itself, where the raw value is
    unbounded, the compensated limit is used (the natural finite
    quantity for the boundary-layer class).
    """
    if x.mesh.n < 1:
        raise DomainError("empty mesh")
    wv = weight_values(w, x.mesh)
    if not x.is_weighted:
        return float(np.max(np.abs(x.values) / wv))
    raw = raw_values(w.psi, x)
    ratios = np.abs(raw[1:]) / wv[1:]
    head = abs(float(x.values[0])) / wv[0]
    return float(max(head, ratios.max()))


def bielecki_metric(w: BieleckiWeight, x: GridFunction, y: GridFunction) -> float:
    """Metric induced by the weighted norm; requires a shared mesh."""
    return bielecki_norm(w, grid_sub(x, y))


def special_case_weight(kind: str, xi: float, mu: float = 1.0, a: float = 0.0) -> BieleckiWeight:
    """Classical members of the weight family.

    "psi_identity" keeps mu and drops the coordinate change;
    "classical_bielecki" additionally sends mu to 1, giving the plain
    exponential weight exp(xi (t-a)).
    """
    identity = get_psi("identity")
    if kind == "psi_identity":
        return BieleckiWeight(xi, mu, identity, a)
    if kind == "classical_bielecki":
        return BieleckiWeight(xi, 1.0, identity, a)
    raise DomainError(f"unknown special case {kind!r}")
