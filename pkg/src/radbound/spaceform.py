"""Metric kernel for the flat (kappa=0) and round (kappa=1) model spaces.

Points are plain float arrays. In flat space a point is an ``n``-vector; on
the unit sphere it is an embedded unit ``(n+1)``-vector. All lengths and
angles are radians.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, InadmissibleError, UnboundedModelRadius

UNIT_TOL = 1e-12
TANGENT_TOL = 1e-9


@dataclass(frozen=True)
class SpaceForm:
    kappa: int
    dim: int

    def __post_init__(self):
        if self.kappa not in (0, 1):
            raise GeometryError(f"kappa must be 0 or 1, got {self.kappa!r}")
        if int(self.dim) != self.dim or self.dim < 2:
            raise GeometryError(f"dim must be an integer >= 2, got {self.dim!r}")

    @property
    def ambient(self) -> int:
        """Length of a coordinate vector."""
        return self.dim + self.kappa

    def origin(self) -> np.ndarray:
        """The origin (kappa=0) or the pole ``e_n`` (kappa=1)."""
        p = np.zeros(self.ambient)
        if self.kappa == 1:
            p[-1] = 1.0
        return p


def as_point(sf: SpaceForm, coords) -> np.ndarray:
    p = np.asarray(coords, dtype=float)
    if p.shape != (sf.ambient,):
        raise GeometryError(
            f"point needs shape ({sf.ambient},) for kappa={sf.kappa}, dim={sf.dim}; got {p.shape}"
        )
    if not np.all(np.isfinite(p)):
        raise GeometryError("point has non-finite coordinates")
    if sf.kappa == 1 and abs(np.linalg.norm(p) - 1.0) > UNIT_TOL:
        raise GeometryError(f"sphere point must have unit norm, |p| = {np.linalg.norm(p)!r}")
    return p


def _check_pair(sf, p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape[-1] != sf.ambient or q.shape[-1] != sf.ambient:
        raise GeometryError(
            f"dimension mismatch: expected coordinate length {sf.ambient}, "
            f"got {p.shape[-1]} and {q.shape[-1]}"
        )
    return p, q


def distance(sf: SpaceForm, p, q):
    """Geodesic distance. Broadcasts over leading axes of ``p`` and ``q``.

    On the sphere the angle is ``2*atan2(|p-q|, |p+q|)``, which stays
    accurate for nearly equal and nearly antipodal pairs alike.
    """
    p, q = _check_pair(sf, p, q)
    if sf.kappa == 0:
        return np.linalg.norm(p - q, axis=-1)[()]
    return (2.0 * np.arctan2(np.linalg.norm(p - q, axis=-1), np.linalg.norm(p + q, axis=-1)))[()]


def geodesic_point(sf: SpaceForm, p, direction, t: float) -> np.ndarray:
    """Point at arc length ``t`` along the unit-speed geodesic from ``p``."""
    p, u = _check_pair(sf, p, direction)
    if abs(np.linalg.norm(u) - 1.0) > TANGENT_TOL:
        raise GeometryError(f"direction must be a unit vector, |dir| = {np.linalg.norm(u)!r}")
    if t < 0:
        raise GeometryError(f"geodesic parameter must be nonnegative, got {t!r}")
    if sf.kappa == 0:
        return p + t * u
    if abs(float(p @ u)) > TANGENT_TOL:
        raise GeometryError("direction is not tangent to the sphere at the base point")
    return math.cos(t) * p + math.sin(t) * u


def log_map(sf: SpaceForm, p, q):
    """Return ``(unit direction at p toward q, distance)``.

    The direction is ``None`` when it is undefined (``p == q``, or ``q``
    antipodal to ``p`` on the sphere).
    """
    p, q = _check_pair(sf, p, q)
    d = float(distance(sf, p, q))
    if sf.kappa == 0:
        v = q - p
    else:
        v = q - (p @ q) * p
    nv = np.linalg.norm(v)
    if nv < 1e-15 or (sf.kappa == 1 and d > math.pi - 1e-12):
        return None, d
    return v / nv, d


def tangent_toward(sf: SpaceForm, p, q):
    """Unit tangent at each row of ``p`` pointing at ``q`` (vectorized log direction)."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    q = np.asarray(q, dtype=float)
    if sf.kappa == 0:
        v = q - p
    else:
        v = q - (p @ q)[:, None] * p
    n = np.linalg.norm(v, axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        return v / n


def md(sf: SpaceForm, t):
    """Modified distance: integral of sin(sqrt(k) s)/sqrt(k) from 0 to t."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InadmissibleError("md is defined for t >= 0")
    if sf.kappa == 0:
        return (0.5 * t * t)[()]
    k = float(sf.kappa)
    rk = math.sqrt(k)
    # 2 sin^2(x/2) avoids the cancellation in 1 - cos(x) near 0
    return (2.0 * np.sin(0.5 * rk * t) ** 2 / k)[()]


def model_radius(sf: SpaceForm, A: float) -> float:
    """Radius of the circle of geodesic curvature ``A`` in the model plane."""
    if A < 0 or not math.isfinite(A):
        raise InadmissibleError(f"curvature bound must be finite and >= 0, got {A!r}")
    if sf.kappa == 0:
        if A == 0:
            raise UnboundedModelRadius("model radius is unbounded for kappa=0, A=0")
        return 1.0 / A
    return math.atan2(1.0, A)


def sphere_volume(dim: int, radius: float = 1.0) -> float:
    """(dim-1)-volume of the round sphere of the given radius in R^dim."""
    return 2.0 * math.pi ** (dim / 2) / math.gamma(dim / 2) * radius ** (dim - 1)
