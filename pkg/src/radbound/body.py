"""Convex bodies realized as intersections of metric balls in a model space."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import EmptyBodyError, GeometryError, InadmissibleError
from .spaceform import SpaceForm, as_point, geodesic_point, sphere_volume, tangent_toward

MEMBERSHIP_TOL = 1e-12
PROJECTION_TOL = 1e-9
CHORD_FLOOR = 1e-4
# corner detection: another sphere passes within this distance of the sample
CORNER_TOL = 1e-9


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float


@dataclass(frozen=True, eq=False)
class Body:
    """Intersection of balls. Construction certifies a nonempty interior.

    The inner radius and soul found during certification are kept on
    ``inner`` so later computations do not repeat the solve.
    """

    sf: SpaceForm
    balls: tuple
    inner: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.balls) == 0:
            raise GeometryError("a body needs at least one ball")
        balls = []
        for i, b in enumerate(self.balls):
            c = as_point(self.sf, b.center)
            r = float(b.radius)
            if not (r > 0 and math.isfinite(r)):
                raise GeometryError(f"ball {i}: radius must be positive, got {b.radius!r}")
            if self.sf.kappa == 1 and r >= math.pi / 2:
                raise GeometryError(f"ball {i}: spherical radius must be < pi/2, got {r!r}")
            c.setflags(write=False)
            balls.append(Ball(c, r))
        object.__setattr__(self, "balls", tuple(balls))
        centers = np.array([b.center for b in balls])
        radii = np.array([b.radius for b in balls])
        centers.setflags(write=False)
        radii.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "_cache", {})
        if self.inner is None:
            from .solver import inner_radius

            res = inner_radius(self)
            if not res.a > MEMBERSHIP_TOL:
                raise EmptyBodyError(f"ball intersection has empty interior (max rho = {res.a:.3g})")
            object.__setattr__(self, "inner", res)

    @property
    def n_balls(self) -> int:
        return len(self.balls)

    def describe(self) -> dict:
        return {
            "kappa": self.sf.kappa,
            "dim": self.sf.dim,
            "balls": [{"center": b.center.tolist(), "radius": b.radius} for b in self.balls],
        }


class BoundarySample(NamedTuple):
    point: np.ndarray
    owner: int
    inward_normal: np.ndarray


class BaseAngleEstimate(NamedTuple):
    values: list  # (chord length r, min over directions of 2*alpha/r)
    corner: bool


def rho(body: Body, x):
    """Signed distance to the boundary: min over balls of radius - distance to center.

    Exact distance to the boundary for points of the body, negative outside.
    Accepts one point or an (N, D) array.
    """
    x = np.asarray(x, dtype=float)
    vals = kernels.slack_min(x, body.centers, body.radii, body.sf.kappa)
    return float(vals[0]) if x.ndim == 1 else vals


def contains(body: Body, x, tol: float = MEMBERSHIP_TOL):
    r = rho(body, x)
    return r >= -tol


def _sphere_directions(rng, count, dim):
    u = rng.standard_normal((count, dim))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def _points_on_sphere(body: Body, i: int, rng, count: int) -> np.ndarray:
    c, r = body.centers[i], body.radii[i]
    if body.sf.kappa == 0:
        u = _sphere_directions(rng, count, body.sf.dim)
        return c + r * u
    u = rng.standard_normal((count, body.sf.ambient))
    u -= np.outer(u @ c, c)
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return math.cos(r) * c + math.sin(r) * u


def sphere_area(body: Body, i: int) -> float:
    r = body.radii[i]
    if body.sf.kappa == 0:
        return sphere_volume(body.sf.dim, r)
    return sphere_volume(body.sf.dim, math.sin(r))


def _project(body: Body, i: int, pts: np.ndarray) -> np.ndarray:
    """Radial projection onto sphere i (one Newton step, exact for a sphere)."""
    c, r = body.centers[i], body.radii[i]
    if body.sf.kappa == 0:
        v = pts - c
        return c + r * v / np.linalg.norm(v, axis=1, keepdims=True)
    w = pts - np.outer(pts @ c, c)
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    return math.cos(r) * c + math.sin(r) * w


def boundary_points(body: Body, target_count: int, seed: int, pilot: int = 4096):
    """Array form of :func:`sample_boundary`: ``(points, owners)``.

    Each sphere draws from its own stream ``default_rng([seed, i])``. A
    pilot batch estimates the fraction of the sphere that is boundary; the
    quota is proportional to that patch area, at least one sample per
    contributing sphere.
    """
    if target_count < 1:
        raise InadmissibleError("target_count must be >= 1")
    key = ("boundary", target_count, seed, pilot)
    if key in body._cache:
        return body._cache[key]
    m = body.n_balls
    rngs = [np.random.default_rng([seed, i]) for i in range(m)]
    areas = np.zeros(m)
    fracs = np.zeros(m)
    kept = [[] for _ in range(m)]
    for i in range(m):
        pts = _points_on_sphere(body, i, rngs[i], pilot)
        ok = kernels.slack_min(pts, body.centers, body.radii, body.sf.kappa, i) >= -MEMBERSHIP_TOL
        fracs[i] = ok.mean()
        areas[i] = fracs[i] * sphere_area(body, i)
        kept[i].append(pts[ok])
    total = areas.sum()
    if total <= 0:
        raise EmptyBodyError("no boundary found by sampling")
    quotas = [max(1, int(round(target_count * areas[i] / total))) if fracs[i] > 0 else 0
              for i in range(m)]
    points, owners = [], []
    for i in range(m):
        if quotas[i] == 0:
            continue
        have = np.concatenate(kept[i])
        batch = max(64, int(1.5 * quotas[i] / fracs[i]))
        rounds = 0
        while have.shape[0] < quotas[i] and rounds < 50:
            pts = _points_on_sphere(body, i, rngs[i], batch)
            ok = kernels.slack_min(pts, body.centers, body.radii, body.sf.kappa, i) >= -MEMBERSHIP_TOL
            have = np.concatenate([have, pts[ok]])
            rounds += 1
        have = _project(body, i, have[:quotas[i]])
        points.append(have)
        owners.append(np.full(have.shape[0], i))
    out = (np.concatenate(points), np.concatenate(owners))
    for a in out:
        a.setflags(write=False)
    body._cache[key] = out
    return out


def inward_normals(body: Body, points: np.ndarray, owners: np.ndarray) -> np.ndarray:
    """Unit tangent at each point toward its owner's center."""
    out = np.empty_like(points)
    for i in np.unique(owners):
        sel = owners == i
        out[sel] = tangent_toward(body.sf, points[sel], body.centers[i])
    return out


def sample_boundary(body: Body, target_count: int, seed: int) -> list:
    pts, owners = boundary_points(body, target_count, seed)
    normals = inward_normals(body, pts, owners)
    return [BoundarySample(p, int(o), n) for p, o, n in zip(pts, owners, normals)]


def base_angle_lower_bound(body: Body) -> float:
    """Certified extrinsic curvature bound: the least principal curvature of any sphere."""
    if body.sf.kappa == 0:
        return float(np.min(1.0 / body.radii))
    return float(np.min(1.0 / np.tan(body.radii)))


def _local_slack(body: Body, x, owner, Y):
    """rho at points Y near the boundary point x, without cancellation for big balls."""
    if body.sf.kappa == 1:
        return kernels.slack_min(Y, body.centers, body.radii, 1)
    delta = Y - x
    out = np.full(Y.shape[0], np.inf)
    for j, (c, r) in enumerate(zip(body.centers, body.radii)):
        xc = x - c
        base = 0.0 if j == owner else r * r - xc @ xc
        num = base - 2.0 * delta @ xc - (delta * delta).sum(axis=1)
        s = num / (r + np.linalg.norm(Y - c, axis=1))
        out = np.minimum(out, s)
    return out


def _tangent_basis(body: Body, x, normal):
    cols = [normal] if body.sf.kappa == 0 else [x, normal]
    Q, _ = np.linalg.qr(np.column_stack(cols + [np.eye(body.sf.ambient)]).astype(float))
    return Q[:, len(cols):body.sf.ambient].T


def base_angle_estimate(body: Body, sample: BoundarySample, chord_lengths,
                        n_directions: int = 32, seed: int = 0,
                        chord_floor: float = CHORD_FLOOR) -> BaseAngleEstimate:
    """Chord-based base angle: for each chord length r, min over directions of 2*alpha/r.

    A chord of length r leaves ``sample.point`` in the plane spanned by a
    tangent direction w and the inward normal; alpha is its angle with the
    tangent hyperplane, found by bisection on the chord endpoint hitting
    the boundary. At a corner the owner sphere's normal is used and the
    result is flagged.
    """
    x = np.asarray(sample.point, dtype=float)
    nu = np.asarray(sample.inward_normal, dtype=float)
    owner = int(sample.owner)
    sf = body.sf
    others = [j for j in range(body.n_balls) if j != owner]
    corner = False
    if others:
        s = kernels.slack_min(x[None], body.centers, body.radii, sf.kappa, owner)[0]
        corner = bool(s <= CORNER_TOL)
    basis = _tangent_basis(body, x, nu)
    dirs = [basis, -basis]
    if basis.shape[0] > 1:
        g = np.random.default_rng(seed).standard_normal((n_directions, basis.shape[0]))
        dirs.append((g / np.linalg.norm(g, axis=1, keepdims=True)) @ basis)
    W = np.concatenate(dirs)

    def endpoints(theta, r):
        d = np.cos(theta)[:, None] * W + np.sin(theta)[:, None] * nu
        if sf.kappa == 0:
            return x + r * d
        return np.cos(r) * x + np.sin(r) * d

    values = []
    for r in chord_lengths:
        r = float(r)
        if r < chord_floor:
            raise InadmissibleError(f"chord length {r} below the floor {chord_floor}")
        if sf.kappa == 1 and r >= math.pi:
            raise InadmissibleError("chord length must be < pi on the sphere")
        lo = np.zeros(W.shape[0])
        hi = np.full(W.shape[0], math.pi / 2)
        inside_hi = _local_slack(body, x, owner, endpoints(hi, r)) >= 0
        if not inside_hi.any():
            raise InadmissibleError(f"no boundary chord of length {r} from this point")
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            inside = _local_slack(body, x, owner, endpoints(mid, r)) >= 0
            hi = np.where(inside, mid, hi)
            lo = np.where(inside, lo, mid)
        alpha = 0.5 * (lo + hi)[inside_hi]
        values.append((r, float(np.min(2.0 * alpha / r))))
    return BaseAngleEstimate(values, corner)


def make_cutthetip(A: float, a: float, eps: float) -> Body:
    """Three unit-curvature balls whose intersection has inner radius ``a`` and
    radius equal to the distance from its soul to its boundary."""
    if not A > 0:
        raise InadmissibleError(f"A must be positive, got {A!r}")
    if not 0 < a < 1.0 / A:
        raise InadmissibleError(f"need 0 < a < 1/A, got a={a!r}, 1/A={1.0 / A!r}")
    h = math.sqrt(2 * a / A - a * a)
    if not 0 < eps < h - a:
        raise InadmissibleError(f"need 0 < eps < sqrt(2a/A - a^2) - a = {h - a!r}, got {eps!r}")
    R = 1.0 / A
    sf = SpaceForm(0, 3)
    centers = [(R - a, 0.0, 0.0), (-(R - a), 0.0, 0.0), (0.0, h - eps - R, 0.0)]
    return Body(sf, tuple(Ball(np.array(c), R) for c in centers))


def ball_body(sf: SpaceForm, radius: float, center=None) -> Body:
    c = sf.origin() if center is None else center
    return Body(sf, (Ball(np.asarray(c, dtype=float), radius),))


def random_body(sf: SpaceForm, n_balls: int, rmin: float, rmax: float, rng,
                max_tries: int = 200) -> Body:
    """Random ball intersection with radii uniform in [rmin, rmax].

    Centers are uniform in a ball of radius ``rmin`` about the origin (pole
    on the sphere); candidates with a thin or empty interior are redrawn.
    """
    if not 0 < rmin <= rmax:
        raise InadmissibleError(f"need 0 < rmin <= rmax, got {rmin!r}, {rmax!r}")
    if sf.kappa == 1 and rmax >= math.pi / 2:
        raise InadmissibleError("spherical radii must stay below pi/2")
    pole = sf.origin()
    for _ in range(max_tries):
        radii = rng.uniform(rmin, rmax, n_balls)
        u = rng.standard_normal((n_balls, sf.dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        dist = rmin * rng.uniform(0.0, 1.0, n_balls) ** (1.0 / sf.dim)
        if sf.kappa == 0:
            centers = u * dist[:, None]
        else:
            tang = np.zeros((n_balls, sf.ambient))
            tang[:, : sf.dim] = u
            centers = np.array([geodesic_point(sf, pole, t, d) for t, d in zip(tang, dist)])
            centers /= np.linalg.norm(centers, axis=1, keepdims=True)
        try:
            body = Body(sf, tuple(Ball(c, float(r)) for c, r in zip(centers, radii)))
        except EmptyBodyError:
            continue
        if body.inner.a >= 0.02 * rmin:
            return body
    raise InadmissibleError(f"no body with nonempty interior after {max_tries} draws")
