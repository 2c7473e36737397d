"""Inner radius and soul, radius from the soul, and global radius of a body."""
from __future__ import annotations

import itertools
import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .errors import ConvergenceError, GeometryError
from .spaceform import distance

SOLVER_TOL = 1e-7
FEASIBLE_TOL = 1e-9
RAD_GAP_TOL = 1e-10


class InnerRadius(NamedTuple):
    a: float
    soul: np.ndarray
    unique: bool
    spread: float  # distance between independently polished maximizers
    converged: bool


class FarthestPoint(NamedTuple):
    distance: float
    point: np.ndarray


class GlobalRadius(NamedTuple):
    rad: float
    center: np.ndarray
    lower: float  # radius of the enclosing ball of the final point set
    rounds: int


def _rho(body, X):
    return kernels.slack_min(X, body.centers, body.radii, body.sf.kappa)


def _normalize_rows(X):
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _starts(body, restarts, rng):
    sf = body.sf
    C = body.centers
    base = [C.mean(axis=0)] + list(C)
    starts = np.array(base[:restarts])
    extra = restarts - starts.shape[0]
    if extra > 0:
        w = rng.dirichlet(np.ones(len(C)), size=extra)
        jitter = rng.standard_normal((extra, sf.ambient)) * 0.1 * body.radii.min()
        starts = np.vstack([starts, w @ C + jitter])
    if sf.kappa == 1:
        starts = _normalize_rows(starts)
    return starts


def _subgradient_ascent(body, X, iters=300):
    """Batched ascent on rho with Polyak steps toward an adaptive target level."""
    sf = body.sf
    X = X.copy()
    f = _rho(body, X)
    best_x, best_f = X.copy(), f.copy()
    delta = np.full(X.shape[0], 0.25 * body.radii.max())
    stall = np.zeros(X.shape[0], dtype=int)
    for _ in range(iters):
        if sf.kappa == 0:
            d = np.linalg.norm(X[:, None, :] - body.centers[None], axis=2)
        else:
            d = 2 * np.arctan2(np.linalg.norm(X[:, None, :] - body.centers[None], axis=2),
                               np.linalg.norm(X[:, None, :] + body.centers[None], axis=2))
        j = np.argmin(body.radii[None] - d, axis=1)
        Cj = body.centers[j]
        g = Cj - X if sf.kappa == 0 else Cj - (X * Cj).sum(axis=1, keepdims=True) * X
        with np.errstate(invalid="ignore", divide="ignore"):
            g = np.nan_to_num(g / np.linalg.norm(g, axis=1, keepdims=True))
        step = np.maximum(best_f + delta - f, 0.0)
        X = X + step[:, None] * g
        if sf.kappa == 1:
            X = _normalize_rows(X)
        f = _rho(body, X)
        up = f > best_f + 1e-15
        best_x[up], best_f[up] = X[up], f[up]
        stall = np.where(up, 0, stall + 1)
        shrink = stall >= 8
        delta = np.where(shrink, 0.5 * delta, delta)
        stall[shrink] = 0
        X[shrink] = best_x[shrink]
        f[shrink] = best_f[shrink]
    return best_x, best_f


def _polish(body, x0):
    """Tight local solve of max t s.t. rho >= t, as a smooth constrained program."""
    sf = body.sf
    C, R = body.centers, body.radii
    t0 = float(_rho(body, x0[None])[0])
    z0 = np.append(x0, t0)
    D = sf.ambient
    cons = [{
        "type": "ineq",
        "fun": lambda z: R - z[D],
        "jac": lambda z: np.hstack([np.zeros((len(R), D)), -np.ones((len(R), 1))]),
    }]
    if sf.kappa == 0:
        cons.append({
            "type": "ineq",
            "fun": lambda z: (R - z[D]) ** 2 - ((z[:D] - C) ** 2).sum(axis=1),
            "jac": lambda z: np.hstack([-2 * (z[:D] - C), (-2 * (R - z[D]))[:, None]]),
        })
    else:
        cons.append({
            "type": "ineq",
            "fun": lambda z: C @ z[:D] - np.cos(R - z[D]),
            "jac": lambda z: np.hstack([C, -np.sin(R - z[D])[:, None]]),
        })
        cons.append({
            "type": "eq",
            "fun": lambda z: np.array([z[:D] @ z[:D] - 1.0]),
            "jac": lambda z: np.append(2 * z[:D], 0.0)[None],
        })
    e = np.zeros(D + 1)
    e[D] = -1.0
    res = minimize(lambda z: -z[D], z0, jac=lambda z: e, method="SLSQP",
                   constraints=cons, options={"ftol": 1e-16, "maxiter": 200})
    x = res.x[:D]
    if sf.kappa == 1:
        x = x / np.linalg.norm(x)
    val = float(_rho(body, x[None])[0])
    if not np.isfinite(val) or val < t0:
        return x0, t0, False
    return x, val, bool(res.success)


def inner_radius(body, restarts: int = 16, seed: int = 0) -> InnerRadius:
    """Maximize rho: returns the inner radius ``a`` and the soul.

    A ball whose center is not cut by any other ball gives the soul
    directly. Otherwise batched subgradient ascent from ``restarts`` starts
    locates the maximum and a smooth constrained solve polishes it. Two
    polished maximizers from well-separated starts are compared to flag a
    non-unique soul.
    """
    sf = body.sf
    C, R = body.centers, body.radii
    at_centers = _rho(body, C)
    hit = np.flatnonzero(at_centers >= R - 1e-15)
    if hit.size:
        i = int(hit[np.argmax(R[hit])])
        return InnerRadius(float(at_centers[i]), C[i].copy(), True, 0.0, True)

    rng = np.random.default_rng(seed)
    X, F = _subgradient_ascent(body, _starts(body, restarts, rng))
    order = np.argsort(-F, kind="stable")
    best = int(order[0])
    x, a, ok = _polish(body, X[best])
    near = [k for k in order[1:] if F[k] >= F[best] - 1e-4]
    spread, unique = 0.0, True
    if near:
        far = max(near, key=lambda k: (float(distance(sf, X[k], X[best])), -k))
        if float(distance(sf, X[far], X[best])) > 1e-6:
            x2, a2, ok2 = _polish(body, X[far])
            spread = float(distance(sf, x, x2))
            if a2 > a:
                x, a, ok, x2 = x2, a2, ok2, x
            if spread > 1e-4 and abs(a2 - a) <= 1e-9:
                unique = False
    if not np.isfinite(a):
        raise ConvergenceError("inner radius solve produced a non-finite value", best=(x, a))
    return InnerRadius(a, x, unique, spread, ok)


# --- exact farthest-point enumeration ---------------------------------------
#
# The farthest point of the body from z is an extreme point. It lies in the
# relative interior of a stratum where some k spheres meet (k = 1..dim); such
# a stratum sits on the round sphere {|x - p| = r} inside an affine subspace,
# and the farthest point of that sphere from z has a closed form.


class _Stratum(NamedTuple):
    members: tuple
    center: np.ndarray
    radius: float
    basis: np.ndarray  # orthonormal rows spanning the stratum's directions


def _strata(body):
    cached = body._cache.get("strata")
    if cached is not None:
        return cached
    sf = body.sf
    C, R = body.centers, body.radii
    out = []
    for k in range(1, min(body.n_balls, sf.dim) + 1):
        for S in itertools.combinations(range(body.n_balls), k):
            S = list(S)
            if sf.kappa == 0:
                i0 = S[0]
                G = 2.0 * (C[S[1:]] - C[i0])
                h = (C[S[1:]] ** 2).sum(1) - C[i0] @ C[i0] - R[S[1:]] ** 2 + R[i0] ** 2
                base, r0 = C[i0], R[i0]
            else:
                G = C[S]
                h = np.cos(R[S])
                base, r0 = np.zeros(sf.ambient), 1.0
            if G.shape[0]:
                U, sv, Vt = np.linalg.svd(G)
                if sv.min() < 1e-12 * max(1.0, sv.max()):
                    continue
                p = base + np.linalg.lstsq(G, h - G @ base, rcond=None)[0]
                basis = Vt[G.shape[0]:]
            else:
                p = base.copy()
                basis = np.eye(sf.ambient)
            rr = r0 * r0 - (p - base) @ (p - base)
            if rr <= 0:
                continue
            out.append(_Stratum(tuple(S), p, math.sqrt(rr), basis))
    body._cache["strata"] = out
    return out


def _stratum_candidates(body, z):
    pts = []
    for st in _strata(body):
        if body.sf.kappa == 0:
            v = st.basis.T @ (st.basis @ (st.center - z))
        else:
            v = -(st.basis.T @ (st.basis @ z))
        nv = np.linalg.norm(v)
        u = v / nv if nv > 1e-14 else st.basis[0]
        pts.append(st.center + st.radius * u)
        if st.basis.shape[0] == 1:
            pts.append(st.center - st.radius * u)
    P = np.array(pts)
    if body.sf.kappa == 1:
        P = _normalize_rows(P)
    return P


def vertices(body) -> np.ndarray:
    """Feasible points where ``dim`` spheres meet (corners of the body)."""
    pts = []
    for st in _strata(body):
        if len(st.members) == body.sf.dim and st.basis.shape[0] == 1:
            pts += [st.center + st.radius * st.basis[0], st.center - st.radius * st.basis[0]]
    if not pts:
        return np.empty((0, body.sf.ambient))
    P = np.array(pts)
    if body.sf.kappa == 1:
        P = _normalize_rows(P)
    return P[_rho(body, P) >= -FEASIBLE_TOL]


def farthest_point(body, z) -> FarthestPoint:
    """Exact farthest point of the body from ``z``."""
    z = np.asarray(z, dtype=float)
    P = _stratum_candidates(body, z)
    ok = _rho(body, P) >= -FEASIBLE_TOL
    if not ok.any():
        raise ConvergenceError("no feasible extreme-point candidate found")
    P = P[ok]
    d = distance(body.sf, P, z)
    i = int(np.argmax(d))
    return FarthestPoint(float(d[i]), P[i].copy())


def radius_from_soul(body, soul):
    """``b``: the largest distance from the soul, attained on the boundary.

    Returns ``(b, witness)``.
    """
    fp = farthest_point(body, soul)
    return fp.distance, fp.point


def _enclosing(body, P, seed):
    c, r = kernels.miniball(P, seed)
    if body.sf.kappa == 0:
        return c, r
    nc = np.linalg.norm(c)
    if nc <= 0:
        raise GeometryError("points are not contained in an open hemisphere")
    # points on the unit sphere: the enclosing ball's center direction is the
    # cap center and |c| = cos(cap radius)
    return c / nc, math.atan2(r, nc)


def global_radius(body, samples: int = 256, seed: int = 0, max_rounds: int = 500) -> GlobalRadius:
    """Rad(X): the least over centers in X of the largest distance to X.

    Smallest enclosing ball (cap on the sphere) of a boundary sample plus the
    body's corners; then the exact farthest point from the current center is
    added until it lies within ``RAD_GAP_TOL`` of the ball. The returned
    ``rad`` is the farthest distance from the final center, an upper bound
    within the gap of the true value.
    """
    from .body import boundary_points

    pts, _ = boundary_points(body, samples, seed)
    P = [np.asarray(pts), vertices(body)]
    P.append(farthest_point(body, body.inner.soul).point[None])
    P = np.vstack(P)
    for rounds in range(1, max_rounds + 1):
        c, low = _enclosing(body, P, seed)
        fp = farthest_point(body, c)
        if fp.distance - low <= RAD_GAP_TOL:
            break
        P = np.vstack([P, fp.point[None]])
    else:
        raise ConvergenceError(f"global radius gap {fp.distance - low:.3g} after {max_rounds} rounds",
                               best=(fp.distance, c))
    if _rho(body, c[None])[0] < -1e-7:
        raise ConvergenceError("enclosing center left the body", best=(fp.distance, c))
    return GlobalRadius(fp.distance, c, low, rounds)


def interior_radius_check(body, soul, trial_count: int = 100_000, seed: int = 0) -> float:
    """Largest distance from the soul over random interior points."""
    sf = body.sf
    rng = np.random.default_rng(seed)
    i = int(np.argmin(body.radii))
    c, r = body.centers[i], body.radii[i]
    best = 0.0
    left = trial_count
    while left > 0:
        m = min(left, 65536)
        u = rng.standard_normal((m, sf.dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        s = r * rng.uniform(0, 1, m) ** (1.0 / sf.dim)
        if sf.kappa == 0:
            X = c + s[:, None] * u
        else:
            B = np.linalg.svd(c[None])[2][1:]  # tangent basis at c
            X = np.cos(s)[:, None] * c + np.sin(s)[:, None] * (u @ B)
        X = X[_rho(body, X) > 0]
        if X.shape[0]:
            best = max(best, float(np.max(distance(sf, X, soul))))
        left -= m
    return best
