"""Independent brute-force oracles for flat 2-D ball intersections.

Nothing here calls into radbound: distances, membership, the boundary
parametrization and the enclosing circle are all recomputed from scratch.
"""
import math
import random

import numpy as np

GOLDEN = (math.sqrt(5) - 1) / 2


def grid_rho(centers, radii, X):
    d = np.sqrt(((X[:, None, :] - centers[None]) ** 2).sum(axis=2))
    return (radii[None] - d).min(axis=1)


def _bbox(centers, radii):
    lo = (centers - radii[:, None]).max(axis=0)
    hi = (centers + radii[:, None]).min(axis=0)
    return lo, hi


def inner_radius(centers, radii, step=1e-3, levels=12, half=40):
    """Max of rho on a full grid at ``step``, then nested zoomed grids."""
    centers = np.asarray(centers, float)
    radii = np.asarray(radii, float)
    lo, hi = _bbox(centers, radii)
    xs = np.arange(lo[0], hi[0] + step, step)
    ys = np.arange(lo[1], hi[1] + step, step)
    best, bx = -np.inf, None
    for y0 in range(0, len(ys), 256):
        X, Y = np.meshgrid(xs, ys[y0:y0 + 256])
        P = np.column_stack([X.ravel(), Y.ravel()])
        v = grid_rho(centers, radii, P)
        k = int(np.argmax(v))
        if v[k] > best:
            best, bx = float(v[k]), P[k]
    # each level: a (2*half+1)^2 grid spanning +-10 previous steps, spacing h/4
    h = step
    for _ in range(levels):
        h = h / 4
        g = np.arange(-half, half + 1) * h
        X, Y = np.meshgrid(bx[0] + g, bx[1] + g)
        P = np.column_stack([X.ravel(), Y.ravel()])
        v = grid_rho(centers, radii, P)
        k = int(np.argmax(v))
        if v[k] > best:
            best, bx = float(v[k]), P[k]
    return best, bx


def radial(centers, radii, o, phi):
    """Distance from interior point o to the boundary along direction phi."""
    phi = np.atleast_1d(phi)
    u = np.column_stack([np.cos(phi), np.sin(phi)])
    w = o - centers  # (m, 2)
    uw = u @ w.T  # (N, m)
    disc = uw ** 2 - (w * w).sum(axis=1)[None] + radii[None] ** 2
    return (-uw + np.sqrt(disc)).min(axis=1)


def boundary_point(centers, radii, o, phi):
    r = radial(centers, radii, o, phi)
    return o + r[:, None] * np.column_stack([np.cos(phi), np.sin(phi)])


def golden_max(f, a, b, iters=80):
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def radius_from_point(centers, radii, o, n=100_000):
    """max over the boundary of |o - x|: dense angular scan + golden section."""
    centers = np.asarray(centers, float)
    radii = np.asarray(radii, float)
    phi = np.linspace(0, 2 * math.pi, n, endpoint=False)
    r = radial(centers, radii, o, phi)
    k = int(np.argmax(r))
    dphi = 2 * math.pi / n
    x, v = golden_max(lambda p: float(radial(centers, radii, o, p)[0]), phi[k] - dphi, phi[k] + dphi)
    return max(v, float(r[k]))


# --- smallest enclosing circle, incremental (2-D only) -----------------------

def _circle_two(a, b):
    cx, cy = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
    return cx, cy, max(math.hypot(cx - a[0], cy - a[1]), math.hypot(cx - b[0], cy - b[1]))


def _circle_three(a, b, c):
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2
    if d == 0:
        return None
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
              + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
              + (cx * cx + cy * cy) * (bx - ax)) / d
    r = max(math.hypot(x - p[0], y - p[1]) for p in (a, b, c))
    return x, y, r


def _inside(c, p):
    return c is not None and math.hypot(p[0] - c[0], p[1] - c[1]) <= c[2] * (1 + 1e-14)


def _cross(x0, y0, x1, y1, x2, y2):
    return (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)


def _with_two(points, p, q):
    circ = _circle_two(p, q)
    left = right = None
    for r in points:
        if _inside(circ, r):
            continue
        cross = _cross(p[0], p[1], q[0], q[1], r[0], r[1])
        c = _circle_three(p, q, r)
        if c is None:
            continue
        cc = _cross(p[0], p[1], q[0], q[1], c[0], c[1])
        if cross > 0 and (left is None or cc > _cross(p[0], p[1], q[0], q[1], left[0], left[1])):
            left = c
        elif cross < 0 and (right is None or cc < _cross(p[0], p[1], q[0], q[1], right[0], right[1])):
            right = c
    if left is None and right is None:
        return circ
    if left is None:
        return right
    if right is None:
        return left
    return left if left[2] <= right[2] else right


def _with_one(points, p):
    c = (p[0], p[1], 0.0)
    for i, q in enumerate(points):
        if not _inside(c, q):
            c = _circle_two(p, q) if c[2] == 0.0 else _with_two(points[: i + 1], p, q)
    return c


def enclosing_circle(points, seed=0):
    pts = [(float(x), float(y)) for x, y in points]
    random.Random(seed).shuffle(pts)
    c = None
    for i, p in enumerate(pts):
        if c is None or not _inside(c, p):
            c = _with_one(pts[: i + 1], p)
    return c


def global_radius(centers, radii, o, n=20_000, rounds=3):
    """Enclosing circle of a dense boundary scan, refined by golden section
    around the points that are farthest from the current center."""
    centers = np.asarray(centers, float)
    radii = np.asarray(radii, float)
    phi = np.linspace(0, 2 * math.pi, n, endpoint=False)
    P = boundary_point(centers, radii, o, phi)
    dphi = 2 * math.pi / n
    extra = []
    for _ in range(rounds):
        cx, cy, r = enclosing_circle(np.vstack([P] + extra) if extra else P)
        d = np.hypot(P[:, 0] - cx, P[:, 1] - cy)
        for k in np.argsort(-d)[:6]:
            f = lambda p: float(np.hypot(*(boundary_point(centers, radii, o, p)[0] - (cx, cy))))
            x, _ = golden_max(f, phi[k] - dphi, phi[k] + dphi)
            extra.append(boundary_point(centers, radii, o, x))
    cx, cy, r = enclosing_circle(np.vstack([P] + extra))
    return r, np.array([cx, cy])


def sphere_arc_fraction(ci, ri, others, n, rng):
    """Monte Carlo fraction of circle (ci, ri) inside every disk in ``others``."""
    th = rng.uniform(0, 2 * math.pi, n)
    P = ci + ri * np.column_stack([np.cos(th), np.sin(th)])
    ok = np.ones(n, bool)
    for c, r in others:
        ok &= ((P - c) ** 2).sum(axis=1) <= r * r
    return ok.mean()
