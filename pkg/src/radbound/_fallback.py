"""Pure numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` module; selected
by :mod:`radbound.kernels` when the extension is not built.
"""
import numpy as np

_CHUNK = 1 << 16
# relative slack on squared radius for the enclosing-ball containment test
_MB_REL = 1e-12


def slack_min(points, centers, radii, kappa, exclude=-1):
    """min over balls j != exclude of radii[j] - dist(points[i], centers[j])."""
    points = np.asarray(points, dtype=float)
    out = np.full(points.shape[0], np.inf)
    keep = [j for j in range(len(radii)) if j != exclude]
    if not keep:
        return out
    C = np.asarray(centers, dtype=float)[keep]
    R = np.asarray(radii, dtype=float)[keep]
    for s in range(0, points.shape[0], _CHUNK):
        P = points[s:s + _CHUNK, None, :]
        if kappa == 0:
            d = np.sqrt(((P - C) ** 2).sum(axis=2))
        else:
            d = 2.0 * np.arctan2(
                np.sqrt(((P - C) ** 2).sum(axis=2)), np.sqrt(((P + C) ** 2).sum(axis=2))
            )
        out[s:s + _CHUNK] = (R - d).min(axis=1)
    return out


def count_inside(points, centers, radii, kappa, exclude, tol):
    """Number of points with slack_min(..., exclude) >= -tol."""
    return int(np.count_nonzero(slack_min(points, centers, radii, kappa, exclude) >= -tol))


def _circumball(P, support):
    b0 = P[support[0]]
    if len(support) == 1:
        return b0.copy(), 0.0
    V = P[support[1:]] - b0
    M = 2.0 * (V @ V.T)
    rhs = (V * V).sum(axis=1)
    try:
        lam = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(M, rhs, rcond=None)[0]
    c = b0 + lam @ V
    return c, float(((c - b0) ** 2).sum())


def miniball(points):
    """Smallest enclosing ball of a point set, move-to-front variant.

    Points are processed in the given order; callers shuffle beforehand.
    Returns ``(center, squared_radius)``.
    """
    P = np.ascontiguousarray(points, dtype=float)
    n, d = P.shape
    if n == 0:
        raise ValueError("miniball of an empty point set")
    L = np.arange(n)

    def mtf(end, support):
        nonlocal L
        if support:
            c, r2 = _circumball(P, support)
        else:
            c, r2 = None, -1.0
        if len(support) == d + 1:
            return c, r2
        i = 0
        while i < end:
            if c is None:
                j = i
            else:
                idx = L[i:end]
                d2 = ((P[idx] - c) ** 2).sum(axis=1)
                bad = np.flatnonzero(d2 > r2 * (1.0 + _MB_REL))
                if bad.size == 0:
                    break
                j = i + int(bad[0])
            p = L[j]
            c, r2 = mtf(j, support + [p])
            L = np.concatenate(([p], np.delete(L, j)))
            i = j + 1
        return c, r2

    return mtf(n, [])
