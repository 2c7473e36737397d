"""Hot-kernel dispatch: compiled extension when built, numpy fallback otherwise."""
import numpy as np

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_impl = _compiled if _compiled is not None else _fallback
BACKEND = "cython" if _compiled is not None else "python"


def available_backends():
    return ["cython", "python"] if _compiled is not None else ["python"]


def use_backend(name):
    """Switch the active backend ("cython" or "python"); returns the previous one."""
    global _impl, BACKEND
    if name == "cython" and _compiled is None:
        raise ImportError("compiled kernels are not built")
    if name not in ("cython", "python"):
        raise ValueError(f"unknown backend {name!r}")
    prev = BACKEND
    _impl = _compiled if name == "cython" else _fallback
    BACKEND = name
    return prev


def slack_min(points, centers, radii, kappa, exclude=-1):
    points = np.ascontiguousarray(np.atleast_2d(points), dtype=float)
    return _impl.slack_min(points, np.ascontiguousarray(centers, dtype=float),
                           np.ascontiguousarray(radii, dtype=float), int(kappa), int(exclude))


def count_inside(points, centers, radii, kappa, exclude, tol):
    points = np.ascontiguousarray(points, dtype=float)
    return _impl.count_inside(points, np.ascontiguousarray(centers, dtype=float),
                              np.ascontiguousarray(radii, dtype=float), int(kappa),
                              int(exclude), float(tol))


def miniball(points, seed=0):
    """Exact smallest enclosing Euclidean ball of a finite point set.

    Returns ``(center, radius)``. The input is shuffled with ``seed`` so the
    expected running time is linear and the result is reproducible.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValueError("miniball needs a nonempty (N, d) array")
    order = np.random.default_rng(seed).permutation(P.shape[0])
    c, r2 = _impl.miniball(np.ascontiguousarray(P[order]))
    return np.asarray(c, dtype=float), float(np.sqrt(max(r2, 0.0)))
