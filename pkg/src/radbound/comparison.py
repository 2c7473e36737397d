"""Closed-form comparison solutions, the sampled ODE comparison, and the radius bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InadmissibleError
from .spaceform import SpaceForm, model_radius

RESIDUAL_TOL = 1e-8
HYPOTHESIS_TOL = 1e-9
ADMISSIBLE_TOL = 1e-9


@dataclass(frozen=True)
class ComparisonSolution:
    """Solution of g'' + kappa*g = 1 with g(0) = f0, g'(0) = df0."""

    kappa: int
    f0: float
    df0: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kappa == 0:
            return (self.f0 + self.df0 * t + 0.5 * t * t)[()]
        return (1.0 + (self.f0 - 1.0) * np.cos(t) + self.df0 * np.sin(t))[()]

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.kappa == 0:
            return (self.df0 + t)[()]
        return ((1.0 - self.f0) * np.sin(t) + self.df0 * np.cos(t))[()]

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.kappa == 0:
            return np.ones_like(t)[()]
        return ((1.0 - self.f0) * np.cos(t) - self.df0 * np.sin(t))[()]


def comparison_solution(kappa: int, f0: float, df0: float) -> ComparisonSolution:
    if kappa not in (0, 1):
        raise InadmissibleError(f"kappa must be 0 or 1, got {kappa!r}")
    return ComparisonSolution(kappa, float(f0), float(df0))


def first_zero(kappa: int, f0: float, df0: float, horizon: float = 2 * math.pi):
    """First t > 0 where the comparison solution reaches 1/kappa.

    Returns ``(t0, found)``. With kappa=1, ``1 - g(t) = rho*cos(t + phi)``
    where ``phi = atan2(df0, 1 - f0)``, so the zero is ``pi/2 - phi``. When
    there is no isolated zero in (0, horizon] (kappa=0, or the constant
    solution f0=1, df0=0) the horizon is returned with ``found=False``.
    """
    if kappa == 0:
        return horizon, False
    if f0 > 1.0:
        raise InadmissibleError(f"need f0 <= 1/kappa, got {f0!r}")
    w0 = 1.0 - f0
    if w0 == 0.0 and df0 == 0.0:
        return horizon, False
    t0 = math.pi / 2 - math.atan2(df0, w0)
    if t0 <= 0.0:
        # f0 == 1 with df0 > 0: the zero at t=0 is not counted; next one is pi later
        t0 += math.pi
    if t0 > horizon:
        return horizon, False
    return t0, True


@dataclass(frozen=True)
class ComparisonProfile:
    kappa: int
    f0: float
    df0: float
    t: np.ndarray
    f: np.ndarray
    t0: float
    residuals: np.ndarray = field(repr=False)


def make_profile(kappa: int, t, f, f0: float | None = None, df0: float | None = None) -> ComparisonProfile:
    """Pair sampled ``f`` with the comparison solution from matched initial data.

    ``f0`` defaults to ``f[0]``; ``df0`` defaults to a second-order one-sided
    difference at the first sample.
    """
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    if t.ndim != 1 or t.shape != f.shape or t.size < 3:
        raise InadmissibleError("profile needs matching 1-D t and f with at least 3 samples")
    if np.any(np.diff(t) <= 0):
        raise InadmissibleError("profile times must be strictly increasing")
    if f0 is None:
        f0 = float(f[0])
    if df0 is None:
        h1, h2 = t[1] - t[0], t[2] - t[1]
        df0 = float(-(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1]
                    - h1 / (h2 * (h1 + h2)) * f[2])
    if kappa == 1 and not 0 <= f0 < 1:
        raise InadmissibleError(f"need 0 <= f(0) < 1/kappa, got {f0!r}")
    t0 = first_zero(kappa, f0, df0, horizon=float(t[-1]))[0] if kappa == 1 else math.inf
    g = comparison_solution(kappa, f0, df0)
    res = f - g(t)
    res.setflags(write=False)
    return ComparisonProfile(kappa, float(f0), float(df0), t, f, t0, res)


def discrete_hypothesis_margin(kappa: int, t, f):
    """Per interior sample: (second difference of f) + kappa*f - 1 + allowance.

    The allowance is ``HYPOTHESIS_TOL + 10*h^2`` for local step h, covering the
    truncation error of the three-point formula. Nonnegative everywhere means
    the sampled data satisfies f'' + kappa*f >= 1.
    """
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    d2 = 2.0 * (h1 * f[2:] - (h1 + h2) * f[1:-1] + h2 * f[:-2]) / (h1 * h2 * (h1 + h2))
    h = np.maximum(h1, h2)
    return d2 + kappa * f[1:-1] - 1.0 + HYPOTHESIS_TOL + 10.0 * h * h


@dataclass(frozen=True)
class OdeComparison:
    status: str  # "pass", "fail" or "invalid"
    worst_residual: float
    worst_t: float
    t0: float
    hypothesis_margin: float

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def ode_compare(profile: ComparisonProfile, tol: float = RESIDUAL_TOL) -> OdeComparison:
    """Check f >= f~ on [0, t0] for sampled f with f'' + kappa*f >= 1.

    Data that violates the differential inequality is reported as
    ``status="invalid"`` rather than as a failed comparison.
    """
    margin = discrete_hypothesis_margin(profile.kappa, profile.t, profile.f)
    worst_margin = float(margin.min()) if margin.size else 0.0
    on = profile.t <= profile.t0
    res = profile.residuals[on]
    k = int(np.argmin(res))
    worst, worst_t = float(res[k]), float(profile.t[on][k])
    if worst_margin < 0:
        return OdeComparison("invalid", worst, worst_t, profile.t0, worst_margin)
    return OdeComparison("pass" if worst >= -tol else "fail", worst, worst_t, profile.t0, worst_margin)


def integrate(kappa: int, f0: float, df0: float, forcing, horizon: float, step: float = 1e-3):
    """Classical RK4 for f'' + kappa*f = forcing(t). Returns ``(t, f)``.

    Only used to manufacture sampled profiles; comparison solutions are
    always evaluated in closed form.
    """
    n = max(2, int(math.ceil(horizon / step)))
    h = horizon / n
    t = np.linspace(0.0, horizon, n + 1)
    f = np.empty(n + 1)
    y, v = float(f0), float(df0)
    f[0] = y

    def acc(s, y):
        return forcing(s) - kappa * y

    for i in range(n):
        s = t[i]
        k1y, k1v = v, acc(s, y)
        k2y, k2v = v + 0.5 * h * k1v, acc(s + 0.5 * h, y + 0.5 * h * k1y)
        k3y, k3v = v + 0.5 * h * k2v, acc(s + 0.5 * h, y + 0.5 * h * k2y)
        k4y, k4v = v + h * k3v, acc(s + h, y + h * k3y)
        y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        f[i + 1] = y
    return t, f


def bound_b(kappa: int, a: float, A: float, tol: float = ADMISSIBLE_TOL) -> float:
    """Upper bound on the radius from the soul given inner radius ``a`` and
    base-angle bound ``A``.

    kappa=0: sqrt(2a/A - a^2). kappa=1: arccos(A / (A cos a + sin a)),
    evaluated as an atan2 so it stays accurate near a = 0.
    """
    sf = SpaceForm(kappa, 2)
    R = model_radius(sf, A)
    if not (0 <= a <= R + tol):
        raise InadmissibleError(f"inner radius {a!r} outside [0, R(kappa, A) = {R!r}]")
    if kappa == 0:
        return math.sqrt(max(a * (2.0 / A - a), 0.0))
    if A == 0:
        return math.pi / 2
    D = A * math.cos(a) + math.sin(a)
    # D - A = sin a - 2A sin^2(a/2), free of cancellation for small a
    dm = math.sin(a) - 2.0 * A * math.sin(0.5 * a) ** 2
    return math.atan2(math.sqrt(max(dm * (D + A), 0.0)), A)
