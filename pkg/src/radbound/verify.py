"""End-to-end checks: the five-term chain, rigidity, boundary volume, reports."""
from __future__ import annotations

import csv
import io
import json
import math
import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .body import Body, base_angle_lower_bound, boundary_points, rho, sphere_area
from .comparison import OdeComparison, bound_b, make_profile, ode_compare
from .errors import HypothesisViolation
from .solver import global_radius, radius_from_soul
from .spaceform import SpaceForm, distance, log_map, md, model_radius, sphere_volume

CHAIN_TOL = 1e-5
RIGIDITY_TOL = 1e-5
VOLUME_RIGIDITY_TOL = 1e-7
BOUNDARY_SAMPLES = 256
PROFILE_POINTS = 1001
VOLUME_SAMPLES = 1_000_000
ACTIVE_TOL = 1e-12


@dataclass(frozen=True)
class GeometrySummary:
    a: float
    soul: np.ndarray
    b: float
    witness: np.ndarray
    rad: float
    center: np.ndarray
    A: float
    model_R: float
    bound: float
    unique_soul: bool


@dataclass(frozen=True)
class ChainResult:
    terms: tuple  # (a, rad, b, bound_b, model_R)
    slacks: tuple
    passed: bool
    tol: float


@dataclass(frozen=True)
class RigidityFinding:
    patterns: tuple  # which equalities fired: "1=5", "2=5", "1=4"
    rigid: bool
    hausdorff: float
    tol: float


@dataclass(frozen=True)
class VolumeEstimate:
    volume: float
    stderr: float
    method: str


@dataclass(frozen=True)
class VolumeCheck:
    passed: bool
    volume: float
    stderr: float
    bound: float
    equality: bool
    rigid: bool | None
    hausdorff: float | None


def summarize(body: Body, samples: int = BOUNDARY_SAMPLES, seed: int = 0) -> GeometrySummary:
    sf = body.sf
    inner = body.inner
    A = base_angle_lower_bound(body)
    R = model_radius(sf, A)
    b, witness = radius_from_soul(body, inner.soul)
    g = global_radius(body, samples=samples, seed=seed)
    return GeometrySummary(inner.a, inner.soul, b, witness, g.rad, g.center, A, R,
                           bound_b(sf.kappa, inner.a, A), inner.unique)


def chain_from_summary(s: GeometrySummary, tol: float = CHAIN_TOL) -> ChainResult:
    terms = (s.a, s.rad, s.b, s.bound, s.model_R)
    slacks = tuple(terms[i + 1] - terms[i] for i in range(4))
    return ChainResult(terms, slacks, all(x >= -tol for x in slacks), tol)


def verify_chain(body: Body, tol: float = CHAIN_TOL, samples: int = BOUNDARY_SAMPLES,
                 seed: int = 0) -> ChainResult:
    """a <= Rad <= b <= bound_b(a, A) <= R(kappa, A), each step to within ``tol``."""
    if body.sf.kappa == 0 and not base_angle_lower_bound(body) > 0:
        raise HypothesisViolation("flat chain needs a positive base-angle bound")
    return chain_from_summary(summarize(body, samples, seed), tol)


def _hausdorff_to_ball(body: Body, soul, a: float, b: float, samples: int, seed: int) -> float:
    """Hausdorff distance between the body and the ball B(soul, a).

    Exact one-sided term b - a (the ball is inscribed), cross-checked by
    sampling both boundaries.
    """
    sf = body.sf
    pts, _ = boundary_points(body, samples, seed)
    out_x = float(np.max(np.maximum(distance(sf, pts, soul) - a, 0.0)))
    rng = np.random.default_rng([seed, 1 << 20])
    u = rng.standard_normal((samples, sf.ambient))
    if sf.kappa == 0:
        Y = soul + a * u / np.linalg.norm(u, axis=1, keepdims=True)
    else:
        u -= np.outer(u @ soul, soul)
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        Y = math.cos(a) * soul + math.sin(a) * u
    out_b = float(np.max(np.maximum(-rho(body, Y), 0.0)))
    return max(b - a, out_x, out_b)


def check_rigidity(body: Body, summary: GeometrySummary, tol: float = RIGIDITY_TOL,
                   samples: int = BOUNDARY_SAMPLES, seed: int = 0) -> RigidityFinding:
    """Detect the equality cases of the chain and test whether the body is the
    metric ball about its soul.

    Any of a = R, Rad = R, or a = bound_b (within ``tol``) predicts a ball;
    the finding is rigid when the Hausdorff distance to B(soul, a) is at most
    ``5 * tol``.
    """
    s = summary
    fired = []
    if s.a >= s.model_R - tol:
        fired.append("1=5")
    if s.rad >= s.model_R - tol:
        fired.append("2=5")
    if s.a >= s.bound - tol:
        fired.append("1=4")
    hd = _hausdorff_to_ball(body, s.soul, s.a, s.b, samples, seed)
    return RigidityFinding(tuple(fired), bool(fired) and hd <= 5 * tol, hd, tol)


def _arc_measure(body: Body, i: int) -> float:
    """Angle measure of circle i lying inside every other disk."""
    ci, ri = body.centers[i], body.radii[i]
    keep = [(0.0, 2 * math.pi)]
    for j, (cj, rj) in enumerate(zip(body.centers, body.radii)):
        if j == i:
            continue
        v = cj - ci
        d = math.hypot(v[0], v[1])
        if d == 0.0:
            if rj > ri or (rj == ri and j > i):
                continue
            return 0.0
        k = (ri * ri + d * d - rj * rj) / (2 * ri * d)
        if k <= -1.0:
            continue
        if k >= 1.0:
            return 0.0
        w = math.acos(k)
        phi = math.atan2(v[1], v[0])
        lo = (phi - w) % (2 * math.pi)
        pieces = [(lo, lo + 2 * w), (lo - 2 * math.pi, lo + 2 * w - 2 * math.pi)]
        nxt = []
        for a0, a1 in keep:
            for b0, b1 in pieces:
                s0, s1 = max(a0, b0), min(a1, b1)
                if s1 > s0:
                    nxt.append((s0, s1))
        keep = nxt
        if not keep:
            return 0.0
    return sum(b - a for a, b in keep)


def boundary_volume(body: Body, method: str = "auto", seed: int = 0,
                    samples: int = VOLUME_SAMPLES) -> VolumeEstimate:
    """(n-1)-volume of the boundary of a flat body.

    n=2: exact arc lengths from angular interval intersection. Otherwise
    Monte Carlo per sphere: (fraction inside all other balls) times the
    sphere's area, with the binomial standard error.
    """
    sf = body.sf
    if sf.kappa != 0:
        raise HypothesisViolation("boundary volume is implemented for kappa=0 only")
    if method == "auto":
        method = "exact" if sf.dim == 2 else "monte-carlo"
    if method == "exact":
        if sf.dim != 2:
            raise HypothesisViolation("exact boundary volume needs dim=2")
        total = sum(body.radii[i] * _arc_measure(body, i) for i in range(body.n_balls))
        return VolumeEstimate(float(total), 0.0, "exact")
    if method != "monte-carlo":
        raise ValueError(f"unknown volume method {method!r}")
    if sf.dim >= 4:
        warnings.warn("Monte Carlo boundary volume in dim >= 4: variance grows with dimension",
                      stacklevel=2)
    vol, var = 0.0, 0.0
    for i in range(body.n_balls):
        rng = np.random.default_rng([seed, i])
        u = rng.standard_normal((samples, sf.dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        pts = body.centers[i] + body.radii[i] * u
        hits = kernels.count_inside(pts, body.centers, body.radii, 0, i, 0.0)
        p = hits / samples
        area = sphere_area(body, i)
        vol += p * area
        var += area * area * p * (1 - p) / samples
    return VolumeEstimate(float(vol), float(math.sqrt(var)), "monte-carlo")


def check_volume_bound(body: Body, seed: int = 0, samples: int = VOLUME_SAMPLES,
                       method: str = "auto", tol: float = 1e-9) -> VolumeCheck:
    """Boundary volume at most that of the unit sphere when the base-angle bound is >= 1.

    When the exact perimeter (n=2) meets the bound, the body must be the unit
    disk; that is tested by the Hausdorff distance to the unit ball about
    the soul.
    """
    sf = body.sf
    if sf.kappa != 0:
        raise HypothesisViolation("volume bound is stated for kappa=0")
    if base_angle_lower_bound(body) < 1 - 1e-12:
        raise HypothesisViolation("volume bound needs base-angle bound >= 1 (all radii <= 1)")
    est = boundary_volume(body, method=method, seed=seed, samples=samples)
    bound = sphere_volume(sf.dim, 1.0)
    passed = est.volume <= bound + 3 * est.stderr + tol
    equality = est.method == "exact" and abs(est.volume - bound) <= VOLUME_RIGIDITY_TOL
    rigid = hd = None
    if equality:
        soul = body.inner.soul
        b, _ = radius_from_soul(body, soul)
        hd = _hausdorff_to_ball(body, soul, 1.0, max(b, 1.0), 256, seed)
        hd = max(hd, 1.0 - body.inner.a)
        rigid = hd <= 5 * VOLUME_RIGIDITY_TOL
        passed = passed and rigid
    return VolumeCheck(bool(passed), est.volume, est.stderr, bound, equality, rigid, hd)


def foot_angle(body: Body, soul, direction) -> float:
    """Angle between ``direction`` at the soul and the nearest foot-point directions."""
    sf = body.sf
    slack = body.radii - distance(sf, body.centers, soul)
    active = np.flatnonzero(slack <= slack.min() + ACTIVE_TOL)
    best = -1.0
    for i in active:
        u, d = log_map(sf, soul, body.centers[i])
        if u is None or d < 1e-12:
            return 0.0
        best = max(best, float(-u @ direction))
    return math.acos(min(1.0, max(-1.0, best)))


def extract_profile(body: Body, summary: GeometrySummary, n: int = PROFILE_POINTS):
    """Sample h = rho along the geodesic from the soul to the b-witness and map
    it to f = md(R - h). Returns ``(profile, alpha0)``.
    """
    sf = body.sf
    s = summary
    u, b = log_map(sf, s.soul, s.witness)
    if u is None:
        raise HypothesisViolation("soul and witness coincide; no profile geodesic")
    t = np.linspace(0.0, b, n)
    if sf.kappa == 0:
        pts = s.soul + t[:, None] * u
    else:
        pts = np.cos(t)[:, None] * s.soul + np.sin(t)[:, None] * u
    h = rho(body, pts)
    ell = s.model_R
    f = md(sf, np.maximum(ell - h, 0.0))
    alpha0 = foot_angle(body, s.soul, u)
    if sf.kappa == 0:
        df0 = (ell - s.a) * math.cos(alpha0)
    else:
        df0 = math.sin(ell - s.a) * math.cos(alpha0)
    f0 = float(md(sf, ell - s.a))
    return make_profile(sf.kappa, t, f, f0, df0), alpha0


@dataclass
class VerificationReport:
    body: dict
    seed: int
    tolerances: dict
    summary: GeometrySummary
    chain: ChainResult
    rigidity: RigidityFinding
    profile: OdeComparison
    alpha0: float
    volume: VolumeCheck | None
    notes: list
    runtimes: dict

    @property
    def passed(self) -> bool:
        ok = self.chain.passed and self.profile.passed
        if self.rigidity.patterns:
            ok = ok and self.rigidity.rigid
        if self.volume is not None:
            ok = ok and self.volume.passed
        return ok

    def to_dict(self, timings: bool = False) -> dict:
        s, c, r, p = self.summary, self.chain, self.rigidity, self.profile
        out = {
            "passed": self.passed,
            "body": self.body,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "summary": {
                "a": s.a, "soul": s.soul.tolist(), "rad": s.rad, "center": s.center.tolist(),
                "b": s.b, "witness": s.witness.tolist(), "A": s.A, "model_R": s.model_R,
                "bound_b": s.bound, "unique_soul": s.unique_soul,
            },
            "chain": {"terms": list(c.terms), "slacks": list(c.slacks), "passed": c.passed},
            "rigidity": {"patterns": list(r.patterns), "rigid": r.rigid, "hausdorff": r.hausdorff},
            "profile": {
                "status": p.status, "worst_residual": p.worst_residual, "worst_t": p.worst_t,
                "t0": p.t0 if math.isfinite(p.t0) else None,
                "hypothesis_margin": p.hypothesis_margin, "alpha0": self.alpha0,
            },
            "volume": None if self.volume is None else {
                "passed": self.volume.passed, "volume": self.volume.volume,
                "stderr": self.volume.stderr, "bound": self.volume.bound,
                "equality": self.volume.equality, "rigid": self.volume.rigid,
                "hausdorff": self.volume.hausdorff,
            },
            "notes": list(self.notes),
        }
        if timings:
            out["runtimes"] = self.runtimes
        return out

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2)


def verify_body(body: Body, seed: int = 0, tol: float = CHAIN_TOL,
                samples: int = BOUNDARY_SAMPLES, volume_samples: int = VOLUME_SAMPLES) -> VerificationReport:
    """Run every check on one body and assemble the report."""
    times = {}
    t = time.perf_counter()
    s = summarize(body, samples, seed)
    times["summary"] = time.perf_counter() - t
    chain = chain_from_summary(s, tol)
    t = time.perf_counter()
    rig = check_rigidity(body, s, tol, samples, seed)
    times["rigidity"] = time.perf_counter() - t
    t = time.perf_counter()
    profile, alpha0 = extract_profile(body, s)
    cmp = ode_compare(profile)
    times["profile"] = time.perf_counter() - t
    notes = []
    vol = None
    if body.sf.kappa == 0 and s.A >= 1 - 1e-12:
        t = time.perf_counter()
        vol = check_volume_bound(body, seed=seed, samples=volume_samples)
        times["volume"] = time.perf_counter() - t
    elif body.sf.kappa == 0:
        notes.append("volume bound skipped: base-angle bound below 1")
    else:
        notes.append("volume bound not checked on the sphere")
        notes.append("lens rigidity for boundaries isometric to the round sphere is not checked")
    if not s.unique_soul:
        notes.append("soul not unique: restarts found distinct maximizers")
    tolerances = {"chain": tol, "rigidity": tol, "residual": 1e-8, "membership": 1e-12,
                  "boundary_samples": samples, "volume_samples": volume_samples}
    return VerificationReport(body.describe(), seed, tolerances, s, chain, rig, cmp, alpha0,
                              vol, notes, times)


CSV_COLUMNS = ("index", "seed", "kappa", "dim", "balls", "A", "a", "rad", "b", "bound_b",
               "model_R", "chain_pass", "profile_pass")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def chain_row(index: int, seed: int, body: Body, samples: int = BOUNDARY_SAMPLES,
              tol: float = CHAIN_TOL) -> list:
    s = summarize(body, samples, seed)
    chain = chain_from_summary(s, tol)
    profile, _ = extract_profile(body, s)
    cmp = ode_compare(profile)
    return [index, seed, body.sf.kappa, body.sf.dim, body.n_balls, s.A, s.a, s.rad, s.b,
            s.bound, s.model_R, chain.passed, cmp.passed]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def default_radius_range(kappa: int, A: float):
    """(rmin, rmax) for generated bodies: rmax = R(kappa, A), kept below pi/2 on the sphere."""
    R = model_radius(SpaceForm(kappa, 2), A)
    rmax = min(R, math.pi / 2 - 0.05) if kappa == 1 else R
    return 0.3 * rmax, rmax


def sweep_plan(kappa: int, dims, As, count: int, seed: int, balls=(2, 4),
               rmin: float | None = None, rmax: float | None = None):
    """Deterministic list of body parameters: one tuple per body index."""
    plan = []
    for k in range(count):
        dim = dims[k % len(dims)]
        A = As[(k // len(dims)) % len(As)]
        lo, hi = default_radius_range(kappa, A)
        r0 = lo if rmin is None else rmin
        r1 = hi if rmax is None else rmax
        if r1 > hi + 1e-15:
            raise HypothesisViolation(
                f"radius range up to {r1} exceeds the model radius {hi} for kappa={kappa}, A={A}")
        plan.append((k, seed, kappa, dim, A, tuple(balls), r0, r1))
    return plan


def plan_body(item) -> Body:
    from .body import random_body

    k, seed, kappa, dim, A, balls, r0, r1 = item
    rng = np.random.default_rng([seed, k])
    n = int(rng.integers(balls[0], balls[1] + 1))
    return random_body(SpaceForm(kappa, dim), n, r0, r1, rng)


def _plan_row(item, samples=BOUNDARY_SAMPLES, tol=CHAIN_TOL):
    return chain_row(item[0], item[1], plan_body(item), samples, tol)


def sweep(plan, workers: int = 1, samples: int = BOUNDARY_SAMPLES, tol: float = CHAIN_TOL) -> list:
    """Chain rows for every planned body, in plan order regardless of ``workers``."""
    if workers <= 1:
        return [_plan_row(p, samples, tol) for p in plan]
    from concurrent.futures import ProcessPoolExecutor
    from functools import partial

    with ProcessPoolExecutor(workers) as ex:
        return list(ex.map(partial(_plan_row, samples=samples, tol=tol), plan, chunksize=8))
