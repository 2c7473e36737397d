import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radbound.comparison import (
    bound_b, comparison_solution, discrete_hypothesis_margin, first_zero, integrate,
    make_profile, ode_compare,
)
from radbound.errors import InadmissibleError
from radbound.spaceform import SpaceForm, model_radius


def bisect_zero(g, lo, hi, target):
    """First crossing of g = target on a fine grid, then bisection."""
    t = np.linspace(lo, hi, 200_001)
    v = g(t) - target
    k = int(np.argmax(v[1:] >= 0)) + 1
    a, b = t[k - 1], t[k]
    for _ in range(100):
        m = 0.5 * (a + b)
        if g(m) - target >= 0:
            b = m
        else:
            a = m
    return 0.5 * (a + b)


def test_comparison_solution_examples():
    g = comparison_solution(0, 0.0, 0.0)
    assert g(2.0) == 2.0
    g = comparison_solution(1, 0.0, 0.0)
    assert g(math.pi) == pytest.approx(2.0, abs=1e-15)
    assert g(math.pi / 2) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(InadmissibleError):
        comparison_solution(-1, 0.0, 0.0)


@pytest.mark.parametrize("kappa", [0, 1])
def test_comparison_solution_solves_ode(kappa):
    rng = np.random.default_rng(kappa)
    t = np.linspace(0, 3, 301)
    for _ in range(20):
        f0, df0 = rng.uniform(0, 0.9), rng.uniform(-1, 1)
        g = comparison_solution(kappa, f0, df0)
        assert g(0.0) == pytest.approx(f0, abs=1e-15) and g.derivative(0.0) == pytest.approx(df0, abs=1e-15)
        assert np.max(np.abs(g.second_derivative(t) + kappa * g(t) - 1)) <= 1e-12
        h = 1e-4
        fd = (g(t + h) - 2 * g(t) + g(t - h)) / (h * h)
        assert np.max(np.abs(fd + kappa * g(t) - 1)) <= 1e-5


def test_geometric_initial_data_matches_closed_forms():
    # kappa=1: f~ = 1 - cos(l-a)cos t + sin(l-a)cos(alpha0) sin t
    l, a, al = 1.2, 0.4, 0.3
    g = comparison_solution(1, 1 - math.cos(l - a), math.sin(l - a) * math.cos(al))
    t = np.linspace(0, 2, 50)
    assert np.allclose(g(t), 1 - math.cos(l - a) * np.cos(t) + math.sin(l - a) * math.cos(al) * np.sin(t))
    g = comparison_solution(0, 0.5 * (l - a) ** 2, (l - a) * math.cos(al))
    assert np.allclose(g(t), 0.5 * ((l - a) ** 2 + 2 * (l - a) * math.cos(al) * t + t * t))


def test_first_zero_examples():
    assert first_zero(1, 0.0, 0.0) == (pytest.approx(math.pi / 2, abs=1e-15), True)
    t0, found = first_zero(1, 0.0, 1.0)
    assert found
    g = comparison_solution(1, 0.0, 1.0)
    assert t0 == pytest.approx(bisect_zero(g, 0, 2 * math.pi, 1.0), abs=1e-12)
    assert t0 == pytest.approx(math.pi / 4, abs=1e-15)
    assert first_zero(1, 1.0, 0.0) == (2 * math.pi, False)
    assert first_zero(0, 0.3, 0.1, horizon=5.0) == (5.0, False)
    with pytest.raises(InadmissibleError):
        first_zero(1, 1.5, 0.0)


def test_first_zero_against_bisection():
    rng = np.random.default_rng(4)
    for _ in range(50):
        f0, df0 = rng.uniform(0, 0.99), rng.uniform(-2, 2)
        g = comparison_solution(1, f0, df0)
        t0, found = first_zero(1, f0, df0)
        assert found
        assert t0 == pytest.approx(bisect_zero(g, 0, 2 * math.pi, 1.0), abs=1e-9)


def test_ode_compare_equality():
    t = np.linspace(0, 1, 1001)
    g = comparison_solution(0, 0.0, 0.0)
    res = ode_compare(make_profile(0, t, g(t), 0.0, 0.0))
    assert res.passed and abs(res.worst_residual) <= 1e-15


def test_ode_compare_forcing_above_one():
    t, f = integrate(0, 0.0, 0.0, lambda s: 1.1, 1.0)
    p = make_profile(0, t, f, 0.0, 0.0)
    res = ode_compare(p)
    assert res.passed
    assert np.all(p.residuals[1:] > 0)
    assert p.residuals[-1] == pytest.approx(0.05, abs=1e-10)


def test_ode_compare_sphere_example():
    t, f = integrate(1, 0.5, -0.2, lambda s: 1 + s * s, 3.0)
    p = make_profile(1, t, f, 0.5, -0.2)
    assert p.t0 == pytest.approx(first_zero(1, 0.5, -0.2)[0])
    res = ode_compare(p)
    assert res.passed and res.worst_residual >= -1e-12


def test_ode_compare_rejects_subunit_forcing():
    t, f = integrate(0, 0.0, 0.0, lambda s: 0.9, 1.0)
    res = ode_compare(make_profile(0, t, f, 0.0, 0.0))
    assert res.status == "invalid" and not res.passed
    assert res.hypothesis_margin < 0


def test_ode_compare_detects_violation():
    t = np.linspace(0, 1, 201)
    g = comparison_solution(0, 0.1, 0.0)
    f = g(t).copy()
    f[100:] -= 1e-3 * (t[100:] - t[100]) ** 3  # dips, but f'' >= 1 breaks too
    res = ode_compare(make_profile(0, t, f, 0.1, 0.0))
    assert not res.passed


def test_randomized_forcings_pass():
    rng = np.random.default_rng(17)
    for k in range(100):
        kappa = k % 2
        knots = np.sort(rng.uniform(0, 2, 5))
        vals = rng.uniform(0, 2, 5)
        forcing = lambda s, knots=knots, vals=vals: 1.0 + float(np.interp(s, knots, vals))
        f0 = rng.uniform(0, 0.8)
        df0 = rng.uniform(-0.5, 0.5)
        t, f = integrate(kappa, f0, df0, forcing, 2.0, step=2e-3)
        res = ode_compare(make_profile(kappa, t, f, f0, df0))
        assert res.passed, (k, res)


def test_integrate_matches_closed_form():
    for kappa in (0, 1):
        t, f = integrate(kappa, 0.2, 0.3, lambda s: 1.0, 2.0)
        g = comparison_solution(kappa, 0.2, 0.3)
        assert np.max(np.abs(f - g(t))) <= 1e-12


def test_hypothesis_margin_shape():
    t = np.linspace(0, 1, 11)
    assert discrete_hypothesis_margin(0, t, 0.5 * t * t).shape == (9,)


def test_make_profile_validation():
    with pytest.raises(InadmissibleError):
        make_profile(0, [0, 1], [0, 1])
    with pytest.raises(InadmissibleError):
        make_profile(0, [0, 2, 1], [0, 1, 2])
    with pytest.raises(InadmissibleError):
        make_profile(1, [0, 1, 2], [1.0, 1, 1])


def test_bound_b_examples():
    assert bound_b(0, 0.5, 1.0) == pytest.approx(math.sqrt(0.75), abs=1e-15)
    assert bound_b(0, 1.0, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert bound_b(1, 0.0, 1.0) == 0.0
    assert bound_b(1, math.pi / 4, 1.0) == pytest.approx(math.pi / 4, abs=1e-12)
    with pytest.raises(InadmissibleError):
        bound_b(0, 1.5, 1.0)
    with pytest.raises(InadmissibleError):
        bound_b(0, -0.1, 1.0)


def test_bound_b_matches_arccos_form():
    rng = np.random.default_rng(0)
    for _ in range(200):
        A = rng.uniform(0.01, 5)
        a = rng.uniform(0.05, 0.95) * math.atan(1 / A)
        expected = math.acos(A / (A * math.cos(a) + math.sin(a)))
        assert bound_b(1, a, A) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("kappa", [0, 1])
def test_bound_b_monotone_and_capped(kappa):
    rng = np.random.default_rng(10 + kappa)
    sf = SpaceForm(kappa, 2)
    for _ in range(10_000):
        A = rng.uniform(0.05, 10) if kappa == 0 else rng.uniform(0, 10)
        R = model_radius(sf, A)
        a1, a2 = np.sort(rng.uniform(0, R, 2))
        b1, b2 = bound_b(kappa, a1, A), bound_b(kappa, a2, A)
        assert b1 <= b2 + 1e-12
        assert a2 <= b2 + 1e-12
        assert b2 <= R + 1e-12


@given(st.floats(min_value=1e-3, max_value=1e3))
@settings(max_examples=200)
def test_bound_b_endpoint(A):
    for kappa in (0, 1):
        R = model_radius(SpaceForm(kappa, 2), A)
        assert abs(bound_b(kappa, R, A) - R) <= 1e-9 * max(1.0, R)
