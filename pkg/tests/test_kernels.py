import numpy as np
import pytest

import oracles
from radbound import kernels


@pytest.fixture
def restore_backend():
    prev = kernels.BACKEND
    yield
    kernels.use_backend(prev)


def run_both(fn, *args, **kw):
    out = {}
    for name in kernels.available_backends():
        kernels.use_backend(name)
        out[name] = fn(*args, **kw)
    return out


def test_unknown_backend_rejected(restore_backend):
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


@pytest.mark.parametrize("kappa", [0, 1])
def test_slack_min_backends_agree(kappa, restore_backend):
    rng = np.random.default_rng(0)
    dim = 4 if kappa else 3
    P = rng.standard_normal((5000, dim))
    C = rng.standard_normal((6, dim))
    if kappa:
        P /= np.linalg.norm(P, axis=1, keepdims=True)
        C /= np.linalg.norm(C, axis=1, keepdims=True)
    r = rng.uniform(0.3, 1.4, 6)
    for exclude in (-1, 2):
        res = run_both(kernels.slack_min, P, C, r, kappa, exclude)
        vals = list(res.values())
        for v in vals[1:]:
            assert np.max(np.abs(v - vals[0])) <= 1e-13
        # direct formula
        if kappa == 0:
            d = np.linalg.norm(P[:, None] - C[None], axis=2)
        else:
            d = np.arccos(np.clip(P @ C.T, -1, 1))
        s = r[None] - d
        if exclude >= 0:
            s[:, exclude] = np.inf
        assert np.max(np.abs(vals[0] - s.min(axis=1))) <= 1e-7


def test_count_inside_backends_agree(restore_backend):
    rng = np.random.default_rng(1)
    P = rng.uniform(-1, 1, (20000, 2))
    C = np.array([[0.5, 0.0], [-0.5, 0.0]])
    r = np.array([1.0, 1.0])
    res = run_both(kernels.count_inside, P, C, r, 0, -1, 0.0)
    assert len(set(int(v) for v in res.values())) == 1
    d = np.linalg.norm(P[:, None] - C[None], axis=2)
    assert int(next(iter(res.values()))) == int(np.all(d <= r, axis=1).sum())


def test_miniball_matches_circle_oracle(restore_backend):
    rng = np.random.default_rng(2)
    for _ in range(20):
        P = rng.standard_normal((200, 2))
        cx, cy, r = oracles.enclosing_circle(P)
        for c, rr in run_both(kernels.miniball, P).values():
            assert abs(rr - r) <= 1e-12
            assert np.hypot(c[0] - cx, c[1] - cy) <= 1e-9


@pytest.mark.parametrize("dim", [3, 5])
def test_miniball_optimality(dim, restore_backend):
    rng = np.random.default_rng(dim)
    P = rng.standard_normal((300, dim))
    for c, r in run_both(kernels.miniball, P, seed=4).values():
        d = np.linalg.norm(P - c, axis=1)
        assert d.max() <= r * (1 + 1e-12)
        # KKT: the center is a convex combination of the support points
        S = P[d >= r * (1 - 1e-9)]
        assert 2 <= len(S) <= dim + 1
        M = np.vstack([S.T, np.ones(len(S))])
        lam, *_ = np.linalg.lstsq(M, np.append(c, 1.0), rcond=None)
        assert np.allclose(M @ lam, np.append(c, 1.0), atol=1e-9)
        assert lam.min() >= -1e-9


def test_miniball_degenerate_inputs(restore_backend):
    for c, r in run_both(kernels.miniball, np.array([[1.0, 2.0]] * 5)).values():
        assert r == 0.0 and np.allclose(c, [1, 2])
    line = np.column_stack([np.linspace(0, 4, 50), np.zeros(50)])
    for c, r in run_both(kernels.miniball, line).values():
        assert r == pytest.approx(2.0, abs=1e-12) and np.allclose(c, [2, 0], atol=1e-12)
    with pytest.raises(ValueError):
        kernels.miniball(np.empty((0, 2)))


def test_fallback_selected_without_extension():
    import subprocess
    import sys

    code = ("import sys; sys.modules['radbound._kernels'] = None\n"
            "from radbound import kernels; print(kernels.BACKEND, kernels.available_backends())")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python ['python']"


def test_chain_identical_across_backends(restore_backend):
    from radbound.body import make_cutthetip
    from radbound.verify import verify_chain

    terms = {}
    for name in kernels.available_backends():
        kernels.use_backend(name)
        terms[name] = verify_chain(make_cutthetip(1.0, 0.5, 0.1)).terms
    vals = list(terms.values())
    for t in vals[1:]:
        assert np.allclose(t, vals[0], atol=1e-12, rtol=0)
