"""Compiled vs numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times each hot kernel on both backends and one end-to-end chain check.
"""
import argparse
import timeit

import numpy as np

from radbound import kernels
from radbound.body import make_cutthetip, random_body
from radbound.spaceform import SpaceForm
from radbound.verify import verify_chain


def cases():
    rng = np.random.default_rng(0)
    P = rng.standard_normal((200_000, 3))
    C = rng.standard_normal((5, 3)) * 0.2
    r = rng.uniform(0.8, 1.2, 5)
    S = rng.standard_normal((200_000, 3))
    S /= np.linalg.norm(S, axis=1, keepdims=True)
    M = rng.standard_normal((2000, 3))
    sphere_body = random_body(SpaceForm(1, 2), 4, 0.4, 1.2, np.random.default_rng(1))
    return {
        "slack_min flat 2e5x5": lambda: kernels.slack_min(P, C, r, 0),
        "slack_min sphere 2e5x5": lambda: kernels.slack_min(S, sphere_body.centers, sphere_body.radii, 1),
        "count_inside 2e5x5": lambda: kernels.count_inside(P, C, r, 0, 0, 0.0),
        "miniball 2000 pts 3-d": lambda: kernels.miniball(M),
        "verify_chain cutthetip": lambda: verify_chain(make_cutthetip(1.0, 0.5, 0.1)),
        "verify_chain sphere body": lambda: verify_chain(random_body(
            SpaceForm(1, 2), 4, 0.4, 1.2, np.random.default_rng(1))),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    if backends == ["python"]:
        print("compiled kernels not built; only the numpy backend is timed")
    work = cases()
    print(f"{'case':28s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, fn in work.items():
        best = {}
        for b in backends:
            kernels.use_backend(b)
            fn()
            best[b] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        row = f"{name:28s}" + "".join(f"{best[b] * 1e3:10.2f}ms" for b in backends)
        if len(backends) == 2:
            row += f"{best['python'] / best['cython']:10.1f}x"
        print(row)


if __name__ == "__main__":
    main()
