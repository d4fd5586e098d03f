"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--sizes 8 16 36 64] [--repeat 5]

Prints per-kernel timings and the largest relative disagreement between backends.
"""

import argparse
import time

import numpy as np

from qfi_lab import _backend


def random_hermitian(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def random_density(n, rng):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 36, 64])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    names = _backend.available()
    mods = {name: _backend.load(name)[0] for name in names}
    rng = np.random.default_rng(args.seed)
    print(f"backends: {', '.join(names)}")
    print(f"{'kernel':<14}{'n':>5}" + "".join(f"{nm + ' [ms]':>16}" for nm in names) + f"{'speedup':>10}{'rel diff':>11}")
    for n in args.sizes:
        a = random_hermitian(n, rng)
        rho = random_density(n, rng)
        w, v, _ = mods["python"].jacobi_eigh(rho, 1e-15, 100)
        dm = np.ascontiguousarray(v.conj().T @ random_hermitian(n, rng) @ v)
        cases = {
            "jacobi_eigh": lambda m: m.jacobi_eigh(a, 1e-15, 100)[0],
            "qfi_pair_sum": lambda m: m.qfi_pair_sum(np.ascontiguousarray(w), dm, 1e-12)[0],
        }
        for kname, call in cases.items():
            times = {nm: best_of(lambda: call(m), args.repeat) for nm, m in mods.items()}
            outs = {nm: np.asarray(call(m)) for nm, m in mods.items()}
            ref = outs["python"]
            diff = max(float(np.max(np.abs(outs[nm] - ref)) / max(1.0, float(np.max(np.abs(ref))))) for nm in names)
            speed = times["python"] / times[names[0]] if len(names) > 1 else 1.0
            print(f"{kname:<14}{n:>5}" + "".join(f"{1e3 * times[nm]:>16.3f}" for nm in names)
                  + f"{speed:>9.1f}x{diff:>11.1e}")


if __name__ == "__main__":
    main()
