"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--quick] [--repeat N]

Prints one line per kernel and backend with the best wall time.
"""

import argparse
import timeit

import numpy as np

from vlasov_memory import _fallback

try:
    from vlasov_memory import _core
except ImportError:
    _core = None


def cases(scale):
    rng = np.random.default_rng(0)
    z = rng.uniform(0, 40, 200_000 // scale)
    n = 512 // scale
    tri = np.triu(rng.normal(size=(n, n))) + 3 * np.eye(n)
    rhs = rng.normal(size=n)
    t = np.linspace(0, 2, n + 1)
    kmat = np.tril(-np.exp(-(t[:, None] - t[None, :]) ** 2))
    p = 160_000 // scale
    x = rng.normal(size=(p, 3))
    v = rng.normal(size=(p, 3))
    e = rng.normal(size=(p, 3))
    b = np.zeros((1, 3))
    return {
        "j0": lambda m: m.j0(z),
        "j1_over_z": lambda m: m.j1_over_z(z),
        "midpoint_back_substitution": lambda m: m.midpoint_back_substitution(tri, rhs),
        "heun_memory": lambda m: m.heun_memory(kmat, 1.0 + 0j, t[1]),
        "boris_kick": lambda m: m.boris_kick(v, e, b, 1e-3),
        "gyro_flight": lambda m: m.gyro_flight(x, v, 1e-3, 100.0),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="small problem sizes")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = [("python", _fallback)] + ([("compiled", _core)] if _core is not None else [])
    print(f"{'kernel':28s} {'backend':9s} {'seconds':>10s} {'speedup':>8s}")
    for name, fn in cases(16 if args.quick else 1).items():
        base = None
        for label, mod in backends:
            best = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
            base = base or best
            print(f"{name:28s} {label:9s} {best:10.5f} {base / best:8.1f}")


if __name__ == "__main__":
    main()
