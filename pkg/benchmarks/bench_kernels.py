"""Time the numba and pure-numpy kernel paths side by side.

    python3 benchmarks/bench_kernels.py [--dims 8 16 24] [--repeat 5]

Both paths are imported directly from ``tpablockade.kernels`` so the
``TPABLOCKADE_DISABLE_NUMBA`` flag does not matter here. JIT compilation is
excluded from the timings by one warm-up call per kernel.
"""

import argparse
import time

import numpy as np

from tpablockade import FockSpace, SystemParams
from tpablockade.kernels import dopri5_jit, dopri5_numpy, liouvillian_jit, liouvillian_numpy
from tpablockade.ops import collapse_operators, hamiltonian


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def operands(dim):
    params = SystemParams.optimal(delta_a=1.0, omega=0.01, kappa=1.0, kappa2=1.0)
    space = FockSpace(dim)
    H = np.ascontiguousarray(hamiltonian(params, space))
    collapse = np.ascontiguousarray(np.stack(collapse_operators(params, space)))
    return H, collapse


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=int, nargs="+", default=[8, 16, 24])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--t-end", type=float, default=5.0)
    args = parser.parse_args(argv)
    if liouvillian_jit is None:
        parser.error("numba is not installed")

    print(f"{'kernel':<12}{'dim':>5}{'numpy [ms]':>13}{'numba [ms]':>13}{'speedup':>9}{'max |diff|':>13}")
    for dim in args.dims:
        H, collapse = operands(dim)
        liouvillian_jit(H, collapse)
        t_np, L_np = best_of(lambda: liouvillian_numpy(H, collapse), args.repeat)
        t_nb, L_nb = best_of(lambda: liouvillian_jit(H, collapse), args.repeat)
        diff = np.max(np.abs(L_np - L_nb))
        print(f"{'liouvillian':<12}{dim:>5}{1e3 * t_np:>13.3f}{1e3 * t_nb:>13.3f}{t_np / t_nb:>9.1f}{diff:>13.2e}")

        y0 = np.zeros(dim * dim, dtype=np.complex128)
        y0[0] = 1.0
        times = np.linspace(0.0, args.t_end, 11)
        run = (L_np, y0, times, 1e-9, 1e-12, 500_000)
        dopri5_jit(*run)
        t_np, (y_np, steps, _) = best_of(lambda: dopri5_numpy(*run), args.repeat)
        t_nb, (y_nb, _, _) = best_of(lambda: dopri5_jit(*run), args.repeat)
        diff = np.max(np.abs(y_np - y_nb))
        print(f"{'dopri5':<12}{dim:>5}{1e3 * t_np:>13.3f}{1e3 * t_nb:>13.3f}{t_np / t_nb:>9.1f}{diff:>13.2e}"
              f"  ({steps} steps)")


if __name__ == "__main__":
    main()
