"""Time the compiled kernels against the NumPy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 20]

Prints the best-of-``repeat`` time per call for each kernel and backend,
plus one end-to-end solve and one LBP run per backend.
"""
import argparse
import timeit
import warnings

import numpy as np

from covdecomp import assumptions, inference, solver
from covdecomp._backend import available_backends
from covdecomp.inference import InfoModel, _edge_arrays
from covdecomp.model import build_partition
from covdecomp.rng import make_rng
from covdecomp.sampling import sample_covariance, sample_gaussian
from covdecomp.solver import SolverOptions
from covdecomp.synth import SynthConfig, gen_model


def best(fn, repeat, number=1):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def kernel_cases(model):
    p = model.p
    rng = np.random.default_rng(0)
    y = rng.normal(size=(p, p))
    y = np.ascontiguousarray((y + y.T) / 2)
    part = build_partition(model.j_m, model.sigma_r)
    s_idx, r_idx = part.index("s"), part.index("s_m_complement")
    sigma_m = np.ascontiguousarray(model.sigma_m)
    j = model.j_m
    src, dst, w, rev = _edge_arrays(j)
    jd = np.ascontiguousarray(np.diag(j))
    h = np.ascontiguousarray(j @ model.mean)
    m = len(src)
    bufs = [np.zeros(m) for _ in range(4)]

    def cases(k):
        return {
            "prox_offdiag (64x64)": lambda: k.prox_offdiag(y, 0.05, 0.5),
            f"kron_block ({len(r_idx)}x{len(s_idx)})": lambda: k.kron_block(sigma_m, r_idx, s_idx),
            f"gabp_sweep ({m} messages)": lambda: k.gabp_sweep(jd, h, src, dst, w, rev, *bufs, 0.0),
            "gabp_beliefs": lambda: k.gabp_beliefs(jd, h, dst, bufs[0], bufs[1]),
        }

    return cases


def end_to_end(model, s_hat):
    def solve():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            solver.decompose(s_hat, SolverOptions(gamma=0.05, lam=0.55))

    def lbp():
        inference.gabp_run(InfoModel.from_mean(model.j_m, model.mean), max_iterations=200)

    def incoherence():
        assumptions.incoherence(model.sigma_m, build_partition(model.j_m, model.sigma_r))

    return {"decompose (p=64)": solve, "gabp_run (200 its)": lbp, "incoherence": incoherence}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    model = gen_model(SynthConfig(seed=0))
    s_hat = sample_covariance(sample_gaussian(model.sigma, 4000, make_rng(1)))
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the python backend is timed")
    cases = kernel_cases(model)
    names = list(cases(backends["python"]))
    names += list(end_to_end(model, s_hat))

    times = {}
    for label, mod in backends.items():
        for name, fn in cases(mod).items():
            times[name, label] = best(fn, args.repeat, number=50)
        # swap the kernel module the high-level code sees
        saved = solver.kernels, inference.kernels, assumptions.kernels
        solver.kernels = inference.kernels = assumptions.kernels = mod
        try:
            for name, fn in end_to_end(model, s_hat).items():
                times[name, label] = best(fn, max(3, args.repeat // 5))
        finally:
            solver.kernels, inference.kernels, assumptions.kernels = saved

    width = max(len(n) for n in names)
    header = f"{'case':<{width}}  " + "  ".join(f"{b:>12}" for b in backends)
    if "compiled" in backends:
        header += f"  {'speedup':>8}"
    print(header)
    for name in names:
        row = f"{name:<{width}}  " + "  ".join(f"{times[name, b] * 1e6:>10.1f}us" for b in backends)
        if "compiled" in backends:
            row += f"  {times[name, 'python'] / times[name, 'compiled']:>7.2f}x"
        print(row)


if __name__ == "__main__":
    main()
