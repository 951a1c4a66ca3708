"""Timing comparison of the assembly-kernel backends.

Runs the beam internal-force/tangent assembly and a short implicit
integration on both backends (numba jit vs vectorised numpy) and prints a
table. Usage::

    python benchmarks/kernel_benchmark.py [--reps 200] [--elements 60]
"""

import argparse
import time

import numpy as np

from thermrom import kernels
from thermrom.beam import BeamModel, BeamProperties, TemperaturePulse
from thermrom.newmark import newmark_integrate
from thermrom.rom import FullSystem


def time_assembly(model, u, x_c, reps):
    model.force_and_tangent(u, x_c)  # warm-up / jit compile
    start = time.perf_counter()
    for _ in range(reps):
        model.force_and_tangent(u, x_c)
    return (time.perf_counter() - start) / reps


def time_integration(model, x_c, n_steps=200):
    load = model.uniform_transverse_load(1e3)
    system = FullSystem(model, theta_of_t=lambda t: x_c,
                        load=lambda t: load * np.sin(3e4 * t))
    u0 = np.zeros(model.dof_count)
    start = time.perf_counter()
    newmark_integrate(system, u0, u0.copy(), 2e-6, n_steps)
    return (time.perf_counter() - start) / n_steps


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=200)
    parser.add_argument("--elements", type=int, default=60)
    args = parser.parse_args()

    pulse = TemperaturePulse(height=40.0, width=0.02, center_start=0.05,
                             travel_amplitude=0.03)
    model = BeamModel(BeamProperties(n_elements=args.elements), pulse)
    rng = np.random.default_rng(0)
    u = 1e-4 * rng.standard_normal(model.dof_count)

    backends = ["numpy"]
    if kernels.numba_available():
        backends.insert(0, "numba")
    else:
        print("numba not importable; timing the numpy backend only")

    results = {}
    for backend in backends:
        kernels.set_backend(backend)
        asm = time_assembly(model, u, 0.05, args.reps)
        step = time_integration(model, 0.05)
        results[backend] = (asm, step)

    print(f"\n{args.elements} elements, {model.dof_count} free dofs, "
          f"{args.reps} assembly reps")
    print(f"{'backend':<8s}{'force+tangent':>16s}{'newmark step':>16s}")
    for backend, (asm, step) in results.items():
        print(f"{backend:<8s}{asm * 1e3:>13.3f} ms{step * 1e3:>13.3f} ms")
    if len(results) == 2:
        speed = results["numpy"][0] / results["numba"][0]
        print(f"\nnumba assembly speedup over numpy: {speed:.1f}x")


if __name__ == "__main__":
    main()
