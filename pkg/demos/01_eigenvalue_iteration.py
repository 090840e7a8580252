"""Fundamental eigenvalue of the model operator by inverse iteration.

The model problem lives on the unit square: diffusivity 10 in the
lower-left quarter and 1 elsewhere, Robin absorption mu = 10 on the right
and top sides, nothing on the left and bottom.  Each iteration solves one
sparse system K_bar phi_new = M phi and updates the eigenvalue estimate
from mass-weighted inner products; convergence is fast because the second
eigenvalue is roughly seven times the first, and the estimate error
contracts by (lambda1/lambda2)^2 per sweep.

Running this prints the per-iteration estimates on a sequence of grids,
showing 11-digit stabilization within about eight iterations.
"""

import time

from fmes import ProblemCoefficients, assemble, build_mesh, inverse_iteration

GRIDS = (26, 51, 101)


def main():
    pairs = {}
    for n_side in GRIDS:
        start = time.perf_counter()
        sys = assemble(build_mesh(n_side), ProblemCoefficients())
        pairs[n_side] = inverse_iteration(sys, min_iter=10)
        elapsed = time.perf_counter() - start
        print(f"grid {n_side}x{n_side}: {sys.n_nodes} unknowns, "
              f"{elapsed:.2f} s")

    print("\n m  " + "".join(f"nside={n:<16d}" for n in GRIDS))
    for i in range(10):
        row = "".join(f"{pairs[n].history[i]:<22.11f}" for n in GRIDS)
        print(f"{i + 1:3d} {row}")

    print("\nRefinement lowers the eigenvalue toward its mesh-independent "
          "limit:")
    for n_side in GRIDS:
        print(f"  nside {n_side:3d}: lambda1_bar = "
              f"{pairs[n_side].lambda1_bar:.11f}")


if __name__ == "__main__":
    main()
