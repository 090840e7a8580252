"""Which weight makes the two-level scheme exact for one mode?

A weighted two-level scheme multiplies a mode with eta = lambda * tau by
r(sigma, eta) = (1 - (1 - sigma) eta) / (1 + sigma eta), while the true
solution multiplies it by exp(-eta).  For any single eta there is exactly
one weight sigma1(eta) matching the exponential; it starts at 1/2 for
small eta and grows slowly.  No constant weight works for all eta at once,
which is why the exact-in-the-fundamental-mode schemes modify the operator
(shift by lambda1) instead of tuning sigma.
"""

import math

import numpy as np

from fmes import amplification_factor, fmes_weight


def main():
    print(" eta       sigma1        r(sigma1,eta)-exp(-eta)")
    for eta in (0.001, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0):
        sigma1 = fmes_weight(eta)
        defect = amplification_factor(sigma1, eta) - math.exp(-eta)
        print(f"{eta:6.3f}   {sigma1:.9f}   {defect:+.2e}")

    print("\nA fixed weight always misses somewhere:")
    etas = np.array([0.25, 0.5, 1.0, 2.0])
    for sigma in (0.5, 0.75, 1.0):
        gaps = [abs(amplification_factor(sigma, eta) - math.exp(-eta))
                for eta in etas]
        print(f"  sigma = {sigma:4.2f}: max gap over eta in {etas.tolist()} "
              f"is {max(gaps):.3e}")


if __name__ == "__main__":
    main()
