"""Second moment of zeta'(rho): integrand and integrated polynomial, two ways.

Prints the transcribed closed-form coefficients, the line/DFT derivation from
the shifted ratios formula, their difference, and how the coefficients move
with the number of primes in the arithmetic factor.

    python3 scripts/second_moment.py [--primes 1000]
"""

import argparse
import time

import numpy as np

from zetamoments import arith, predict


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--primes", type=int, default=1000)
    args = ap.parse_args()

    t0 = time.perf_counter()
    tensor = arith.arith_deriv_tensor(2, 3, args.primes)
    P = predict.second_moment_integrand(tensor)
    t1 = time.perf_counter()
    S = predict.ratios_integrand([1, 1], primes=args.primes)
    t2 = time.perf_counter()
    Q = P.antiderivative()

    print(f"primes = {args.primes}")
    print(f"{'power':>5} {'transcribed':>16} {'derived':>16} {'integrated':>16}")
    for m in range(P.degree, -1, -1):
        print(f"{m:>5} {P.coeffs[m]:>16.10f} {S.coeffs[m]:>16.10f} {Q.coeffs[m]:>16.10f}")
    print(f"max |transcribed - derived| = {np.max(np.abs(np.subtract(P.coeffs, S.coeffs))):.2e}")
    print(f"tensor {t1 - t0:.1f}s, derivation {t2 - t1:.1f}s")

    print("\narithmetic pieces")
    for e in [(0, 0, 1), (0, 0, 2), (0, 1, 1), (0, 0, 3), (0, 1, 2), (0, 2, 1), (1, 1, 1)]:
        print(f"  A{e} = {tensor[e]: .10f}")

    print("\nprime-count convergence of the integrand")
    for n in (100, 250, 500, 1000, 2000):
        c = predict.second_moment_integrand(arith.arith_deriv_tensor(2, 3, n)).coeffs
        print(f"  {n:>5}: " + "  ".join(f"{x: .6f}" for x in c[::-1]))


if __name__ == "__main__":
    main()
