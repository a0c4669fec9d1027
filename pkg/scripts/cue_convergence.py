"""CUE derivative moments: exact values against the large-N constant, plus MC spot checks.

    python3 scripts/cue_convergence.py [--samples 50000]
"""

import argparse

from zetamoments import cue


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=50_000)
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()

    print("relative error of exact/N^|n| against the leading constant")
    Ns = (25, 50, 100, 200, 400, 800)
    print(f"{'orders':<10}" + "".join(f"{N:>10}" for N in Ns))
    for orders in [(1,), (2,), (1, 1), (2, 1), (1, 1, 1), (2, 2)]:
        row = []
        for N in Ns:
            ex = cue.derivative_moment_exact(N, orders)
            row.append(abs(ex / cue.derivative_moment_leading(orders, N) - 1))
        print(f"{str(orders):<10}" + "".join(f"{e:>10.2e}" for e in row))

    print("\nMonte Carlo vs exact")
    cases = [(8, dict(shifts=(0.05, 0.11))), (6, dict(orders=(1,))), (10, dict(orders=(1, 1))), (5, dict(shifts=(0.3, -0.2, 0.5)))]
    for N, kw in cases:
        if "shifts" in kw:
            exact = cue.shifted_moment_exact(N, kw["shifts"])
        else:
            exact = cue.derivative_moment_exact(N, kw["orders"])
        mc = cue.mc_moment(N, samples=args.samples, seed=args.seed, **kw)
        z_re = abs(mc.estimate.real - exact.real) / max(mc.stderr_re, 1e-300)
        z_im = abs(mc.estimate.imag - exact.imag) / max(mc.stderr_im, 1e-300)
        print(f"N={N:<3} {kw}: exact {exact:.6f}  mc {mc.estimate:.6f}  z=({z_re:.2f}, {z_im:.2f})")

    print("\nE|Z|^{2k} at N=4 (Keating-Snaith)")
    for k in (0.5, 1, 1.5, 2):
        mc = cue.mc_abs_moment(4, k, samples=args.samples, seed=args.seed)
        print(f"  k={k}: exact {cue.keating_snaith_moment(4, k):.6f}  mc {mc.estimate.real:.6f} +- {mc.stderr_re:.6f}")


if __name__ == "__main__":
    main()
