"""Command-line front end.

Exit codes: 0 ok, 1 check failed, 2 bad flags, 3 unsupported orders,
4 malformed zero import, 5 missing zero cache, 6 zero integrity failure.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

EXIT_FAIL, EXIT_USAGE, EXIT_ORDERS, EXIT_IMPORT, EXIT_CACHE, EXIT_INTEGRITY = 1, 2, 3, 4, 5, 6
DEFAULT_SEED = 20240601
DEFAULT_CACHE = "zeta-zeros.txt"
SCHEMA = "# schema v1"


# -- flag parsing ------------------------------------------------------------------


def parse_complex_list(text: str) -> list[complex]:
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace(" ", "")
        if not tok:
            raise argparse.ArgumentTypeError("empty entry in list")
        try:
            out.append(complex(tok.replace("i", "j")))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a complex number: {tok!r}") from None
    return out


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


def _positive_int(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _mc_samples(text):
    v = int(text)
    if v < 100:
        raise argparse.ArgumentTypeError("at least 100 samples")
    return v


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = argparse.ArgumentParser(prog="zetamoments", description="Discrete moments of zeta derivatives and CUE analogues.")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("symcheck", help="randomized symmetric-function identity checks", formatter_class=fmt)
    s.add_argument("--count", type=_positive_int, default=500, help="random instances per identity")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)

    s = sub.add_parser("cue", help="exact vs Monte Carlo CUE moment", formatter_class=fmt)
    s.add_argument("--matrix-size", type=_positive_int, required=True, help="matrix size N")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--shifts", type=parse_complex_list, help="comma-separated shifts a+bi")
    g.add_argument("--orders", type=parse_int_list, help="comma-separated derivative orders")
    s.add_argument("--samples", type=_mc_samples, default=20000)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--threads", type=_positive_int, default=1)

    s = sub.add_parser("derive", help="integrand polynomial in L for given orders", formatter_class=fmt)
    s.add_argument("--orders", type=parse_int_list, required=True)
    s.add_argument("--primes", type=_positive_int, default=1000, help="number of primes in the arithmetic factor")
    s.add_argument("--out", type=Path, default=None, help="optional CSV of coefficients")

    s = sub.add_parser("zeros", help="compute or import zeta zeros into a cache", formatter_class=fmt)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--count", type=_positive_int)
    g.add_argument("--max-t", type=float)
    s.add_argument("--cache", type=Path, default=Path(DEFAULT_CACHE))
    s.add_argument("--import", dest="import_path", type=Path, default=None, help="third-party 'index gamma' table")
    s.add_argument("--threads", type=_positive_int, default=1)

    for name, hlp in (("sum", "cumulative discrete moment over cached zeros"), ("compare", "discrete moment vs prediction")):
        s = sub.add_parser(name, help=hlp, formatter_class=fmt)
        s.add_argument("--orders", type=parse_int_list, required=True)
        s.add_argument("--cache", type=Path, default=Path(DEFAULT_CACHE))
        s.add_argument("--count", type=_positive_int, default=None, help="use only the first COUNT zeros")
        s.add_argument("--stride", type=_positive_int, default=None, help="row stride (default 1, or 10 beyond 1e4 zeros)")
        s.add_argument("--out", type=Path, default=None, help="CSV path (default stdout)")
        s.add_argument("--threads", type=_positive_int, default=1)
        if name == "compare":
            s.add_argument("--primes", type=_positive_int, default=1000)
    return p


# -- subcommands -----------------------------------------------------------------------


def cmd_symcheck(args) -> int:
    from .cue import toeplitz_closed, toeplitz_recurrence
    from .symfunc import combinatorial_sum, combinatorial_sum_literal, complete_homogeneous

    rng = np.random.default_rng(args.seed)
    worst_sum = worst_toep = 0.0
    for _ in range(args.count):
        k = int(rng.integers(1, 7))
        n = int(rng.integers(-8, 13))
        v = np.exp(rng.uniform(-0.5, 0.5, k) + 1j * rng.uniform(-np.pi, np.pi, k))
        lit = combinatorial_sum_literal(n, v)
        got = combinatorial_sum(n, v)
        worst_sum = max(worst_sum, abs(got - lit) / max(1.0, abs(lit)))
        kk = int(rng.integers(0, 5))
        N = int(rng.integers(0, 51))
        A = rng.normal(size=kk + 2) + 1j * rng.normal(size=kk + 2)
        h = complete_homogeneous(N, A)
        sc = max(1.0, abs(h))
        worst_toep = max(worst_toep, abs(toeplitz_recurrence(N, A) - h) / sc, abs(toeplitz_closed(N, A) - h) / sc)
    ok = worst_sum < 1e-10 and worst_toep < 1e-9
    print(f"combinatorial_sum   max rel err {worst_sum:.3e}  {'PASS' if worst_sum < 1e-10 else 'FAIL'}")
    print(f"toeplitz triple     max rel err {worst_toep:.3e}  {'PASS' if worst_toep < 1e-9 else 'FAIL'}")
    return 0 if ok else EXIT_FAIL


def cmd_cue(args) -> int:
    from . import cue

    N = args.matrix_size
    if args.orders is not None:
        if not args.orders or any(n < 1 for n in args.orders):
            print("orders must be positive integers", file=sys.stderr)
            return EXIT_ORDERS
        exact = cue.derivative_moment_exact(N, args.orders)
        leading = cue.derivative_moment_leading(args.orders, N)
        mc = cue.mc_moment(N, orders=args.orders, samples=args.samples, seed=args.seed, threads=args.threads)
        label = f"orders={tuple(args.orders)}"
    else:
        exact = cue.shifted_moment_exact(N, args.shifts)
        leading = cue.scaled_limit_series([N * a for a in args.shifts], 60)
        mc = cue.mc_moment(N, shifts=args.shifts, samples=args.samples, seed=args.seed, threads=args.threads)
        label = "shifts=(" + ", ".join(f"{a:g}" for a in args.shifts) + ")"
    ok = mc.within(exact, 3.0)
    print(f"N={N} {label} samples={mc.samples} seed={args.seed}")
    print(f"{'quantity':<12}{'real':>16}{'imag':>16}")
    print(f"{'exact':<12}{exact.real:>16.8g}{exact.imag:>16.8g}")
    print(f"{'monte carlo':<12}{mc.estimate.real:>16.8g}{mc.estimate.imag:>16.8g}")
    print(f"{'stderr':<12}{mc.stderr_re:>16.3g}{mc.stderr_im:>16.3g}")
    print(f"{'leading':<12}{complex(leading).real:>16.8g}{complex(leading).imag:>16.8g}")
    print(f"within 3 sigma: {'yes' if ok else 'no'}")
    return 0 if ok else EXIT_FAIL


def _symbolic(orders) -> list[str] | None:
    if len(orders) == 1:
        n = orders[0]
        terms = [f"{math.factorial(n)}*A_{n}"]
        for m in range(n + 1):
            c = (-1) ** (m + 1) * math.factorial(n) / (math.factorial(m) * math.factorial(n - m))
            terms.append(f"{c:+g}*gamma_{n - m}*L^{m}")
        terms.append(f"{(-1) ** (n + 1) * math.factorial(n) / math.factorial(n + 1):+g}*L^{n + 1}")
        return [" ".join(terms)]
    if list(orders) == [1, 1]:
        return [
            "c3 = 1/6",
            "c2 = (2 g0 + A001)/2",
            "c1 = (-8 g1 + 4 g0 A001 + A002 + 2 A011)/2",
            "c0 = (-12 g0^3 - 36 g0 g1 + 6 g2 - 24 g1 A001 + 6 g0 A002 + A003 + 12 g0 A011 + 3 A012 - 3 A021 + 6 A111)/6",
        ]
    return None


def cmd_derive(args) -> int:
    from .arith import UnsupportedOrder
    from .predict import MAX_TOTAL_ORDER, derive, mixed_leading

    orders = args.orders
    if not orders or any(n < 1 for n in orders) or sum(orders) > MAX_TOTAL_ORDER:
        print(f"unsupported orders {orders}: need n_r >= 1 and total <= {MAX_TOTAL_ORDER}", file=sys.stderr)
        return EXIT_ORDERS
    try:
        poly = derive(orders, primes=args.primes)
    except UnsupportedOrder as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ORDERS
    Q = poly.antiderivative()
    print(f"orders={tuple(orders)} primes={args.primes}  integrand P(L), L = log(t/2pi)")
    for m in range(poly.degree, -1, -1):
        print(f"  c{m} = {poly.coeffs[m]: .10f}")
    print(f"  leading check: {mixed_leading(orders): .10f}")
    print("integrated: (T/2pi) Q(log(T/2pi)) + const")
    for m in range(Q.degree, -1, -1):
        print(f"  q{m} = {Q.coeffs[m]: .10f}")
    sym = _symbolic(orders)
    if sym:
        print("symbolic:")
        for line in sym:
            print("  " + line)
    if args.out:
        rows = [SCHEMA, "power,integrand,integrated"]
        rows += [f"{m},{poly.coeffs[m]:.15g},{Q.coeffs[m]:.15g}" for m in range(poly.degree + 1)]
        args.out.write_text("\n".join(rows) + "\n")
    return 0


def cmd_zeros(args) -> int:
    from .zeta import IntegrityError, MalformedImport, check_imported, find_zeros, load_zeros, save_zeros

    def covered(recs):
        if not recs:
            return False
        if args.count is not None:
            return len(recs) >= args.count
        return recs[-1].gamma >= args.max_t

    if args.import_path is not None:
        try:
            recs = load_zeros(args.import_path)
        except (MalformedImport, OSError) as exc:
            print(f"import failed: {exc}", file=sys.stderr)
            return EXIT_IMPORT
        bad = check_imported(recs)
        if bad:
            shown = ", ".join(map(str, bad[:10])) + (" ..." if len(bad) > 10 else "")
            print(f"integrity failure: {len(bad)} imported ordinates without a sign change of Z: {shown}", file=sys.stderr)
            return EXIT_INTEGRITY
        save_zeros(args.cache, recs)
        print(f"imported {len(recs)} zeros into {args.cache}")
        return 0
    if args.cache.exists():
        try:
            recs = load_zeros(args.cache)
        except MalformedImport as exc:
            print(f"cache unreadable: {exc}", file=sys.stderr)
            return EXIT_IMPORT
        if covered(recs):
            print(f"cache hit: {args.cache} holds {len(recs)} zeros")
            return 0
    t0 = time.perf_counter()
    try:
        recs = find_zeros(max_T=args.max_t, max_count=args.count, threads=args.threads)
    except IntegrityError as exc:
        print(f"integrity failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    save_zeros(args.cache, recs)
    worst = max(r.tolerance for r in recs)
    print(f"{len(recs)} zeros up to gamma={recs[-1].gamma:.9f}; all Gram blocks validated; max tolerance {worst:.1e}")
    print(f"wrote {args.cache} in {time.perf_counter() - t0:.1f}s")
    return 0


def _load_trace(args):
    from .zeta import MalformedImport, discrete_moment, load_zeros

    if not args.orders or any(n < 0 for n in args.orders):
        print("orders must be nonnegative integers", file=sys.stderr)
        return None, EXIT_ORDERS
    if any(n > 6 for n in args.orders):
        print("derivative orders above 6 are not supported", file=sys.stderr)
        return None, EXIT_ORDERS
    if not args.cache.exists():
        print(f"missing zero cache {args.cache}; run 'zetamoments zeros' first", file=sys.stderr)
        return None, EXIT_CACHE
    try:
        zeros = load_zeros(args.cache)
    except MalformedImport as exc:
        print(f"cache unreadable: {exc}", file=sys.stderr)
        return None, EXIT_IMPORT
    if args.count is not None:
        zeros = zeros[: args.count]
    stride = args.stride or (10 if len(zeros) > 10_000 else 1)
    return discrete_moment(zeros, args.orders, stride=stride, threads=args.threads), 0


def _emit(args, lines):
    text = "\n".join(lines) + "\n"
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)


def cmd_sum(args) -> int:
    trace, code = _load_trace(args)
    if trace is None:
        return code
    lines = [SCHEMA, "T,re_sum,im_sum"]
    lines += [f"{t:.12g},{s.real:.12g},{s.imag:.12g}" for t, s in zip(trace.T, trace.sums)]
    _emit(args, lines)
    return 0


PLOT_SCRIPT = '''"""Render the comparison CSV written next to this script (needs matplotlib)."""
import sys

import matplotlib.pyplot as plt
import numpy as np

path = sys.argv[1] if len(sys.argv) > 1 else {csv!r}
d = np.genfromtxt(path, delimiter=",", names=True, skip_header=1)  # first line is the schema tag
fig, ax = plt.subplots(1, 3, figsize=(15, 4))
ax[0].plot(d["T"], d["re_sum"], lw=0.8, label="Re sum")
ax[0].plot(d["T"], d["prediction"], lw=0.8, ls="--", label="prediction")
ax[0].legend()
ax[1].plot(d["T"], d["residual_leading"], lw=0.6)
ax[1].set_title("residual, leading term only")
ax[2].plot(d["T"], d["residual_full"], lw=0.6)
ax[2].set_title("residual, full polynomial")
for a in ax:
    a.set_xlabel("T")
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
'''


def cmd_compare(args) -> int:
    from .predict import compare, derive

    trace, code = _load_trace(args)
    if trace is None:
        return code
    if 0 in args.orders:
        poly = None
    else:
        if sum(args.orders) > 6:
            print("total order above 6 is not supported", file=sys.stderr)
            return EXIT_ORDERS
        poly = derive(args.orders, primes=args.primes)
    if poly is not None:
        compare(trace, poly)
        pred, res_l, res_f = trace.prediction, trace.residual_leading, trace.residual_full
    else:
        pred = np.zeros(trace.T.size)
        res_l = res_f = trace.sums.real
    lines = [SCHEMA, "T,re_sum,im_sum,prediction,residual_leading,residual_full"]
    for j in range(trace.T.size):
        s = trace.sums[j]
        lines.append(f"{trace.T[j]:.12g},{s.real:.12g},{s.imag:.12g},{pred[j]:.12g},{res_l[j]:.12g},{res_f[j]:.12g}")
    _emit(args, lines)
    if args.out:
        script = args.out.with_name(args.out.stem + "_plot.py")
        script.write_text(PLOT_SCRIPT.format(csv=str(args.out), png=str(args.out.with_suffix(".png"))))
    if trace.T.size:
        top = trace.sums[-1].real
        print(
            f"top T={trace.T[-1]:.3f} re_sum={top:.6g} max|res_leading|={np.max(np.abs(res_l)):.4g} "
            f"max|res_full|={np.max(np.abs(res_f)):.4g}",
            file=sys.stderr,
        )
    return 0


COMMANDS = {
    "symcheck": cmd_symcheck,
    "cue": cmd_cue,
    "derive": cmd_derive,
    "zeros": cmd_zeros,
    "sum": cmd_sum,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return COMMANDS[args.cmd](args)


if __name__ == "__main__":
    sys.exit(main())
