#!/usr/bin/env python3
"""Riemann zeta from its spectrum and from its zeros.

Locates critical-line zeros, rebuilds zeta(beta) from them through the
Hadamard product, and rebuilds the prime-counting staircase psi(x) from
the same ordinates through the explicit formula.  The point of the
exercise: the zeros carry the primes and the primes carry the zeros.
"""

import argparse
import math

from spectral_zeros.spectra import partition_direct, primon
from spectral_zeros.zeta import (
    euler_product,
    explicit_formula_psi,
    find_zeros,
    hadamard_product,
    psi_direct,
    zeta_em,
)


def zero_table(count: int):
    zeros = find_zeros(count)
    print(f"first {count} critical-line ordinates (step+bisect on Hardy Z):")
    for k, g in enumerate(zeros.ordinates[:10], start=1):
        print(f"  gamma_{k:<3d} = {g:.12f}")
    if count > 10:
        print(f"  ... up to gamma_{count} = {zeros.ordinates[-1]:.12f}")
    print()
    return zeros


def spectrum_side(s: float) -> None:
    em = zeta_em(s).value
    print(f"zeta({s}) three ways (spectrum side):")
    print(f"  euler-maclaurin  {em.real:.15f}")
    for limit in (10 ** 3, 10 ** 5):
        e = euler_product(s, limit).value
        print(f"  euler product    {e.real:.15f}   (primes < {limit}, "
              f"err {abs(e - em):.2e})")
    d = partition_direct(primon(), s, n_terms=10 ** 6).value
    print(f"  primon sum       {d.real:.15f}   (1e6 terms, err {abs(d - em):.2e})")
    print()


def zeros_side(zeros, betas) -> None:
    print("zeta rebuilt from zeros alone (Hadamard product):")
    print(f"{'beta':>6}  {'zero_count':>10}  {'value':>20}  {'rel err':>10}")
    counts = sorted({min(c, len(zeros)) for c in (10, 50, len(zeros))})
    for beta in betas:
        truth = zeta_em(beta).value
        for count in counts:
            h = hadamard_product(beta, zeros, count).value
            rel = abs(h - truth) / abs(truth)
            print(f"{beta:6.2f}  {count:10d}  {h.real:20.12f}  {rel:10.3e}")
    print()


def prime_staircase(zeros, x_max: float) -> None:
    print("Chebyshev psi(x): direct prime-power count vs zero sum")
    print(f"{'x':>7}  {'direct':>12}  {'from zeros':>12}  {'abs err':>9}")
    x = 4.5
    while x <= x_max:
        direct = psi_direct(x)
        approx = explicit_formula_psi(x, zeros, len(zeros)).value.real
        print(f"{x:7.1f}  {direct:12.6f}  {approx:12.6f}  {abs(approx - direct):9.4f}")
        x += 3.0
    print()


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--zeros", type=int, default=100)
    ap.add_argument("--x-max", type=float, default=30.0)
    args = ap.parse_args()
    zeros = zero_table(args.zeros)
    spectrum_side(2.0)
    zeros_side(zeros, (2.0, 3.0))
    prime_staircase(zeros, args.x_max)
    theoretical = 2.0 * math.pi / math.log(2.0)
    print(f"(for contrast: a spectrum with gap ln 2 would put poles {theoretical:.4f} "
          "apart on the imaginary axis; zeta's zeros are not equally spaced, "
          "which is the whole story)")


if __name__ == "__main__":
    main()
