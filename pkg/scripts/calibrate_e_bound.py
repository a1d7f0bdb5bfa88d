#!/usr/bin/env python3
"""Calibrate the coefficient in the sandwich lemma's error-term bound.

The finite-size error of the slice integral against its limiting value is
E = K(b, d) - Gamma((d+1)/2) with b = lambda*alpha*r*rho^(alpha-1), and the
bound used by ball_measure_bounds is |E| <= C1 / (r * rho^(alpha-1)).

This script evaluates |E| * r * rho^(alpha-1) over the acceptance grid
(the four parameter triples crossed with n = 10^3 .. 10^12 along the
centering/critical sequences), takes the maximum, doubles it as a safety
factor, and prints the value frozen into lnnd.quadrature.E_BOUND_COEFFICIENT.

Usage: python scripts/calibrate_e_bound.py
"""

import math

from lnnd.model import ModelParams, critical_radius, sequence_a
from lnnd.quadrature import error_term_integral

GRID_PARAMS = [(2, 2.0, 1.0), (3, 2.0, 1.0), (2, 1.0, 1.0), (2, 3.0, 1.0)]
GRID_N = [10.0**k for k in range(3, 13)]


def main():
    worst = 0.0
    worst_at = None
    for d, alpha, lam in GRID_PARAMS:
        params = ModelParams(d, lam, alpha)
        gamma_factor = math.gamma((d + 1) / 2)
        for n in GRID_N:
            rho = (sequence_a(params, n) / lam) ** (1.0 / alpha)
            r = critical_radius(params, n, 0.0)
            b = lam * alpha * r * rho ** (alpha - 1.0)
            e_term = error_term_integral(b, d) - gamma_factor
            scaled = abs(e_term) * r * rho ** (alpha - 1.0)
            print(
                f"d={d} alpha={alpha} lam={lam} n={n:.0e}: b={b:.4f} "
                f"E={e_term:+.6f} |E|*r*rho^(a-1)={scaled:.6f}"
            )
            if scaled > worst:
                worst, worst_at = scaled, (d, alpha, lam, n)
    print(f"\nmax |E| * r * rho^(alpha-1) = {worst:.6f} at {worst_at}")
    print(f"E_BOUND_COEFFICIENT = {2.0 * worst:.4f}  (safety factor 2)")


if __name__ == "__main__":
    main()
