"""Independent reference computations used to freeze expected test values.

Everything here is deliberately written against the package code paths it
checks: plain ascending series, bisection, finite differences, and brute
quadrature only.
"""

from __future__ import annotations

import math

import numpy as np


def bessel_j_series(m: int, x: float) -> float:
    """Ascending power series for J_m(x); reliable for x up to ~16."""
    half = 0.5 * x
    term = half**m / math.factorial(m)
    terms = [term]
    for k in range(300):
        term *= -(half * half) / ((k + 1.0) * (m + k + 1.0))
        terms.append(term)
        if abs(term) < 1e-24:
            break
    return math.fsum(terms)


def bessel_zero_by_bisection(m: int, k: int) -> float:
    """k-th positive zero of J_m located by sign marching + bisection."""
    x = 1e-6 if m == 0 else 0.9 * m
    f = bessel_j_series(m, x)
    found = 0
    step = 0.05
    for _ in range(100000):
        x2 = x + step
        f2 = bessel_j_series(m, x2)
        if f * f2 < 0.0:
            found += 1
            if found == k:
                a, b, fa = x, x2, f
                while b - a > 1e-14:
                    c = 0.5 * (a + b)
                    fc = bessel_j_series(m, c)
                    if fc == 0.0:
                        return c
                    if fa * fc < 0.0:
                        b = c
                    else:
                        a, fa = c, fc
                return 0.5 * (a + b)
        x, f = x2, f2
    raise RuntimeError(f"oracle failed to locate zero {k} of J_{m}")


def fd_gradient(f, p, step=1e-5):
    """Central finite-difference gradient of a scalar callable at point p."""
    p = np.asarray(p, dtype=float)
    g = []
    for i in range(p.size):
        e = np.zeros_like(p)
        e[i] = step
        g.append((f(p + e) - f(p - e)) / (2.0 * step))
    return np.array(g)


def fd_laplacian(f, p, step=1e-4):
    """5-point finite-difference Laplacian of a scalar callable at p (2D)."""
    p = np.asarray(p, dtype=float)
    ex = np.array([step, 0.0])
    ey = np.array([0.0, step])
    return (
        f(p + ex) + f(p - ex) + f(p + ey) + f(p - ey) - 4.0 * f(p)
    ) / step**2
