"""Compensated accumulation helpers.

``math.fsum`` tracks the exact running sum with Shewchuk partials, so the
result is the correctly rounded sum regardless of order.  Complex sums are
split into real and imaginary parts.
"""

import math

import numpy as np


def fsum(values):
    return math.fsum(np.asarray(values, dtype=float).ravel())


def csum(values):
    v = np.asarray(values, dtype=complex).ravel()
    re = math.fsum(v.real)
    im = math.fsum(v.imag)
    return complex(re, im)


def neville_at_zero(h, values):
    """Polynomial extrapolation of ``values`` sampled at ``h`` to ``h = 0``.

    Returns the tableau diagonal, i.e. the sequence of extrapolants using
    the first 1, 2, ... nodes.
    """
    h = [float(x) for x in h]
    p = [complex(v) for v in values]
    diag = [p[0]]
    n = len(h)
    table = list(p)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            table[i] = (h[i - j] * table[i] - h[i] * table[i - 1]) / (h[i - j] - h[i])
        diag.append(table[j])
    return diag
