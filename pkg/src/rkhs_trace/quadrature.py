"""Weighted area integrals on the unit disk.

Measure: ``|z|^gamma (log 1/|z|)^beta dA(z) / pi``, applied to k-th
derivatives.  The radial variable is always substituted as ``r = e^{-t}``,
which turns the log singularity into a Laguerre weight ``t^beta e^{-t}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_genlaguerre

from ._errors import ParameterError
from ._summation import csum
from .series import PowerSeries
from .weights import builtin_family, gamma_fn


@dataclass(frozen=True)
class DiskWeight:
    gamma: float = 0.0
    beta: float = 0.0
    k: int = 0

    def __post_init__(self):
        if not self.gamma > -2:
            raise ParameterError(f"gamma must exceed -2, got {self.gamma}")
        if not self.beta > -1:
            raise ParameterError(f"beta must exceed -1, got {self.beta}")
        if self.k < 0 or int(self.k) != self.k:
            raise ParameterError(f"k must be a nonnegative integer, got {self.k}")


def differentiate(f: PowerSeries, k: int) -> PowerSeries:
    """k-th derivative, a_n -> n (n-1) ... (n-k+1) a_n at index n - k."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return f
    if f.degree < k:
        return PowerSeries()
    n = np.arange(k, f.degree + 1)
    falling = np.ones(n.shape, dtype=float)
    for i in range(k):
        falling *= n - i
    return PowerSeries(falling * f.coeffs[k:])


def disk_moment_analytic(dw: DiskWeight, n: int) -> float:
    """(1/pi) int_D |z|^{2n} |z|^gamma (log 1/|z|)^beta dA = 2 Gamma(beta+1) / (gamma+2n+2)^{beta+1}."""
    a = dw.gamma + 2.0 * n + 2.0
    return 2.0 * gamma_fn(dw.beta + 1.0) / a ** (dw.beta + 1.0)


@lru_cache(maxsize=256)
def _laguerre(nodes: int, beta: float):
    x, wts = roots_genlaguerre(nodes, beta)
    return x, wts


@dataclass(frozen=True)
class QuadResult:
    value: float
    nodes: int
    estimate: float
    converged: bool


def _radial_integral(a: float, beta: float, tol: float, fn=None, spread: float = 0.0,
                     max_nodes: int = 256) -> QuadResult:
    """2 * int_0^inf e^{-a t} t^beta F(e^{-t}) dt with doubling Gauss-Laguerre rules.

    ``F`` is a polynomial in r = e^{-t} of degree ``spread``, so the
    integrand mixes decay rates in [a, a + spread].  Substituting t = u / c
    with c = sqrt(a (a + spread)) / 2 puts those rates, relative to the
    generalised Laguerre weight u^beta e^{-u}, around 2.
    """
    c = math.sqrt(a * (a + spread)) / 2.0
    pref = 2.0 * c ** (-(beta + 1.0))
    prev, est = None, float("nan")
    nodes = 8
    while nodes <= max_nodes:
        u, wts = _laguerre(nodes, float(beta))
        with np.errstate(over="ignore", invalid="ignore"):
            g = np.exp(-(a / c - 1.0) * u)
            if fn is not None:
                g = g * fn(np.exp(-u / c))
            val = pref * csum(wts * g)
        if prev is not None:
            est = abs(val - prev)
            if est < tol * max(1.0, abs(val)):
                return QuadResult(val, nodes, est, True)
        prev = val
        nodes *= 2
    return QuadResult(prev, nodes // 2, est, False)


def disk_moment_numeric(dw: DiskWeight, n: int, tol: float = 1e-12) -> float:
    """Numeric value of the moment via r = e^{-t} and Gauss-Laguerre nodes."""
    a = dw.gamma + 2.0 * n + 2.0
    q = _radial_integral(a, dw.beta, tol)
    if not q.converged:
        raise ArithmeticError(f"moment quadrature did not converge (estimate {q.estimate:.3g})")
    return float(q.value.real)


def weighted_inner_product_num(f: PowerSeries, g: PowerSeries, dw: DiskWeight,
                               tol: float = 1e-12, mode: str = "orthogonal") -> complex:
    """(1/pi) int_D f^(k) conj(g^(k)) |z|^gamma (log 1/|z|)^beta dA.

    ``mode="orthogonal"`` drops angular cross terms exactly and sums numeric
    moments of matched degrees.  ``mode="grid"`` integrates the product on a
    polar grid: trapezoid in theta (exact for the trigonometric polynomial
    at hand) times the Laguerre radial rule.  Grid mode loses accuracy as
    gamma approaches -2 with high degrees and raises ArithmeticError there.
    """
    fk, gk = differentiate(f, dw.k), differentiate(g, dw.k)
    if fk.is_zero() or gk.is_zero():
        return 0j
    if mode == "orthogonal":
        n = min(len(fk.coeffs), len(gk.coeffs))
        terms = [fk.coeffs[j] * np.conj(gk.coeffs[j]) * disk_moment_numeric(dw, j, tol)
                 for j in range(n)]
        return csum(terms)
    if mode != "grid":
        raise ValueError(f"unknown mode {mode!r}")
    df, dg = fk.degree, gk.degree
    n_theta = 2 * (df + dg) + 1
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    eit = np.exp(1j * theta)

    def angular(r):
        # mean over theta of f(r e^it) conj(g(r e^it)), for each radius r
        z = np.outer(r, eit)
        fv = np.polynomial.polynomial.polyval(z, fk.coeffs)
        gv = np.polynomial.polynomial.polyval(z, gk.coeffs)
        return np.mean(fv * np.conj(gv), axis=1)

    # (1/pi) int r^gamma (..)^beta * r dr dtheta = 2 int mean_theta(...) r^{gamma+1} dr
    a = dw.gamma + 2.0
    q = _radial_integral(a, dw.beta, tol, fn=angular, spread=df + dg)
    if not q.converged:
        raise ArithmeticError(f"grid quadrature did not converge (estimate {q.estimate:.3g})")
    return complex(q.value)


def dirichlet_integral_num(f: PowerSeries, g: PowerSeries, tol: float = 1e-12,
                           mode: str = "orthogonal") -> complex:
    """(1/pi) int_D f' conj(g') dA."""
    return weighted_inner_product_num(f, g, DiskWeight(0.0, 0.0, 1), tol, mode)


def exact_weighted_norm2(dw: DiskWeight, n: int) -> float:
    """<z^n, z^n> for the weighted measure with k derivatives, closed form."""
    if n < dw.k:
        return 0.0
    falling = math.prod(range(n - dw.k + 1, n + 1))
    return falling ** 2 * disk_moment_analytic(dw, n - dw.k)


def tabled_alpha(dw: DiskWeight, n: int) -> float:
    """The weight the tables pair with this measure.

    k = 0 uses Gamma(beta+1)/(gamma+2n+2)^(1+beta); k >= 1 uses the
    derivative family (n-k+1) Gamma(beta+1)/(gamma+2n+2)^(1+beta) prod (n-k+i)^2.
    """
    if dw.k == 0:
        return builtin_family("gamma_log", (dw.gamma, dw.beta))(n)
    return builtin_family("gamma_log_deriv", (dw.gamma, dw.beta, dw.k))(n)


@dataclass(frozen=True)
class MomentRow:
    gamma: float
    beta: float
    k: int
    n: int
    analytic: float
    numeric: float
    tabled: float
    ratio: float


def moment_table(dw: DiskWeight, n_max: int = 10, tol: float = 1e-12) -> list[MomentRow]:
    rows = []
    for n in range(dw.k, n_max + 1):
        exact = exact_weighted_norm2(dw, n)
        num = weighted_inner_product_num(PowerSeries.monomial(n), PowerSeries.monomial(n), dw, tol).real
        tab = tabled_alpha(dw, n)
        rows.append(MomentRow(dw.gamma, dw.beta, dw.k, n, exact, num, tab,
                              num / tab if tab else float("nan")))
    return rows


def ratio_spread(rows: list[MomentRow]) -> tuple[float, float]:
    """(mean ratio c, max relative deviation of the ratios from c)."""
    r = np.array([row.ratio for row in rows if np.isfinite(row.ratio)])
    c = float(np.mean(r))
    return c, float(np.max(np.abs(r - c)) / abs(c))
