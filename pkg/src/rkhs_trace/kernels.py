"""Reproducing kernels K_w(z) = sum_n (conj(w) z)^n / alpha_n.

The series is the ground truth.  Closed forms from the example tables are
verification targets: each table entry is tied to the first index its sum
starts from, and when that differs from the family's start index the missing
head terms are added back ("start-index reconciliation").
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._errors import DomainError
from ._summation import csum
from .series import PowerSeries, _check_member, evaluate, inner_product
from .weights import WeightSequence, builtin_family

MAX_TERMS = 1_000_000
_CHUNK = 512


def _check_disk(zeta: complex) -> None:
    if not abs(zeta) < 1:
        raise DomainError(f"|zeta| = {abs(zeta):.6g} must be < 1")


def kernel_series_at(w: WeightSequence, zeta: complex, tol: float = 1e-15) -> complex:
    """sum_{n >= start} zeta^n / alpha_n, summed until the tail bound drops below tol.

    The tail after term n is bounded by ``|t_n| q / (1 - q)`` with
    ``q = |zeta| * max(1, alpha_n / alpha_{n+1})``; for weights whose ratio
    is monotone towards 1 this bounds every later term ratio.
    """
    zeta = complex(zeta)
    _check_disk(zeta)
    s = w.start_index
    if zeta == 0:
        return complex(1.0 / w(0)) if s == 0 else 0j
    parts = []
    n0 = s
    az = abs(zeta)
    while n0 - s < MAX_TERMS:
        n = np.arange(n0, n0 + _CHUNK)
        a = w.values(np.append(n, n0 + _CHUNK))
        terms = zeta ** n.astype(float) / a[:-1]
        parts.append(terms)
        q = az * max(1.0, a[-2] / a[-1])
        if q < 1:
            tail = abs(terms[-1]) * q / (1.0 - q)
            total = csum(np.concatenate(parts))
            if tail < tol * max(1.0, abs(total)):
                return total
        n0 += _CHUNK
    raise DomainError(f"kernel series did not reach tol {tol} within {MAX_TERMS} terms")


def kernel_series(w: WeightSequence, z: complex, wpt: complex, tol: float = 1e-15) -> complex:
    """K(z, w) = K_w(z) for ``wpt`` = w."""
    return kernel_series_at(w, complex(z) * complex(wpt).conjugate(), tol)


def polylog(s: int, z: complex, tol: float = 1e-16) -> complex:
    """Li_s(z) = sum_{k>=1} z^k / k^s on the open unit disk."""
    z = complex(z)
    if s < 1 or int(s) != s:
        raise DomainError(f"order must be a positive integer, got {s}")
    if not abs(z) < 1:
        raise DomainError(f"|z| = {abs(z):.6g} must be < 1; continuation is not provided")
    if z == 0:
        return 0j
    if s == 1:
        return -cmath.log(1 - z)
    return _polylog_series(s, z, tol)


def _polylog_series(s: int, z: complex, tol: float) -> complex:
    # |z^k/k^s| <= |z|^k, so the tail after K is below |z|^{K+1} / (1 - |z|)
    az = abs(z)
    parts = []
    k0 = 1
    while k0 <= MAX_TERMS:
        k = np.arange(k0, k0 + _CHUNK, dtype=float)
        parts.append(z ** k / k ** s)
        k_last = k0 + _CHUNK - 1
        if az ** (k_last + 1) / (1 - az) < tol:
            return csum(np.concatenate(parts))
        k0 += _CHUNK
    raise DomainError(f"polylog series did not reach tol {tol} within {MAX_TERMS} terms")


def li1_series(z: complex, tol: float = 1e-16) -> complex:
    """Li_1 by its series; compare with ``polylog(1, z)`` = -log(1 - z)."""
    _check_disk(z)
    return _polylog_series(1, complex(z), tol) if z != 0 else 0j


# -- closed forms ----------------------------------------------------------

def _geometric(zeta):
    return zeta / (1 - zeta)


def _log(zeta):
    return -cmath.log(1 - zeta)


def _log_over_zeta(zeta):
    # -log(1 - zeta)/zeta - 1 = sum_{n>=1} zeta^n/(n+1); direct sum near 0
    if abs(zeta) < 1e-4:
        total, term, n = 0j, zeta, 1
        while True:
            t = term / (n + 1)
            total += t
            if abs(t) < 1e-17 * max(abs(total), 1e-300):
                return total
            term *= zeta
            n += 1
    return -cmath.log(1 - zeta) / zeta - 1


def _rational(zeta):
    return zeta / (1 - zeta) ** 2


def _rational_shifted(zeta):
    return zeta * (2 - zeta) / (1 - zeta) ** 2


def kernel_n2n1(zeta: complex) -> complex:
    """2 zeta + (1 - zeta) log(1 - zeta) - Li_2(zeta): kernel of alpha_n = n^2 (n - 1)."""
    zeta = complex(zeta)
    _check_disk(zeta)
    if zeta == 0:
        return 0j
    return 2 * zeta + (1 - zeta) * cmath.log(1 - zeta) - polylog(2, zeta)


def kernel_n2n1_tabled(zeta: complex) -> complex:
    """Table spelling: 2 zeta + log((1 - zeta)^(1 - zeta)) - Li_2(zeta), principal branches."""
    zeta = complex(zeta)
    _check_disk(zeta)
    if zeta == 0:
        return 0j
    return 2 * zeta + cmath.log((1 - zeta) ** (1 - zeta)) - polylog(2, zeta)


@dataclass(frozen=True)
class KernelForm:
    """A tabled closed form for a weight family's kernel.

    ``table_start`` is the first index the tabled expression sums from; when
    it exceeds the family's start index, head terms ``zeta^n / alpha_n`` for
    ``start <= n < table_start`` are added.
    """

    family: str
    closed_form: str  # geometric | log | log-over-zeta | rational | polylog-composite | partial-fraction-composite | series-only
    expression: str
    table_start: int | None
    fn: Callable[[complex], complex] | None = None

    def convention(self, w: WeightSequence) -> str:
        if self.fn is None:
            return "series only"
        if self.table_start == w.start_index:
            return f"table entry sums from n={self.table_start} (matches start index)"
        head = ", ".join(f"n={n}" for n in range(w.start_index, self.table_start))
        return (f"table entry sums from n={self.table_start}; series starts at "
                f"n={w.start_index}; added head term(s) {head}")


KERNEL_FORMS = {
    "one": KernelForm("one", "geometric", "wz/(1-wz)", 1, _geometric),
    "n": KernelForm("n", "log", "-ln(1-wz)", 1, _log),
    "n_plus_1": KernelForm("n_plus_1", "log-over-zeta", "-ln(1-wz)/(wz) - 1", 1, _log_over_zeta),
    "n2_nminus1": KernelForm("n2_nminus1", "polylog-composite",
                             "2wz + (1-wz)ln(1-wz) - Li2(wz)", 2, kernel_n2n1),
    "inv_n": KernelForm("inv_n", "rational", "wz/(1-wz)^2", 1, _rational),
    "inv_n_plus_1": KernelForm("inv_n_plus_1", "rational", "wz(2-wz)/(1-wz)^2", 1, _rational_shifted),
    "gamma_log": KernelForm("gamma_log", "series-only", "sum (g+2n+2)^(1+b) (wz)^n / Gamma(b+1)", None),
    "gamma_log_deriv": KernelForm("gamma_log_deriv", "series-only",
                                  "sum (g+2n+2)^(1+b) prod (n-k+i)^-2 (wz)^n / ((n-k+1) Gamma(b+1))",
                                  None),
}


def kernel_form_for(w: WeightSequence) -> KernelForm:
    return KERNEL_FORMS.get(w.name, KernelForm(w.name, "series-only", "series", None))


def closed_form_eval(kf: KernelForm, zeta: complex, w: WeightSequence | None = None) -> complex:
    """Evaluate the tabled expression; with ``w``, add reconciled head terms."""
    zeta = complex(zeta)
    _check_disk(zeta)
    if kf.fn is None:
        raise ValueError(f"family {kf.family!r} has no closed form (series only)")
    val = kf.fn(zeta)
    if w is not None and kf.table_start is not None:
        for n in range(w.start_index, kf.table_start):
            val += zeta ** n / w(n)
    return val


# -- the beta = 2, k = 3 partial-fraction kernel ---------------------------

PF_GROUPS = ("1/(n-2)", "1/(n-1)", "1/n^2", "1/n", "1/(n-1)^2")


def pf_coefficients(gamma: float) -> tuple[float, ...]:
    """Numerators of the five groups, with the signs as they enter the sum (x 1/8)."""
    g = gamma
    return (
        g * g + 12 * g + 36,
        4 * g * g + 16 * g,
        -(2 * g * g + 8 * g + 8),
        -(5 * g * g + 28 * g + 36),
        -(4 * g * g + 32 * g + 64),
    )


def pf_group_closed(gamma: float, zeta: complex) -> tuple[complex, ...]:
    """Each group of the closed form, (1/8) times its tabled expression."""
    z = complex(zeta)
    L = cmath.log(1 - z)
    li2 = polylog(2, z) if z != 0 else 0j
    g = gamma
    return (
        -(g * g + 12 * g + 36) * (z * z * L) / 8,
        -(4 * g * g + 16 * g) * (z * L + z * z) / 8,
        (2 * g * g + 8 * g + 8) * (z + z * z / 4 - li2) / 8,
        (5 * g * g + 28 * g + 36) * (L + z + z * z / 2) / 8,
        (4 * g * g + 32 * g + 64) * (z * z - z * li2) / 8,
    )


def _sum_from3(zeta: complex, denom: Callable[[np.ndarray], np.ndarray], tol: float) -> complex:
    az = abs(zeta)
    parts = []
    n0 = 3
    while n0 <= MAX_TERMS:
        n = np.arange(n0, n0 + _CHUNK, dtype=float)
        parts.append(zeta ** n / denom(n))
        if az ** (n0 + _CHUNK) / (1 - az) < tol:
            return csum(np.concatenate(parts))
        n0 += _CHUNK
    raise DomainError("series did not converge")


def pf_group_series(gamma: float, zeta: complex, tol: float = 1e-17) -> tuple[complex, ...]:
    """Each group summed directly: (c/8) * sum_{n>=3} zeta^n / d(n)."""
    z = complex(zeta)
    c = pf_coefficients(gamma)
    denoms = (
        lambda n: n - 2.0,
        lambda n: n - 1.0,
        lambda n: n * n,
        lambda n: n,
        lambda n: (n - 1.0) ** 2,
    )
    if z == 0:
        return (0j,) * 5
    return tuple(ci / 8 * _sum_from3(z, d, tol) for ci, d in zip(c, denoms))


def pf_displayed_series(gamma: float, zeta: complex, tol: float = 1e-17) -> complex:
    """(1/2) sum_{n>=3} zeta^n (gamma+2n+2)^2 / ((n-2)(n-1)^2 n^2), as displayed."""
    z = complex(zeta)
    _check_disk(z)
    if z == 0:
        return 0j
    return 0.5 * _sum_from3(
        z, lambda n: (n - 2.0) * (n - 1.0) ** 2 * n * n / (gamma + 2 * n + 2) ** 2, tol
    )


def kernel_pf_beta2_k3(gamma: float, zeta: complex) -> complex:
    """Closed form of the beta = 2, k = 3 example, summed over the five groups."""
    z = complex(zeta)
    _check_disk(z)
    if not gamma > -2:
        raise DomainError(f"gamma must exceed -2, got {gamma}")
    if z == 0:
        return 0j
    return sum(pf_group_closed(gamma, z))


@dataclass(frozen=True)
class PFCheck:
    gamma: float
    zeta: complex
    closed: complex
    series: complex
    rel_err: float
    first_failing_group: str | None
    family_kernel: complex
    family_rel_diff: float


def pf_check(gamma: float, zeta: complex, tol: float = 1e-8) -> PFCheck:
    """Compare the partial-fraction closed form with the displayed series.

    On failure, reports the first of the five groups whose closed form
    disagrees with its own direct sum.  Also records the distance to the
    actual gamma_log_deriv(gamma, 2, 3) kernel, whose numerator carries the
    power 1 + beta = 3 rather than the displayed square.
    """
    z = complex(zeta)
    closed = kernel_pf_beta2_k3(gamma, z)
    series = pf_displayed_series(gamma, z)
    rel = abs(closed - series) / max(abs(series), 1e-300) if series != 0 else abs(closed)
    bad = None
    if rel > tol:
        gc = pf_group_closed(gamma, z)
        gs = pf_group_series(gamma, z)
        for name, a, b in zip(PF_GROUPS, gc, gs):
            if abs(a - b) > tol * max(abs(b), abs(series), 1e-300):
                bad = name
                break
    fam = builtin_family("gamma_log_deriv", (gamma, 2, 3))
    kern = kernel_series_at(fam, z) if z != 0 else 0j
    fdiff = abs(kern - series) / max(abs(kern), 1e-300) if kern != 0 else abs(series)
    return PFCheck(gamma, z, closed, series, rel, bad, kern, fdiff)


# -- reproducing property ---------------------------------------------------

def kernel_polynomial(w: WeightSequence, wpt: complex, degree: int) -> PowerSeries:
    """K_w truncated at ``degree``: coefficients conj(w)^n / alpha_n for n >= start."""
    n = np.arange(degree + 1)
    c = np.zeros(degree + 1, dtype=complex)
    live = n >= w.start_index
    c[live] = np.conj(complex(wpt)) ** n[live].astype(float) / w.values(n[live])
    return PowerSeries(c)


def reproducing_check(w: WeightSequence, f: PowerSeries, wpt: complex) -> tuple[complex, complex]:
    """(f(w), <f, K_w>) with K_w truncated at deg f (exact for polynomials)."""
    _check_member(f, w)
    if not abs(wpt) < 1:
        raise DomainError(f"|w| = {abs(wpt):.6g} must be < 1")
    K = kernel_polynomial(w, wpt, max(f.degree, 0))
    return evaluate(f, complex(wpt)), inner_product(f, K, w)


def zeta_grid(radii=None, phases: int = 8) -> list[complex]:
    if radii is None:
        radii = [round(0.1 * i, 10) for i in range(1, 10)]
    return [r * cmath.exp(2j * math.pi * k / phases) for r in radii for k in range(phases)]
