"""Polynomials as elements of H_alpha, and their coefficient inner products."""

from __future__ import annotations

import cmath
import math
from typing import Iterable

import numpy as np

from ._errors import MembershipError
from ._summation import csum
from .weights import WeightSequence


class PowerSeries:
    """A polynomial ``sum_{n<=D} a_n z^n`` with complex coefficients.

    Trailing zeros are stripped on construction, so ``degree`` is exact and
    the zero polynomial has degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[complex] = ()):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=complex).ravel()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        self.coeffs = c

    @classmethod
    def monomial(cls, n: int, coeff: complex = 1.0) -> "PowerSeries":
        c = np.zeros(n + 1, dtype=complex)
        c[n] = coeff
        return cls(c)

    @classmethod
    def parse(cls, text: str) -> "PowerSeries":
        """Parse ``"0,1,0,2"`` or ``"1+2i,-0.5i"`` (lowest degree first)."""
        return cls(parse_complex(tok) for tok in text.split(",") if tok.strip())

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, n: int) -> complex:
        return complex(self.coeffs[n]) if 0 <= n < len(self.coeffs) else 0j

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, len(self.coeffs)), dtype=complex)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __add__(self, other):
        if not isinstance(other, PowerSeries):
            other = PowerSeries([other])
        n = max(len(self.coeffs), len(other.coeffs))
        return PowerSeries(self.padded(n) + other.padded(n))

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, PowerSeries):
            other = PowerSeries([other])
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            if self.is_zero() or other.is_zero():
                return PowerSeries()
            return PowerSeries(np.convolve(self.coeffs, other.coeffs))
        return PowerSeries(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __call__(self, z):
        return evaluate(self, z)

    def __repr__(self):
        return f"PowerSeries({format_coeffs(self.coeffs)})"


def parse_complex(tok: str) -> complex:
    t = tok.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    if t in ("i", "+i"):
        return 1j
    if t == "-i":
        return -1j
    t = t.replace("+i", "+1i").replace("-i", "-1i")
    return complex(t.replace("i", "j"))


def format_coeffs(coeffs) -> str:
    out = []
    for c in coeffs:
        c = complex(c)
        out.append(f"{c.real:g}" if c.imag == 0 else f"{c.real:g}{c.imag:+g}i")
    return ",".join(out)


def _check_member(f: PowerSeries, w: WeightSequence) -> None:
    head = f.coeffs[: w.start_index]
    if np.any(head != 0):
        raise MembershipError(
            f"coefficients below start_index={w.start_index} must vanish for {w.label}"
        )


def inner_product(f: PowerSeries, g: PowerSeries, w: WeightSequence) -> complex:
    """<f, g> = sum a_n conj(b_n) alpha_n."""
    _check_member(f, w)
    _check_member(g, w)
    n = min(len(f.coeffs), len(g.coeffs))
    if n <= w.start_index:
        return 0j
    idx = np.arange(w.start_index, n)
    terms = f.coeffs[idx] * np.conj(g.coeffs[idx]) * w.values(idx)
    return csum(terms)


def norm(f: PowerSeries, w: WeightSequence) -> float:
    return math.sqrt(max(inner_product(f, f, w).real, 0.0))


def dirichlet_form(f: PowerSeries, g: PowerSeries) -> complex:
    """(1/pi) * area integral of f' conj(g'), i.e. sum n a_n conj(b_n)."""
    n = min(len(f.coeffs), len(g.coeffs))
    if n <= 1:
        return 0j
    idx = np.arange(1, n)
    return csum(idx * f.coeffs[idx] * np.conj(g.coeffs[idx]))


def rotate(f: PowerSeries, theta: float) -> PowerSeries:
    """f(z) -> f(e^{i theta} z)."""
    n = np.arange(len(f.coeffs))
    return PowerSeries(f.coeffs * np.exp(1j * theta * n))


def evaluate(f: PowerSeries, z):
    """Horner evaluation; ``z`` may be a scalar or an array."""
    acc = np.zeros_like(np.asarray(z, dtype=complex))
    for c in f.coeffs[::-1]:
        acc = acc * z + c
    return complex(acc) if np.ndim(acc) == 0 else acc


def random_polynomial(rng: np.random.Generator, degree: int, start_index: int = 0) -> PowerSeries:
    """Complex coefficients uniform in the unit box, support in [start_index, degree]."""
    c = np.zeros(degree + 1, dtype=complex)
    k = degree + 1 - start_index
    if k > 0:
        c[start_index:] = rng.uniform(-1, 1, k) + 1j * rng.uniform(-1, 1, k)
    return PowerSeries(c)


def unit_phase(theta: float) -> complex:
    return cmath.exp(1j * theta)
