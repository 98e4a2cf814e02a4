"""Shifts, weighted shifts and their adjoints on H_alpha.

Everything acts on the monomial basis ``z^n``.  The weighted shift sends
``z^n -> r_n z^{n+1}``; its adjoint in H_alpha sends
``z^{n+1} -> conj(r_n) (alpha_{n+1}/alpha_n) z^n`` and kills ``z^start``.
The unilateral shift is the case ``r = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._errors import DomainError, MembershipError, ParameterError
from .series import PowerSeries, _check_member, inner_product
from .weights import WeightSequence

SHIFT_WEIGHT_FAMILIES = ("unit", "n_over_n_plus_1", "one_minus_inv_sq")


@dataclass(frozen=True)
class ShiftWeights:
    name: str
    fn: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)

    def __call__(self, n):
        n = np.asarray(n, dtype=np.int64)
        return np.asarray(self.fn(n), dtype=complex)

    @property
    def is_unit(self) -> bool:
        return self.name == "unit"


def _unit(n):
    return np.ones(np.shape(n), dtype=complex)


UNIT = ShiftWeights("unit", _unit)


def shift_weight_family(name: str) -> ShiftWeights:
    """Resolve ``unit``, ``n_over_n_plus_1``, ``one_minus_inv_sq`` or ``custom:<file>``."""
    if name == "unit":
        return UNIT
    if name == "n_over_n_plus_1":
        return ShiftWeights(name, lambda n: n / (n + 1.0))
    if name == "one_minus_inv_sq":
        return ShiftWeights(name, lambda n: 1.0 - 1.0 / (n + 2.0) ** 2)
    if name.startswith("custom:"):
        return load_shift_weights(name[len("custom:"):])
    raise ParameterError(
        f"unknown shift weights {name!r}; choose from {SHIFT_WEIGHT_FAMILIES} or custom:<file>"
    )


def load_shift_weights(path: str) -> ShiftWeights:
    # one complex per line, index-ordered; indices past the end reuse the last value
    from .series import parse_complex

    with open(path) as fh:
        vals = [parse_complex(line) for line in fh if line.strip() and not line.lstrip().startswith("#")]
    if not vals:
        raise ParameterError(f"no shift weights in {path}")
    table = np.array(vals, dtype=complex)

    def fn(n):
        return table[np.minimum(n, len(table) - 1)]

    return ShiftWeights(f"custom:{path}", fn)


@dataclass(frozen=True)
class ShiftOperator:
    weights: WeightSequence
    shift_weights: ShiftWeights = UNIT

    @property
    def start_index(self) -> int:
        return self.weights.start_index

    @property
    def label(self) -> str:
        return f"{self.weights.label}; r={self.shift_weights.name}"

    def r(self, n):
        return self.shift_weights(n)

    def r_product(self, n, m: int) -> np.ndarray:
        """prod_{i=n}^{n+m-1} r_i, vectorised over ``n``."""
        n = np.asarray(n, dtype=np.int64)
        out = np.ones(n.shape, dtype=complex)
        if self.shift_weights.is_unit:
            return out
        for i in range(m):
            out = out * self.r(n + i)
        return out

    def r_abs2_product(self, n, m: int) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        out = np.ones(n.shape, dtype=float)
        if self.shift_weights.is_unit:
            return out
        for i in range(m):
            out = out * np.abs(self.r(n + i)) ** 2
        return out

    def sup_r(self, window: int) -> float:
        n = np.arange(self.start_index, max(window, self.start_index) + 1)
        return float(np.max(np.abs(self.r(n))))


def unilateral(w: WeightSequence) -> ShiftOperator:
    return ShiftOperator(w, UNIT)


def weighted(w: WeightSequence, r: ShiftWeights | str) -> ShiftOperator:
    if isinstance(r, str):
        r = shift_weight_family(r)
    return ShiftOperator(w, r)


def _check_index(op: ShiftOperator, n: int) -> None:
    if n < op.start_index:
        raise DomainError(f"basis index {n} below start_index {op.start_index}")


def shift_power_action(op: ShiftOperator, m: int, n: int) -> tuple[int, complex]:
    """S_r^m z^n = (prod_{i=n}^{n+m-1} r_i) z^{n+m}."""
    _check_index(op, n)
    return n + m, complex(op.r_product([n], m)[0])


def adjoint_power_action(op: ShiftOperator, m: int, n: int) -> tuple[int, complex]:
    """(S_r^dagger)^m z^n.

    Zero when ``n - m`` drops below the start index; otherwise lands on
    ``z^{n-m}`` with coefficient ``conj(prod r_i) alpha_n / alpha_{n-m}``.
    """
    _check_index(op, n)
    if n - m < op.start_index:
        return n - m, 0j
    a = op.weights.values(np.array([n - m, n]))
    coef = np.conj(op.r_product([n - m], m)[0]) * a[1] / a[0]
    return n - m, complex(coef)


def apply(op: ShiftOperator, f: PowerSeries) -> PowerSeries:
    """S_r f."""
    _check_member(f, op.weights)
    if f.is_zero():
        return f
    n = np.arange(len(f.coeffs))
    c = np.zeros(len(f.coeffs) + 1, dtype=complex)
    c[1:] = f.coeffs * op.r(n)
    return PowerSeries(c)


def adjoint_apply(op: ShiftOperator, f: PowerSeries) -> PowerSeries:
    """S_r^dagger f: coefficient n is (alpha_{n+1}/alpha_n) a_{n+1} conj(r_n)."""
    _check_member(f, op.weights)
    s = op.start_index
    if f.degree <= s:
        return PowerSeries()
    n = np.arange(s, f.degree)
    a = op.weights.values(np.arange(s, f.degree + 1))
    c = np.zeros(f.degree, dtype=complex)
    c[s:] = (a[1:] / a[:-1]) * f.coeffs[s + 1:] * np.conj(op.r(n))
    return PowerSeries(c)


def adjoint_pairing_check(op: ShiftOperator, f: PowerSeries, g: PowerSeries) -> tuple[complex, complex]:
    """(<S f, g>, <f, S^dagger g>)."""
    w = op.weights
    return inner_product(apply(op, f), g, w), inner_product(f, adjoint_apply(op, g), w)


@dataclass(frozen=True)
class NormBound:
    value: float
    window: tuple[int, int]
    argmax: int


def norm_bound(op: ShiftOperator, window: int) -> NormBound:
    """sqrt(max_{n in window} (alpha_{n+1}/alpha_n) |r_n|^2)."""
    s = op.start_index
    if window < s:
        raise DomainError(f"window end {window} below start_index {s}")
    n = np.arange(s, window + 1)
    a = op.weights.values(np.arange(s, window + 2))
    q = (a[1:] / a[:-1]) * np.abs(op.r(n)) ** 2
    i = int(np.argmax(q))
    return NormBound(math.sqrt(float(q[i])), (s, window), int(n[i]))


def commutator_terms(op: ShiftOperator, m: int, n) -> np.ndarray:
    """Diagonal of (S^dagger)^m S^m - S^m (S^dagger)^m at z^n, vectorised."""
    n = np.asarray(n, dtype=np.int64)
    s = op.start_index
    if np.any(n < s):
        raise DomainError(f"basis index below start_index {s}")
    w = op.weights
    an = w.values(n)
    up = op.r_abs2_product(n, m) * w.values(n + m) / an
    down = np.zeros(n.shape, dtype=float)
    live = n - m >= s
    if np.any(live):
        nl = n[live]
        down[live] = op.r_abs2_product(nl - m, m) * an[live] / w.values(nl - m)
    return up - down


def commutator_diagonal(op: ShiftOperator, m: int, n: int) -> float:
    _check_index(op, n)
    return float(commutator_terms(op, m, np.array([n]))[0])


class BandedTruncation:
    """An N x N matrix stored by diagonals.

    ``bands[d][i]`` is the entry at row ``i``, column ``i + d``; slots whose
    column falls outside ``[0, N)`` are held at zero.  Products drop every
    contribution routed through an index outside the truncation, so they are
    the products of the truncated matrices.
    """

    def __init__(self, dim: int, bands: dict | None = None):
        self.dim = int(dim)
        self.bands: dict[int, np.ndarray] = {}
        for d, v in (bands or {}).items():
            self._put(d, np.asarray(v, dtype=complex))

    def _put(self, d, v):
        if abs(d) >= self.dim:
            return
        v = v.copy()
        if d > 0:
            v[self.dim - d:] = 0
        elif d < 0:
            v[:-d] = 0
        if d in self.bands:
            self.bands[d] = self.bands[d] + v
        else:
            self.bands[d] = v

    @classmethod
    def identity(cls, dim: int, start_index: int = 0):
        v = np.ones(dim, dtype=complex)
        v[:start_index] = 0
        return cls(dim, {0: v})

    @property
    def offsets(self) -> list[int]:
        return sorted(self.bands)

    def band(self, d: int) -> np.ndarray:
        return self.bands.get(d, np.zeros(self.dim, dtype=complex))

    def diagonal(self) -> np.ndarray:
        return self.band(0)

    def entry(self, row: int, col: int) -> complex:
        return complex(self.band(col - row)[row])

    def __add__(self, other: "BandedTruncation") -> "BandedTruncation":
        self._same_dim(other)
        out = BandedTruncation(self.dim, self.bands)
        for d, v in other.bands.items():
            out._put(d, v)
        return out

    def __sub__(self, other: "BandedTruncation") -> "BandedTruncation":
        return self + other.scaled(-1.0)

    def scaled(self, c: complex) -> "BandedTruncation":
        return BandedTruncation(self.dim, {d: v * c for d, v in self.bands.items()})

    def __matmul__(self, other: "BandedTruncation") -> "BandedTruncation":
        self._same_dim(other)
        N = self.dim
        out = BandedTruncation(N)
        for d1, a in self.bands.items():
            for d2, b in other.bands.items():
                # (AB)[i, i+d1+d2] += A[i, i+d1] * B[i+d1, i+d1+d2]
                shifted = np.zeros(N, dtype=complex)
                if d1 >= 0:
                    shifted[: N - d1] = b[d1:]
                else:
                    shifted[-d1:] = b[: N + d1]
                out._put(d1 + d2, a * shifted)
        return out

    def to_dense(self) -> np.ndarray:
        M = np.zeros((self.dim, self.dim), dtype=complex)
        rows = np.arange(self.dim)
        for d, v in self.bands.items():
            cols = rows + d
            ok = (cols >= 0) & (cols < self.dim)
            M[rows[ok], cols[ok]] = v[ok]
        return M

    def _same_dim(self, other):
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch {self.dim} vs {other.dim}")


def shift_truncation(op: ShiftOperator, dim: int) -> BandedTruncation:
    """Matrix of S_r on coefficient vectors: entry (n+1, n) = r_n for n >= start."""
    s = op.start_index
    rows = np.arange(dim)
    v = np.zeros(dim, dtype=complex)
    live = rows - 1 >= s
    v[live] = op.r(rows[live] - 1)
    return BandedTruncation(dim, {-1: v})


def adjoint_truncation(op: ShiftOperator, dim: int) -> BandedTruncation:
    """Matrix of S_r^dagger: entry (n, n+1) = conj(r_n) alpha_{n+1}/alpha_n for n >= start."""
    s = op.start_index
    rows = np.arange(dim)
    v = np.zeros(dim, dtype=complex)
    live = rows >= s
    n = rows[live]
    v[live] = np.conj(op.r(n)) * op.weights.values(n + 1) / op.weights.values(n)
    return BandedTruncation(dim, {1: v})


def truncate_polynomial_calculus(f: PowerSeries, op: ShiftOperator, dagger: bool,
                                 dim: int) -> BandedTruncation:
    """Banded truncation of f(S_r), or of f(S_r)^dagger when ``dagger``.

    Built by Horner's rule from the one-step matrices, so it does not reuse
    the closed-form power actions.  f(S)^dagger = sum conj(a_j) (S^dagger)^j.
    """
    if dim <= f.degree + op.start_index:
        raise ValueError(
            f"dimension {dim} must exceed deg f + start_index = {f.degree + op.start_index}"
        )
    ident = BandedTruncation.identity(dim, op.start_index)
    if f.is_zero():
        return BandedTruncation(dim)
    step = adjoint_truncation(op, dim) if dagger else shift_truncation(op, dim)
    coeffs = np.conj(f.coeffs) if dagger else f.coeffs
    out = ident.scaled(coeffs[-1])
    for c in coeffs[-2::-1]:
        out = (out @ step) + ident.scaled(c)
    return out


def membership_ok(f: PowerSeries, w: WeightSequence) -> bool:
    try:
        _check_member(f, w)
    except MembershipError:
        return False
    return True
