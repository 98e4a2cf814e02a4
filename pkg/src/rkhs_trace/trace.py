"""Traces of shift commutators on H_alpha.

The commutator ``(S^dagger)^m S^m - S^m (S^dagger)^m`` is diagonal in the
monomial basis, and its trace is the sum of the diagonal.  The partial sum up
to index N telescopes to the m-term boundary sum
``sum_{n=N-m+1}^{N} |r|^2-products * alpha_{n+m}/alpha_n``, which tends to m.

Three routes are provided and checked against each other:

* ``series``: sum the diagonal terms over doubling windows; by default the
  partial sums are Richardson-extrapolated in 1/N (the boundary sum
  approaches m like ``p m^2 / N`` for weights growing like ``n^p``, so plain
  doubling would need N ~ 1e8 for 1e-6 accuracy).
* ``telescoped``: evaluate the boundary sum directly at doubling N, no
  extrapolation.
* ``matrix``: build banded truncations of f(S), g(S)^dagger, form the
  commutator, and read off its interior diagonal.

The trace of the finite commutator itself is always zero; only interior rows
carry information about the infinite-dimensional trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._errors import WindowError
from ._summation import csum, fsum, neville_at_zero
from .operators import (
    ShiftOperator,
    commutator_terms,
    truncate_polynomial_calculus,
)
from .series import PowerSeries, dirichlet_form
from .weights import classify

DEFAULT_NMAX = 1 << 22


@dataclass(frozen=True)
class TraceResult:
    value: complex | float
    partial_terms_used: int
    tail_estimate: float
    route: str
    converged: bool = True
    raw_tail: float = float("nan")
    diagnostic: str = ""
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def flagged(self) -> bool:
        return not self.converged or bool(self.diagnostic)


def series_partial_sum(op: ShiftOperator, m: int, N: int) -> float:
    """sum_{n=start}^{N} of the commutator diagonal, compensated."""
    s = op.start_index
    if N < s:
        return 0.0
    return fsum(commutator_terms(op, m, np.arange(s, N + 1)))


def telescoped_partial(op: ShiftOperator, m: int, N: int) -> float:
    """Boundary sum left after telescoping the series up to index N."""
    s = op.start_index
    if N < s + m:
        raise WindowError(f"N={N} must be >= start_index + m = {s + m}")
    n = np.arange(N - m + 1, N + 1)
    w = op.weights
    terms = op.r_abs2_product(n, m) * w.values(n + m) / w.values(n)
    return fsum(terms)


def _hypothesis_note(op: ShiftOperator) -> str:
    wc = classify(op.weights)
    notes = []
    if not wc.ratio_limit_ok:
        notes.append(f"ratio hypothesis fails (alpha ratio at window end {wc.ratio_at_end:.6g})")
    if wc.shape == "neither":
        notes.append("weights neither convex nor concave on window")
    if not op.shift_weights.is_unit:
        n = 1 << 16
        dev = abs(abs(complex(op.r([n])[0])) - 1.0)
        if dev > 1e-2:
            notes.append(f"|r_n| does not tend to 1 (|r_{n}| deviates by {dev:.3g})")
    return "; ".join(notes)


def monomial_trace_series(op: ShiftOperator, m: int, tol: float = 1e-10,
                          n_max: int = DEFAULT_NMAX, accelerate: bool = True,
                          check_hypotheses: bool = True) -> TraceResult:
    """tr((S^dagger)^m S^m - S^m (S^dagger)^m) by summing diagonal terms.

    Windows double from ``N0 = max(64, 8m + start)``.  With ``accelerate``
    the partial sums are Romberg-extrapolated and convergence is declared
    when successive extrapolants differ by less than ``tol``; otherwise the
    plain criterion ``|P(2N) - P(N)| < tol`` is used.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    s = op.start_index
    N = max(64, 8 * m + s)
    total = series_partial_sum(op, m, N)
    partials = [total]
    Ns = [N]
    romberg = [[total]]
    last_nonzero = _last_nonzero(op, m, s, N, -1)
    value, err, raw = total, math.inf, math.inf
    converged = False
    terminated = False
    while True:
        N2 = 2 * N
        if N2 > n_max:
            break
        block = commutator_terms(op, m, np.arange(N + 1, N2 + 1))
        nz = np.flatnonzero(block)
        if nz.size:
            last_nonzero = N + 1 + int(nz[-1])
        total = math.fsum([total, *block])
        raw = abs(total - partials[-1])
        partials.append(total)
        Ns.append(N2)
        N = N2
        if not nz.size and last_nonzero < Ns[-2]:
            # every term past the head vanishes identically
            value, err, converged, terminated = total, 0.0, True, True
            break
        if accelerate:
            row = [total]
            for j in range(1, len(romberg) + 1):
                f = 2.0 ** j
                row.append(row[j - 1] + (row[j - 1] - romberg[-1][j - 1]) / (f - 1.0))
            romberg.append(row)
            value = row[-1]
            err = abs(row[-1] - romberg[-2][-1])
        else:
            value, err = total, raw
        if err < tol and len(partials) >= 3:
            converged = True
            break

    used = (last_nonzero - s + 1) if terminated else (N - s + 1)
    diagnostic = ""
    if check_hypotheses:
        diagnostic = _hypothesis_note(op)
    if not converged:
        msg = f"no convergence by N={N} (estimate {err:.3g} >= tol {tol:.3g})"
        diagnostic = f"{diagnostic}; {msg}" if diagnostic else msg
    return TraceResult(float(value), used, float(err), "series", converged, float(raw),
                       diagnostic, {"partials": dict(zip(Ns, partials))})


def _last_nonzero(op, m, s, N, default):
    t = commutator_terms(op, m, np.arange(s, N + 1))
    nz = np.flatnonzero(t)
    return s + int(nz[-1]) if nz.size else default


def monomial_trace_telescoped(op: ShiftOperator, m: int, tol: float = 1e-10,
                              n_max: int = 1 << 50) -> TraceResult:
    """Limit of the boundary sum by plain doubling of N (no extrapolation)."""
    s = op.start_index
    N = max(64, 8 * m + s)
    prev = telescoped_partial(op, m, N)
    while 2 * N <= n_max:
        N *= 2
        cur = telescoped_partial(op, m, N)
        diff = abs(cur - prev)
        if diff < tol:
            return TraceResult(cur, N - s + 1, diff, "telescoped", True, diff)
        prev = cur
    return TraceResult(prev, N - s + 1, diff, "telescoped", False, diff,
                       f"no convergence by N={N}")


@lru_cache(maxsize=4096)
def _cached_monomial_trace(op: ShiftOperator, m: int, tol: float) -> TraceResult:
    return monomial_trace_series(op, m, tol, check_hypotheses=False)


def _quantised_tol(tol: float) -> float:
    return 10.0 ** math.floor(math.log10(tol))


def bilinear_form(f: PowerSeries, g: PowerSeries, op: ShiftOperator,
                  tol: float = 1e-8) -> TraceResult:
    """tr(g(S)^dagger f(S) - f(S) g(S)^dagger) = sum_j a_j conj(b_j) tr_j.

    Terms with j != k have no diagonal (they shift degree by j - k) and are
    dropped; ``matrix_trace_check`` keeps them and serves as the cross-check.
    """
    n = min(len(f.coeffs), len(g.coeffs))
    weights = [(j, f.coeffs[j] * np.conj(g.coeffs[j])) for j in range(1, n)]
    weights = [(j, c) for j, c in weights if c != 0]
    if not weights:
        return TraceResult(0j, 0, 0.0, "series")
    scale = sum(abs(c) for _, c in weights)
    inner_tol = _quantised_tol(tol / (scale + 1.0))
    parts, err, used, ok, notes = [], 0.0, 0, True, []
    for j, c in weights:
        r = _cached_monomial_trace(op, j, inner_tol)
        parts.append(c * r.value)
        err += abs(c) * r.tail_estimate
        used = max(used, r.partial_terms_used)
        ok = ok and r.converged
        if r.diagnostic:
            notes.append(f"m={j}: {r.diagnostic}")
    return TraceResult(csum(parts), used, err, "series", ok, diagnostic="; ".join(notes))


def dirichlet_oracle(f: PowerSeries, g: PowerSeries) -> complex:
    """(1/pi) * area integral of f' conj(g') over the disk."""
    return dirichlet_form(f, g)


def commutator_truncation(f: PowerSeries, g: PowerSeries, op: ShiftOperator, dim: int):
    fS = truncate_polynomial_calculus(f, op, False, dim)
    gSd = truncate_polynomial_calculus(g, op, True, dim)
    return (gSd @ fS) - (fS @ gSd)


def matrix_trace_check(f: PowerSeries, g: PowerSeries, op: ShiftOperator, N: int = 4096,
                       extrapolate: bool = True) -> TraceResult:
    """Trace via banded truncations of dimension N.

    Only rows ``n <= N - (deg f + deg g) - 1`` are exact.  Their running
    diagonal sums are partial traces at cutoffs ``M, M/2, M/4, ...``; with
    ``extrapolate`` these are polynomially extrapolated in 1/M to remove the
    O(1/M) truncation bias.  The unextrapolated interior sum is kept in
    ``extras['raw']``.
    """
    df, dg = max(f.degree, 0), max(g.degree, 0)
    if N <= 4 * (df + dg):
        raise ValueError(f"N={N} must exceed 4*(deg f + deg g) = {4 * (df + dg)}")
    C = commutator_truncation(f, g, op, N)
    diag = C.diagonal()
    last = N - (df + dg) - 1
    raw = csum(diag[: last + 1])
    extras = {"raw": raw, "interior_rows": last + 1, "full_trace": csum(diag)}
    if not extrapolate:
        return TraceResult(raw, last + 1, float("nan"), "matrix", True, extras=extras)

    floor_m = max(8, 2 * (df + dg))
    cutoffs = []
    M = last
    while M >= floor_m and len(cutoffs) < 8:
        cutoffs.append(M)
        M //= 2
    vals = [csum(diag[: M + 1]) for M in cutoffs]
    if all(v == vals[0] for v in vals):
        return TraceResult(vals[0], last + 1, 0.0, "matrix", True, extras=extras)
    # expansions are in 1/(M + 1 - start), any fixed shift is equivalent
    h = [1.0 / (M + 1.0) for M in cutoffs]
    diag_ext = neville_at_zero(h, vals)
    value = diag_ext[-1]
    err = abs(diag_ext[-1] - diag_ext[-2]) if len(diag_ext) > 1 else float("nan")
    extras["cutoffs"] = cutoffs
    return TraceResult(value, last + 1, float(err), "matrix", True, extras=extras)


@dataclass(frozen=True)
class SignReport:
    m: int
    window: tuple[int, int]
    tail_min: float
    tail_max: float
    head_min: float
    shape: str
    claim_holds: bool


def sign_pattern(op: ShiftOperator, m: int, N: int = 10_000) -> SignReport:
    """Check the sign structure of the trace series terms.

    For convex weights every term is claimed non-negative; for concave
    weights every term past the head is claimed non-positive; ``neither``
    carries no claim.  The report records whether the claim holds on
    ``[start, N]`` (tolerance 1e-13).
    """
    s = op.start_index
    n = np.arange(s, N + 1)
    t = commutator_terms(op, m, n)
    head, tail = t[:m], t[m:]
    shape = classify(op.weights).shape
    convex_ok = bool(np.all(t >= -1e-13))
    concave_ok = bool(np.all(tail <= 1e-13))
    # affine weights are both convex and concave; either pattern will do
    holds = {"convex": convex_ok, "concave": concave_ok,
             "affine": convex_ok or concave_ok}.get(shape, True)
    return SignReport(m, (s, N), float(tail.min()), float(tail.max()), float(head.min()),
                      shape, holds)
