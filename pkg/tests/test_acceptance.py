"""The ten acceptance criteria, each at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py -v``; one PASS/FAIL line per
criterion is printed in the terminal summary.
"""

import cmath
import math
import time

import numpy as np
import pytest

from rkhs_trace import unilateral, weighted
from rkhs_trace.kernels import (
    closed_form_eval,
    kernel_form_for,
    kernel_n2n1,
    kernel_series_at,
    pf_check,
    reproducing_check,
)
from rkhs_trace.operators import adjoint_pairing_check, apply, norm_bound
from rkhs_trace.quadrature import (
    DiskWeight,
    disk_moment_analytic,
    disk_moment_numeric,
    moment_table,
    ratio_spread,
)
from rkhs_trace.series import norm, random_polynomial, rotate
from rkhs_trace.trace import (
    bilinear_form,
    dirichlet_oracle,
    matrix_trace_check,
    monomial_trace_series,
    series_partial_sum,
    telescoped_partial,
)
from rkhs_trace.weights import builtin_family

FAMILIES = [("one", ()), ("n", ()), ("n_plus_1", ()), ("n2_nminus1", ()), ("inv_n", ()),
            ("inv_n_plus_1", ()), ("gamma_log", (1.0, 2.0))]
SEED = 314159


def families():
    return [builtin_family(n, p) for n, p in FAMILIES]


def disk_grid(rmax=0.9):
    radii = [round(0.1 * i, 10) for i in range(1, int(round(rmax * 10)) + 1)]
    return [r * cmath.exp(2j * math.pi * k / 8) for r in radii for k in range(8)]


def test_c01_trace_formula(acceptance):
    t0 = time.perf_counter()
    worst = {}
    for w in families():
        op = unilateral(w)
        bound = 1e-12 if w.name == "one" else 1e-6
        errs = []
        for m in range(1, 6):
            r = monomial_trace_series(op, m, tol=bound / 10)
            errs.append(abs(r.value - m) if r.converged else math.inf)
            if w.name == "one":
                assert r.partial_terms_used == m
        worst[w.label] = (max(errs), bound)
    elapsed = time.perf_counter() - t0
    ok = all(e <= b for e, b in worst.values()) and elapsed < 5.0
    detail = f"max |tr - m| = {max(e for e, _ in worst.values()):.2e}; {elapsed:.2f}s"
    assert acceptance(1, ok, detail), worst


def test_c02_weighted_shift_trace(acceptance):
    worst = 0.0
    for w in (builtin_family("one"), builtin_family("n_plus_1")):
        for rname in ("n_over_n_plus_1", "one_minus_inv_sq"):
            op = weighted(w, rname)
            for m in range(1, 5):
                r = monomial_trace_series(op, m, tol=1e-6)
                worst = max(worst, abs(r.value - m) if r.converged else math.inf)
    assert acceptance(2, worst <= 1e-5, f"max |tr - m| = {worst:.2e} (bound 1e-5)")


def test_c03_route_agreement(acceptance):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for w in families():
        op = unilateral(w)
        for _ in range(100):
            f = random_polynomial(rng, int(rng.integers(0, 9)))
            g = random_polynomial(rng, int(rng.integers(0, 9)))
            b = bilinear_form(f, g, op, tol=1e-7).value
            m = matrix_trace_check(f, g, op, 4096).value
            d = dirichlet_oracle(f, g)
            worst = max(worst, abs(b - m), abs(b - d), abs(m - d))
    assert acceptance(3, worst <= 1e-6, f"max pairwise route gap = {worst:.2e} (bound 1e-6)")


def test_c04_telescoping(acceptance):
    worst = 0.0
    for w in families():
        op = unilateral(w)
        for m in range(1, 6):
            for N in (100, 1000, 10_000):
                d = abs(series_partial_sum(op, m, N) - telescoped_partial(op, m, N))
                worst = max(worst, d / (1e-10 * N))
    assert acceptance(4, worst <= 1.0, f"max |diff| / (1e-10 N) = {worst:.2e}")


def test_c05_kernel_closed_forms(acceptance):
    worst, conventions = {}, []
    for name in ("one", "n", "n_plus_1", "n2_nminus1", "inv_n", "inv_n_plus_1"):
        w = builtin_family(name)
        kf = kernel_form_for(w)
        bound = 1e-10 if kf.closed_form == "polylog-composite" else 1e-9
        e = max(abs(closed_form_eval(kf, z, w) - kernel_series_at(w, z)) / abs(kernel_series_at(w, z))
                for z in disk_grid())
        worst[name] = (e, bound)
        conventions.append(f"{name}: {kf.convention(w)}")
    # the composite against the bare series sum_{n>=2} zeta^n / (n^2 (n-1))
    for z in disk_grid():
        n = np.arange(2, 400)
        s = np.sum(z ** n / (n * n * (n - 1.0)))
        worst.setdefault("n2_nminus1_direct", (0.0, 1e-10))
        e = abs(kernel_n2n1(z) - s) / abs(s)
        worst["n2_nminus1_direct"] = (max(worst["n2_nminus1_direct"][0], e), 1e-10)
    for c in conventions:
        print("  ", c)
    ok = all(e <= b for e, b in worst.values())
    detail = "; ".join(f"{k} {e:.1e}" for k, (e, _) in worst.items())
    assert acceptance(5, ok, detail), worst


def test_c06_partial_fraction_kernel(acceptance):
    worst, failing, fam = 0.0, None, 0.0
    for gamma in (0.0, 1.0):
        for z in disk_grid(0.7):
            c = pf_check(gamma, z, 1e-8)
            worst = max(worst, c.rel_err)
            fam = max(fam, c.family_rel_diff)
            failing = failing or c.first_failing_group
    status = "closed form matches series" if failing is None else f"first failing group {failing}"
    detail = (f"{status}, max rel err {worst:.1e}; displayed series vs family kernel "
              f"differs by {fam:.2f} relative (reported)")
    assert acceptance(6, failing is None and worst <= 1e-8, detail)


def test_c07_reproducing_property(acceptance):
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for w in families():
        for _ in range(100):
            f = random_polynomial(rng, int(rng.integers(w.start_index, 13)), w.start_index)
            pt = 0.8 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
            fw, ip = reproducing_check(w, f, pt)
            worst = max(worst, abs(fw - ip) / (1 + abs(fw)))
    assert acceptance(7, worst <= 1e-10, f"max |f(w) - <f,K_w>| / (1+|f(w)|) = {worst:.2e}")


def test_c08_quadrature_moments(acceptance):
    worst, spread_worst, cs = 0.0, 0.0, []
    for gamma in (-1.0, 0.0, 1.0, 2.5):
        for beta in (0.0, 1.0, 2.0):
            dw = DiskWeight(gamma, beta, 0)
            for n in range(11):
                worst = max(worst, abs(disk_moment_numeric(dw, n, 1e-12) - disk_moment_analytic(dw, n)))
            c, spread = ratio_spread(moment_table(dw, 10))
            cs.append(c)
            spread_worst = max(spread_worst, spread)
    ok = worst <= 1e-8 and spread_worst <= 1e-8
    detail = (f"max moment err {worst:.1e}; ratio c = {np.mean(cs):.12g} "
              f"constant to {spread_worst:.1e}")
    assert acceptance(8, ok, detail)


def test_c09_isometry_and_boundedness(acceptance):
    rng = np.random.default_rng(SEED + 2)
    eps = np.finfo(float).eps
    iso, excess = 0.0, -math.inf
    for w in families():
        op = unilateral(w)
        for _ in range(100):
            f = random_polynomial(rng, int(rng.integers(w.start_index, 13)), w.start_index)
            nf = norm(f, w)
            theta = rng.uniform(0, 2 * math.pi)
            iso = max(iso, abs(norm(rotate(f, theta), w) - nf) / (nf * max(f.degree, 1) * eps))
            b = norm_bound(op, max(f.degree, w.start_index)).value
            excess = max(excess, norm(apply(op, f), w) ** 2 - (b * b * nf * nf + 1e-12))
    ok = iso <= 1.0 and excess <= 0
    detail = f"isometry err {iso:.2f} x degree*eps; max bound excess {excess:.1e}"
    assert acceptance(9, ok, detail)


def test_c10_adjoint_pairing(acceptance):
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for w in families():
        for rname in ("unit", "n_over_n_plus_1", "one_minus_inv_sq"):
            op = weighted(w, rname)
            for _ in range(100):
                f = random_polynomial(rng, int(rng.integers(w.start_index, 13)), w.start_index)
                g = random_polynomial(rng, int(rng.integers(w.start_index, 13)), w.start_index)
                lhs, rhs = adjoint_pairing_check(op, f, g)
                worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    assert acceptance(10, worst <= 1e-12, f"max relative pairing gap = {worst:.2e}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
