import cmath

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rkhs_trace import PowerSeries
from rkhs_trace._errors import DomainError
from rkhs_trace.kernels import (
    KERNEL_FORMS,
    closed_form_eval,
    kernel_form_for,
    kernel_n2n1,
    kernel_n2n1_tabled,
    kernel_pf_beta2_k3,
    kernel_series,
    kernel_series_at,
    li1_series,
    pf_check,
    pf_displayed_series,
    polylog,
    reproducing_check,
    zeta_grid,
)
from rkhs_trace.series import random_polynomial
from rkhs_trace.weights import builtin_family

CLOSED = ["one", "n", "n_plus_1", "n2_nminus1", "inv_n", "inv_n_plus_1"]
ALL = [builtin_family(n) for n in CLOSED] + [builtin_family("gamma_log", (1, 2)),
                                             builtin_family("gamma_log_deriv", (0, 2, 3))]

# frozen from mpmath at 40 digits
N2N1_AT_01 = 0.002557744808565197781
N2N1_AT_05 = 0.07118588325501483939
PF_G0_Z03 = 0.02557577031427227195
PF_G1_Z05 = 0.1566266886502132979
LI2_HALF = 0.5822405264650125059
GLD_123_AT_05 = 1.449265847948441604

disk_points = st.builds(
    lambda r, t: r * cmath.exp(1j * t),
    st.floats(min_value=0, max_value=0.85),
    st.floats(min_value=0, max_value=2 * np.pi),
)


def test_kernel_series_examples():
    assert kernel_series(builtin_family("one"), 0.5, 1.0) == pytest.approx(2.0, rel=1e-15)
    assert kernel_series(builtin_family("n"), 0.5, 1.0) == pytest.approx(np.log(2), rel=1e-15)
    for w in ALL:
        expect = 1 / w(0) if w.start_index == 0 else 0
        assert kernel_series(w, 0, 0.7 + 0.1j) == expect


def test_kernel_series_uses_conjugate():
    w = builtin_family("n_plus_1")
    assert kernel_series(w, 0.5j, 0.5j) == pytest.approx(kernel_series_at(w, 0.25), rel=1e-15)


def test_kernel_outside_disk():
    with pytest.raises(DomainError):
        kernel_series_at(builtin_family("one"), 1.0)


def test_polylog_examples():
    assert polylog(2, 0) == 0
    assert polylog(1, 0.5) == pytest.approx(np.log(2), rel=1e-15)
    assert polylog(2, 0.5) == pytest.approx(LI2_HALF, rel=1e-15)
    assert li1_series(0.5) == pytest.approx(np.log(2), rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(disk_points, st.integers(1, 5))
def test_polylog_against_mpmath(zeta, s):
    ref = complex(mpmath.polylog(s, zeta))
    assert abs(polylog(s, zeta) - ref) <= 1e-14 * max(1, abs(ref))


@settings(max_examples=100, deadline=None)
@given(st.builds(lambda r, t: r * cmath.exp(1j * t),
                 st.floats(min_value=0.05, max_value=0.8), st.floats(min_value=0, max_value=2 * np.pi)),
       st.integers(1, 4))
def test_polylog_recursion(zeta, s):
    # zeta d/dzeta Li_{s+1} = Li_s, central differences along the ray
    h = 1e-6
    d = (polylog(s + 1, zeta + h) - polylog(s + 1, zeta - h)) / (2 * h)
    assert abs(zeta * d - polylog(s, zeta)) <= 1e-7


def test_n2n1_examples():
    assert kernel_n2n1(0) == 0
    assert kernel_n2n1(0.1) == pytest.approx(N2N1_AT_01, rel=1e-13)
    assert kernel_n2n1(0.5) == pytest.approx(N2N1_AT_05, rel=1e-13)
    w = builtin_family("n2_nminus1")
    assert kernel_series_at(w, 0.1) == pytest.approx(N2N1_AT_01, rel=1e-14)
    # Taylor head: zeta^2/4 + zeta^3/18
    z = 1e-3
    assert kernel_n2n1(z) == pytest.approx(z * z / 4 + z ** 3 / 18, rel=1e-6)


def test_n2n1_tabled_matches_derived():
    for z in zeta_grid():
        assert abs(kernel_n2n1_tabled(z) - kernel_n2n1(z)) <= 1e-13


def test_closed_form_examples():
    assert closed_form_eval(KERNEL_FORMS["n"], 0.5) == pytest.approx(np.log(2), rel=1e-15)
    assert closed_form_eval(KERNEL_FORMS["inv_n"], 0.5) == pytest.approx(2.0, rel=1e-15)
    assert abs(closed_form_eval(KERNEL_FORMS["n_plus_1"], 0)) == 0
    assert abs(closed_form_eval(KERNEL_FORMS["n_plus_1"], 1e-6) - 0.5e-6) < 1e-12


def test_series_only_families():
    for w in ALL[-2:]:
        kf = kernel_form_for(w)
        assert kf.closed_form == "series-only"
        with pytest.raises(ValueError):
            closed_form_eval(kf, 0.3)
    w = builtin_family("gamma_log_deriv", (1, 2, 3))
    assert kernel_series_at(w, 0.5) == pytest.approx(GLD_123_AT_05, rel=1e-13)


@pytest.mark.parametrize("name", CLOSED)
def test_closed_form_agreement(name):
    w = builtin_family(name)
    kf = kernel_form_for(w)
    bound = 1e-10 if kf.closed_form == "polylog-composite" else 1e-9
    for z in zeta_grid():
        s = kernel_series_at(w, z)
        c = closed_form_eval(kf, z, w)
        assert abs(c - s) <= bound * abs(s)


def test_reconciliation_conventions():
    one = builtin_family("one")
    kf = kernel_form_for(one)
    # the tabled entry is the series from n = 1; the head term 1/alpha_0 is added back
    assert closed_form_eval(kf, 0.5) == pytest.approx(1.0)
    assert closed_form_eval(kf, 0.5, one) == pytest.approx(2.0)
    assert "added head term(s) n=0" in kf.convention(one)
    assert "matches start index" in kernel_form_for(builtin_family("n")).convention(builtin_family("n"))


@pytest.mark.parametrize("w", ALL, ids=lambda w: w.label)
def test_hermitian_and_positive(w):
    rng = np.random.default_rng(8)
    for _ in range(40):
        a, b = (0.85 * np.sqrt(rng.uniform()) * cmath.exp(2j * np.pi * rng.uniform()) for _ in range(2))
        k1, k2 = kernel_series(w, a, b), kernel_series(w, b, a)
        assert abs(k1 - np.conj(k2)) <= 1e-13 * max(1, abs(k1))
        d = kernel_series(w, a, a)
        assert d.real >= 0 and abs(d.imag) <= 1e-13 * max(1, d.real)


def test_pf_examples():
    assert kernel_pf_beta2_k3(0, 0) == 0
    assert kernel_pf_beta2_k3(0, 0.3) == pytest.approx(PF_G0_Z03, rel=1e-12)
    assert kernel_pf_beta2_k3(1, 0.5) == pytest.approx(PF_G1_Z05, rel=1e-12)
    assert pf_displayed_series(1, 0.5) == pytest.approx(PF_G1_Z05, rel=1e-13)


@pytest.mark.parametrize("gamma", [0.0, 1.0, 2.5])
def test_pf_closed_form_on_grid(gamma):
    for z in zeta_grid([0.1 * i for i in range(1, 8)]):
        c = pf_check(gamma, z)
        assert c.first_failing_group is None
        assert c.rel_err <= 1e-8


def test_pf_series_is_not_the_family_kernel():
    # the displayed series carries a square where the family has a cube
    c = pf_check(0.0, 0.5)
    assert c.family_rel_diff > 0.5


def test_reproducing_examples():
    fw, ip = reproducing_check(builtin_family("one"), PowerSeries.monomial(3), 0.5)
    assert fw == pytest.approx(0.125) and ip == pytest.approx(0.125)
    fw, ip = reproducing_check(builtin_family("n_plus_1"), PowerSeries([1, 1]), 0.2j)
    assert fw == pytest.approx(1 + 0.2j) and ip == pytest.approx(1 + 0.2j)
    fw, ip = reproducing_check(builtin_family("n2_nminus1"), PowerSeries.monomial(2), 0.7)
    assert fw == pytest.approx(0.49) and ip == pytest.approx(0.49)


@pytest.mark.parametrize("w", ALL, ids=lambda w: w.label)
def test_reproducing_random(w):
    rng = np.random.default_rng(13)
    for _ in range(100):
        f = random_polynomial(rng, int(rng.integers(w.start_index, 13)), w.start_index)
        pt = 0.8 * np.sqrt(rng.uniform()) * cmath.exp(2j * np.pi * rng.uniform())
        fw, ip = reproducing_check(w, f, pt)
        assert abs(fw - ip) <= 1e-10 * (1 + abs(fw))
