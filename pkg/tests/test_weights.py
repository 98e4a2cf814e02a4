import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rkhs_trace import ParameterError, UnknownFamilyError
from rkhs_trace._errors import DomainError, WindowError
from rkhs_trace.weights import (
    builtin_family,
    classify,
    custom_family,
    gamma_fn,
    load_custom_family,
    ratio,
    ratios,
    resolve_family,
    weight_at,
)

SIMPLE = ["one", "n", "n_plus_1", "n2_nminus1", "inv_n", "inv_n_plus_1"]
GAMMA_GRID = [(g, b) for g in (-1.0, 0.0, 1.0) for b in (0.0, 1.0, 2.0)]


def all_builtins():
    out = [builtin_family(name) for name in SIMPLE]
    out += [builtin_family("gamma_log", p) for p in GAMMA_GRID]
    out += [builtin_family("gamma_log_deriv", (g, b, k)) for g, b in GAMMA_GRID[:3] for k in (0, 1, 3)]
    return out


def test_weight_at_examples():
    assert weight_at(builtin_family("n_plus_1"), 0) == 1
    assert weight_at(builtin_family("n"), 0) == 0
    assert weight_at(builtin_family("n2_nminus1"), 3) == 18


def test_ratio_examples():
    assert ratio(builtin_family("one"), 17) == 1
    assert ratio(builtin_family("n_plus_1"), 0) == 2
    assert ratio(builtin_family("inv_n"), 1) == 0.5


def test_ratio_below_start_is_domain_error():
    with pytest.raises(DomainError):
        ratio(builtin_family("n"), 0)
    with pytest.raises(DomainError):
        ratio(builtin_family("n2_nminus1"), 1)


def test_start_indices():
    starts = {"one": 0, "n": 1, "n_plus_1": 0, "n2_nminus1": 2, "inv_n": 1, "inv_n_plus_1": 0}
    for name, s in starts.items():
        assert builtin_family(name).start_index == s
    assert builtin_family("gamma_log_deriv", (0, 0, 3)).start_index == 3


def test_gamma_log_generators():
    w = builtin_family("gamma_log", (0, 0))
    n = np.arange(0, 20)
    np.testing.assert_allclose(w(n), 1.0 / (2 * n + 2), rtol=1e-15)
    d = builtin_family("gamma_log_deriv", (0, 0, 1))
    np.testing.assert_allclose(d(n), n / (2 * n + 2), rtol=1e-15)


def test_unknown_family_and_bad_params():
    with pytest.raises(UnknownFamilyError):
        builtin_family("bogus")
    with pytest.raises(ParameterError):
        builtin_family("gamma_log", (-2.0, 0.0))
    with pytest.raises(ParameterError):
        builtin_family("gamma_log", (0.0, -1.0))
    with pytest.raises(ParameterError):
        builtin_family("gamma_log_deriv", (0.0, 0.0, 1.5))
    with pytest.raises(ParameterError):
        builtin_family("gamma_log", (1.0,))


def test_classify_examples():
    wc = classify(builtin_family("n_plus_1"), 1000, 1e-12)
    assert wc.shape == "affine" and wc.ratio_limit_ok
    wc = classify(builtin_family("inv_n_plus_1"), 1000, 1e-12)
    assert wc.shape == "convex" and wc.ratio_limit_ok
    wc = classify(builtin_family("n2_nminus1"), 1000)
    assert wc.shape == "convex" and wc.ratio_limit_ok
    assert wc.window == (2, 1000)


def test_classify_window_too_small():
    with pytest.raises(WindowError):
        classify(builtin_family("n2_nminus1"), 4)


def test_classify_concave_and_neither():
    assert classify(custom_family(lambda n: np.sqrt(n + 1.0))).shape == "concave"
    wiggle = custom_family(lambda n: 2.0 + np.cos(n))
    assert classify(wiggle).shape == "neither"


def test_classify_rejects_geometric_growth(tmp_path):
    p = tmp_path / "geo.txt"
    p.write_text("1\n2\n4\n8\n")
    wc = classify(load_custom_family(str(p)))
    assert not wc.ratio_limit_ok and not wc.root_limsup_ok
    assert wc.ratio_at_end == pytest.approx(2.0)


def test_custom_file_leading_zeros(tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("0\n0\n4\n18\n48\n")
    w = resolve_family(f"custom:{p}")
    assert w.start_index == 2
    assert w(4) == 48
    assert w(5) == pytest.approx(48 * 48 / 18)


@pytest.mark.parametrize("w", all_builtins(), ids=lambda w: w.label)
def test_positive_past_start(w):
    n = np.arange(w.start_index, 10_001)
    assert np.all(w(n) > 0)
    assert np.all(ratios(w, n) > 0)
    assert np.all(w(np.arange(0, w.start_index)) == 0)


@pytest.mark.parametrize("w", all_builtins(), ids=lambda w: w.label)
def test_limit_hypotheses_numerically(w):
    assert abs(ratio(w, 10_000) - 1) < 1e-3
    assert abs(w(10_000) ** (1 / 10_000) - 1) < 1e-2


@pytest.mark.parametrize("w", all_builtins(), ids=lambda w: w.label)
def test_classify_order_stable(w):
    shapes = [classify(w, N).shape for N in (w.start_index + 50, 2000, 10_000)]
    for a, b in zip(shapes, shapes[1:]):
        assert {a, b} != {"convex", "concave"}


def test_gamma_exact_on_integers():
    for k in range(1, 25):
        assert gamma_fn(k) == float(math.factorial(k - 1))


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-3, max_value=49.9))
def test_gamma_against_mpmath(x):
    ref = mpmath.gamma(mpmath.mpf(x))
    assert abs(gamma_fn(x) - float(ref)) <= 1e-13 * abs(float(ref))
