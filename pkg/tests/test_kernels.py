import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from conftest import closed_fn0, closed_y, mp_f_n, mp_y
from kondo_entanglement import kernels
from kondo_entanglement.kernels import (condition_lhs, corr_zz, f_n, f_over_n, g_fn, profile,
                                        werner_from_f_over_n, werner_p, y_integral)
from kondo_entanglement.model import derive_scales, make_params

LN101 = math.log(101.0)


def test_closed_form_antiderivatives():
    s, c = sp.symbols("s c", positive=True)
    F0 = 2 * s + c * sp.log((s - c) / (s + c))
    assert sp.simplify(sp.diff(F0, s) - 2 * s ** 2 / (s ** 2 - c ** 2)) == 0
    Fy = -s / (2 * (s ** 2 - c ** 2)) + sp.log((s - c) / (s + c)) / (4 * c)
    assert sp.simplify(sp.diff(Fy, s) - s ** 2 / (s ** 2 - c ** 2) ** 2) == 0


PARAMS = [(1e-3, 0.1), (1e-2, 0.05), (1e-4, 0.3), (0.5, 0.8), (3.0, 2.0)]


@pytest.mark.parametrize("eb, d", PARAMS)
def test_fn0_and_y_closed_forms(eb, d):
    p = make_params(eb, d)
    if eb < 1.0:
        assert f_n(0.0, p) == pytest.approx(closed_fn0(eb, p.cutoff), rel=1e-10)
        assert y_integral(p) == pytest.approx(closed_y(eb, p.cutoff), rel=1e-10)
    assert f_n(0.0, p) == pytest.approx(mp_f_n(0, eb, p.cutoff), rel=1e-10)
    assert y_integral(p) == pytest.approx(mp_y(eb, p.cutoff), rel=1e-10)


@pytest.mark.parametrize("x", [2e-4, 0.5, 1.0, math.pi, 10.0, 137.0, 1000.0, 20000.0])
def test_fn_against_mpmath(ref_params, x):
    ref = mp_f_n(x, 1e-3, 100.0)
    assert f_n(x, ref_params) == pytest.approx(ref, rel=1e-8, abs=1e-12)


def test_fn_large_x_small_eb_against_mpmath():
    p = make_params(1e-4, 0.05)
    for x in (3e3, 2e4, 1.3e5):
        assert f_n(x, p) == pytest.approx(mp_f_n(x, 1e-4, p.cutoff), rel=1e-6, abs=1e-10)


def test_fn0_limits():
    # eb -> 0 with cutoff 100: integrand tends to 1/(1+t)
    p = make_params(1e-12, 1e-10)
    assert p.cutoff == pytest.approx(100.0)
    assert f_n(0.0, p) == pytest.approx(LN101, abs=1e-8)
    assert y_integral(p) == pytest.approx(100.0 / 101.0, abs=1e-8)


def test_fn0_bounds_at_ref_params(ref_params):
    v = f_n(0.0, ref_params)
    assert LN101 <= v <= math.sqrt(1.1) * LN101


@pytest.mark.parametrize("eb, d", PARAMS[:3])
def test_fn_decays_beyond_screening_length(eb, d):
    p = make_params(eb, d)
    xi = derive_scales(p).xi_k
    for x in np.linspace(10 * xi, 12 * xi, 7):
        assert abs(f_n(x, p)) < 0.01 * f_n(0.0, p)


def test_y_near_one_in_weak_binding_regime(ref_params):
    assert y_integral(ref_params) == pytest.approx(1.0, rel=0.05)
    assert y_integral(ref_params.with_mode("paper-literal")) < 0.1


def test_y_vanishes_with_cutoff():
    assert y_integral(make_params(1e-3, 1e-12)) < 1e-8


@given(st.floats(1e-5, 0.3), st.floats(1e-3, 1.0))
def test_y_bounds(eb, d):
    p = make_params(eb, d)
    lam = p.cutoff
    y = y_integral(p)
    assert lam / (1 + lam) * (1 - 1e-12) <= y <= math.sqrt(1 + eb * lam) * lam / (1 + lam) * (1 + 1e-12)


@given(st.floats(1e-4, 1e-2), st.floats(0.05, 0.3), st.floats(0.0, 5e3))
def test_fn_envelope_and_identities(eb, d, x):
    p = make_params(eb, d)
    assert abs(f_n(x, p)) <= f_n(0.0, p) * (1 + 1e-12)
    fon = f_over_n(x, p)
    assert fon >= 0.0
    assert condition_lhs(x, p) == 2.0 * fon
    assert corr_zz(x, p) == -2.0 * fon
    assert werner_p(x, p) == pytest.approx(fon / (1 + fon), rel=1e-15)
    assert fon == pytest.approx(0.75 * eb * f_n(x, p) ** 2 / y_integral(p), rel=1e-15)


def test_small_x_branch_continuity(ref_params):
    lo = f_n(kernels.SMALL_X * (1 - 1e-9), ref_params)
    hi = f_n(kernels.SMALL_X * (1 + 1e-9), ref_params)
    assert lo == pytest.approx(hi, rel=1e-8)
    assert f_n(1e-6, ref_params) == pytest.approx(f_n(0.0, ref_params), rel=1e-8)


def test_f_over_n_at_origin(ref_params):
    expected = 0.75 * 1e-3 * mp_f_n(0, 1e-3, 100.0) ** 2 / mp_y(1e-3, 100.0)
    assert f_over_n(0.0, ref_params) == pytest.approx(expected, rel=1e-10)
    # the rough estimate built from ln 101 and y ~ 0.99
    assert f_over_n(0.0, ref_params) == pytest.approx(0.0161, rel=0.03)
    assert corr_zz(0.0, ref_params) == pytest.approx(-0.0322, rel=0.03)


def test_f_over_n_zero_at_node(ref_params):
    root = brentq(lambda x: f_n(x, ref_params), 1.0, math.pi, xtol=1e-14)
    assert f_over_n(root, ref_params) < 1e-25
    assert corr_zz(root, ref_params) <= 0.0


def test_below_half_everywhere(ref_params):
    xs = np.linspace(0.0, 3 * derive_scales(ref_params).xi_k, 600)
    assert np.max(profile(xs, ref_params).f_over_n) < 0.5


@pytest.mark.parametrize("eb", [1e-2, 1e-4])
def test_condition_below_one(eb):
    p = make_params(eb, 0.1)
    assert kernels.max_condition_lhs(p, 3 * derive_scales(p).xi_k, 500) < 1.0


@pytest.mark.parametrize("fon, p", [(0.0, 0.0), (0.5, 1 / 3), (1.0, 0.5)])
def test_werner_from_f_over_n(fon, p):
    assert werner_from_f_over_n(fon) == pytest.approx(p, rel=1e-15)


@given(st.floats(0, 1e3), st.floats(0, 1e3))
def test_werner_p_ordering(a, b):
    pa, pb = werner_from_f_over_n(a), werner_from_f_over_n(b)
    if a < b:
        assert pa <= pb
    assert (pa < 1 / 3) == (a < 0.5) == (2 * a < 1)


def test_g_examples():
    assert g_fn(0.0) == 1.0
    assert g_fn(math.pi) == pytest.approx(3.0 / math.pi ** 2, rel=1e-10)
    root = brentq(lambda x: math.tan(x) - x, 4.0, 4.7)
    assert root == pytest.approx(4.493409, abs=1e-6)
    assert abs(g_fn(root)) < 1e-14


def test_g_series_matches_closed_form():
    x = kernels._G_SERIES_X
    closed = 3 * (math.sin(x) - x * math.cos(x)) / x ** 3
    assert g_fn(x * (1 - 1e-12)) == pytest.approx(closed, rel=1e-13)
    xs = np.array([0.0, 0.05, 0.1, 1.0])
    np.testing.assert_array_equal(g_fn(xs), [g_fn(float(v)) for v in xs])


def test_g_zeros_are_tan_roots():
    roots = [brentq(lambda x: math.tan(x) - x, k * math.pi + 0.01, k * math.pi + math.pi / 2 - 1e-9)
             for k in range(1, 8)]
    xs = np.linspace(0.5, roots[-1] + 0.5, 20001)
    g = g_fn(xs)
    crossings = xs[:-1][np.sign(g[:-1]) != np.sign(g[1:])]
    np.testing.assert_allclose(crossings, roots, atol=1e-3)


@given(st.floats(0.0, 1e4))
def test_g_bounded(x):
    assert abs(g_fn(x)) <= 1.0


def test_g_rejects_negative():
    with pytest.raises(ValueError):
        g_fn(-1.0)


@pytest.mark.parametrize("x", [-1.0, math.nan, math.inf])
def test_fn_rejects_bad_x(ref_params, x):
    with pytest.raises(ValueError):
        f_n(x, ref_params)


def test_profile_columns(ref_params):
    xs = np.linspace(0.0, 50.0, 11)
    prof = profile(xs, ref_params)
    assert len(prof) == 11
    assert prof.f_n_normalized[0] == 1.0
    cols = prof.columns()
    assert tuple(cols) == kernels.KernelProfile.COLUMNS
    assert all(len(v) == len(xs) for v in cols.values())
    np.testing.assert_array_equal(prof.cond_lhs, 2 * prof.f_over_n)
    np.testing.assert_array_equal(prof.corr_zz, -2 * prof.f_over_n)
    np.testing.assert_allclose(prof.p, prof.f_over_n / (1 + prof.f_over_n), rtol=1e-15)
    assert np.all((prof.p >= 0) & (prof.p < 1)) and np.all(np.abs(prof.g) <= 1)


@pytest.mark.parametrize("xs", [[], [1.0, 1.0], [2.0, 1.0], [[1.0, 2.0]]])
def test_profile_rejects_bad_grids(ref_params, xs):
    with pytest.raises(ValueError):
        profile(xs, ref_params)


def test_profile_reports_offending_x(ref_params):
    with pytest.raises(ValueError):
        profile([0.0, -1.0], ref_params)


def test_fn_random_points_against_mpmath():
    rng = np.random.default_rng(20261019)
    for _ in range(30):
        eb = 10 ** rng.uniform(-4, -1)
        d = 10 ** rng.uniform(math.log10(eb), 0.0)
        p = make_params(eb, d)
        x = 10 ** rng.uniform(-3, math.log10(20 / eb))
        ref = mp_f_n(x, eb, p.cutoff, dps=20)
        assert abs(f_n(x, p) - ref) <= 1e-9 * max(abs(ref), 1e-6 * f_n(0.0, p)), (eb, d, x)
