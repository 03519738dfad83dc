import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modbh import bessel
from modbh.bessel import (EULER_GAMMA, bessel_wronskian, digamma_nonneg_int, mod_bessel_derivs,
                          mod_bessel_i_seq, mod_bessel_k_seq)
from oracles import besseli, besselk

EPS = np.finfo(float).eps


def test_i_seq_examples():
    assert list(mod_bessel_i_seq(3, 0.0)) == [1.0, 0.0, 0.0, 0.0]
    assert mod_bessel_i_seq(0, 1.0)[0] == pytest.approx(1.2660658777520083356, rel=1e-15)
    assert mod_bessel_i_seq(2, 0.5)[2] == pytest.approx(0.031906149177738253813, rel=1e-15)


def test_k_seq_examples():
    assert mod_bessel_k_seq(0, 1.0)[0] == pytest.approx(0.42102443824070833334, rel=1e-15)
    assert mod_bessel_k_seq(1, 2.0)[1] == pytest.approx(0.13986588181652242728, rel=1e-15)
    x = 1e-8
    assert abs(mod_bessel_k_seq(0, x)[0] + math.log(x / 2) + EULER_GAMMA) < 1e-14


def test_derivs_examples():
    i1 = mod_bessel_i_seq(1, 0.8)[1]
    k1 = mod_bessel_k_seq(1, 0.8)[1]
    ip, kp = mod_bessel_derivs(0, 0.8)
    assert ip == pytest.approx(i1, rel=1e-15)
    assert kp == pytest.approx(-k1, rel=1e-15)
    # (I_0(1) + I_2(1)) / 2 from a 50-digit oracle
    assert mod_bessel_derivs(1, 1.0)[0] == pytest.approx(0.70090677375952330839, rel=1e-14)
    assert mod_bessel_derivs(-3, 1.7) == mod_bessel_derivs(3, 1.7)


def test_digamma():
    assert digamma_nonneg_int(1) == pytest.approx(-0.57721566490153286061, rel=1e-16)
    assert digamma_nonneg_int(2) == pytest.approx(1 - EULER_GAMMA, rel=1e-15)
    assert digamma_nonneg_int(4) == pytest.approx(11 / 6 - EULER_GAMMA, rel=1e-15)
    with pytest.raises(ValueError):
        digamma_nonneg_int(0)


@pytest.mark.parametrize("x", [1e-6, 1e-3, 0.3, 1.0, 1.9, 2.0, 2.1, 5.0, 17.0, 50.0, 300.0, 690.0])
def test_i_against_mpmath(x):
    vals = mod_bessel_i_seq(60, x)
    for n in (0, 1, 2, 5, 10, 30, 49, 60):
        ref = besseli(n, x)
        if ref == 0.0 or ref < 1e-290:
            continue
        assert abs(vals[n] - ref) <= 10 * EPS * ref * 4, (n, x)


@pytest.mark.parametrize("x", [1e-6, 1e-3, 0.3, 1.0, 1.9, 2.0, 2.1, 5.0, 17.0, 50.0, 300.0])
def test_k_against_mpmath(x):
    vals = bessel.k_table(49, x)[0]
    for n in (0, 1, 2, 5, 10, 30, 49):
        ref = besselk(n, x)
        if not math.isfinite(vals[n]) or ref > 1e300:
            continue
        assert abs(vals[n] - ref) <= 100 * EPS * ref, (n, x)


def test_k_overflow_signal():
    with pytest.raises(OverflowError):
        mod_bessel_k_seq(200, 1e-6)


def test_i_overflow_signal():
    with pytest.raises(OverflowError):
        mod_bessel_i_seq(0, 800.0)


@pytest.mark.parametrize("bad", [-1.0, math.inf, math.nan])
def test_invalid_arguments(bad):
    with pytest.raises(ValueError):
        mod_bessel_i_seq(2, bad)
    with pytest.raises(ValueError):
        mod_bessel_k_seq(2, bad)
    with pytest.raises(ValueError):
        mod_bessel_k_seq(2, 0.0)


def test_wronskian_grid():
    xs = np.logspace(-6, np.log10(50), 60)
    for n in (0, 1, 2, 10, 49):
        w = bessel_wronskian(n, xs)
        assert np.max(np.abs(w * xs + 1)) <= 1e-13, n


def test_wronskian_from_public_sequences():
    for x in (0.01, 0.7, 3.0, 25.0):
        for n in (0, 1, 2, 10):
            i = mod_bessel_i_seq(n + 1, x)[n]
            k = mod_bessel_k_seq(n + 1, x)[n]
            ip, kp = mod_bessel_derivs(n, x)
            assert (i * kp - ip * k) * x == pytest.approx(-1.0, abs=1e-13)


def test_recurrences():
    for x in (1e-3, 0.4, 2.0, 7.5, 40.0):
        iv = mod_bessel_i_seq(30, x)
        kv = mod_bessel_k_seq(30, x)
        for n in range(1, 30):
            if iv[n] > 1e-280:
                lhs = iv[n - 1] - iv[n + 1]
                assert lhs == pytest.approx(2 * n / x * iv[n], rel=1e-12)
            if math.isfinite(kv[n + 1]):
                assert kv[n + 1] - kv[n - 1] == pytest.approx(2 * n / x * kv[n], rel=1e-12)


def test_monotone_in_order():
    for x in (0.1, 1.0, 10.0):
        kv = mod_bessel_k_seq(20, x)
        assert np.all(np.diff(kv) > 0)
        iv = mod_bessel_i_seq(40, x)
        assert np.all(iv > 0)
        n0 = int(math.ceil(x))
        assert np.all(np.diff(iv[n0:]) <= 0)


def test_branch_agreement_around_switch():
    # series and large-argument evaluations of K_0, K_1 agree in the overlap window
    for x in np.linspace(1.0, 4.0, 13):
        s = bessel._k01_series(x)
        t = bessel._k01_steed(x)
        assert np.allclose(s, t, rtol=1e-12, atol=0), x


def test_scaled_tables_reach_extreme_orders():
    m, e = bessel.k_scaled(80, np.array([1e-6]))
    val = math.log2(abs(m[0, 80])) + e[0, 80]
    import mpmath as mp
    ref = float(mp.log(mp.besselk(80, mp.mpf("1e-6")), 2))
    assert val == pytest.approx(ref, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(0, 60), x=st.floats(1e-6, 50.0))
def test_wronskian_property(n, x):
    assert bessel_wronskian(n, np.array([x]))[0] * x == pytest.approx(-1.0, abs=1e-13)
