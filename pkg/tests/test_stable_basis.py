import math

import mpmath as mp
import numpy as np
import pytest

from modbh.bessel import EULER_GAMMA, mod_bessel_i_seq, mod_bessel_k_seq
from modbh.stable_basis import (RadialBasis, mode_determinant, mode_matrices, mode_matrix, p_eval,
                                q_eval)
from oracles import besseli, besselk, p_ref, q_ref

B = RadialBasis


def det_ratio(mm, ref):
    """Computed determinant divided by an mpmath reference, without leaving scaled form."""
    s = mm.scaled
    d = mp.mpf(s[0, 0]) * s[1, 1] - mp.mpf(s[0, 1]) * s[1, 0]
    return float(d * mp.mpf(2) ** int(mm.col_exp[0] + mm.col_exp[1]) / ref)


def test_p_eval_examples():
    v, _ = p_eval(1, 1.0, 1e-4)
    assert v == pytest.approx(6.25e-14, rel=1e-8)
    assert p_eval(0, 0.3, 0.0)[0] == 0.0
    v, d = p_eval(2, 0.7, 3.0)
    assert v == pytest.approx(mod_bessel_i_seq(2, 2.1)[2] - 1.05 ** 2 / 2, rel=1e-14)
    h = 1e-6
    fd = (p_eval(2, 0.7, 3.0 + h)[0] - p_eval(2, 0.7, 3.0 - h)[0]) / (2 * h)
    assert d == pytest.approx(fd, rel=1e-7)


def test_q_eval_examples():
    v, _ = q_eval(0, 1.0, 1e-9)
    assert abs(v - 0.11593151565841244881) < 1e-12
    assert abs(v - (math.log(2) - EULER_GAMMA)) < 1e-12
    r = 1e-5
    v, _ = q_eval(1, 1.0, r)
    assert abs(v) <= r * abs(math.log(r))
    v, _ = q_eval(3, 0.5, 2.0)
    assert v == pytest.approx(mod_bessel_k_seq(3, 1.0)[3] - 8.0, rel=1e-12)


def test_q_eval_rejects_origin():
    with pytest.raises(ValueError):
        q_eval(1, 1.0, 0.0)
    with pytest.raises(ValueError):
        p_eval(1, -1.0, 1.0)


@pytest.mark.parametrize("x", [1e-7, 1e-3, 0.1, 0.9, 1.9, 2.0, 2.1, 3.5, 6.0, 11.0, 13.0, 30.0])
@pytest.mark.parametrize("n", [0, 1, 2, 3, 5, 10, 20])
def test_p_q_against_mpmath(n, x):
    lam = 0.5
    r = x / lam
    pv, pd = p_eval(n, lam, r)
    ref = p_ref(n, lam, r)
    if ref != 0.0 and abs(ref) > 1e-300:
        assert pv == pytest.approx(ref, rel=2e-14)
    qv, qd = q_eval(n, lam, r)
    ref = q_ref(n, lam, r)
    if math.isfinite(qv):
        assert qv == pytest.approx(ref, rel=2e-14, abs=1e-15 if n == 0 else 0)
    # derivatives against mpmath differentiation of the references
    mp.mp.dps = 50
    x_ = mp.mpf(lam) * mp.mpf(r)
    if n == 0:
        dref = float(mp.besseli(1, x_)) * lam
    else:
        dref = float(mp.diff(lambda t: mp.besseli(n, t) - (t / 2) ** n / mp.factorial(n), x_)) * lam
    if abs(dref) > 1e-300:
        assert pd == pytest.approx(dref, rel=1e-13)
    if n == 0:
        qref = float(-mp.besselk(1, x_) * lam + 1 / mp.mpf(r))
    else:
        qref = float(mp.diff(lambda t: mp.besselk(n, t) - 2 ** (n - 1) * mp.factorial(n - 1) / t ** n, x_)) * lam
    if math.isfinite(qd):
        assert qd == pytest.approx(qref, rel=1e-13, abs=1e-15 * abs(lam / x_) if n == 0 else 0)


def test_mode_matrix_examples():
    lam, R = 0.7, 1.2
    mm = mode_matrix(B.INT_NAIVE, 3, lam, R)
    assert mm.determinant() == pytest.approx(lam * R ** 3 * besseli(4, lam * R), rel=1e-12)
    mm = mode_matrix(B.EXT_NAIVE, 2, lam, R)
    assert mm.determinant() == pytest.approx(-lam * besselk(1, lam * R) / R ** 2, rel=1e-12)
    a = mode_matrix(B.INT_STABLE, 0, 0.3, 2.0).entries
    assert a[0, 0] == 1.0 and a[1, 0] == 0.0


def random_triples(rng, count=100):
    for _ in range(count):
        n = int(rng.integers(1, 50))
        lam = float(np.exp(rng.uniform(np.log(1e-6), np.log(8))))
        R = float(np.exp(rng.uniform(np.log(1e-6), np.log(8))))
        yield n, lam, R


def identity_refs(n, lam, R):
    mp.mp.dps = 40
    x = mp.mpf(lam) * mp.mpf(R)
    ref_int = lam * mp.mpf(R) ** n * mp.besseli(n + 1, x)
    ref_ext = -lam * mp.besselk(n - 1, x) / mp.mpf(R) ** n
    c = mp.mpf(2) ** (n - 1) * mp.factorial(n - 1) / mp.mpf(lam) ** n
    return {B.INT_NAIVE: ref_int, B.INT_STABLE: ref_int, B.EXT_NAIVE: ref_ext,
            B.EXT_STABLE: -c * ref_ext}


def scaled_ratio(me, ref):
    return float(me[0] * mp.mpf(2) ** me[1] / ref)


def test_determinant_identities_random(rng):
    for n, lam, R in random_triples(rng):
        for b, ref in identity_refs(n, lam, R).items():
            assert abs(scaled_ratio(mode_determinant(b, n, lam, R), ref) - 1) < 1e-11, (b, n, lam, R)
            assert abs(scaled_ratio(mode_determinant(b, -n, lam, R), ref) - 1) < 1e-11


def test_stable_matrices_satisfy_identities_entrywise(rng):
    # the stored stable matrices need no column reduction
    for n, lam, R in random_triples(rng):
        refs = identity_refs(n, lam, R)
        for b in (B.INT_STABLE, B.EXT_STABLE):
            assert abs(det_ratio(mode_matrix(b, n, lam, R), refs[b]) - 1) < 1e-11


def test_naive_entry_determinant_limited_by_conditioning(rng):
    # the rounded naive entries only determine det to about cond * eps
    from modbh.smallmatrix import cond2_normalized
    for n, lam, R in random_triples(rng, 40):
        refs = identity_refs(n, lam, R)
        for b in (B.INT_NAIVE, B.EXT_NAIVE):
            mm = mode_matrix(b, n, lam, R)
            try:
                kappa = cond2_normalized(mm.scaled)
            except ArithmeticError:
                continue
            err = abs(det_ratio(mm, refs[b]) - 1)
            assert err <= max(1e-13, 20 * kappa * np.finfo(float).eps)


def test_zero_mode_determinants():
    lam, R = 0.3, 1.7
    x = lam * R
    ref = -lam * besselk(1, x) * math.log(R) - besselk(0, x) / R
    assert mode_matrix(B.EXT_NAIVE, 0, lam, R).determinant() == pytest.approx(ref, rel=1e-13)
    assert mode_matrix(B.EXT_STABLE, 0, lam, R).determinant() == pytest.approx(ref, rel=1e-13)
    assert mode_matrix(B.INT_STABLE, 0, lam, R).determinant() == pytest.approx(lam * besseli(1, x),
                                                                                rel=1e-13)
    for b in (B.EXT_NAIVE, B.EXT_STABLE):
        m, e = mode_determinant(b, 0, lam, R)
        assert math.ldexp(m, e) == pytest.approx(ref, rel=1e-13)


def test_mode_matrices_match_single():
    modes = range(-7, 9)
    for b in B:
        many = mode_matrices(b, modes, 0.01, 0.5)
        for n, mm in zip(modes, many):
            one = mode_matrix(b, n, 0.01, 0.5)
            assert np.array_equal(mm.scaled, one.scaled) and np.array_equal(mm.col_exp, one.col_exp)


@pytest.mark.parametrize("lam", [1e-3, 0.5])
@pytest.mark.parametrize("n", [1, 2, 5, 20])
def test_p_order_at_zero(n, lam):
    lim = (lam / 2) ** (n + 2) / math.factorial(n + 1)
    for r in 10.0 ** -np.arange(1, 6):
        assert p_eval(n, lam, r)[0] / r ** (n + 2) == pytest.approx(lim, rel=0.02)


@pytest.mark.parametrize("n", [3, 4, 10])
def test_q_order_at_zero(n):
    lam = 0.5
    # next term of the singular part: -2^{n-3} (n-2)! lam^{2-n}
    lim = -(2.0 ** (n - 3)) * math.factorial(n - 2) * lam ** (2 - n)
    for r in 10.0 ** -np.arange(2, 7):
        assert q_eval(n, lam, r)[0] * r ** (n - 2) == pytest.approx(lim, rel=0.02)


def _laplacian_n(f, n, r, h):
    # radial operator f'' + f'/r - n^2 f/r^2 with f' known exactly and f'' by central differences
    v, d = f(r)
    d2 = (f(r + h)[1] - f(r - h)[1]) / (2 * h)
    return d2 + d / r - n * n * v / r ** 2


@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_ode_residual(n):
    # (L_n - lam^2) L_n u = 0, checked as L_n P_n = lam^2 I_n and L_n Q_n = lam^2 K_n
    lam = 0.8
    for r in (0.05, 0.3, 1.0, 2.5, 6.0):
        h = 1e-5 * r
        lp = _laplacian_n(lambda t: p_eval(n, lam, t), n, r, h)
        ref = lam ** 2 * besseli(n, lam * r)
        assert abs(lp - ref) <= 1e-6 * max(abs(ref), abs(p_eval(n, lam, r)[0]) / r ** 2)
        lq = _laplacian_n(lambda t: q_eval(n, lam, t), n, r, h)
        ref = lam ** 2 * besselk(n, lam * r)
        assert abs(lq - ref) <= 1e-6 * max(abs(ref), abs(q_eval(n, lam, r)[0]) / r ** 2)


def test_cancellation_guard():
    lam, r, n = 1.0, 1e-6, 2
    ref = p_ref(n, lam, r)
    assert p_eval(n, lam, r)[0] == pytest.approx(ref, rel=1e-12)
    naive = mod_bessel_i_seq(n, lam * r)[n] - (lam * r / 2) ** n / 2
    assert abs(naive - ref) / abs(ref) > 1e-6
