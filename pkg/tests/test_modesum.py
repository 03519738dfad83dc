import math

import numpy as np
import pytest

from modbh.modesum import ModeSum, derivatives, directional
from oracles import besseli, besselk, p_ref, q_ref

LAM = 0.7


def radial_ref(kind, m, rho):
    a = abs(m)
    if kind == "I":
        return besseli(a, LAM * rho)
    if kind == "K":
        return besselk(a, LAM * rho)
    if kind == "P":
        return p_ref(a, LAM, rho)
    if kind == "Q":
        return q_ref(a, LAM, rho)
    if kind == "G":
        return (LAM * rho / 2) ** a / math.factorial(a)
    if kind == "HI":
        return rho ** a
    if kind == "HO":
        return rho ** -a
    return math.log(rho) if m == 0 else 0.0


def random_sum(rng, kind, L=4):
    c = rng.normal(size=2 * L + 1) + 1j * rng.normal(size=2 * L + 1)
    if kind == "LOG":
        c[:] = 0
        c[L] = 1.3
    return ModeSum(LAM, L, {kind: c}), c


KINDS = ["I", "K", "P", "Q", "G", "HI", "HO", "LOG"]


@pytest.mark.parametrize("kind", KINDS)
def test_value_against_direct_sum(kind, rng):
    ms, c = random_sum(rng, kind)
    for _ in range(5):
        x, y = rng.uniform(-2, 2, size=2)
        rho, th = math.hypot(x, y), math.atan2(y, x)
        ref = sum(c[m + 4] * radial_ref(kind, m, rho) * np.exp(1j * m * th) for m in range(-4, 5))
        assert ms.evaluate(x, y) == pytest.approx(ref, rel=1e-13, abs=1e-14 * abs(c).max())


@pytest.mark.parametrize("kind", KINDS)
def test_derivatives_against_finite_differences(kind, rng):
    ms, _ = random_sum(rng, kind)
    for _ in range(10):
        p = rng.uniform(0.3, 2.0) * np.array([math.cos(t := rng.uniform(0, 2 * np.pi)), math.sin(t)])
        v, g, hess = derivatives(ms, p[0], p[1])
        h = 1e-6
        fx = (ms.evaluate(p[0] + h, p[1]) - ms.evaluate(p[0] - h, p[1])) / (2 * h)
        fy = (ms.evaluate(p[0], p[1] + h) - ms.evaluate(p[0], p[1] - h)) / (2 * h)
        scale = max(abs(g[0]), abs(g[1]), abs(v))
        assert abs(fx - g[0]) <= 1e-7 * scale and abs(fy - g[1]) <= 1e-7 * scale
        gxp = derivatives(ms, p[0] + h, p[1])[1]
        gxm = derivatives(ms, p[0] - h, p[1])[1]
        gyp = derivatives(ms, p[0], p[1] + h)[1]
        gym = derivatives(ms, p[0], p[1] - h)[1]
        uxx = (gxp[0] - gxm[0]) / (2 * h)
        uxy = (gyp[0] - gym[0]) / (2 * h)
        uyy = (gyp[1] - gym[1]) / (2 * h)
        hs = max(abs(np.array(hess)).max(), scale)
        for a, b in zip(hess, (uxx, uxy, uyy)):
            assert abs(a - b) <= 1e-6 * hs


def test_broadcast_over_coefficients_and_points(rng):
    c = rng.normal(size=(3, 5))
    ms = ModeSum(LAM, 2, {"K": c})
    x = rng.uniform(0.5, 1.5, size=(4, 1))
    y = rng.uniform(0.5, 1.5, size=(4, 1))
    out = ms.evaluate(x, y)
    assert out.shape == (4, 3)
    for j in range(3):
        one = ModeSum(LAM, 2, {"K": c[j]})
        assert np.allclose(out[:, j], one.evaluate(x[:, 0], y[:, 0]), rtol=1e-15)
    assert np.ndim(ModeSum(LAM, 2, {"K": c[0]}).evaluate(1.0, 0.5)) == 0
    assert ModeSum(LAM, 2, {"K": c[0]}).evaluate(1.0, 0.5) != 0


def test_directional_derivative(rng):
    ms, _ = random_sum(rng, "Q")
    v = np.array([0.6, -0.8])
    d = directional(ms, v)
    p = np.array([0.9, 0.4])
    _, g, _ = derivatives(ms, *p)
    assert d.evaluate(*p) == pytest.approx(v[0] * g[0] + v[1] * g[1], rel=1e-14)


def test_scaled_coefficients_extend_range():
    # 2^-2000 * K_60 at small argument: neither factor is representable alone
    c = np.zeros(121, dtype=complex)
    c[120] = 1.0
    e = np.zeros(121, dtype=np.int64)
    e[120] = -2000
    ms = ModeSum(1e-6, 60, {"K": (c, e)})
    v = ms.evaluate(1.0, 0.0)
    import mpmath as mp
    ref = mp.besselk(60, mp.mpf("1e-6")) * mp.mpf(2) ** -2000
    assert float(abs(v)) == pytest.approx(float(ref), rel=1e-13)


def test_rejects_wrong_length():
    with pytest.raises(ValueError):
        ModeSum(1.0, 2, {"K": np.ones(4)})
