"""Expansions for the modified biharmonic kernel in the stabilized bases.

Multipole:  sum_l (a_l Q_l(rho) + b_l K_l(lam rho)) e^{i l theta}
Local:      sum_l (c_l P_l(rho) + d_l (lam rho)^|l|) e^{i l theta}

Q_0 = K_0 + log is the kernel itself; P_l and Q_l have the leading power
term removed, which keeps every coefficient and translation free of the
cancellation between the Laplace and modified Helmholtz parts at small lam.
All translation sums are truncated to |l|, |m| <= p.  Sums are formed in
scaled arithmetic so tables like K_80(1e-6) do not overflow.
"""
import copy
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..bessel import leading_i_scaled
from ..greens import source_arrays
from ..modesum import ModeSum
from ..stable_basis import radial_scaled
from . import scaled
from .helmholtz import _polar, eval_mode_sum, source_weights
from .laplace import binomial_table


def _prep(m, e, n):
    m = np.zeros(n, dtype=complex) if m is None else np.asarray(m, dtype=complex)
    e = np.zeros(len(m), dtype=np.int64) if e is None else np.asarray(e, dtype=np.int64)
    return scaled.cnormalize(m, e)


@dataclass
class MbhMultipole:
    center: np.ndarray
    lam: float
    q_coeffs: np.ndarray        # a_l, mantissas
    k_coeffs: np.ndarray        # b_l, mantissas
    q_exps: np.ndarray = None
    k_exps: np.ndarray = None
    radius: float = 0.0

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(2)
        self.q_coeffs, self.q_exps = _prep(self.q_coeffs, self.q_exps, 0)
        self.k_coeffs, self.k_exps = _prep(self.k_coeffs, self.k_exps, 0)
        if len(self.q_coeffs) != len(self.k_coeffs) or len(self.q_coeffs) % 2 == 0:
            raise ValueError("coefficient arrays must both have length 2p+1")

    @property
    def p(self):
        return (len(self.q_coeffs) - 1) // 2

    @property
    def a(self):
        return scaled.cldexp(self.q_coeffs, self.q_exps)

    @property
    def b(self):
        return scaled.cldexp(self.k_coeffs, self.k_exps)

    def mode_sum(self):
        return ModeSum(self.lam, self.p, {"Q": (self.q_coeffs, self.q_exps),
                                          "K": (self.k_coeffs, self.k_exps)})


@dataclass
class MbhLocal:
    center: np.ndarray
    lam: float
    p_coeffs: np.ndarray        # c_l
    pow_coeffs: np.ndarray      # d_l
    p_exps: np.ndarray = None
    pow_exps: np.ndarray = None
    radius: float = math.inf

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(2)
        self.p_coeffs, self.p_exps = _prep(self.p_coeffs, self.p_exps, 0)
        self.pow_coeffs, self.pow_exps = _prep(self.pow_coeffs, self.pow_exps, 0)
        if len(self.p_coeffs) != len(self.pow_coeffs) or len(self.p_coeffs) % 2 == 0:
            raise ValueError("coefficient arrays must both have length 2p+1")

    @property
    def p(self):
        return (len(self.p_coeffs) - 1) // 2

    @property
    def c(self):
        return scaled.cldexp(self.p_coeffs, self.p_exps)

    @property
    def d(self):
        return scaled.cldexp(self.pow_coeffs, self.pow_exps)

    def mode_sum(self):
        # (lam rho)^|l| = 2^|l| |l|! G_l with G_l = (lam rho / 2)^|l| / |l|!
        p = self.p
        wm, we = leading_i_scaled(p, 1.0)       # 1 / (2^l l!)
        am = np.abs(np.arange(-p, p + 1))
        gm, ge = scaled.cnormalize(self.pow_coeffs / wm[0, am], self.pow_exps - we[0, am])
        return ModeSum(self.lam, p, {"P": (self.p_coeffs, self.p_exps), "G": (gm, ge)})


def mbh_eval_multipole(exp, x, complex_values=False):
    pts = np.asarray(x, dtype=float).reshape(-1, 2)
    r = np.hypot(pts[:, 0] - exp.center[0], pts[:, 1] - exp.center[1])
    if exp.radius and np.any(r <= exp.radius):
        warnings.warn("multipole evaluated inside its source disk", RuntimeWarning, stacklevel=2)
    return eval_mode_sum(exp.mode_sum(), exp.center, x, complex_values)


def mbh_eval_local(exp, x, complex_values=False):
    pts = np.asarray(x, dtype=float).reshape(-1, 2)
    r = np.hypot(pts[:, 0] - exp.center[0], pts[:, 1] - exp.center[1])
    if np.any(r >= exp.radius):
        warnings.warn("local expansion evaluated outside its disk", RuntimeWarning, stacklevel=2)
    return eval_mode_sum(exp.mode_sum(), exp.center, x, complex_values)


def mbh_source_to_multipole(sources, center, lam, p, radius=None):
    """Multipole of the synthetic field of ``sources`` about ``center``.

    Uses the addition theorem for the kernel itself:
    K_0(lam|x-s|) + log|x-s| = sum_m [G_{-m}(s) Q_m(x) + P_{-m}(s) K_m(x)],
    where G_k(s) = (lam|s|/2)^|k| e^{ik arg s}/|k|! and P_k(s) = P_k(|s|) e^{ik arg s}
    are taken relative to the center.
    """
    src = source_arrays(sources)
    center = np.asarray(center, dtype=float)
    dist = np.hypot(*(src.loc - center).T) if len(src) else np.zeros(0)
    if radius is not None and np.any(dist > radius * (1 + 1e-12)):
        raise ValueError("a source lies outside the stated radius")
    r = float(dist.max()) if radius is None and len(src) else (radius or 0.0)
    if len(src) == 0:
        z = np.zeros(2 * p + 1)
        return MbhMultipole(center, lam, z, z, radius=r)
    w = source_weights(src, lam, center, p, ["G", "P"])
    a = -w["G"].sum(axis=0)[::-1] / (2 * np.pi)
    b = -w["P"].sum(axis=0)[::-1] / (2 * np.pi)
    return MbhMultipole(center, lam, a, b, radius=r)


def _tables(lam, rho0, n):
    """Radial tables at rho0 for orders 0..n: I, K, P, Q, G and (lam rho0)^k."""
    t = {k: radial_scaled(k, n, lam, rho0) for k in ("I", "K", "P", "Q", "G")}
    t["POW"] = radial_scaled("HI", n, 1.0, lam * rho0)
    return {k: (m[0], e[0]) for k, (m, e) in t.items()}


def _band_matrix(tab, kinds, theta0, p):
    """Matrix with entries kind[l,m]_{|l-m|}(rho0) e^{-i(l-m) theta0}; kinds is an array of table keys."""
    idx = np.arange(-p, p + 1)
    d = idx[:, None] - idx[None, :]
    ad = np.abs(d)
    tm = np.zeros(d.shape)
    te = np.zeros(d.shape, dtype=np.int64)
    for key in np.unique(kinds):
        if key == "":
            continue
        sel = kinds == key
        m, e = tab[key]
        tm[sel] = m[ad[sel]]
        te[sel] = e[ad[sel]]
    return tm * np.exp(-1j * d * theta0), te


def _with_weights(ym, ye, p):
    # multiply row l by 1 / (2^|l| |l|!)
    wm, we = leading_i_scaled(p, 1.0)
    am = np.abs(np.arange(-p, p + 1))
    return scaled.cnormalize(ym * wm[0, am], ye + we[0, am])


def mbh_m2m(src, new_center):
    """Shift a multipole; (rho0, theta0) is the old center relative to the new one."""
    p = src.p
    v = src.center - np.asarray(new_center, dtype=float)
    rho0, theta0 = _polar(v)
    if rho0 == 0:
        return copy.deepcopy(src)
    tab = _tables(src.lam, rho0, 2 * p)
    idx = np.arange(-p, p + 1)
    l, m = idx[:, None], idx[None, :]
    band = ((l > 0) & (m >= 0) & (m <= l)) | ((l < 0) & (m <= 0) & (m >= l)) | ((l == 0) & (m == 0))
    # c_l: finite sum of leading terms over the band
    gm, ge = _band_matrix(tab, np.where(band, "G", ""), theta0, p)
    c = scaled.matvec(gm, ge, src.q_coeffs, src.q_exps)
    # d_l: I-convolution, with P in place of I for a_m inside the band
    im, ie = _band_matrix(tab, np.full(band.shape, "I"), theta0, p)
    xm, xe = _band_matrix(tab, np.where(band, "P", "I"), theta0, p)
    d = scaled.add(*scaled.matvec(im, ie, src.k_coeffs, src.k_exps),
                   *scaled.matvec(xm, xe, src.q_coeffs, src.q_exps))
    return MbhMultipole(new_center, src.lam, c[0], d[0], c[1], d[1], src.radius + rho0)


def mbh_m2l(src, new_center):
    """Convert a multipole to a local expansion; (rho0, theta0) is the source center
    relative to the target center."""
    p = src.p
    v = src.center - np.asarray(new_center, dtype=float)
    rho0, theta0 = _polar(v)
    if src.radius and rho0 <= src.radius:
        warnings.warn("multipole-to-local without separation", RuntimeWarning, stacklevel=2)
    tab = _tables(src.lam, rho0, 2 * p)
    idx = np.arange(-p, p + 1)
    l, m = idx[:, None], idx[None, :]
    sign = (-1.0) ** idx
    am, ae = scaled.cnormalize(src.q_coeffs * sign, src.q_exps)
    bm, be = scaled.cnormalize(src.k_coeffs * sign, src.k_exps)
    full = (2 * p + 1, 2 * p + 1)
    km, ke = _band_matrix(tab, np.full(full, "K"), theta0, p)
    c = scaled.add(*scaled.matvec(km, ke, am, ae), *scaled.matvec(km, ke, bm, be))
    harmonic = (l == 0) | ((l > 0) & (m <= 0)) | ((l < 0) & (m >= 0))
    ym, ye = _band_matrix(tab, np.where(harmonic, "Q", "K"), theta0, p)
    d = scaled.add(*scaled.matvec(ym, ye, am, ae), *scaled.matvec(km, ke, bm, be))
    d = _with_weights(*d, p)
    return MbhLocal(new_center, src.lam, c[0], d[0], c[1], d[1], rho0 - src.radius)


def mbh_l2l(src, new_center):
    """Shift a local expansion; (rho0, theta0) is the new center relative to the old one."""
    p = src.p
    v = np.asarray(new_center, dtype=float) - src.center
    rho0, theta0 = _polar(v)
    if rho0 == 0:
        return copy.deepcopy(src)
    tab = _tables(src.lam, rho0, 2 * p)
    idx = np.arange(-p, p + 1)
    l, m = idx[:, None], idx[None, :]
    im, ie = _band_matrix(tab, np.full((2 * p + 1, 2 * p + 1), "I"), theta0, p)
    c = scaled.matvec(im, ie, src.p_coeffs, src.p_exps)
    # power part: the a_m with P in the band, I elsewhere; l = 0 takes P everywhere
    band = ((l > 0) & (m >= l)) | ((l < 0) & (m <= l)) | (l == 0)
    xm, xe = _band_matrix(tab, np.where(band, "P", "I"), theta0, p)
    d1 = _with_weights(*scaled.matvec(xm, xe, src.p_coeffs, src.p_exps), p)
    # exact binomial re-centering of the powers (lam rho)^|m| e^{i m theta}
    binom = binomial_table(p)
    same = ((l > 0) & (m >= l)) | ((l < 0) & (m <= l)) | (l == 0)
    pm, pe = _band_matrix(tab, np.where(same, "POW", ""), theta0, p)
    pm = pm * np.where(same, binom[np.abs(m), np.abs(l)], 0.0)
    d2 = scaled.matvec(pm, pe, src.pow_coeffs, src.pow_exps)
    d = scaled.add(*d1, *d2)
    return MbhLocal(new_center, src.lam, c[0], d[0], c[1], d[1], src.radius - rho0)
