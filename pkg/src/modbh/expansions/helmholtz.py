"""Modified Helmholtz expansions  sum_{l=-p}^{p} a_l Z_l(lam rho) e^{i l theta},  Z = K or I.

Coefficients are stored scaled (mantissa, power-of-two exponent): at small
lam*rho the K and I values span far more than the double range.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from ..greens import FieldSample, source_arrays
from ..modesum import ModeSum, derivatives, directional
from ..stable_basis import radial_scaled
from . import scaled


def _polar(v):
    v = np.asarray(v, dtype=float)
    return float(np.hypot(v[0], v[1])), float(np.arctan2(v[1], v[0]))


def shift_tables(kind, p, lam, rho0, theta0):
    """T[l, m] = Z_{|l-m|}(lam rho0) e^{-i(l-m) theta0} as (mantissa, exponent), |l|, |m| <= p."""
    idx = np.arange(-p, p + 1)
    d = idx[:, None] - idx[None, :]
    mant, exp = radial_scaled(kind, 2 * p, lam, rho0)
    return mant[0, np.abs(d)] * np.exp(-1j * d * theta0), exp[0, np.abs(d)]


@dataclass
class MhExpansion:
    kind: str                   # "K" (outgoing) or "I" (local)
    center: np.ndarray
    lam: float
    coeffs: np.ndarray          # mantissas, l = -p..p
    exps: np.ndarray = None     # power-of-two exponents
    radius: float = 0.0

    def __post_init__(self):
        if self.kind not in ("K", "I"):
            raise ValueError("kind must be 'K' or 'I'")
        self.center = np.asarray(self.center, dtype=float).reshape(2)
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.exps is None:
            self.exps = np.zeros(len(self.coeffs), dtype=np.int64)
        self.coeffs, self.exps = scaled.cnormalize(self.coeffs, self.exps)

    @property
    def p(self):
        return (len(self.coeffs) - 1) // 2

    @property
    def values(self):
        return scaled.cldexp(self.coeffs, self.exps)

    def mode_sum(self):
        return ModeSum(self.lam, self.p, {self.kind: (self.coeffs, self.exps)})


def eval_mode_sum(ms, center, x, complex_values=False):
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = pts.reshape(-1, 2)
    v, g, h = derivatives(ms, pts[:, 0] - center[0], pts[:, 1] - center[1])
    conv = np.asarray if complex_values else np.real
    out = FieldSample(conv(v), conv(np.stack(g, axis=-1)), conv(np.stack(h, axis=-1)))
    return out[0] if single else out


def mh_eval(exp, x, complex_values=False):
    return eval_mode_sum(exp.mode_sum(), exp.center, x, complex_values)


def _check_kind(exp, kind):
    if exp.kind != kind:
        raise ValueError("expected a %s expansion, got %s" % (kind, exp.kind))


def _translate(exp, new_center, table_kind, sign_m, vector, out_kind, radius):
    p = exp.p
    rho0, theta0 = _polar(vector)
    tm, te = shift_tables(table_kind, p, exp.lam, rho0, theta0)
    if sign_m:
        tm = tm * (-1.0) ** np.arange(-p, p + 1)[None, :]
    cm, ce = scaled.matvec(tm, te, exp.coeffs, exp.exps)
    return MhExpansion(out_kind, new_center, exp.lam, cm, ce, radius)


def mh_m2m(src, new_center):
    """b_l = sum_m a_m I_{l-m}(lam rho0) e^{-i(l-m) theta0}, (rho0, theta0) = old - new center."""
    _check_kind(src, "K")
    v = src.center - np.asarray(new_center, dtype=float)
    return _translate(src, new_center, "I", False, v, "K", src.radius + math.hypot(*v))


def mh_m2l(src, new_center):
    """b_l = sum_m a_m (-1)^m K_{l-m}(lam rho0) e^{-i(l-m) theta0}, (rho0, theta0) = source - target center."""
    _check_kind(src, "K")
    v = src.center - np.asarray(new_center, dtype=float)
    return _translate(src, new_center, "K", True, v, "I", math.hypot(*v) - src.radius)


def mh_l2l(src, new_center):
    """b_l = sum_m a_m I_{l-m}(lam rho0) e^{-i(l-m) theta0}, (rho0, theta0) = new - old center."""
    _check_kind(src, "I")
    v = np.asarray(new_center, dtype=float) - src.center
    return _translate(src, new_center, "I", False, v, "I", src.radius - math.hypot(*v))


def source_weights(src, lam, center, p, kinds):
    """Per-source values of  c f + (d/lam) df/dv1 + (q/lam^2) d^2f/dv2 dv3  (derivatives in s)
    for f_k(s) = F_k(|s - center|) e^{i k arg(s - center)}, k = -p..p, for each radial kind.

    Returns {kind: (n_sources, 2p+1) complex array}.
    """
    src = source_arrays(src)
    n = len(src)
    out = {}
    t = src.loc - np.asarray(center, dtype=float)[None, :]
    eye = np.eye(2 * p + 1)[None]
    col = lambda a: np.asarray(a)[:, None]
    for kind in kinds:
        base = ModeSum(lam, p, {kind: eye})
        v1 = (col(src.v1[:, 0]), col(src.v1[:, 1]))
        v2 = (col(src.v2[:, 0]), col(src.v2[:, 1]))
        v3 = (col(src.v3[:, 0]), col(src.v3[:, 1]))
        total = (base.scaled(col(src.c))
                 + directional(base, v1).scaled(col(src.d / lam))
                 + directional(directional(base, v2), v3).scaled(col(src.q / lam ** 2)))
        out[kind] = total.evaluate(t[:, 0, None], t[:, 1, None]) if n else np.zeros((0, 2 * p + 1))
    return out


def mh_source_to_multipole(sources, center, lam, p):
    """K-expansion of the K_0 part of the synthetic field (the u_H term)."""
    src = source_arrays(sources)
    w = source_weights(src, lam, center, p, ["I"])["I"]
    # K_0(lam|x - s|) = sum_m I_{-m}-type(s - c) K_m(lam rho) e^{i m theta}
    coeffs = -w.sum(axis=0)[::-1] / (2 * np.pi)
    r = float(np.hypot(*(src.loc - center).T).max()) if len(src) else 0.0
    return MhExpansion("K", center, lam, coeffs, None, r)
