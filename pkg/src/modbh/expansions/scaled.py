"""Complex vectors stored as mantissa * 2**exponent, and matrix products on them."""
import numpy as np

from ..bessel import to_float

_FLOOR = -(1 << 40)


def cldexp(m, e):
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return to_float(m.real, e) + 1j * to_float(m.imag, e)
    return to_float(m, e)


def cnormalize(m, e):
    """Renormalize complex mantissas so that max(|re|, |im|) lies in [0.5, 1)."""
    m = np.asarray(m, dtype=complex)
    big = np.maximum(np.abs(m.real), np.abs(m.imag))
    _, de = np.frexp(big)
    de = np.where(big == 0, 0, de)
    mm = cldexp(m, -de)
    ee = np.where(big == 0, 0, np.asarray(e) + de)
    return mm, ee.astype(np.int64)


def from_complex(x):
    return cnormalize(np.asarray(x, dtype=complex), np.zeros(np.shape(x), dtype=np.int64))


def matvec(tm, te, xm, xe):
    """y_l = sum_m T[l, m] x_m with T = tm * 2**te and x = xm * 2**xe (all scaled)."""
    tm = np.asarray(tm)
    xm = np.asarray(xm)
    prod = tm * xm[None, :]
    exps = np.asarray(te, dtype=np.int64) + np.asarray(xe, dtype=np.int64)[None, :]
    live = prod != 0
    exps = np.where(live, exps, _FLOOR)
    top = exps.max(axis=1)
    top = np.where(top == _FLOOR, 0, top)
    shift = np.where(live, exps - top[:, None], -3000)
    y = np.sum(cldexp(prod, shift), axis=1)
    return cnormalize(y, top)


def add(am, ae, bm, be):
    top = np.maximum(np.where(am != 0, ae, _FLOOR), np.where(bm != 0, be, _FLOOR))
    top = np.where(top == _FLOOR, 0, top)
    y = cldexp(am, np.where(am != 0, ae - top, -3000)) + cldexp(bm, np.where(bm != 0, be - top, -3000))
    return cnormalize(y, top)
