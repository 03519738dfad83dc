"""Angular mode sums  sum_m c_m F_m(rho) e^{i m theta}  and their exact derivatives.

Cartesian derivatives are obtained with the complex ladder operators
D+ = d/dx + i d/dy and D- = d/dx - i d/dy, which map a radial family of order m
onto order m +/- 1.  Every family used in this package is closed under them:

    K_m  -> -lam K_{m+-1}            I_m -> lam I_{m+-1}
    Q_m  -> -lam Q_{m+1}  (D+, m >= 0)    -lam K_{m+1}  (D+, m < 0)
    P_m  ->  lam P_{m+1}  (D+, m < 0)      lam I_{m+1}  (D+, m >= 0)
    G_m = (lam r/2)^|m| e^{im theta}/|m|!,  HI_m = r^|m|,  HO_m = r^-|m|,  LOG = log r

(D- is the mirror image.)  Because no differences are formed, derivatives are
as cancellation-free as the values.

Coefficients are carried as ``(c, e)`` meaning ``c * 2**e`` so that solutions
with extreme coefficient ranges (naive bases at tiny lam*R) remain
representable.
"""
import numpy as np

from .stable_basis import radial_scaled

KINDS = ("I", "K", "P", "Q", "G", "HI", "HO", "LOG")


def _cldexp(c, e):
    e = np.asarray(e, dtype=np.int64).clip(-3000, 3000).astype(np.int32)
    with np.errstate(under="ignore", over="ignore"):
        return np.ldexp(c.real, e) + 1j * np.ldexp(c.imag, e)


def _plus_rule(kind, m, lam):
    """(target kind, factor) for D+ acting on order m, or None when it vanishes."""
    if kind == "K":
        return "K", -lam
    if kind == "I":
        return "I", lam
    if kind == "Q":
        return ("Q", -lam) if m >= 0 else ("K", -lam)
    if kind == "P":
        return ("P", lam) if m < 0 else ("I", lam)
    if kind == "G":
        return ("G", lam) if m < 0 else None
    if kind == "HI":
        return ("HI", 2.0 * (-m)) if m < 0 else None
    if kind == "HO":
        return ("HO", -2.0 * m) if m > 0 else None
    if kind == "LOG":
        return ("HO", 1.0) if m == 0 else None
    raise ValueError(kind)


def _minus_rule(kind, m, lam):
    if kind == "K":
        return "K", -lam
    if kind == "I":
        return "I", lam
    if kind == "Q":
        return ("Q", -lam) if m <= 0 else ("K", -lam)
    if kind == "P":
        return ("P", lam) if m > 0 else ("I", lam)
    if kind == "G":
        return ("G", lam) if m > 0 else None
    if kind == "HI":
        return ("HI", 2.0 * m) if m > 0 else None
    if kind == "HO":
        return ("HO", -2.0 * (-m)) if m < 0 else None
    if kind == "LOG":
        return ("HO", 1.0) if m == 0 else None
    raise ValueError(kind)


class ModeSum:
    """sum over kinds and m = -L..L of c[kind][..., m+L] * 2**e[kind][..., m+L] * F^kind_m e^{im theta}.

    Leading axes of the coefficient arrays (if any) broadcast against the
    evaluation points.
    """

    def __init__(self, lam, order, terms=None):
        self.lam = float(lam)
        self.order = int(order)
        self.terms = {}
        for kind, val in (terms or {}).items():
            if isinstance(val, tuple):
                c, e = val
            else:
                c, e = val, 0
            c = np.asarray(c, dtype=complex)
            e = np.broadcast_to(np.asarray(e, dtype=np.int64), c.shape).copy()
            if c.shape[-1] != 2 * self.order + 1:
                raise ValueError("coefficient array for %s has wrong length" % kind)
            self.terms[kind] = (c, e)

    @property
    def modes(self):
        return np.arange(-self.order, self.order + 1)

    def _shape(self):
        for c, _ in self.terms.values():
            return c.shape[:-1]
        return ()

    def _ladder(self, rule):
        L = self.order
        out = {}
        shape = self._shape()
        step = 1 if rule is _plus_rule else -1
        for kind, (c, e) in self.terms.items():
            # group the orders by target kind and move each group at once
            groups = {}
            for idx, m in enumerate(range(-L, L + 1)):
                r = rule(kind, m, self.lam)
                if r is not None:
                    groups.setdefault(r[0], []).append((idx, r[1]))
            for tk, pairs in groups.items():
                if tk not in out:
                    out[tk] = (np.zeros(shape + (2 * L + 3,), dtype=complex),
                               np.zeros(shape + (2 * L + 3,), dtype=np.int64))
                idx = np.array([i for i, _ in pairs])
                fac = np.array([f for _, f in pairs])
                oc, oe = out[tk]
                _accumulate(oc, oe, idx + step + 1, fac * c[..., idx], e[..., idx])
        return ModeSum(self.lam, L + 1, out)

    def dplus(self):
        return self._ladder(_plus_rule)

    def dminus(self):
        return self._ladder(_minus_rule)

    def padded(self, order):
        if order < self.order:
            raise ValueError("cannot shrink a mode sum")
        pad = order - self.order
        terms = {}
        for kind, (c, e) in self.terms.items():
            w = [(0, 0)] * (c.ndim - 1) + [(pad, pad)]
            terms[kind] = (np.pad(c, w), np.pad(e, w))
        return ModeSum(self.lam, order, terms)

    def scaled(self, w):
        """Multiply every coefficient by w (scalar or array broadcasting over leading axes)."""
        w = np.asarray(w)
        terms = {}
        for kind, (c, e) in self.terms.items():
            ww = w[..., None] if w.ndim else w
            terms[kind] = (c * ww, e.copy())
        return ModeSum(self.lam, self.order, terms)

    def __add__(self, other):
        L = max(self.order, other.order)
        a, b = self.padded(L), other.padded(L)
        terms = dict(a.terms)
        for kind, (c, e) in b.terms.items():
            if kind in terms:
                c0, e0 = terms[kind]
                c0, e0 = np.broadcast_arrays(c0, e0)
                c, e = np.broadcast_arrays(c, e)
                shape = np.broadcast_shapes(c0.shape, c.shape)
                top = np.maximum(np.broadcast_to(e0, shape), np.broadcast_to(e, shape))
                terms[kind] = (_cldexp(np.broadcast_to(c0, shape), np.broadcast_to(e0, shape) - top)
                               + _cldexp(np.broadcast_to(c, shape), np.broadcast_to(e, shape) - top), top)
            else:
                terms[kind] = (c, e)
        return ModeSum(self.lam, L, terms)

    def evaluate(self, x, y, cache=None):
        """Complex value of the sum at points (x, y) relative to the expansion center.

        The result has the broadcast shape of the points and the coefficients'
        leading axes.
        """
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        pshape = x.shape
        rho = np.hypot(x, y).ravel()
        theta = np.arctan2(y, x)
        cache = {} if cache is None else cache
        L = self.order
        am = np.abs(np.arange(-L, L + 1))
        phase = _phase(cache, theta, L)
        total = np.zeros(np.broadcast_shapes(pshape, self._shape()), dtype=complex)
        for kind, (c, e) in self.terms.items():
            mant, exp = _table(cache, kind, L, self.lam, rho)
            tf = _float_table(cache, kind, mant, exp)
            if tf is not None and _moderate(c, e):
                # both factors normal: scaling them first rounds exactly like the scaled product
                vals = _cldexp(c, e) * tf[:, am].reshape(pshape + (2 * L + 1,))
            else:
                tm = mant[:, am].reshape(pshape + (2 * L + 1,))
                te = exp[:, am].reshape(pshape + (2 * L + 1,))
                vals = _cldexp(c * tm, e + te)
            total = total + np.einsum("...k,...k->...", vals, phase)
        return total


SAFE_EXP = 500


def _moderate(c, e):
    """True when every nonzero c * 2**e has a binary exponent within +-SAFE_EXP."""
    mag = np.maximum(np.abs(np.real(c)), np.abs(np.imag(c)))
    nz = mag != 0
    if not np.any(nz):
        return True
    if not np.all(np.isfinite(mag)):
        return False
    tot = np.frexp(mag)[1] + np.broadcast_to(e, mag.shape)
    return bool(np.all(np.abs(tot[nz]) <= SAFE_EXP))


def _float_table(cache, kind, mant, exp):
    key = ("float", kind)
    hit = cache.get(key)
    if hit is None or hit[0] is not mant:
        ok = np.all(np.abs(exp[mant != 0]) <= SAFE_EXP) and np.all(np.isfinite(mant))
        hit = (mant, np.ldexp(mant, exp.astype(np.int32)) if ok else None)
        cache[key] = hit
    return hit[1]


def _phase(cache, theta, L):
    # e^{i m theta} for m = -L..L, sliced from the widest table built so far
    hit = cache.get("phase")
    if hit is None or hit.shape[-1] < 2 * L + 1:
        # powers of e^{i theta}: relative error grows only like L * eps
        z = np.exp(1j * theta)[..., None]
        pos = np.cumprod(np.broadcast_to(z, theta.shape + (L,)), axis=-1)
        hit = np.concatenate([np.conj(pos[..., ::-1]), np.ones(theta.shape + (1,)), pos], axis=-1)
        cache["phase"] = hit
    top = (hit.shape[-1] - 1) // 2
    return hit[..., top - L: top + L + 1]


def _accumulate(oc, oe, j, c, e):
    c0 = oc[..., j]
    e0 = oe[..., j]
    empty = c0 == 0
    top = np.where(empty, e, np.maximum(e0, e))
    new = _cldexp(c0, e0 - top) + _cldexp(np.asarray(c, dtype=complex), e - top)
    oc[..., j] = new
    oe[..., j] = top


def _table(cache, kind, L, lam, rho):
    hit = cache.get(kind)
    if hit is None or hit[0].shape[1] < L + 1:
        nmax = max(L, 0)
        hit = radial_scaled(kind, nmax, lam, rho)
        cache[kind] = hit
    return hit


def derivatives(ms, x, y):
    """Complex value, gradient (ux, uy) and Hessian (uxx, uxy, uyy) of a mode sum."""
    cache = {}
    top = ms.order + 2
    # fill the radial tables once, at the highest order any ladder needs
    ms_p, ms_m = ms.dplus(), ms.dminus()
    pp, pm, mm = ms_p.dplus(), ms_p.dminus(), ms_m.dminus()
    rho = np.hypot(np.asarray(x, dtype=float), np.asarray(y, dtype=float)).ravel()
    kinds = set()
    for s in (ms, ms_p, ms_m, pp, pm, mm):
        kinds.update(s.terms)
    for kind in kinds:
        cache[kind] = radial_scaled(kind, top, ms.lam, rho)
    xb, yb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    _phase(cache, np.arctan2(yb, xb), top)
    v = ms.evaluate(x, y, cache)
    dp = ms_p.evaluate(x, y, cache)
    dm = ms_m.evaluate(x, y, cache)
    dpp = pp.evaluate(x, y, cache)
    dpm = pm.evaluate(x, y, cache)
    dmm = mm.evaluate(x, y, cache)
    ux = 0.5 * (dp + dm)
    uy = (dp - dm) / 2j
    uxx = 0.25 * (dpp + 2 * dpm + dmm)
    uyy = -0.25 * (dpp - 2 * dpm + dmm)
    uxy = (dpp - dmm) / 4j
    return v, (ux, uy), (uxx, uxy, uyy)


def directional(ms, v):
    """Mode sum of the derivative along the unit vector(s) v = (vx, vy)."""
    vc = np.asarray(v[0]) + 1j * np.asarray(v[1])
    return ms.dplus().scaled(0.5 * np.conj(vc)) + ms.dminus().scaled(0.5 * vc)
