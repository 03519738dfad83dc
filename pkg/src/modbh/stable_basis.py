"""Stabilized radial functions P_n, Q_n and the 2x2 mode matrices built from them.

With x = lam*r,

    P_n(r) = I_n(x) - (x/2)^|n| / |n|!
    Q_n(r) = K_n(x) - 2^(|n|-1) (|n|-1)! / x^|n|      (n != 0)
    Q_0(r) = K_0(x) + log(r)

P_n and Q_n are evaluated without forming the cancelling difference when the
subtracted term dominates: the Bessel power series is summed with its leading
term left out.
"""
import enum
import math

import numpy as np

from . import bessel
from .bessel import EPS, MAX_TERMS, SeriesDivergenceError, normalize, to_float

# above this argument the K_n series itself cancels badly (I_n and the digamma
# sum grow like e^x while K_n decays)
Q_SERIES_MAX = 12.0
P_SERIES_MAX = 40.0


class RadialBasis(enum.Enum):
    """Radial function pairs (F_n, G_n) for the disk problems."""

    INT_NAIVE = "int-naive"     # (r^|n|, I_n)
    INT_STABLE = "int-stable"   # (r^|n|, P_n)
    EXT_NAIVE = "ext-naive"     # (r^-|n|, K_n), (log r, K_0) at n = 0
    EXT_STABLE = "ext-stable"   # (Q_n, K_n)

    @property
    def interior(self):
        return self in (RadialBasis.INT_NAIVE, RadialBasis.INT_STABLE)

    def types(self, n):
        """Radial type tags (see ``modesum``) of the pair used for mode n."""
        if self is RadialBasis.INT_NAIVE:
            return "HI", "I"
        if self is RadialBasis.INT_STABLE:
            return "HI", "P"
        if self is RadialBasis.EXT_NAIVE:
            return ("LOG" if n == 0 else "HO"), "K"
        return "Q", "K"


def _add_scaled(m1, e1, m2, e2):
    top = np.maximum(e1, e2)
    with np.errstate(under="ignore"):
        s = (np.ldexp(m1, (e1 - top).clip(-1100, 0).astype(np.int32))
             + np.ldexp(m2, (e2 - top).clip(-1100, 0).astype(np.int32)))
    return normalize(s, top)


def _i_tail_series(nmax, x):
    # sum_{k>=1} (x^2/4)^k n!/(k!(n+k)!)
    return bessel._i_ratio_series(nmax, x, skip_first=True)


def p_scaled(nmax, x):
    """P~_n(x) = I_n(x) - (x/2)^n/n!, n = 0..nmax, as (mantissa, exponent)."""
    x = bessel._as_args(x)
    tm, te = bessel.leading_i_scaled(nmax, x)
    mant = np.empty((x.size, nmax + 1))
    exp = np.empty((x.size, nmax + 1), dtype=np.int64)
    small = x <= P_SERIES_MAX
    if np.any(small):
        mant[small], exp[small] = normalize(tm[small] * _i_tail_series(nmax, x[small]), te[small])
    if np.any(~small):
        im, ie = bessel.i_scaled(nmax, x[~small])
        mant[~small], exp[~small] = _add_scaled(im, ie, -tm[~small], te[~small])
    return mant, exp


def singular_k_scaled(nmax, x):
    """Leading singular term 2^(n-1)(n-1)!/x^n of K_n, n = 0..nmax (entry 0 unused, set 0)."""
    x = bessel._as_args(x)
    mant = np.zeros((x.size, nmax + 1))
    exp = np.zeros((x.size, nmax + 1), dtype=np.int64)
    if nmax == 0:
        return mant, exp
    m, e = np.frexp(1.0 / x)
    e = e.astype(np.int64)
    for n in range(1, nmax + 1):
        if n > 1:
            m, de = np.frexp(m * (2.0 * (n - 1)) / x)
            e = e + de
        mant[:, n] = m
        exp[:, n] = e
    return mant, exp


def _q_series(nmax, x):
    # K_n power series with the 2^(n-1)(n-1)!/x^n term removed; Q~_0 = K_0 + log x
    q = 0.25 * x * x
    lg = np.log(0.5 * x)
    psi = bessel._digamma_table(MAX_TERMS + nmax + 2)
    um, ue = singular_k_scaled(nmax, x)
    tm, te = bessel.leading_i_scaled(nmax, x)
    r = bessel._i_ratio_series(nmax, x)
    n = np.arange(nmax + 1)[None, :]
    # B_n = sum_k (psi(k+1)+psi(n+k+1)) q^k n!/(k!(n+k)!)
    term = np.ones((x.size, nmax + 1))
    bsum = np.broadcast_to(psi[0] + psi[n], term.shape).copy()
    for k in range(1, MAX_TERMS + 1):
        term = term * q[:, None] / (k * (n + k))
        d = (psi[k] + psi[n + k]) * term
        bsum += d
        if np.all(np.abs(d) <= EPS * 0.25 * np.abs(bsum)):
            break
    else:
        raise SeriesDivergenceError("K_n series did not converge")
    # A_n = sum_{k=1}^{n-1} (n-k-1)!/((n-1)! k!) (-q)^k
    asum = np.zeros((x.size, nmax + 1))
    for nn in range(2, nmax + 1):
        c = np.ones(x.size)
        acc = np.zeros(x.size)
        for k in range(1, nn):
            c = c * (-q) / (k * (nn - k))
            acc += c
        asum[:, nn] = acc
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    tail = sign * (-lg[:, None] * r + 0.5 * bsum)
    mant, exp = _add_scaled(um * asum, ue, tm * tail, te)
    # zero mode: K_0 + log x = log 2 - log(x/2)(I_0 - 1) + sum_k psi(k+1) q^k/(k!)^2
    tail0 = _i_tail_series(0, x)[:, 0]
    t = np.ones(x.size)
    s = np.full(x.size, psi[0])
    for k in range(1, MAX_TERMS + 1):
        t = t * q / (k * k)
        s = s + psi[k] * t
        if np.all(t * psi[k] <= EPS * 0.1 * np.abs(s + math.log(2.0))):
            break
    q0 = math.log(2.0) - lg * tail0 + s
    mant[:, 0], exp[:, 0] = normalize(q0, 0)
    return mant, exp


def q2_deriv_series(x):
    """dQ~_2/dx for x <= 2 by termwise differentiation.

    The identity -(K_1 + Q_3)/2 cancels two 1/x terms down to O(x log x) here.
    """
    x = np.asarray(x, dtype=float)
    lg = np.log(0.5 * x)
    q = 0.25 * x * x
    psi = bessel._digamma_table(MAX_TERMS + 3)
    t = 0.5 * q
    s = np.zeros_like(x)
    for k in range(MAX_TERMS):
        d = t / x * ((2 * k + 2) * (0.5 * (psi[k] + psi[k + 2]) - lg) - 1.0)
        s = s + d
        if np.all(np.abs(d) <= EPS * 0.25 * np.abs(s)):
            return s
        t = t * q / ((k + 1) * (k + 3))
    raise SeriesDivergenceError("Q_2 derivative series did not converge")


def _q_direct(nmax, x):
    km, ke = bessel.k_scaled(nmax, x)
    um, ue = singular_k_scaled(nmax, x)
    mant, exp = _add_scaled(km, ke, -um, ue)
    q0 = to_float(km[:, 0], ke[:, 0]) + np.log(x)
    mant[:, 0], exp[:, 0] = normalize(q0, 0)
    return mant, exp


def q_scaled(nmax, x):
    """Q~_n(x) = K_n(x) - 2^(n-1)(n-1)!/x^n, and Q~_0(x) = K_0(x) + log x.

    The physical Q_0(r) = Q~_0(lam r) - log(lam); callers add the shift.
    """
    x = bessel._as_args(x)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise ValueError("Q_n needs finite, positive arguments")
    mant = np.empty((x.size, nmax + 1))
    exp = np.empty((x.size, nmax + 1), dtype=np.int64)
    small = x <= bessel.SERIES_SWITCH
    mid = (~small) & (x <= Q_SERIES_MAX)
    big = x > Q_SERIES_MAX
    if np.any(small):
        mant[small], exp[small] = _q_series(nmax, x[small])
    if np.any(big):
        mant[big], exp[big] = _q_direct(nmax, x[big])
    if np.any(mid):
        # past the switch point the direct difference is used unless the order is
        # high enough that K_n is still dominated by its singular term
        xm = x[mid]
        sm, se = _q_series(nmax, xm)
        dm, de = _q_direct(nmax, xm)
        n = np.arange(nmax + 1)[None, :]
        use_series = n >= _series_order_threshold(xm)[:, None]
        mant[mid] = np.where(use_series, sm, dm)
        exp[mid] = np.where(use_series, se, de)
    return mant, exp


def _series_order_threshold(x):
    return np.ceil(0.5 * x * x + 2.0)


def p_table(nmax, x):
    return to_float(*p_scaled(nmax, x))


def q_table(nmax, x):
    return to_float(*q_scaled(nmax, x))


def _check(lam, r, allow_zero):
    lam = float(lam)
    r = float(r)
    if not (lam > 0 and math.isfinite(lam)):
        raise ValueError("lambda must be positive and finite")
    if not math.isfinite(r) or r < 0 or (r == 0 and not allow_zero):
        raise ValueError("invalid radius %r" % r)
    return lam, r


def p_eval(n, lam, r):
    """P_n(r) and dP_n/dr."""
    lam, r = _check(lam, r, allow_zero=True)
    n = abs(int(n))
    x = lam * r
    pv = p_table(n + 1, x)[0]
    iv = bessel.i_table(n + 1, x)[0]
    if n == 0:
        dx = iv[1]
    else:
        dx = 0.5 * (pv[n - 1] + iv[n + 1])
    val, der = pv[n], lam * dx
    if not (math.isfinite(val) and math.isfinite(der)):
        raise OverflowError("P_%d(%g) out of range" % (n, x))
    return val, der


def q_eval(n, lam, r):
    """Q_n(r) and dQ_n/dr."""
    lam, r = _check(lam, r, allow_zero=False)
    n = abs(int(n))
    x = lam * r
    qv = q_table(n + 1, x)[0]
    if n == 0:
        val = qv[0] - math.log(lam)
        dx = -qv[1]
    else:
        kv = bessel.k_table(n - 1, x)[0]
        val = qv[n]
        if n == 2 and x <= bessel.SERIES_SWITCH:
            dx = float(q2_deriv_series(x))
        else:
            dx = -0.5 * (kv[n - 1] + qv[n + 1])
    der = lam * dx
    if not (math.isfinite(val) and math.isfinite(der)):
        raise OverflowError("Q_%d(%g) out of range" % (n, x))
    return val, der


def radial_scaled(kind, nmax, lam, r):
    """Values of a radial family for orders 0..nmax at radii r, as (mantissa, exponent).

    kind is one of the tags used by ``modesum``:
    I, K, P, Q (Bessel-type, argument lam*r), G = (lam r/2)^n/n!,
    HI = r^n, HO = r^-n, LOG = log r (order 0 only).
    """
    r = bessel._as_args(r)
    x = lam * r
    if kind == "I":
        return bessel.i_scaled(nmax, x)
    if kind == "K":
        return bessel.k_scaled(nmax, x)
    if kind == "P":
        return p_scaled(nmax, x)
    if kind == "Q":
        mant, exp = q_scaled(nmax, x)
        q0 = to_float(mant[:, 0], exp[:, 0]) - math.log(lam)
        mant[:, 0], exp[:, 0] = normalize(q0, 0)
        return mant, exp
    if kind == "G":
        return bessel.leading_i_scaled(nmax, x)
    if kind in ("HI", "HO"):
        f, e = np.frexp(r)
        e = e.astype(np.int64)
        if kind == "HO":
            f, e = 1.0 / f, -e
        mant = np.empty((r.size, nmax + 1))
        exp = np.empty((r.size, nmax + 1), dtype=np.int64)
        m = np.ones(r.size)
        ee = np.zeros(r.size, dtype=np.int64)
        for n in range(nmax + 1):
            if n > 0:
                m, de = np.frexp(m * f)
                ee = ee + e + de
            mant[:, n] = m
            exp[:, n] = ee
        if kind == "HI":
            zero = r == 0
            mant[zero, 1:] = 0.0
        return mant, exp
    if kind == "LOG":
        mant = np.zeros((r.size, nmax + 1))
        exp = np.zeros((r.size, nmax + 1), dtype=np.int64)
        mant[:, 0], exp[:, 0] = normalize(np.log(r), 0)
        return mant, exp
    raise ValueError("unknown radial kind %r" % kind)


def radial_values_and_derivs(kind, nmax, lam, r):
    """Values and r-derivatives for orders 0..nmax at a single radius.

    Returns ((vm, ve), (dm, de)), mantissa/exponent arrays of length nmax+1.
    Derivatives come from identities that avoid cancellation:
    P_n' = lam (P_{n-1} + I_{n+1})/2, Q_n' = -lam (K_{n-1} + Q_{n+1})/2,
    P_0' = lam I_1, Q_0' = -lam Q_1.
    """
    top = nmax + 1
    n = np.arange(nmax + 1)
    lo = np.where(n == 0, 1, n - 1)
    if kind == "HI":
        vm, ve = radial_scaled("HI", nmax, lam, r)
        dm = np.zeros(nmax + 1)
        de = np.zeros(nmax + 1, dtype=np.int64)
        if nmax >= 1:
            dm[1:], de[1:] = normalize(n[1:] * vm[0, :-1], ve[0, :-1])
        return (vm[0], ve[0]), (dm, de)
    if kind == "HO":
        vm, ve = radial_scaled("HO", top, lam, r)
        dm, de = normalize(-n * vm[0, 1:], ve[0, 1:])
        return (vm[0, :-1], ve[0, :-1]), (dm, de)
    if kind == "LOG":
        vm = np.zeros(nmax + 1)
        ve = np.zeros(nmax + 1, dtype=np.int64)
        dm, de = vm.copy(), ve.copy()
        vm[0], ve[0] = normalize(math.log(r), 0)
        dm[0], de[0] = normalize(1.0 / r, 0)
        return (vm, ve), (dm, de)
    if kind in ("I", "K"):
        m, e = radial_scaled(kind, top, lam, r)
        m, e = m[0], e[0]
        d = _add_scaled(m[lo], e[lo], m[n + 1], e[n + 1])
        sign = 0.5 if kind == "I" else -0.5
        return (m[:-1], e[:-1]), normalize(sign * lam * d[0], d[1])
    if kind == "P":
        pm, pe = p_scaled(top, lam * r)
        im, ie = bessel.i_scaled(top, lam * r)
        pm, pe, im, ie = pm[0], pe[0], im[0], ie[0]
        d = _add_scaled(pm[lo], pe[lo], im[n + 1], ie[n + 1])
        dm, de = normalize(0.5 * lam * d[0], d[1])
        dm[0], de[0] = normalize(lam * im[1], ie[1])
        return (pm[:-1], pe[:-1]), (dm, de)
    if kind == "Q":
        qm, qe = radial_scaled("Q", top, lam, r)
        km, ke = bessel.k_scaled(top, lam * r)
        qm, qe, km, ke = qm[0], qe[0], km[0], ke[0]
        d = _add_scaled(km[lo], ke[lo], qm[n + 1], qe[n + 1])
        dm, de = normalize(-0.5 * lam * d[0], d[1])
        dm[0], de[0] = normalize(-lam * qm[1], qe[1])
        if nmax >= 2 and lam * r <= bessel.SERIES_SWITCH:
            dm[2], de[2] = normalize(lam * float(q2_deriv_series(lam * r)), 0)
        return (qm[:-1], qe[:-1]), (dm, de)
    raise ValueError(kind)


def _radial_value_and_deriv(kind, n, lam, r):
    # (mantissa, exponent) of the value and the r-derivative for one order
    n = abs(n)
    (vm, ve), (dm, de) = radial_values_and_derivs(kind, n, lam, r)
    return (vm[n], ve[n]), (dm[n], de[n])


class ModeMatrix:
    """A(F, G, R) = [[F(R), G(R)], [F'(R), G'(R)]] for one mode.

    Each column is stored with its own power-of-two scale (``col_exp``) so the
    matrix stays representable for extreme orders and radii; ``entries`` is the
    unscaled matrix and may over/underflow.
    """

    def __init__(self, scaled, col_exp, n, lam, radius, basis):
        self.scaled = scaled
        self.col_exp = col_exp
        self.n = n
        self.lam = lam
        self.radius = radius
        self.basis = basis

    @property
    def entries(self):
        with np.errstate(over="ignore", under="ignore"):
            return np.ldexp(self.scaled, np.asarray(self.col_exp, dtype=np.int32)[None, :])

    def determinant(self):
        d = self.scaled[0, 0] * self.scaled[1, 1] - self.scaled[0, 1] * self.scaled[1, 0]
        return float(to_float(d, int(self.col_exp[0] + self.col_exp[1])))


def _assemble(basis, n, lam, radius, columns):
    scaled = np.empty((2, 2))
    col_exp = np.empty(2, dtype=np.int64)
    for j, ((vm, ve), (dm, de)) in enumerate(columns):
        if vm == 0:
            top = de
        elif dm == 0:
            top = ve
        else:
            top = max(ve, de)
        scaled[0, j] = math.ldexp(vm, int(ve - top)) if vm != 0 else 0.0
        scaled[1, j] = math.ldexp(dm, int(de - top)) if dm != 0 else 0.0
        col_exp[j] = top
    return ModeMatrix(scaled, col_exp, n, lam, radius, basis)


def mode_matrix(basis, n, lam, radius):
    """The 2x2 matrix of (F_n, G_n) values and r-derivatives at ``radius``."""
    basis = RadialBasis(basis)
    lam, radius = _check(lam, radius, allow_zero=False)
    n = int(n)
    cols = [_radial_value_and_deriv(kind, n, lam, radius) for kind in basis.types(n)]
    return _assemble(basis, n, lam, radius, cols)


def mode_matrices(basis, modes, lam, radius):
    """Mode matrices for every n in ``modes``, sharing one set of radial tables."""
    basis = RadialBasis(basis)
    lam, radius = _check(lam, radius, allow_zero=False)
    modes = [int(n) for n in modes]
    nmax = max(abs(n) for n in modes)
    tables = {}
    out = []
    for n in modes:
        cols = []
        for kind in basis.types(n):
            if kind not in tables:
                tables[kind] = radial_values_and_derivs(kind, nmax, lam, radius)
            (vm, ve), (dm, de) = tables[kind]
            a = abs(n)
            cols.append(((vm[a], ve[a]), (dm[a], de[a])))
        out.append(_assemble(basis, n, lam, radius, cols))
    return out


def mode_determinant(basis, n, lam, radius):
    """det A(F_n, G_n, R) without cancellation, as (mantissa, exponent).

    Adding a multiple of one column to another leaves the determinant unchanged,
    and each pair reduces to one whose two terms never cancel:
    (r^n, I_n) and (r^n, P_n) -> (r^n, P_n);  (r^-n, K_n) -> (r^-n, Q_n);
    (Q_n, K_n) -> -c_n (r^-n, Q_n) with K_n = Q_n + c_n r^-n;
    at n = 0, (log r, K_0) and (Q_0, K_0) -> (log r, Q_0).
    The determinant of the rounded entries of a naive matrix (``ModeMatrix.determinant``)
    is only accurate to about cond * eps.
    """
    basis = RadialBasis(basis)
    lam, radius = _check(lam, radius, allow_zero=False)
    a = abs(int(n))
    if basis.interior:
        kinds = ("HI", "P") if a else ("HI", "I")
    else:
        kinds = ("HO", "Q") if a else ("LOG", "Q")
    mm = _assemble(basis, n, lam, radius,
                   [_radial_value_and_deriv(k, a, lam, radius) for k in kinds])
    s = mm.scaled
    d = s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0]
    e = int(mm.col_exp[0] + mm.col_exp[1])
    if basis is RadialBasis.EXT_STABLE and a:
        # c_n = 2^(n-1) (n-1)! / lam^n; det(Q, K) = det(Q, c h) = -c det(h, Q)
        cm, ce = singular_k_scaled(a, np.array([lam]))
        d, e = -d * cm[0, a], e + int(ce[0, a])
    m, e2 = normalize(np.array([d]), np.array([e]))
    return float(m[0]), int(e2[0])
