"""Modified Bessel functions I_n and K_n of integer order and real argument.

Everything here is written from scratch on top of numpy.  Internally the
sequences are carried as ``(mantissa, exponent)`` pairs (value equals
``mantissa * 2**exponent``) so that very high orders at very small arguments,
where I_n underflows and K_n overflows, can still be combined exactly.  The
public functions return plain floats.
"""
import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061

# K_0/K_1 and the stabilized functions use the power series below this argument.
SERIES_SWITCH = 2.0
MAX_TERMS = 500
EPS = np.finfo(float).eps

# rescaling threshold for recurrences carried with a shared power-of-two exponent
_BIG_EXP = 600


class SeriesDivergenceError(ArithmeticError):
    pass


def _as_args(x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        x = x.ravel()
    return x


def digamma_nonneg_int(k):
    """psi(k) for integer k >= 1 via psi(k) = -gamma + sum_{j<k} 1/j."""
    if int(k) != k or k < 1:
        raise ValueError("digamma_nonneg_int needs an integer k >= 1, got %r" % (k,))
    return -EULER_GAMMA + math.fsum(1.0 / j for j in range(1, int(k)))


def _digamma_table(kmax):
    # psi(1..kmax+1), index j holds psi(j+1)
    out = np.empty(kmax + 1)
    acc = -EULER_GAMMA
    for j in range(kmax + 1):
        out[j] = acc
        acc += 1.0 / (j + 1)
    return out


def normalize(mant, exp):
    """Renormalize a mantissa/exponent pair so |mantissa| lies in [0.5, 1)."""
    m, e = np.frexp(mant)
    return m, np.asarray(exp) + e


def to_float(mant, exp):
    with np.errstate(over="ignore", under="ignore"):
        return np.ldexp(mant, np.asarray(exp, dtype=np.int64).clip(-3000, 3000).astype(np.int32))


def scaled_mul(coef, mant, exp):
    """coef * mant * 2**exp for complex or real coef, without forming 2**exp."""
    exp = np.asarray(exp, dtype=np.int64).clip(-3000, 3000).astype(np.int32)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        if np.iscomplexobj(coef):
            return np.ldexp(coef.real * mant, exp) + 1j * np.ldexp(coef.imag * mant, exp)
        return np.ldexp(coef * mant, exp)


def leading_i_scaled(nmax, x):
    """(x/2)^n / n! for n = 0..nmax as mantissa/exponent arrays, shape (len(x), nmax+1)."""
    x = _as_args(x)
    mant = np.empty((x.size, nmax + 1))
    exp = np.empty((x.size, nmax + 1), dtype=np.int64)
    m, e = np.full(x.size, 0.5), np.ones(x.size, dtype=np.int64)
    half = 0.5 * x
    for n in range(nmax + 1):
        if n > 0:
            m, de = np.frexp(m * half / n)
            e = e + de
        mant[:, n] = m
        exp[:, n] = e
    return mant, exp


def _i_ratio_series(nmax, x, skip_first=False):
    # sum_k (x^2/4)^k n!/(k!(n+k)!) for each n; starts at k=1 if skip_first
    q = 0.25 * x * x
    n = np.arange(nmax + 1)[None, :]
    term = np.ones((x.size, nmax + 1))
    total = np.zeros_like(term) if skip_first else np.ones_like(term)
    for k in range(1, MAX_TERMS + 1):
        term = term * q[:, None] / (k * (n + k))
        total += term
        if np.all(term <= EPS * 0.25 * np.abs(total)):
            return total
    raise SeriesDivergenceError("I_n power series did not converge in %d terms" % MAX_TERMS)


def _i_miller(nmax, x):
    # ratios y_k = I_k/I_{k-1} from the backward continued fraction, normalized by
    # e^x = I_0 + 2 sum_k I_k
    top = nmax + int(np.max(x)) + 40 + int(8.0 * math.sqrt(nmax + np.max(x)))
    y = np.zeros((x.size, top + 2))
    for k in range(top, 0, -1):
        y[:, k] = 1.0 / (2.0 * k / x + y[:, k + 1])
    total = np.ones(x.size)
    prod = np.ones(x.size)
    with np.errstate(under="ignore"):
        for k in range(1, top + 1):
            prod = prod * y[:, k]
            total += 2.0 * prod
    with np.errstate(over="ignore"):
        i0 = np.exp(x) / total
    mant = np.empty((x.size, nmax + 1))
    exp = np.empty((x.size, nmax + 1), dtype=np.int64)
    m, e = np.frexp(i0)
    e = e.astype(np.int64)
    for n in range(nmax + 1):
        if n > 0:
            m, de = np.frexp(m * y[:, n])
            e = e + de
        mant[:, n] = m
        exp[:, n] = e
    return mant, exp


def i_scaled(nmax, x):
    """I_0..I_nmax at each x as (mantissa, exponent), shape (len(x), nmax+1)."""
    x = _as_args(x)
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise ValueError("I_n needs finite, non-negative arguments")
    mant = np.empty((x.size, nmax + 1))
    exp = np.empty((x.size, nmax + 1), dtype=np.int64)
    small = x <= SERIES_SWITCH
    if np.any(small):
        xs = x[small]
        tm, te = leading_i_scaled(nmax, xs)
        mant[small], exp[small] = normalize(tm * _i_ratio_series(nmax, xs), te)
    if np.any(~small):
        mant[~small], exp[~small] = _i_miller(nmax, x[~small])
    return mant, exp


def _k01_series(x):
    q = 0.25 * x * x
    lg = np.log(0.5 * x)
    psi = _digamma_table(MAX_TERMS + 1)
    i0 = np.ones_like(x)
    i1 = 0.5 * x
    s0 = np.full_like(x, psi[0])
    s1 = np.full_like(x, psi[0] + psi[1])
    t0 = np.ones_like(x)   # q^k/(k!)^2
    t1 = np.ones_like(x)   # q^k/(k!(k+1)!)
    for k in range(1, MAX_TERMS + 1):
        t0 = t0 * q / (k * k)
        t1 = t1 * q / (k * (k + 1))
        i0 = i0 + t0
        i1 = i1 + 0.5 * x * t1
        d0 = psi[k] * t0
        d1 = (psi[k] + psi[k + 1]) * t1
        s0 = s0 + d0
        s1 = s1 + d1
        if np.all(t0 <= EPS * 0.1 * np.minimum(1.0, np.abs(s0))):
            break
    else:
        raise SeriesDivergenceError("K_0/K_1 series did not converge")
    k0 = -lg * i0 + s0
    k1 = 1.0 / x + lg * i1 - 0.25 * x * s1
    return k0, k1


def _k01_steed(x):
    # Steed's continued fraction (Temme/Thompson-Barnett CF2) at order zero
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25
    q = np.full_like(x, a1)
    c = np.full_like(x, a1)
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 20 * MAX_TERMS):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels) < EPS * 0.25 * np.abs(s)):
            break
    else:
        raise SeriesDivergenceError("K_0 continued fraction did not converge")
    h = a1 * h
    with np.errstate(under="ignore"):
        k0 = np.sqrt(np.pi / (2.0 * x)) * np.exp(-x) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def k01(x):
    """K_0(x), K_1(x) for x > 0 (series below SERIES_SWITCH, continued fraction above)."""
    x = _as_args(x)
    k0 = np.empty_like(x)
    k1 = np.empty_like(x)
    small = x <= SERIES_SWITCH
    if np.any(small):
        k0[small], k1[small] = _k01_series(x[small])
    if np.any(~small):
        k0[~small], k1[~small] = _k01_steed(x[~small])
    return k0, k1


def k_scaled(nmax, x):
    """K_0..K_nmax at each x as (mantissa, exponent) via upward recurrence."""
    x = _as_args(x)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise ValueError("K_n needs finite, positive arguments")
    k0, k1 = k01(x)
    mant = np.empty((x.size, nmax + 1))
    exp = np.zeros((x.size, nmax + 1), dtype=np.int64)
    mant[:, 0], exp[:, 0] = normalize(k0, 0)
    if nmax == 0:
        return mant, exp
    mant[:, 1], exp[:, 1] = normalize(k1, 0)
    prev, cur = k0, k1
    shift = np.zeros(x.size, dtype=np.int64)
    for n in range(1, nmax):
        nxt = prev + (2.0 * n / x) * cur
        big = np.abs(nxt) > 2.0 ** _BIG_EXP
        if np.any(big):
            cur = np.where(big, np.ldexp(cur, -_BIG_EXP), cur)
            nxt = np.where(big, np.ldexp(nxt, -_BIG_EXP), nxt)
            shift = shift + big * _BIG_EXP
        prev, cur = cur, nxt
        mant[:, n + 1], exp[:, n + 1] = normalize(nxt, shift)
    return mant, exp


def i_table(nmax, x):
    return to_float(*i_scaled(nmax, x))


def k_table(nmax, x):
    return to_float(*k_scaled(nmax, x))


def _check_scalar(x, positive):
    if not np.isscalar(x) and np.ndim(x) != 0:
        raise TypeError("expected a scalar argument")
    x = float(x)
    if not math.isfinite(x) or x < 0 or (positive and x == 0):
        raise ValueError("invalid Bessel argument %r" % x)
    return x


def mod_bessel_i_seq(order_max, x):
    """Return the array I_0(x), ..., I_order_max(x)."""
    if order_max < 0:
        raise ValueError("order_max must be >= 0")
    x = _check_scalar(x, positive=False)
    vals = i_table(order_max, x)[0]
    if not np.all(np.isfinite(vals)):
        raise OverflowError("I_n(%g) exceeds the floating point range" % x)
    return vals


def mod_bessel_k_seq(order_max, x):
    """Return the array K_0(x), ..., K_order_max(x)."""
    if order_max < 0:
        raise ValueError("order_max must be >= 0")
    x = _check_scalar(x, positive=True)
    vals = k_table(order_max, x)[0]
    if not np.all(np.isfinite(vals)):
        raise OverflowError("K_n(%g) up to order %d exceeds the floating point range" % (x, order_max))
    return vals


def mod_bessel_derivs(n, x):
    """Derivatives I_n'(x) and K_n'(x) from the order recurrences."""
    n = abs(int(n))
    x = _check_scalar(x, positive=True)
    iv = mod_bessel_i_seq(n + 1, x)
    kv = mod_bessel_k_seq(n + 1, x)
    lo = 1 if n == 0 else n - 1
    return 0.5 * (iv[lo] + iv[n + 1]), -0.5 * (kv[lo] + kv[n + 1])


def bessel_wronskian(n, x):
    """I_n K_n' - I_n' K_n, formed in scaled arithmetic (exact answer: -1/x).

    Works where I_n underflows or K_n overflows individually.
    """
    n = abs(int(n))
    x = _as_args(x)
    im, ie = i_scaled(n + 1, x)
    km, ke = k_scaled(n + 1, x)
    lo = 1 if n == 0 else n - 1
    ei, ek = ie[:, n], ke[:, n]
    ilo = np.ldexp(im[:, lo], (ie[:, lo] - ei).astype(np.int32))
    ihi = np.ldexp(im[:, n + 1], (ie[:, n + 1] - ei).astype(np.int32))
    klo = np.ldexp(km[:, lo], (ke[:, lo] - ek).astype(np.int32))
    khi = np.ldexp(km[:, n + 1], (ke[:, n + 1] - ek).astype(np.int32))
    w = im[:, n] * (-0.5 * (klo + khi)) - 0.5 * (ilo + ihi) * km[:, n]
    return to_float(w, ei + ek)
