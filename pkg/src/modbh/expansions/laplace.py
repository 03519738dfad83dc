"""Laplace multipole and local expansions in complex form.

A multipole about z0 is  a0 log(z - z0) + sum_{l=1}^p a_l / (z - z0)^l,
a local expansion is     sum_{l=0}^p b_l (z - z0)^l.
The physical potential is the real part.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..greens import FieldSample


def binomial_table(n):
    """C(i, j) for 0 <= i, j <= n as floats (exact integers before rounding)."""
    t = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(i + 1):
            t[i, j] = float(math.comb(i, j))
    return t


@dataclass
class LaplaceMultipole:
    center: complex
    a0: complex
    coeffs: np.ndarray          # a_1 .. a_p
    radius: float = 0.0         # radius of the source disk, if known

    def __post_init__(self):
        self.center = complex(self.center)
        self.a0 = complex(self.a0)
        self.coeffs = np.asarray(self.coeffs, dtype=complex)

    @property
    def p(self):
        return len(self.coeffs)

    def potential(self, z, order=0):
        """The complex potential or its ``order``-th z-derivative (order <= 2)."""
        w = np.asarray(z, dtype=complex) - self.center
        l = np.arange(1, self.p + 1)
        inv = 1.0 / w[..., None] ** l
        if order == 0:
            return self.a0 * np.log(w) + inv @ self.coeffs
        if order == 1:
            return self.a0 / w + (inv / w[..., None]) @ (-l * self.coeffs)
        if order == 2:
            return -self.a0 / w ** 2 + (inv / w[..., None] ** 2) @ (l * (l + 1) * self.coeffs)
        raise ValueError("order must be 0, 1 or 2")


@dataclass
class LaplaceLocal:
    center: complex
    coeffs: np.ndarray          # b_0 .. b_p
    radius: float = math.inf

    def __post_init__(self):
        self.center = complex(self.center)
        self.coeffs = np.asarray(self.coeffs, dtype=complex)

    @property
    def p(self):
        return len(self.coeffs) - 1

    def potential(self, z, order=0):
        w = np.asarray(z, dtype=complex) - self.center
        c = self.coeffs
        for _ in range(order):
            c = c[1:] * np.arange(1, len(c))
        # Horner
        out = np.zeros(w.shape, dtype=complex)
        for b in c[::-1]:
            out = out * w + b
        return out


def potential_field(exp, x):
    """FieldSample of Re(phi) for an expansion with a ``potential`` method."""
    pts = np.asarray(x, dtype=float)
    z = pts[..., 0] + 1j * pts[..., 1]
    f0, f1, f2 = (exp.potential(z, k) for k in range(3))
    # for u = Re f: ux = Re f', uy = -Im f', uxx = Re f'', uxy = -Im f'', uyy = -Re f''
    return FieldSample(f0.real, np.stack([f1.real, -f1.imag], axis=-1),
                       np.stack([f2.real, -f2.imag, -f2.real], axis=-1))


def laplace_source_to_multipole(positions, center, p, charges=None, dipoles=None, quadrupoles=None,
                                radius=None):
    """Multipole of  sum_j q_j log(z - s_j) + mu_j/(z - s_j) + nu_j/(z - s_j)^2."""
    s = np.asarray(positions, dtype=complex).ravel()
    t = s - complex(center)
    zero = np.zeros(len(s), dtype=complex)
    q = zero if charges is None else np.asarray(charges, dtype=complex)
    mu = zero if dipoles is None else np.asarray(dipoles, dtype=complex)
    nu = zero if quadrupoles is None else np.asarray(quadrupoles, dtype=complex)
    l = np.arange(1, p + 1)
    tp = t[:, None] ** (l - 1)               # t^(l-1)
    a = -(q[:, None] * tp * t[:, None] / l).sum(axis=0)
    a += (mu[:, None] * tp).sum(axis=0)
    # 1/(w - t)^2 = sum_{l>=2} (l-1) t^(l-2) / w^l
    tp2 = np.zeros_like(tp)
    if p >= 2:
        tp2[:, 1:] = (l[1:] - 1) * t[:, None] ** (l[1:] - 2)
    a += (nu[:, None] * tp2).sum(axis=0)
    if radius is None:
        radius = float(np.abs(t).max()) if len(t) else 0.0
    return LaplaceMultipole(center, q.sum(), a, radius)


def laplace_m2m(src, new_center):
    """Re-center a multipole; b_l = sum_m a_m z0^(l-m) C(l-1, m-1) - a0 z0^l / l."""
    z0 = src.center - complex(new_center)
    p = src.p
    c = binomial_table(p)
    b = np.zeros(p, dtype=complex)
    zp = z0 ** np.arange(p + 1)
    for l in range(1, p + 1):
        m = np.arange(1, l + 1)
        b[l - 1] = np.sum(src.coeffs[m - 1] * zp[l - m] * c[l - 1, m - 1]) - src.a0 * zp[l] / l
    return LaplaceMultipole(new_center, src.a0, b, src.radius + abs(z0))


def laplace_m2l(src, new_center, p=None):
    """Convert a multipole into a local expansion about ``new_center``."""
    z0 = src.center - complex(new_center)
    if src.radius and abs(z0) <= 2 * src.radius:
        warnings.warn("multipole-to-local with separation below twice the source radius",
                      RuntimeWarning, stacklevel=2)
    p = src.p if p is None else p
    c = binomial_table(p + src.p)
    m = np.arange(1, src.p + 1)
    am = src.coeffs * (-1.0) ** m / z0 ** m
    b = np.zeros(p + 1, dtype=complex)
    b[0] = src.a0 * np.log(-z0) + am.sum()
    for l in range(1, p + 1):
        b[l] = (np.sum(am * c[l + m - 1, m - 1]) - src.a0 / l) / z0 ** l
    return LaplaceLocal(new_center, b, abs(z0) - src.radius)


def laplace_l2l(src, new_center):
    """Exact re-centering of a polynomial: b_l = sum_{k>=l} a_k C(k, l) (-z0)^(k-l)."""
    z0 = src.center - complex(new_center)
    p = src.p
    c = binomial_table(p)
    zp = (-z0) ** np.arange(p + 1)
    b = np.zeros(p + 1, dtype=complex)
    for l in range(p + 1):
        k = np.arange(l, p + 1)
        b[l] = np.sum(src.coeffs[k] * c[k, l] * zp[k - l])
    return LaplaceLocal(new_center, b, src.radius - abs(z0))
