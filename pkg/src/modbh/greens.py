"""Free-space Green's function of (Delta^2 - lam^2 Delta) and synthetic source fields.

G(x, s) = -(K_0(lam |x-s|) + log |x-s|) / (2 pi lam^2).

A source carries a charge c, a dipole (d, v1) and a quadrupole (q, v2, v3);
its field is

    lam^2 c G + lam d dG/dv1 + q d^2G/dv2 dv3,

with directional derivatives taken with respect to the source point.
The kernel K_0 + log is the order-zero Q-function, so all derivatives come
from the ladder operators in :mod:`modesum` and never form the cancelling
1/rho^k poles explicitly.  The split into its log part and its K_0 part is
kept as a separate, deliberately naive path.
"""
from dataclasses import dataclass, field

import numpy as np

from .modesum import ModeSum, derivatives, directional

COINCIDENT_TOL = 1e-300


class CoincidentPointError(ValueError):
    pass


def _unit(v, name):
    v = np.asarray(v, dtype=float).reshape(2)
    if abs(np.hypot(v[0], v[1]) - 1.0) > 1e-14:
        raise ValueError("%s must have unit length" % name)
    return v


@dataclass(frozen=True)
class PointSource:
    location: np.ndarray
    charge: float = 0.0
    dipole_weight: float = 0.0
    dipole_dir: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0]))
    quad_weight: float = 0.0
    quad_dirs: tuple = field(default_factory=lambda: (np.array([1.0, 0.0]), np.array([1.0, 0.0])))

    def __post_init__(self):
        object.__setattr__(self, "location", np.asarray(self.location, dtype=float).reshape(2))
        object.__setattr__(self, "dipole_dir", _unit(self.dipole_dir, "dipole_dir"))
        v2, v3 = self.quad_dirs
        object.__setattr__(self, "quad_dirs", (_unit(v2, "quad_dirs[0]"), _unit(v3, "quad_dirs[1]")))


@dataclass
class FieldSample:
    """Value, gradient (ux, uy) and Hessian (uxx, uxy, uyy).

    Arrays may carry a leading batch axis: value (n,), gradient (n, 2), hessian (n, 3).
    """
    value: np.ndarray
    gradient: np.ndarray
    hessian: np.ndarray

    def __getitem__(self, idx):
        return FieldSample(self.value[idx], self.gradient[idx], self.hessian[idx])

    def __len__(self):
        return len(self.value)

    def __add__(self, other):
        return FieldSample(self.value + other.value, self.gradient + other.gradient,
                           self.hessian + other.hessian)

    def __sub__(self, other):
        return FieldSample(self.value - other.value, self.gradient - other.gradient,
                           self.hessian - other.hessian)

    def scaled(self, w):
        return FieldSample(w * self.value, w * self.gradient, w * self.hessian)


def sample_from_derivatives(v, grad, hess, real=True):
    conv = np.real if real else np.asarray
    return FieldSample(conv(v), conv(np.stack(grad, axis=-1)), conv(np.stack(hess, axis=-1)))


@dataclass
class SourceArrays:
    """Column-wise view of a list of sources."""
    loc: np.ndarray      # (n, 2)
    c: np.ndarray
    d: np.ndarray
    v1: np.ndarray       # (n, 2)
    q: np.ndarray
    v2: np.ndarray
    v3: np.ndarray

    def __len__(self):
        return len(self.c)


def source_arrays(sources):
    if isinstance(sources, SourceArrays):
        return sources
    n = len(sources)
    if n == 0:
        z2 = np.zeros((0, 2))
        z = np.zeros(0)
        return SourceArrays(z2, z, z, z2, z, z2, z2)
    return SourceArrays(
        np.array([s.location for s in sources]),
        np.array([s.charge for s in sources], dtype=float),
        np.array([s.dipole_weight for s in sources], dtype=float),
        np.array([s.dipole_dir for s in sources]),
        np.array([s.quad_weight for s in sources], dtype=float),
        np.array([s.quad_dirs[0] for s in sources]),
        np.array([s.quad_dirs[1] for s in sources]),
    )


def greens_radial(lam, rho, max_order):
    """g(rho), g'(rho), ..., g^(max_order)(rho) for the radial Green's function."""
    lam = float(lam)
    rho = float(rho)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if not rho > 0:
        raise ValueError("rho must be positive")
    if not 0 <= max_order <= 5:
        raise ValueError("max_order must lie in 0..5")
    ms = ModeSum(lam, 0, {"Q": [1.0]})
    out = []
    for k in range(max_order + 1):
        out.append(float(np.real(ms.evaluate(rho, 0.0))))
        ms = (ms.dplus() + ms.dminus()).scaled(0.5)
    return [-v / (2 * np.pi * lam ** 2) for v in out]


def source_kernel_sum(src, lam, kind="Q"):
    """Per-source mode sum (batch axis = source) of the field, as a function of x - s.

    kind "Q" gives the full kernel; "K" and "LOG" give the K_0 and log parts
    with the same prefactors, so that full = K + LOG.
    """
    n = len(src)
    base = ModeSum(lam, 0, {kind: np.ones((n, 1))})
    # derivatives in s are minus derivatives in x; the second one flips sign twice
    dip = directional(base, src.v1.T).scaled(-src.d / lam)
    quad = directional(directional(base, src.v2.T), src.v3.T).scaled(src.q / lam ** 2)
    total = base.scaled(src.c) + dip + quad
    return total.scaled(-1.0 / (2 * np.pi))


def _check_points(src, pts):
    if len(src) == 0:
        return
    dist = np.hypot(pts[:, None, 0] - src.loc[None, :, 0], pts[:, None, 1] - src.loc[None, :, 1])
    if np.any(dist < COINCIDENT_TOL):
        raise CoincidentPointError("evaluation point coincides with a source")


def _field(sources, lam, x, kind):
    src = source_arrays(sources)
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = pts.reshape(-1, 2)
    nt = len(pts)
    if len(src) == 0:
        z = np.zeros(nt)
        out = FieldSample(z, np.zeros((nt, 2)), np.zeros((nt, 3)))
        return out[0] if single else out
    _check_points(src, pts)
    ms = source_kernel_sum(src, lam, kind)
    dx = pts[:, None, 0] - src.loc[None, :, 0]
    dy = pts[:, None, 1] - src.loc[None, :, 1]
    v, g, h = derivatives(ms, dx, dy)
    out = FieldSample(np.real(v).sum(axis=1),
                      np.stack([np.real(a).sum(axis=1) for a in g], axis=-1),
                      np.stack([np.real(a).sum(axis=1) for a in h], axis=-1))
    return out[0] if single else out


def synth_field(sources, lam, x):
    """Field of the sources at x (a 2-vector or an (n, 2) array of points)."""
    lam = float(lam)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return _field(sources, lam, x, "Q")


def split_field(sources, lam, x):
    """(u_L, u_H): the log-kernel part and the K_0-kernel part, with u = u_H - u_L.

    Each part is evaluated on its own; their difference suffers cancellation
    when lam |x - s| is small.
    """
    lam = float(lam)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    log_part = _field(sources, lam, x, "LOG")
    k_part = _field(sources, lam, x, "K")
    return log_part.scaled(-1.0), k_part


def exact_difference(sources, lam, x):
    """u_H - u_L in working precision."""
    u_l, u_h = split_field(sources, lam, x)
    return u_h - u_l
