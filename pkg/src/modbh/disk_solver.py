"""Dirichlet problems for (Delta^2 - lam^2 Delta) u = 0 inside or outside a disk.

The boundary data f = u and g = du/dr are sampled at M = 2N+2 equispaced
angles theta_j = -pi + 2 pi j / M.  Each Fourier mode n = -N..N+1 is solved
independently:

    u_n(r) = alpha_n F_n(r) + beta_n G_n(r),

with (F_n, G_n) taken from a :class:`RadialBasis`.  Coefficients are stored
as mantissa and power-of-two exponent so that solutions in the naive bases
stay representable when lam*R is tiny.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bessel import to_float
from .greens import FieldSample
from .modesum import ModeSum, derivatives
from .smallmatrix import InfiniteConditionError, SingularMatrixError, cond2_normalized, solve2
from .stable_basis import RadialBasis, mode_matrices, mode_matrix

SIDE_TOL = 1e-12


class WrongSideError(ValueError):
    pass


def mode_numbers(n_modes):
    return np.arange(-n_modes, n_modes + 2)


def sample_angles(n_modes):
    m = 2 * n_modes + 2
    return -np.pi + 2 * np.pi * np.arange(m) / m


def boundary_nodes(n_modes, radius):
    th = sample_angles(n_modes)
    return radius * np.stack([np.cos(th), np.sin(th)], axis=-1)


def boundary_modes(samples):
    """Fourier coefficients h_n = (1/M) sum_j s_j e^{-i n theta_j} for n = -N..N+1.

    The bin shared by n = +-(N+1) is reported as n = N+1.
    """
    s = np.asarray(samples)
    m = s.shape[-1]
    if m % 2 or m < 4:
        raise ValueError("sample count must be even and at least 4 (M = 2N+2), got %d" % m)
    n = mode_numbers(m // 2 - 1)
    if np.isrealobj(s):
        # rfft keeps h_{-n} = conj(h_n) exact for real data
        half = np.fft.rfft(s, axis=-1) / m
        spectrum = np.concatenate([half, np.conj(half[..., 1:m // 2][..., ::-1])], axis=-1)
    else:
        spectrum = np.fft.fft(s, axis=-1) / m
    # theta_0 = -pi contributes the factor e^{i n pi}
    return spectrum[..., n % m] * np.where(n % 2, -1.0, 1.0)


@dataclass
class DiskProblem:
    side: str
    lam: float
    radius: float
    n_modes: int
    boundary_u: np.ndarray
    boundary_un: np.ndarray

    def __post_init__(self):
        if self.side not in ("interior", "exterior"):
            raise ValueError("side must be 'interior' or 'exterior'")
        if not (self.lam > 0 and self.radius > 0):
            raise ValueError("lambda and radius must be positive")
        if self.n_modes < 1:
            raise ValueError("n_modes must be at least 1")
        m = 2 * self.n_modes + 2
        self.boundary_u = np.asarray(self.boundary_u)
        self.boundary_un = np.asarray(self.boundary_un)
        if self.boundary_u.shape != (m,) or self.boundary_un.shape != (m,):
            raise ValueError("boundary data must have M = 2N+2 = %d samples" % m)


@dataclass
class DiskSolution:
    basis: RadialBasis
    lam: float
    radius: float
    n_modes: int
    modes: np.ndarray
    alpha: np.ndarray        # complex mantissas
    alpha_exp: np.ndarray    # power-of-two exponents
    beta: np.ndarray
    beta_exp: np.ndarray
    cond: np.ndarray
    real_data: bool = True
    rank_deficient: np.ndarray = None   # modes whose matrix was singular in floating point

    @property
    def side(self):
        return "interior" if self.basis.interior else "exterior"

    @property
    def alphas(self):
        return _cvalue(self.alpha, self.alpha_exp)

    @property
    def betas(self):
        return _cvalue(self.beta, self.beta_exp)

    def coefficient(self, n):
        """(alpha_n, beta_n) as ordinary complex numbers (may overflow to inf)."""
        k = int(n) + self.n_modes
        return complex(self.alphas[k]), complex(self.betas[k])


def _cvalue(m, e):
    return to_float(np.real(m), e) + 1j * to_float(np.imag(m), e)


def _mode_solve_scaled(f_n, g_n, mm, singular="raise"):
    rhs = np.array([[np.real(f_n), np.imag(f_n)], [np.real(g_n), np.imag(g_n)]], dtype=float)
    deficient = False
    try:
        y = solve2(mm.scaled, rhs, col_exp=mm.col_exp)
    except SingularMatrixError:
        if singular != "basic":
            raise
        y = solve2(mm.scaled, rhs, col_exp=mm.col_exp, singular="basic")
        deficient = True
    coef = y[:, 0] + 1j * y[:, 1]
    try:
        cond = cond2_normalized(mm.scaled)
    except InfiniteConditionError:
        cond = math.inf
    return coef, -np.asarray(mm.col_exp, dtype=np.int64), cond, deficient


def mode_solve(f_n, g_n, basis, n, lam, radius):
    """(alpha, beta, cond) for one mode; alpha and beta may overflow to inf."""
    mm = mode_matrix(RadialBasis(basis), n, lam, radius)
    coef, exps, cond, _ = _mode_solve_scaled(f_n, g_n, mm)
    a, b = _cvalue(coef, exps)
    return complex(a), complex(b), float(cond)


def _check_side(basis, side):
    if basis.interior != (side == "interior"):
        raise ValueError("basis %s cannot be used for the %s problem" % (basis.value, side))


def solve_dirichlet(problem, basis):
    """Solve every mode of the problem in the given basis.

    A mode whose matrix is exactly singular in floating point (this happens
    to the naive bases at tiny lam*R) gets the basic solution of the rank-one
    system and is flagged in ``rank_deficient``.
    """
    basis = RadialBasis(basis)
    _check_side(basis, problem.side)
    fn = boundary_modes(problem.boundary_u)
    gn = boundary_modes(problem.boundary_un)
    modes = mode_numbers(problem.n_modes)
    alpha = np.zeros(len(modes), dtype=complex)
    beta = np.zeros(len(modes), dtype=complex)
    aexp = np.zeros(len(modes), dtype=np.int64)
    bexp = np.zeros(len(modes), dtype=np.int64)
    cond = np.zeros(len(modes))
    deficient = np.zeros(len(modes), dtype=bool)
    mats = mode_matrices(basis, modes, problem.lam, problem.radius)
    for k, mm in enumerate(mats):
        coef, exps, cond[k], deficient[k] = _mode_solve_scaled(fn[k], gn[k], mm, singular="basic")
        alpha[k], beta[k] = coef
        aexp[k], bexp[k] = exps
    real = bool(np.isrealobj(problem.boundary_u) and np.isrealobj(problem.boundary_un))
    sol = DiskSolution(basis, float(problem.lam), float(problem.radius), int(problem.n_modes),
                       modes, alpha, aexp, beta, bexp, cond, real, deficient)
    if real:
        _check_hermitian(sol)
    return sol


def _check_hermitian(sol, tol=1e-10):
    N = sol.n_modes
    for m, e in ((sol.alpha, sol.alpha_exp), (sol.beta, sol.beta_exp)):
        pos = slice(N + 1, 2 * N + 1)       # n = 1..N
        neg = slice(N - 1, None, -1)        # n = -1..-N
        top = np.maximum(e[pos], e[neg])
        a = _cvalue(m[pos], e[pos] - top)
        b = _cvalue(np.conj(m[neg]), e[neg] - top)
        scale = np.maximum(np.abs(a), np.abs(b))
        if np.any(np.abs(a - b) > tol * scale):
            warnings.warn("real boundary data produced modes without conjugate symmetry",
                          RuntimeWarning, stacklevel=3)
            return


def solution_mode_sum(sol):
    """The solution as a :class:`ModeSum` centered at the origin."""
    L = sol.n_modes + 1
    terms = {}
    for k, n in enumerate(sol.modes):
        fk, gk = sol.basis.types(n)
        for kind, c, e in ((fk, sol.alpha[k], sol.alpha_exp[k]), (gk, sol.beta[k], sol.beta_exp[k])):
            if kind not in terms:
                terms[kind] = (np.zeros(2 * L + 1, dtype=complex), np.zeros(2 * L + 1, dtype=np.int64))
            terms[kind][0][n + L] = c
            terms[kind][1][n + L] = e
    return ModeSum(sol.lam, L, terms)


def eval_disk_solution(sol, x):
    """Value, gradient and Hessian of the solution at x (a 2-vector or (n, 2) array)."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = pts.reshape(-1, 2)
    r = np.hypot(pts[:, 0], pts[:, 1])
    if sol.basis.interior:
        bad = r > sol.radius * (1 + SIDE_TOL)
    else:
        bad = r < sol.radius * (1 - SIDE_TOL)
    if np.any(bad):
        raise WrongSideError("evaluation point on the wrong side of the boundary")
    ms = solution_mode_sum(sol)
    v, g, h = derivatives(ms, pts[:, 0], pts[:, 1])
    conv = np.real if sol.real_data else np.asarray
    out = FieldSample(conv(v), conv(np.stack(g, axis=-1)), conv(np.stack(h, axis=-1)))
    return out[0] if single else out


def radial_derivative(sample, x):
    """du/dr from a FieldSample at points x."""
    pts = np.asarray(x, dtype=float).reshape(-1, 2)
    r = np.hypot(pts[:, 0], pts[:, 1])
    g = np.asarray(sample.gradient).reshape(-1, 2)
    return (pts[:, 0] * g[:, 0] + pts[:, 1] * g[:, 1]) / r


@dataclass
class ErrorReport:
    E_u: float
    E_g: float
    E_h: float


def _stack(samples):
    if isinstance(samples, FieldSample):
        return samples
    samples = list(samples)
    return FieldSample(np.array([s.value for s in samples]),
                       np.array([s.gradient for s in samples]),
                       np.array([s.hessian for s in samples]))


def error_measures(exact, approx):
    """Relative l2 errors of value, gradient (x and y pooled) and Hessian (xx, xy, yy pooled)."""
    ex, ap = _stack(exact), _stack(approx)
    if np.size(ex.value) != np.size(ap.value) or np.size(ex.value) == 0:
        raise ValueError("exact and approximate samples must have the same non-zero length")
    out = []
    for a, b in ((ex.value, ap.value), (ex.gradient, ap.gradient), (ex.hessian, ap.hessian)):
        den = np.linalg.norm(np.ravel(a))
        if den == 0:
            raise ZeroDivisionError("exact field block is identically zero")
        out.append(float(np.linalg.norm(np.ravel(a) - np.ravel(b)) / den))
    return ErrorReport(*out)
