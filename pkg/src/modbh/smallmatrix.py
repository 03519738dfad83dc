"""Closed-form 2x2 linear algebra: solves, singular values, condition numbers."""
import math

import numpy as np


class SingularMatrixError(ArithmeticError):
    pass


class InfiniteConditionError(ArithmeticError):
    """Raised when the columns are parallel to working precision."""


def solve2(a, b, col_exp=None, singular="raise"):
    """Solve the 2x2 system a x = b by Gaussian elimination with complete pivoting.

    b may be a 2-vector or a (2, k) array; real or complex.

    If ``col_exp`` is given, ``a`` holds column j scaled by 2**-col_exp[j] and the
    result is the correspondingly scaled solution (x_j * 2**col_exp[j]).  The
    pivot is chosen on the unscaled magnitudes, so the arithmetic is that of
    the unscaled solve up to exact powers of two.

    When the second pivot is exactly zero, ``singular="raise"`` signals
    :class:`SingularMatrixError`; ``singular="basic"`` returns the basic
    solution of the rank-one system (the non-pivot unknown set to zero).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    mag = np.abs(a)
    if col_exp is not None:
        with np.errstate(divide="ignore"):
            mag = np.log2(mag) + np.asarray(col_exp, dtype=float)[None, :]
    i, j = np.unravel_index(np.argmax(mag), (2, 2))
    piv = a[i, j]
    if piv == 0:
        raise SingularMatrixError("zero matrix")
    i2, j2 = 1 - i, 1 - j
    l = a[i2, j] / piv
    u22 = a[i2, j2] - l * a[i, j2]
    if u22 == 0 and singular != "basic":
        raise SingularMatrixError("matrix is singular to working precision")
    y1 = b[i]
    y2 = b[i2] - l * y1
    x = np.empty(np.broadcast_shapes(b.shape), dtype=np.result_type(a, b, float))
    x[j2] = y2 / u22 if u22 != 0 else 0.0
    x[j] = (y1 - a[i, j2] * x[j2]) / piv
    return x


def singular_values(a):
    """(sigma_max, sigma_min) of a 2x2 matrix, computed without an eigen-solver."""
    a = np.asarray(a)
    fro = math.hypot(math.hypot(abs(a[0, 0]), abs(a[0, 1])),
                     math.hypot(abs(a[1, 0]), abs(a[1, 1])))
    det = abs(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    if fro == 0:
        return 0.0, 0.0
    # sigma_max + sigma_min = sqrt(fro^2 + 2 det), sigma_max - sigma_min = sqrt(fro^2 - 2 det)
    t = 2 * det / fro ** 2
    smax = 0.5 * fro * (math.sqrt(1 + t) + math.sqrt(max(1 - t, 0.0)))
    smin = det / smax
    return smax, smin


def cond2(a):
    """Plain 2-norm condition number."""
    smax, smin = singular_values(a)
    if smin == 0:
        raise InfiniteConditionError("matrix is singular")
    return smax / smin


def column_cosine(a):
    """|cosine| of the angle between the two columns."""
    a = np.asarray(a)
    c1, c2 = a[:, 0], a[:, 1]
    n1, n2 = np.linalg.norm(c1), np.linalg.norm(c2)
    if n1 == 0 or n2 == 0:
        raise InfiniteConditionError("zero column")
    return min(abs(np.vdot(c1, c2)) / (n1 * n2), 1.0)


def cond2_normalized(a):
    """Condition number after scaling both columns to unit length.

    For unit columns the singular values are sqrt(1 +- c) with c the column
    cosine, so kappa = sqrt((1+c)/(1-c)).  1 - c is taken from the determinant
    (1 - c^2 = det^2) rather than by subtraction, so large condition numbers
    stay accurate; only exactly parallel columns signal an infinite value.
    """
    a = np.asarray(a)
    c1, c2 = a[:, 0], a[:, 1]
    n1, n2 = np.linalg.norm(c1), np.linalg.norm(c2)
    if n1 == 0 or n2 == 0 or not (np.isfinite(n1) and np.isfinite(n2)):
        raise InfiniteConditionError("zero or non-finite column")
    u, v = c1 / n1, c2 / n2
    c = min(abs(np.vdot(u, v)), 1.0)
    det = abs(u[0] * v[1] - u[1] * v[0])
    if det == 0 or not np.isfinite((1 + c) / det):
        raise InfiniteConditionError("columns are parallel to working precision")
    return (1 + c) / det
