"""The naive alternative: separate Laplace and modified Helmholtz expansions, added at the end.

Mathematically identical to the combined-basis pipeline; numerically it adds
two large, nearly opposite fields when lam * rho is small.
"""
from dataclasses import dataclass

import numpy as np

from ..greens import source_arrays
from .helmholtz import mh_eval, mh_m2l, mh_source_to_multipole
from .laplace import laplace_m2l, laplace_source_to_multipole, potential_field


@dataclass
class SplitMultipole:
    laplace: object
    helmholtz: object


@dataclass
class SplitLocal:
    laplace: object
    helmholtz: object


def split_source_to_multipole(sources, center, lam, p):
    """Laplace multipole of the log part and K-expansion of the K_0 part of the synthetic field."""
    src = source_arrays(sources)
    z = src.loc[:, 0] + 1j * src.loc[:, 1]
    v1 = src.v1[:, 0] + 1j * src.v1[:, 1]
    v23 = (src.v2[:, 0] + 1j * src.v2[:, 1]) * (src.v3[:, 0] + 1j * src.v3[:, 1])
    # log|x - s| = Re log(z - s); source derivatives of log(z - s) along v give -v/(z - s)
    # and -v2 v3/(z - s)^2, combined with the same prefactors as the full kernel.
    lap = laplace_source_to_multipole(
        z, complex(*center), p,
        charges=-src.c / (2 * np.pi),
        dipoles=src.d / lam * v1 / (2 * np.pi),
        quadrupoles=src.q / lam ** 2 * v23 / (2 * np.pi))
    return SplitMultipole(lap, mh_source_to_multipole(src, center, lam, p))


def split_m2l(src, new_center):
    return SplitLocal(laplace_m2l(src.laplace, complex(*new_center)), mh_m2l(src.helmholtz, new_center))


def split_eval(exp, x):
    pts = np.asarray(x, dtype=float)
    return potential_field(exp.laplace, pts) + mh_eval(exp.helmholtz, pts)
