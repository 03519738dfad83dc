"""Multipole and local expansions with their translation operators."""
from .biharmonic import (MbhLocal, MbhMultipole, mbh_eval_local, mbh_eval_multipole, mbh_l2l,
                         mbh_m2l, mbh_m2m, mbh_source_to_multipole)
from .helmholtz import MhExpansion, mh_eval, mh_l2l, mh_m2l, mh_m2m, mh_source_to_multipole
from .laplace import (LaplaceLocal, LaplaceMultipole, laplace_l2l, laplace_m2l, laplace_m2m,
                      laplace_source_to_multipole, potential_field)

__all__ = [
    "LaplaceMultipole", "LaplaceLocal", "laplace_source_to_multipole", "laplace_m2m",
    "laplace_m2l", "laplace_l2l", "potential_field",
    "MhExpansion", "mh_eval", "mh_source_to_multipole", "mh_m2m", "mh_m2l", "mh_l2l",
    "MbhMultipole", "MbhLocal", "mbh_source_to_multipole", "mbh_eval_multipole",
    "mbh_eval_local", "mbh_m2m", "mbh_m2l", "mbh_l2l",
]
