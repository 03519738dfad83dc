"""
Conditioning of the per-mode 2x2 systems
========================================

Each Fourier mode n of the disk problem is a 2x2 solve.  With the textbook
radial pair (r^n, I_n) the two columns become parallel as lam*R shrinks, and
the normalized condition number blows up.  The pair (r^n, P_n) stays well
conditioned.
"""
from modbh.smallmatrix import InfiniteConditionError, cond2_normalized
from modbh.stable_basis import RadialBasis, mode_matrix


def kappa(basis, n, lam, R):
    try:
        return cond2_normalized(mode_matrix(basis, n, lam, R).scaled)
    except InfiniteConditionError:
        return float("inf")


R = 0.5
print("interior, R = %g, lam -> 0" % R)
print("%8s %4s %12s %12s" % ("log2 lam", "n", "naive", "stable"))
for j in (0, -4, -8, -12, -16, -20, -24):
    lam = 2.0 ** j
    for n in (1, 2, 49):
        print("%8d %4d %12.3e %12.3e" % (j, n, kappa(RadialBasis.INT_NAIVE, n, lam, R),
                                         kappa(RadialBasis.INT_STABLE, n, lam, R)))

# the exterior pair (r^-n, K_n) has the same defect, fixed by (Q_n, K_n)
print("\nexterior, R = %g, lam -> 0" % R)
for j in (0, -12, -24):
    lam = 2.0 ** j
    for n in (3, 49):
        print("%8d %4d %12.3e %12.3e" % (j, n, kappa(RadialBasis.EXT_NAIVE, n, lam, R),
                                         kappa(RadialBasis.EXT_STABLE, n, lam, R)))
