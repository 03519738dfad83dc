"""
Solving on a shrinking disk
===========================

A known field is generated by 100 random charges, dipoles and quadrupoles
outside the disk of radius 2R.  Its boundary values and radial derivative on
the circle of radius R are handed to the solver, and the reconstruction is
compared with the field at 100 interior points.  The naive basis loses digits
as lam*R -> 0; the stable basis does not.  Forming the field directly as the
difference of its Helmholtz and Laplace parts loses the same digits as the
naive basis.
"""
from modbh.experiments import EXACT_DIFFERENCE, SweepConfig, error_point

cfg = SweepConfig(sweep_axis="radius", fixed_value=0.5, seed=1)
cfg.bases = cfg.bases + [EXACT_DIFFERENCE]

print("%8s %12s %12s %12s %12s" % ("log2 R", "lam*R", "int-naive", "int-stable", "exact-diff"))
for j in (2, 0, -4, -8, -12, -16, -20, -24):
    R = 2.0 ** j
    rows = error_point(cfg, j, 0, 0.5, R)
    e = {r[4]: r[5] for r in rows}
    print("%8d %12.3e %12.3e %12.3e %12.3e" % (j, 0.5 * R, e["int-naive"], e["int-stable"],
                                               e[EXACT_DIFFERENCE]))
