"""
Multipole-to-local translation at small lam
===========================================

The kernel K_0(lam r) + log r can be expanded in two ways.  The split
approach keeps a Laplace expansion of the log and a Helmholtz expansion of
K_0 and adds the two fields at the end.  At small lam*rho the two fields are
large and nearly opposite, so the sum loses digits.  The combined (Q, K)
multipole and (P, power) local expansions carry the difference exactly.
"""
import numpy as np

from modbh.experiments import random_sources
from modbh.expansions import mbh_eval_local, mbh_m2l, mbh_source_to_multipole
from modbh.expansions.split import split_eval, split_m2l, split_source_to_multipole
from modbh.greens import synth_field
from modbh.verification import rel_errors

rng = np.random.default_rng(0)
R, p = 1.0 / 6, 40
a, r = rng.uniform(0, 2 * np.pi, (2, 30)), R * np.sqrt(rng.uniform(0, 1, (2, 30)))
src_pts = np.stack([r[0] * np.cos(a[0]), r[0] * np.sin(a[0])], -1)
center = np.array([1.0, 0.0])
tgt = center + np.stack([r[1] * np.cos(a[1]), r[1] * np.sin(a[1])], -1)
src = random_sources(rng, src_pts)

print("%10s %12s %12s" % ("lam*rho0", "combined", "split"))
for lam in (1.0, 1e-2, 1e-4, 1e-6, 1e-8):
    ref = synth_field(src, lam, tgt)
    mp = mbh_source_to_multipole(src, (0, 0), lam, p, radius=R)
    good = mbh_eval_local(mbh_m2l(mp, center), tgt)
    naive = split_eval(split_m2l(split_source_to_multipole(src, (0, 0), lam, p), center), tgt)
    print("%10.0e %12.3e %12.3e" % (lam, rel_errors(ref, good)[0], rel_errors(ref, naive)[0]))
