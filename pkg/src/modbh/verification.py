"""Accuracy of the nine translation operators against direct summation.

Geometry (R = source radius, s = separation ratio):

* M2M: sources within R of c0, shifted by R/2; targets at distance
  s (R + R/2) .. 1.5 s (R + R/2) from the new center.
* M2L: target disk of radius R centered 2 s R away from c0.
* L2L: child disk of radius R/2 centered R/2 from the parent center.  L2L
  errors are measured against the parent local expansion, since that is
  what the operator has to reproduce.

A fifth of the sources and targets sit on the rims of their disks.
Errors are max-norm errors divided by the max-norm of the reference.
"""
import numpy as np

from .expansions import (laplace_l2l, laplace_m2l, laplace_m2m, laplace_source_to_multipole,
                         mbh_eval_local, mbh_eval_multipole, mbh_l2l, mbh_m2l, mbh_m2m,
                         mbh_source_to_multipole, mh_eval, mh_l2l, mh_m2l, mh_m2m,
                         mh_source_to_multipole, potential_field)
from .experiments import random_sources
from .greens import split_field, synth_field

OPERATORS = ["laplace_m2m", "laplace_m2l", "laplace_l2l", "mh_m2m", "mh_m2l", "mh_l2l",
             "mbh_m2m", "mbh_m2l", "mbh_l2l"]


class DirectLaplace:
    """Direct sum of q log(z-s) + mu/(z-s) + nu/(z-s)^2, with the expansion interface."""

    def __init__(self, pos, q, mu, nu):
        self.pos, self.q, self.mu, self.nu = pos, q, mu, nu

    def potential(self, z, order=0):
        w = np.asarray(z, dtype=complex)[..., None] - self.pos
        if order == 0:
            t = self.q * np.log(w) + self.mu / w + self.nu / w ** 2
        elif order == 1:
            t = self.q / w - self.mu / w ** 2 - 2 * self.nu / w ** 3
        else:
            t = -self.q / w ** 2 + 2 * self.mu / w ** 3 + 6 * self.nu / w ** 4
        return t.sum(axis=-1)


def _disk(rng, n, center, radius):
    # a fifth of the points on the rim, where truncation errors are largest
    a = rng.uniform(0, 2 * np.pi, n)
    r = radius * np.sqrt(rng.uniform(0, 1, n))
    r[: n // 5] = radius
    return np.asarray(center) + np.stack([r * np.cos(a), r * np.sin(a)], axis=-1)


def _annulus(rng, n, center, r0, r1):
    a = rng.uniform(0, 2 * np.pi, n)
    r = rng.uniform(r0, r1, n)
    return np.asarray(center) + np.stack([r * np.cos(a), r * np.sin(a)], axis=-1)


def rel_errors(ref, approx):
    ev = np.max(np.abs(approx.value - ref.value)) / np.max(np.abs(ref.value))
    eg = (np.max(np.hypot(*(approx.gradient - ref.gradient).T))
          / np.max(np.hypot(*ref.gradient.T)))
    return float(ev), float(eg)


def check_operator(name, p, ratio=3.0, seed=0, lam=1.0, n_sources=20, n_targets=50):
    """(max relative value error, max relative gradient error) for one operator."""
    rng = np.random.default_rng([seed, OPERATORS.index(name), p])
    R = 0.25
    c0 = np.array([0.1, -0.2])
    loc = _disk(rng, n_sources, c0, R)
    family, op = name.split("_")
    src = random_sources(rng, loc)
    if op == "m2m":
        c1 = c0 + R / 2 * np.array([np.cos(1.0), np.sin(1.0)])
        rr = R + R / 2
        tgt = _annulus(rng, n_targets, c1, ratio * rr, 1.5 * ratio * rr)
    else:
        ct = c0 + 2 * ratio * R * np.array([np.cos(2.0), np.sin(2.0)])
        tgt = _disk(rng, n_targets, ct, R)
        if op == "l2l":
            cc = ct + R / 2 * np.array([np.cos(0.5), np.sin(0.5)])
            tgt = _disk(rng, n_targets, cc, R / 2)

    if family == "laplace":
        z = loc[:, 0] + 1j * loc[:, 1]
        q = src.c
        mu = src.d * (src.v1[:, 0] + 1j * src.v1[:, 1])
        nu = src.q * (src.v2[:, 0] + 1j * src.v2[:, 1])
        mp = laplace_source_to_multipole(z, complex(*c0), p, q, mu, nu, radius=R)
        ref = potential_field(DirectLaplace(z, q, mu, nu), tgt)
        if op == "m2m":
            out = potential_field(laplace_m2m(mp, complex(*c1)), tgt)
        else:
            loc_exp = laplace_m2l(mp, complex(*ct))
            out = potential_field(loc_exp, tgt)
            if op == "l2l":
                ref = out
                out = potential_field(laplace_l2l(loc_exp, complex(*cc)), tgt)
    elif family == "mh":
        mp = mh_source_to_multipole(src, c0, lam, p)
        ref = split_field(src, lam, tgt)[1]
        if op == "m2m":
            out = mh_eval(mh_m2m(mp, c1), tgt)
        else:
            loc_exp = mh_m2l(mp, ct)
            out = mh_eval(loc_exp, tgt)
            if op == "l2l":
                ref = out
                out = mh_eval(mh_l2l(loc_exp, cc), tgt)
    else:
        mp = mbh_source_to_multipole(src, c0, lam, p, radius=R)
        ref = synth_field(src, lam, tgt)
        if op == "m2m":
            out = mbh_eval_multipole(mbh_m2m(mp, c1), tgt)
        else:
            loc_exp = mbh_m2l(mp, ct)
            out = mbh_eval_local(loc_exp, tgt)
            if op == "l2l":
                ref = out
                out = mbh_eval_local(mbh_l2l(loc_exp, cc), tgt)
    return rel_errors(ref, out)


def translation_check(p_list, seed=0, ratio=3.0, operators=OPERATORS):
    rows = []
    for name in operators:
        for p in p_list:
            ev, eg = check_operator(name, p, ratio, seed)
            rows.append([name, p, ratio, ev, eg])
    return rows
