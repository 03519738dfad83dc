"""Conditioning and accuracy sweeps over lam*R, and the translation-operator check.

Random numbers come from Philox streams keyed by (seed, octave, draw, role),
so the geometry of a draw does not depend on which bases are run or in
what order.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .disk_solver import (DiskProblem, boundary_nodes, error_measures, eval_disk_solution,
                          radial_derivative, solve_dirichlet)
from .greens import SourceArrays, exact_difference, split_field, synth_field
from .smallmatrix import InfiniteConditionError, cond2_normalized
from .stable_basis import RadialBasis, mode_matrix

EXACT_DIFFERENCE = "exact-difference"
ROLE_VALUE, ROLE_SOURCES, ROLE_TARGETS = 0, 1, 2
_OCTAVE_OFFSET = 1 << 16

COND_COLUMNS = ["sweep_axis", "n", "lambda", "radius", "lambda_times_radius", "basis",
                "cond_normalized"]
ERROR_COLUMNS = ["sweep_axis", "lambda", "radius", "lambda_times_radius", "basis", "e_u", "e_g",
                 "e_h"]
TRANSLATION_COLUMNS = ["operator_name", "p", "separation_ratio", "max_rel_err_value",
                       "max_rel_err_gradient"]


def default_bases(side):
    if side == "interior":
        return [RadialBasis.INT_NAIVE.value, RadialBasis.INT_STABLE.value]
    return [RadialBasis.EXT_NAIVE.value, RadialBasis.EXT_STABLE.value]


@dataclass
class SweepConfig:
    sweep_axis: str = "radius"
    fixed_value: float = 0.5
    j_min: int = -24
    j_max: int = 8
    draws_per_octave: int = 10
    n_modes: int = 49
    n_sources: int = 100
    n_targets: int = 100
    seed: int = 0
    side: str = "interior"
    bases: list = None
    orders: tuple = (0, 1, 2, 49)

    def __post_init__(self):
        if self.sweep_axis not in ("lambda", "radius"):
            raise ValueError("sweep axis must be 'lambda' or 'radius'")
        if self.side not in ("interior", "exterior"):
            raise ValueError("side must be 'interior' or 'exterior'")
        if self.j_min > self.j_max:
            raise ValueError("j_min must not exceed j_max")
        if min(self.draws_per_octave, self.n_modes, self.n_sources, self.n_targets) < 1:
            raise ValueError("counts must be at least 1")
        if not self.fixed_value > 0:
            raise ValueError("fixed value must be positive")
        if self.bases is None:
            self.bases = default_bases(self.side)


def stream(seed, j, draw, role):
    ss = np.random.SeedSequence(seed, spawn_key=(j + _OCTAVE_OFFSET, draw, role))
    return np.random.Generator(np.random.Philox(ss))


def sweep_points(cfg):
    """(j, draw, lambda, radius) for every sweep point, in output order."""
    out = []
    for j in range(cfg.j_min, cfg.j_max + 1):
        for k in range(cfg.draws_per_octave):
            v = stream(cfg.seed, j, k, ROLE_VALUE).uniform(2.0 ** j, 2.0 ** (j + 1))
            lam, rad = (v, cfg.fixed_value) if cfg.sweep_axis == "lambda" else (cfg.fixed_value, v)
            out.append((j, k, lam, rad))
    return out


def cond_sweep(cfg):
    rows = []
    for j, k, lam, rad in sweep_points(cfg):
        for n in cfg.orders:
            for b in cfg.bases:
                mm = mode_matrix(RadialBasis(b), n, lam, rad)
                try:
                    kappa = cond2_normalized(mm.scaled)
                except InfiniteConditionError:
                    kappa = math.inf
                rows.append([cfg.sweep_axis, n, lam, rad, lam * rad, b, kappa])
    return rows


def _rejection(rng, n, half_width, keep):
    pts = []
    while len(pts) < n:
        cand = rng.uniform(-half_width, half_width, size=(2 * n, 2))
        pts.extend(c for c in cand[keep(np.hypot(cand[:, 0], cand[:, 1]))])
    return np.array(pts[:n])


def random_sources(rng, locations):
    n = len(locations)
    c = rng.uniform(-1.0, 1.0, n)
    d = rng.uniform(0.0, 1.0, n)
    q = rng.uniform(0.0, 1.0, n)
    v = rng.uniform(-0.5, 0.5, size=(3, n, 2))
    v /= np.hypot(v[..., 0], v[..., 1])[..., None]
    return SourceArrays(np.asarray(locations, dtype=float), c, d, v[0], q, v[1], v[2])


def sample_geometry(cfg, j, k, radius):
    """(sources, targets) for one draw of the known-solution experiment."""
    rs = stream(cfg.seed, j, k, ROLE_SOURCES)
    rt = stream(cfg.seed, j, k, ROLE_TARGETS)
    R = radius
    if cfg.side == "interior":
        loc = _rejection(rs, cfg.n_sources, 2 * R, lambda r: r > 2 * R)
        tgt = _rejection(rt, cfg.n_targets, R, lambda r: r < R)
    else:
        loc = _rejection(rs, cfg.n_sources, R / 2, lambda r: r < R / 2)
        tgt = _rejection(rt, cfg.n_targets, 2 * R, lambda r: r > R)
    return random_sources(rs, loc), tgt


def error_point(cfg, j, k, lam, rad):
    """Error rows for every requested basis at one sweep point."""
    src, tgt = sample_geometry(cfg, j, k, rad)
    nodes = boundary_nodes(cfg.n_modes, rad)
    bd = synth_field(src, lam, nodes)
    exact = synth_field(src, lam, tgt)
    prob = DiskProblem(cfg.side, lam, rad, cfg.n_modes, bd.value, radial_derivative(bd, nodes))
    rows = []
    for b in cfg.bases:
        try:
            if b == EXACT_DIFFERENCE:
                rep = error_measures(exact, exact_difference(src, lam, tgt))
            else:
                sol = solve_dirichlet(prob, RadialBasis(b))
                rep = error_measures(exact, eval_disk_solution(sol, tgt))
            errs = [rep.E_u, rep.E_g, rep.E_h]
        except (ArithmeticError, ValueError):
            errs = [math.nan] * 3
        rows.append([cfg.sweep_axis, lam, rad, lam * rad, b] + errs)
    return rows


def error_sweep(cfg, jobs=1):
    pts = sweep_points(cfg)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_error_point_args, [(cfg,) + p for p in pts]))
    else:
        parts = [error_point(cfg, *p) for p in pts]
    return [row for part in parts for row in part]


def _error_point_args(args):
    return error_point(*args)
