"""Command-line harness: conditioning and accuracy sweeps, translation checks, disk solves."""
import argparse
import csv
import io
import math
import sys

import numpy as np

from .disk_solver import DiskProblem, eval_disk_solution, solve_dirichlet
from .experiments import (COND_COLUMNS, ERROR_COLUMNS, EXACT_DIFFERENCE, TRANSLATION_COLUMNS,
                          SweepConfig, cond_sweep, error_sweep)
from .stable_basis import RadialBasis
from .verification import translation_check


class BoundaryFileError(ValueError):
    pass


def fmt(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.16e" % v
    return str(v)


def write_csv(rows, columns, out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    text = buf.getvalue()
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as f:
            f.write(text)


def read_boundary_file(path):
    """Parse ``side lambda radius N`` then M = 2N+2 lines of ``f g``."""
    with open(path) as f:
        lines = [(k + 1, ln.split()) for k, ln in enumerate(f)]
    lines = [(k, t) for k, t in lines if t and not t[0].startswith("#")]
    if not lines:
        raise BoundaryFileError("line 1: empty file, expected 'side lambda radius N'")
    k, head = lines[0]
    if len(head) != 4:
        raise BoundaryFileError("line %d: expected 'side lambda radius N'" % k)
    side = head[0]
    if side not in ("interior", "exterior"):
        raise BoundaryFileError("line %d: side must be 'interior' or 'exterior'" % k)
    try:
        lam, radius, n = float(head[1]), float(head[2]), int(head[3])
    except ValueError:
        raise BoundaryFileError("line %d: could not parse lambda, radius, N" % k)
    if not (lam > 0 and radius > 0 and n >= 1):
        raise BoundaryFileError("line %d: need lambda > 0, radius > 0, N >= 1" % k)
    body = lines[1:]
    m = 2 * n + 2
    if len(body) != m:
        raise BoundaryFileError("line %d: found %d samples but M = 2N+2 = %d are required"
                                % ((body[-1][0] if body else k), len(body), m))
    f = np.empty(m)
    g = np.empty(m)
    for i, (k, t) in enumerate(body):
        if len(t) != 2:
            raise BoundaryFileError("line %d: expected two numbers 'f g'" % k)
        try:
            f[i], g[i] = float(t[0]), float(t[1])
        except ValueError:
            raise BoundaryFileError("line %d: could not parse 'f g'" % k)
    return DiskProblem(side, lam, radius, n, f, g)


def _config(args, side_default="interior"):
    bases = args.bases.split(",") if args.bases else None
    return SweepConfig(sweep_axis=args.axis, fixed_value=args.fixed, j_min=args.jmin,
                       j_max=args.jmax, draws_per_octave=args.draws, n_modes=args.modes,
                       seed=args.seed, side=args.side or side_default, bases=bases)


def cmd_cond_sweep(args):
    write_csv(cond_sweep(_config(args)), COND_COLUMNS, args.out)


def cmd_error_sweep(args):
    cfg = _config(args)
    if not args.bases:
        cfg.bases = cfg.bases + [EXACT_DIFFERENCE]
    write_csv(error_sweep(cfg, jobs=args.jobs), ERROR_COLUMNS, args.out)


def cmd_translation_check(args):
    p_list = [int(p) for p in args.p.split(",")]
    if min(p_list) < 4:
        raise SystemExit("p must be at least 4")
    rows = translation_check(p_list, seed=args.seed, ratio=args.ratio)
    write_csv(rows, TRANSLATION_COLUMNS, args.out)


def cmd_solve(args):
    try:
        prob = read_boundary_file(args.input)
    except BoundaryFileError as e:
        raise SystemExit("%s: %s" % (args.input, e))
    if args.side and args.side != prob.side:
        raise SystemExit("--side %s does not match the file's side %s" % (args.side, prob.side))
    if args.bases:
        basis = RadialBasis(args.bases.split(",")[0])
    else:
        basis = RadialBasis.INT_STABLE if prob.side == "interior" else RadialBasis.EXT_STABLE
    try:
        sol = solve_dirichlet(prob, basis)
    except ValueError as e:
        raise SystemExit(str(e))
    rows = [[int(n), a.real, a.imag, b.real, b.imag, c]
            for n, a, b, c in zip(sol.modes, sol.alphas, sol.betas, sol.cond)]
    write_csv(rows, ["n", "alpha_re", "alpha_im", "beta_re", "beta_im", "cond"], args.out)
    if args.targets:
        pts = np.loadtxt(args.targets, ndmin=2)
        fs = eval_disk_solution(sol, pts)
        rows = [list(p) + [v] + list(g) + list(h)
                for p, v, g, h in zip(pts, fs.value, fs.gradient, fs.hessian)]
        write_csv(rows, ["x", "y", "u", "u_x", "u_y", "u_xx", "u_xy", "u_yy"], args.eval_out)


def build_parser():
    ap = argparse.ArgumentParser(prog="modbh", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def sweep_flags(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--side", choices=["interior", "exterior"], default="interior")
        p.add_argument("--axis", choices=["lambda", "radius"], default="radius")
        p.add_argument("--fixed", type=float, default=0.5, help="value of the other parameter")
        p.add_argument("--jmin", type=int, default=-24)
        p.add_argument("--jmax", type=int, default=8)
        p.add_argument("--draws", type=int, default=10, help="draws per octave")
        p.add_argument("--modes", type=int, default=49, help="N; modes run -N..N+1")
        p.add_argument("--bases", default=None, help="comma-separated basis names")
        p.add_argument("--out", default="-")

    p = sub.add_parser("cond-sweep", help="normalized condition numbers of the mode matrices")
    sweep_flags(p)
    p.set_defaults(func=cmd_cond_sweep)

    p = sub.add_parser("error-sweep", help="known-solution errors E_u, E_g, E_h")
    sweep_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_error_sweep)

    p = sub.add_parser("translation-check", help="translation operators against direct sums")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", default="10,20,40", help="comma-separated expansion orders")
    p.add_argument("--ratio", type=float, default=3.0, help="separation ratio")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_translation_check)

    p = sub.add_parser("solve", help="solve a disk problem from a boundary-data file")
    p.add_argument("input")
    p.add_argument("--side", choices=["interior", "exterior"], default=None)
    p.add_argument("--bases", default=None, help="basis name (default: the stable basis)")
    p.add_argument("--out", default="-", help="coefficient CSV")
    p.add_argument("--targets", default=None, help="file of 'x y' lines to evaluate at")
    p.add_argument("--eval-out", default="-", help="CSV for target evaluations")
    p.set_defaults(func=cmd_solve)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
