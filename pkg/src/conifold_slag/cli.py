"""Command line front end: verify | leaf | eval | cone.

Exit codes: 0 success, 1 failed checks / infeasible input / off-variety
point, 2 configuration error. Output files are written atomically.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.spatial import ConvexHull

from . import suites as suites_mod
from .ambient import lift_to_resolved, quadric, to_xyuv, to_z
from .cy_structure import FlatC3, ResolvedConifold, f_double_prime, f_prime, monge_ampere_ratio, solve_gamma
from .errors import ConifoldError
from .moment_maps import so3_moment, t2_moment
from .slag_families import (
    Branch,
    HLSO3Flat,
    HLTorusFlat,
    LeafSpec,
    SO3Leaf,
    T2Leaf,
    hl_flat_so3,
    hl_flat_torus,
    so3_leaf_sample,
    t2_leaf_sample,
)
from .verify import Tolerances, run_report

SUITE_NAMES = ("structure", "moments", "t2", "so3", "flat", "asymptotics", "controls")
THREADS_ENV = "CONIFOLD_SLAG_THREADS"


class ConfigError(Exception):
    pass


# -- parsing helpers -------------------------------------------------------------


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse numbers from {text!r}") from exc
    if n is not None and len(vals) != n:
        raise ConfigError(f"expected {n} comma-separated values, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError("values must be finite")
    return vals


def _complexes(text: str, n: int) -> np.ndarray:
    try:
        vals = [complex(t.strip().replace("i", "j")) for t in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex numbers from {text!r}") from exc
    if len(vals) != n:
        raise ConfigError(f"expected {n} comma-separated values, got {len(vals)}")
    arr = np.array(vals)
    if not np.all(np.isfinite(arr)):
        raise ConfigError("values must be finite")
    return arr


def _ints(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse integers from {text!r}") from exc
    if any(v < 1 for v in vals):
        raise ConfigError("grid sizes must be positive")
    return vals


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer") from exc
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer")
    return n


def _check_a(a: float) -> float:
    if not (math.isfinite(a) and a >= 0):
        raise ConfigError("--a must be a finite non-negative number")
    return a


def _fmt(x: float) -> str:
    """Full-precision float text (17 significant digits)."""
    return format(float(x), ".17g")


def write_atomic(path: str, text: str) -> None:
    """Write to a temporary file next to `path`, then rename over it."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


# -- verify ---------------------------------------------------------------------


def cmd_verify(args) -> int:
    a = _check_a(args.a)
    names = SUITE_NAMES if args.suite == "all" else (args.suite,)
    tol = Tolerances(lagrangian=args.tol, special=args.tol) if args.tol else None
    custom_c = [args.c1, args.c2, args.c3]
    jobs = []
    for name in names:
        kw = {}
        if name == "t2":
            if any(v is not None for v in custom_c):
                if any(v is None for v in custom_c):
                    raise ConfigError("--c1, --c2 and --c3 must be given together")
                kw["specs"] = [LeafSpec(T2Leaf(*custom_c), a)]
            if tol:
                kw["tol"] = tol
        elif name == "so3":
            if args.c is not None:
                kw["cs"] = tuple(_floats(args.c))
            if tol:
                kw["tol"] = tol
        elif name == "flat":
            if args.perturb:
                kw["perturb"] = args.perturb
        jobs.append((name, kw))
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda job: suites_mod.run_suite(job[0], a, args.seed, **job[1]), jobs))
    passed = all(r.passed for r in results)
    report = {"config": {"suite": args.suite, "a": a, "seed": args.seed, "tol": args.tol, "perturb": args.perturb},
              "passed": passed, "suites": [r.to_dict() for r in results]}
    if args.out:
        write_atomic(args.out, _json(report))
    if args.format == "json" and not args.out:
        sys.stdout.write(_json(report))
    else:
        for r in results:
            print(f"== {r.name}: {'PASS' if r.passed else 'FAIL'}")
            for line in r.lines():
                print("  " + line)
        print("ALL PASS" if passed else "FAILED")
    return 0 if passed else 1


# -- leaf -----------------------------------------------------------------------


def _leaf_specs(args) -> list[LeafSpec]:
    a = _check_a(args.a)
    fam = args.family
    if fam in ("t2", "hl-torus"):
        if args.c is not None:
            c = _floats(args.c, 3)
        elif all(v is not None for v in (args.c1, args.c2, args.c3)):
            c = [args.c1, args.c2, args.c3]
        else:
            raise ConfigError("torus families need --c c1,c2,c3 or --c1/--c2/--c3")
        return [LeafSpec(T2Leaf(*c) if fam == "t2" else HLTorusFlat(*c), a)]
    if args.c is None:
        raise ConfigError("--c is required")
    c = _floats(args.c, 1)[0]
    if fam == "hl-so3":
        return [LeafSpec(HLSO3Flat(c), a)]
    branches = list(Branch) if args.branch == "both" else [Branch(args.branch)]
    return [LeafSpec(SO3Leaf(c, b), a) for b in branches]


def sample_leaf(spec: LeafSpec, grid):
    fam = spec.family
    if isinstance(fam, T2Leaf):
        g = list(grid) + [4, 4, 9][len(grid):]
        s = ResolvedConifold(spec.a)
        return s, t2_leaf_sample(s, spec, g[0], g[1], g[2], (-2.0, 2.0))
    if isinstance(fam, SO3Leaf):
        g = list(grid) + [9, 24][len(grid):]
        return ResolvedConifold(spec.a), so3_leaf_sample(ResolvedConifold(spec.a), spec, g[0], g[1])
    if isinstance(fam, HLSO3Flat):
        g = list(grid) + [9, 24][len(grid):]
        return FlatC3(), hl_flat_so3(fam.c, (g[0], g[1]))
    g = list(grid) + [4, 4, 9][len(grid):]
    return FlatC3(), hl_flat_torus(fam.c1, fam.c2, fam.c3, (g[0], g[1], g[2]))


def _coords(p, flat: bool):
    if flat:
        return list(p.z)
    lam = p.lam
    lp = lam[1] / lam[0] if lam[0] != 0 else complex(math.inf, 0.0)
    return list(p.xyuv) + [lp]


def leaf_csv(spec: LeafSpec, sample, report) -> str:
    flat = spec.is_flat
    names = ["z1", "z2", "z3"] if flat else ["X", "Y", "U", "V", "lam+"]
    cols = [f"{part}{n}" for n in names for part in ("Re", "Im")]
    cols += ["rsq", "leafResidual", "lagrangianResidual", "specialResidual", "calibrationRatio"]
    lines = [f"# leaf {json.dumps(spec.as_dict(), sort_keys=True)}; chart coordinates are dimensionless, "
             f"rsq = sum of squared moduli; residuals are scale-free; empty cells mark degenerate frames",
             ",".join(cols)]
    for p, row in zip(sample.points, report.rows):
        vals = []
        for z in _coords(p, flat):
            vals += [_fmt(z.real), _fmt(z.imag)]
        rsq = float(np.vdot(p.z, p.z).real) if flat else p.rsq
        vals.append(_fmt(rsq))
        for key in ("leafResidual", "lagrangianResidual", "specialResidual", "calibrationRatio"):
            vals.append("" if row[key] is None else _fmt(row[key]))
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


def leaf_obj(spec: LeafSpec, sample) -> str:
    """Torus families: the (theta1, theta2, t) chart, one quad sheet per t-level.
    SO(3) families: nested spheres, the orbit at level s drawn with radius 1 + (s - s_min).
    """
    params = sample.parameters
    verts, faces = [], []
    fam = spec.family
    if isinstance(fam, (T2Leaf, HLTorusFlat)):
        verts = [tuple(r) for r in params]
        index = {tuple(r): k for k, r in enumerate(params)}
        th1 = sorted(set(params[:, 0]))
        th2 = sorted(set(params[:, 1]))
        for t in sorted(set(params[:, 2])):
            for i in range(len(th1) - 1):
                for j in range(len(th2) - 1):
                    quad = [(th1[i], th2[j], t), (th1[i + 1], th2[j], t), (th1[i + 1], th2[j + 1], t), (th1[i], th2[j + 1], t)]
                    if all(q in index for q in quad):
                        k = [index[q] for q in quad]
                        faces += [(k[0], k[1], k[2]), (k[0], k[2], k[3])]
    else:
        s_vals = params[:, 0]
        s_min = s_vals.min()
        verts = [tuple((1.0 + s - s_min) * r[1:]) for s, r in zip(s_vals, params)]
        for s in sorted(set(s_vals)):
            idx = np.flatnonzero(s_vals == s)
            if len(idx) < 4:
                continue
            hull = ConvexHull(params[idx, 1:])
            faces += [tuple(idx[f]) for f in hull.simplices]
    lines = [f"# leaf {json.dumps(spec.as_dict(), sort_keys=True)}"]
    lines += ["v " + " ".join(_fmt(c) for c in v) for v in verts]
    lines += ["f " + " ".join(str(i + 1) for i in f) for f in faces]
    return "\n".join(lines) + "\n"


def _branch_path(out: str, spec: LeafSpec, multiple: bool) -> str:
    if not multiple:
        return out
    root, ext = os.path.splitext(out)
    return f"{root}_{spec.family.branch.value}{ext}"


def cmd_leaf(args) -> int:
    specs = _leaf_specs(args)
    grid = _ints(args.grid) if args.grid else []
    fmt = args.format or "csv"
    outputs = []
    for spec in specs:
        try:
            s, sample = sample_leaf(spec, grid)
        except ConifoldError as exc:
            print(f"error: leaf {spec.as_dict()} could not be sampled: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 1
        report = run_report(s, sample, seed=args.seed)
        if fmt == "csv":
            text = leaf_csv(spec, sample, report)
        elif fmt == "obj":
            text = leaf_obj(spec, sample)
        else:
            text = report.to_json() + "\n"
        outputs.append((spec, text))
    for spec, text in outputs:
        if args.out:
            write_atomic(_branch_path(args.out, spec, len(outputs) > 1), text)
        else:
            sys.stdout.write(text)
    return 0


# -- eval -----------------------------------------------------------------------


def cmd_eval(args) -> int:
    a = _check_a(args.a)
    if (args.z is None) == (args.xyuv is None):
        raise ConfigError("give exactly one of --z or --xyuv")
    w = to_xyuv(_complexes(args.z, 4)) if args.z is not None else _complexes(args.xyuv, 4)
    z = to_z(w)
    rsq = float(np.vdot(w, w).real)
    q = abs(quadric(w))
    on_variety = q <= args.tol * max(rsq, 1.0)
    out = {"xyuv": [[_fmt(c.real), _fmt(c.imag)] for c in w], "z": [[_fmt(c.real), _fmt(c.imag)] for c in z],
           "quadric_residual": q, "on_variety": bool(on_variety), "rsq": rsq, "a": a}
    if not on_variety:
        _emit(_json(out), args.out)
        print("error: point is not on XY - UV = 0", file=sys.stderr)
        return 1
    s = ResolvedConifold(a)
    try:
        p = lift_to_resolved(w, tol=args.tol)
        gam = solve_gamma(rsq, a)
        out.update(
            gamma=gam.gamma, gamma_prime=gam.gamma_prime, F_prime=f_prime(rsq, a), F_double_prime=f_double_prime(rsq, a),
            patch=p.patch.value, lam=[[_fmt(c.real), _fmt(c.imag)] for c in p.lam],
            local=[[_fmt(c.real), _fmt(c.imag)] for c in p.local],
            mu_T2=t2_moment(s, p).components.tolist(), mu_SO3=so3_moment(s, p).components.tolist(),
            monge_ampere_ratio=None if p.is_bolt else monge_ampere_ratio(s, p),
        )
    except ConifoldError as exc:
        out["error"] = f"{type(exc).__name__}: {exc}"
        _emit(_json(out), args.out)
        return 1
    _emit(_json(out), args.out)
    return 0


# -- cone -----------------------------------------------------------------------


def cmd_cone(args) -> int:
    a = _check_a(args.a)
    radii = _floats(args.r) if args.r else [10.0, 100.0, 1000.0]
    if any(r <= 0 for r in radii):
        raise ConfigError("radii must be positive")
    if args.family == "t2":
        if args.c is not None:
            c = _floats(args.c, 3)
        elif all(v is not None for v in (args.c1, args.c2, args.c3)):
            c = [args.c1, args.c2, args.c3]
        else:
            raise ConfigError("t2 needs --c c1,c2,c3 or --c1/--c2/--c3")
        try:
            res = suites_mod.t2_cone_table(ResolvedConifold(a), c, radii)
        except ConifoldError as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 1
        expected = [None] * len(radii)
    else:
        if args.c is None:
            raise ConfigError("--c is required")
        c = _floats(args.c, 1)[0]
        branch = Branch.MINUS if args.branch == "minus" else Branch.PLUS
        res = suites_mod.so3_cone_table(c, radii, branch)
        expected = [abs(c) / r**2 for r in radii]
    decreasing = bool(np.all(np.diff(res) < 0))
    lines = [f"# cone residual along the {args.family} leaf c={c} a={a}; strictly_decreasing={str(decreasing).lower()}",
             "r,rsq,coneResidual,expected"]
    for r, v, e in zip(radii, res, expected):
        lines.append(",".join([_fmt(r), _fmt(r * r), _fmt(v), "" if e is None else _fmt(e)]))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conifold-slag", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_choices=("csv", "obj", "json")):
        p.add_argument("--a", type=float, default=1.0, help="resolution parameter a >= 0 (default 1)")
        p.add_argument("--seed", type=int, default=0, help="RNG seed for all randomised choices")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=fmt_choices)

    v = sub.add_parser("verify", help="run verification suites")
    common(v, ("json", "text"))
    v.add_argument("--suite", choices=("all",) + SUITE_NAMES, default="all")
    v.add_argument("--c1", type=float)
    v.add_argument("--c2", type=float)
    v.add_argument("--c3", type=float)
    v.add_argument("--c", help="comma-separated SO(3) constants for the so3 suite")
    v.add_argument("--tol", type=float, help="Lagrangian/special tolerance override")
    v.add_argument("--perturb", type=float, default=0.0, help="negative control: push flat samples off their leaves")
    v.set_defaults(func=cmd_verify)

    lf = sub.add_parser("leaf", help="sample a leaf and export CSV/OBJ/JSON")
    common(lf)
    lf.add_argument("family", choices=("t2", "so3", "hl-so3", "hl-torus"))
    lf.add_argument("--c", help="constants: c1,c2,c3 for torus families, c for SO(3) families")
    lf.add_argument("--c1", type=float)
    lf.add_argument("--c2", type=float)
    lf.add_argument("--c3", type=float)
    lf.add_argument("--branch", choices=("plus", "minus", "both"), default="both")
    lf.add_argument("--grid", help="grid sizes, e.g. 4,4,9 (torus) or 9,24 (SO(3))")
    lf.set_defaults(func=cmd_leaf)

    ev = sub.add_parser("eval", help="evaluate the structure at a point")
    common(ev, ("json",))
    ev.add_argument("--z", help="four complex numbers z0..z3")
    ev.add_argument("--xyuv", help="four complex numbers X,Y,U,V")
    ev.add_argument("--tol", type=float, default=1e-9, help="relative on-variety tolerance")
    ev.set_defaults(func=cmd_eval)

    co = sub.add_parser("cone", help="cone residual along a leaf at given radii")
    common(co, ("csv",))
    co.add_argument("family", choices=("t2", "so3"))
    co.add_argument("--c")
    co.add_argument("--c1", type=float)
    co.add_argument("--c2", type=float)
    co.add_argument("--c3", type=float)
    co.add_argument("--branch", choices=("plus", "minus"), default="plus")
    co.add_argument("--r", help="comma-separated radii (default 10,100,1000)")
    co.set_defaults(func=cmd_cone)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
