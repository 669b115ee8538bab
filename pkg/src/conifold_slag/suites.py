"""Verification suites with fixed quantitative gates.

Each suite returns a SuiteResult made of named checks. A check records the
measured value, its tolerance and the comparison used; informational checks
are reported but never gate the suite.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .ambient import (
    P,
    P_STAR,
    GENERATORS,
    Patch,
    ResolvedPoint,
    TangentFrame,
    TangentVector,
    conjugate_action,
    lift_to_resolved,
    quadric,
    random_so4,
    rotation_taking_e1_to,
    so3_element,
    to_xyuv,
    transition_vector,
)
from .cy_structure import (
    FlatC3,
    FlatPoint,
    ResolvedConifold,
    f_prime,
    gamma_closed_form,
    holomorphic_volume_eval,
    monge_ampere_ratio,
    solve_gamma,
)
from .moment_maps import hamiltonian_residual, so3_moment
from .slag_families import (
    Branch,
    LeafSpec,
    SO3Leaf,
    T2Leaf,
    cone_residual,
    fibonacci_sphere,
    foliation_singular_values,
    hl_flat_so3,
    hl_flat_torus,
    so3_branch_curve,
    so3_leaf_sample,
    t2_leaf_sample,
    t2_leaf_solve,
)
from .verify import (
    Form,
    Tolerances,
    calibration_ratio,
    invariance_residual,
    lagrangian_residual,
    perturb_sample,
    phase_rotated_frame,
    run_report,
    special_residual,
)

__all__ = ["Check", "SuiteResult", "SUITES", "run_suite", "random_point", "random_frame",
           "structure_suite", "moments_suite", "t2_suite", "so3_suite", "flat_suite",
           "asymptotics_suite", "controls_suite", "default_t2_specs"]


@dataclass
class Check:
    name: str
    value: float | None
    tol: float | None
    passed: bool
    criterion: int | None = None
    relation: str = "<"
    gating: bool = True
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if not self.gating:
            status = "INFO"
        crit = f"[{self.criterion}] " if self.criterion else ""
        val = "n/a" if self.value is None else f"{self.value:.3e}"
        tol = "" if self.tol is None else f" {self.relation} {self.tol:.1e}"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{status} {crit}{self.name}: {val}{tol}{extra}"


def _check(name, value, tol, criterion=None, relation="<", gating=True, detail=""):
    value = None if value is None else float(value)
    if value is None or not np.isfinite(value):
        ok = False
    elif relation == "<":
        ok = value < tol
    elif relation == "<=":
        ok = value <= tol
    elif relation == ">":
        ok = value > tol
    elif relation == ">=":
        ok = value >= tol
    else:
        raise ValueError(relation)
    return Check(name, value, tol, bool(ok), criterion, relation, gating, detail)


def _flag(name, ok, criterion=None, gating=True, detail=""):
    return Check(name, 1.0 if ok else 0.0, None, bool(ok), criterion, "", gating, detail)


@dataclass
class SuiteResult:
    name: str
    params: dict
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.gating)

    def to_dict(self) -> dict:
        return {"suite": self.name, "params": self.params, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks]}

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


# -- random inputs -------------------------------------------------------------------


def random_point(rng, scale: float = 1.0, patch: Patch | None = None) -> ResolvedPoint:
    patch = patch or (Patch.PLUS if rng.random() < 0.5 else Patch.MINUS)
    x = scale * (rng.normal(size=3) + 1j * rng.normal(size=3))
    return ResolvedPoint.from_local(patch, x)


def random_vector(rng, p) -> TangentVector:
    return TangentVector(p, rng.normal(size=3) + 1j * rng.normal(size=3))


def random_frame(rng, p) -> TangentFrame:
    return TangentFrame(p, *(random_vector(rng, p) for _ in range(3)))


# -- suites -------------------------------------------------------------------------


def structure_suite(a: float = 1.0, seed: int = 0) -> SuiteResult:
    """Criteria 1-3: coordinates, radial function, Ricci-flatness, SO(4)-invariance."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("structure", {"a": a, "seed": seed})
    ck = res.checks

    ck.append(_check("P P* = I", np.max(np.abs(P @ P_STAR - np.eye(4))), 1e-15, 1, "<="))
    ck.append(_check("|det P| = 1", abs(abs(np.linalg.det(P)) - 1.0), 1e-15, 1, "<="))
    z = rng.normal(size=(1000, 4)) + 1j * rng.normal(size=(1000, 4))
    e5 = e6 = 0.0
    for zz in z:
        w = to_xyuv(zz)
        e5 = max(e5, abs(np.sum(zz * zz) - 2 * quadric(w)))
        e6 = max(e6, abs(np.sum(abs(zz) ** 2) - np.sum(abs(w) ** 2)))
    ck.append(_check("sum z^2 = 2(XY-UV) on 1000 points", e5, 1e-13, 1))
    ck.append(_check("sum |z|^2 = |X|^2+|Y|^2+|U|^2+|V|^2 on 1000 points", e6, 1e-13, 1))

    rsq = np.logspace(-3, 4, 100)
    avals = np.linspace(0.0, 2.0, 100)
    R, A = np.meshgrid(rsq, avals)
    cubic = cf = 0.0
    complex_branch = 0
    for rr, aa in zip(R.ravel(), A.ravel()):
        g = solve_gamma(rr, aa).gamma
        cubic = max(cubic, abs(g**3 + 6 * aa * aa * g * g - rr * rr) / max(1.0, rr**4))
        complex_branch += rr * rr < 32 * aa**6
        cf = max(cf, abs(gamma_closed_form(rr, aa) - g) / max(1.0, g))
    ck.append(_check("gamma cubic residual / max(1, r^4), 10^4 grid", cubic, 1e-12, 1))
    ck.append(_check("closed-form gamma vs solver / max(1, gamma), 10^4 grid", cf, 1e-10, 1,
                     detail=f"{complex_branch} points with r^4 < 32a^6"))
    r0 = np.logspace(-3, 6, 200)
    ck.append(_check("F'_0 = r^(-2/3) relative error", np.max(np.abs(f_prime(r0, 0.0) / r0 ** (-1 / 3) - 1)), 1e-12, 1))

    for aa in (0.0, 0.5, 1.0, 2.0):
        s = ResolvedConifold(aa)
        ratios = []
        while len(ratios) < 200:
            p = random_point(rng)
            if aa == 0 and p.rsq <= 1e-2:
                continue
            ratios.append(monge_ampere_ratio(s, p))
        ratios = np.array(ratios)
        ck.append(_check(f"Monge-Ampere ratio rel. stddev, a={aa}", ratios.std() / ratios.mean(), 1e-8, 2,
                         detail=f"mean {ratios.mean():.15g}"))

    s = ResolvedConifold(a)
    pts = [random_point(rng) for _ in range(20)]
    frames = [random_frame(rng, p) for p in pts]
    elements = [conjugate_action(random_so4(rng)) for _ in range(20)]
    for form in Form:
        worst = max(invariance_residual(s, form, g, pts, frames) for g in elements)
        ck.append(_check(f"SO(4) invariance of {form.value} (20 g x 20 points)", worst, 1e-9, 3))
    worst = 0.0
    for p, f in zip(pts, frames):
        om = holomorphic_volume_eval(s, p, *f.vectors)
        vs = [transition_vector(v) for v in f.vectors]
        om2 = holomorphic_volume_eval(s, vs[0].base, *vs)
        worst = max(worst, abs(om - om2) / abs(om))
    ck.append(_check("Omega patch-overlap agreement (relative)", worst, 1e-10, 3))
    return res


def moments_suite(a: float = 1.0, seed: int = 0) -> SuiteResult:
    """Criterion 4: Hamiltonian identity for every generator, and mu on the SO(3)-orbit of (0, Y, 0, 0)."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("moments", {"a": a, "seed": seed})
    s = ResolvedConifold(a)
    worst = {name: 0.0 for name in GENERATORS}
    for _ in range(50):
        p = random_point(rng)
        if a == 0 and p.rsq < 1e-2:
            continue
        v = random_vector(rng, p)
        for name, g in GENERATORS.items():
            worst[name] = max(worst[name], hamiltonian_residual(s, g, p, v))
    for name, w in worst.items():
        res.checks.append(_check(f"Hamiltonian residual, generator {name} (50 points)", w, 1e-6, 4))
    for aa in dict.fromkeys((a, 0.0)):
        sa = ResolvedConifold(aa)
        res.checks.append(_check(f"|mu_SO3| on SO(3)-orbit of (0,Y,0,0), a={aa}", _orbit_moment(sa, rng), 1e-9, 4,
                                 gating=(aa == a)))
    return res


def _orbit_moment(s, rng) -> float:
    worst = 0.0
    normals = fibonacci_sphere(100)
    Y = complex(rng.normal(), rng.normal())
    p = lift_to_resolved(np.array([0, Y, 0, 0]))
    for n in normals:
        q = so3_element(rotation_taking_e1_to(n)).act(p)
        worst = max(worst, float(np.linalg.norm(so3_moment(s, q).components)))
    return worst


def default_t2_specs(a: float) -> list[LeafSpec]:
    a_bolt = a if a > 0 else 1.0
    return [
        LeafSpec(T2Leaf(0.3, 0.1, 0.2), a),
        LeafSpec(T2Leaf(0.0, 0.0, 0.0), 0.0),
        LeafSpec(T2Leaf(0.5 * a_bolt**2, 0.5 * a_bolt**2, 0.0), a_bolt),
        LeafSpec(T2Leaf(-0.4, 0.2, 0.1), a),
        LeafSpec(T2Leaf(1.0, -0.5, -0.3), a),
    ]


def _sample_checks(res, label, s, sample, criterion, tol: Tolerances, gating=True):
    rep = run_report(s, sample, tol)
    sm = rep.summary
    res.checks.append(_check(f"{label}: leaf equations", sm["leafResidual"]["max"], tol.leaf, criterion, "<=", gating))
    res.checks.append(_check(f"{label}: Lagrangian residual", sm["lagrangianResidual"]["max"], tol.lagrangian,
                             criterion, "<", gating, f"{rep.skipped} degenerate frames skipped"))
    res.checks.append(_check(f"{label}: special residual", sm["specialResidual"]["max"], tol.special, criterion, "<", gating))
    return rep


def t2_suite(a: float = 1.0, seed: int = 0, specs=None, tol: Tolerances | None = None) -> SuiteResult:
    """Criterion 5: T^2-invariant leaves and the foliation rank."""
    rng = np.random.default_rng(seed)
    tol = tol or Tolerances()
    specs = specs or default_t2_specs(a)
    res = SuiteResult("t2", {"a": a, "seed": seed, "specs": [sp.as_dict() for sp in specs]})
    for sp in specs:
        s = ResolvedConifold(sp.a)
        sample = t2_leaf_sample(s, sp, 4, 4, 9, (-2.0, 2.0))
        _sample_checks(res, f"T2 c={sp.family.c} a={sp.a}", s, sample, 5, tol)
    s = ResolvedConifold(a)
    n_ok = total = 0
    while total < 500:
        p = random_point(rng)
        if a == 0 and p.rsq < 1e-2:
            continue
        sv = foliation_singular_values(s, p)
        n_ok += sv[2] > 1e-8 * sv[0]
        total += 1
    res.checks.append(_check("foliation rank 3 fraction (500 points)", n_ok / total, 0.99, 5, ">="))
    return res


def so3_samples(a: float, cs=(0.5, 1.0, 2.0)):
    s = ResolvedConifold(a)
    out = []
    for c in cs:
        for b in Branch:
            sp = LeafSpec(SO3Leaf(c, b), a)
            out.append((sp, so3_leaf_sample(s, sp, 9, 12)))
    return out


def so3_suite(a: float = 1.0, seed: int = 0, cs=(0.5, 1.0, 2.0), tol: Tolerances | None = None) -> SuiteResult:
    """Criteria 6 and 7: SO(3)-invariant leaves and cross-family calibration constancy."""
    tol = tol or Tolerances()
    res = SuiteResult("so3", {"a": a, "seed": seed, "c": list(cs)})
    for aa in dict.fromkeys((a, 0.0)):
        gating = aa == a
        s = ResolvedConifold(aa)
        for sp, sample in so3_samples(aa, cs):
            label = f"SO3 c={sp.family.c} {sp.family.branch.value} a={aa}"
            _sample_checks(res, label, s, sample, 6, tol, gating)
            rmin = min(p.rsq for p in sample.points)
            res.checks.append(_check(f"{label}: |min r^2 - c|", abs(rmin - sp.family.c), 1e-10, 6, "<=", gating))
            res.checks.append(_check(f"{label}: min r^2 (bolt avoidance)", rmin, 0.0, 6, ">", gating))
    for aa in dict.fromkeys((a, 0.0)):
        s = ResolvedConifold(aa)
        ratios = []
        for sp in default_t2_specs(aa)[:1] + [LeafSpec(T2Leaf(0.0, 0.0, 0.0), aa)]:
            if sp.a != aa:
                continue
            sample = t2_leaf_sample(s, sp, 3, 3, 5, (-1.0, 1.0))
            ratios += [calibration_ratio(s, f) for f in sample.frames]
        for _, sample in so3_samples(aa, cs):
            ratios += [calibration_ratio(s, f) for f in sample.frames]
        ratios = np.array(ratios)
        res.checks.append(_check(f"calibration ratio rel. stddev across T2 and SO3 leaves, a={aa}",
                                 ratios.std() / ratios.mean(), tol.calibration, 7, "<", aa == a,
                                 f"median {np.median(ratios):.12g}"))
    flat = FlatC3()
    p = FlatPoint(np.zeros(3))
    e = np.eye(3, dtype=complex)
    f = TangentFrame(p, *(TangentVector(p, e[k]) for k in range(3)))
    res.checks.append(_check("flat calibration ratio on (e1, e2, e3) minus 1", abs(calibration_ratio(flat, f) - 1), 1e-12, 7, "<="))
    return res


def flat_samples():
    return ([hl_flat_so3(c) for c in (0.0, 1.0, -0.7)]
            + [hl_flat_torus(*c) for c in ((0.0, 0.0, 0.0), (0.0, 1.0, 1.0), (0.5, 0.3, -0.2))])


def flat_suite(seed: int = 0, tol: Tolerances | None = None, perturb: float = 0.0) -> SuiteResult:
    """Criterion 8: both Harvey-Lawson families in C^3 (no conifold code paths)."""
    tol = tol or Tolerances(lagrangian=1e-9, special=1e-9, leaf=1e-9)
    res = SuiteResult("flat", {"seed": seed, "perturb": perturb})
    rng = np.random.default_rng(seed)
    flat = FlatC3()
    for sample in flat_samples():
        if perturb:
            sample = perturb_sample(sample, perturb, rng)
        d = sample.spec.as_dict()
        label = f"{d['family']} " + ",".join(f"{k}={v}" for k, v in d.items() if k.startswith("c"))
        _sample_checks(res, label, flat, sample, 8, tol)
        cal = max(abs(calibration_ratio(flat, f) - 1) for f in sample.frames)
        res.checks.append(_check(f"{label}: |calibration ratio - 1|", cal, 1e-9, 8, "<="))
    return res


def asymptotics_suite(a: float = 1.0, seed: int = 0, c_t2=(0.3, 0.1, 0.2), c_so3: float = 1.0,
                      radii=(10.0, 100.0, 1000.0)) -> SuiteResult:
    """Criterion 9: decay of the cone residuals and of F'_a / F'_0 - 1."""
    res = SuiteResult("asymptotics", {"a": a, "c_t2": list(c_t2), "c_so3": c_so3, "radii": list(radii)})
    s = ResolvedConifold(a)
    t2 = t2_cone_table(s, c_t2, radii)
    res.checks.append(_flag(f"T2 cone residual strictly decreasing along r={list(radii)}",
                            all(np.diff(t2) < 0), 9, detail=", ".join(f"{v:.3e}" for v in t2)))
    so3 = so3_cone_table(c_so3, radii)
    res.checks.append(_flag(f"SO3 cone residual strictly decreasing along r={list(radii)}",
                            all(np.diff(so3) < 0), 9, detail=", ".join(f"{v:.3e}" for v in so3)))
    expected = abs(c_so3) / np.asarray(radii) ** 2
    worst = float(np.max(np.maximum(so3 / expected, expected / so3)))
    res.checks.append(_check("SO3 cone residual / (|c|/r^2) within factor 2", worst, 2.0, 9, "<="))
    rsq = 1e3
    dev = abs(f_prime(rsq, 1.0) / rsq ** (-1.0 / 3.0) - 1.0)
    res.checks.append(_check("|F'_1 / r^(-2/3) - 1| at r^2 = 1e3", dev, 1e-2, 9))
    return res


def t2_cone_table(s: ResolvedConifold, c, radii) -> np.ndarray:
    out = []
    seed = None
    for r in radii:
        p = t2_leaf_solve(s, c, r * r, pin="rsq", seed=seed)
        out.append(cone_residual("T2", p))
        x = (p.U.real, p.Y.real, p.local[2])
        seed = None if x[0] <= 0 else x
    return np.array(out)


def so3_cone_table(c: float, radii, branch: Branch = Branch.PLUS) -> np.ndarray:
    out = []
    for r in radii:
        if c == 0:
            sv = r / np.sqrt(2.0)
        else:
            sv = 0.5 * np.arccosh(r * r / abs(c))
        Y, _ = so3_branch_curve(c, branch, sv)
        p = ResolvedPoint.from_local(Patch.PLUS, [0.0, Y, 0.0])
        out.append(cone_residual("SO3", p))
    return np.array(out)


def controls_suite(a: float = 1.0, seed: int = 0) -> SuiteResult:
    """Criterion 10: every residual detects its own failure class."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("controls", {"a": a, "seed": seed})
    s = ResolvedConifold(a)
    sp = LeafSpec(T2Leaf(0.3, 0.1, 0.2), a)
    sample = t2_leaf_sample(s, sp, 3, 3, 5, (-1.0, 1.0))
    rep = run_report(s, perturb_sample(sample, 1e-3, rng))
    res.checks.append(_flag("perturbed T2 sample (1e-3) fails the report", not rep.passed, 10))
    res.checks.append(_check("perturbed T2 sample: leaf residual", rep.summary["leafResidual"]["max"], 1e-3, 10, ">"))
    res.checks.append(_check("perturbed T2 sample: Lagrangian residual vs tolerance",
                             rep.summary["lagrangianResidual"]["max"], Tolerances().lagrangian, 10, ">"))
    flat_rep = run_report(FlatC3(), perturb_sample(hl_flat_torus(0.0, 1.0, 1.0), 1e-3, rng))
    res.checks.append(_check("perturbed flat torus sample: leaf residual", flat_rep.summary["leafResidual"]["max"], 1e-3, 10, ">"))
    phase = min(special_residual(s, phase_rotated_frame(f, np.pi / 6)) for f in sample.frames)
    res.checks.append(_check("wrong-phase frames (pi/6): special residual", phase, 1e-3, 10, ">",
                             detail=f"sin(pi/6) = {np.sin(np.pi / 6):.3f}"))
    broken = []
    for f in sample.frames:
        v1 = f.v1
        bad = TangentFrame(f.base, v1, f.v2, TangentVector(f.base, 1j * v1.components))
        broken.append(lagrangian_residual(s, bad))
    res.checks.append(_check("frames with v3 = J v1: Lagrangian residual", min(broken), 1e-3, 10, ">"))
    return res


SUITES = {
    "structure": lambda a, seed, **kw: structure_suite(a, seed),
    "moments": lambda a, seed, **kw: moments_suite(a, seed),
    "t2": lambda a, seed, **kw: t2_suite(a, seed, **kw),
    "so3": lambda a, seed, **kw: so3_suite(a, seed, **kw),
    "flat": lambda a, seed, **kw: flat_suite(seed, **kw),
    "asymptotics": lambda a, seed, **kw: asymptotics_suite(a, seed, **kw),
    "controls": lambda a, seed, **kw: controls_suite(a, seed),
}


def run_suite(name: str, a: float = 1.0, seed: int = 0, **kw) -> SuiteResult:
    return SUITES[name](a, seed, **kw)
