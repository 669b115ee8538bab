"""Special Lagrangian families: T^2-invariant leaves, SO(3)-invariant leaves,
the two flat Harvey-Lawson examples in C^3, and their asymptotic cones.

T^2 leaves are solved in the gauge where U and Y are real (the torus rotates
their phases independently), so a leaf becomes a curve in the four unknowns
(rho_U, rho_Y, Re l+, Im l+) traced by pseudo-arclength continuation and
swept out by the torus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .ambient import (
    Patch,
    ResolvedPoint,
    TangentFrame,
    TangentVector,
    rotation_taking_e1_to,
    so3_element,
    to_z,
    torus_element,
    GENERATORS,
)
from .cy_structure import FlatPoint, ResolvedConifold, f_double_prime, f_prime
from .errors import (
    DegenerateOrbit,
    DomainError,
    NoConvergence,
    SingularJacobian,
)
from .moment_maps import t2_moment
from .numerics import fd_step, newton_solve, null_direction, richardson_derivative, trace_both_ways

__all__ = [
    "Branch", "T2Leaf", "SO3Leaf", "HLSO3Flat", "HLTorusFlat", "LeafSpec", "LeafSample",
    "t2_leaf_residual", "t2_gauge_equations", "t2_gauge_jacobian", "t2_gauge_point",
    "t2_leaf_solve", "t2_leaf_sample", "t2_bolt_circle", "so3_branch_curve", "so3_leaf_sample",
    "hl_flat_so3", "hl_flat_torus", "cone_residual", "leaf_equation_residual",
    "foliation_singular_values", "fibonacci_sphere",
]


class Branch(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class T2Leaf:
    c1: float
    c2: float
    c3: float

    @property
    def c(self) -> tuple[float, float, float]:
        return (self.c1, self.c2, self.c3)


@dataclass(frozen=True)
class SO3Leaf:
    c: float
    branch: Branch = Branch.PLUS


@dataclass(frozen=True)
class HLSO3Flat:
    c: float


@dataclass(frozen=True)
class HLTorusFlat:
    c1: float
    c2: float
    c3: float


@dataclass(frozen=True)
class LeafSpec:
    family: T2Leaf | SO3Leaf | HLSO3Flat | HLTorusFlat
    a: float = 1.0

    @property
    def is_flat(self) -> bool:
        return isinstance(self.family, (HLSO3Flat, HLTorusFlat))

    def as_dict(self) -> dict:
        fam = self.family
        d = {"family": type(fam).__name__, "a": None if self.is_flat else self.a}
        for k, v in fam.__dict__.items():
            d[k] = v.value if isinstance(v, Enum) else v
        return d


@dataclass(frozen=True, eq=False)
class LeafSample:
    """Points on a leaf with a tangent 3-frame at each, plus the grid parameters.

    `parameters[k]` is (theta1, theta2, t) for torus families and
    (s, n_x, n_y, n_z) for the SO(3) families.
    """

    spec: LeafSpec
    points: tuple
    frames: tuple
    parameters: np.ndarray
    notes: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)


# -- T^2 leaves ----------------------------------------------------------------


def t2_leaf_residual(s: ResolvedConifold, p: ResolvedPoint, c) -> np.ndarray:
    """(mu1 - c1, mu2 - c2, Im(XY) - c3)."""
    mu = t2_moment(s, p).components
    return np.array([mu[0] - c[0], mu[1] - c[1], (p.X * p.Y).imag - c[2]])


def t2_gauge_point(x) -> ResolvedPoint:
    rho_u, rho_y, al, be = (float(v) for v in x)
    return ResolvedPoint.from_local(Patch.PLUS, [rho_u, rho_y, al + 1j * be])


def t2_gauge_equations(s: ResolvedConifold, x, c) -> np.ndarray:
    """The leaf equations in gauge coordinates x = (rho_U, rho_Y, alpha, beta), l+ = alpha + i beta."""
    ru, ry, al, be = x
    L = al * al + be * be
    rsq = (1.0 + L) * (ru * ru + ry * ry)
    fp = f_prime(rsq, s.a) if rsq > 0 else f_prime(0.0, s.a)
    m = L / (1.0 + L)
    two_a2 = 2.0 * s.a**2
    return np.array([
        0.5 * fp * (L * ru * ru - ry * ry) + two_a2 * m - c[0],
        0.5 * fp * (L * ry * ry - ru * ru) + two_a2 * m - c[1],
        -ru * ry * be - c[2],
    ])


def t2_gauge_jacobian(s: ResolvedConifold, x) -> np.ndarray:
    ru, ry, al, be = x
    L = al * al + be * be
    q = ru * ru + ry * ry
    rsq = (1.0 + L) * q
    fp, fpp = f_prime(rsq, s.a), f_double_prime(rsq, s.a)
    d_rsq = np.array([2 * (1 + L) * ru, 2 * (1 + L) * ry, 2 * al * q, 2 * be * q])
    d1 = L * ru * ru - ry * ry
    d2 = L * ry * ry - ru * ru
    dd1 = np.array([2 * L * ru, -2 * ry, 2 * al * ru * ru, 2 * be * ru * ru])
    dd2 = np.array([-2 * ru, 2 * L * ry, 2 * al * ry * ry, 2 * be * ry * ry])
    dm = np.array([0.0, 0.0, 2 * al, 2 * be]) / (1 + L) ** 2
    two_a2 = 2.0 * s.a**2
    return np.vstack([
        0.5 * fpp * d1 * d_rsq + 0.5 * fp * dd1 + two_a2 * dm,
        0.5 * fpp * d2 * d_rsq + 0.5 * fp * dd2 + two_a2 * dm,
        [-ry * be, -ru * be, 0.0, -ru * ry],
    ])


def _default_seeds(c, value, pin):
    scale = np.sqrt(value) if pin == "rsq" else value
    seeds = []
    for ratio in (1.0, 0.7, 1.4, 0.4, 2.5):
        for ang in np.linspace(-np.pi, np.pi, 12, endpoint=False):
            for mod in (1.0, 0.5, 2.0):
                lam = mod * np.exp(1j * ang)
                if pin == "rsq":
                    ry = scale / np.sqrt((1 + mod**2) * (1 + ratio**2))
                else:
                    ry = scale
                seeds.append((ratio * ry, ry, lam))
    return seeds


def t2_leaf_solve(s: ResolvedConifold, c, slice: float, seed=None, pin: str = "rho_y", tol: float = 1e-12) -> ResolvedPoint:
    """Solve the leaf equations with rho_Y (pin='rho_y') or r^2 (pin='rsq') fixed to `slice`.

    `seed` is (rho_U, rho_Y, l+); without one, a fixed list of starts is
    tried and the first solution with rho_U > 0 is returned.
    """
    c = np.asarray(c, float)
    if pin not in ("rho_y", "rsq"):
        raise ValueError("pin must be 'rho_y' or 'rsq'")
    if pin == "rsq" and slice <= 0:
        raise DomainError("r^2 slice must be positive")

    if pin == "rho_y":
        def fun(y):
            return t2_gauge_equations(s, (y[0], slice, y[1], y[2]), c)

        def jac(y):
            return t2_gauge_jacobian(s, (y[0], slice, y[1], y[2]))[:, [0, 2, 3]]

        def pack(seed):
            ru, _, lam = seed
            return np.array([ru, lam.real, lam.imag])

        def unpack(y):
            return (y[0], slice, y[1], y[2])
    else:
        def fun(x):
            L = x[2] ** 2 + x[3] ** 2
            return np.append(t2_gauge_equations(s, x, c), (1 + L) * (x[0] ** 2 + x[1] ** 2) - slice)

        def jac(x):
            ru, ry, al, be = x
            L = al * al + be * be
            q = ru * ru + ry * ry
            return np.vstack([t2_gauge_jacobian(s, x), [2 * (1 + L) * ru, 2 * (1 + L) * ry, 2 * al * q, 2 * be * q]])

        def pack(seed):
            ru, ry, lam = seed
            return np.array([ru, ry, lam.real, lam.imag])

        def unpack(x):
            return tuple(x)

    seeds = [seed] if seed is not None else _default_seeds(c, slice, pin)
    last = None
    for sd in seeds:
        sd = (float(sd[0]), float(sd[1]), complex(sd[2]))
        try:
            y = newton_solve(fun, jac, pack(sd), tol=tol, maxiter=80)
        except (NoConvergence, SingularJacobian) as exc:
            last = exc
            continue
        x = unpack(y)
        if seed is None and (x[0] <= 0 or x[1] <= 0):
            continue
        return t2_gauge_point(x)
    if isinstance(last, SingularJacobian) and len(seeds) == 1:
        raise last
    raise NoConvergence(f"no leaf point found for c={tuple(c)} at {pin}={slice}")


def _gauge_coords(p: ResolvedPoint):
    l = p.local[2]
    return np.array([p.U.real, p.Y.real, l.real, l.imag])


def _torus_frame(p: ResolvedPoint, tangent) -> TangentFrame:
    v3 = TangentVector(p, np.array([tangent[0], tangent[1], tangent[2] + 1j * tangent[3]]))
    return TangentFrame(p, GENERATORS["B1"].vector_field(p), GENERATORS["B2"].vector_field(p), v3)


def t2_bolt_circle(s: ResolvedConifold, c1: float, n_phi: int):
    """Bolt points of the leaf c = (c1, c1, 0) with their limiting tangent frames.

    The circle is |l+|^2 / (1 + |l+|^2) = c1 / (2a^2); the leaf meets the bolt
    there with tangent plane spanned by the torus direction and the two fiber
    directions (1, 1, 0) and (-i, i, 0) in (U, Y, l+) (rotated with the circle).
    """
    m = c1 / (2.0 * s.a**2) if s.a > 0 else -1.0
    if not 0.0 < m < 1.0:
        raise DomainError("the leaf does not meet the bolt")
    rho = np.sqrt(m / (1.0 - m))
    pts, frames, params = [], [], []
    base = ResolvedPoint.on_bolt([1.0, rho], Patch.PLUS)
    f0 = TangentFrame(
        base,
        TangentVector(base, np.array([0, 0, -1j * rho])),
        TangentVector(base, np.array([-1j, 1j, 0])),
        TangentVector(base, np.array([1, 1, 0], dtype=complex)),
    )
    for phi in np.linspace(0, 2 * np.pi, n_phi, endpoint=False):
        g = torus_element(0.5 * phi, 0.5 * phi)
        f = g.push_frame(f0)
        pts.append(f.base)
        frames.append(f)
        params.append((0.5 * phi, 0.5 * phi, 0.0))
    return pts, frames, np.array(params)


def t2_leaf_sample(s: ResolvedConifold, spec: LeafSpec, n_theta1: int = 4, n_theta2: int = 4, n_t: int = 9,
                   t_range=(-1.0, 1.0), seed_rho_y: float = 1.0, seed=None, h0: float = 0.05,
                   bolt_rho: float = 1e-4) -> LeafSample:
    """Sample a T^2 leaf on a (theta1, theta2, t) grid.

    The gauge curve through a solved seed is traced by pseudo-arclength in
    both directions; t is signed arclength in gauge coordinates. Tracing
    stops where the gauge degenerates (rho_U or rho_Y reaching `bolt_rho`);
    leaves of the form (c1, c1, 0) then contribute their bolt circle.
    """
    fam = spec.family
    if not isinstance(fam, T2Leaf):
        raise TypeError("spec must be a T2Leaf")
    c = np.array(fam.c)
    p0 = None
    for slice_ in (seed_rho_y, 0.5 * seed_rho_y, 2.0 * seed_rho_y, 0.25 * seed_rho_y, 4.0 * seed_rho_y):
        try:
            p0 = t2_leaf_solve(s, c, slice_, seed=seed)
            break
        except (NoConvergence, SingularJacobian):
            continue
    if p0 is None:
        raise NoConvergence(f"no seed point found on the leaf c={tuple(c)}")
    x0 = _gauge_coords(p0)

    def fun(x):
        return t2_gauge_equations(s, x, c)

    def jac(x):
        return t2_gauge_jacobian(s, x)

    def stop(x):
        return min(x[0], x[1]) < bolt_rho

    ts = np.linspace(t_range[0], t_range[1], n_t)
    t_vals, xs, tangents = trace_both_ways(fun, jac, x0, ts, h0=h0, stop=stop)
    pts, frames, params = [], [], []
    for t, x, d in zip(t_vals, xs, tangents):
        p = t2_gauge_point(x)
        f = _torus_frame(p, d)
        for th1 in np.linspace(0, 2 * np.pi, n_theta1, endpoint=False):
            for th2 in np.linspace(0, 2 * np.pi, n_theta2, endpoint=False):
                g = torus_element(th1, th2)
                fg = g.push_frame(f)
                pts.append(fg.base)
                frames.append(fg)
                params.append((th1, th2, t))
    notes = {"seed": x0.tolist(), "reached_t": [float(t_vals.min()), float(t_vals.max())] if len(t_vals) else []}
    touches_bolt = s.a > 0 and abs(c[0] - c[1]) < 1e-14 and c[2] == 0 and 0 < c[0] < 2 * s.a**2
    if touches_bolt:
        bp, bf, bpar = t2_bolt_circle(s, c[0], n_theta1 * n_theta2)
        pts += bp
        frames += bf
        params += [tuple(r) for r in bpar]
        notes["bolt_circle"] = len(bp)
    return LeafSample(spec, tuple(pts), tuple(frames), np.array(params), notes)


# -- SO(3) leaves --------------------------------------------------------------


def so3_branch_curve(c: float, branch: Branch, s):
    """Y(s) and Y'(s) on the chosen component of Re(Y^2) = c.

    c > 0: Y = +-sqrt(c)(cosh s + i sinh s); c < 0: Y = +-sqrt(|c|)(sinh s + i cosh s);
    c = 0: Y = +-(|s| + i s), the two half-lines of the cone (s = 0 is the vertex).
    """
    sign = 1.0 if Branch(branch) is Branch.PLUS else -1.0
    s = float(s)
    if c > 0:
        k = np.sqrt(c)
        return sign * k * (np.cosh(s) + 1j * np.sinh(s)), sign * k * (np.sinh(s) + 1j * np.cosh(s))
    if c < 0:
        k = np.sqrt(-c)
        return sign * k * (np.sinh(s) + 1j * np.cosh(s)), sign * k * (np.cosh(s) + 1j * np.sinh(s))
    if s == 0:
        raise DegenerateOrbit("Y = 0 is the cone vertex")
    return sign * (abs(s) + 1j * s), sign * (np.sign(s) + 1j)


def fibonacci_sphere(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    zc = 1 - 2 * k / n
    rad = np.sqrt(1 - zc * zc)
    phi = np.pi * (1 + np.sqrt(5)) * k
    return np.column_stack([zc, rad * np.cos(phi), rad * np.sin(phi)])


def so3_leaf_sample(s: ResolvedConifold, spec: LeafSpec, n_s: int = 9, n_sphere: int = 12,
                    s_range=(-1.5, 1.5)) -> LeafSample:
    """SO(3)-orbits of (0, Y(s), 0, 0) with frames (A2 field, A3 field, (0, Y'(s), 0)) pushed along."""
    fam = spec.family
    if not isinstance(fam, SO3Leaf):
        raise TypeError("spec must be an SO3Leaf")
    s_vals = np.linspace(s_range[0], s_range[1], n_s)
    if fam.c == 0:
        s_vals = s_vals[s_vals != 0]
    normals = fibonacci_sphere(n_sphere)
    rotations = [so3_element(rotation_taking_e1_to(n)) for n in normals]
    pts, frames, params = [], [], []
    for sv in s_vals:
        Y, dY = so3_branch_curve(fam.c, fam.branch, sv)
        p = ResolvedPoint.from_local(Patch.PLUS, [0.0, Y, 0.0])
        f = TangentFrame(p, GENERATORS["A2"].vector_field(p), GENERATORS["A3"].vector_field(p),
                         TangentVector(p, np.array([0.0, dY, 0.0])))
        for n, g in zip(normals, rotations):
            fg = g.push_frame(f)
            pts.append(fg.base)
            frames.append(fg)
            params.append((sv, *n))
    return LeafSample(spec, tuple(pts), tuple(frames), np.array(params))


# -- flat Harvey-Lawson examples ---------------------------------------------------


def _sphere_tangents(u):
    a = np.array([0.0, 0.0, 1.0]) if abs(u[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    t1 = np.cross(u, a)
    t1 /= np.linalg.norm(t1)
    return t1, np.cross(u, t1)


def hl_flat_so3(c: float, sample_grid=(9, 12), s_range=(-1.5, 1.5)) -> LeafSample:
    """{l u : u in S^2, Im(l^3) = c} in C^3 with l = rho e^{i theta}, rho^3 sin(3 theta) = c.

    theta(s) = +-pi/6 + (pi/6) tanh(s) sweeps the sector (0, pi/3) (or its
    mirror for c < 0); c = 0 samples the real 3-plane, l = s.
    """
    n_s, n_sphere = sample_grid
    s_vals = np.linspace(s_range[0], s_range[1], n_s)
    if c == 0:
        s_vals = s_vals[s_vals != 0]
    pts, frames, params = [], [], []
    for sv in s_vals:
        if c == 0:
            lam, dlam = complex(sv), 1.0 + 0j
        else:
            sgn = np.sign(c)
            th = sgn * np.pi / 6 + (np.pi / 6) * np.tanh(sv)
            dth = (np.pi / 6) / np.cosh(sv) ** 2
            rho = (c / np.sin(3 * th)) ** (1.0 / 3.0)
            drho = -rho * np.cos(3 * th) / np.sin(3 * th) * dth
            lam = rho * np.exp(1j * th)
            dlam = (drho + 1j * rho * dth) * np.exp(1j * th)
        for u in fibonacci_sphere(n_sphere):
            t1, t2 = _sphere_tangents(u)
            p = FlatPoint(lam * u)
            frames.append(TangentFrame(p, TangentVector(p, lam * t1), TangentVector(p, lam * t2),
                                       TangentVector(p, dlam * u)))
            pts.append(p)
            params.append((sv, *u))
    return LeafSample(LeafSpec(HLSO3Flat(c), a=0.0), tuple(pts), tuple(frames), np.array(params))


def _hl_torus_solve(c1, c2, c3, t):
    def fun(y):
        r2, r3, phi = y
        return np.array([t * t - r2 * r2 - c2, t * t - r3 * r3 - c3, t * r2 * r3 * np.sin(phi) - c1])

    def jac(y):
        r2, r3, phi = y
        return np.array([[-2 * r2, 0, 0], [0, -2 * r3, 0],
                         [t * r3 * np.sin(phi), t * r2 * np.sin(phi), t * r2 * r3 * np.cos(phi)]])

    r2, r3 = np.sqrt(t * t - c2), np.sqrt(t * t - c3)
    phi = np.arcsin(np.clip(c1 / (t * r2 * r3), -1, 1))
    return newton_solve(fun, jac, np.array([r2, r3, phi]), tol=1e-14)


def hl_flat_torus(c1: float, c2: float, c3: float, sample_grid=(4, 4, 9), t_span: float = 2.0) -> LeafSample:
    """{|z1|^2 - |z2|^2 = c2, |z1|^2 - |z3|^2 = c3, Im(z1 z2 z3) = c1} in C^3.

    Gauge z2, z3 > 0 and z1 = t e^{i phi}; the curve in t is Newton-solved
    and swept by the torus (e^{i a}, e^{i b}, e^{-i(a+b)}). t runs from just
    above the first admissible value over a span `t_span`.
    """
    n1, n2, n_t = sample_grid
    t_lo = np.sqrt(max(c2, c3, 0.0))
    if c1 != 0:
        # need t r2 r3 >= |c1|; find the threshold by bisection on a monotone function
        lo, hi = t_lo, t_lo + 1.0
        g = lambda t: t * np.sqrt(max(t * t - c2, 0)) * np.sqrt(max(t * t - c3, 0)) - abs(c1)
        while g(hi) < 0:
            hi *= 2
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if g(mid) < 0 else (lo, mid)
        t_lo = hi
    t_vals = t_lo + (0.1 + np.linspace(0.0, t_span, n_t))
    pts, frames, params = [], [], []
    for t in t_vals:
        r2, r3, phi = _hl_torus_solve(c1, c2, c3, t)
        z = np.array([t * np.exp(1j * phi), r2, r3])
        dr2, dr3 = t / r2, t / r3
        dphi = -np.tan(phi) * (1 / t + dr2 / r2 + dr3 / r3)
        dz = np.array([(1 + 1j * t * dphi) * np.exp(1j * phi), dr2, dr3])
        for a in np.linspace(0, 2 * np.pi, n1, endpoint=False):
            for b in np.linspace(0, 2 * np.pi, n2, endpoint=False):
                d = np.exp(1j * np.array([a, b, -a - b]))
                p = FlatPoint(d * z)
                zz = p.z
                frames.append(TangentFrame(p, TangentVector(p, np.array([1j * zz[0], 0, -1j * zz[2]])),
                                           TangentVector(p, np.array([0, 1j * zz[1], -1j * zz[2]])),
                                           TangentVector(p, d * dz)))
                pts.append(p)
                params.append((a, b, t))
    return LeafSample(LeafSpec(HLTorusFlat(c1, c2, c3), a=0.0), tuple(pts), tuple(frames), np.array(params))


# -- cones, leaf equations and the foliation ---------------------------------------


def _as_xyuv(p):
    if isinstance(p, ResolvedPoint):
        return p.xyuv
    from .ambient import to_xyuv
    return to_xyuv(p)


def cone_residual(family: str, p) -> float:
    """Scale-free residual of the asymptotic cone equations.

    'T2': max(||X|^2-|Y|^2|, ||V|^2-|U|^2|, |Im XY|) / r^2, cross-checked
    against the same equations in z-coordinates.
    'SO3': |Re(2 z0^2)| / r^2, i.e. |Re Y^2| / r^2 at the orbit base point.
    `p` is a ResolvedPoint or a z-vector in C^4.
    """
    w = _as_xyuv(p)
    X, Y, U, V = w
    rsq = float(np.vdot(w, w).real)
    if rsq == 0:
        return 0.0
    z = to_z(w)
    family = family.upper()
    if family == "T2":
        res = max(abs(abs(X) ** 2 - abs(Y) ** 2), abs(abs(V) ** 2 - abs(U) ** 2), abs((X * Y).imag)) / rsq
        res_z = max(abs(2 * (z[0] * np.conj(z[1])).imag), abs(2 * (z[2] * np.conj(z[3])).imag),
                    abs(0.5 * (z[0] ** 2 + z[1] ** 2).imag)) / rsq
        if abs(res - res_z) > 1e-12 * max(1.0, res):
            raise ArithmeticError("cone residual disagrees between coordinate systems")
        return float(res)
    if family == "SO3":
        return float(abs((2 * z[0] ** 2).real) / rsq)
    raise ValueError("family must be 'T2' or 'SO3'")


def leaf_equation_residual(spec: LeafSpec, p, s: ResolvedConifold | None = None) -> float:
    """Max absolute residual of the defining equations of spec's family at p."""
    fam = spec.family
    if isinstance(fam, T2Leaf):
        s = s or ResolvedConifold(spec.a)
        return float(np.max(np.abs(t2_leaf_residual(s, p, fam.c))))
    if isinstance(fam, SO3Leaf):
        s = s or ResolvedConifold(spec.a)
        z = to_z(p.xyuv)
        # the family: 2 z0^2 = Y^2 at the base point, Re = c, and z1..z3 a complex multiple of a real vector
        zr = z[1:]
        k = np.argmax(np.abs(zr))
        real_dir = zr / zr[k]
        return float(max(abs((2 * z[0] ** 2).real - fam.c), abs(z[0] ** 2 + zr @ zr),
                         np.max(np.abs(real_dir.imag)) * abs(zr[k])))
    if isinstance(fam, HLSO3Flat):
        z = p.z
        lam = np.sqrt(complex(z @ z))
        u = z / lam
        # +-lam describe the same point (u -> -u); take the matching sign
        res_c = min(abs((lam**3).imag - fam.c), abs((lam**3).imag + fam.c))
        return float(max(res_c, np.max(np.abs(u.imag)) * abs(lam)))
    if isinstance(fam, HLTorusFlat):
        z = p.z
        a2 = np.abs(z) ** 2
        return float(max(abs(a2[0] - a2[1] - fam.c2), abs(a2[0] - a2[2] - fam.c3), abs(np.prod(z).imag - fam.c1)))
    raise TypeError("unknown family")


def foliation_singular_values(s: ResolvedConifold, p: ResolvedPoint) -> np.ndarray:
    """Singular values of the 3x6 real Jacobian of p -> (mu1, mu2, Im XY) in chart coordinates."""
    x = p.local
    h = fd_step(np.max(np.abs(x)))
    J = np.zeros((3, 6))
    for k in range(6):
        e = np.zeros(3, complex)
        e[k // 2] = 1.0 if k % 2 == 0 else 1j

        def fmap(t):
            q = ResolvedPoint.from_local(p.patch, x + t * e)
            mu = t2_moment(s, q).components
            return np.array([mu[0], mu[1], (q.X * q.Y).imag])

        J[:, k] = richardson_derivative(fmap, h)
    return np.linalg.svd(J, compute_uv=False)
