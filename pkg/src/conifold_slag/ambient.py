"""Coordinates on the conifold and its small resolution, charts, and SO(4) actions.

Ambient coordinates are z = (z0, z1, z2, z3) on C^4 and (X, Y, U, V) = P z.
The resolved conifold is the set of (X, Y, U, V, [l1 : l2]) with

    X l1 + U l2 = 0,   V l1 + Y l2 = 0,

covered by two charts: H+ (l1 != 0) with coordinates (U, Y, l+), l+ = l2/l1,
and H- (l2 != 0) with coordinates (X, V, l-), l- = l1/l2.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import special_ortho_group

from .errors import BasePointMismatch, NotOnQuadric, NotOrthogonal, OriginError, PatchBoundary

SQRT2 = np.sqrt(2.0)
P = np.array(
    [
        [1, -1j, 0, 0],
        [1, 1j, 0, 0],
        [0, 0, -1j, 1],
        [0, 0, -1j, -1],
    ],
    dtype=complex,
) / SQRT2
P_STAR = P.conj().T

DEFAULT_TOL = 1e-9


def to_xyuv(z) -> np.ndarray:
    """(z0, z1, z2, z3) -> (X, Y, U, V). Works on (..., 4) arrays."""
    z = np.asarray(z, dtype=complex)
    return z @ P.T


def to_z(w) -> np.ndarray:
    """Inverse of `to_xyuv` (application of P*)."""
    w = np.asarray(w, dtype=complex)
    return w @ P_STAR.T


def quadric(w) -> complex:
    """XY - UV; vanishes on the conifold. Equals half of sum(z_i^2)."""
    w = np.asarray(w, dtype=complex)
    return w[..., 0] * w[..., 1] - w[..., 2] * w[..., 3]


class Patch(str, Enum):
    PLUS = "H+"
    MINUS = "H-"

    @property
    def other(self) -> "Patch":
        return Patch.MINUS if self is Patch.PLUS else Patch.PLUS


def preferred_patch(lam) -> Patch:
    """Chart with the larger homogeneous coordinate in the denominator; ties go to H+."""
    return Patch.PLUS if abs(lam[0]) >= abs(lam[1]) else Patch.MINUS


def _normalise(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=complex)
    n = np.linalg.norm(lam)
    if n == 0.0:
        raise ValueError("homogeneous coordinates cannot both vanish")
    return lam / n


@dataclass(frozen=True, eq=False)
class ResolvedPoint:
    """Point of the resolved conifold.

    `xyuv` is the blown-down position, `lam` a unit-norm representative of
    [l1 : l2] and `patch` the chart in which tangent components are read.
    """

    xyuv: np.ndarray
    lam: np.ndarray
    patch: Patch = Patch.PLUS

    def __post_init__(self):
        object.__setattr__(self, "xyuv", np.asarray(self.xyuv, dtype=complex).reshape(4))
        object.__setattr__(self, "lam", _normalise(self.lam).reshape(2))
        denom = self.lam[0] if self.patch is Patch.PLUS else self.lam[1]
        if denom == 0:
            raise PatchBoundary(f"point is not in chart {self.patch.value}")

    X = property(lambda self: self.xyuv[0])
    Y = property(lambda self: self.xyuv[1])
    U = property(lambda self: self.xyuv[2])
    V = property(lambda self: self.xyuv[3])

    @property
    def lam_plus(self) -> complex:
        if self.lam[0] == 0:
            raise PatchBoundary("l+ undefined at [0:1]")
        return self.lam[1] / self.lam[0]

    @property
    def lam_minus(self) -> complex:
        if self.lam[1] == 0:
            raise PatchBoundary("l- undefined at [1:0]")
        return self.lam[0] / self.lam[1]

    @property
    def local(self) -> np.ndarray:
        """Chart coordinates: (U, Y, l+) in H+, (X, V, l-) in H-."""
        if self.patch is Patch.PLUS:
            return np.array([self.U, self.Y, self.lam_plus])
        return np.array([self.X, self.V, self.lam_minus])

    @property
    def rsq(self) -> float:
        return float(np.vdot(self.xyuv, self.xyuv).real)

    @property
    def is_bolt(self) -> bool:
        return not np.any(self.xyuv)

    def in_patch(self, patch: Patch) -> "ResolvedPoint":
        if patch is self.patch:
            return self
        return ResolvedPoint(self.xyuv, self.lam, patch)

    @classmethod
    def from_local(cls, patch: Patch, coords) -> "ResolvedPoint":
        a, b, l = (complex(c) for c in coords)
        if patch is Patch.PLUS:
            U, Y = a, b
            return cls(np.array([-l * U, Y, U, -l * Y]), np.array([1.0, l]), patch)
        X, V = a, b
        return cls(np.array([X, -l * V, -l * X, V]), np.array([l, 1.0]), patch)

    @classmethod
    def on_bolt(cls, lam, patch: Patch | None = None) -> "ResolvedPoint":
        lam = _normalise(lam)
        return cls(np.zeros(4, complex), lam, patch or preferred_patch(lam))

    def defining_residual(self) -> float:
        """max(|XY-UV|, |X l1 + U l2|, |V l1 + Y l2|) / max(r^2, r)."""
        X, Y, U, V = self.xyuv
        l1, l2 = self.lam
        r2 = self.rsq
        res = max(abs(X * Y - U * V) / max(r2, 1e-300), abs(X * l1 + U * l2) / max(np.sqrt(r2), 1e-300),
                  abs(V * l1 + Y * l2) / max(np.sqrt(r2), 1e-300))
        return 0.0 if r2 == 0 else float(res)


def _kernel_of_rank_one(W) -> np.ndarray:
    """Kernel of a rank-one 2x2 matrix [[X, U], [V, Y]], read off its larger row."""
    (X, U), (V, Y) = W
    r1 = abs(X) ** 2 + abs(U) ** 2
    r2 = abs(V) ** 2 + abs(Y) ** 2
    return np.array([-U, X]) if r1 >= r2 else np.array([-Y, V])


def lift_to_resolved(w, tol: float = DEFAULT_TOL) -> ResolvedPoint:
    """Unique preimage of a nonzero conifold point, [l1:l2] = [-U:X] = [-Y:V]."""
    w = np.asarray(w, dtype=complex).reshape(4)
    r2 = float(np.vdot(w, w).real)
    if r2 == 0.0:
        raise OriginError("the cone vertex is blown up to a CP^1; no unique lift")
    if abs(quadric(w)) > tol * r2:
        raise NotOnQuadric(f"|XY - UV| = {abs(quadric(w)):.3e} exceeds {tol:.1e} * r^2")
    X, Y, U, V = w
    lam = _normalise(_kernel_of_rank_one([[X, U], [V, Y]]))
    return ResolvedPoint(w, lam, preferred_patch(lam))


def transition(p: ResolvedPoint) -> ResolvedPoint:
    """Re-express p in the opposite chart, (X, V, l-) = (-l+ U, -l+ Y, 1/l+)."""
    target = p.patch.other
    denom = p.lam[0] if target is Patch.PLUS else p.lam[1]
    if denom == 0:
        raise PatchBoundary(f"point lies outside chart {target.value}")
    return p.in_patch(target)


def radius_sq(p: ResolvedPoint) -> float:
    return p.rsq


def patch_radius_sq(p: ResolvedPoint) -> float:
    """r^2 from chart data: (1+|l+|^2)(|U|^2+|Y|^2) or (1+|l-|^2)(|X|^2+|V|^2)."""
    a, b, l = p.local
    return float((1 + abs(l) ** 2) * (abs(a) ** 2 + abs(b) ** 2))


# -- tangent vectors ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Tangent vector given by its components in the base point's chart."""

    base: ResolvedPoint
    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "components", np.asarray(self.components, dtype=complex).reshape(3))

    def __mul__(self, scalar) -> "TangentVector":
        return TangentVector(self.base, self.components * scalar)

    __rmul__ = __mul__

    def __add__(self, other: "TangentVector") -> "TangentVector":
        check_same_base(self.base, other.base)
        return TangentVector(self.base, self.components + other.components)

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, -self.components)


@dataclass(frozen=True, eq=False)
class TangentFrame:
    base: ResolvedPoint
    v1: TangentVector
    v2: TangentVector
    v3: TangentVector

    def __post_init__(self):
        for v in self.vectors:
            check_same_base(self.base, v.base)

    @property
    def vectors(self) -> tuple:
        return (self.v1, self.v2, self.v3)


def same_point(p, q) -> bool:
    if p is q:
        return True
    if type(p) is not type(q):
        return False
    if isinstance(p, ResolvedPoint):
        return (p.patch is q.patch and np.allclose(p.xyuv, q.xyuv, rtol=1e-14, atol=1e-300)
                and np.allclose(p.lam, q.lam, rtol=1e-14, atol=1e-300))
    return np.allclose(np.asarray(p.z), np.asarray(q.z), rtol=1e-14, atol=1e-300)


def check_same_base(p, q) -> None:
    if not same_point(p, q):
        raise BasePointMismatch("tangent vectors are based at different points")


def ambient_differential(p: ResolvedPoint, comps) -> tuple[np.ndarray, np.ndarray]:
    """Chart components -> (dX, dY, dU, dV) and a homogeneous d(l1, l2) along p.lam."""
    a, b, dl = np.asarray(comps, dtype=complex)
    l1, l2 = p.lam
    if p.patch is Patch.PLUS:
        lp = l2 / l1
        dU, dY = a, b
        dX = -lp * dU - p.U * dl
        dV = -lp * dY - p.Y * dl
        dlam = np.array([0.0, l1 * dl])
    else:
        lm = l1 / l2
        dX, dV = a, b
        dU = -lm * dX - p.X * dl
        dY = -lm * dV - p.V * dl
        dlam = np.array([l2 * dl, 0.0])
    return np.array([dX, dY, dU, dV]), dlam


def local_components(p: ResolvedPoint, dw, dlam) -> np.ndarray:
    """Inverse of `ambient_differential`; `dlam` must be relative to p.lam."""
    dX, dY, dU, dV = dw
    l1, l2 = p.lam
    d1, d2 = dlam
    if p.patch is Patch.PLUS:
        return np.array([dU, dY, (d2 * l1 - l2 * d1) / l1**2])
    return np.array([dX, dV, (d1 * l2 - l1 * d2) / l2**2])


def transition_vector(v: TangentVector) -> TangentVector:
    """Same tangent vector, components in the other chart (transition Jacobian)."""
    q = transition(v.base)
    dw, dlam = ambient_differential(v.base, v.components)
    return TangentVector(q, local_components(q, dw, dlam))


def in_preferred_patch(v: TangentVector) -> TangentVector:
    target = preferred_patch(v.base.lam)
    return v if target is v.base.patch else transition_vector(v)


# -- group actions -----------------------------------------------------------

# l -> (l2, 0, -l1, 0): a cone point whose blow-down datum is [l1 : l2].
_AUX = np.array([[0, 1], [0, 0], [-1, 0], [0, 0]], dtype=complex)
_ROW1 = np.array([[0, 0, -1, 0], [1, 0, 0, 0]], dtype=complex)  # w -> (-U, X)
_ROW2 = np.array([[0, -1, 0, 0], [0, 0, 0, 1]], dtype=complex)  # w -> (-Y, V)


def lambda_matrix(g_tilde) -> np.ndarray:
    """Linear map on (l1, l2) induced by a linear map of (X, Y, U, V).

    The datum of g.p is the kernel of g applied to the auxiliary rank-one
    point of [l1:l2]; reading it off a fixed row makes the map linear.
    """
    g_tilde = np.asarray(g_tilde, dtype=complex)
    K1 = _ROW1 @ g_tilde @ _AUX
    K2 = _ROW2 @ g_tilde @ _AUX
    return K1 if np.linalg.norm(K1) >= np.linalg.norm(K2) else K2


def spin_generator(m_tilde) -> np.ndarray:
    """Trace-free 2x2 matrix R with l' = R l the infinitesimal action on CP^1."""
    R = _ROW1 @ np.asarray(m_tilde, dtype=complex) @ _AUX
    return R - 0.5 * np.trace(R) * np.eye(2)


@dataclass(frozen=True, eq=False)
class GroupElement:
    """g in SO(4) (or any invertible map preserving XY - UV), acting on X, Y, U, V by g~ = P g P*."""

    kind: str
    matrix: np.ndarray
    real: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))
        object.__setattr__(self, "_lam", lambda_matrix(self.matrix))

    @property
    def lam_matrix(self) -> np.ndarray:
        return self._lam

    def act(self, p: ResolvedPoint, patch: Patch | None = None) -> ResolvedPoint:
        lam = self._lam @ p.lam
        lam = lam / np.linalg.norm(lam)
        return ResolvedPoint(self.matrix @ p.xyuv, lam, patch or preferred_patch(lam))

    def push(self, v: TangentVector, q: ResolvedPoint | None = None) -> TangentVector:
        """Exact pushforward of v to g.p (pass q = self.act(p) to reuse it)."""
        p = v.base
        q = q or self.act(p)
        dw, dlam = ambient_differential(p, v.components)
        lam_img = self._lam @ p.lam
        scale = q.lam[np.argmax(abs(q.lam))] / lam_img[np.argmax(abs(q.lam))]
        comps = local_components(q, self.matrix @ dw, scale * (self._lam @ dlam))
        return TangentVector(q, comps)

    def push_frame(self, f: TangentFrame) -> TangentFrame:
        q = self.act(f.base)
        return TangentFrame(q, *(self.push(v, q) for v in f.vectors))


def conjugate_action(g, tol: float = 1e-12) -> GroupElement:
    g = np.asarray(g, dtype=float)
    if g.shape != (4, 4) or np.max(abs(g.T @ g - np.eye(4))) > tol or abs(np.linalg.det(g) - 1.0) > tol:
        raise NotOrthogonal("expected a 4x4 orthogonal matrix with determinant 1")
    return GroupElement("SO4", P @ g @ P_STAR, g)


def random_so4(rng) -> np.ndarray:
    return special_ortho_group.rvs(4, random_state=rng)


def _rotation_exp(A, t):
    # valid for single-plane rotation generators (A^3 = -A)
    return np.eye(4) + np.sin(t) * A + (1.0 - np.cos(t)) * (A @ A)


@dataclass(frozen=True, eq=False)
class Generator:
    """Infinitesimal rotation: real 4x4 matrix in z-coordinates and its conjugate g~."""

    name: str
    real: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return P @ self.real @ P_STAR

    @property
    def spin(self) -> np.ndarray:
        return spin_generator(self.matrix)

    def exp(self, t: float) -> GroupElement:
        m = self.matrix
        if np.allclose(m, np.diag(np.diag(m)), atol=1e-15):
            return GroupElement("SO4", np.diag(np.exp(t * np.diag(m))), _rotation_exp(self.real, t))
        g = _rotation_exp(self.real, t)
        return GroupElement("SO4", P @ g @ P_STAR, g)

    def lambda_action(self, l: complex, patch: Patch = Patch.PLUS) -> complex:
        """d/dt of the chart coordinate l+ (or l-) under the flow."""
        R = self.spin
        lam = np.array([1.0, l]) if patch is Patch.PLUS else np.array([l, 1.0])
        d = R @ lam
        if patch is Patch.PLUS:
            return complex(d[1] - l * d[0])
        return complex(d[0] - l * d[1])

    def vector_field(self, p: ResolvedPoint) -> TangentVector:
        dw = self.matrix @ p.xyuv
        return TangentVector(p, local_components(p, dw, self.spin @ p.lam))


def _plane(i, j):
    A = np.zeros((4, 4))
    A[i, j], A[j, i] = -1.0, 1.0
    return A


# B1 is the transpose of the matrix printed for it, so that P B1 P* = diag(-i, i, 0, 0).
B1 = Generator("B1", _plane(0, 1))
B2 = Generator("B2", _plane(2, 3))
A1 = Generator("A1", _plane(2, 3))
A2 = Generator("A2", -_plane(1, 3))
A3 = Generator("A3", _plane(1, 2))

GENERATORS = {g.name: g for g in (B1, B2, A1, A2, A3)}
T2_GENERATORS = (B1, B2)
SO3_GENERATORS = (A1, A2, A3)


def generator_flow(gen: Generator, t: float, p: ResolvedPoint) -> ResolvedPoint:
    return gen.exp(t).act(p)


def torus_element(theta1: float, theta2: float) -> GroupElement:
    """exp(theta1 B1 + theta2 B2) = diag(e^{-i t1}, e^{i t1}, e^{i t2}, e^{-i t2})."""
    d = np.exp(1j * np.array([-theta1, theta1, theta2, -theta2]))
    real = np.eye(4)
    c1, s1, c2, s2 = np.cos(theta1), np.sin(theta1), np.cos(theta2), np.sin(theta2)
    real[:2, :2] = [[c1, -s1], [s1, c1]]
    real[2:, 2:] = [[c2, -s2], [s2, c2]]
    return GroupElement("SO4", np.diag(d), real)


def so3_element(R) -> GroupElement:
    """diag(1, R) with R in SO(3) acting on (z1, z2, z3)."""
    g = np.eye(4)
    g[1:, 1:] = R
    return conjugate_action(g, tol=1e-10)


def rotation_taking_e1_to(n) -> np.ndarray:
    """A rotation of R^3 mapping (1, 0, 0) to the unit vector n."""
    n = np.asarray(n, float) / np.linalg.norm(n)
    e1 = np.array([1.0, 0.0, 0.0])
    axis = np.cross(e1, n)
    s, c = np.linalg.norm(axis), float(e1 @ n)
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([-1.0, -1.0, 1.0])
    k = axis / s
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * K + (1 - c) * (K @ K)
