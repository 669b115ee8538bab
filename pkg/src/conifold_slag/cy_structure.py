"""Calabi-Yau structure of the resolved conifold (and of flat C^3).

The Kahler metric is

    g = F'(r^2) tr(dW* dW) + F''(r^2) |tr(W* dW)|^2 + 4 a^2 |dl|^2 / (1 + |l|^2)^2

with gamma = r^2 F' the positive root of gamma^3 + 6 a^2 gamma^2 = r^4.
Everything is evaluated from the Hermitian matrix H of g in chart
coordinates: h(u, v) = u^T H conj(v), g = Re h and w(u, v) = g(Ju, v) = -Im h.
The holomorphic volume form is dU ^ dY ^ dl+ = dV ^ dX ^ dl-.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ambient import (
    Patch,
    ResolvedPoint,
    TangentFrame,
    TangentVector,
    ambient_differential,
    check_same_base,
)
from .errors import BoltError, DomainError
from .numerics import fd_step, richardson_derivative

__all__ = [
    "GammaResult", "solve_gamma", "gamma_closed_form", "f_prime", "f_double_prime",
    "CYStructure", "ResolvedConifold", "FlatC3", "FlatPoint", "TangentVector", "TangentFrame",
    "metric_eval", "complex_structure_apply", "kahler_form_eval", "alpha_form_eval",
    "alpha_pm_eval", "holomorphic_volume_eval", "monge_ampere_ratio", "gram_matrix",
    "exterior_derivative", "flat_vector",
]


# -- the radial function -----------------------------------------------------


@dataclass(frozen=True)
class GammaResult:
    gamma: np.ndarray | float
    gamma_prime: np.ndarray | float
    N: np.ndarray | complex


def _cubic(g, a2, r4):
    return g * g * (g + 6.0 * a2) - r4


def _gamma_newton(rsq, a, maxiter=200):
    rsq = np.asarray(rsq, dtype=float)
    a2 = np.asarray(a, dtype=float) ** 2
    rsq, a2 = np.broadcast_arrays(rsq, a2)
    r4 = rsq * rsq
    lo = np.zeros_like(r4)
    # p(r^{4/3}) = 6 a^2 r^{8/3} >= 0, so the root lies in [0, r^{4/3}]
    hi = np.maximum(1.0, np.cbrt(r4)) + 6.0 * a2
    hi = np.minimum(hi, np.cbrt(r4) + 1e-300)
    with np.errstate(divide="ignore", over="ignore"):
        g = np.where(a2 > 0, np.minimum(np.sqrt(r4 / np.maximum(6.0 * a2, 1e-300)), hi), hi)
    g = np.clip(g, lo, hi)
    for _ in range(maxiter):
        p = _cubic(g, a2, r4)
        lo = np.where(p < 0, g, lo)
        hi = np.where(p > 0, g, hi)
        dp = g * (3.0 * g + 12.0 * a2)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            step = np.where(dp > 0, p / dp, np.inf)
        g_new = g - step
        bad = ~np.isfinite(g_new) | (g_new <= lo) | (g_new >= hi)
        g_new = np.where(bad, 0.5 * (lo + hi), g_new)
        done = np.abs(g_new - g) <= 4 * np.finfo(float).eps * np.abs(g_new)
        g = g_new
        if np.all(done | (p == 0)):
            break
    return g


def _gamma_scalar(rsq: float, a: float) -> float:
    """Scalar twin of _gamma_newton (same bracket and safeguards, no array overhead)."""
    a2 = a * a
    r4 = rsq * rsq
    if r4 == 0.0:
        return 0.0
    lo, hi = 0.0, math.pow(r4, 1.0 / 3.0)
    g = min(math.sqrt(r4 / (6.0 * a2)), hi) if a2 > 0 else hi
    for _ in range(200):
        p = g * g * (g + 6.0 * a2) - r4
        if p == 0.0:
            return g
        if p < 0:
            lo = g
        else:
            hi = g
        dp = g * (3.0 * g + 12.0 * a2)
        g_new = g - p / dp if dp > 0 else 0.5 * (lo + hi)
        if not lo < g_new < hi:
            g_new = 0.5 * (lo + hi)
        if abs(g_new - g) <= 4 * 2.220446049250313e-16 * g_new:
            return g_new
        g = g_new
    return g


def _check_domain(rsq, a):
    if a < 0:
        raise DomainError("resolution parameter must be non-negative")
    if np.any(np.asarray(rsq) < 0) or (a == 0 and np.any(np.asarray(rsq) <= 0)):
        raise DomainError("r^2 must be positive (and > 0 at a = 0, the cone vertex)")


def solve_gamma(rsq, a: float) -> GammaResult:
    """Positive root of gamma^3 + 6 a^2 gamma^2 - r^4 = 0 and d gamma / d r^2.

    Safeguarded Newton: every iterate stays in a sign-change bracket that
    starts as [0, r^{4/3}] and bisection replaces steps that leave it.
    """
    rsq_arr = np.asarray(rsq, dtype=float)
    a = float(a)
    _check_domain(rsq_arr, a)
    g = _gamma_scalar(float(rsq), a) if rsq_arr.ndim == 0 else _gamma_newton(rsq_arr, a)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        bolt = 1.0 / (np.sqrt(6.0) * a) if a > 0 else np.nan
        gp = np.where(rsq_arr > 0, (2.0 / 3.0) * rsq_arr / (g * (g + 4 * a * a)), bolt)
    N = _closed_form_N(rsq_arr, a)
    if np.ndim(rsq) == 0:
        return GammaResult(float(g), float(gp), complex(N))
    return GammaResult(g, gp, N)


def _closed_form_N(rsq, a):
    r4 = np.asarray(rsq, float) ** 2
    disc = (r4 * r4 - 32.0 * a**6 * r4).astype(complex)
    return 0.5 * (r4 - 16.0 * a**6 + np.sqrt(disc))


def gamma_closed_form(rsq, a: float, imag_tol: float = 1e-9):
    """Cardano form -2a^2 + 4a^4 N^{-1/3} + N^{1/3}, principal cube roots.

    Diagnostic only; for r^4 < 32 a^6, N is complex and the imaginary part of
    the result is checked to cancel.
    """
    rsq = np.asarray(rsq, dtype=float)
    if np.any(rsq <= 0):
        raise DomainError("r^2 must be positive")
    N = _closed_form_N(rsq, a)
    real_branch = (N.imag == 0) & (N.real > 0)
    cbrt = np.where(real_branch, np.cbrt(N.real).astype(complex), N ** (1.0 / 3.0))
    g = -2.0 * a * a + 4.0 * a**4 / cbrt + cbrt
    scale = np.maximum(1.0, np.abs(g))
    if np.any(np.abs(g.imag) > imag_tol * scale):
        raise ArithmeticError("closed-form gamma has a non-cancelling imaginary part")
    out = g.real
    return float(out) if out.ndim == 0 else out


def f_prime(rsq, a: float):
    """F'(r^2) = gamma / r^2; the bolt value 1/(sqrt(6) a) is the r -> 0 limit."""
    if np.ndim(rsq) == 0:
        rsq, a = float(rsq), float(a)
        _check_domain(rsq, a)
        return _gamma_scalar(rsq, a) / rsq if rsq > 0 else 1.0 / (math.sqrt(6.0) * a)
    rsq = np.asarray(rsq, dtype=float)
    g = solve_gamma(rsq, a).gamma
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        bolt = 1.0 / (np.sqrt(6.0) * a) if a > 0 else np.nan
        out = np.where(rsq > 0, g / np.where(rsq > 0, rsq, 1.0), bolt)
    return float(out) if out.ndim == 0 else out


def f_double_prime(rsq, a: float):
    """F''(r^2) = -gamma^2 / (3 r^4 (gamma + 4 a^2)).

    Equivalent to (gamma' r^2 - gamma) / r^4 after eliminating r^4 with the
    cubic; this form has no cancellation near the bolt.
    """
    if np.ndim(rsq) == 0:
        rsq, a = float(rsq), float(a)
        _check_domain(rsq, a)
        if rsq == 0:
            return -1.0 / (72.0 * a**4)
        g = _gamma_scalar(rsq, a)
        return -((g / rsq) ** 2) / (3.0 * (g + 4 * a * a))
    rsq = np.asarray(rsq, dtype=float)
    g = solve_gamma(rsq, a).gamma
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        safe = np.where(rsq > 0, rsq, 1.0)
        bolt = -1.0 / (72.0 * a**4) if a > 0 else np.nan
        out = np.where(rsq > 0, -(g / safe) ** 2 / (3.0 * (g + 4 * a * a)), bolt)
    return float(out) if out.ndim == 0 else out


# -- structures ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FlatPoint:
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", np.asarray(self.z, dtype=complex).reshape(3))


def flat_vector(p: FlatPoint, comps) -> TangentVector:
    return TangentVector(p, comps)


class CYStructure:
    """Interface shared by the resolved conifold and flat C^3."""

    def hermitian(self, p) -> np.ndarray:
        raise NotImplementedError

    def volume_sign(self, p) -> float:
        return 1.0


@dataclass(frozen=True)
class FlatC3(CYStructure):
    """C^3 with the Euclidean metric and dz1 ^ dz2 ^ dz3."""

    def hermitian(self, p) -> np.ndarray:
        return np.eye(3, dtype=complex)

    def as_dict(self) -> dict:
        return {"kind": "FlatC3"}


@dataclass(frozen=True)
class ResolvedConifold(CYStructure):
    """Candelas-de la Ossa metric on O(-1) + O(-1) with bolt size a >= 0."""

    a: float = 1.0

    def __post_init__(self):
        if self.a < 0:
            raise DomainError("resolution parameter must be non-negative")

    def radial(self, rsq: float) -> tuple[float, float]:
        """(F', F'') at r^2."""
        return f_prime(rsq, self.a), f_double_prime(rsq, self.a)

    def differential_matrix(self, p: ResolvedPoint) -> np.ndarray:
        """4x3 complex matrix sending chart components to (dX, dY, dU, dV)."""
        return np.column_stack([ambient_differential(p, e)[0] for e in np.eye(3)])

    def hermitian(self, p: ResolvedPoint) -> np.ndarray:
        rsq = p.rsq
        if rsq == 0 and self.a == 0:
            raise DomainError("the conifold metric is singular at the vertex")
        fp, fpp = self.radial(rsq)
        D = self.differential_matrix(p)
        theta = p.xyuv.conj() @ D
        H = fp * (D.T @ D.conj()) + fpp * np.outer(theta, theta.conj())
        l = p.local[2]
        H[2, 2] += 4.0 * self.a**2 / (1.0 + abs(l) ** 2) ** 2
        return H

    def volume_sign(self, p: ResolvedPoint) -> float:
        # dV ^ dX ^ dl- = -dX ^ dV ^ dl-
        return 1.0 if p.patch is Patch.PLUS else -1.0

    def as_dict(self) -> dict:
        return {"kind": "ResolvedConifold", "a": self.a}


# -- evaluators --------------------------------------------------------------


def _h(s: CYStructure, u: TangentVector, v: TangentVector, H=None) -> complex:
    check_same_base(u.base, v.base)
    H = s.hermitian(u.base) if H is None else H
    return complex(u.components @ H @ v.components.conj())


def metric_eval(s: CYStructure, p, u: TangentVector, v: TangentVector) -> float:
    check_same_base(p, u.base)
    return _h(s, u, v).real


def complex_structure_apply(p, v: TangentVector) -> TangentVector:
    """J is multiplication by i on holomorphic chart components."""
    check_same_base(p, v.base)
    return TangentVector(v.base, 1j * v.components)


def kahler_form_eval(s: CYStructure, p, u: TangentVector, v: TangentVector) -> float:
    """w(u, v) = g(Ju, v)."""
    check_same_base(p, u.base)
    return -_h(s, u, v).imag


def alpha_form_eval(s: ResolvedConifold, p: ResolvedPoint, v: TangentVector) -> float:
    """alpha_rc(v) = F'(r^2) Im tr(W* dW)(v)."""
    check_same_base(p, v.base)
    dw, _ = ambient_differential(p, v.components)
    return float(f_prime(p.rsq, s.a) * np.vdot(p.xyuv, dw).imag)


def alpha_pm_eval(p: ResolvedPoint, v: TangentVector) -> float:
    """alpha_+-(v) = (1/2) Im(conj(l) dl) / (1 + |l|^2), with d alpha_+- the area-pi form."""
    check_same_base(p, v.base)
    l = p.local[2]
    return float(0.5 * (np.conj(l) * v.components[2]).imag / (1.0 + abs(l) ** 2))


def holomorphic_volume_eval(s: CYStructure, p, v1, v2, v3) -> complex:
    for v in (v1, v2, v3):
        check_same_base(p, v.base)
    M = np.column_stack([v1.components, v2.components, v3.components])
    return complex(s.volume_sign(p) * np.linalg.det(M))


def gram_matrix(s: CYStructure, vectors) -> np.ndarray:
    """Real Gram matrix g(v_i, v_j)."""
    p = vectors[0].base
    H = s.hermitian(p)
    C = np.column_stack([v.components for v in vectors])
    return (C.T @ H @ C.conj()).real


def monge_ampere_ratio(s: CYStructure, p) -> float:
    """omega^3/3! on the real chart frame (e1, ie1, ..., e3, ie3) over |Omega(e1, e2, e3)|^2.

    The numerator is sqrt(det) of the 6x6 real Gram matrix. Constancy in p
    is equivalent to Ricci-flatness.
    """
    if isinstance(p, ResolvedPoint) and p.is_bolt:
        raise BoltError("Monge-Ampere ratio is evaluated off the zero section")
    basis = []
    for e in np.eye(3):
        basis += [TangentVector(p, e), TangentVector(p, 1j * e)]
    G = gram_matrix(s, basis)
    vol = np.sqrt(np.linalg.det(G))
    omega = holomorphic_volume_eval(s, p, *(TangentVector(p, e) for e in np.eye(3)))
    return float(vol / abs(omega) ** 2)


def exterior_derivative(form, p: ResolvedPoint, u: TangentVector, v: TangentVector) -> float:
    """d(form)(u, v) for a one-form `form(q, comps) -> float` by chart finite differences.

    u and v are extended as constant-coefficient fields, so their bracket vanishes.
    """
    check_same_base(p, u.base)
    check_same_base(p, v.base)
    x = p.local
    h = fd_step(np.max(np.abs(x)))

    def along(direction, other):
        def f(t):
            q = ResolvedPoint.from_local(p.patch, x + t * direction)
            return form(q, other)
        return richardson_derivative(f, h)

    return float(along(u.components, v.components) - along(v.components, u.components))
