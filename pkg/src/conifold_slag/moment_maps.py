"""Moment maps of the T^2 and SO(3) actions on the resolved conifold.

For a generator with complex matrix M (acting on w = (X, Y, U, V)) and spin
part R (its trace-free action on [l1 : l2]) the equivariant moment map is

    mu_M = -1/2 F'(r^2) Im(w* M w) - 2 a^2 Im(l* R l) / |l|^2

normalised so that d mu_M(v) = w(X_M, v). The T^2 components are shifted by
the constant a^2 so that they read 1/2 F'(|X|^2 - |Y|^2) + 2 a^2 mu_S2 with
mu_S2 = |l2|^2 / |l|^2, which vanishes at [1 : 0].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ambient import (
    GENERATORS,
    SO3_GENERATORS,
    T2_GENERATORS,
    Generator,
    ResolvedPoint,
    TangentVector,
    check_same_base,
)
from .cy_structure import ResolvedConifold, f_prime, kahler_form_eval
from .numerics import fd_step, richardson_derivative

__all__ = [
    "MomentValue", "moment_component", "t2_moment", "so3_moment", "mu_s2",
    "generator_vector_field", "hamiltonian_residual", "moment_of",
]


@dataclass(frozen=True)
class MomentValue:
    components: np.ndarray
    frame: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", np.asarray(self.components, dtype=float))

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, k):
        return self.components[k]


def mu_s2(p: ResolvedPoint) -> float:
    l1, l2 = p.lam
    return float(abs(l2) ** 2 / (abs(l1) ** 2 + abs(l2) ** 2))


def moment_component(s: ResolvedConifold, gen: Generator, p: ResolvedPoint) -> float:
    """Equivariant moment map of a single so(4) generator."""
    w = p.xyuv
    fiber = 0.0
    if p.rsq > 0:
        fiber = -0.5 * f_prime(p.rsq, s.a) * np.vdot(w, gen.matrix @ w).imag
    l = p.lam
    sphere = -2.0 * s.a**2 * np.vdot(l, gen.spin @ l).imag / np.vdot(l, l).real
    return float(fiber + sphere)


def moment_of(s: ResolvedConifold, real_generator, p: ResolvedPoint) -> float:
    """Moment map of an arbitrary real antisymmetric 4x4 generator."""
    return moment_component(s, Generator("adhoc", np.asarray(real_generator, float)), p)


def t2_moment(s: ResolvedConifold, p: ResolvedPoint) -> MomentValue:
    """(1/2 F'(|X|^2-|Y|^2) + 2a^2 mu_S2, 1/2 F'(|V|^2-|U|^2) + 2a^2 mu_S2)."""
    shift = s.a**2
    comps = [moment_component(s, g, p) + shift for g in T2_GENERATORS]
    return MomentValue(np.array(comps), tuple(g.name for g in T2_GENERATORS))


def so3_moment(s: ResolvedConifold, p: ResolvedPoint) -> MomentValue:
    """Components along (A1, A2, A3); equivariant, with no constant shift."""
    comps = [moment_component(s, g, p) for g in SO3_GENERATORS]
    return MomentValue(np.array(comps), tuple(g.name for g in SO3_GENERATORS))


def generator_vector_field(gen: Generator | str, p: ResolvedPoint) -> TangentVector:
    """Chart components of the infinitesimal action at p."""
    if isinstance(gen, str):
        gen = GENERATORS[gen]
    return gen.vector_field(p)


def hamiltonian_residual(s: ResolvedConifold, gen: Generator, p: ResolvedPoint, v: TangentVector) -> float:
    """|d mu(v) - w(X_gen, v)| with d mu by Richardson-extrapolated central differences."""
    check_same_base(p, v.base)
    x = p.local
    h = fd_step(np.max(np.abs(x)))

    def mu_along(t):
        return moment_component(s, gen, ResolvedPoint.from_local(p.patch, x + t * v.components))

    dmu = float(richardson_derivative(mu_along, h))
    return abs(dmu - kahler_form_eval(s, p, generator_vector_field(gen, p), v))
