"""Numerical certification of calibrated geometry on sampled leaves.

All residuals are normalised so that rescaling any frame vector by a
non-zero real number leaves them unchanged.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .ambient import GroupElement, ResolvedPoint, TangentFrame, TangentVector, transition_vector
from .cy_structure import (
    CYStructure,
    FlatPoint,
    ResolvedConifold,
    alpha_form_eval,
    gram_matrix,
    holomorphic_volume_eval,
    kahler_form_eval,
    metric_eval,
)
from .errors import RankDeficient, ZeroVolumeForm
from .slag_families import SO3Leaf, T2Leaf, LeafSample, cone_residual, leaf_equation_residual

__all__ = [
    "Tolerances", "Form", "VerificationReport", "frame_conditioning", "lagrangian_residual",
    "special_residual", "calibration_ratio", "omega_phase", "invariance_residual", "run_report",
    "perturb_sample", "phase_rotated_frame", "frame_in_other_patch",
]

RANK_TOL = 1e-8
ZERO_VOLUME = 1e-14


@dataclass(frozen=True)
class Tolerances:
    lagrangian: float = 1e-8
    special: float = 1e-8
    calibration: float = 1e-6
    leaf: float = 1e-9

    def __post_init__(self):
        for k, v in asdict(self).items():
            if not v > 0:
                raise ValueError(f"tolerance {k} must be positive")


class Form(str, Enum):
    METRIC = "Metric"
    KAHLER = "Kahler"
    HOLOVOL = "HoloVol"
    ALPHA_RC = "AlphaRC"


def _norms(s, f: TangentFrame):
    G = gram_matrix(s, f.vectors)
    return G, np.sqrt(np.diag(G))


def frame_conditioning(f: TangentFrame) -> float:
    """Smallest singular value of the real 6x3 component matrix with unit columns."""
    C = np.column_stack([v.components for v in f.vectors])
    R = np.vstack([C.real, C.imag])
    n = np.linalg.norm(R, axis=0)
    if np.any(n == 0):
        return 0.0
    return float(np.linalg.svd(R / n, compute_uv=False)[-1])


def _check_rank(f):
    sv = frame_conditioning(f)
    if sv < RANK_TOL:
        raise RankDeficient(f"frame is degenerate (smallest singular value {sv:.3e})")


def lagrangian_residual(s: CYStructure, f: TangentFrame) -> float:
    """max_{i<j} |w(v_i, v_j)| / (|v_i| |v_j|)."""
    _check_rank(f)
    _, n = _norms(s, f)
    v = f.vectors
    return float(max(abs(kahler_form_eval(s, f.base, v[i], v[j])) / (n[i] * n[j])
                     for i, j in ((0, 1), (0, 2), (1, 2))))


def _omega(s, f):
    om = holomorphic_volume_eval(s, f.base, *f.vectors)
    scale = np.prod([np.linalg.norm(v.components) for v in f.vectors])
    if abs(om) < ZERO_VOLUME * scale:
        raise ZeroVolumeForm("Omega vanishes on the frame")
    return om


def special_residual(s: CYStructure, f: TangentFrame) -> float:
    """|Im Omega(v1, v2, v3)| / |Omega(v1, v2, v3)|."""
    om = _omega(s, f)
    return float(abs(om.imag) / abs(om))


def omega_phase(s: CYStructure, f: TangentFrame) -> float:
    """Phase of Omega on the frame, folded to (-pi/2, pi/2] (frame orientation is not fixed)."""
    om = _omega(s, f)
    ph = np.angle(om)
    if ph > np.pi / 2:
        ph -= np.pi
    elif ph <= -np.pi / 2:
        ph += np.pi
    return float(ph)


def calibration_ratio(s: CYStructure, f: TangentFrame) -> float:
    """sqrt(det G) / |Omega| with G the real Gram matrix of the frame."""
    om = _omega(s, f)
    G, _ = _norms(s, f)
    return float(np.sqrt(max(np.linalg.det(G), 0.0)) / abs(om))


def _form_value(s, form: Form, p, vecs):
    if form is Form.METRIC:
        return metric_eval(s, p, vecs[0], vecs[1])
    if form is Form.KAHLER:
        return kahler_form_eval(s, p, vecs[0], vecs[1])
    if form is Form.HOLOVOL:
        return holomorphic_volume_eval(s, p, *vecs[:3])
    return alpha_form_eval(s, p, vecs[0])


def invariance_residual(s: ResolvedConifold, form: Form | str, g: GroupElement, points, frames) -> float:
    """max over samples of |form(g_* frame at g.p) - form(frame at p)|, normalised by the g-norms involved."""
    form = Form(form)
    worst = 0.0
    for p, f in zip(points, frames):
        vecs = f.vectors
        q = g.act(p)
        pushed = [g.push(v, q) for v in vecs]
        arity = {Form.METRIC: 2, Form.KAHLER: 2, Form.HOLOVOL: 3, Form.ALPHA_RC: 1}[form]
        before = _form_value(s, form, p, vecs)
        after = _form_value(s, form, q, pushed)
        norms = [np.sqrt(metric_eval(s, p, v, v)) for v in vecs[:arity]]
        worst = max(worst, abs(after - before) / np.prod(norms))
    return float(worst)


def frame_in_other_patch(f: TangentFrame) -> TangentFrame:
    """The same frame read in the other chart (raises PatchBoundary off the overlap)."""
    vs = [transition_vector(v) for v in f.vectors]
    return TangentFrame(vs[0].base, *vs)


def phase_rotated_frame(f: TangentFrame, angle: float, coordinate: int = 0) -> TangentFrame:
    """Multiply one holomorphic component of every frame vector by e^{i angle} (a negative control)."""
    ph = np.ones(3, complex)
    ph[coordinate] = np.exp(1j * angle)
    return TangentFrame(f.base, *(TangentVector(f.base, v.components * ph) for v in f.vectors))


def perturb_sample(sample: LeafSample, eps: float, rng) -> LeafSample:
    """Move every point off the leaf by a relative chart displacement eps; frame components are kept."""
    pts, frames = [], []
    for p, f in zip(sample.points, sample.frames):
        if isinstance(p, FlatPoint):
            x = p.z
            d = rng.normal(size=3) + 1j * rng.normal(size=3)
            q = FlatPoint(x + eps * max(1.0, np.linalg.norm(x)) * d / np.linalg.norm(d))
        else:
            x = p.local
            d = rng.normal(size=3) + 1j * rng.normal(size=3)
            q = ResolvedPoint.from_local(p.patch, x + eps * max(1.0, np.linalg.norm(x)) * d / np.linalg.norm(d))
        pts.append(q)
        frames.append(TangentFrame(q, *(TangentVector(q, v.components) for v in f.vectors)))
    notes = dict(sample.notes, perturbed=eps)
    return LeafSample(sample.spec, tuple(pts), tuple(frames), sample.parameters, notes)


COLUMNS = ("leafResidual", "lagrangianResidual", "specialResidual", "calibrationRatio", "coneResidual")


@dataclass
class VerificationReport:
    structure: dict
    spec: dict
    tolerances: dict
    rows: list
    summary: dict
    passed: bool
    kappa: float | None
    phase: float | None
    seed: int | None = None
    skipped: int = 0
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False)


def _stats(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return {"max": None, "mean": None, "stddev": None, "count": 0}
    a = np.asarray(vals, float)
    return {"max": float(a.max()), "mean": float(a.mean()), "stddev": float(a.std()), "count": int(a.size)}


def run_report(s: CYStructure, sample: LeafSample, tolerances: Tolerances | None = None,
               seed: int | None = None) -> VerificationReport:
    """Evaluate every residual on every sample and decide pass/fail.

    Degenerate frames (rank or volume) are recorded with null residuals and
    excluded from the statistics. The calibration gate is the relative
    standard deviation of the ratio over the sample.
    """
    tol = tolerances or Tolerances()
    fam = sample.spec.family
    cone_family = "T2" if isinstance(fam, T2Leaf) else "SO3" if isinstance(fam, SO3Leaf) else None
    rows, phases, skipped = [], [], 0
    for k, (p, f) in enumerate(zip(sample.points, sample.frames)):
        row = {"index": k, "degenerate": False}
        row["leafResidual"] = leaf_equation_residual(sample.spec, p, s if isinstance(s, ResolvedConifold) else None)
        row["coneResidual"] = cone_residual(cone_family, p) if cone_family else None
        try:
            row["lagrangianResidual"] = lagrangian_residual(s, f)
            row["specialResidual"] = special_residual(s, f)
            row["calibrationRatio"] = calibration_ratio(s, f)
            phases.append(omega_phase(s, f))
        except (RankDeficient, ZeroVolumeForm):
            row.update(degenerate=True, lagrangianResidual=None, specialResidual=None, calibrationRatio=None)
            skipped += 1
        rows.append(row)
    summary = {c: _stats([r[c] for r in rows]) for c in COLUMNS}
    cal = summary["calibrationRatio"]
    rel_std = cal["stddev"] / cal["mean"] if cal["count"] else None
    summary["calibrationRelativeStddev"] = rel_std
    checks = {
        "leaf": summary["leafResidual"]["max"] is not None and summary["leafResidual"]["max"] <= tol.leaf,
        "lagrangian": summary["lagrangianResidual"]["max"] is not None and summary["lagrangianResidual"]["max"] <= tol.lagrangian,
        "special": summary["specialResidual"]["max"] is not None and summary["specialResidual"]["max"] <= tol.special,
        "calibration": rel_std is not None and rel_std <= tol.calibration,
    }
    kappa = float(np.median([r["calibrationRatio"] for r in rows if not r["degenerate"]])) if cal["count"] else None
    phase = float(np.median(phases)) if phases else None
    struct = s.as_dict() if hasattr(s, "as_dict") else {"kind": type(s).__name__}
    return VerificationReport(struct, sample.spec.as_dict(), asdict(tol), rows, summary, all(checks.values()),
                              kappa, phase, seed, skipped, {"checks": checks, **_jsonable(sample.notes)})


def _jsonable(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, (np.floating, np.integer)):
            v = v.item()
        out[k] = v
    return out
