import numpy as np
import pytest
from scipy.optimize import least_squares

from conifold_slag.ambient import Patch, ResolvedPoint, lift_to_resolved, to_xyuv
from conifold_slag.cy_structure import FlatC3, ResolvedConifold, f_prime
from conifold_slag.errors import DegenerateOrbit, DomainError, NoConvergence
from conifold_slag.moment_maps import mu_s2, so3_moment
from conifold_slag.slag_families import (
    Branch,
    HLSO3Flat,
    HLTorusFlat,
    LeafSpec,
    SO3Leaf,
    T2Leaf,
    cone_residual,
    foliation_singular_values,
    hl_flat_so3,
    hl_flat_torus,
    leaf_equation_residual,
    so3_branch_curve,
    so3_leaf_sample,
    t2_bolt_circle,
    t2_leaf_residual,
    t2_leaf_sample,
    t2_leaf_solve,
)
from conifold_slag.verify import lagrangian_residual, special_residual

from conftest import rand_point


def _leaf_oracle(a, x, c):
    # the T^2 leaf equations written out in gauge coordinates (U, Y > 0, l+ = al + i be)
    ru, ry, al, be = x
    l = al + 1j * be
    U, Y = ru, ry
    X, V = -l * U, -l * Y
    rsq = abs(X) ** 2 + abs(Y) ** 2 + abs(U) ** 2 + abs(V) ** 2
    fp = f_prime(rsq, a)
    m = abs(l) ** 2 / (1 + abs(l) ** 2)
    return np.array([0.5 * fp * (abs(X) ** 2 - abs(Y) ** 2) + 2 * a * a * m - c[0],
                     0.5 * fp * (abs(V) ** 2 - abs(U) ** 2) + 2 * a * a * m - c[1],
                     (X * Y).imag - c[2]])


def test_spec_serialisation():
    d = LeafSpec(SO3Leaf(1.0, Branch.MINUS), 0.5).as_dict()
    assert d == {"family": "SO3Leaf", "a": 0.5, "c": 1.0, "branch": "minus"}
    d = LeafSpec(HLTorusFlat(0.0, 1.0, 1.0)).as_dict()
    assert d["a"] is None and d["c2"] == 1.0


def test_t2_residual_components(rng):
    s = ResolvedConifold(1.0)
    p = rand_point(rng)
    r = t2_leaf_residual(s, p, (0.0, 0.0, 0.0))
    assert r[2] == pytest.approx((p.X * p.Y).imag, abs=1e-15)


@pytest.mark.parametrize("c,slice_", [((0.3, 0.1, 0.2), 1.0), ((-0.4, 0.2, 0.1), 2.0), ((1.0, -0.5, -0.3), 1.0)])
def test_t2_solve_against_written_out_equations(c, slice_):
    s = ResolvedConifold(1.0)
    p = t2_leaf_solve(s, c, slice_)
    assert np.max(abs(t2_leaf_residual(s, p, c))) < 1e-10
    x = np.array([p.U.real, p.Y.real, p.local[2].real, p.local[2].imag])
    assert abs(p.U.imag) == 0 and p.Y.real == slice_
    assert np.max(abs(_leaf_oracle(1.0, x, c))) < 1e-10
    # a generic least-squares solve from a nearby start returns to the same point
    start = x[[0, 2, 3]] + 0.01
    sol = least_squares(lambda y: _leaf_oracle(1.0, (y[0], slice_, y[1], y[2]), c), start,
                        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    assert np.max(abs(sol.fun)) < 1e-10
    assert np.allclose(sol.x, x[[0, 2, 3]], atol=1e-7)


def test_t2_slice_that_misses_the_leaf():
    # rho_Y = 1 does not meet this leaf: multi-start least squares stalls at residual ~0.22
    s = ResolvedConifold(1.0)
    c = (-0.4, 0.2, 0.1)
    with pytest.raises(NoConvergence):
        t2_leaf_solve(s, c, 1.0)
    starts = np.random.default_rng(0).normal(size=(40, 3)) * [2, 1.5, 1.5]
    starts[:, 0] = abs(starts[:, 0])
    bounds = ([1e-9, -np.inf, -np.inf], np.inf)
    best = min(np.max(abs(least_squares(lambda y: _leaf_oracle(1.0, (y[0], 1.0, y[1], y[2]), c), st, bounds=bounds).fun))
               for st in starts)
    assert best > 0.1


def test_t2_cone_at_zero():
    s = ResolvedConifold(0.0)
    p = t2_leaf_solve(s, (0, 0, 0), 1.0)
    assert cone_residual("T2", p) < 1e-12


def test_t2_pinned_radius():
    s = ResolvedConifold(1.0)
    p = t2_leaf_solve(s, (0.3, 0.1, 0.2), 10.0, pin="rsq")
    assert p.rsq == pytest.approx(10.0, rel=1e-12)
    with pytest.raises(DomainError):
        t2_leaf_solve(s, (0.3, 0.1, 0.2), -1.0, pin="rsq")


@pytest.mark.parametrize("a,c1", [(1.0, 0.5), (1.0, 1.5), (0.7, 0.2)])
def test_bolt_touching_leaf_limit(a, c1):
    s = ResolvedConifold(a)
    p = t2_leaf_solve(s, (c1, c1, 0.0), 1e-8, pin="rsq")
    assert mu_s2(p) == pytest.approx(c1 / (2 * a * a), abs=1e-6)
    pts, frames, _ = t2_bolt_circle(s, c1, 8)
    for q, f in zip(pts, frames):
        assert q.is_bolt and mu_s2(q) == pytest.approx(c1 / (2 * a * a), abs=1e-14)
        assert np.max(abs(t2_leaf_residual(s, q, (c1, c1, 0.0)))) < 1e-14
        assert lagrangian_residual(s, f) < 1e-12
        assert special_residual(s, f) < 1e-12


def test_bolt_circle_outside_range():
    with pytest.raises(DomainError):
        t2_bolt_circle(ResolvedConifold(1.0), 2.5, 4)


@pytest.mark.parametrize("c,a", [((0.3, 0.1, 0.2), 1.0), ((0.0, 0.0, 0.0), 0.0), ((0.5, 0.5, 0.0), 1.0)])
def test_t2_sample_is_special_lagrangian(c, a):
    s = ResolvedConifold(a)
    sample = t2_leaf_sample(s, LeafSpec(T2Leaf(*c), a), 3, 3, 7, (-2.0, 2.0))
    assert len(sample) >= 9 * 5
    for p, f in zip(sample.points, sample.frames):
        assert leaf_equation_residual(sample.spec, p, s) < 1e-9
        assert lagrangian_residual(s, f) < 1e-8
        assert special_residual(s, f) < 1e-8


def test_t2_leaf_radius_profile():
    # along the gauge curve r^2 has a single minimum and grows towards both ends
    s = ResolvedConifold(1.0)
    sample = t2_leaf_sample(s, LeafSpec(T2Leaf(0.3, 0.1, 0.2), 1.0), 1, 1, 21, (-3.0, 3.0))
    r = np.array([p.rsq for p in sample.points])
    d = np.sign(np.diff(r))
    assert np.count_nonzero(np.diff(d)) == 1
    assert r[0] > r.min() * 2 and r[-1] > r.min() * 2


def test_so3_branch_examples():
    Y, _ = so3_branch_curve(1.0, Branch.PLUS, 0.0)
    assert Y == 1.0
    p = lift_to_resolved([0, Y, 0, 0])
    assert p.rsq == pytest.approx(1.0)
    for sv in (-1.0, 0.5, 2.0):
        Y, _ = so3_branch_curve(0.0, Branch.PLUS, sv)
        assert abs((Y * Y).real) < 1e-15
        Y, _ = so3_branch_curve(2.0, Branch.MINUS, sv)
        assert Y.real < -abs(Y.imag)
        assert (Y * Y).real == pytest.approx(2.0, rel=1e-13)
    with pytest.raises(DegenerateOrbit):
        so3_branch_curve(0.0, Branch.PLUS, 0.0)


@pytest.mark.parametrize("c", [0.5, 1.0, -1.0, 0.0])
def test_so3_sample_geometry(c):
    s = ResolvedConifold(1.0)
    sample = so3_leaf_sample(s, LeafSpec(SO3Leaf(c), 1.0), 5, 8)
    for p in sample.points:
        assert leaf_equation_residual(sample.spec, p, s) < 1e-12 * max(1, p.rsq)
        assert p.rsq > 0
    if c > 0:
        assert min(p.rsq for p in sample.points) == pytest.approx(c, abs=1e-10)


def test_so3_sample_is_special_lagrangian_only_on_the_cone_metric():
    for a, expect in ((0.0, True), (1.0, False)):
        s = ResolvedConifold(a)
        sample = so3_leaf_sample(s, LeafSpec(SO3Leaf(1.0), a), 5, 8)
        lag = max(lagrangian_residual(s, f) for f in sample.frames)
        assert (lag < 1e-8) is expect
        if a == 0:
            assert max(np.linalg.norm(so3_moment(s, p).components) for p in sample.points) < 1e-9
        else:
            mu = [np.linalg.norm(so3_moment(s, p).components) for p in sample.points]
            assert np.allclose(mu, a * a, atol=1e-12)


@pytest.mark.parametrize("c", [0.0, 1.0, -0.7])
def test_hl_so3_flat(c):
    sample = hl_flat_so3(c)
    flat = FlatC3()
    for p, f in zip(sample.points, sample.frames):
        assert leaf_equation_residual(sample.spec, p) < 1e-12
        assert lagrangian_residual(flat, f) < 1e-12
        assert special_residual(flat, f) < 1e-12
    if c == 0:
        assert all(np.max(abs(p.z.imag)) == 0 for p in sample.points)


@pytest.mark.parametrize("c", [(0.0, 0.0, 0.0), (0.0, 1.0, 1.0), (0.5, 0.3, -0.2)])
def test_hl_torus_flat(c):
    sample = hl_flat_torus(*c)
    flat = FlatC3()
    for p, f in zip(sample.points, sample.frames):
        assert leaf_equation_residual(sample.spec, p) < 1e-10
        assert lagrangian_residual(flat, f) < 1e-10
        assert special_residual(flat, f) < 1e-10


def test_cone_residual_examples():
    # |X| = |Y|, |U| = |V| and XY real on the quadric
    p = lift_to_resolved([1.0, 1.0, 1j, -1j])
    assert cone_residual("T2", p) == 0.0
    z = np.array([1.0, 0.5, 0.2, 0.1])
    assert cone_residual("SO3", z) == pytest.approx(2 / np.sum(z * z), rel=1e-14)
    assert cone_residual("SO3", lift_to_resolved(to_xyuv([1j * 1, 1, 0, 0]))) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        cone_residual("U1", p)


def test_foliation_is_regular(rng):
    s = ResolvedConifold(1.0)
    for _ in range(50):
        sv = foliation_singular_values(s, rand_point(rng))
        assert sv[2] > 1e-8 * sv[0]


def test_leaf_residual_rejects_unknown_family():
    with pytest.raises(TypeError):
        leaf_equation_residual(LeafSpec(object()), ResolvedPoint.on_bolt([1, 0]))
