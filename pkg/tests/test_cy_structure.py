import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from conifold_slag.ambient import GENERATORS, Patch, ResolvedPoint, conjugate_action, random_so4, transition_vector
from conifold_slag.cy_structure import (
    FlatC3,
    FlatPoint,
    ResolvedConifold,
    alpha_form_eval,
    alpha_pm_eval,
    complex_structure_apply,
    exterior_derivative,
    f_double_prime,
    f_prime,
    gamma_closed_form,
    holomorphic_volume_eval,
    kahler_form_eval,
    metric_eval,
    monge_ampere_ratio,
    solve_gamma,
)
from conifold_slag.errors import BoltError, DomainError
from conifold_slag.numerics import richardson_derivative

from conftest import frame, point, rand_point, rand_vec, vec

rsq_st = st.floats(min_value=1e-3, max_value=1e4)
a_st = st.floats(min_value=0.0, max_value=2.0)


def _cubic_root(rsq, a):
    # independent oracle: companion-matrix roots of the cubic
    roots = np.roots([1.0, 6 * a * a, 0.0, -rsq * rsq])
    real = roots[abs(roots.imag) < 1e-9 * max(1, rsq)].real
    return real[real > 0].max()


def test_gamma_examples():
    assert solve_gamma(1.0, 0.0).gamma == pytest.approx(1.0, abs=1e-15)
    assert solve_gamma(4.0, 1.0).gamma == pytest.approx(2 * np.sqrt(3) - 2, abs=1e-14)
    assert f_prime(4.0, 1.0) == pytest.approx((np.sqrt(3) - 1) / 2, abs=1e-14)
    with pytest.raises(DomainError):
        solve_gamma(0.0, 0.0)
    with pytest.raises(DomainError):
        solve_gamma(-1.0, 1.0)


@given(rsq_st, a_st)
def test_gamma_matches_polynomial_roots(rsq, a):
    g = solve_gamma(rsq, a).gamma
    assert g > 0
    assert abs(g - _cubic_root(rsq, a)) <= 1e-9 * max(1, g)
    assert abs(g**3 + 6 * a * a * g * g - rsq * rsq) <= 1e-12 * max(1, rsq**4)


@given(rsq_st, a_st)
def test_gamma_derivative_identity(rsq, a):
    r = solve_gamma(rsq, a)
    assert abs(r.gamma_prime * r.gamma * (r.gamma + 4 * a * a) - 2 * rsq / 3) <= 1e-12 * max(1, rsq)
    if rsq > 1e-2:
        fd = richardson_derivative(lambda t: solve_gamma(rsq + t, a).gamma, 1e-3 * rsq)
        assert abs(fd - r.gamma_prime) <= 1e-7 * max(1, abs(fd))


def test_gamma_vectorised_agrees_with_scalar():
    rsq = np.logspace(-3, 4, 40)
    vec_g = solve_gamma(rsq, 0.7).gamma
    assert np.allclose(vec_g, [solve_gamma(r, 0.7).gamma for r in rsq], rtol=1e-14)


@pytest.mark.parametrize("rsq,a", [(100.0, 1.0), (2.0, 1.0), (0.1, 1.0), (5.0, 0.0)])
def test_closed_form_branches(rsq, a):
    assert gamma_closed_form(rsq, a) == pytest.approx(solve_gamma(rsq, a).gamma, rel=1e-10)


def test_closed_form_at_zero_a_is_power_law():
    r = np.logspace(-2, 3, 11)
    assert np.allclose(gamma_closed_form(r, 0.0), r ** (2 / 3), rtol=1e-12)


def test_radial_function_at_zero_a():
    r = np.logspace(-3, 6, 50)
    assert np.allclose(f_prime(r, 0.0), r ** (-1 / 3), rtol=1e-12)
    assert np.allclose(f_double_prime(r, 0.0), -(1 / 3) * r ** (-4 / 3), rtol=1e-11)


@given(st.floats(min_value=1e-2, max_value=1e3), st.floats(min_value=0.1, max_value=2.0))
def test_second_derivative_by_differences(rsq, a):
    fd = richardson_derivative(lambda t: f_prime(rsq + t, a), 1e-3 * rsq)
    assert abs(fd - f_double_prime(rsq, a)) <= 1e-6 * abs(fd)


def test_bolt_limits():
    for a in (0.5, 1.0, 2.0):
        assert f_prime(0.0, a) == pytest.approx(1 / (np.sqrt(6) * a), rel=1e-15)
        assert f_prime(1e-9, a) == pytest.approx(1 / (np.sqrt(6) * a), rel=1e-6)
        assert f_double_prime(0.0, a) == pytest.approx(-1 / (72 * a**4), rel=1e-15)
        assert f_double_prime(1e-9, a) == pytest.approx(-1 / (72 * a**4), rel=1e-5)


def test_approach_to_the_cone():
    # F'_a / r^(-2/3) - 1 ~ -2 a^2 r^(-4/3): measured deviation and its rate
    rsq = np.array([1e3, 1e4, 1e5, 1e6])
    dev = np.abs(f_prime(rsq, 1.0) / rsq ** (-1 / 3) - 1)
    assert np.allclose(dev * rsq ** (2 / 3), 2.0, rtol=0.05)
    assert dev[0] > 1e-2 > dev[1] > 1e-3 > dev[2]


def _potential(s):
    def F(r2):
        # t = u^3 removes the t^(-1/3) singularity of the cone
        return quad(lambda u: 3 * u * u * f_prime(u**3, s.a), 0.0, r2 ** (1 / 3), epsabs=1e-13, epsrel=1e-12)[0]

    def K(x):
        p = ResolvedPoint.from_local(Patch.PLUS, x)
        return F(p.rsq) + 4 * s.a**2 * np.log(1 + abs(x[2]) ** 2)
    return K


@pytest.mark.parametrize("a", [0.0, 1.0])
def test_metric_is_hessian_of_kahler_potential(a):
    s = ResolvedConifold(a)
    K = _potential(s)
    x0 = np.array([0.4 + 0.3j, -0.7 + 0.2j, 0.5 - 0.6j])
    h = 1e-3

    def d2(u, v):
        return (K(x0 + h * u + h * v) - K(x0 + h * u - h * v) - K(x0 - h * u + h * v) + K(x0 - h * u - h * v)) / (4 * h * h)

    H = np.zeros((3, 3), complex)
    E = np.eye(3)
    for j in range(3):
        for k in range(3):
            H[j, k] = 0.25 * (d2(E[j], E[k]) + 1j * d2(E[j], 1j * E[k]) - 1j * d2(1j * E[j], E[k])
                              + d2(1j * E[j], 1j * E[k]))
    ours = s.hermitian(point(Patch.PLUS, x0))
    assert np.max(abs(ours - H)) < 1e-5
    assert abs(np.linalg.det(H).real - 2 / 3) < 1e-5


def test_flat_metric_values():
    p = FlatPoint(np.array([0.3, -1, 2j]))
    e1 = vec(p, [1, 0, 0])
    ie1 = vec(p, [1j, 0, 0])
    flat = FlatC3()
    assert metric_eval(flat, p, e1, e1) == 1.0
    assert metric_eval(flat, p, e1, ie1) == 0.0
    assert kahler_form_eval(flat, p, e1, ie1) == 1.0
    assert monge_ampere_ratio(flat, p) == pytest.approx(1.0, abs=1e-15)


def test_bolt_metric_is_round_sphere():
    a = 1.3
    s = ResolvedConifold(a)
    for l in (0.0, 0.5 - 0.2j, 3.0j):
        p = ResolvedPoint.from_local(Patch.PLUS, [0, 0, l])
        v = vec(p, [0, 0, 1.0])
        assert metric_eval(s, p, v, v) == pytest.approx(4 * a * a / (1 + abs(l) ** 2) ** 2, rel=1e-14)


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0, 2.0])
def test_metric_is_symmetric_and_positive(a, rng):
    s = ResolvedConifold(a)
    for _ in range(100):
        p = rand_point(rng)
        u, v = rand_vec(rng, p), rand_vec(rng, p)
        assert abs(metric_eval(s, p, u, v) - metric_eval(s, p, v, u)) < 1e-12 * np.sqrt(
            metric_eval(s, p, u, u) * metric_eval(s, p, v, v))
        H = s.hermitian(p)
        G = np.block([[H.real, -H.imag], [H.imag, H.real]])
        np.linalg.cholesky(G)


def test_complex_structure(rng):
    s = ResolvedConifold(1.0)
    p = rand_point(rng)
    u, v = rand_vec(rng, p), rand_vec(rng, p)
    ju = complex_structure_apply(p, u)
    assert np.allclose(complex_structure_apply(p, ju).components, -u.components)
    jv = complex_structure_apply(p, v)
    assert abs(metric_eval(s, p, ju, jv) - metric_eval(s, p, u, v)) < 1e-12 * 10
    assert kahler_form_eval(s, p, u, v) == pytest.approx(metric_eval(s, p, ju, v), abs=1e-12)
    assert kahler_form_eval(s, p, u, v) == pytest.approx(-kahler_form_eval(s, p, v, u), abs=1e-12)
    assert kahler_form_eval(s, p, u, u) == pytest.approx(0, abs=1e-12)
    e = vec(p, [1, 0, 0])
    assert np.allclose(complex_structure_apply(p, e).components, [1j, 0, 0])


def _d_two_form(s, p, u, v, w):
    x = p.local
    h = 1e-4

    def along(direction, a, b):
        return richardson_derivative(
            lambda t: kahler_form_eval(s, q := point(p.patch, x + t * direction), vec(q, a), vec(q, b)), h)

    U, V, W = u.components, v.components, w.components
    return along(U, V, W) - along(V, U, W) + along(W, U, V)


@pytest.mark.parametrize("a", [0.0, 1.0])
def test_kahler_form_is_closed(a, rng):
    s = ResolvedConifold(a)
    for _ in range(20):
        p = rand_point(rng)
        u, v, w = (rand_vec(rng, p) for _ in range(3))
        assert abs(_d_two_form(s, p, u, v, w)) < 1e-6


@pytest.mark.parametrize("a", [0.0, 0.7, 1.0])
def test_kahler_form_from_its_primitives(a, rng):
    s = ResolvedConifold(a)

    def alpha(q, c):
        return alpha_form_eval(s, q, vec(q, c))

    def alpha_pm(q, c):
        return alpha_pm_eval(q, vec(q, c))

    for _ in range(50):
        p = rand_point(rng)
        u, v = rand_vec(rng, p), rand_vec(rng, p)
        lhs = kahler_form_eval(s, p, u, v)
        rhs = 0.5 * exterior_derivative(alpha, p, u, v) + 4 * a * a * exterior_derivative(alpha_pm, p, u, v)
        assert abs(lhs - rhs) < 1e-6 * max(1, abs(lhs))


def test_alpha_vanishes_on_radial_direction(rng):
    s = ResolvedConifold(1.0)
    p = rand_point(rng)
    radial = vec(p, p.local * np.array([1, 1, 0]))
    assert abs(alpha_form_eval(s, p, radial)) < 1e-14


def test_alpha_rc_is_so4_invariant(rng):
    s = ResolvedConifold(1.0)
    for _ in range(20):
        g = conjugate_action(random_so4(rng))
        p = rand_point(rng)
        v = rand_vec(rng, p)
        q = g.act(p)
        before = alpha_form_eval(s, p, v)
        after = alpha_form_eval(s, q, g.push(v, q))
        assert abs(after - before) < 1e-10 * np.sqrt(metric_eval(s, p, v, v))


def test_alpha_pm_torus_invariant_only(rng):
    p = rand_point(rng, patch=Patch.PLUS)
    v = rand_vec(rng, p)
    for g in (GENERATORS["B1"].exp(0.4), GENERATORS["B2"].exp(-1.1), GENERATORS["A1"].exp(0.9)):
        q = g.act(p, Patch.PLUS)
        assert abs(alpha_pm_eval(q, g.push(v, q)) - alpha_pm_eval(p, v)) < 1e-13
    g = GENERATORS["A3"].exp(0.8)
    q = g.act(p, Patch.PLUS)
    assert abs(alpha_pm_eval(q, g.push(v, q)) - alpha_pm_eval(p, v)) > 1e-3


def test_holomorphic_volume_examples():
    s = ResolvedConifold(1.0)
    p = point(Patch.PLUS, [0.3, 1.2j, -0.5])
    f = frame(p, [1, 0, 0], [0, 1, 0], [0, 0, 1])
    assert holomorphic_volume_eval(s, p, *f.vectors) == 1.0
    U, Y, l = p.local
    dU, dY, dl = 0.2 - 1j, 0.7, 1.5j
    v1 = vec(p, [0, 1j * Y, -1j * l])
    v2 = vec(p, [1j * U, 0, -1j * l])
    v3 = vec(p, [dU, dY, dl])
    expected = dU * Y * l + U * dY * l + U * Y * dl
    assert abs(holomorphic_volume_eval(s, p, v1, v2, v3) - expected) < 1e-15


def test_holomorphic_volume_patch_overlap(rng):
    s = ResolvedConifold(1.0)
    for _ in range(50):
        p = rand_point(rng)
        f = [rand_vec(rng, p) for _ in range(3)]
        om = holomorphic_volume_eval(s, p, *f)
        g = [transition_vector(v) for v in f]
        assert abs(holomorphic_volume_eval(s, g[0].base, *g) - om) < 1e-10 * abs(om)


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0, 2.0])
def test_monge_ampere_ratio_is_constant(a, rng):
    s = ResolvedConifold(a)
    vals = np.array([monge_ampere_ratio(s, rand_point(rng, scale=2.0)) for _ in range(100)])
    assert vals.std() / vals.mean() < 1e-8
    assert vals.mean() == pytest.approx(2 / 3, rel=1e-10)


def test_monge_ampere_at_bolt_raises():
    with pytest.raises(BoltError):
        monge_ampere_ratio(ResolvedConifold(1.0), ResolvedPoint.on_bolt([1, 0.3]))


def test_small_a_converges_to_cone(rng):
    p = rand_point(rng, scale=3.0)
    h0 = ResolvedConifold(0.0).hermitian(p)
    errs = [np.max(abs(ResolvedConifold(a).hermitian(p) - h0)) for a in (1e-1, 1e-2, 1e-3)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-4


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_closed_form_at_zero_discriminant(a):
    rsq = np.sqrt(32.0) * a**3
    assert gamma_closed_form(rsq, a) == pytest.approx(solve_gamma(rsq, a).gamma, rel=1e-10)
