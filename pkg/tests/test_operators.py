import math

import numpy as np
import pytest

from cutterkit import (AffineSubspace, Ball, Box, DegenerateSubgradientError,
                       HalfSpace, Hyperplane, RelaxationPair, UsageError,
                       compose, generalized_dr, identity, intersect_affine,
                       nu, projection_operator, proximal, relax,
                       subgradient_projection)

U_PI6 = np.array([math.cos(math.pi / 6), math.sin(math.pi / 6)])
LINE_A = Hyperplane([0.0, 1.0], 0.0)
LINE_B = AffineSubspace([0.0, 0.0], [U_PI6])


def rand_points(n=200, d=2, seed=0, scale=2.0):
    return np.random.default_rng(seed).standard_normal((n, d)) * scale


# ---------------------------------------------------------------------------
# projection operators

def test_projection_operator_examples():
    pa = projection_operator(LINE_A)
    assert np.array_equal(pa(np.array([1.0, 0.0])), [1.0, 0.0])
    pb = projection_operator(LINE_B)
    assert np.max(np.abs(pb(np.array([1.0, 0.0]))
                         - [0.75, math.sqrt(3) / 4])) < 1e-12
    ball = projection_operator(Ball([0.0, 0.0], 1.0))
    assert np.allclose(ball(np.array([0.0, 2.0])), [0.0, 1.0], atol=1e-15)
    # the fix-distance oracle is the set distance
    assert abs(pa.fix_distance(np.array([2.0, 3.0])) - 3.0) < 1e-15


# ---------------------------------------------------------------------------
# relaxation

def test_relax_one_returns_same_map():
    pa = projection_operator(LINE_A)
    r = relax(pa, 1.0)
    x = np.array([1.3, -0.7])
    assert np.array_equal(r(x), pa(x))


def test_relax_two_is_reflection():
    r = relax(projection_operator(LINE_A), 2.0)
    assert np.array_equal(r(np.array([1.0, 1.0])), [1.0, -1.0])


def test_relax_three_on_x_axis():
    r = relax(projection_operator(LINE_A), 3.0)
    pts = rand_points(50)
    out = r(pts)
    assert np.max(np.abs(out[:, 0] - pts[:, 0])) < 1e-12
    assert np.max(np.abs(out[:, 1] + 2.0 * pts[:, 1])) < 1e-12


def test_relax_zero_is_identity_with_full_fixed_set():
    r = relax(projection_operator(LINE_A), 0.0)
    x = np.array([1.0, 2.0])
    assert np.array_equal(r(x), x)
    assert r.fix_distance(x) == 0.0


def test_relax_rejects_negative():
    with pytest.raises(UsageError):
        relax(projection_operator(LINE_A), -0.5)


def test_relax_composition_law():
    rng = np.random.default_rng(1)
    t = projection_operator(LINE_B)
    for lam, mu in [(0.5, 3.0), (2.0, 1.5), (0.0, 2.0), (3.0, 0.25)]:
        lhs = relax(relax(t, lam), mu)
        rhs = relax(t, lam * mu)
        x = rng.standard_normal((100, 2))
        assert np.max(np.abs(lhs(x) - rhs(x))) < 1e-12


def test_relax_preserves_fix_distance():
    r = relax(projection_operator(LINE_A), 2.5)
    assert abs(r.fix_distance(np.array([0.0, 3.0])) - 3.0) < 1e-15


# ---------------------------------------------------------------------------
# composition

def test_compose_identity():
    c = compose(identity(), identity())
    x = np.array([1.0, -2.0])
    assert np.array_equal(c(x), x)


def test_compose_applies_second_argument_first():
    pa = projection_operator(LINE_A)
    pb = projection_operator(LINE_B)
    x = np.array([1.0, 0.0])
    expected = np.array([0.75, math.sqrt(3) / 4])
    assert np.max(np.abs(compose(pb, pa)(x) - expected)) < 1e-12
    # (P_A)_3 fixes (1, 0), so the product lands at the same point
    assert np.max(np.abs(compose(pb, relax(pa, 3.0))(x) - expected)) < 1e-12


def test_compose_dimension_mismatch():
    p2 = projection_operator(LINE_A)
    p3 = projection_operator(Hyperplane([0.0, 0.0, 1.0], 0.0))
    with pytest.raises(UsageError):
        compose(p2, p3)


def test_compose_intersection_oracle_becomes_fix_distance():
    b = Hyperplane([-math.sin(math.pi / 6), math.cos(math.pi / 6)], 0.0)
    inter = intersect_affine(LINE_A, b)
    c = compose(projection_operator(b), projection_operator(LINE_A),
                intersection_distance=inter.distance)
    assert abs(c.fix_distance(np.array([1.0, 0.0])) - 1.0) < 1e-12


# ---------------------------------------------------------------------------
# subgradient projection

def test_subgradient_projection_quadratic_example():
    f = lambda x: float(x @ x) - 1.0
    g = lambda x: 2.0 * x
    p = subgradient_projection(f, g)
    got = p(np.array([2.0, 0.0]))
    assert np.max(np.abs(got - [1.25, 0.0])) < 1e-15


def test_subgradient_projection_fixes_sublevel_set():
    f = lambda x: float(x @ x) - 1.0
    p = subgradient_projection(f, lambda x: 2.0 * x)
    x = np.array([0.5, 0.25])
    assert np.array_equal(p(x), x)


def test_subgradient_projection_matches_halfspace_for_affine_f():
    a = np.array([2.0, -1.0])
    b = 0.5
    hs = projection_operator(HalfSpace(a, b))
    p = subgradient_projection(lambda x: float(a @ x) - b, lambda x: a)
    pts = rand_points(200, seed=5)
    assert np.max(np.abs(p(pts) - hs(pts))) < 1e-12


def test_subgradient_projection_degenerate_subgradient():
    p = subgradient_projection(lambda x: 1.0, lambda x: np.zeros_like(x))
    with pytest.raises(DegenerateSubgradientError):
        p(np.array([1.0, 2.0]))


# ---------------------------------------------------------------------------
# proximal catalog

def test_proximal_indicator_is_projection():
    box = Box([0.0, 0.0], [1.0, 1.0])
    p = proximal(box, t=2.0)
    pts = rand_points(100, seed=2)
    assert np.array_equal(p(pts), box.project(pts))


def test_proximal_l1_soft_thresholding():
    p = proximal("l1", t=1.0)
    assert np.allclose(p(np.array([2.0, -0.5])), [1.0, 0.0], atol=1e-15)
    assert abs(p.fix_distance(np.array([3.0, 4.0])) - 5.0) < 1e-15


def test_proximal_quadratic_midpoint():
    c = np.array([1.0, -1.0])
    p = proximal(("quadratic", c), t=1.0)
    x = np.array([3.0, 1.0])
    assert np.allclose(p(x), (x + c) / 2.0, atol=1e-15)


def test_proximal_validation():
    with pytest.raises(UsageError):
        proximal("unknown-tag")
    with pytest.raises(UsageError):
        proximal("l1", t=0.0)


# ---------------------------------------------------------------------------
# generalized Douglas-Rachford

def test_gdr_classical_reduction():
    b = Hyperplane([-math.sin(math.pi / 6), math.cos(math.pi / 6)], 0.0)
    v = generalized_dr(LINE_A, b, 2.0, 2.0, 0.5)
    got = v(np.array([1.0, 0.0]))
    assert np.max(np.abs(got - [0.75, math.sqrt(3) / 4])) < 1e-12


def test_gdr_step_one_is_plain_product():
    b = Hyperplane([-math.sin(math.pi / 6), math.cos(math.pi / 6)], 0.0)
    v = generalized_dr(LINE_A, b, 1.5, 2.0, 1.0)
    w = compose(relax(projection_operator(b), 2.0),
                relax(projection_operator(LINE_A), 1.5))
    pts = rand_points(100, seed=3)
    assert np.max(np.abs(v(pts) - w(pts))) < 1e-12


def test_gdr_quarter_step_over_relaxed_first_factor():
    # the (3,1) product with step 1/4: first factor (P_A)_3, then P_B
    b = Hyperplane([-math.sin(math.pi / 6), math.cos(math.pi / 6)], 0.0)
    v = generalized_dr(LINE_A, b, 3.0, 1.0, 0.25)
    got = v(np.array([1.0, 0.0]))
    assert np.max(np.abs(got - [15.0 / 16.0, math.sqrt(3) / 16])) < 1e-12


def test_gdr_validation():
    with pytest.raises(UsageError):
        generalized_dr(LINE_A, LINE_B, 0.0, 1.0, 0.5)
    with pytest.raises(UsageError):
        generalized_dr(LINE_A, LINE_B, 1.0, 1.0, 0.0)


def test_fix_distance_consistent_with_fixed_points():
    # fix_distance vanishes exactly where the operator is fixed, sampled
    # on points of the fixed set and points away from it
    rng = np.random.default_rng(17)
    pts = rng.standard_normal((100, 2)) * 2.0
    on_line = LINE_B.project(pts)
    for op in (projection_operator(LINE_B),
               relax(projection_operator(LINE_B), 2.5)):
        assert np.max(np.asarray(op.fix_distance(on_line))) < 1e-10
        assert np.max(np.linalg.norm(op(on_line) - on_line, axis=1)) < 1e-10
        moving = pts[np.asarray(op.fix_distance(pts)) > 1e-8]
        assert np.min(np.linalg.norm(op(moving) - moving, axis=1)) > 0.0


# ---------------------------------------------------------------------------
# sampled operator inequalities

SETS = [
    LINE_A,
    LINE_B,
    HalfSpace([1.0, 1.0], 0.2),
    Ball([0.3, -0.2], 1.2),
    Box([-1.0, -1.0], [0.5, 0.5]),
]


@pytest.mark.parametrize("cset", SETS, ids=lambda s: type(s).__name__)
def test_projections_are_cutters_sampled(cset):
    rng = np.random.default_rng(7)
    x = rng.standard_normal((400, 2)) * 2.0
    z = cset.project(rng.standard_normal((10, 2)) * 2.0)
    px = cset.project(x)
    for zi in z:
        vals = np.einsum("nd,nd->n", zi - px, x - px)
        assert np.max(vals) < 1e-9


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 3.0])
def test_relaxed_cutter_characterization_sampled(lam):
    rng = np.random.default_rng(11)
    t = relax(projection_operator(LINE_B), lam)
    x = rng.standard_normal((400, 2)) * 2.0
    z = LINE_B.project(rng.standard_normal((5, 2)))
    tx = t(x)
    a = tx - x
    aa = np.einsum("nd,nd->n", a, a)
    for zi in z:
        margin = lam * np.einsum("nd,nd->n", zi - x, a) - aa
        assert np.min(margin) > -1e-9
        # demicontraction with rho = (lam-2)/lam
        rho = (lam - 2.0) / lam
        dc = (np.einsum("nd,nd->n", x - zi, x - zi) + rho * aa
              - np.einsum("nd,nd->n", tx - zi, tx - zi))
        assert np.min(dc) > -1e-9


@pytest.mark.parametrize("lam,mu", [(3.0, 1.0), (1.0, 3.0), (0.5, 3.5), (1.5, 2.5)])
def test_product_relaxed_by_inverse_nu_is_cutter_sampled(lam, mu):
    b = Hyperplane([-math.sin(math.pi / 6), math.cos(math.pi / 6)], 0.0)
    t = relax(projection_operator(LINE_A), lam)
    u = relax(projection_operator(b), mu)
    n = nu(RelaxationPair(lam, mu))
    v = relax(compose(u, t), 1.0 / n)
    rng = np.random.default_rng(13)
    x = rng.standard_normal((500, 2)) * 2.0
    vx = v(x)
    z = np.zeros(2)  # Fix T n Fix U = {0}
    vals = np.einsum("nd,nd->n", z - vx, x - vx)
    assert np.max(vals) < 1e-9
