import math

import numpy as np
import pytest

from levy3d import geometry
from levy3d.errors import InvalidInputError
from levy3d.geometry import (
    ShapeKind,
    Target,
    contains,
    contains_points,
    counterexample_ratio,
    descriptors,
    mc_projected_area,
    torus_displacement,
    wrap,
)


# ---------------------------------------------------------------------------
# wrap / displacement
# ---------------------------------------------------------------------------

def test_wrap_one_axis():
    p = wrap((3.9 + 0.4, 0.0, 0.0), 4.0)
    assert p.vec == pytest.approx([-3.7, 0.0, 0.0])


def test_wrap_identity_in_range():
    p = wrap((1.0, -3.99, 2.5), 4.0)
    assert p.vec == pytest.approx([1.0, -3.99, 2.5])


def test_wrap_full_period():
    p = wrap((8.0, -8.0, 0.0), 4.0)
    assert p.vec == pytest.approx([0.0, 0.0, 0.0])


def test_wrap_idempotent_and_additive():
    rng = np.random.default_rng(0)
    hw = 4.0
    pts = rng.uniform(-100, 100, (300, 3))
    shift = rng.uniform(-100, 100, (300, 3))
    w = geometry.wrap_coords(pts, hw)
    assert np.all(w >= -hw) and np.all(w < hw)
    np.testing.assert_allclose(geometry.wrap_coords(w, hw), w, atol=1e-12)
    np.testing.assert_allclose(
        geometry.wrap_coords(pts + shift, hw),
        geometry.wrap_coords(w + shift, hw),
        atol=1e-9,
    )


def test_wrap_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        wrap((np.nan, 0.0, 0.0), 4.0)
    with pytest.raises(InvalidInputError):
        wrap((np.inf, 0.0, 0.0), 4.0)
    with pytest.raises(InvalidInputError):
        geometry.wrap_coords((0.0, 0.0, 0.0), -1.0)


def test_displacement_wraparound():
    a = wrap((3.9, 0.0, 0.0), 4.0)
    b = wrap((-3.9, 0.0, 0.0), 4.0)
    d = torus_displacement(a, b)
    assert d == pytest.approx([-0.2, 0.0, 0.0])
    assert np.linalg.norm(d) == pytest.approx(0.2)


def test_displacement_identity_and_plain():
    a = wrap((1.0, 2.0, 3.0), 32.0)
    assert torus_displacement(a, a) == pytest.approx([0.0, 0.0, 0.0])
    b = wrap((0.0, 0.0, 0.0), 32.0)
    assert torus_displacement(a, b) == pytest.approx([1.0, 2.0, 3.0])


def test_displacement_antisymmetric():
    rng = np.random.default_rng(1)
    for _ in range(100):
        a = wrap(rng.uniform(-16, 16, 3), 16.0)
        b = wrap(rng.uniform(-16, 16, 3), 16.0)
        np.testing.assert_allclose(
            torus_displacement(a, b), -torus_displacement(b, a), atol=1e-12)


def test_displacement_mismatched_half_width():
    with pytest.raises(InvalidInputError):
        torus_displacement(wrap((0, 0, 0), 4.0), wrap((0, 0, 0), 8.0))


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

def test_ball_radial_boundary():
    t = Target.ball(4.0)
    assert contains(t, wrap((0, 0, 3.9), 32.0))
    assert not contains(t, wrap((0, 0, 4.1), 32.0))


def test_disc_slab_boundary():
    t = Target.disc(8.0, d=1.0, axis=2)
    assert contains(t, wrap((7.9, 0, 0.9), 32.0))
    assert not contains(t, wrap((7.9, 0, 1.1), 32.0))


def _segment_distance(p, length, axis):
    """Brute-force distance from p to the axis segment via dense sampling."""
    ts = np.linspace(-length / 2.0, length / 2.0, 4001)
    seg = np.zeros((ts.size, 3))
    seg[:, axis] = ts
    return np.min(np.linalg.norm(seg - np.asarray(p), axis=1))


def test_line_membership_against_dense_segment_oracle():
    L, d = 100.0, 1.0
    t = Target.line(L, d, axis=0)
    hw = 128.0
    assert contains(t, wrap((50.5, 0.5, 0.0), hw))
    rng = np.random.default_rng(2)
    # probe points around the capsule, away from the boundary shell where the
    # dense-sampling oracle has O(L/4000) resolution
    pts = np.column_stack([
        rng.uniform(-54, 54, 400),
        rng.uniform(-3, 3, 400),
        rng.uniform(-3, 3, 400),
    ])
    dist = np.array([_segment_distance(p, L, 0) for p in pts])
    clear = np.abs(dist - d) > 0.05
    got = contains_points(t, pts[clear], hw)
    want = dist[clear] <= d
    np.testing.assert_array_equal(got, want)


def test_rect_membership():
    t = Target.rect(10.0, 6.0, d=1.0, axis=2)
    hw = 32.0
    assert contains(t, wrap((4.9, 2.9, 0.9), hw))
    assert not contains(t, wrap((5.1, 0, 0), hw))
    assert not contains(t, wrap((0, 3.1, 0), hw))
    assert not contains(t, wrap((0, 0, 1.1), hw))


def test_contains_translation_invariance():
    rng = np.random.default_rng(3)
    hw = 16.0
    base = Target.ball(3.0)
    pts = rng.uniform(-hw, hw, (500, 3))
    for shift in ([5.0, -12.0, 9.5], [15.9, 15.9, -15.9]):
        moved = Target.ball(3.0, center=tuple(shift))
        np.testing.assert_array_equal(
            contains_points(base, pts, hw),
            contains_points(moved, pts + np.asarray(shift), hw),
        )


def test_contains_axis_permutation_invariance():
    rng = np.random.default_rng(4)
    hw = 32.0
    pts = rng.uniform(-hw, hw, (500, 3))
    for make in (lambda ax: Target.disc(6.0, axis=ax),
                 lambda ax: Target.line(20.0, axis=ax),
                 lambda ax: Target.rect(9.0, 5.0, axis=ax)):
        ref = contains_points(make(2), pts, hw)
        for ax, perm in ((0, [2, 0, 1]), (1, [1, 2, 0])):
            # permute coordinates so the distinguished axis maps onto `ax`
            np.testing.assert_array_equal(
                contains_points(make(ax), pts[:, perm], hw), ref,
                err_msg=f"axis {ax}")


def test_target_must_fit_torus():
    with pytest.raises(InvalidInputError):
        contains(Target.line(100.0), wrap((0, 0, 0), 32.0))
    big_ball = Target.ball(40.0)
    with pytest.raises(InvalidInputError):
        contains(big_ball, wrap((0, 0, 0), 32.0))
    # whole-torus degenerate ball is allowed and contains everything
    proxy = Target.ball(32.0 * math.sqrt(3.0))
    assert contains(proxy, wrap((31.9, -31.9, 31.9), 32.0))


def test_target_validation():
    with pytest.raises(InvalidInputError):
        Target.ball(0.5)  # radius below detection radius
    with pytest.raises(InvalidInputError):
        Target.ball(4.0, d=0.5)
    with pytest.raises(InvalidInputError):
        Target.rect(-1.0, 2.0)
    with pytest.raises(InvalidInputError):
        Target(ShapeKind.BALL, 4.0, None, 1.0, axis=3)


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------

def test_line_descriptors():
    desc = descriptors(Target.line(100.0, 1.0))
    assert desc.delta_B == pytest.approx(204.0)
    # independent arithmetic for the elongation
    assert desc.elongation == pytest.approx(1.0 - math.log(2.0) / math.log(204.0))
    assert desc.elongation == pytest.approx(0.8697, abs=1e-4)
    assert desc.delta_P == pytest.approx(2.0 * 100.0 + math.pi)
    x3 = desc.box[2]
    assert desc.delta_B**desc.elongation == pytest.approx(x3)


def test_ball_descriptors():
    desc = descriptors(Target.ball(4.0))
    assert desc.delta_B == pytest.approx(64.0)
    assert desc.delta_P == pytest.approx(16.0 * math.pi)
    assert desc.delta_P / desc.delta_B == pytest.approx(math.pi / 4.0)
    assert desc.approx_convex
    assert desc.elongation == pytest.approx(0.5)
    assert desc.volume == pytest.approx(4.0 * math.pi * 64.0 / 3.0)
    assert desc.surface_area == pytest.approx(4.0 * math.pi * 16.0)


def test_disc_descriptors():
    desc = descriptors(Target.disc(8.0, 1.0))
    assert desc.delta_B == pytest.approx(256.0)
    assert desc.delta_P == pytest.approx(64.0 * math.pi)
    assert desc.elongation == pytest.approx(0.5)
    assert desc.volume == pytest.approx(2.0 * math.pi * 64.0)


def test_rect_descriptors_definition_case():
    # near-square slab: delta_B equals the side product, delta -> 1/2 limit
    a = math.sqrt(400.0)
    desc = descriptors(Target.rect(a, a, 1.0))
    assert desc.delta_B == pytest.approx(400.0)
    assert desc.delta_P == desc.delta_B
    assert desc.elongation == pytest.approx(math.log(a) / math.log(400.0))
    assert desc.elongation == pytest.approx(0.5)


def test_rect_thin_sliver_uses_true_box():
    # one side thinner than the extrusion: box sides reorder
    desc = descriptors(Target.rect(27.66, 1.45, 1.0))
    assert desc.box == pytest.approx((1.45, 2.0, 27.66))
    assert desc.delta_B == pytest.approx(2.0 * 27.66)
    assert desc.delta_P == desc.delta_B


def test_delta_p_never_exceeds_delta_b():
    shapes = [Target.ball(2.0), Target.ball(9.0), Target.disc(3.0),
              Target.disc(12.0), Target.line(5.0), Target.line(50.0),
              Target.rect(8.0, 8.0), Target.rect(20.0, 2.5)]
    for t in shapes:
        desc = descriptors(t)
        assert desc.delta_P <= desc.delta_B + 1e-12
        assert 0.5 - 1e-12 <= desc.elongation <= 1.0
        assert desc.approx_convex


def test_descriptor_errors():
    with pytest.raises(InvalidInputError):
        Target.line(-3.0)
    with pytest.raises(InvalidInputError):
        Target.disc(0.0)


# ---------------------------------------------------------------------------
# counterexample cross shape
# ---------------------------------------------------------------------------

def test_counterexample_ratio_decays():
    d = 1.0
    ratios = [counterexample_ratio(L, d) for L in (2.0, 10.0, 100.0, 1000.0, 1e6)]
    assert all(x > y for x, y in zip(ratios, ratios[1:]))
    assert ratios[-1] < 1e-5  # Theta(1/L) forces the limit to zero
    # L = 2d is the family maximum
    assert ratios[0] == max(ratios)


def test_counterexample_crosses_threshold():
    d = 1.0
    assert counterexample_ratio(50.0, d) > geometry.APPROX_CONVEX_THRESHOLD
    assert counterexample_ratio(100.0, d) < geometry.APPROX_CONVEX_THRESHOLD
    assert counterexample_ratio(100.0, d) < 1.0 / 12.0


def test_counterexample_mc_silhouette_oracle():
    # Monte Carlo estimate of the crossed-strip silhouette vs the closed form
    rng = np.random.default_rng(5)
    for L in (2.0, 8.0, 40.0):
        d = 1.0
        pts = rng.uniform(-L / 2.0, L / 2.0, (200_000, 2))
        in_cross = ((np.abs(pts[:, 0]) <= L / 2) & (np.abs(pts[:, 1]) <= d / 2)) | (
            (np.abs(pts[:, 1]) <= L / 2) & (np.abs(pts[:, 0]) <= d / 2))
        est = in_cross.mean() * L * L
        expect = counterexample_ratio(L, d) * L * L
        p = in_cross.mean()
        se = L * L * math.sqrt(p * (1 - p) / pts.shape[0])
        assert abs(est - expect) < 4.0 * se + 1e-9


def test_counterexample_preconditions():
    with pytest.raises(InvalidInputError):
        counterexample_ratio(1.0, 1.0)


# ---------------------------------------------------------------------------
# Monte Carlo projected area
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("target", [
    Target.ball(4.0),
    Target.disc(8.0),
    Target.line(30.0),
    Target.rect(10.0, 6.0),
])
def test_mc_projected_area_matches_analytic(target):
    est = mc_projected_area(target, 200_000, seed=6)
    expect = descriptors(target).delta_P
    assert abs(est.estimate - expect) < 5.0 * est.stderr + 1e-9


def test_mc_projected_area_rect_exact():
    est = mc_projected_area(Target.rect(10.0, 6.0), 10_000, seed=7)
    assert est.estimate == pytest.approx(60.0)
    assert est.stderr == 0.0


def test_mc_projected_area_needs_samples():
    with pytest.raises(InvalidInputError):
        mc_projected_area(Target.ball(4.0), 100)
