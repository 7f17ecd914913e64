import numpy                                                       as _np
import pytest

from rendezvous.safety.collision_constraint                         import CollisionParams, eval_h_ij, grad_h_ij
from rendezvous.safety.funnel_constraint                            import FunnelParams, eval_h_C, grad_h_C, \
                                                                           funnel_floor
from rendezvous.safety.landing_geometry                             import LandingGeometry, make_hexagon_offsets, \
                                                                           initial_ring_positions, \
                                                                           validate_landing_geometry
from rendezvous.util.errors                                         import ConfigurationError

FUNNEL                                                              = FunnelParams(safety_height=2.0, radius=2.5,
                                                                                   slope=1.0)

def _central_difference(fun, p, eps=1e-6):
    grad                                    = _np.zeros(3)
    for j in range(3):
        dp                                  = _np.zeros(3)
        dp[j]                               = eps
        grad[j]                             = (fun(p + dp) - fun(p - dp)) / (2 * eps)
    return grad

def test_funnel_params_validation():
    with pytest.raises(ConfigurationError):
        FunnelParams(safety_height=0.0, radius=2.5, slope=1.0)
    with pytest.raises(ConfigurationError):
        FunnelParams(safety_height=2.0, radius=-1.0, slope=1.0)

def test_funnel_is_at_half_height_on_the_platform_edge():
    center                                  = _np.array([3.0, -1.0, 0.4])
    x_f                                     = _np.array([3.0 + 2.5, -1.0, 4.0])
    assert eval_h_C(x_f, center, FUNNEL) == pytest.approx(4.0 - 0.4 - 1.0, abs=1e-12)

def test_funnel_floor_shape():
    assert funnel_floor(0.0, FUNNEL) < 0.01
    assert funnel_floor(2.5, FUNNEL) == pytest.approx(1.0)
    assert funnel_floor(10.0, FUNNEL) == pytest.approx(2.0)

def test_funnel_deck_height_shifts_the_floor():
    raised                                  = FunnelParams(safety_height=2.0, radius=2.5, slope=1.0, deck_height=0.5)
    x_f                                     = _np.array([0.0, 0.0, 1.0])
    assert eval_h_C(x_f, _np.zeros(3), raised) == pytest.approx(eval_h_C(x_f, _np.zeros(3), FUNNEL) - 0.5)

def test_funnel_handles_extreme_distances():
    x_f                                     = _np.array([1e6, 0.0, 3.0])
    assert _np.isfinite(eval_h_C(x_f, _np.zeros(3), FUNNEL))
    assert _np.all(_np.isfinite(grad_h_C(x_f, _np.zeros(3), FUNNEL)))

def test_funnel_gradient_matches_finite_differences():
    rng                                     = _np.random.default_rng(2024)
    centers                                 = rng.uniform(-2.0, 2.0, (1000, 3))
    points                                  = centers + rng.uniform([-4.0, -4.0, -1.0], [4.0, 4.0, 6.0], (1000, 3))
    analytic                                = grad_h_C(points, centers, FUNNEL)
    _np.testing.assert_array_equal(analytic[:, 2], 1.0)
    for p, c, g in zip(points, centers, analytic):
        numeric                             = _central_difference(lambda q: eval_h_C(q, c, FUNNEL), p)
        _np.testing.assert_allclose(g, numeric, atol=1e-6)

def test_funnel_value_stays_between_deck_and_safety_height():
    rng                                     = _np.random.default_rng(11)
    centers                                 = rng.uniform(-3.0, 3.0, (2000, 3))
    points                                  = centers + rng.uniform([-8.0, -8.0, -1.0], [8.0, 8.0, 8.0], (2000, 3))
    height                                  = points[:, 2] - centers[:, 2]
    h                                       = eval_h_C(points, centers, FUNNEL)
    assert _np.all(h <= height)
    assert _np.all(h >= height - FUNNEL.safety_height)

def test_funnel_value_falls_with_horizontal_distance_and_rises_with_height():
    distances                               = _np.linspace(0.0, 8.0, 401)
    points                                  = _np.stack([distances, _np.zeros_like(distances),
                                                         _np.full_like(distances, 3.0)], axis=-1)
    h                                       = eval_h_C(points, _np.zeros(3), FUNNEL)
    assert _np.all(_np.diff(h) <= 0.0)

    heights                                 = _np.linspace(-1.0, 6.0, 141)
    points                                  = _np.stack([_np.full_like(heights, 2.0), _np.full_like(heights, 1.0),
                                                         heights], axis=-1)
    h                                       = eval_h_C(points, _np.zeros(3), FUNNEL)
    _np.testing.assert_allclose(_np.diff(h), _np.diff(heights), rtol=1e-12)

def test_collision_value_and_inflation():
    cp                                      = CollisionParams(min_distance=1.0)
    assert eval_h_ij(_np.array([3.0, 4.0, 0.0]), _np.zeros(3), cp) == pytest.approx(4.0)
    assert eval_h_ij(_np.array([3.0, 4.0, 0.0]), _np.zeros(3), cp, inflation=0.5) == pytest.approx(3.5)

def test_vertical_factor_stretches_the_keep_out_set():
    cp                                      = CollisionParams(min_distance=1.0, vertical_factor=2.0)
    assert eval_h_ij(_np.array([0.0, 0.0, 0.75]), _np.zeros(3), cp) == pytest.approx(0.5)

def test_collision_gradient_matches_finite_differences():
    cp                                      = CollisionParams(min_distance=1.0, vertical_factor=1.5)
    rng                                     = _np.random.default_rng(7)
    for _ in range(1000):
        peer                                = rng.uniform(-3.0, 3.0, 3)
        offset                              = rng.uniform(-3.0, 3.0, 3)
        if _np.linalg.norm(offset) < 0.1:
            continue
        p                                   = peer + offset
        numeric                             = _central_difference(lambda q: eval_h_ij(q, peer, cp), p)
        _np.testing.assert_allclose(grad_h_ij(p, peer, cp), numeric, atol=1e-6)

def test_collision_value_is_symmetric_in_the_pair():
    cp                                      = CollisionParams(min_distance=1.0, vertical_factor=1.5)
    rng                                     = _np.random.default_rng(13)
    a                                       = rng.uniform(-4.0, 4.0, (1000, 3))
    b                                       = rng.uniform(-4.0, 4.0, (1000, 3))
    _np.testing.assert_array_equal(eval_h_ij(a, b, cp), eval_h_ij(b, a, cp))
    _np.testing.assert_allclose(grad_h_ij(a, b, cp), -grad_h_ij(b, a, cp), rtol=0, atol=1e-15)

def test_collision_gradient_vanishes_at_coincidence():
    cp                                      = CollisionParams(min_distance=1.0)
    _np.testing.assert_array_equal(grad_h_ij(_np.ones(3), _np.ones(3), cp), 0.0)

def test_hexagon_offsets_sit_opposite_the_starting_bearing():
    offsets                                 = make_hexagon_offsets(6, 1.5)
    _np.testing.assert_allclose(offsets[0], [-1.5, 0.0, 0.0], atol=1e-12)
    for c in offsets:
        assert _np.linalg.norm(c) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        make_hexagon_offsets(0, 1.5)

def test_ring_positions():
    positions                               = initial_ring_positions(4, 5.0, 10.0)
    _np.testing.assert_allclose(positions[1], [0.0, 5.0, 10.0], atol=1e-12)

def test_default_landing_geometry_is_valid():
    geometry                                = LandingGeometry(2.5, 0.5, make_hexagon_offsets(6, 1.5))
    report                                  = validate_landing_geometry(geometry, CollisionParams(1.0))
    assert report.ok()

def test_separation_violations_are_reported_per_pair():
    geometry                                = LandingGeometry(2.5, 0.5, make_hexagon_offsets(6, 1.5))
    report                                  = validate_landing_geometry(geometry, CollisionParams(2.0))
    assert not report.ok()
    separation                              = [v for v in report.violations if v["kind"] == "separation"]
    assert len(separation) == 6
    assert len(report.violations) == 6
    assert "separation" in report.describe()

def test_containment_and_platform_violations():
    geometry                                = LandingGeometry(2.5, 0.5, [_np.array([2.1, 0.0, 0.0])])
    report                                  = validate_landing_geometry(geometry, CollisionParams(1.0))
    assert [v["kind"] for v in report.violations] == ["containment"]
    assert report.violations[0]["followers"] == [0]

    geometry                                = LandingGeometry(0.5, 0.5, [_np.zeros(3)])
    report                                  = validate_landing_geometry(geometry, CollisionParams(1.0))
    assert "platform" in [v["kind"] for v in report.violations]
