import math
import numpy                                                       as _np
import pytest

from rendezvous.models.leader_model                                 import LeaderModel
from rendezvous.models.linear_model                                 import ConstantVelocityModel
from rendezvous.models.model_params                                 import ModelParams
from rendezvous.prediction.confidence                               import ConfidenceParams, lambda_max, \
                                                                           confidence_radius, radius_threshold
from rendezvous.prediction.ekf_predictor                            import EkfPredictor, default_process_noise
from rendezvous.prediction.worst_case_radius                        import worst_case_radius
from rendezvous.util.errors                                         import ConfigurationError

def test_filter_matches_a_textbook_kalman_filter_on_a_linear_model():
    model                                   = ConstantVelocityModel(0.2)
    Q                                       = default_process_noise(model)
    sigma                                   = 0.05
    predictor                               = EkfPredictor(model, Q, measurement_sigma=sigma)

    A, H                                    = model.A, _np.hstack([_np.eye(3), _np.zeros((3, 3))])
    R                                       = sigma ** 2 * _np.eye(3)

    rng                                     = _np.random.default_rng(99)
    truth                                   = _np.array([0.0, 0.0, 5.0, 1.0, -0.5, 0.2])
    first                                   = truth[:3] + rng.normal(0.0, sigma, 3)

    state                                   = predictor.initialize(first, 0)
    x, P                                    = state.x.copy(), state.P.copy()
    for t in range(100):
        z                                   = truth[:3] + rng.normal(0.0, sigma, 3)
        state                               = predictor.ekf_update(state, z)

        S                                   = H @ P @ H.T + R
        K                                   = P @ H.T @ _np.linalg.inv(S)
        x                                   = x + K @ (z - H @ x)
        P                                   = (_np.eye(6) - K @ H) @ P
        x                                   = A @ x
        P                                   = A @ P @ A.T + Q

        truth                               = A @ truth
        _np.testing.assert_allclose(state.x, x, rtol=1e-9, atol=1e-12)
        _np.testing.assert_allclose(state.P, P, rtol=1e-9, atol=1e-12)
        assert state.t == t + 1

def test_filter_converges_on_a_constant_velocity_target():
    model                                   = ConstantVelocityModel(0.2)
    predictor                               = EkfPredictor(model, default_process_noise(model), 0.05)
    rng                                     = _np.random.default_rng(3)
    truth                                   = _np.array([1.0, 2.0, 3.0, 0.5, 0.0, 0.0])
    state                                   = predictor.initialize(truth[:3], 0)
    for _ in range(60):
        state                               = predictor.ekf_update(state, truth[:3] + rng.normal(0.0, 0.05, 3))
        truth                               = model.step(truth, _np.zeros(3))
    assert _np.linalg.norm(state.x[:3] - truth[:3]) < 0.3

def test_correct_rejects_non_finite_measurements():
    model                                   = ConstantVelocityModel(0.2)
    predictor                               = EkfPredictor(model, default_process_noise(model))
    state                                   = predictor.initialize(_np.zeros(3), 0)
    with pytest.raises(ValueError):
        predictor.correct(state, _np.array([0.0, _np.nan, 0.0]))

def test_singular_innovation_is_regularized():
    model                                   = ConstantVelocityModel(0.2)
    predictor                               = EkfPredictor(model, _np.zeros((6, 6)), measurement_sigma=0.0)
    state                                   = predictor.initialize(_np.zeros(3), 0, P0=_np.zeros((6, 6)))
    corrected                               = predictor.correct(state, _np.ones(3))
    assert corrected.regularized
    assert _np.all(_np.isfinite(corrected.x))

def test_process_noise_shape_is_checked():
    with pytest.raises(ValueError):
        EkfPredictor(ConstantVelocityModel(0.2), _np.eye(3))

def test_leader_process_noise_leaves_the_height_alone():
    model                                   = LeaderModel(ModelParams.leader_defaults())
    Q                                       = default_process_noise(model)
    assert Q.shape == (6, 6)
    assert Q[2, 2] == 0.0

def test_horizon_prediction_grows_the_covariance():
    model                                   = ConstantVelocityModel(0.2)
    predictor                               = EkfPredictor(model, default_process_noise(model))
    state                                   = predictor.initialize(_np.zeros(3), 0)
    prediction                              = predictor.predict_horizon(state, 10)
    assert prediction.states.shape == (11, 6)
    assert prediction.position_covariances().shape == (11, 3, 3)
    lambdas                                 = lambda_max(prediction.position_covariances())
    assert _np.all(_np.diff(lambdas) > 0)
    with pytest.raises(ValueError):
        predictor.predict_horizon(state, 0)

def test_confidence_scale_is_the_chi_square_quantile():
    cp                                      = ConfidenceParams(0.95)
    assert cp.scale == pytest.approx(5.99146, abs=1e-5)
    with pytest.raises(ConfigurationError):
        ConfidenceParams(1.0)
    with pytest.raises(ConfigurationError):
        ConfidenceParams(0.0)

def test_confidence_radius_and_threshold():
    cp                                      = ConfidenceParams(0.95)
    P                                       = _np.diag([0.04, 0.01, 0.0])
    assert lambda_max(P) == pytest.approx(0.04)
    assert confidence_radius(P, cp) == pytest.approx(math.sqrt(cp.scale * 0.04))
    assert radius_threshold(2.5, 0.5, cp) == pytest.approx(4.0 / cp.scale)
    assert lambda_max(_np.diag([-1e-18, -1e-18])) == 0.0

def test_worst_case_radius_of_the_constant_velocity_model():
    result                                  = worst_case_radius(ConstantVelocityModel(0.2, max_speed=5.0))
    assert result.grid_value == pytest.approx(0.2 * 5.0 * math.sqrt(3))
    assert result.refined_value >= result.grid_value - 1e-12
    assert result.radius >= result.refined_value
    assert result.disturbance_bound == 0.0

def test_worst_case_radius_needs_a_fine_enough_grid():
    with pytest.raises(ValueError):
        worst_case_radius(ConstantVelocityModel(0.2), levels=1)

def test_open_loop_covariance_follows_the_one_axis_recursion():
    dt, q_p, q_v                            = 0.2, 1e-4, 1e-2
    model                                   = ConstantVelocityModel(dt)
    predictor                               = EkfPredictor(model, default_process_noise(model, position=q_p,
                                                                                        velocity=q_v))
    state                                   = predictor.initialize(_np.zeros(3), 0, P0=_np.zeros((6, 6)))
    prediction                              = predictor.predict_horizon(state, 15)

    A                                       = _np.array([[1.0, dt], [0.0, 1.0]])
    Q                                       = _np.diag([q_p, q_v])
    P                                       = _np.zeros((2, 2))
    for k in range(1, 16):
        P                                   = A @ P @ A.T + Q
        for axis in range(3):
            block                           = prediction.covariances[k][_np.ix_([axis, axis + 3], [axis, axis + 3])]
            _np.testing.assert_allclose(block, P, rtol=1e-12, atol=1e-15)
        # closed form of the same recursion from a zero start
        assert P[1, 1] == pytest.approx(k * q_v)
        assert P[0, 1] == pytest.approx(q_v * dt * k * (k - 1) / 2)
        assert P[0, 0] == pytest.approx(k * q_p + q_v * dt * dt * (k - 1) * k * (2 * k - 1) / 6)

def test_joseph_update_keeps_the_covariance_positive_semidefinite():
    model                                   = ConstantVelocityModel(0.2)
    predictor                               = EkfPredictor(model, default_process_noise(model), measurement_sigma=1e-5)
    state                                   = predictor.initialize(_np.zeros(3), 0, P0=1e4 * _np.eye(6))
    rng                                     = _np.random.default_rng(17)
    for _ in range(50):
        state                               = predictor.correct(state, rng.normal(0.0, 1e-5, 3))
        eigenvalues                         = _np.linalg.eigvalsh(state.P)
        assert eigenvalues.min() >= -1e-12 * max(1.0, eigenvalues.max())
        _np.testing.assert_array_equal(state.P, state.P.T)
        state                               = predictor.predict(state)

def test_confidence_radius_covers_the_horizontal_position():
    rng                                     = _np.random.default_rng(2024)
    cp                                      = ConfidenceParams(0.95)
    L                                       = _np.array([[0.3, 0.0], [0.1, 0.12]])
    P                                       = L @ L.T
    samples                                 = rng.standard_normal((20000, 2)) @ L.T
    inside                                  = _np.linalg.norm(samples, axis=1) <= confidence_radius(P, cp)
    assert inside.mean() >= cp.level

def test_worst_case_slack_uses_the_jacobian_at_the_grid_nodes():
    result                                  = worst_case_radius(ConstantVelocityModel(0.2, max_speed=5.0))
    # dt sqrt(3) times half the cell diagonal 2.5 sqrt(3)
    assert result.lipschitz_slack == pytest.approx(1.5)
    assert result.radius == pytest.approx(result.refined_value + 1.5)
