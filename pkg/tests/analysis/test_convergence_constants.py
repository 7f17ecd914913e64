import numpy                                                       as _np
import pytest

from rendezvous.analysis.convergence_constants                      import compute_constants, sandwich_gamma

FOLLOWER_Q                                                          = _np.diag([10.0, 10.0, 5.0] + [1.0] * 6)

def test_constants_of_the_six_follower_scenario():
    constants                               = compute_constants(FOLLOWER_Q, 240.0, 0.9, 20, gamma_bar=1.99)
    assert constants.lambda_ratio == pytest.approx(10.0)
    assert constants.N0 == pytest.approx(19.9)
    assert constants.alpha_n == pytest.approx(0.1045)
    assert constants.alpha_n_worst == pytest.approx(0.005)
    assert constants.certifiable()
    assert constants.horizon_exceeds_N0()
    assert constants.minimal_horizon_worst() == 20
    assert constants.minimal_horizon() == 18

def test_short_horizon_can_still_decrease_with_contraction():
    constants                               = compute_constants(FOLLOWER_Q, 240.0, 0.5, 15, gamma_bar=1.99)
    assert not constants.horizon_exceeds_N0()
    assert constants.alpha_n > 0
    assert constants.alpha_n_worst < 0

def test_positive_rate_exactly_above_N0():
    '''
    For the worst-case contraction, the decrease rate is positive if and only if the horizon exceeds N0.
    '''
    rng                                     = _np.random.default_rng(1)
    for _ in range(1000):
        eigenvalues                         = rng.uniform(0.1, 20.0, 4)
        Q                                   = _np.diag(eigenvalues)
        gamma_bar                           = rng.uniform(1.0, 4.0)
        N                                   = int(rng.integers(1, 200))
        constants                           = compute_constants(Q, 100.0, 1.0, N, gamma_bar=gamma_bar)
        if abs(N - constants.N0) < 1e-9:
            continue
        assert (constants.alpha_n_worst > 0) == (N > constants.N0)
        assert constants.alpha_n == pytest.approx(constants.alpha_n_worst)

def test_sandwich_constant_from_initial_errors():
    assert sandwich_gamma(240.0, [750.0, 900.0]) == 1.0
    assert sandwich_gamma(240.0, [100.0, 0.0, 400.0]) == pytest.approx(2.4)
    with pytest.raises(ValueError):
        sandwich_gamma(240.0, [0.0])

    constants                               = compute_constants(FOLLOWER_Q, 240.0, 1.0, 20, initial_errors=[100.0])
    assert constants.gamma_bar == pytest.approx(2.4)
    assert constants.N0 == pytest.approx(24.0)

def test_invalid_inputs():
    with pytest.raises(ValueError):
        compute_constants(FOLLOWER_Q, 240.0, 1.5, 20, gamma_bar=1.99)
    with pytest.raises(ValueError):
        compute_constants(FOLLOWER_Q, 240.0, 0.9, 0, gamma_bar=1.99)
    with pytest.raises(ValueError):
        compute_constants(-FOLLOWER_Q, 240.0, 0.9, 20, gamma_bar=1.99)
    with pytest.raises(ValueError):
        compute_constants(FOLLOWER_Q, 240.0, 0.9, 20)
    with pytest.raises(ValueError):
        compute_constants(FOLLOWER_Q, 240.0, 0.9, 20, gamma_bar=0.5)

def test_constants_serialize():
    d                                       = compute_constants(FOLLOWER_Q, 240.0, 0.9, 20, gamma_bar=1.99).to_dict()
    assert d["N"] == 20
    assert d["certifiable"] is True
    assert not d["empirical"]
