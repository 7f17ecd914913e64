import numpy                                                       as _np

from rendezvous.prediction.ekf_predictor                            import EkfState

class ReconstructedTrajectory():

    '''
    A peer's trajectory over the current horizon, rebuilt from its last shared trajectory and the local predictor.

    :param positions: shape ``(N+1, 3)``
    :param covariances: position covariances, shape ``(N+1, 3, 3)``; zero for entries copied from the shared
        trajectory
    :param list sources: per entry, ``"shared"`` or ``"predicted"``
    :param int staleness: ``k = t - t_a``, or None when no shared trajectory was available
    :param bool pure_prediction: True when every entry comes from the predictor
    '''
    def __init__(self, positions, covariances, sources, staleness, pure_prediction):
        self.positions                              = positions
        self.covariances                            = covariances
        self.sources                                = sources
        self.staleness                              = staleness
        self.pure_prediction                        = pure_prediction

    SHARED                                          = "shared"
    PREDICTED                                       = "predicted"

    def predicted_count(self):
        return sum(1 for s in self.sources if s == ReconstructedTrajectory.PREDICTED)

def shift_and_predict(last_shared, t, N, predictor, estimate):
    '''
    Rebuilds a peer's trajectory ``z(l|t)``, ``l = 0..N``, from the newest trajectory it shared at ``t_a <= t``:

    * ``k = t - t_a = 0``: the shared trajectory, verbatim
    * ``1 <= k < N-1``: entries ``l < N-k`` are the shared entries ``l+k``; the ``k+1`` tail entries come from the
      predictor seeded at shared entry ``N-1`` and advanced ``l + k - (N-1)`` steps
    * ``k >= N-1``, or nothing shared yet: every entry comes from the predictor started at the current estimate

    :param SharedTrajectory last_shared: newest trajectory received from the peer, or None
    :param int t: current step
    :param int N: horizon
    :param EkfPredictor predictor: the local predictor for this peer
    :param EkfState estimate: the predictor's current (corrected) estimate of the peer at ``t``
    :rtype: ReconstructedTrajectory
    '''
    if last_shared is None:
        return _pure_prediction(predictor, estimate, N, staleness=None)

    k                                               = t - last_shared.t_a
    if k < 0:
        raise ValueError("Shared trajectory from " + str(last_shared.sender) + " is born at step "
                         + str(last_shared.t_a) + ", after the current step " + str(t))
    if last_shared.horizon() != N:
        raise ValueError("Shared trajectory from " + str(last_shared.sender) + " has horizon "
                         + str(last_shared.horizon()) + " but the local horizon is " + str(N))

    positions                                       = _np.zeros((N + 1, 3))
    covariances                                     = _np.zeros((N + 1, 3, 3))
    sources                                         = [ReconstructedTrajectory.SHARED] * (N + 1)

    if k == 0:
        positions[:]                                = last_shared.positions
        return ReconstructedTrajectory(positions, covariances, sources, staleness=0, pure_prediction=False)

    if k >= N - 1:
        return _pure_prediction(predictor, estimate, N, staleness=k)

    positions[:N - k]                               = last_shared.positions[k:N]

    seed                                            = EkfState(_seed_state(last_shared, N - 1, predictor, estimate),
                                                               estimate.P, last_shared.t_a + N - 1)
    tail                                            = predictor.predict_horizon(seed, k + 1)
    for l in range(N - k, N + 1):
        steps_ahead                                 = l + k - (N - 1)
        positions[l]                                = tail.positions()[steps_ahead]
        covariances[l]                              = tail.position_covariances()[steps_ahead]
        sources[l]                                  = ReconstructedTrajectory.PREDICTED

    return ReconstructedTrajectory(positions, covariances, sources, staleness=k, pure_prediction=False)

def _pure_prediction(predictor, estimate, N, staleness):
    prediction                                      = predictor.predict_horizon(estimate, N)
    sources                                         = [ReconstructedTrajectory.PREDICTED] * (N + 1)
    return ReconstructedTrajectory(prediction.positions().copy(), prediction.position_covariances().copy(), sources,
                                   staleness=staleness, pure_prediction=True)

def _seed_state(last_shared, index, predictor, estimate):
    '''
    Predictor state at a shared entry: the sender's full planned state when it matches the predictor's model,
    otherwise a state built from the shared position and velocity with the remaining components taken from the
    current estimate.
    '''
    model                                           = predictor.model
    if not last_shared.states is None and last_shared.model_name == model.name():
        return model.project_state(last_shared.states[index].copy())

    velocity                                        = None
    if not last_shared.velocities is None:
        velocity                                    = last_shared.velocities[index]
    return model.state_from_kinematics(last_shared.positions[index], velocity=velocity, template=estimate.x)
