import numpy                                                       as _np

class DisturbanceSource():

    '''
    Provides the additive disturbance ``w_i(t)`` applied to each agent's true dynamics.

    Three modes are supported:

    * ``none``: ``w = 0``
    * ``seeded``: ``w`` uniform in the agent's disturbance box, drawn from a generator keyed by
      ``(seed, t, agent index)`` so that the draw does not depend on the order in which agents are stepped
    * ``replay``: the leader is pinned to a recorded :class:`LeaderTrack`; its disturbance is the difference between
      the recorded pose at ``t+1`` and the nominal prediction, on position and heading. Followers get ``w = 0``.

    :param str mode: one of ``none``, ``seeded``, ``replay``
    :param int seed: required for ``seeded``
    :param LeaderTrack track: required for ``replay``
    '''
    def __init__(self, mode="none", seed=None, track=None):
        if not mode in DisturbanceSource.MODES:
            raise ValueError("Unknown disturbance mode '" + str(mode) + "'; expected one of "
                             + ", ".join(DisturbanceSource.MODES))
        if mode == DisturbanceSource.SEEDED and seed is None:
            raise ValueError("Seeded disturbances need a seed")
        if mode == DisturbanceSource.REPLAY and track is None:
            raise ValueError("Replayed disturbances need a recorded leader track")

        self.mode                                   = mode
        self.seed                                   = seed
        self.track                                  = track

    NONE                                            = "none"
    SEEDED                                          = "seeded"
    REPLAY                                          = "replay"
    MODES                                           = [NONE, SEEDED, REPLAY]

    def sample(self, agent_index, is_leader, model, t, x_nominal_next):
        '''
        :param int agent_index: position of the agent in the roster (leader is 0)
        :param bool is_leader: whether the agent is the leader
        :param VehicleModel model: the agent's model, providing the disturbance box and time step
        :param int t: current step
        :param x_nominal_next: undisturbed successor state ``f(x(t), u(t))``
        :return: disturbance vector of the model's state dimension
        '''
        w                                           = _np.zeros(model.n_x())
        if self.mode == DisturbanceSource.SEEDED:
            box                                     = model.params.disturbance_box
            rng                                     = _np.random.default_rng([int(self.seed), int(t), int(agent_index)])
            w                                       = rng.uniform(box.lower, box.upper)
        elif self.mode == DisturbanceSource.REPLAY and is_leader:
            recorded                                = self.track.state_at((t + 1) * model.params.dt, model.params.dt)
            w[0:2]                                  = recorded[0:2] - x_nominal_next[0:2]
            w[3]                                    = recorded[3] - x_nominal_next[3]
        return w

    def bound(self, model):
        '''
        :return: Euclidean bound on the position part of the disturbance, used in latch checks
        :rtype: float
        '''
        if self.mode != DisturbanceSource.SEEDED:
            return 0.0
        box                                         = model.params.disturbance_box
        extent                                      = _np.maximum(_np.abs(box.lower[:3]), _np.abs(box.upper[:3]))
        return float(_np.linalg.norm(extent))
