import numpy                                                       as _np

from rendezvous.models.state_mapping                                import follower_reference
from rendezvous.prediction.confidence                               import confidence_radius
from rendezvous.prediction.shift_and_predict                        import shift_and_predict
from rendezvous.scenario.scenario_config                            import CollisionPolicy, LeaderReference
from rendezvous.solver.ocp_spec                                     import PeerConstraint
from rendezvous.util.errors                                         import ConfigurationError

class LeaderReferenceGenerator():

    '''
    Exogenous reference ``x_r(k|t)`` of the leader.

    :param str kind: a :class:`LeaderReference` value
    :param initial_state: leader state at step 0
    :param float dt: step length in seconds
    :param float speed: surge speed of the ``constant_velocity`` reference
    :param float heading: heading of the ``constant_velocity`` reference
    :param LeaderTrack track: recording followed by the ``replay`` reference
    '''
    def __init__(self, kind, initial_state, dt, speed=0.0, heading=0.0, track=None):
        if not kind in LeaderReference.ALL:
            raise ValueError("Unknown leader reference '" + str(kind) + "'")
        if kind == LeaderReference.REPLAY and track is None:
            raise ValueError("A replayed leader reference needs a recorded track")

        self.kind                                   = kind
        self.initial_state                          = _np.asarray(initial_state, dtype=float).copy()
        self.dt                                     = float(dt)
        self.speed                                  = float(speed)
        self.heading                                = float(heading)
        self.track                                  = track

    def from_config(cfg):
        return LeaderReferenceGenerator(kind            = cfg.leader_reference,
                                        initial_state   = cfg.leader_initial_state,
                                        dt              = cfg.dt,
                                        speed           = cfg.leader_speed,
                                        heading         = cfg.leader_heading,
                                        track           = cfg.leader_track_data())

    def state_at(self, step):
        '''
        :param int step: time step, possibly beyond the run
        :return: reference leader state at ``step``
        '''
        x0                                          = self.initial_state
        if self.kind == LeaderReference.HOLD:
            return _np.array([x0[0], x0[1], 0.0, x0[3], 0.0, 0.0])
        if self.kind == LeaderReference.CONSTANT_VELOCITY:
            travelled                               = self.speed * step * self.dt
            return _np.array([x0[0] + travelled * _np.cos(self.heading),
                              x0[1] + travelled * _np.sin(self.heading),
                              0.0, self.heading, self.speed, 0.0])
        return self.track.state_at(step * self.dt, self.dt)

    def horizon(self, t, N):
        '''
        :return: ``x_r(k|t)``, ``k = 0..N``, shape ``(N+1, 6)``
        '''
        return _np.stack([self.state_at(t + k) for k in range(N + 1)])

class AgentReferences():

    '''
    What one agent plans against at step ``t``.

    :param reference: own reference ``x_r(k|t)``, shape ``(N+1, n_x)``
    :param ReconstructedTrajectory leader: reconstructed leader trajectory; None for the leader itself
    :param dict peers: follower id -> :class:`ReconstructedTrajectory`
    '''
    def __init__(self, reference, leader=None, peers=None):
        self.reference                              = reference
        self.leader                                 = leader
        self.peers                                  = {} if peers is None else peers

    def platform_positions(self):
        return None if self.leader is None else self.leader.positions

    def landing_point(self, offset):
        '''
        :return: ``z_l(0|t) + c_i``, the point the tolerance gate measures against
        '''
        return self.leader.positions[0] + offset

def build_references(agent, collection, t, N, leader_generator, leader_id):
    '''
    Reconstructs every peer's trajectory from the agent's data collection (shift-and-predict) and derives the
    agent's own reference: the exogenous track for the leader, the reconstructed leader positions shifted by the
    landing offset for a follower.

    :param AgentRuntime agent: the planning agent, with corrected estimates of all its peers
    :param DataCollection collection: newest shared trajectory per peer
    :param int t: current step
    :param int N: horizon
    :param LeaderReferenceGenerator leader_generator: the leader's exogenous reference
    :param str leader_id: id of the leader in the roster
    :raises ConfigurationError: if a follower has neither shared data nor an estimate of the leader
    :rtype: AgentReferences
    '''
    if agent.is_leader():
        return AgentReferences(leader_generator.horizon(t, N))

    reconstructed                                   = {}
    for peer in sorted(agent.predictors.keys()):
        estimate                                    = agent.posteriors[peer]
        last_shared                                 = collection.get(peer)
        if estimate is None:
            if peer == leader_id:
                raise ConfigurationError("Follower " + agent.agent_id + " has no data about the leader at step "
                                         + str(t) + " and its leader predictor was never started")
            continue
        reconstructed[peer]                         = shift_and_predict(last_shared, t, N, agent.predictors[peer],
                                                                        estimate)

    leader                                          = reconstructed.pop(leader_id)
    reference                                       = follower_reference(leader.positions, agent.offset,
                                                                         n_follower=agent.model.n_x())
    return AgentReferences(reference, leader=leader, peers=reconstructed)

def peer_inflation(agent, peer, trajectory, cp, worst_case, cap):
    '''
    Extra collision radius against a peer whose data is ``k = t - t_a`` steps old: the confidence radius of the
    peer estimate propagated ``k`` steps, but no more than ``k`` worst-case one-step displacements and never above
    ``cap``. A peer never heard from counts as ``N`` steps old.

    :rtype: float
    '''
    k                                               = trajectory.staleness
    if k is None:
        k                                           = len(trajectory.positions) - 1
    if k <= 0:
        return 0.0
    predictor                                       = agent.predictors[peer]
    horizon                                         = min(k, len(trajectory.positions) - 1)
    propagated                                      = predictor.predict_horizon(agent.posteriors[peer], horizon)
    radius                                          = float(confidence_radius(propagated.position_covariances()[-1], cp))
    return float(min(radius, worst_case * k, cap))

def collision_constraints(agent, references, policy, cp, worst_case, cap, stale_after=1, enabled=True):
    '''
    One :class:`PeerConstraint` per reconstructed follower peer.

    With :attr:`CollisionPolicy.FULL_HORIZON` every step ``1..N`` is constrained and the radius is inflated by
    :func:`peer_inflation`. With :attr:`CollisionPolicy.ONE_STEP`, peers whose data is older than ``stale_after``
    steps are only constrained at ``k = 1``, inflated by one worst-case displacement.

    :param float worst_case: worst-case one-step displacement of a follower
    :param bool enabled: if False, no peer is constrained and the result is empty
    :return: pair ``(constraints, inflation)``, the latter mapping peer id -> scalar inflation used
    '''
    constraints                                     = []
    inflation                                       = {}
    if not enabled:
        return constraints, inflation
    for peer in sorted(references.peers.keys()):
        trajectory                                  = references.peers[peer]
        N1                                          = len(trajectory.positions)
        active                                      = _np.ones(N1, dtype=bool)
        k                                           = trajectory.staleness

        if policy == CollisionPolicy.ONE_STEP and (k is None or k > stale_after):
            active[:]                               = False
            active[1]                               = True
            extra                                   = float(worst_case)
        elif policy == CollisionPolicy.ONE_STEP:
            extra                                   = 0.0
        else:
            extra                                   = peer_inflation(agent, peer, trajectory, cp, worst_case, cap)

        inflation[peer]                             = extra
        constraints.append(PeerConstraint(peer, trajectory.positions, inflation=extra, active=active))
    return constraints, inflation

def perturb_reference(reference, position, rng, magnitude):
    '''
    Shifts a follower reference sideways, perpendicular to the horizontal line from ``position`` to the first
    reference point, by a uniform amount in ``[-magnitude, magnitude]``.

    :return: pair ``(perturbed reference, signed shift)``
    '''
    direction                                       = reference[0, :2] - _np.asarray(position, dtype=float)[:2]
    norm                                            = float(_np.linalg.norm(direction))
    if norm < 1e-12:
        direction, norm                             = _np.array([1.0, 0.0]), 1.0
    tangent                                         = _np.array([-direction[1], direction[0]]) / norm
    shift                                           = float(rng.uniform(-magnitude, magnitude))

    perturbed                                       = reference.copy()
    perturbed[:, :2]                                += shift * tangent
    return perturbed, shift
