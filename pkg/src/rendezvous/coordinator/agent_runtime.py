import numpy                                                       as _np

from rendezvous.solver.sqp_solver                                   import DocpSolver

class AgentRuntime():

    '''
    Everything the coordinator keeps about one agent between steps: its true state, its solver, its predictor
    bank and the bookkeeping of the landing latch and of deadlock detection.

    Predictors are kept per observed peer. ``priors[peer]`` is the estimate of the peer at the current step before
    the current measurement, ``posteriors[peer]`` the same estimate after it.

    :param str agent_id: ``leader`` or ``f1`` ... ``fM``
    :param int index: roster position; 0 for the leader
    :param str role: :attr:`LEADER` or :attr:`FOLLOWER`
    :param VehicleModel model: the agent's own dynamics
    :param state: true initial state
    :param Q: stage weight
    :param R: optional input weight
    :param offset: landing offset ``c_i`` of a follower
    :param float tolerance: landing tolerance ``epsilon`` in meters
    '''
    def __init__(self, agent_id, index, role, model, state, Q, R=None, offset=None, tolerance=0.1):
        if not role in AgentRuntime.ROLES:
            raise ValueError("Unknown role '" + str(role) + "' for agent " + str(agent_id))
        if role == AgentRuntime.FOLLOWER and offset is None:
            raise ValueError("Follower " + str(agent_id) + " needs a landing offset")

        self.agent_id                               = agent_id
        self.index                                  = index
        self.role                                   = role
        self.model                                  = model
        self.state                                  = _np.asarray(state, dtype=float).copy()
        self.Q                                      = Q
        self.R                                      = R
        self.offset                                 = None if offset is None else _np.asarray(offset, dtype=float)
        self.tolerance                              = float(tolerance)

        self.solver                                 = DocpSolver()
        self.predictors                             = {}
        self.priors                                 = {}
        self.posteriors                             = {}

        self.latched                                = False
        self.latch_step                             = None
        self.mode                                   = AgentRuntime.TRACKING

        self.last_solution                          = None
        self.last_solve_step                        = None
        self.last_cost                              = None
        self.stall_count                            = 0
        self.pending_perturbation                   = False

    LEADER                                          = "leader"
    FOLLOWER                                        = "follower"
    ROLES                                           = [LEADER, FOLLOWER]

    TRACKING                                        = "TRACKING"
    LATCHED                                         = "LATCHED"      # station keeping at the landing point
    DEGRADED                                        = "DEGRADED"     # solver failed, previous plan replayed
    MODES                                           = [TRACKING, LATCHED, DEGRADED]

    def is_leader(self):
        return self.role == AgentRuntime.LEADER

    def position(self):
        return self.state[:3].copy()

    def add_predictor(self, peer, predictor):
        self.predictors[peer]                       = predictor
        self.priors[peer]                           = None
        self.posteriors[peer]                       = None

    def observe(self, peer, measurement, t):
        '''
        Feeds a position measurement of ``peer`` taken at step ``t`` to its predictor, starting the filter on the
        first one.

        :rtype: EkfState
        '''
        predictor                                   = self.predictors[peer]
        prior                                       = self.priors[peer]
        if prior is None:
            posterior                               = predictor.initialize(measurement, t)
        else:
            posterior                               = predictor.correct(prior, measurement)
        self.posteriors[peer]                       = posterior
        return posterior

    def advance_estimates(self):
        '''
        One-step-ahead prediction of every observed peer; the results are the priors of the next step.
        '''
        for peer, predictor in self.predictors.items():
            posterior                               = self.posteriors[peer]
            if not posterior is None:
                self.priors[peer]                   = predictor.predict(posterior)

    def latch(self, t):
        '''
        Enters station keeping. Latching is permanent.
        '''
        if not self.latched:
            self.latched                            = True
            self.latch_step                         = t

    def record_cost(self, cost, stall_threshold, stall_steps):
        '''
        Tracks consecutive steps whose cost decrease stays below ``stall_threshold``.

        :return: True when the agent has stalled for ``stall_steps`` steps; the counter then restarts
        :rtype: bool
        '''
        stalled                                     = False
        if not self.last_cost is None and self.last_cost - cost < stall_threshold:
            self.stall_count                        += 1
        else:
            self.stall_count                        = 0
        self.last_cost                              = cost

        if self.stall_count >= stall_steps:
            self.stall_count                        = 0
            stalled                                 = True
        return stalled

    def fallback_input(self, t):
        '''
        Input replayed when the solver fails hard: the previous plan advanced to the current step, or hover.
        '''
        if self.last_solution is None:
            return _np.zeros(self.model.n_u())
        shift                                       = t - self.last_solve_step
        return self.last_solution.shifted_inputs(shift)[0]
