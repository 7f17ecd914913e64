import numpy                                                       as _np

class SolverStatus():

    '''
    Outcome vocabulary of the optimal control solver.
    '''
    OPTIMAL                                         = "OPTIMAL"           # converged, KKT residual within tolerance
    ACCEPTABLE                                      = "ACCEPTABLE"        # converged step, KKT residual above tolerance
    MAX_ITERATIONS                                  = "MAX_ITERATIONS"    # best iterate so far, flagged
    INFEASIBLE                                      = "INFEASIBLE"        # subproblem infeasible even with slacks
    NUMERICAL_ERROR                                 = "NUMERICAL_ERROR"

    HARD_FAILURES                                   = [INFEASIBLE, NUMERICAL_ERROR]

class OcpSolution():

    '''
    Optimal state and input horizon of one agent, with diagnostics.

    :param states: ``x*(k|t)``, shape ``(N+1, n_x)``; ``states[0]`` is the measured state
    :param inputs: ``u*(k|t)``, shape ``(N, n_u)``
    :param float cost: tracking cost (plus input cost when an input weight is configured); slack penalties excluded
    :param str status: a :class:`SolverStatus` value
    :param int iterations: SQP iterations performed
    :param float kkt_residual: stationarity residual of the last subproblem multipliers, infinity norm
    :param float dynamics_defect: largest ``||x(k+1) - f(x(k), u(k))||_inf``
    :param float max_constraint_violation: largest box violation of states (k >= 1) and inputs
    :param float max_slack: largest violation of the softened constraints, i.e. the slack actually needed
    :param float slack_penalty: penalty paid for ``max_slack``-type slacks
    :param float min_funnel: smallest ``h_C`` over steps 1..N, or None
    :param float min_collision: smallest inflated ``h_ij`` over active steps, or None
    :param str message: free-text detail, e.g. the subproblem status on failure
    '''
    def __init__(self, states, inputs, cost, status, iterations, kkt_residual, dynamics_defect,
                 max_constraint_violation, max_slack, slack_penalty, min_funnel=None, min_collision=None, message=""):
        self.states                                 = states
        self.inputs                                 = inputs
        self.cost                                   = cost
        self.status                                 = status
        self.iterations                             = iterations
        self.kkt_residual                           = kkt_residual
        self.dynamics_defect                        = dynamics_defect
        self.max_constraint_violation               = max_constraint_violation
        self.max_slack                              = max_slack
        self.slack_penalty                          = slack_penalty
        self.min_funnel                             = min_funnel
        self.min_collision                          = min_collision
        self.message                                = message

    # Softened constraints violated by more than this are reported as slack-activated
    SLACK_ACTIVE_THRESHOLD                          = 1e-6

    def failed(self):
        return self.status != SolverStatus.OPTIMAL and self.status != SolverStatus.ACCEPTABLE

    def hard_failure(self):
        return self.status in SolverStatus.HARD_FAILURES

    def slack_active(self):
        return self.max_slack > OcpSolution.SLACK_ACTIVE_THRESHOLD

    def positions(self):
        return self.states[:, :3]

    def shifted_inputs(self, shift=1):
        '''
        :return: the input horizon advanced by ``shift`` steps, padded with the hover input ``u = 0``
        '''
        N                                           = len(self.inputs)
        shifted                                     = _np.zeros_like(self.inputs)
        if shift < N:
            shifted[:N - shift]                     = self.inputs[shift:]
        return shifted

    def diagnostics(self):
        '''
        :return: JSON-ready summary of the solve, without the trajectories
        :rtype: dict
        '''
        return {"status":                   self.status,
                "iterations":               int(self.iterations),
                "cost":                     float(self.cost),
                "kkt_residual":             float(self.kkt_residual),
                "dynamics_defect":          float(self.dynamics_defect),
                "max_constraint_violation": float(self.max_constraint_violation),
                "max_slack":                float(self.max_slack),
                "slack_penalty":            float(self.slack_penalty),
                "min_funnel":               None if self.min_funnel is None else float(self.min_funnel),
                "min_collision":            None if self.min_collision is None else float(self.min_collision),
                "message":                  self.message}
