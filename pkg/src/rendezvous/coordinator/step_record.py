import numpy                                                       as _np

from rendezvous.dataset.artifact_schema                             import STEP_RECORD_VERSION

def _floats(values):
    return None if values is None else [float(v) for v in _np.asarray(values, dtype=float).ravel()]

def _optional(value):
    return None if value is None else float(value)

class AgentStepRecord():

    '''
    What one agent did at one step.

    :param state: true state at the start of the step
    :param applied_input: input applied to the true dynamics during the step
    :param float cost: optimal cost of the step's problem
    :param float stage_cost: ``||x(t) - x_r(0|t)||^2_Q``, the first term of ``cost``
    :param float error_sq: ``||x(t) - x_r,true(t)||^2_Q`` against the true leader, for followers
    :param dict solver: solver diagnostics
    :param dict staleness: peer id -> ``t - t_a`` of the newest shared trajectory, or None
    :param int predicted_entries: reference entries of the leader trajectory that came from the predictor
    :param dict inflation: peer id -> collision radius inflation used
    :param bool broadcast: whether the agent's plan was offered to the fabric
    :param float gate_distance: distance to the landing point ``z_l(0|t) + c_i``
    :param float leader_lambda_max: largest eigenvalue of the one-step leader prediction covariance
    :param float perturbation: signed sideways shift applied to the reference to leave a deadlock, or None
    '''
    def __init__(self, agent, role, mode, latched, state, applied_input, cost, stage_cost, error_sq, solver,
                 staleness=None, predicted_entries=0, inflation=None, broadcast=False, gate_distance=None,
                 leader_lambda_max=None, perturbation=None):
        self.agent                                  = agent
        self.role                                   = role
        self.mode                                   = mode
        self.latched                                = latched
        self.state                                  = state
        self.applied_input                          = applied_input
        self.cost                                   = cost
        self.stage_cost                             = stage_cost
        self.error_sq                               = error_sq
        self.solver                                 = solver
        self.staleness                              = {} if staleness is None else staleness
        self.predicted_entries                      = predicted_entries
        self.inflation                              = {} if inflation is None else inflation
        self.broadcast                              = broadcast
        self.gate_distance                          = gate_distance
        self.leader_lambda_max                      = leader_lambda_max
        self.perturbation                           = perturbation

    def to_dict(self):
        return {"agent":                self.agent,
                "role":                 self.role,
                "mode":                 self.mode,
                "latched":              bool(self.latched),
                "state":                _floats(self.state),
                "input":                _floats(self.applied_input),
                "cost":                 _optional(self.cost),
                "stage_cost":           _optional(self.stage_cost),
                "error_sq":             _optional(self.error_sq),
                "solver":               self.solver,
                "staleness":            {peer: (None if k is None else int(k)) for peer, k in self.staleness.items()},
                "predicted_entries":    int(self.predicted_entries),
                "inflation":            {peer: float(v) for peer, v in self.inflation.items()},
                "broadcast":            bool(self.broadcast),
                "gate_distance":        _optional(self.gate_distance),
                "leader_lambda_max":    _optional(self.leader_lambda_max),
                "perturbation":         _optional(self.perturbation)}

class StepRecord():

    '''
    Audit record of one executed step, appended once the step barrier has passed.

    :param int t: step
    :param list agents: :class:`AgentStepRecord` objects in roster order
    :param dict min_funnel: follower id -> ``h_C`` of its true position over the true platform
    :param float min_pairwise: smallest ``h_ij`` over all true follower pairs, or None with a single follower
    :param SafetyGate gate: gate evaluated on the leader prediction covariance, or None without followers
    '''
    def __init__(self, t, agents, min_funnel, min_pairwise, gate):
        self.t                                      = t
        self.agents                                 = agents
        self.min_funnel                             = min_funnel
        self.min_pairwise                           = min_pairwise
        self.gate                                   = gate

    def agent(self, agent_id):
        for rec in self.agents:
            if rec.agent == agent_id:
                return rec
        return None

    def broadcasts(self):
        return [rec.agent for rec in self.agents if rec.broadcast]

    def predicted_entries(self):
        return sum(rec.predicted_entries for rec in self.agents)

    def to_dict(self):
        return {"version":      STEP_RECORD_VERSION,
                "t":            int(self.t),
                "agents":       [rec.to_dict() for rec in self.agents],
                "min_funnel":   {agent: float(h) for agent, h in self.min_funnel.items()},
                "min_pairwise": _optional(self.min_pairwise),
                "gate":         None if self.gate is None else self.gate.to_dict(),
                "broadcasts":   self.broadcasts()}
