import math
import numpy                                                       as _np

from rendezvous.prediction.confidence                               import lambda_max, radius_threshold

class GateParams():

    '''
    Probabilistic landing gate: landing is safe with probability ``p`` while
    ``inner_radius + sqrt(s lambda_max(P)) < platform_radius``.

    :param ConfidenceParams confidence: ``p`` and ``s``
    :param float platform_radius: ``r`` in meters
    :param float inner_radius: radius that the landing points must keep inside the platform, in meters
    :param int dwell: consecutive failing steps after which an abort is recommended
    '''
    def __init__(self, confidence, platform_radius, inner_radius, dwell=5):
        if not inner_radius < platform_radius:
            raise ValueError("Gate inner radius " + str(inner_radius) + " must be smaller than the platform radius "
                             + str(platform_radius))
        if int(dwell) < 1:
            raise ValueError("Gate dwell must be at least 1, got " + str(dwell))
        self.confidence                             = confidence
        self.platform_radius                        = float(platform_radius)
        self.inner_radius                           = float(inner_radius)
        self.dwell                                  = int(dwell)

    def from_config(cfg):
        return GateParams(cfg.confidence, cfg.platform_radius, cfg.gate_inner_radius, cfg.abort_dwell)

    def threshold(self):
        '''
        :return: the largest-eigenvalue bound ``(r - inner)^2 / s``; the gate passes strictly below it
        :rtype: float
        '''
        return radius_threshold(self.platform_radius, self.inner_radius, self.confidence)

class SafetyGate():

    '''
    Gate evaluation at one step.

    :param float margin: ``r - inner - sqrt(s lambda_max)`` in meters; positive iff the gate passes
    '''
    def __init__(self, t, lambda_max, threshold, passed, margin):
        self.t                                      = t
        self.lambda_max                             = lambda_max
        self.threshold                              = threshold
        self.passed                                 = passed
        self.margin                                 = margin

    def to_dict(self):
        return {"t":            self.t,
                "lambda_max":   float(self.lambda_max),
                "threshold":    float(self.threshold),
                "passed":       bool(self.passed),
                "margin":       float(self.margin)}

def evaluate_gate(value, params, t=None):
    '''
    :param value: a position covariance, whose largest eigenvalue is taken, or that eigenvalue itself
    :param GateParams params: gate geometry
    :rtype: SafetyGate
    '''
    arr                                             = _np.asarray(value, dtype=float)
    lam                                             = float(lambda_max(arr)) if arr.ndim >= 2 else float(arr)
    threshold                                       = params.threshold()
    distance                                        = params.inner_radius + math.sqrt(params.confidence.scale * lam)
    # Decided on the eigenvalue so that a value exactly at the threshold fails despite rounding in the square root
    return SafetyGate(t, lam, threshold, lam < threshold, params.platform_radius - distance)

class GateReport():

    '''
    :param list gates: one :class:`SafetyGate` per step
    :param int abort_step: first step at which the gate had failed ``dwell`` consecutive times, or None
    '''
    def __init__(self, gates, abort_step):
        self.gates                                  = gates
        self.abort_step                             = abort_step

    def abort_recommended(self):
        return not self.abort_step is None

    def all_passed(self):
        return all(g.passed for g in self.gates)

    def max_lambda(self):
        return max([g.lambda_max for g in self.gates], default=0.0)

    def min_margin(self):
        return min([g.margin for g in self.gates], default=_np.inf)

    def failures(self):
        return sum(1 for g in self.gates if not g.passed)

class GateMonitor():

    '''
    Online gate used at the step barrier: counts consecutive failures and raises the abort flag after
    ``params.dwell`` of them.
    '''
    def __init__(self, params):
        self.params                                 = params
        self.gates                                  = []
        self.consecutive_failures                   = 0
        self.abort_step                             = None

    def update(self, value, t):
        gate                                        = evaluate_gate(value, self.params, t)
        self.gates.append(gate)
        if gate.passed:
            self.consecutive_failures               = 0
        else:
            self.consecutive_failures               += 1
            if self.consecutive_failures >= self.params.dwell and self.abort_step is None:
                self.abort_step                     = t
        return gate

    def report(self):
        return GateReport(list(self.gates), self.abort_step)

def check_safety_gate(trace, params, steps=None):
    '''
    Offline gate over a trace of covariances (or of their largest eigenvalues).

    :param list trace: one entry per step
    :param GateParams params: gate geometry and dwell
    :param list steps: step of each entry; ``0, 1, ...`` by default
    :rtype: GateReport
    '''
    monitor                                         = GateMonitor(params)
    steps                                           = list(range(len(trace))) if steps is None else list(steps)
    for t, value in zip(steps, trace):
        monitor.update(value, t)
    return monitor.report()
