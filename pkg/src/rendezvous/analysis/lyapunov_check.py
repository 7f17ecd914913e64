import numpy                                                       as _np

class LyapunovStep():

    '''
    Decrease check between steps ``t`` and ``t+1`` of one follower.

    :param float value: ``V_N`` at ``t``
    :param float next_value: ``V_N`` at ``t+1``
    :param float error_sq: ``||x_f(t) - z_l(t)||^2_Q``
    :param float bound: allowed change ``-alpha_n * error_sq``
    :param bool violated: True if ``next_value - value`` exceeds ``bound`` by more than the tolerance
    '''
    def __init__(self, t, value, next_value, error_sq, bound, tolerance, violated):
        self.t                                      = t
        self.value                                  = value
        self.next_value                             = next_value
        self.error_sq                               = error_sq
        self.bound                                  = bound
        self.tolerance                              = tolerance
        self.violated                               = violated

    def excess(self):
        return (self.next_value - self.value) - self.bound

    def to_dict(self):
        return {"t":            int(self.t),
                "value":        float(self.value),
                "next_value":   float(self.next_value),
                "error_sq":     float(self.error_sq),
                "bound":        float(self.bound),
                "excess":       float(self.excess()),
                "violated":     bool(self.violated)}

class LyapunovReport():

    '''
    :param list steps: one :class:`LyapunovStep` per consecutive pair of values
    :param list sandwich_violations: steps whose value left ``[error_sq, gamma * error_sq]``
    :param float alpha_n: decrease rate checked against
    :param float gamma: upper sandwich constant checked against
    :param float max_ratio: largest observed ``V_N / error_sq``, None when no error was positive
    '''
    def __init__(self, steps, sandwich_violations, alpha_n, gamma, nonincreasing, max_ratio=None):
        self.steps                                  = steps
        self.sandwich_violations                    = sandwich_violations
        self.alpha_n                                = alpha_n
        self.gamma                                  = gamma
        self.nonincreasing                          = nonincreasing
        self.max_ratio                              = max_ratio

    def violations(self):
        return [s for s in self.steps if s.violated]

    def violation_steps(self):
        return [s.t for s in self.violations()]

    def passed(self):
        return len(self.violations()) == 0 and len(self.sandwich_violations) == 0

    def to_dict(self):
        return {"passed":               self.passed(),
                "alpha_n":              float(self.alpha_n),
                "gamma":                float(self.gamma),
                "nonincreasing":        bool(self.nonincreasing),
                "checked_steps":        len(self.steps),
                "violations":           [s.to_dict() for s in self.violations()],
                "sandwich_violations":  [int(t) for t in self.sandwich_violations],
                "max_ratio":            None if self.max_ratio is None else float(self.max_ratio)}

def estimate_contraction(errors, floor=1e-12):
    '''
    Empirical contraction factor: the largest ratio ``errors[t+1] / errors[t]`` over the steps whose error is above
    ``floor``. 0 when there is no such step.

    :param list errors: weighted squared tracking errors, one per step
    :rtype: float
    '''
    e                                               = _np.asarray(errors, dtype=float)
    if len(e) < 2:
        return 0.0
    current, following                              = e[:-1], e[1:]
    usable                                          = current > floor
    if not _np.any(usable):
        return 0.0
    return float(_np.max(following[usable] / current[usable]))

def check_lyapunov_decrease(values, errors, alpha_n, gamma, tolerance=1e-6, steps=None):
    '''
    Checks ``V_N(t+1) - V_N(t) <= -alpha_n ||x_f(t) - z_l(t)||^2_Q`` for every consecutive pair of steps, and the
    sandwich ``error_sq <= V_N <= gamma * error_sq`` at every step. Both allow ``tolerance * |V_N(t)|``.

    :param list values: ``V_N`` per step, as computed by the controller
    :param list errors: ``||x_f - z_l||^2_Q`` per step
    :param float alpha_n: decrease rate
    :param float gamma: upper sandwich constant
    :param float tolerance: relative tolerance
    :param list steps: step of each entry; ``0, 1, ...`` by default
    :rtype: LyapunovReport
    '''
    V                                               = _np.asarray(values, dtype=float)
    e                                               = _np.asarray(errors, dtype=float)
    if len(V) != len(e):
        raise ValueError("Got " + str(len(V)) + " values but " + str(len(e)) + " errors")
    steps                                           = list(range(len(V))) if steps is None else list(steps)

    checked                                         = []
    for idx in range(len(V) - 1):
        slack                                       = tolerance * abs(V[idx])
        bound                                       = -alpha_n * e[idx]
        violated                                    = (V[idx + 1] - V[idx]) > bound + slack
        checked.append(LyapunovStep(steps[idx], V[idx], V[idx + 1], e[idx], bound, slack, bool(violated)))

    sandwich                                        = []
    for idx in range(len(V)):
        slack                                       = tolerance * abs(V[idx])
        if V[idx] < e[idx] - slack or V[idx] > gamma * e[idx] + slack:
            sandwich.append(steps[idx])

    nonincreasing                                   = bool(_np.all(_np.diff(V) <= tolerance * _np.abs(V[:-1]))) \
                                                        if len(V) > 1 else True
    positive                                        = e > 0
    max_ratio                                       = float(_np.max(V[positive] / e[positive])) \
                                                        if _np.any(positive) else None
    return LyapunovReport(checked, sandwich, alpha_n, gamma, nonincreasing, max_ratio=max_ratio)
