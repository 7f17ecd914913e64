import math
import numpy                                                       as _np

class ConvergenceConstants():

    '''
    Constants of the exponential convergence certificate of the follower MPC law.

    With ``lambda_ratio = lambda_max(Q_f) / lambda_min(Q_f)``:

    * ``N0 = gamma_bar * lambda_ratio``; the certificate needs ``N > N0``
    * ``alpha_n = 1 - rho * (gamma / N) * lambda_ratio``, the decrease rate of the value function
    * ``alpha_n_worst``, the same rate for the worst-case contraction ``rho = 1``. It is positive exactly when
      ``N > N0`` (for ``gamma = gamma_bar``), while ``alpha_n`` may be positive for shorter horizons too.

    :param float rho: contraction factor of the tracking error under the MPC law
    :param float gamma_bar: upper sandwich constant over the region of attraction, at least 1
    :param float gamma: upper sandwich constant used in ``alpha_n``
    :param float lambda_ratio: condition number of ``Q_f``
    :param int N: horizon
    :param bool empirical: True when ``rho`` (or ``gamma_bar``) was measured on a run rather than given
    '''
    def __init__(self, rho, gamma_bar, gamma, lambda_ratio, N, empirical=False):
        self.rho                                    = float(rho)
        self.gamma_bar                              = float(gamma_bar)
        self.gamma                                  = float(gamma)
        self.lambda_ratio                           = float(lambda_ratio)
        self.N                                      = int(N)
        self.empirical                              = empirical

        self.N0                                     = self.gamma_bar * self.lambda_ratio
        self.alpha_n                                = 1.0 - self.rho * (self.gamma / self.N) * self.lambda_ratio
        self.alpha_n_worst                          = 1.0 - (self.gamma / self.N) * self.lambda_ratio

    def certifiable(self):
        return self.alpha_n > 0

    def horizon_exceeds_N0(self):
        return self.N > self.N0

    def minimal_horizon(self):
        '''
        :return: the smallest horizon with a positive ``alpha_n`` for the same ``rho`` and ``gamma``
        :rtype: int
        '''
        return int(math.floor(self.rho * self.gamma * self.lambda_ratio)) + 1

    def minimal_horizon_worst(self):
        '''
        :return: the smallest horizon above ``N0``
        :rtype: int
        '''
        return int(math.floor(self.N0)) + 1

    def to_dict(self):
        return {"rho":                      self.rho,
                "gamma_bar":                self.gamma_bar,
                "gamma":                    self.gamma,
                "lambda_ratio":             self.lambda_ratio,
                "N":                        self.N,
                "N0":                       self.N0,
                "alpha_n":                  self.alpha_n,
                "alpha_n_worst":            self.alpha_n_worst,
                "certifiable":              self.certifiable(),
                "horizon_exceeds_N0":       self.horizon_exceeds_N0(),
                "minimal_horizon":          self.minimal_horizon(),
                "empirical":                self.empirical}

def sandwich_gamma(V_N_max, initial_errors):
    '''
    ``gamma_bar = V_N_max / min ||x_f(0) - z_l(0)||^2_Q``, no smaller than 1.

    :param float V_N_max: level of the region of attraction
    :param list initial_errors: weighted squared initial errors of the followers
    :raises ValueError: if no error is positive
    '''
    positive                                        = [float(e) for e in initial_errors if e > 0]
    if len(positive) == 0:
        raise ValueError("Sandwich constant needs at least one positive initial error")
    return max(1.0, V_N_max / min(positive))

def compute_constants(Q_f, V_N_max, rho, N, gamma_bar=None, initial_errors=None, empirical=False):
    '''
    :param Q_f: follower stage weight, positive definite
    :param float V_N_max: level of the region of attraction
    :param float rho: contraction factor in ``[0, 1]``
    :param int N: horizon, at least 1
    :param float gamma_bar: sandwich constant from the configuration, used when ``initial_errors`` is not given
    :param list initial_errors: weighted squared initial errors; when given, ``gamma_bar`` is derived from them
    :raises ValueError: on a contraction factor outside ``[0, 1]``, a horizon below 1, a weight that is not
        positive definite, or neither ``gamma_bar`` nor ``initial_errors``
    :rtype: ConvergenceConstants
    '''
    if not 0.0 <= rho <= 1.0:
        raise ValueError("Contraction factor must lie in [0, 1], got " + str(rho))
    if int(N) < 1:
        raise ValueError("Horizon must be at least 1, got " + str(N))

    eigenvalues                                     = _np.linalg.eigvalsh(_np.asarray(Q_f, dtype=float))
    if not eigenvalues[0] > 0:
        raise ValueError("Stage weight must be positive definite, smallest eigenvalue is " + str(eigenvalues[0]))
    lambda_ratio                                    = float(eigenvalues[-1] / eigenvalues[0])

    if not initial_errors is None:
        gamma_bar                                   = sandwich_gamma(V_N_max, initial_errors)
    if gamma_bar is None:
        raise ValueError("Either a sandwich constant or the initial errors must be given")
    if gamma_bar < 1:
        raise ValueError("Sandwich constant must be at least 1, got " + str(gamma_bar))

    return ConvergenceConstants(rho, gamma_bar, gamma_bar, lambda_ratio, N, empirical=empirical)
