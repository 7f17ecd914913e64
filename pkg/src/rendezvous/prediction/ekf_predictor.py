import numpy                                                       as _np
import scipy.linalg                                                 as _la

class EkfState():

    '''
    Estimate of another agent's state.

    :param x: state estimate
    :param P: covariance, symmetric positive semidefinite
    :param int t: step of the last update
    :param bool regularized: True if the last correction had to regularize a singular innovation covariance
    '''
    def __init__(self, x, P, t, regularized=False):
        self.x                                      = _np.asarray(x, dtype=float)
        self.P                                      = _np.asarray(P, dtype=float)
        self.t                                      = int(t)
        self.regularized                            = bool(regularized)

class PredictionResult():

    '''
    Open-loop prediction over a horizon. Index 0 is the state the prediction starts from.

    :param states: shape ``(N+1, n_x)``
    :param covariances: shape ``(N+1, n_x, n_x)``
    '''
    def __init__(self, states, covariances):
        self.states                                 = states
        self.covariances                            = covariances

    def positions(self):
        return self.states[:, :3]

    def position_covariances(self):
        return self.covariances[:, :3, :3]

class EkfPredictor():

    '''
    Extended Kalman filter with position-only measurements whose motion model is the zero-input propagation of a
    vehicle model. The unknown input of the observed agent is absorbed by the process noise.

    :param VehicleModel model: motion model
    :param Q: process noise covariance per step, shape ``(n_x, n_x)``
    :param float measurement_sigma: standard deviation of each position measurement component, in meters
    '''
    def __init__(self, model, Q, measurement_sigma=0.05):
        self.model                                  = model
        self.Q                                      = _np.asarray(Q, dtype=float)
        self.R                                      = (float(measurement_sigma) ** 2) * _np.eye(3)
        self.H                                      = _np.zeros((3, model.n_x()))
        self.H[:, :3]                               = _np.eye(3)
        self.u_zero                                 = _np.zeros(model.n_u())

        if self.Q.shape != (model.n_x(), model.n_x()):
            raise ValueError("Process noise for the " + model.name() + " model must be " + str(model.n_x()) + "x"
                             + str(model.n_x()) + ", got " + str(self.Q.shape))

    # Added to a singular innovation covariance
    REGULARIZATION                                  = 1e-12

    def initialize(self, measurement, t, P0=None, template=None):
        '''
        Starts a filter from a first position measurement. Unobserved components come from ``template`` if
        given, else zero, with covariance ``P0`` (``Q`` plus measurement noise on position by default).

        :rtype: EkfState
        '''
        x0                                          = self.model.state_from_kinematics(measurement, template=template)
        if P0 is None:
            P0                                      = self.Q.copy()
            P0[:3, :3]                              += self.R
        return EkfState(x0, P0, t)

    def correct(self, state, measurement):
        '''
        Measurement update with a position measurement. The covariance takes the Joseph form
        ``(I - K H) P (I - K H)^T + K R K^T``, which stays positive semidefinite under rounding.

        :rtype: EkfState
        '''
        z                                           = _np.asarray(measurement, dtype=float)
        if not _np.all(_np.isfinite(z)):
            raise ValueError("Position measurement must be finite, got " + str(z))

        H, P                                        = self.H, state.P
        S                                           = H @ P @ H.T + self.R
        regularized                                 = False
        try:
            factor                                  = _la.cho_factor(S)
        except _la.LinAlgError:
            S                                       = S + EkfPredictor.REGULARIZATION * _np.eye(3)
            factor                                  = _la.cho_factor(S)
            regularized                             = True

        K                                           = _la.cho_solve(factor, H @ P).T
        innovation                                  = z - H @ state.x
        x_new                                       = self.model.project_state(state.x + K @ innovation)
        I_KH                                        = _np.eye(self.model.n_x()) - K @ H
        P_new                                       = I_KH @ P @ I_KH.T + K @ self.R @ K.T
        return EkfState(x_new, _symmetrize(P_new), state.t, regularized=regularized)

    def predict(self, state):
        '''
        Time update with zero input: ``x <- f(x, 0)``, ``P <- A P A^T + Q``.

        :rtype: EkfState
        '''
        A, _                                        = self.model.linearize(state.x, self.u_zero)
        x_new                                       = self.model.step(state.x, self.u_zero)
        P_new                                       = A @ state.P @ A.T + self.Q
        return EkfState(x_new, _symmetrize(P_new), state.t + 1, regularized=state.regularized)

    def ekf_update(self, state, measurement):
        '''
        One full filter cycle: correct with ``measurement``, then predict one step ahead.

        :rtype: EkfState
        '''
        return self.predict(self.correct(state, measurement))

    def predict_horizon(self, state, N):
        '''
        Repeats the prediction step ``N`` times in open loop.

        :rtype: PredictionResult
        '''
        if N < 1:
            raise ValueError("Prediction horizon must be at least 1, got " + str(N))

        n_x                                         = self.model.n_x()
        states                                      = _np.zeros((N + 1, n_x))
        covariances                                 = _np.zeros((N + 1, n_x, n_x))
        states[0]                                   = state.x
        covariances[0]                              = state.P

        current                                     = state
        for k in range(1, N + 1):
            current                                 = self.predict(current)
            states[k]                               = current.x
            covariances[k]                          = current.P
        return PredictionResult(states, covariances)

def _symmetrize(P):
    return 0.5 * (P + P.T)

def default_process_noise(model, position=1e-4, velocity=1e-2, heading=1e-3):
    '''
    Diagonal process noise per step for the models shipped with the engine. Leader ``p_z`` gets no noise since the
    leader never leaves the surface.

    :param VehicleModel model: follower, leader or constant-velocity model
    :return: shape ``(n_x, n_x)``
    '''
    name                                            = model.name()
    if name == "follower":
        diag                                        = [position] * 3 + [velocity] * 3 + [heading] * 3
    elif name == "leader":
        diag                                        = [position, position, 0.0, heading, velocity, heading]
    elif model.n_x() == 6:
        diag                                        = [position] * 3 + [velocity] * 3
    else:
        diag                                        = [position] * 3 + [velocity] * (model.n_x() - 3)
    return _np.diag(diag)
