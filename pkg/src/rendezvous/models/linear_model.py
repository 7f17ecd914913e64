import numpy                                                       as _np

from rendezvous.models.vehicle_model                                import VehicleModel
from rendezvous.models.model_params                                 import Box, ModelParams

class LinearModel(VehicleModel):

    '''
    Discrete-time linear model ``x+ = A x + B u``. It bypasses RK4 integration: :meth:`step` applies the matrices
    directly and :meth:`linearize` returns them unchanged.

    Used as the linear oracle in filter tests, for the linearized follower in least-squares checks, and through
    :class:`ConstantVelocityModel` as a generic predictor for peers whose dynamics are not known.

    :param A: state matrix, shape ``(n_x, n_x)``
    :param B: input matrix, shape ``(n_x, n_u)``
    :param ModelParams params: time step and boxes. If None, unbounded boxes and ``dt = 1`` are used.
    :param str name: identifier used in logs
    '''
    def __init__(self, A, B, params=None, name="linear"):
        self.A                                      = _np.asarray(A, dtype=float)
        self.B                                      = _np.asarray(B, dtype=float)
        self._name                                  = name
        if params is None:
            n_x, n_u                                = self.B.shape
            params                                  = ModelParams(dt          = 1.0,
                                                                  state_box   = Box(_np.full(n_x, -_np.inf),
                                                                                    _np.full(n_x, _np.inf)),
                                                                  input_box   = Box(_np.full(n_u, -_np.inf),
                                                                                    _np.full(n_u, _np.inf)))
        super().__init__(params)

    def name(self):
        return self._name

    def n_x(self):
        return self.A.shape[0]

    def n_u(self):
        return self.B.shape[1]

    def continuous(self, x, u):
        raise NotImplementedError(self._name + " is a discrete-time model and has no continuous dynamics")

    def continuous_jacobians(self, x, u):
        raise NotImplementedError(self._name + " is a discrete-time model and has no continuous dynamics")

    def step(self, x, u, w=None):
        x                                           = _np.asarray(x, dtype=float)
        u                                           = _np.asarray(u, dtype=float)
        x_next                                      = x @ self.A.T + u @ self.B.T
        if not w is None:
            x_next                                  = x_next + _np.asarray(w, dtype=float)
        return self.project_state(x_next)

    def linearize(self, x, u):
        batch_shape                                 = _np.asarray(x, dtype=float).shape[:-1]
        A                                           = _np.broadcast_to(self.A, batch_shape + self.A.shape).copy()
        B                                           = _np.broadcast_to(self.B, batch_shape + self.B.shape).copy()
        return A, B

    def about(model, x_eq, u_eq=None):
        '''
        :param VehicleModel model: nonlinear model to linearize
        :param x_eq: equilibrium state
        :param u_eq: equilibrium input, zero by default
        :return: the linear model of the deviations from ``(x_eq, u_eq)`` of ``model``
        :rtype: LinearModel
        '''
        if u_eq is None:
            u_eq                                    = _np.zeros(model.n_u())
        A, B                                        = model.linearize(x_eq, u_eq)
        return LinearModel(A, B, params=model.params, name=model.name() + "-linearized")

class ConstantVelocityModel(LinearModel):

    '''
    Six-state constant-velocity kinematics ``(p, v)`` with acceleration inputs, exactly discretized over ``dt``.

    :param float dt: time step in seconds
    :param float max_speed: per-axis speed bound, used by the worst-case displacement search
    '''
    def __init__(self, dt, max_speed=5.0):
        I3                                          = _np.eye(3)
        Z3                                          = _np.zeros((3, 3))
        A                                           = _np.block([[I3, dt * I3], [Z3, I3]])
        B                                           = _np.vstack([0.5 * dt * dt * I3, dt * I3])

        INF                                         = _np.inf
        state_box                                   = Box([-INF, -INF, -INF, -max_speed, -max_speed, -max_speed],
                                                          [ INF,  INF,  INF,  max_speed,  max_speed,  max_speed],
                                                          name="constant_velocity.state_box")
        input_box                                   = Box.symmetric(_np.zeros(3), name="constant_velocity.input_box")
        params                                      = ModelParams(dt=dt, state_box=state_box, input_box=input_box)
        super().__init__(A, B, params=params, name="constant-velocity")

    def state_from_kinematics(self, position, velocity=None, template=None):
        x                                           = super().state_from_kinematics(position, velocity, template)
        if not velocity is None:
            x[3:6]                                  = _np.asarray(velocity, dtype=float)[:3]
        return x
