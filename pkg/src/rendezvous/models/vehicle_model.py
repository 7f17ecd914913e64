import abc
import numpy                                                       as _np

from rendezvous.util.errors                                         import IntegrationError

class VehicleModel(abc.ABC):

    '''
    Discrete-time vehicle model obtained by integrating continuous dynamics ``xdot = f(x, u)`` with classical RK4
    over one control interval, split into ``params.substeps`` equal substeps.

    All methods accept a single state/input pair or a batch of them stacked along a leading dimension, so that
    the horizon Jacobians of the optimal control solver and the worst-case radius grid are computed in one numpy
    pass. The first three state components are always the position in meters.

    :param ModelParams params: time step, physical constants and constraint boxes
    '''
    def __init__(self, params):
        self.params                                 = params

        if params.state_box.dim() != self.n_x():
            raise ValueError(self.name() + " expects a state box of dimension " + str(self.n_x())
                             + ", got " + str(params.state_box.dim()))
        if params.input_box.dim() != self.n_u():
            raise ValueError(self.name() + " expects an input box of dimension " + str(self.n_u())
                             + ", got " + str(params.input_box.dim()))

    @abc.abstractmethod
    def name(self):
        '''
        :return: short identifier used in logs and artifacts, e.g. "follower"
        :rtype: str
        '''

    @abc.abstractmethod
    def n_x(self):
        '''
        :return: state dimension
        :rtype: int
        '''

    @abc.abstractmethod
    def n_u(self):
        '''
        :return: input dimension
        :rtype: int
        '''

    @abc.abstractmethod
    def continuous(self, x, u):
        '''
        :param x: states, shape ``(..., n_x)``
        :param u: inputs, shape ``(..., n_u)``
        :return: time derivatives, shape ``(..., n_x)``
        '''

    @abc.abstractmethod
    def continuous_jacobians(self, x, u):
        '''
        :param x: states, shape ``(..., n_x)``
        :param u: inputs, shape ``(..., n_u)``
        :return: pair ``(df/dx, df/du)`` of shapes ``(..., n_x, n_x)`` and ``(..., n_x, n_u)``
        '''

    def equilibrium(self, position=None):
        '''
        :return: the equilibrium state at ``position`` (origin by default); ``u = 0`` holds it in place
        '''
        x                                           = _np.zeros(self.n_x())
        if not position is None:
            x[:3]                                   = _np.asarray(position, dtype=float)[:3]
        return self.project_state(x)

    def position(self, x):
        return _np.asarray(x, dtype=float)[..., :3]

    def project_state(self, x):
        '''
        Enforces structural invariants of the state after each step. The default is the identity.
        '''
        return x

    def projection_jacobian(self, A, B):
        '''
        Applies the derivative of :meth:`project_state` to step Jacobians. The default is the identity.
        '''
        return A, B

    def step(self, x, u, w=None):
        '''
        Integrates one control interval from ``x`` under the constant input ``u``, then adds the disturbance ``w``.

        :raises IntegrationError: if any resulting state component is not finite
        '''
        x                                           = _np.asarray(x, dtype=float)
        u                                           = _np.asarray(u, dtype=float)
        h                                           = self.params.dt / self.params.substeps

        x_next                                      = x
        for _ in range(self.params.substeps):
            x_next                                  = self._rk4_substep(x_next, u, h)

        if not w is None:
            x_next                                  = x_next + _np.asarray(w, dtype=float)

        x_next                                      = self.project_state(x_next)
        if not _np.all(_np.isfinite(x_next)):
            raise IntegrationError(self.name() + " model produced non-finite state components from x="
                                   + str(x) + ", u=" + str(u))
        return x_next

    def rollout(self, x0, inputs):
        '''
        :param x0: initial state
        :param inputs: inputs, shape ``(N, n_u)``
        :return: states, shape ``(N+1, n_x)``, obtained by stepping without disturbance
        '''
        inputs                                      = _np.asarray(inputs, dtype=float)
        states                                      = _np.zeros((len(inputs) + 1, self.n_x()))
        states[0]                                   = x0
        for k in range(len(inputs)):
            states[k+1]                             = self.step(states[k], inputs[k])
        return states

    def linearize(self, x, u):
        '''
        Exact Jacobians of :meth:`step` (without disturbance), obtained by differentiating every RK4 stage and
        chaining the substeps.

        :param x: state(s), shape ``(n_x,)`` or ``(K, n_x)``
        :param u: input(s), shape ``(n_u,)`` or ``(K, n_u)``
        :return: pair ``(A, B)`` of shapes ``(..., n_x, n_x)`` and ``(..., n_x, n_u)``
        '''
        x                                           = _np.asarray(x, dtype=float)
        u                                           = _np.asarray(u, dtype=float)
        h                                           = self.params.dt / self.params.substeps
        batch_shape                                 = x.shape[:-1]

        A                                           = _np.broadcast_to(_np.eye(self.n_x()),
                                                                       batch_shape + (self.n_x(), self.n_x())).copy()
        B                                           = _np.zeros(batch_shape + (self.n_x(), self.n_u()))

        x_sub                                       = x
        for _ in range(self.params.substeps):
            A_sub, B_sub                            = self._rk4_substep_jacobians(x_sub, u, h)
            A                                       = A_sub @ A
            B                                       = A_sub @ B + B_sub
            x_sub                                   = self._rk4_substep(x_sub, u, h)

        return self.projection_jacobian(A, B)

    def _rk4_substep(self, x, u, h):
        k1                                          = self.continuous(x, u)
        k2                                          = self.continuous(x + 0.5 * h * k1, u)
        k3                                          = self.continuous(x + 0.5 * h * k2, u)
        k4                                          = self.continuous(x + h * k3, u)
        return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def _rk4_substep_jacobians(self, x, u, h):
        I                                           = _np.eye(self.n_x())

        k1                                          = self.continuous(x, u)
        F1x, F1u                                    = self.continuous_jacobians(x, u)
        K1x, K1u                                    = F1x, F1u

        x2                                          = x + 0.5 * h * k1
        k2                                          = self.continuous(x2, u)
        F2x, F2u                                    = self.continuous_jacobians(x2, u)
        K2x                                         = F2x @ (I + 0.5 * h * K1x)
        K2u                                         = F2x @ (0.5 * h * K1u) + F2u

        x3                                          = x + 0.5 * h * k2
        F3x, F3u                                    = self.continuous_jacobians(x3, u)
        K3x                                         = F3x @ (I + 0.5 * h * K2x)
        K3u                                         = F3x @ (0.5 * h * K2u) + F3u

        x4                                          = x + h * self.continuous(x3, u)
        F4x, F4u                                    = self.continuous_jacobians(x4, u)
        K4x                                         = F4x @ (I + h * K3x)
        K4u                                         = F4x @ (h * K3u) + F4u

        A_sub                                       = I + (h / 6.0) * (K1x + 2.0 * K2x + 2.0 * K3x + K4x)
        B_sub                                       = (h / 6.0) * (K1u + 2.0 * K2u + 2.0 * K3u + K4u)
        return A_sub, B_sub

    def displacement_box(self):
        '''
        Bounded version of the state box used when searching for the largest one-step position displacement.
        Positions do not influence the displacement of a translation-invariant model, so free position components
        are pinned to 0; free angles are bounded to one turn.

        :rtype: Box
        '''
        replacement                                 = _np.full(self.n_x(), _np.pi)
        replacement[:3]                             = 0.0
        return self.params.state_box.with_replaced_infinities(-replacement, replacement)

    def state_from_kinematics(self, position, velocity=None, template=None):
        '''
        Builds a state of this model from a position and an optional velocity, e.g. to seed a predictor from a
        shared trajectory. Components that cannot be inferred are copied from ``template`` if given, else zero.
        '''
        if template is None:
            x                                       = _np.zeros(self.n_x())
        else:
            x                                       = _np.asarray(template, dtype=float).copy()
        x[:3]                                       = _np.asarray(position, dtype=float)[:3]
        return self.project_state(x)
