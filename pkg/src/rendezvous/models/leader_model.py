import numpy                                                       as _np

from rendezvous.models.vehicle_model                                import VehicleModel

class LeaderModel(VehicleModel):

    '''
    Surface vessel restricted to planar surge and yaw motion. Heave, roll, pitch and sway are neglected.

    State ``(p_x, p_y, p_z, heading, surge_speed, yaw_rate)``, input ``(surge_acc, yaw_acc)``:

    .. code::

        p_x'     = surge_speed cos(heading)
        p_y'     = surge_speed sin(heading)
        p_z'     = 0
        heading' = yaw_rate
        surge'   = surge_acc - surge_damping surge_speed
        yaw'     = yaw_acc   - yaw_damping yaw_rate

    ``p_z`` is reset to exactly 0 after every step, also when a disturbance is added.

    :param ModelParams params: time step, damping coefficients and boxes
    '''
    def __init__(self, params):
        super().__init__(params)

    def name(self):
        return "leader"

    def n_x(self):
        return 6

    def n_u(self):
        return 2

    def continuous(self, x, u):
        heading, surge, yaw_rate                    = x[..., 3], x[..., 4], x[..., 5]
        zero                                        = _np.zeros_like(surge)
        return _np.stack([surge * _np.cos(heading),
                          surge * _np.sin(heading),
                          zero,
                          yaw_rate,
                          u[..., 0] - self.params.surge_damping * surge,
                          u[..., 1] - self.params.yaw_damping * yaw_rate], axis=-1)

    def continuous_jacobians(self, x, u):
        batch_shape                                 = x.shape[:-1]
        heading, surge                              = x[..., 3], x[..., 4]

        Fx                                          = _np.zeros(batch_shape + (6, 6))
        Fu                                          = _np.zeros(batch_shape + (6, 2))

        Fx[..., 0, 3]                               = -surge * _np.sin(heading)
        Fx[..., 0, 4]                               = _np.cos(heading)
        Fx[..., 1, 3]                               = surge * _np.cos(heading)
        Fx[..., 1, 4]                               = _np.sin(heading)
        Fx[..., 3, 5]                               = 1.0
        Fx[..., 4, 4]                               = -self.params.surge_damping
        Fx[..., 5, 5]                               = -self.params.yaw_damping

        Fu[..., 4, 0]                               = 1.0
        Fu[..., 5, 1]                               = 1.0

        return Fx, Fu

    def project_state(self, x):
        x                                           = _np.array(x, dtype=float, copy=True)
        x[..., 2]                                   = 0.0
        return x

    def projection_jacobian(self, A, B):
        A                                           = A.copy()
        B                                           = B.copy()
        A[..., 2, :]                                = 0.0
        B[..., 2, :]                                = 0.0
        return A, B

    def state_from_kinematics(self, position, velocity=None, template=None):
        '''
        Heading and surge speed are recovered from the horizontal velocity when it is non-negligible.
        '''
        x                                           = super().state_from_kinematics(position, velocity, template)
        if not velocity is None:
            vx, vy                                  = float(velocity[0]), float(velocity[1])
            speed                                   = _np.hypot(vx, vy)
            if speed > 1e-9:
                x[3]                                = _np.arctan2(vy, vx)
                x[4]                                = speed
            else:
                x[4]                                = 0.0
        return x
