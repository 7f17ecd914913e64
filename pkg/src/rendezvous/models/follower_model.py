import numpy                                                       as _np

from rendezvous.models.vehicle_model                                import VehicleModel

class FollowerModel(VehicleModel):

    '''
    Nine-state quadrotor with attitude-rate inputs.

    State ``(p_x, p_y, p_z, v_x, v_y, v_z, roll, pitch, yaw)``, input ``(dT, w_roll, w_pitch, w_yaw)`` where ``dT``
    is the thrust deviation from hover in Newton. Dynamics:

    .. code::

        p'   = v
        v'   = R(roll, pitch, yaw) (0, 0, (m g + dT) / m) - (0, 0, g) - drag v
        eta' = w

    with ``R`` the Z-Y-X rotation from body to world frame, so that hover (level attitude, zero velocity, ``u = 0``)
    is an equilibrium at any position.

    :param ModelParams params: time step, physical constants and boxes
    '''
    def __init__(self, params):
        super().__init__(params)

    def name(self):
        return "follower"

    def n_x(self):
        return 9

    def n_u(self):
        return 4

    def continuous(self, x, u):
        m                                           = self.params.mass
        g                                           = self.params.gravity

        v                                           = x[..., 3:6]
        roll, pitch, yaw                            = x[..., 6], x[..., 7], x[..., 8]
        specific_thrust                             = (m * g + u[..., 0]) / m

        r3                                          = _thrust_axis(roll, pitch, yaw)

        acc                                         = r3 * specific_thrust[..., None] - self.params.drag * v
        acc[..., 2]                                 -= g

        return _np.concatenate([v, acc, u[..., 1:4]], axis=-1)

    def continuous_jacobians(self, x, u):
        m                                           = self.params.mass
        g                                           = self.params.gravity
        batch_shape                                 = x.shape[:-1]

        roll, pitch, yaw                            = x[..., 6], x[..., 7], x[..., 8]
        specific_thrust                             = (m * g + u[..., 0]) / m

        Fx                                          = _np.zeros(batch_shape + (9, 9))
        Fu                                          = _np.zeros(batch_shape + (9, 4))

        Fx[..., 0:3, 3:6]                           = _np.eye(3)
        Fx[..., 3:6, 3:6]                           = -self.params.drag * _np.eye(3)

        d_roll, d_pitch, d_yaw                      = _thrust_axis_partials(roll, pitch, yaw)
        Fx[..., 3:6, 6]                             = d_roll * specific_thrust[..., None]
        Fx[..., 3:6, 7]                             = d_pitch * specific_thrust[..., None]
        Fx[..., 3:6, 8]                             = d_yaw * specific_thrust[..., None]

        Fu[..., 3:6, 0]                             = _thrust_axis(roll, pitch, yaw) / m
        Fu[..., 6:9, 1:4]                           = _np.eye(3)

        return Fx, Fu

    def state_from_kinematics(self, position, velocity=None, template=None):
        x                                           = super().state_from_kinematics(position, velocity, template)
        if not velocity is None:
            x[3:6]                                  = _np.asarray(velocity, dtype=float)[:3]
        return x

def _thrust_axis(roll, pitch, yaw):
    '''
    Third column of the Z-Y-X rotation matrix, i.e. the body z-axis expressed in the world frame.
    '''
    cr, sr                                          = _np.cos(roll), _np.sin(roll)
    cp, sp                                          = _np.cos(pitch), _np.sin(pitch)
    cy, sy                                          = _np.cos(yaw), _np.sin(yaw)
    return _np.stack([cy * sp * cr + sy * sr,
                      sy * sp * cr - cy * sr,
                      cp * cr], axis=-1)

def _thrust_axis_partials(roll, pitch, yaw):
    cr, sr                                          = _np.cos(roll), _np.sin(roll)
    cp, sp                                          = _np.cos(pitch), _np.sin(pitch)
    cy, sy                                          = _np.cos(yaw), _np.sin(yaw)
    zero                                            = _np.zeros_like(_np.asarray(roll, dtype=float))

    d_roll                                          = _np.stack([-cy * sp * sr + sy * cr,
                                                                 -sy * sp * sr - cy * cr,
                                                                 -cp * sr], axis=-1)
    d_pitch                                         = _np.stack([cy * cp * cr,
                                                                 sy * cp * cr,
                                                                 -sp * cr], axis=-1)
    d_yaw                                           = _np.stack([-sy * sp * cr + cy * sr,
                                                                 cy * sp * cr + sy * sr,
                                                                 zero], axis=-1)
    return d_roll, d_pitch, d_yaw
