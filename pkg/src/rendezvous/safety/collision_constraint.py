import numpy                                                       as _np

from rendezvous.util.errors                                         import ConfigurationError

class CollisionParams():

    '''
    Inter-follower separation requirement ``||C (p_i - p_j)|| >= R`` with ``C = diag(1, 1, c)``. A vertical factor
    ``c > 1`` stretches the keep-out set vertically, which keeps followers out of each other's downwash.

    :param float min_distance: ``R`` in meters
    :param float vertical_factor: ``c``, dimensionless. 1 gives a sphere.
    :param bool enabled: whether the controllers impose the requirement. The post-run check always applies it.
    '''
    def __init__(self, min_distance, vertical_factor=1.0, enabled=True):
        if not min_distance > 0:
            raise ConfigurationError("must be positive, got " + str(min_distance), field_path="collision.min_distance")
        if not vertical_factor > 0:
            raise ConfigurationError("must be positive, got " + str(vertical_factor),
                                     field_path="collision.vertical_factor")
        self.min_distance                           = float(min_distance)
        self.vertical_factor                        = float(vertical_factor)
        self.enabled                                = bool(enabled)

    def shaping(self):
        '''
        :return: the position block of the shaping matrix ``C``
        '''
        return _np.diag([1.0, 1.0, self.vertical_factor])

    def to_dict(self):
        return {"enabled": self.enabled, "min_distance": self.min_distance, "vertical_factor": self.vertical_factor}

def _shaped_difference(x_i, z_j, cp):
    d                                               = _np.asarray(x_i, dtype=float)[..., :3] \
                                                        - _np.asarray(z_j, dtype=float)[..., :3]
    scale                                           = _np.array([1.0, 1.0, cp.vertical_factor])
    return d * scale, scale

def eval_h_ij(x_i, z_j, cp, inflation=0.0):
    '''
    Collision constraint value ``||C (p_i - p_j)|| - R - inflation``. Non-negative means admissible.

    :param x_i: own state(s), position first
    :param z_j: peer position-bearing vector(s)
    :param CollisionParams cp: separation requirement
    :param inflation: extra radius, scalar or broadcastable to the batch shape
    '''
    shaped, _                                       = _shaped_difference(x_i, z_j, cp)
    return _np.linalg.norm(shaped, axis=-1) - cp.min_distance - inflation

def grad_h_ij(x_i, z_j, cp):
    '''
    Gradient of :func:`eval_h_ij` with respect to the own position, ``C^T C d / ||C d||``. It is zero where the two
    positions coincide.

    :return: array of shape ``(..., 3)``
    '''
    shaped, scale                                   = _shaped_difference(x_i, z_j, cp)
    norm                                            = _np.linalg.norm(shaped, axis=-1, keepdims=True)
    safe_norm                                       = _np.where(norm > 1e-12, norm, 1.0)
    return _np.where(norm > 1e-12, shaped * scale / safe_norm, 0.0)
