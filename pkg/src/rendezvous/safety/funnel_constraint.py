import numpy                                                       as _np

from rendezvous.util.errors                                         import ConfigurationError

class FunnelParams():

    '''
    Shape of the restricted area around the landing platform. Followers must stay above a sigmoid-shaped floor
    that sits at ``h_s`` far from the platform and drops towards the deck above the platform disc.

    :param float safety_height: ``h_s``, height of the floor far from the platform, in meters
    :param float radius: platform radius ``r`` in meters, where the floor is at half height
    :param float slope: ``beta`` in 1/m^2, steepness of the transition
    :param float deck_height: vertical offset of the deck above the leader's reference point, 0 by default
    '''
    def __init__(self, safety_height, radius, slope, deck_height=0.0):
        if not safety_height > 0:
            raise ConfigurationError("must be positive, got " + str(safety_height), field_path="funnel.safety_height")
        if not radius > 0:
            raise ConfigurationError("must be positive, got " + str(radius), field_path="funnel.radius")
        if not slope > 0:
            raise ConfigurationError("must be positive, got " + str(slope), field_path="funnel.slope")

        self.safety_height                          = float(safety_height)
        self.radius                                 = float(radius)
        self.slope                                  = float(slope)
        self.deck_height                            = float(deck_height)

    def to_dict(self):
        return {"safety_height": self.safety_height, "radius": self.radius, "slope": self.slope,
                "deck_height": self.deck_height}

# Bound on the sigmoid argument; beyond it the sigmoid equals 0 or 1 to well below double precision
EXPONENT_CLAMP                                                      = 50.0

def _sigmoid_argument(x_f, z_l, fp):
    p                                               = _np.asarray(x_f, dtype=float)[..., :3]
    c                                               = _np.asarray(z_l, dtype=float)[..., :3]
    dx                                              = p[..., 0] - c[..., 0]
    dy                                              = p[..., 1] - c[..., 1]
    raw                                             = fp.slope * (dx * dx + dy * dy - fp.radius * fp.radius)
    return _np.clip(raw, -EXPONENT_CLAMP, EXPONENT_CLAMP), dx, dy, p, c

def eval_h_C(x_f, z_l, fp):
    '''
    Funnel constraint value ``h_C = p_z - deck - h_s / (1 + exp(-beta (dx^2 + dy^2 - r^2)))``, where ``dx, dy`` is
    the horizontal offset of the follower from the platform center. Non-negative means admissible.

    :param x_f: follower state(s), position first, shape ``(..., >=3)``
    :param z_l: leader position-bearing vector(s), shape ``(..., >=3)``
    :param FunnelParams fp: funnel shape
    :return: scalar or array of shape ``(...)``
    '''
    arg, dx, dy, p, c                               = _sigmoid_argument(x_f, z_l, fp)
    sigma                                           = 1.0 / (1.0 + _np.exp(-arg))
    return p[..., 2] - c[..., 2] - fp.deck_height - fp.safety_height * sigma

def grad_h_C(x_f, z_l, fp):
    '''
    Gradient of :func:`eval_h_C` with respect to the follower position. The vertical component is always 1.

    :return: array of shape ``(..., 3)``
    '''
    arg, dx, dy, p, c                               = _sigmoid_argument(x_f, z_l, fp)
    sigma                                           = 1.0 / (1.0 + _np.exp(-arg))
    factor                                          = -fp.safety_height * sigma * (1.0 - sigma) * fp.slope * 2.0
    return _np.stack([factor * dx, factor * dy, _np.ones_like(factor)], axis=-1)

def funnel_floor(horizontal_distance, fp):
    '''
    :return: lowest admissible height above the deck at the given horizontal distance from the platform center
    '''
    arg                                             = _np.clip(fp.slope * (_np.asarray(horizontal_distance) ** 2
                                                                           - fp.radius ** 2),
                                                               -EXPONENT_CLAMP, EXPONENT_CLAMP)
    return fp.safety_height / (1.0 + _np.exp(-arg))
