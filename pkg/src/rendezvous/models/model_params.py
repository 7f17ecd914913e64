import numpy                                                       as _np

from rendezvous.util.errors                                         import ConfigurationError

class Box():

    '''
    Axis-aligned box ``{ x : lower <= x <= upper }``. Infinite bounds are allowed and mean the component is free.

    :param lower: lower bounds, one per component
    :param upper: upper bounds, one per component
    :param str name: used in error messages, e.g. "follower.state_box"
    '''
    def __init__(self, lower, upper, name="box"):
        self.lower                                  = _np.asarray(lower, dtype=float).copy()
        self.upper                                  = _np.asarray(upper, dtype=float).copy()
        self.name                                   = name

        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise ConfigurationError("lower and upper bounds must be vectors of equal length, got shapes "
                                     + str(self.lower.shape) + " and " + str(self.upper.shape), field_path=name)
        if _np.any(_np.isnan(self.lower)) or _np.any(_np.isnan(self.upper)):
            raise ConfigurationError("bounds may not be NaN", field_path=name)
        if _np.any(self.lower > self.upper):
            bad                                     = [int(idx) for idx in _np.nonzero(self.lower > self.upper)[0]]
            raise ConfigurationError("box is empty in components " + str(bad), field_path=name)

    def dim(self):
        return len(self.lower)

    def symmetric(half_widths, name="box"):
        '''
        :return: the box ``[-half_widths, half_widths]``
        :rtype: Box
        '''
        half                                        = _np.asarray(half_widths, dtype=float)
        return Box(-half, half, name=name)

    def contains(self, x, tol=0.0):
        x                                           = _np.asarray(x, dtype=float)
        return bool(_np.all(x >= self.lower - tol) and _np.all(x <= self.upper + tol))

    def violation(self, x):
        '''
        :return: largest amount by which any component of ``x`` (or of any row of ``x``) leaves the box, or 0
        :rtype: float
        '''
        x                                           = _np.asarray(x, dtype=float)
        below                                       = _np.max(self.lower - x, initial=0.0)
        above                                       = _np.max(x - self.upper, initial=0.0)
        return float(max(below, above, 0.0))

    def clip(self, x):
        return _np.clip(x, self.lower, self.upper)

    def is_bounded(self):
        return bool(_np.all(_np.isfinite(self.lower)) and _np.all(_np.isfinite(self.upper)))

    def with_replaced_infinities(self, replacement_lower, replacement_upper):
        '''
        :return: a bounded copy where every infinite bound is swapped for the corresponding replacement value
        :rtype: Box
        '''
        lower                                       = _np.where(_np.isfinite(self.lower), self.lower, replacement_lower)
        upper                                       = _np.where(_np.isfinite(self.upper), self.upper, replacement_upper)
        return Box(lower, upper, name=self.name)

    def to_dict(self):
        return {"lower": [_encode_bound(v) for v in self.lower],
                "upper": [_encode_bound(v) for v in self.upper]}

    def from_dict(d, name="box"):
        if not isinstance(d, dict) or not "lower" in d.keys() or not "upper" in d.keys():
            raise ConfigurationError("expected a table with 'lower' and 'upper' arrays", field_path=name)
        return Box([_decode_bound(v, name) for v in d["lower"]],
                   [_decode_bound(v, name) for v in d["upper"]], name=name)

def _encode_bound(value):
    '''
    TOML has ``inf`` but JSON does not, so infinite bounds are written as strings in both.
    '''
    if _np.isposinf(value):
        return "inf"
    if _np.isneginf(value):
        return "-inf"
    return float(value)

def _decode_bound(value, name):
    if isinstance(value, str):
        if value.strip() in ("inf", "+inf"):
            return _np.inf
        if value.strip() == "-inf":
            return -_np.inf
        raise ConfigurationError("bound '" + value + "' is neither a number nor 'inf'/'-inf'", field_path=name)
    return float(value)

class ModelParams():

    '''
    Parameters of one vehicle model.

    :param float dt: control interval in seconds. Must be positive.
    :param int substeps: number of RK4 substeps per control interval.
    :param float mass: follower mass in kg.
    :param float gravity: gravity acceleration in m/s^2.
    :param float drag: follower linear drag coefficient in 1/s.
    :param float surge_damping: leader surge damping coefficient in 1/s.
    :param float yaw_damping: leader yaw-rate damping coefficient in 1/s.
    :param Box state_box: admissible states.
    :param Box input_box: admissible inputs.
    :param Box disturbance_box: additive disturbance set W, applied after each integrated step.
    '''
    def __init__(self, dt, state_box, input_box, disturbance_box=None, substeps=4, mass=1.0, gravity=9.81,
                 drag=0.1, surge_damping=0.05, yaw_damping=0.1):
        if not dt > 0:
            raise ConfigurationError("dt must be positive, got " + str(dt), field_path="dt")
        if int(substeps) < 1:
            raise ConfigurationError("substeps must be at least 1, got " + str(substeps), field_path="substeps")
        if not mass > 0:
            raise ConfigurationError("mass must be positive, got " + str(mass), field_path="mass")

        self.dt                                     = float(dt)
        self.substeps                               = int(substeps)
        self.mass                                   = float(mass)
        self.gravity                                = float(gravity)
        self.drag                                   = float(drag)
        self.surge_damping                          = float(surge_damping)
        self.yaw_damping                            = float(yaw_damping)
        self.state_box                              = state_box
        self.input_box                              = input_box
        if disturbance_box is None:
            disturbance_box                         = Box.symmetric(_np.zeros(state_box.dim()), name="disturbance_box")
        self.disturbance_box                        = disturbance_box

        if disturbance_box.dim() != state_box.dim():
            raise ConfigurationError("disturbance box has dimension " + str(disturbance_box.dim())
                                     + " but the state has dimension " + str(state_box.dim()),
                                     field_path="disturbance_box")

    def with_dt(self, dt):
        '''
        :return: a copy of these parameters with a different control interval
        :rtype: ModelParams
        '''
        return ModelParams(dt               = dt,
                           state_box        = self.state_box,
                           input_box        = self.input_box,
                           disturbance_box  = self.disturbance_box,
                           substeps         = self.substeps,
                           mass             = self.mass,
                           gravity          = self.gravity,
                           drag             = self.drag,
                           surge_damping    = self.surge_damping,
                           yaw_damping      = self.yaw_damping)

    def follower_defaults(dt=0.2, mass=1.0, gravity=9.81, drag=0.1, substeps=4):
        '''
        Default follower boxes: per-axis speed up to 5 m/s, roll and pitch up to 0.5 rad, thrust deviation within
        half the hover thrust and attitude rates up to 2 rad/s.

        :rtype: ModelParams
        '''
        INF                                         = _np.inf
        state_box                                   = Box([-INF, -INF, -INF, -5.0, -5.0, -5.0, -0.5, -0.5, -INF],
                                                          [ INF,  INF,  INF,  5.0,  5.0,  5.0,  0.5,  0.5,  INF],
                                                          name="follower.state_box")
        hover_thrust                                = mass * gravity
        input_box                                   = Box.symmetric([0.5 * hover_thrust, 2.0, 2.0, 2.0],
                                                                    name="follower.input_box")
        return ModelParams(dt=dt, state_box=state_box, input_box=input_box, substeps=substeps, mass=mass,
                           gravity=gravity, drag=drag)

    def leader_defaults(dt=0.2, surge_damping=0.05, yaw_damping=0.1, substeps=4):
        '''
        Default leader boxes: surge speed within +/-3 m/s, yaw rate within +/-0.5 rad/s, surge acceleration within
        +/-1 m/s^2 and yaw acceleration within +/-0.5 rad/s^2.

        :rtype: ModelParams
        '''
        INF                                         = _np.inf
        state_box                                   = Box([-INF, -INF, -INF, -INF, -3.0, -0.5],
                                                          [ INF,  INF,  INF,  INF,  3.0,  0.5],
                                                          name="leader.state_box")
        input_box                                   = Box.symmetric([1.0, 0.5], name="leader.input_box")
        return ModelParams(dt=dt, state_box=state_box, input_box=input_box, substeps=substeps,
                           surge_damping=surge_damping, yaw_damping=yaw_damping)
