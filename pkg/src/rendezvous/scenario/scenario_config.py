import os                                                          as _os
import numpy                                                       as _np

from rendezvous.comm.loss_schedule                                  import LossSchedule
from rendezvous.models.disturbance                                  import DisturbanceSource
from rendezvous.models.follower_model                               import FollowerModel
from rendezvous.models.leader_model                                 import LeaderModel
from rendezvous.models.leader_track                                 import LeaderTrack
from rendezvous.models.model_params                                 import Box, ModelParams
from rendezvous.prediction.confidence                               import ConfidenceParams
from rendezvous.safety.collision_constraint                         import CollisionParams
from rendezvous.safety.funnel_constraint                            import FunnelParams
from rendezvous.safety.landing_geometry                             import LandingGeometry, make_hexagon_offsets, \
                                                                           initial_ring_positions, \
                                                                           validate_landing_geometry
from rendezvous.solver.ocp_spec                                     import SolverOptions
from rendezvous.solver.value_function                               import CostConvention
from rendezvous.util.errors                                         import ConfigurationError
from rendezvous.util.toml_utils                                     import TOML_Utils

class _Section():

    '''
    Reads the keys of one table of a scenario document, remembering which ones were used so that leftovers can be
    reported as unknown.
    '''
    def __init__(self, d, path):
        if d is None:
            d                                       = {}
        if not isinstance(d, dict):
            raise ConfigurationError("expected a table", field_path=path)
        self.d                                      = d
        self.path                                   = path
        self.used                                   = set()

    def field(self, key):
        return self.path + "." + key

    def take(self, key, default=None, required=False):
        self.used.add(key)
        if not key in self.d.keys():
            if required:
                raise ConfigurationError("missing required key", field_path=self.field(key))
            return default
        return self.d[key]

    def number(self, key, default=None, positive=False, non_negative=False):
        value                                       = self.take(key, default, required=default is None)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigurationError("expected a number, got " + repr(value), field_path=self.field(key))
        if positive and not value > 0:
            raise ConfigurationError("must be positive, got " + str(value), field_path=self.field(key))
        if non_negative and value < 0:
            raise ConfigurationError("must be non-negative, got " + str(value), field_path=self.field(key))
        return float(value)

    def integer(self, key, default=None, minimum=None):
        value                                       = self.take(key, default, required=default is None)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError("expected an integer, got " + repr(value), field_path=self.field(key))
        if not minimum is None and value < minimum:
            raise ConfigurationError("must be at least " + str(minimum) + ", got " + str(value),
                                     field_path=self.field(key))
        return int(value)

    def flag(self, key, default):
        value                                       = self.take(key, default)
        if not isinstance(value, bool):
            raise ConfigurationError("expected true or false, got " + repr(value), field_path=self.field(key))
        return value

    def choice(self, key, default, allowed):
        value                                       = self.take(key, default)
        if not value in allowed:
            raise ConfigurationError("expected one of " + str(allowed) + ", got " + repr(value),
                                     field_path=self.field(key))
        return value

    def sub(self, key):
        return _Section(self.take(key, {}), self.field(key))

    def finish(self):
        unknown                                     = sorted(set(self.d.keys()) - self.used)
        if len(unknown) > 0:
            raise ConfigurationError("unknown keys " + str(unknown), field_path=self.path if len(self.path) > 0 else None)

def _matrix(value, n, path, allow_semidefinite=False):
    '''
    Weight matrix from a list of ``n`` diagonal entries or an ``n x n`` nested list.
    '''
    try:
        arr                                         = _np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigurationError("expected a list of numbers or a matrix", field_path=path)
    if arr.shape == (n,):
        arr                                         = _np.diag(arr)
    if arr.shape != (n, n):
        raise ConfigurationError("expected " + str(n) + " diagonal entries or a " + str(n) + "x" + str(n)
                                 + " matrix, got shape " + str(arr.shape), field_path=path)
    if not _np.allclose(arr, arr.T):
        raise ConfigurationError("matrix must be symmetric", field_path=path)
    smallest                                        = float(_np.min(_np.linalg.eigvalsh(arr)))
    if allow_semidefinite and smallest < 0:
        raise ConfigurationError("matrix must be positive semidefinite", field_path=path)
    if not allow_semidefinite and smallest <= 0:
        raise ConfigurationError("matrix must be positive definite", field_path=path)
    return arr

def _matrix_to_value(M):
    if _np.allclose(M, _np.diag(_np.diag(M))):
        return [float(v) for v in _np.diag(M)]
    return [[float(v) for v in row] for row in M]

def _vector(value, n, path):
    try:
        arr                                         = _np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigurationError("expected a list of numbers", field_path=path)
    if arr.shape != (n,) or not _np.all(_np.isfinite(arr)):
        raise ConfigurationError("expected " + str(n) + " finite numbers, got " + repr(value), field_path=path)
    return arr

def _box(section, key, default_box):
    value                                           = section.take(key)
    if value is None:
        return default_box
    box                                             = Box.from_dict(value, name=section.field(key))
    if box.dim() != default_box.dim():
        raise ConfigurationError("expected dimension " + str(default_box.dim()) + ", got " + str(box.dim()),
                                 field_path=section.field(key))
    return box

class CollisionPolicy():

    '''
    How stale peers enter a follower's collision constraints.
    '''
    FULL_HORIZON                                    = "full_horizon"  # every step, radius inflated with staleness
    ONE_STEP                                        = "one_step"      # only k = 1, radius R + worst-case radius

    ALL                                             = [FULL_HORIZON, ONE_STEP]

class LeaderReference():

    HOLD                                            = "hold"
    CONSTANT_VELOCITY                               = "constant_velocity"
    REPLAY                                          = "replay"

    ALL                                             = [HOLD, CONSTANT_VELOCITY, REPLAY]

class ScenarioConfig():

    '''
    Everything needed to run one landing scenario, read from a TOML document. Defaults reproduce the six-follower
    scenario shipped as the ``paper-sec6`` preset, so a document only needs the values it changes.

    Agents are identified as ``leader`` and ``f1`` ... ``fM``; roster indices are 0 for the leader and ``i`` for
    ``fi``.
    '''
    def __init__(self):
        # Populated by from_dict
        pass

    LEADER_ID                                       = "leader"

    SECTIONS                                        = ["scenario", "leader", "followers", "landing", "funnel",
                                                       "collision", "prediction", "certification", "deadlock",
                                                       "solver", "disturbance", "comm"]

    def load(path):
        '''
        :param str path: TOML scenario document
        :rtype: ScenarioConfig
        '''
        d                                           = TOML_Utils().load(path)
        return ScenarioConfig.from_dict(d, base_folder=_os.path.dirname(_os.path.abspath(path)))

    def loads(text, source="<string>", base_folder=None):
        return ScenarioConfig.from_dict(TOML_Utils().loads(text, source), base_folder=base_folder)

    def from_dict(d, base_folder=None):
        '''
        :param dict d: parsed scenario document
        :param str base_folder: folder against which relative file paths (e.g. replay tracks) are resolved
        :raises ConfigurationError: on unknown keys, wrong types or violated invariants, naming the field path
        :rtype: ScenarioConfig
        '''
        root                                        = _Section(d, "")
        cfg                                         = ScenarioConfig()
        cfg.base_folder                             = base_folder

        s                                           = _Section(root.take("scenario", {}), "scenario")
        cfg.name                                    = str(s.take("name", "scenario"))
        seed                                        = s.take("seed")
        if not seed is None and (isinstance(seed, bool) or not isinstance(seed, int) or seed < 0):
            raise ConfigurationError("expected a non-negative integer, got " + repr(seed), field_path="scenario.seed")
        cfg.seed                                    = seed
        cfg.max_steps                               = s.integer("max_steps", 40, minimum=1)
        cfg.dt                                      = s.number("dt", 0.2, positive=True)
        cfg.horizon                                 = s.integer("horizon", 20, minimum=1)
        cfg.tolerance                               = s.number("tolerance", 0.1, positive=True)
        cfg.cost_convention                         = s.choice("cost_convention", CostConvention.FULL,
                                                               CostConvention.ALL)
        cfg.collision_policy                        = s.choice("collision_policy", CollisionPolicy.FULL_HORIZON,
                                                               CollisionPolicy.ALL)
        cfg.inflation_cap                           = s.number("inflation_cap", 0.25, non_negative=True)
        cfg.funnel_margin                           = s.number("funnel_margin", 0.02, non_negative=True)
        cfg.substeps                                = s.integer("substeps", 4, minimum=1)
        s.finish()

        s                                           = _Section(root.take("leader", {}), "leader")
        defaults                                    = ModelParams.leader_defaults(dt=cfg.dt, substeps=cfg.substeps)
        cfg.leader_surge_damping                    = s.number("surge_damping", defaults.surge_damping, non_negative=True)
        cfg.leader_yaw_damping                      = s.number("yaw_damping", defaults.yaw_damping, non_negative=True)
        cfg.leader_state_box                        = _box(s, "state_box", defaults.state_box)
        cfg.leader_input_box                        = _box(s, "input_box", defaults.input_box)
        cfg.leader_disturbance_box                  = _box(s, "disturbance_box", defaults.disturbance_box)
        cfg.leader_Q                                = _matrix(s.take("Q", [10.0, 10.0, 10.0, 1.0, 1.0, 1.0]), 6,
                                                              "leader.Q")
        R                                           = s.take("R")
        cfg.leader_R                                = None if R is None else _matrix(R, 2, "leader.R",
                                                                                     allow_semidefinite=True)
        cfg.leader_initial_state                    = _vector(s.take("initial_state", [0.0] * 6), 6,
                                                              "leader.initial_state")
        r                                           = s.sub("reference")
        cfg.leader_reference                        = r.choice("kind", LeaderReference.CONSTANT_VELOCITY,
                                                               LeaderReference.ALL)
        cfg.leader_speed                            = r.number("speed", 0.3)
        cfg.leader_heading                          = r.number("heading", 0.0)
        cfg.leader_track                            = r.take("track")
        if cfg.leader_reference == LeaderReference.REPLAY and cfg.leader_track is None:
            raise ConfigurationError("replayed leader reference needs a track file", field_path="leader.reference.track")
        r.finish()
        s.finish()

        s                                           = _Section(root.take("followers", {}), "followers")
        cfg.follower_count                          = s.integer("count", 6, minimum=1)
        defaults                                    = ModelParams.follower_defaults(dt=cfg.dt, substeps=cfg.substeps)
        cfg.follower_mass                           = s.number("mass", defaults.mass, positive=True)
        cfg.follower_gravity                        = s.number("gravity", defaults.gravity, positive=True)
        cfg.follower_drag                           = s.number("drag", defaults.drag, non_negative=True)
        defaults                                    = ModelParams.follower_defaults(dt=cfg.dt, mass=cfg.follower_mass,
                                                                                    gravity=cfg.follower_gravity,
                                                                                    drag=cfg.follower_drag,
                                                                                    substeps=cfg.substeps)
        cfg.follower_state_box                      = _box(s, "state_box", defaults.state_box)
        cfg.follower_input_box                      = _box(s, "input_box", defaults.input_box)
        cfg.follower_disturbance_box                = _box(s, "disturbance_box", defaults.disturbance_box)
        cfg.follower_Q                              = _matrix(s.take("Q", [10.0, 10.0, 5.0] + [1.0] * 6), 9,
                                                              "followers.Q")
        R                                           = s.take("R")
        cfg.follower_R                              = None if R is None else _matrix(R, 4, "followers.R",
                                                                                     allow_semidefinite=True)
        cfg.ring_radius                             = s.number("ring_radius", 5.0, positive=True)
        cfg.ring_altitude                           = s.number("ring_altitude", 10.0)
        positions                                   = s.take("initial_positions")
        if positions is None:
            cfg.follower_initial_positions          = None
        else:
            if not isinstance(positions, list) or len(positions) != cfg.follower_count:
                raise ConfigurationError("expected " + str(cfg.follower_count) + " positions",
                                         field_path="followers.initial_positions")
            cfg.follower_initial_positions          = [_vector(p, 3, "followers.initial_positions[" + str(i) + "]")
                                                       for i, p in enumerate(positions)]
        s.finish()

        s                                           = _Section(root.take("landing", {}), "landing")
        cfg.platform_radius                         = s.number("platform_radius", 2.5, positive=True)
        cfg.safe_radius                             = s.number("safe_radius", 0.5, positive=True)
        cfg.landing_radius                          = s.number("landing_radius", 1.5, non_negative=True)
        offsets                                     = s.take("offsets")
        if offsets is None:
            cfg.offsets                             = None
        else:
            if not isinstance(offsets, list) or len(offsets) != cfg.follower_count:
                raise ConfigurationError("expected " + str(cfg.follower_count) + " offsets",
                                         field_path="landing.offsets")
            cfg.offsets                             = [_vector(c, 3, "landing.offsets[" + str(i) + "]")
                                                       for i, c in enumerate(offsets)]
        s.finish()

        s                                           = _Section(root.take("funnel", {}), "funnel")
        cfg.funnel                                  = FunnelParams(safety_height = s.number("safety_height", 2.0),
                                                                   radius        = s.number("radius", 2.5),
                                                                   slope         = s.number("slope", 1.0),
                                                                   deck_height   = s.number("deck_height", 0.0))
        s.finish()

        s                                           = _Section(root.take("collision", {}), "collision")
        cfg.collision                               = CollisionParams(min_distance    = s.number("min_distance", 1.0),
                                                                      enabled         = s.flag("enabled", True),
                                                                      vertical_factor = s.number("vertical_factor", 1.0))
        s.finish()

        s                                           = _Section(root.take("prediction", {}), "prediction")
        cfg.confidence                              = ConfidenceParams(s.number("confidence", 0.95))
        cfg.measurement_sigma                       = s.number("measurement_sigma", 0.05, non_negative=True)
        cfg.noise_position                          = s.number("process_noise_position", 1e-4, non_negative=True)
        cfg.noise_velocity                          = s.number("process_noise_velocity", 1e-2, non_negative=True)
        cfg.noise_heading                           = s.number("process_noise_heading", 1e-3, non_negative=True)
        s.finish()

        s                                           = _Section(root.take("certification", {}), "certification")
        cfg.V_N_max                                 = s.number("V_N_max", 240.0, positive=True)
        cfg.gamma_bar                               = s.number("gamma_bar", 1.99)
        if cfg.gamma_bar < 1:
            raise ConfigurationError("must be at least 1, got " + str(cfg.gamma_bar),
                                     field_path="certification.gamma_bar")
        cfg.gate_inner_radius                       = s.number("gate_inner_radius", cfg.landing_radius,
                                                               non_negative=True)
        cfg.abort_dwell                             = s.integer("abort_dwell", 5, minimum=1)
        s.finish()

        s                                           = _Section(root.take("deadlock", {}), "deadlock")
        cfg.stall_threshold                         = s.number("stall_threshold", 1e-3, non_negative=True)
        cfg.stall_steps                             = s.integer("stall_steps", 10, minimum=1)
        cfg.perturbation                            = s.number("perturbation", 0.5, non_negative=True)
        s.finish()

        s                                           = _Section(root.take("solver", {}), "solver")
        base                                        = SolverOptions()
        cfg.solver                                  = SolverOptions(
                                                        max_iterations  = s.integer("max_iterations", base.max_iterations,
                                                                                    minimum=1),
                                                        tolerance       = s.number("tolerance", base.tolerance),
                                                        step_tolerance  = s.number("step_tolerance", base.step_tolerance),
                                                        slack_linear    = s.number("slack_linear", base.slack_linear),
                                                        slack_quadratic = s.number("slack_quadratic",
                                                                                   base.slack_quadratic),
                                                        regularization  = s.number("regularization", base.regularization),
                                                        qp_eps          = s.number("qp_eps", base.qp_eps),
                                                        qp_max_iter     = s.integer("qp_max_iter", base.qp_max_iter,
                                                                                    minimum=1))
        s.finish()

        s                                           = _Section(root.take("disturbance", {}), "disturbance")
        cfg.disturbance_mode                        = s.choice("mode", DisturbanceSource.NONE, DisturbanceSource.MODES)
        cfg.disturbance_track                       = s.take("track")
        if cfg.disturbance_mode == DisturbanceSource.REPLAY and cfg.disturbance_track is None:
            raise ConfigurationError("replayed disturbances need a track file", field_path="disturbance.track")
        s.finish()

        s                                           = _Section(root.take("comm", {}), "comm")
        cfg.loss_rules                              = s.take("loss", [])
        s.finish()
        root.finish()

        cfg._check_seed()
        cfg.schedule                                = LossSchedule.from_list(cfg.loss_rules, seed=cfg.seed,
                                                                             field_path="comm.loss")
        return cfg

    def _check_seed(self):
        # Random message drops are checked by LossSchedule. Measurement noise falls back to seed 0.
        if self.disturbance_mode == DisturbanceSource.SEEDED and self.seed is None:
            raise ConfigurationError("a seed is required for seeded disturbances", field_path="scenario.seed")

    def noise_seed(self):
        return 0 if self.seed is None else self.seed

    def to_dict(self):
        '''
        :return: the canonical document of this scenario, every default made explicit. ``from_dict`` of the result
            reproduces this configuration.
        :rtype: dict
        '''
        scenario                                    = {"name":              self.name,
                                                       "max_steps":         self.max_steps,
                                                       "dt":                self.dt,
                                                       "horizon":           self.horizon,
                                                       "tolerance":         self.tolerance,
                                                       "cost_convention":   self.cost_convention,
                                                       "collision_policy":  self.collision_policy,
                                                       "inflation_cap":     self.inflation_cap,
                                                       "funnel_margin":     self.funnel_margin,
                                                       "substeps":          self.substeps}
        if not self.seed is None:
            scenario["seed"]                        = self.seed

        reference                                   = {"kind": self.leader_reference, "speed": self.leader_speed,
                                                       "heading": self.leader_heading}
        if not self.leader_track is None:
            reference["track"]                      = self.leader_track
        leader                                      = {"surge_damping":     self.leader_surge_damping,
                                                       "yaw_damping":       self.leader_yaw_damping,
                                                       "state_box":         self.leader_state_box.to_dict(),
                                                       "input_box":         self.leader_input_box.to_dict(),
                                                       "disturbance_box":   self.leader_disturbance_box.to_dict(),
                                                       "Q":                 _matrix_to_value(self.leader_Q),
                                                       "initial_state":     [float(v) for v in self.leader_initial_state],
                                                       "reference":         reference}
        if not self.leader_R is None:
            leader["R"]                             = _matrix_to_value(self.leader_R)

        followers                                   = {"count":             self.follower_count,
                                                       "mass":              self.follower_mass,
                                                       "gravity":           self.follower_gravity,
                                                       "drag":              self.follower_drag,
                                                       "state_box":         self.follower_state_box.to_dict(),
                                                       "input_box":         self.follower_input_box.to_dict(),
                                                       "disturbance_box":   self.follower_disturbance_box.to_dict(),
                                                       "Q":                 _matrix_to_value(self.follower_Q),
                                                       "ring_radius":       self.ring_radius,
                                                       "ring_altitude":     self.ring_altitude}
        if not self.follower_R is None:
            followers["R"]                          = _matrix_to_value(self.follower_R)
        if not self.follower_initial_positions is None:
            followers["initial_positions"]          = [[float(v) for v in p] for p in self.follower_initial_positions]

        landing                                     = {"platform_radius":   self.platform_radius,
                                                       "safe_radius":       self.safe_radius,
                                                       "landing_radius":    self.landing_radius}
        if not self.offsets is None:
            landing["offsets"]                      = [[float(v) for v in c] for c in self.offsets]

        disturbance                                 = {"mode": self.disturbance_mode}
        if not self.disturbance_track is None:
            disturbance["track"]                    = self.disturbance_track

        return {"scenario":         scenario,
                "leader":           leader,
                "followers":        followers,
                "landing":          landing,
                "funnel":           self.funnel.to_dict(),
                "collision":        self.collision.to_dict(),
                "prediction":       {"confidence":              self.confidence.level,
                                     "measurement_sigma":       self.measurement_sigma,
                                     "process_noise_position":  self.noise_position,
                                     "process_noise_velocity":  self.noise_velocity,
                                     "process_noise_heading":   self.noise_heading},
                "certification":    {"V_N_max":                 self.V_N_max,
                                     "gamma_bar":               self.gamma_bar,
                                     "gate_inner_radius":       self.gate_inner_radius,
                                     "abort_dwell":             self.abort_dwell},
                "deadlock":         {"stall_threshold":         self.stall_threshold,
                                     "stall_steps":             self.stall_steps,
                                     "perturbation":            self.perturbation},
                "solver":           self.solver.to_dict(),
                "disturbance":      disturbance,
                "comm":             {"loss": self.schedule.to_list()}}

    def with_overrides(self, seed=None, max_steps=None):
        '''
        :return: a copy with the command line overrides applied
        :rtype: ScenarioConfig
        '''
        d                                           = self.to_dict()
        if not seed is None:
            d["scenario"]["seed"]                   = int(seed)
        if not max_steps is None:
            d["scenario"]["max_steps"]              = int(max_steps)
        return ScenarioConfig.from_dict(d, base_folder=self.base_folder)

    def follower_ids(self):
        return ["f" + str(i) for i in range(1, self.follower_count + 1)]

    def agent_ids(self):
        return [ScenarioConfig.LEADER_ID] + self.follower_ids()

    def follower_params(self):
        return ModelParams(dt=self.dt, state_box=self.follower_state_box, input_box=self.follower_input_box,
                           disturbance_box=self.follower_disturbance_box, substeps=self.substeps,
                           mass=self.follower_mass, gravity=self.follower_gravity, drag=self.follower_drag)

    def leader_params(self):
        return ModelParams(dt=self.dt, state_box=self.leader_state_box, input_box=self.leader_input_box,
                           disturbance_box=self.leader_disturbance_box, substeps=self.substeps,
                           surge_damping=self.leader_surge_damping, yaw_damping=self.leader_yaw_damping)

    def follower_model(self):
        return FollowerModel(self.follower_params())

    def leader_model(self):
        return LeaderModel(self.leader_params())

    def landing_offsets(self):
        if self.offsets is None:
            return make_hexagon_offsets(self.follower_count, self.landing_radius)
        return [c.copy() for c in self.offsets]

    def landing_geometry(self):
        return LandingGeometry(self.platform_radius, self.safe_radius, self.landing_offsets())

    def geometry_report(self):
        return validate_landing_geometry(self.landing_geometry(), self.collision)

    def follower_initial_states(self):
        model                                       = self.follower_model()
        positions                                   = self.follower_initial_positions
        if positions is None:
            positions                               = initial_ring_positions(self.follower_count, self.ring_radius,
                                                                             self.ring_altitude)
        origin                                      = self.leader_initial_state[:3]
        return [model.equilibrium(origin + p) for p in positions]

    def resolve_path(self, path):
        if path is None or _os.path.isabs(path) or self.base_folder is None:
            return path
        return _os.path.join(self.base_folder, path)

    def leader_track_data(self):
        '''
        :return: the recorded track used by the replay reference or the replay disturbance, or None
        :rtype: LeaderTrack
        '''
        path                                        = self.leader_track if self.leader_reference == LeaderReference.REPLAY \
                                                        else self.disturbance_track
        if path is None:
            return None
        return LeaderTrack.load(self.resolve_path(path))

    def disturbance_source(self):
        track                                       = None
        if self.disturbance_mode == DisturbanceSource.REPLAY:
            track                                   = LeaderTrack.load(self.resolve_path(self.disturbance_track))
        return DisturbanceSource(self.disturbance_mode, seed=self.seed, track=track)

    PRESETS                                         = {"paper-sec6": "paper_sec6.toml"}

    def preset_path(name):
        '''
        :param str name: a key of :attr:`PRESETS`, e.g. ``paper-sec6``
        :return: path of the preset document shipped with the package
        :rtype: str
        '''
        if not name in ScenarioConfig.PRESETS.keys():
            raise ConfigurationError("unknown preset '" + str(name) + "'; available presets are "
                                     + ", ".join(sorted(ScenarioConfig.PRESETS.keys())))
        return _os.path.join(_os.path.dirname(_os.path.abspath(__file__)), "presets", ScenarioConfig.PRESETS[name])

    def load_preset(name):
        return ScenarioConfig.load(ScenarioConfig.preset_path(name))
