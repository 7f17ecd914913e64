from rendezvous.analysis.collision_verifier                         import verify_collision_free
from rendezvous.analysis.convergence_constants                      import compute_constants, sandwich_gamma
from rendezvous.analysis.lyapunov_check                             import check_lyapunov_decrease, estimate_contraction
from rendezvous.analysis.safety_gate                                import GateParams, check_safety_gate
from rendezvous.coordinator.agent_runtime                           import AgentRuntime
from rendezvous.prediction.confidence                               import radius_threshold

class CertificationReport():

    '''
    Offline certificates of a run: value function decrease per follower, probabilistic landing gate and
    collision freedom.

    The decrease certificate is empirical: the contraction factor is measured on the run, as the largest one-step
    ratio of the weighted tracking errors.

    :param str convention: cost convention of the controller whose values were checked
    :param ConvergenceConstants constants: constants with the measured contraction factor
    :param float rho_hat: measured contraction factor, possibly 1 or more
    :param dict lyapunov: follower id -> :class:`LyapunovReport`
    :param GateReport gate: gate over the run
    :param float gate_threshold: eigenvalue bound of the gate
    :param float landing_threshold: eigenvalue bound for the safe radius alone, ``(r - r_safe)^2 / s``
    :param CollisionReport collision: realized clearances
    '''
    def __init__(self, convention, constants, rho_hat, lyapunov, gate, gate_threshold, landing_threshold, collision):
        self.convention                             = convention
        self.constants                              = constants
        self.rho_hat                                = rho_hat
        self.lyapunov                               = lyapunov
        self.gate                                   = gate
        self.gate_threshold                         = gate_threshold
        self.landing_threshold                      = landing_threshold
        self.collision                              = collision

    def contracting(self):
        return self.rho_hat < 1.0

    def lyapunov_violations(self):
        return sum(len(rep.violations()) for rep in self.lyapunov.values())

    def sandwich_violations(self):
        return sum(len(rep.sandwich_violations) for rep in self.lyapunov.values())

    def max_ratio(self):
        ratios                                      = [rep.max_ratio for rep in self.lyapunov.values()
                                                       if not rep.max_ratio is None]
        return max(ratios, default=None)

    def sandwich_note(self):
        '''
        :return: why the upper sandwich failed, or None when it held
        '''
        if self.sandwich_violations() == 0:
            return None
        ratio                                       = self.max_ratio()
        return ("V_N / error_sq reached " + ("an unbounded value" if ratio is None else "{0:.3g}".format(ratio))
                + " against gamma = " + "{0:.3g}".format(self.constants.gamma) + ". While the leader moves, the "
                + "follower reference keeps zero velocity, so every stage of the horizon keeps a residual error and "
                + "V_N approaches (N+1) times the current error. A hold reference with a horizon above N0 has no "
                + "such residual.")

    def lyapunov_passed(self):
        return self.contracting() and self.constants.certifiable() \
                and all(rep.passed() for rep in self.lyapunov.values())

    def passed(self):
        return self.lyapunov_passed() and self.gate.all_passed() and self.collision.passed()

    def to_dict(self):
        return {"cost_convention":          self.convention,
                "empirical":                True,
                "rho_hat":                  float(self.rho_hat),
                "contracting":              self.contracting(),
                "constants":                self.constants.to_dict(),
                "lyapunov":                 {agent: rep.to_dict() for agent, rep in self.lyapunov.items()},
                "lyapunov_violations":      self.lyapunov_violations(),
                "sandwich_violations":      self.sandwich_violations(),
                "sandwich":                 {"gamma":               float(self.constants.gamma),
                                             "max_ratio":           self.max_ratio(),
                                             "note":                self.sandwich_note()},
                "safety_gate":              {"passed":              self.gate.all_passed(),
                                             "failures":            self.gate.failures(),
                                             "abort_step":          self.gate.abort_step,
                                             "max_lambda":          float(self.gate.max_lambda()),
                                             "min_margin":          float(self.gate.min_margin()),
                                             "threshold":           float(self.gate_threshold),
                                             "landing_threshold":   float(self.landing_threshold)},
                "collision":                self.collision.to_dict(),
                "passed":                   self.passed()}

def _follower_series(records, agent):
    '''
    Values and errors of ``agent`` from step 0 while it tracks, up to and including the step it latched.
    '''
    steps, values, errors                           = [], [], []
    for rec in records:
        entry                                       = next((a for a in rec["agents"] if a["agent"] == agent), None)
        if entry is None or entry["mode"] == AgentRuntime.DEGRADED:
            break
        steps.append(rec["t"])
        values.append(entry["cost"])
        errors.append(entry["stage_cost"])
        if entry["mode"] == AgentRuntime.LATCHED:
            break
    return steps, values, errors

def certify_run(records, config, trajectory_df, tolerance=1e-6):
    '''
    :param list records: step records as dictionaries, in step order (the lines of ``step_records.jsonl``)
    :param ScenarioConfig config: scenario of the run
    :param pandas.DataFrame trajectory_df: trajectory table of the run
    :param float tolerance: relative tolerance of the decrease and sandwich checks
    :rtype: CertificationReport
    '''
    series                                          = {agent: _follower_series(records, agent)
                                                       for agent in config.follower_ids()}

    rho_hat                                         = max([estimate_contraction(errors)
                                                           for _, _, errors in series.values()], default=0.0)
    initial                                         = [errors[0] for _, _, errors in series.values() if len(errors) > 0]
    try:
        gamma_bar                                   = sandwich_gamma(config.V_N_max, initial)
    except ValueError:
        gamma_bar                                   = config.gamma_bar
    constants                                       = compute_constants(config.follower_Q, config.V_N_max,
                                                                        min(rho_hat, 1.0), config.horizon,
                                                                        gamma_bar=gamma_bar, empirical=True)

    lyapunov                                        = {}
    for agent, (steps, values, errors) in series.items():
        lyapunov[agent]                             = check_lyapunov_decrease(values, errors, constants.alpha_n,
                                                                              constants.gamma, tolerance=tolerance,
                                                                              steps=steps)

    params                                          = GateParams.from_config(config)
    gated                                           = [rec for rec in records if not rec["gate"] is None]
    gate                                            = check_safety_gate([rec["gate"]["lambda_max"] for rec in gated],
                                                                        params, steps=[rec["t"] for rec in gated])
    collision                                       = verify_collision_free(trajectory_df, config.collision,
                                                                            config.funnel, config.LEADER_ID)
    return CertificationReport(convention           = config.cost_convention,
                               constants            = constants,
                               rho_hat              = rho_hat,
                               lyapunov             = lyapunov,
                               gate                 = gate,
                               gate_threshold       = params.threshold(),
                               landing_threshold    = radius_threshold(config.platform_radius, config.safe_radius,
                                                                       config.confidence),
                               collision            = collision)
