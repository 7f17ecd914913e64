import asyncio
import numpy                                                       as _np
import pandas                                                      as _pd

from rendezvous.analysis.collision_verifier                         import verify_collision_free
from rendezvous.analysis.safety_gate                                import GateMonitor, GateParams
from rendezvous.application.application                             import Application
from rendezvous.async_utils.ushering_to                             import UsheringTo
from rendezvous.comm.comm_fabric                                    import CommFabric
from rendezvous.comm.shared_trajectory                              import SharedTrajectory
from rendezvous.coordinator.agent_runtime                           import AgentRuntime
from rendezvous.coordinator.reference_builder                       import LeaderReferenceGenerator, build_references, \
                                                                           collision_constraints, perturb_reference
from rendezvous.coordinator.step_record                             import AgentStepRecord, StepRecord
from rendezvous.dataset.artifact_schema                             import TRAJECTORY, STATE_COLUMNS, INPUT_COLUMNS, \
                                                                           TOP_VIEW, VIEW_3D
from rendezvous.models.linear_model                                 import ConstantVelocityModel
from rendezvous.models.state_mapping                                import follower_reference
from rendezvous.observability.logger                                import Logger
from rendezvous.prediction.confidence                               import lambda_max
from rendezvous.prediction.ekf_predictor                            import EkfPredictor, default_process_noise
from rendezvous.prediction.worst_case_radius                        import worst_case_radius
from rendezvous.safety.collision_constraint                         import eval_h_ij
from rendezvous.safety.funnel_constraint                            import eval_h_C
from rendezvous.solver.ocp_spec                                     import OcpSpec
from rendezvous.solver.value_function                               import CostConvention
from rendezvous.util.errors                                         import ConfigurationError
from rendezvous.util.profiler                                       import Profiler

class RunResult():

    '''
    Outcome of a scenario run.

    :param ScenarioConfig config: the scenario
    :param list records: :class:`StepRecord` objects, one per executed step
    :param pandas.DataFrame trajectory_df: true states and applied inputs, laid out by the trajectory schema
    :param pandas.DataFrame audit_df: loss audit of the communication fabric
    :param dict latch_steps: follower id -> step at which it latched, or None
    :param GateReport gate_report: online safety gate over the run
    :param CollisionReport collision_report: realized separation and funnel clearance
    :param int exit_code: one of the ``EXIT_*`` codes
    :param float worst_case: worst-case one-step displacement of a follower, or None if never needed
    '''
    def __init__(self, config, records, trajectory_df, audit_df, latch_steps, gate_report, collision_report,
                 exit_code, worst_case=None):
        self.config                                 = config
        self.records                                = records
        self.trajectory_df                          = trajectory_df
        self.audit_df                               = audit_df
        self.latch_steps                            = latch_steps
        self.gate_report                            = gate_report
        self.collision_report                       = collision_report
        self.exit_code                              = exit_code
        self.worst_case                             = worst_case

    EXIT_SUCCESS                                    = 0     # all followers latched, certificates pass
    EXIT_ERROR                                      = 1
    EXIT_STEP_CAP                                   = 2
    EXIT_SAFETY_ABORT                               = 3
    EXIT_CERTIFICATE                                = 4     # all followers latched, a certificate failed

    def all_latched(self):
        return all(not step is None for step in self.latch_steps.values())

    def steps_run(self):
        return len(self.records)

    def predicted_entries(self):
        '''
        :return: reference entries of reconstructed leader trajectories that came from a predictor, over the run
        '''
        return sum(rec.predicted_entries() for rec in self.records)

    def summary(self):
        return {"scenario":             self.config.name,
                "exit_code":            int(self.exit_code),
                "steps":                self.steps_run(),
                "all_latched":          self.all_latched(),
                "latch_steps":          dict(self.latch_steps),
                "collision_free":       self.collision_report.passed(),
                "min_pairwise":         self.collision_report.min_pairwise,
                "min_funnel":           self.collision_report.min_funnel,
                "gate_passed":          self.gate_report.all_passed(),
                "gate_abort_step":      self.gate_report.abort_step,
                "max_lambda":           float(self.gate_report.max_lambda()),
                "lambda_threshold":     float(GateParams.from_config(self.config).threshold()),
                "predicted_entries":    int(self.predicted_entries()),
                "worst_case_radius":    None if self.worst_case is None else float(self.worst_case)}

    def plot_tables(self):
        '''
        :return: pair ``(top_view_df, view_3d_df)`` for external plotting; top-view positions are also given
            relative to the platform center
        '''
        df                                          = self.trajectory_df
        leader                                      = df[df["agent"] == self.config.LEADER_ID].set_index("t")
        followers                                   = df[df["agent"] != self.config.LEADER_ID]

        center_x                                    = followers["t"].map(leader["p_x"])
        center_y                                    = followers["t"].map(leader["p_y"])
        top_df                                      = followers[["t", "agent", "p_x", "p_y"]].copy()
        top_df["rel_x"]                             = followers["p_x"] - center_x
        top_df["rel_y"]                             = followers["p_y"] - center_y

        view_df                                     = df[["t", "agent", "p_x", "p_y", "p_z"]].copy()
        h_C                                         = _np.full(len(df), _np.nan)
        for idx, (_, row) in enumerate(df.iterrows()):
            if row["agent"] != self.config.LEADER_ID and row["t"] in leader.index:
                center                              = leader.loc[row["t"], ["p_x", "p_y", "p_z"]].to_numpy(dtype=float)
                h_C[idx]                            = eval_h_C(row[["p_x", "p_y", "p_z"]].to_numpy(dtype=float),
                                                               center, self.config.funnel)
        view_df["h_C"]                              = h_C
        return TOP_VIEW.conform(top_df.reset_index(drop=True)), VIEW_3D.conform(view_df.reset_index(drop=True))

class _Plan():

    '''
    Inputs of one agent's solve at one step, gathered before the solves run.
    '''
    def __init__(self, agent, collection, references, spec, inflation, perturbation):
        self.agent                                  = agent
        self.collection                             = collection
        self.references                             = references
        self.spec                                   = spec
        self.inflation                              = inflation
        self.perturbation                           = perturbation

class RendezvousCoordinator():

    '''
    Runs the multiple-follower rendezvous loop. Each step:

    1. every agent measures every peer's position and corrects its predictor of that peer
    2. every agent collects its peers' newest trajectories, rebuilds their horizons and its own reference, and
       solves its optimal control problem; at step 0 in roster order, each agent seeing the trajectories the
       earlier ones broadcast at step 0, afterwards concurrently
    3. followers farther than ``epsilon`` from their landing point broadcast their plan, the others latch and keep
       station without broadcasting; the leader always broadcasts
    4. first inputs are applied to the true dynamics, with disturbances; predictors advance one step; the fabric
       commits the step's messages

    The run ends when every follower has latched, at the step cap, or when the safety gate has failed for the
    configured dwell.

    :param ScenarioConfig config: the scenario
    :param int worker_threads: cap on concurrent solves; taken from the application configuration by default
    :raises ConfigurationError: if the landing geometry violates the landing assumption
    '''
    def __init__(self, config, worker_threads=None):
        geometry                                    = config.geometry_report()
        if not geometry.ok():
            raise ConfigurationError(geometry.describe(), field_path="landing")

        if worker_threads is None:
            worker_threads                          = Application.app().config.worker_threads() \
                                                        if Application.is_initialized() else 1

        self.config                                 = config
        self.N                                      = config.horizon
        self.worker_threads                         = int(worker_threads)
        self.leader_model                           = config.leader_model()
        self.follower_model                         = config.follower_model()
        self.peer_model                             = ConstantVelocityModel(config.dt, max_speed=self._follower_speed())
        self.disturbance                            = config.disturbance_source()
        self.leader_generator                       = LeaderReferenceGenerator.from_config(config)
        self.fabric                                 = CommFabric(config.agent_ids(), config.schedule)
        self.gate                                   = GateMonitor(GateParams.from_config(config))
        self.include_terminal                       = config.cost_convention == CostConvention.FULL

        self.agents                                 = self._build_agents()
        self.records                                = []
        self.trajectory_rows                        = []
        self._worst_case                            = None

    def _follower_speed(self):
        speeds                                      = _np.abs(_np.concatenate([self.follower_model.params.state_box.lower[3:6],
                                                                               self.follower_model.params.state_box.upper[3:6]]))
        finite                                      = speeds[_np.isfinite(speeds)]
        return float(_np.max(finite)) if len(finite) > 0 else 5.0

    def _build_agents(self):
        cfg                                         = self.config
        leader_noise                                = default_process_noise(self.leader_model, cfg.noise_position,
                                                                            cfg.noise_velocity, cfg.noise_heading)
        peer_noise                                  = default_process_noise(self.peer_model, cfg.noise_position,
                                                                            cfg.noise_velocity, cfg.noise_heading)

        leader                                      = AgentRuntime(agent_id     = cfg.LEADER_ID,
                                                                   index        = 0,
                                                                   role         = AgentRuntime.LEADER,
                                                                   model        = self.leader_model,
                                                                   state        = self.leader_model.project_state(
                                                                                        cfg.leader_initial_state.copy()),
                                                                   Q            = cfg.leader_Q,
                                                                   R            = cfg.leader_R)
        agents                                      = [leader]

        follower_ids                                = cfg.follower_ids()
        for idx, (agent_id, state, offset) in enumerate(zip(follower_ids, cfg.follower_initial_states(),
                                                            cfg.landing_offsets())):
            follower                                = AgentRuntime(agent_id     = agent_id,
                                                                   index        = idx + 1,
                                                                   role         = AgentRuntime.FOLLOWER,
                                                                   model        = self.follower_model,
                                                                   state        = state,
                                                                   Q            = cfg.follower_Q,
                                                                   R            = cfg.follower_R,
                                                                   offset       = offset,
                                                                   tolerance    = cfg.tolerance)
            follower.add_predictor(cfg.LEADER_ID, EkfPredictor(self.leader_model, leader_noise, cfg.measurement_sigma))
            for peer in follower_ids:
                if peer != agent_id:
                    follower.add_predictor(peer, EkfPredictor(self.peer_model, peer_noise, cfg.measurement_sigma))
            agents.append(follower)
        return agents

    def agent(self, agent_id):
        for agent in self.agents:
            if agent.agent_id == agent_id:
                return agent
        raise ValueError("Unknown agent '" + str(agent_id) + "'")

    def followers(self):
        return [agent for agent in self.agents if not agent.is_leader()]

    def worst_case(self):
        '''
        Worst-case one-step displacement of a follower, computed on first use and kept for the run.
        '''
        if self._worst_case is None:
            with Profiler("Worst-case radius of the " + self.follower_model.name() + " model", Logger.LEVEL_DETAILED):
                self._worst_case                    = worst_case_radius(self.follower_model).radius
        return self._worst_case

    def run_step(self, t):
        '''
        Executes step ``t`` and appends its record.

        :rtype: StepRecord
        '''
        self._measure(t)

        plans                                       = []
        solutions                                   = []
        outcomes                                    = []
        if t == 0:
            for agent in self.agents:
                plan                                = self._plan(agent, t, include_current=True)
                solution                            = self._solve(plan, t)
                plans.append(plan)
                solutions.append(solution)
                outcomes.append(self._conclude(plan, solution, t))
        else:
            plans                                   = [self._plan(agent, t) for agent in self.agents]
            solutions                               = asyncio.run(self._solve_concurrently(plans, t))
            outcomes                                = [self._conclude(plan, solution, t)
                                                       for plan, solution in zip(plans, solutions)]

        min_funnel, min_pairwise                    = self._realized_clearance()
        leader_position                             = self.agents[0].position()

        agent_records                               = []
        for plan, solution, (mode, applied, broadcast, gate_distance) in zip(plans, solutions, outcomes):
            agent_records.append(self._agent_record(plan, solution, mode, applied, broadcast, gate_distance,
                                                    leader_position, t))
            self._trajectory_row(plan.agent, mode, applied, t)

        for plan, (mode, applied, _, _) in zip(plans, outcomes):
            self._apply(plan.agent, applied, t)

        lambdas                                     = {}
        for agent in self.agents:
            agent.advance_estimates()
            if not agent.is_leader():
                prior                               = agent.priors[self.config.LEADER_ID]
                lambdas[agent.agent_id]             = float(lambda_max(prior.P[:3, :3]))
        for rec in agent_records:
            rec.leader_lambda_max                   = lambdas.get(rec.agent)

        gate                                        = None
        if len(lambdas) > 0:
            gate                                    = self.gate.update(max(lambdas.values()), t)

        self.fabric.commit(t)
        record                                      = StepRecord(t, agent_records, min_funnel, min_pairwise, gate)
        self.records.append(record)
        return record

    def run(self):
        '''
        Runs the scenario to completion.

        :rtype: RunResult
        '''
        cfg                                         = self.config
        self._log("Running scenario '" + cfg.name + "' with " + str(cfg.follower_count) + " followers, horizon "
                  + str(self.N) + ", at most " + str(cfg.max_steps) + " steps", Logger.LEVEL_INFO)

        with Profiler("Scenario '" + cfg.name + "'"):
            for t in range(cfg.max_steps):
                with Profiler("Step " + str(t), Logger.LEVEL_DETAILED):
                    self.run_step(t)
                if not self.gate.abort_step is None:
                    self._log("Safety gate failed for " + str(cfg.abort_dwell) + " consecutive steps; aborting at step "
                              + str(t), Logger.LEVEL_INFO)
                    break
                if all(agent.latched for agent in self.followers()):
                    self._log("All followers latched at step " + str(t), Logger.LEVEL_INFO)
                    break

        return self.result()

    def result(self):
        '''
        Run outcome for the steps executed so far; usable after a failed run to keep partial artifacts.

        :rtype: RunResult
        '''
        final_t                                     = len(self.records)
        rows                                        = list(self.trajectory_rows)
        for agent in self.agents:
            rows.append(self._row(agent, agent.mode, None, final_t))
        trajectory_df                               = TRAJECTORY.conform(_pd.DataFrame(rows, columns=TRAJECTORY.columns()))

        collision_report                            = verify_collision_free(trajectory_df, self.config.collision,
                                                                            self.config.funnel, self.config.LEADER_ID)
        gate_report                                 = self.gate.report()
        latch_steps                                 = {agent.agent_id: agent.latch_step for agent in self.followers()}

        if gate_report.abort_recommended():
            exit_code                               = RunResult.EXIT_SAFETY_ABORT
        elif not all(agent.latched for agent in self.followers()):
            exit_code                               = RunResult.EXIT_STEP_CAP
        elif collision_report.passed() and gate_report.all_passed():
            exit_code                               = RunResult.EXIT_SUCCESS
        else:
            exit_code                               = RunResult.EXIT_CERTIFICATE

        return RunResult(config             = self.config,
                         records            = list(self.records),
                         trajectory_df      = trajectory_df,
                         audit_df           = self.fabric.audit(),
                         latch_steps        = latch_steps,
                         gate_report        = gate_report,
                         collision_report   = collision_report,
                         exit_code          = exit_code,
                         worst_case         = self._worst_case)

    def _measure(self, t):
        '''
        Position measurements of every observed peer, with noise keyed by ``(seed, t, observer, observed)``.
        '''
        sigma                                       = self.config.measurement_sigma
        for agent in self.agents:
            for peer in sorted(agent.predictors.keys()):
                target                              = self.agent(peer)
                measurement                         = target.position()
                if sigma > 0:
                    rng                             = _np.random.default_rng([self.config.noise_seed(), t, agent.index,
                                                                              target.index])
                    measurement                     = measurement + rng.normal(0.0, sigma, 3)
                agent.observe(peer, measurement, t)

    def _plan(self, agent, t, include_current=False):
        cfg                                         = self.config
        collection                                  = self.fabric.collect(agent.agent_id, t, include_current=include_current)
        references                                  = build_references(agent, collection, t, self.N,
                                                                       self.leader_generator, cfg.LEADER_ID)
        if agent.is_leader():
            spec                                    = OcpSpec(model             = agent.model,
                                                              N                 = self.N,
                                                              Q                 = agent.Q,
                                                              reference         = references.reference,
                                                              R                 = agent.R,
                                                              options           = cfg.solver,
                                                              include_terminal  = self.include_terminal)
            return _Plan(agent, collection, references, spec, {}, None)

        reference                                   = references.reference
        perturbation                                = None
        if agent.pending_perturbation:
            rng                                     = _np.random.default_rng([cfg.noise_seed(), t, agent.index, 1])
            reference, perturbation                 = perturb_reference(reference, agent.position(), rng,
                                                                        cfg.perturbation)
            agent.pending_perturbation              = False
            self._log("Follower " + agent.agent_id + " stalled; reference shifted sideways by "
                      + "{0:.3f} m at step {1}".format(perturbation, t), Logger.LEVEL_DETAILED)

        constraints, inflation                      = [], {}
        if len(references.peers) > 0:
            constraints, inflation                  = collision_constraints(agent, references, cfg.collision_policy,
                                                                            cfg.confidence, self.worst_case(),
                                                                            cfg.inflation_cap,
                                                                            enabled=cfg.collision.enabled)
        spec                                        = OcpSpec(model             = agent.model,
                                                          N                 = self.N,
                                                          Q                 = agent.Q,
                                                          reference         = reference,
                                                          R                 = agent.R,
                                                          funnel            = cfg.funnel,
                                                          funnel_centers    = references.platform_positions(),
                                                          funnel_margin     = cfg.funnel_margin,
                                                          collision         = cfg.collision if len(constraints) > 0
                                                                                else None,
                                                          peers             = constraints,
                                                          options           = cfg.solver,
                                                          include_terminal  = self.include_terminal)
        return _Plan(agent, collection, references, spec, inflation, perturbation)

    def _solve(self, plan, t):
        agent                                       = plan.agent
        shift                                       = 1 if agent.last_solve_step is None else t - agent.last_solve_step
        return agent.solver.solve(agent.state, plan.spec, warm=agent.last_solution, shift=shift)

    async def _solve_concurrently(self, plans, t):
        async def _job(position, plan):
            solution                                = await asyncio.to_thread(self._solve, plan, t)
            return position, solution

        results                                     = []
        async with UsheringTo(results, sort_key=lambda r: r[0], limit=self.worker_threads) as usher:
            for position, plan in enumerate(plans):
                usher                               += _job(position, plan)
        return [solution for _, solution in results]

    def _conclude(self, plan, solution, t):
        '''
        Tolerance gate, latch and broadcast of one agent after its solve, in roster order.

        :return: ``(mode, applied input, broadcast, gate distance)``
        '''
        agent                                       = plan.agent
        cfg                                         = self.config

        degraded                                    = solution.hard_failure()
        if degraded:
            applied                                 = agent.fallback_input(t)
            self._log(agent.agent_id + " solver failed at step " + str(t) + " (" + solution.status
                      + "); replaying its previous plan", Logger.LEVEL_DETAILED)
        else:
            applied                                 = solution.inputs[0].copy()
            agent.last_solution                     = solution
            agent.last_solve_step                   = t

        gate_distance                               = None
        if agent.is_leader():
            broadcast                               = not degraded
        else:
            gate_distance                           = float(_np.linalg.norm(
                                                        agent.position() - plan.references.landing_point(agent.offset)))
            if not agent.latched and gate_distance <= agent.tolerance:
                agent.latch(t)
                self._log("Follower " + agent.agent_id + " latched at step " + str(t) + ", "
                          + "{0:.3f} m from its landing point".format(gate_distance), Logger.LEVEL_INFO)
            broadcast                               = not agent.latched and not degraded
            if not agent.latched and not degraded:
                if agent.record_cost(solution.cost, cfg.stall_threshold, cfg.stall_steps):
                    agent.pending_perturbation      = True

        if degraded:
            mode                                    = AgentRuntime.DEGRADED
        elif agent.latched:
            mode                                    = AgentRuntime.LATCHED
        else:
            mode                                    = AgentRuntime.TRACKING
        agent.mode                                  = mode

        if broadcast:
            shared                                  = SharedTrajectory.from_solution(agent.agent_id, t, solution,
                                                                                     agent.model.name())
            self.fabric.broadcast(agent.agent_id, shared, t)
        return mode, applied, broadcast, gate_distance

    def _apply(self, agent, applied, t):
        nominal                                     = agent.model.step(agent.state, applied)
        w                                           = self.disturbance.sample(agent.index, agent.is_leader(), agent.model,
                                                                              t, nominal)
        agent.state                                 = agent.model.project_state(nominal + w)

    def _realized_clearance(self):
        '''
        :return: ``(h_C per follower, smallest pairwise h_ij)`` on the true states
        '''
        platform                                    = self.agents[0].position()
        followers                                   = self.followers()
        min_funnel                                  = {f.agent_id: float(eval_h_C(f.state, platform, self.config.funnel))
                                                       for f in followers}
        pairwise                                    = [float(eval_h_ij(a.state, b.position(), self.config.collision))
                                                       for i, a in enumerate(followers) for b in followers[i + 1:]]
        return min_funnel, (min(pairwise) if len(pairwise) > 0 else None)

    def _agent_record(self, plan, solution, mode, applied, broadcast, gate_distance, leader_position, t):
        agent                                       = plan.agent
        spec                                        = plan.spec
        e0                                          = solution.states[0] - spec.reference[0]
        stage_cost                                  = float(e0 @ spec.Q @ e0)

        if agent.is_leader():
            error_sq                                = stage_cost
            staleness                               = {}
            predicted                               = 0
        else:
            target                                  = follower_reference(leader_position, agent.offset,
                                                                         n_follower=agent.model.n_x())
            e                                       = agent.state - target
            error_sq                                = float(e @ spec.Q @ e)
            staleness                               = {peer: plan.collection.staleness(peer)
                                                       for peer in sorted(agent.predictors.keys())}
            predicted                               = plan.references.leader.predicted_count()

        return AgentStepRecord(agent                = agent.agent_id,
                               role                 = agent.role,
                               mode                 = mode,
                               latched              = agent.latched,
                               state                = agent.state.copy(),
                               applied_input        = applied,
                               cost                 = solution.cost,
                               stage_cost           = stage_cost,
                               error_sq             = error_sq,
                               solver               = solution.diagnostics(),
                               staleness            = staleness,
                               predicted_entries    = predicted,
                               inflation            = plan.inflation,
                               broadcast            = broadcast,
                               gate_distance        = gate_distance,
                               perturbation         = plan.perturbation)

    def _trajectory_row(self, agent, mode, applied, t):
        self.trajectory_rows.append(self._row(agent, mode, applied, t))

    def _row(self, agent, mode, applied, t):
        states                                      = _np.full(len(STATE_COLUMNS), _np.nan)
        states[:agent.model.n_x()]                  = agent.state
        inputs                                      = _np.full(len(INPUT_COLUMNS), _np.nan)
        if not applied is None:
            inputs[:agent.model.n_u()]              = applied
        return [t, agent.agent_id, agent.role, mode] + list(states) + list(inputs)

    def _log(self, message, level):
        if Application.is_initialized():
            Application.app().log(message, level, stack_level_increase=1)

def run_scenario(config, worker_threads=None):
    '''
    :param ScenarioConfig config: validated scenario
    :rtype: RunResult
    '''
    return RendezvousCoordinator(config, worker_threads=worker_threads).run()
