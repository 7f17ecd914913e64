import types
import numpy                                                       as _np
import osqp
import pytest

import rendezvous.solver.sqp_solver                                 as sqp_module

from rendezvous.models.follower_model                               import FollowerModel
from rendezvous.models.linear_model                                 import LinearModel
from rendezvous.models.model_params                                 import Box, ModelParams
from rendezvous.safety.collision_constraint                         import CollisionParams
from rendezvous.safety.funnel_constraint                            import FunnelParams, eval_h_C, funnel_floor
from rendezvous.solver.ocp_solution                                 import OcpSolution, SolverStatus
from rendezvous.solver.ocp_spec                                     import OcpSpec, SolverOptions, PeerConstraint
from rendezvous.solver.sqp_solver                                   import DocpSolver, solve_docp
from rendezvous.solver.value_function                               import CostConvention, RoaMembership, \
                                                                           value_function, value_lower_bound, \
                                                                           roa_membership
from rendezvous.util.errors                                         import ConfigurationError

FOLLOWER_Q                                                          = _np.diag([10.0, 10.0, 5.0] + [1.0] * 6)

def _follower():
    return FollowerModel(ModelParams.follower_defaults())

def _hover_reference(model, position, N):
    return _np.tile(model.equilibrium(position), (N + 1, 1))

def test_one_step_linear_problem_matches_least_squares():
    rng                                     = _np.random.default_rng(17)
    A                                       = _np.eye(4) + 0.1 * rng.standard_normal((4, 4))
    B                                       = rng.standard_normal((4, 2))
    model                                   = LinearModel(A, B)
    Q                                       = _np.eye(4)
    R                                       = 0.1 * _np.eye(2)
    x0                                      = rng.standard_normal(4)
    reference                               = _np.vstack([_np.zeros(4), rng.standard_normal(4)])

    spec                                    = OcpSpec(model, 1, Q, reference, R=R)
    solution                                = solve_docp(x0, spec)

    expected                                = _np.linalg.solve(B.T @ Q @ B + R, B.T @ Q @ (reference[1] - A @ x0))
    assert not solution.failed()
    _np.testing.assert_allclose(solution.inputs[0], expected, atol=1e-6)
    _np.testing.assert_allclose(solution.states[1], A @ x0 + B @ solution.inputs[0], atol=1e-12)

def test_hover_at_the_reference_needs_no_iterations():
    model                                   = _follower()
    N                                       = 5
    x_now                                   = model.equilibrium([1.0, 2.0, 3.0])
    spec                                    = OcpSpec(model, N, FOLLOWER_Q, _hover_reference(model, [1.0, 2.0, 3.0], N))
    solution                                = DocpSolver().solve(x_now, spec)
    assert solution.status == SolverStatus.OPTIMAL
    assert solution.iterations == 0
    assert solution.cost == pytest.approx(0.0)
    _np.testing.assert_array_equal(solution.inputs, 0.0)

def test_funnel_keeps_the_follower_above_the_floor():
    model                                   = _follower()
    N                                       = 5
    funnel                                  = FunnelParams(safety_height=2.0, radius=2.5, slope=1.0)
    x_now                                   = model.equilibrium([5.0, 0.0, 3.0])
    reference                               = _hover_reference(model, [5.0, 0.0, 0.0], N)
    centers                                 = _np.zeros((N + 1, 3))
    spec                                    = OcpSpec(model, N, FOLLOWER_Q, reference, funnel=funnel,
                                                      funnel_centers=centers, funnel_margin=0.02)
    solution                                = solve_docp(x_now, spec)

    assert not solution.hard_failure()
    assert solution.min_funnel >= 0.02 - 5e-3
    h_C                                     = eval_h_C(solution.states[1:], centers[1:], funnel)
    assert _np.all(h_C >= 0.02 - 5e-3)
    assert solution.states[-1, 2] < 3.0

def test_solutions_are_exact_rollouts_of_their_inputs():
    model                                   = _follower()
    rng                                     = _np.random.default_rng(8)
    N                                       = 5
    for _ in range(10):
        start                               = rng.uniform([-3.0, -3.0, 2.0], [3.0, 3.0, 6.0])
        target                              = rng.uniform([-3.0, -3.0, 2.0], [3.0, 3.0, 6.0])
        spec                                = OcpSpec(model, N, FOLLOWER_Q, _hover_reference(model, target, N))
        solution                            = solve_docp(model.equilibrium(start), spec)

        assert not solution.hard_failure()
        assert solution.dynamics_defect <= 1e-8
        _np.testing.assert_allclose(solution.states, model.rollout(solution.states[0], solution.inputs), atol=1e-9)
        assert model.params.input_box.violation(solution.inputs) <= 1e-9
        if solution.status == SolverStatus.OPTIMAL:
            assert solution.kkt_residual <= spec.options.tolerance

def test_warm_start_is_accepted():
    model                                   = _follower()
    N                                       = 5
    spec                                    = OcpSpec(model, N, FOLLOWER_Q, _hover_reference(model, [1.0, 0.0, 4.0], N))
    solver                                  = DocpSolver()
    first                                   = solver.solve(model.equilibrium([0.0, 0.0, 4.0]), spec)
    second                                  = solver.solve(first.states[1], spec, warm=first, shift=1)
    assert not second.hard_failure()
    _np.testing.assert_array_equal(second.states[0], first.states[1])

def test_solver_rejects_bad_initial_states():
    model                                   = _follower()
    spec                                    = OcpSpec(model, 3, FOLLOWER_Q, _hover_reference(model, [0.0, 0.0, 1.0], 3))
    with pytest.raises(ValueError):
        solve_docp(_np.zeros(6), spec)
    with pytest.raises(ValueError):
        solve_docp(_np.full(9, _np.nan), spec)

def test_problem_validation():
    model                                   = _follower()
    reference                               = _hover_reference(model, [0.0, 0.0, 1.0], 3)
    with pytest.raises(ValueError):
        OcpSpec(model, 0, FOLLOWER_Q, reference)
    with pytest.raises(ValueError):
        OcpSpec(model, 3, -FOLLOWER_Q, reference)
    with pytest.raises(ValueError):
        OcpSpec(model, 3, FOLLOWER_Q, reference[:3])
    with pytest.raises(ValueError):
        OcpSpec(model, 3, FOLLOWER_Q, reference, funnel=FunnelParams(2.0, 2.5, 1.0))
    with pytest.raises(ValueError):
        OcpSpec(model, 3, FOLLOWER_Q, reference, peers=[PeerConstraint("f2", _np.zeros((2, 3)))])

def test_solver_options_validation():
    with pytest.raises(ConfigurationError):
        SolverOptions(max_iterations=0)
    with pytest.raises(ConfigurationError):
        SolverOptions(tolerance=0.0)
    with pytest.raises(ConfigurationError):
        SolverOptions(slack_linear=-1.0)

def test_peer_constraint_never_constrains_the_current_step():
    peer                                    = PeerConstraint("f2", _np.zeros((4, 3)), inflation=0.3,
                                                             active=[True, True, False, True])
    assert not peer.active[0]
    _np.testing.assert_array_equal(peer.inflation, 0.3)

def test_truncated_cost_drops_the_terminal_term():
    model                                   = _follower()
    reference                               = _hover_reference(model, [0.0, 0.0, 1.0], 2)
    states                                  = _hover_reference(model, [1.0, 0.0, 1.0], 2)
    spec                                    = OcpSpec(model, 2, FOLLOWER_Q, reference)
    assert spec.tracking_cost(states) == pytest.approx(30.0)
    assert spec.with_terminal(False).tracking_cost(states) == pytest.approx(20.0)

def test_shifted_inputs_pad_with_hover():
    solution                                = OcpSolution(_np.zeros((4, 9)), _np.arange(12.0).reshape(3, 4), 0.0,
                                                          SolverStatus.OPTIMAL, 1, 0.0, 0.0, 0.0, 0.0, 0.0)
    shifted                                 = solution.shifted_inputs(2)
    _np.testing.assert_array_equal(shifted[0], [8.0, 9.0, 10.0, 11.0])
    _np.testing.assert_array_equal(shifted[1:], 0.0)
    _np.testing.assert_array_equal(solution.shifted_inputs(5), 0.0)

def test_lower_bound_decides_far_states_without_solving():
    model                                   = _follower()
    x_f                                     = model.equilibrium([5.0, 0.0, 10.0])
    z_l                                     = _np.zeros(6)
    assert value_lower_bound(x_f, z_l, FOLLOWER_Q) == pytest.approx(750.0)

    spec                                    = OcpSpec(model, 3, FOLLOWER_Q, _hover_reference(model, [0.0, 0.0, 0.0], 3))
    assert roa_membership(x_f, z_l, spec, 240.0) == RoaMembership.OUTSIDE
    with pytest.raises(ValueError):
        roa_membership(x_f, z_l, spec, 0.0)

def test_value_function_at_the_target_is_zero():
    model                                   = _follower()
    x_f                                     = model.equilibrium([0.0, 0.0, 2.0])
    spec                                    = OcpSpec(model, 3, FOLLOWER_Q, _hover_reference(model, [0.0, 0.0, 2.0], 3))
    value, solution                         = value_function(x_f, x_f, spec, CostConvention.TRUNCATED)
    assert value == pytest.approx(0.0)
    assert roa_membership(x_f, x_f, spec, 240.0) == RoaMembership.INSIDE
    with pytest.raises(ValueError):
        value_function(x_f, x_f, spec, "partial")

def _double_integrator(dt=0.5):
    I3                                      = _np.eye(3)
    A                                       = _np.block([[I3, dt * I3], [_np.zeros((3, 3)), I3]])
    B                                       = _np.vstack([0.5 * dt * dt * I3, dt * I3])
    return LinearModel(A, B, name="double-integrator")

def _binding_instance(rng, kind, N=5):
    '''
    Random problem whose hover target violates one softened constraint by a few decimeters, so that the
    constraint is binding at the optimum.
    '''
    model                                   = _double_integrator()
    angle                                   = rng.uniform(0.0, 2.0 * _np.pi)
    heading                                 = _np.array([_np.cos(angle), _np.sin(angle), 0.0])
    if kind == "funnel":
        funnel                              = FunnelParams(safety_height=2.0, radius=2.5, slope=1.0)
        distance                            = rng.uniform(3.0, 4.0)
        floor                               = float(funnel_floor(distance, funnel))
        target                              = distance * heading + [0.0, 0.0, floor - rng.uniform(0.2, 0.4)]
        start                               = target + rng.uniform(-0.5, 0.5, 3) + [0.0, 0.0, 1.5]
        spec                                = OcpSpec(model, N, _np.eye(6), _hover_reference(model, target, N),
                                                      R=0.1 * _np.eye(3), funnel=funnel,
                                                      funnel_centers=_np.zeros((N + 1, 3)))
    else:
        center                              = rng.uniform(-1.0, 1.0, 3)
        target                              = center + rng.uniform(0.6, 0.8) * heading
        start                               = center + 2.5 * heading + rng.uniform(-0.3, 0.3, 3)
        peer                                = PeerConstraint("peer", _np.tile(center, (N + 1, 1)))
        spec                                = OcpSpec(model, N, _np.eye(6), _hover_reference(model, target, N),
                                                      R=0.1 * _np.eye(3), collision=CollisionParams(1.0),
                                                      peers=[peer])
    return model.equilibrium(start), spec

def test_binding_constraints_meet_the_solution_tolerances():
    rng                                     = _np.random.default_rng(2024)
    solver                                  = DocpSolver()
    optimal                                 = 0
    for idx in range(50):
        kind                                = "funnel" if idx % 2 == 0 else "collision"
        x_now, spec                         = _binding_instance(rng, kind)
        solution                            = solver.solve(x_now, spec)

        assert not solution.hard_failure(), kind + " instance " + str(idx) + ": " + solution.message
        assert solution.dynamics_defect <= 1e-8
        assert solution.max_constraint_violation <= 1e-6
        assert not solution.slack_active()
        if kind == "funnel":
            assert solution.min_funnel <= spec.funnel_margin + 1e-3
        else:
            assert solution.min_collision <= 1e-3
        assert solution.kkt_residual == pytest.approx(solver.stationarity(x_now, spec, solution.inputs), abs=1e-12)
        if solution.status == SolverStatus.OPTIMAL:
            optimal                         += 1
            assert solution.kkt_residual <= 1e-6
    assert optimal >= 25

def test_stationarity_accounts_for_saturated_inputs():
    params                                  = ModelParams(dt          = 1.0,
                                                          state_box   = Box([-_np.inf], [_np.inf]),
                                                          input_box   = Box([-1.0], [1.0]))
    model                                   = LinearModel([[1.0]], [[1.0]], params=params)
    spec                                    = OcpSpec(model, 1, _np.eye(1), _np.array([[0.0], [5.0]]))
    solver                                  = DocpSolver()

    assert solver.stationarity([0.0], spec, [[1.0]]) == pytest.approx(0.0, abs=1e-12)
    assert solver.stationarity([0.0], spec, [[0.5]]) == pytest.approx(9.0)

    solution                                = solver.solve(_np.zeros(1), spec)
    assert solution.status == SolverStatus.OPTIMAL
    _np.testing.assert_allclose(solution.inputs, [[1.0]], atol=1e-9)

def test_stationarity_vanishes_at_the_least_squares_optimum():
    rng                                     = _np.random.default_rng(5)
    A                                       = _np.eye(3) + 0.1 * rng.standard_normal((3, 3))
    B                                       = rng.standard_normal((3, 2))
    x0                                      = rng.standard_normal(3)
    reference                               = _np.vstack([_np.zeros(3), rng.standard_normal(3)])
    spec                                    = OcpSpec(LinearModel(A, B), 1, _np.eye(3), reference, R=0.1 * _np.eye(2))

    optimum                                 = _np.linalg.solve(B.T @ B + 0.1 * _np.eye(2), B.T @ (reference[1] - A @ x0))
    assert DocpSolver().stationarity(x0, spec, optimum[None, :]) <= 1e-9
    assert DocpSolver().stationarity(x0, spec, _np.zeros((1, 2))) > 1e-3

def test_kept_warm_start_reports_its_own_residual():
    model                                   = _double_integrator()
    N                                       = 4
    target                                  = [1.0, 0.0, 0.0]
    spec                                    = OcpSpec(model, N, _np.eye(6), _hover_reference(model, target, N),
                                                      R=0.1 * _np.eye(3), options=SolverOptions(max_iterations=1))
    solver                                  = DocpSolver()
    x_now                                   = model.equilibrium([0.0, 0.0, 0.0])
    solution                                = solver.solve(x_now, spec, warm=solver.solve(x_now, spec), shift=0)

    assert not solution.hard_failure()
    assert solution.kkt_residual == pytest.approx(solver.stationarity(x_now, spec, solution.inputs), abs=1e-12)
    if solution.status == SolverStatus.OPTIMAL:
        assert solution.kkt_residual <= spec.options.tolerance

class _RecordingOSQP():

    '''
    Delegates to OSQP and remembers the keyword arguments of every setup and solve call.
    '''
    calls                                   = []

    def __init__(self):
        self.inner                          = osqp.OSQP()

    def setup(self, **kwargs):
        _RecordingOSQP.calls.append(("setup", kwargs))
        self.inner.setup(**kwargs)

    def solve(self, **kwargs):
        _RecordingOSQP.calls.append(("solve", kwargs))
        return self.inner.solve(**kwargs)

def test_qp_subproblems_polish_and_never_raise(monkeypatch):
    _RecordingOSQP.calls                    = []
    monkeypatch.setattr(sqp_module, "osqp", types.SimpleNamespace(OSQP=_RecordingOSQP))
    model                                   = _follower()
    N                                       = 4
    spec                                    = OcpSpec(model, N, FOLLOWER_Q, _hover_reference(model, [0.5, 0.0, 4.0], N))
    solve_docp(model.equilibrium([0.0, 0.0, 4.0]), spec)

    setups                                  = [kwargs for name, kwargs in _RecordingOSQP.calls if name == "setup"]
    solves                                  = [kwargs for name, kwargs in _RecordingOSQP.calls if name == "solve"]
    assert len(setups) > 0 and len(setups) == len(solves)
    assert all(kwargs["polishing"] is True for kwargs in setups)
    assert all(kwargs == {"raise_error": False} for kwargs in solves)
