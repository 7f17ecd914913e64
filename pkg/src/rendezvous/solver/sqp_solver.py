import numpy                                                       as _np
import scipy.optimize                                               as _opt
import scipy.sparse                                                 as _sp
import osqp

from rendezvous.application.application                             import Application
from rendezvous.observability.logger                                import Logger
from rendezvous.safety.funnel_constraint                            import eval_h_C, grad_h_C
from rendezvous.safety.collision_constraint                         import eval_h_ij, grad_h_ij
from rendezvous.solver.ocp_solution                                 import OcpSolution, SolverStatus
from rendezvous.util.errors                                         import IntegrationError

# OSQP treats bounds beyond this magnitude as infinite
QP_INFINITY                                                         = 1e30

class _Layout():

    '''
    Index bookkeeping of the multiple shooting decision vector ``z = [x(0..N), u(0..N-1), s]`` and of the softened
    constraint rows, one slack per row.
    '''
    def __init__(self, spec):
        self.spec                                   = spec
        self.n                                      = spec.model.n_x()
        self.m                                      = spec.model.n_u()
        self.N                                      = spec.N
        self.n_states                               = (self.N + 1) * self.n
        self.n_inputs                               = self.N * self.m

        steps, kinds, centers, rhs, peers           = [], [], [], [], []
        if not spec.funnel is None:
            for k in range(1, self.N + 1):
                steps.append(k)
                kinds.append(_Layout.FUNNEL)
                centers.append(spec.funnel_centers[k])
                rhs.append(spec.funnel_margin)
                peers.append(None)
        if not spec.collision is None and spec.collision.enabled:
            for peer in spec.peers:
                for k in range(1, self.N + 1):
                    if peer.active[k]:
                        steps.append(k)
                        kinds.append(_Layout.COLLISION)
                        centers.append(peer.positions[k])
                        rhs.append(peer.inflation[k])
                        peers.append(peer.peer_id)

        self.row_steps                              = _np.array(steps, dtype=int)
        self.row_kinds                              = _np.array(kinds, dtype=int)
        self.row_centers                            = _np.array(centers, dtype=float).reshape(-1, 3)
        self.row_rhs                                = _np.array(rhs, dtype=float)
        self.row_peers                              = peers
        self.n_slacks                               = len(steps)
        self.n_vars                                 = self.n_states + self.n_inputs + self.n_slacks

        params                                      = spec.model.params
        self.state_rows                             = _np.nonzero(_np.isfinite(params.state_box.lower)
                                                                  | _np.isfinite(params.state_box.upper))[0]
        self.input_rows                             = _np.nonzero(_np.isfinite(params.input_box.lower)
                                                                  | _np.isfinite(params.input_box.upper))[0]
        start                                       = self.n + self.N * self.n
        self.dynamics_rows                          = slice(self.n, start)
        start                                       += self.N * (len(self.state_rows) + len(self.input_rows))
        self.softened_rows                          = slice(start, start + self.n_slacks)

    FUNNEL                                          = 0
    COLLISION                                       = 1

    def split(self, z):
        X                                           = z[:self.n_states].reshape(self.N + 1, self.n)
        U                                           = z[self.n_states:self.n_states + self.n_inputs].reshape(self.N, self.m)
        S                                           = z[self.n_states + self.n_inputs:]
        return X, U, S

    def join(self, X, U, S):
        return _np.concatenate([X.ravel(), U.ravel(), S])

    def softened_values(self, X):
        '''
        :return: pair ``(h, grad)`` of the softened constraint functions at the rows' steps, shapes ``(n_rows,)``
            and ``(n_rows, 3)``. Collision values exclude the inflation, which lives in ``row_rhs``.
        '''
        h                                           = _np.zeros(self.n_slacks)
        grad                                        = _np.zeros((self.n_slacks, 3))
        if self.n_slacks == 0:
            return h, grad
        positions                                   = X[self.row_steps, :3]

        funnel                                      = self.row_kinds == _Layout.FUNNEL
        if _np.any(funnel):
            h[funnel]                               = eval_h_C(positions[funnel], self.row_centers[funnel],
                                                               self.spec.funnel)
            grad[funnel]                            = grad_h_C(positions[funnel], self.row_centers[funnel],
                                                               self.spec.funnel)
        collision                                   = self.row_kinds == _Layout.COLLISION
        if _np.any(collision):
            h[collision]                            = eval_h_ij(positions[collision], self.row_centers[collision],
                                                                self.spec.collision)
            grad[collision]                         = grad_h_ij(positions[collision], self.row_centers[collision],
                                                                self.spec.collision)
        return h, grad

class _Linearization():

    '''
    QP subproblem of one SQP iteration, built at the iterate ``(X, U, S)``. The QP variables are the state and
    input increments together with the absolute slack values.
    '''
    def __init__(self, layout, X, U, S):
        model                                       = layout.spec.model
        n, m, N                                     = layout.n, layout.m, layout.N

        A_dyn, B_dyn                                = model.linearize(X[:-1], U)
        self.defects                                = model.step(X[:-1], U) - X[1:]
        self.h, grad                                = layout.softened_values(X)
        self.margins                                = self.h + S - layout.row_rhs

        data, rows, cols                            = [], [], []
        lower, upper                                = [], []
        row                                         = 0

        def _add(block_data, block_rows, block_cols):
            data.append(_np.asarray(block_data, dtype=float).ravel())
            rows.append(_np.asarray(block_rows, dtype=int).ravel())
            cols.append(_np.asarray(block_cols, dtype=int).ravel())

        # Initial state is pinned: dx(0) = 0
        _add(_np.ones(n), _np.arange(n), _np.arange(n))
        lower.append(_np.zeros(n))
        upper.append(_np.zeros(n))
        row                                         += n

        # Linearized dynamics: A_k dx(k) + B_k du(k) - dx(k+1) = -defect(k)
        ks, ii, jj                                  = _np.meshgrid(_np.arange(N), _np.arange(n), _np.arange(n),
                                                                   indexing="ij")
        _add(A_dyn, row + ks * n + ii, ks * n + jj)
        ks, ii, jj                                  = _np.meshgrid(_np.arange(N), _np.arange(n), _np.arange(m),
                                                                   indexing="ij")
        _add(B_dyn, row + ks * n + ii, layout.n_states + ks * m + jj)
        ks, ii                                      = _np.meshgrid(_np.arange(N), _np.arange(n), indexing="ij")
        _add(-_np.ones(N * n), row + ks * n + ii, (ks + 1) * n + ii)
        lower.append(-self.defects.ravel())
        upper.append(-self.defects.ravel())
        row                                         += N * n

        # State box for k = 1..N on the finite components
        box                                         = model.params.state_box
        if len(layout.state_rows) > 0:
            ks, ii                                  = _np.meshgrid(_np.arange(1, N + 1), layout.state_rows, indexing="ij")
            count                                   = ks.size
            _add(_np.ones(count), row + _np.arange(count), ks * n + ii)
            lower.append(box.lower[ii] - X[ks, ii])
            upper.append(box.upper[ii] - X[ks, ii])
            row                                     += count

        box                                         = model.params.input_box
        if len(layout.input_rows) > 0:
            ks, ii                                  = _np.meshgrid(_np.arange(N), layout.input_rows, indexing="ij")
            count                                   = ks.size
            _add(_np.ones(count), row + _np.arange(count), layout.n_states + ks * m + ii)
            lower.append(box.lower[ii] - U[ks, ii])
            upper.append(box.upper[ii] - U[ks, ii])
            row                                     += count

        # Softened constraints: h + grad . dp + s >= rhs, then s >= 0
        n_s                                         = layout.n_slacks
        slack_cols                                  = layout.n_states + layout.n_inputs + _np.arange(n_s)
        if n_s > 0:
            rr, cc                                  = _np.meshgrid(_np.arange(n_s), _np.arange(3), indexing="ij")
            _add(grad, row + rr, layout.row_steps[rr] * n + cc)
            _add(_np.ones(n_s), row + _np.arange(n_s), slack_cols)
            lower.append(layout.row_rhs - self.h)
            upper.append(_np.full(n_s, _np.inf))
            row                                     += n_s

            _add(_np.ones(n_s), row + _np.arange(n_s), slack_cols)
            lower.append(_np.zeros(n_s))
            upper.append(_np.full(n_s, _np.inf))
            row                                     += n_s

        self.A                                      = _sp.csc_matrix((_np.concatenate(data),
                                                                      (_np.concatenate(rows), _np.concatenate(cols))),
                                                                     shape=(row, layout.n_vars))
        self.lower                                  = _np.clip(_np.concatenate([v.ravel() for v in lower]),
                                                               -QP_INFINITY, QP_INFINITY)
        self.upper                                  = _np.clip(_np.concatenate([v.ravel() for v in upper]),
                                                               -QP_INFINITY, QP_INFINITY)

    def is_feasible(self):
        defect                                      = float(_np.max(_np.abs(self.defects), initial=0.0))
        return defect <= 1e-8 and float(_np.min(self.margins, initial=0.0)) >= -1e-6

class DocpSolver():

    '''
    Sequential quadratic programming solver for :class:`OcpSpec` problems, in multiple shooting form.

    Each iteration linearizes the dynamics and the softened constraints around the current iterate, solves the
    resulting sparse QP with OSQP, and globalizes the step with a backtracking line search on an augmented
    Lagrangian merit function whose multipliers are the QP duals. The Hessian is the Gauss-Newton one,
    ``blockdiag(2Q, 2R, 2 w_quad I)`` plus a small multiple of the identity.

    The returned states are always an exact rollout of the returned inputs, so the dynamics defect of a solution
    is zero up to round-off.
    '''
    def __init__(self):
        pass

    # Armijo sufficient decrease fraction, backtracking factor and smallest step tried
    ARMIJO                                          = 1e-4
    BACKTRACK                                       = 0.5
    MIN_STEP                                        = 1e-10

    # Augmented Lagrangian penalty: initial value, growth factor and cap
    PENALTY_INITIAL                                 = 1.0
    PENALTY_GROWTH                                  = 10.0
    PENALTY_MAX                                     = 1e12

    # Relative merit decrease under which a feasible iterate counts as converged
    STALL_TOLERANCE                                 = 1e-13

    # Feasibility tolerance of the initial guess when deciding whether it is already optimal
    FEASIBILITY_TOLERANCE                           = 1e-9

    # Distance to a limit under which a softened row or a box bound counts as active in the KKT residual
    ACTIVITY_TOLERANCE                              = 1e-6

    def solve(self, x_now, spec, warm=None, shift=1):
        '''
        :param x_now: current state of the agent, becomes ``x*(0|t)``
        :param OcpSpec spec: problem data
        :param OcpSolution warm: previous solution; its inputs advanced by ``shift`` steps seed the iterations and
            are returned instead of the SQP result when they are feasible and cheaper
        :param int shift: steps elapsed since ``warm`` was computed
        :rtype: OcpSolution
        '''
        model                                       = spec.model
        options                                     = spec.options
        layout                                      = _Layout(spec)
        x_now                                       = _np.asarray(x_now, dtype=float)

        if x_now.shape != (layout.n,):
            raise ValueError("Initial state of the " + model.name() + " model must have shape " + str((layout.n,))
                             + ", got " + str(x_now.shape))
        if not _np.all(_np.isfinite(x_now)):
            raise ValueError("Initial state must be finite, got " + str(x_now))

        if warm is None:
            U0                                      = _np.zeros((layout.N, layout.m))
        else:
            if warm.inputs.shape != (layout.N, layout.m):
                raise ValueError("Warm start inputs must have shape " + str((layout.N, layout.m)) + ", got "
                                 + str(warm.inputs.shape))
            U0                                      = warm.shifted_inputs(shift)
        U0                                          = model.params.input_box.clip(U0)
        warm_inputs                                 = None if warm is None else U0

        try:
            X0                                      = model.rollout(x_now, U0)
        except IntegrationError as ex:
            return self._failure(spec, layout, x_now, SolverStatus.NUMERICAL_ERROR, 0, str(ex))

        h0, _                                       = layout.softened_values(X0)
        S0                                          = _np.maximum(0.0, layout.row_rhs - h0)

        if _np.all(S0 <= DocpSolver.FEASIBILITY_TOLERANCE) \
                and model.params.state_box.violation(X0[1:]) <= DocpSolver.FEASIBILITY_TOLERANCE:
            gradient                                = self._gradient(layout, X0, U0, _np.zeros(layout.n_slacks))
            stationarity                            = float(_np.max(_np.abs(gradient), initial=0.0))
            if stationarity <= options.tolerance:
                return self._finalize(spec, layout, x_now, U0, SolverStatus.OPTIMAL, 0)

        X, U, S                                     = X0, U0, S0
        penalty                                     = DocpSolver.PENALTY_INITIAL
        status                                      = SolverStatus.MAX_ITERATIONS
        message                                     = ""
        iteration                                   = 0
        best_U, best_objective                      = U0, self._rollout_objective(spec, layout, x_now, U0)

        for iteration in range(1, options.max_iterations + 1):
            try:
                lin                                 = _Linearization(layout, X, U, S)
            except IntegrationError as ex:
                status, message                     = SolverStatus.NUMERICAL_ERROR, str(ex)
                break

            gradient                                = self._gradient(layout, X, U, S)
            qp_status, step, duals, hessian         = self._solve_qp(layout, lin, gradient, options)
            if qp_status in SolverStatus.HARD_FAILURES:
                status, message                     = qp_status, "QP subproblem failed at iteration " + str(iteration)
                break

            dX, dU, S_qp                            = layout.split(step)
            dS                                      = S_qp - S
            direction                               = layout.join(dX, dU, dS)
            step_norm                               = float(_np.max(_np.abs(direction), initial=0.0))

            if step_norm <= options.step_tolerance:
                status                              = SolverStatus.ACCEPTABLE
                break

            multipliers                             = -duals
            penalty, slope                          = self._penalty_for_descent(layout, lin, gradient, direction,
                                                                                 hessian, multipliers, penalty)

            merit_0                                 = self._merit(spec, layout, X, U, S, multipliers, penalty)
            alpha                                   = 1.0
            merit_try                               = _np.inf
            while alpha >= DocpSolver.MIN_STEP:
                X_try                               = X + alpha * dX
                U_try                               = U + alpha * dU
                S_try                               = S + alpha * dS
                try:
                    merit_try                       = self._merit(spec, layout, X_try, U_try, S_try, multipliers,
                                                                  penalty)
                except IntegrationError:
                    merit_try                       = _np.inf
                if merit_try <= merit_0 + DocpSolver.ARMIJO * alpha * slope:
                    break
                alpha                               *= DocpSolver.BACKTRACK

            if alpha < DocpSolver.MIN_STEP:
                status                              = SolverStatus.ACCEPTABLE if lin.is_feasible() \
                                                        else SolverStatus.MAX_ITERATIONS
                message                             = "line search stalled at iteration " + str(iteration)
                break

            X, U, S                                 = X_try, U_try, _np.maximum(S_try, 0.0)

            try:
                objective                           = self._rollout_objective(spec, layout, x_now, U)
            except IntegrationError:
                objective                           = _np.inf
            if objective < best_objective:
                best_U, best_objective              = U.copy(), objective

            if abs(merit_0 - merit_try) <= DocpSolver.STALL_TOLERANCE * (1.0 + abs(merit_0)) and lin.is_feasible():
                status                              = SolverStatus.ACCEPTABLE
                message                             = "merit stalled at iteration " + str(iteration)
                break

        if status in SolverStatus.HARD_FAILURES:
            self._log("Solver for the " + model.name() + " model failed: " + status + " " + message)
            return self._failure(spec, layout, x_now, status, iteration, message, U=best_U)

        U_final                                     = best_U if status == SolverStatus.MAX_ITERATIONS else U
        return self._finalize(spec, layout, x_now, U_final, status, iteration, message=message,
                              warm_inputs=warm_inputs)

    def stationarity(self, x_now, spec, inputs):
        '''
        :param x_now: initial state
        :param OcpSpec spec: problem data
        :param inputs: input sequence, shape ``(N, n_u)``
        :return: KKT residual of ``inputs`` and their rollout from ``x_now``, as reported in
            :attr:`OcpSolution.kkt_residual`
        :rtype: float
        '''
        layout                                      = _Layout(spec)
        U                                           = _np.asarray(inputs, dtype=float)
        X                                           = spec.model.rollout(_np.asarray(x_now, dtype=float), U)
        return self._stationarity(layout, X, U)

    def _stationarity(self, layout, X, U):
        '''
        KKT residual in the space of the inputs, with the states given by the rollout ``X`` of ``U`` and the
        softened rows folded into the objective through their exact penalty. Rows and box bounds within
        :attr:`ACTIVITY_TOLERANCE` of their limit get multipliers fitted by bounded least squares: a softened row
        between zero and its penalty slope, a bound between zero and infinity.
        '''
        spec                                        = layout.spec
        options                                     = spec.options
        n, m, N                                     = layout.n, layout.m, layout.N
        tol                                         = DocpSolver.ACTIVITY_TOLERANCE

        # sens[k] = d x(k) / d u(0..N-1)
        A_dyn, B_dyn                                = spec.model.linearize(X[:-1], U)
        sens                                        = _np.zeros((N + 1, n, N * m))
        for k in range(N):
            sens[k + 1]                             = A_dyn[k] @ sens[k]
            sens[k + 1][:, k * m:(k + 1) * m]       += B_dyn[k]

        gX                                          = 2.0 * spec.cost_weights()[:, None] * ((X - spec.reference) @ spec.Q.T)
        gU                                          = _np.zeros_like(U) if spec.R is None else 2.0 * U @ spec.R.T
        gradient                                    = gU.ravel() + _np.einsum("ki,kij->j", gX, sens)

        columns, caps                               = [], []
        if layout.n_slacks > 0:
            h, grad                                 = layout.softened_values(X)
            margin                                  = h - layout.row_rhs
            row_gradient                            = _np.einsum("rc,rcj->rj", grad, sens[layout.row_steps, :3])
            slope                                   = options.slack_linear \
                                                        + 2.0 * options.slack_quadratic * _np.maximum(0.0, -margin)
            violated                                = margin < -tol
            gradient                                = gradient - slope[violated] @ row_gradient[violated]
            for r in _np.nonzero((_np.abs(margin) <= tol) & (slope > 0.0))[0]:
                columns.append(-row_gradient[r])
                caps.append(slope[r])

        params                                      = spec.model.params
        input_sens                                  = _np.eye(N * m).reshape(N, m, N * m)
        for box, values, jacobian in [(params.state_box, X[1:], sens[1:]), (params.input_box, U, input_sens)]:
            for k, i in zip(*_np.nonzero(values - box.lower <= tol)):
                columns.append(-jacobian[k, i])
                caps.append(_np.inf)
            for k, i in zip(*_np.nonzero(box.upper - values <= tol)):
                columns.append(jacobian[k, i])
                caps.append(_np.inf)

        if len(columns) == 0:
            return float(_np.max(_np.abs(gradient), initial=0.0))

        G                                           = _np.column_stack(columns)
        fit                                         = _opt.lsq_linear(G, -gradient, bounds=(_np.zeros(len(caps)),
                                                                                            _np.array(caps)),
                                                                      method="bvls")
        return float(_np.max(_np.abs(gradient + G @ fit.x), initial=0.0))

    def _solve_qp(self, layout, lin, gradient, options):
        '''
        :return: tuple ``(status, step, duals, hessian)``; ``step`` and ``duals`` are None on failure
        '''
        spec                                        = layout.spec
        n_s                                         = layout.n_slacks

        blocks                                      = [2.0 * w * spec.Q for w in spec.cost_weights()]
        R                                           = _np.zeros((layout.m, layout.m)) if spec.R is None else spec.R
        blocks                                      += [2.0 * R] * layout.N
        if n_s > 0:
            blocks                                  += [2.0 * options.slack_quadratic * _np.eye(n_s)]
        hessian                                     = _sp.block_diag(blocks, format="csc") \
                                                        + options.regularization * _sp.identity(layout.n_vars,
                                                                                                 format="csc")

        q                                           = gradient.copy()
        q[layout.n_states + layout.n_inputs:]       = options.slack_linear

        solver                                      = osqp.OSQP()
        solver.setup(P              = _sp.triu(hessian, format="csc"),
                     q              = q,
                     A              = lin.A,
                     l              = lin.lower,
                     u              = lin.upper,
                     eps_abs        = options.qp_eps,
                     eps_rel        = options.qp_eps,
                     max_iter       = options.qp_max_iter,
                     adaptive_rho   = True,
                     polishing      = True,
                     verbose        = False)
        result                                      = solver.solve(raise_error=False)

        qp_status                                   = str(result.info.status).lower()
        if "primal infeasible" in qp_status:
            return SolverStatus.INFEASIBLE, None, None, hessian
        if result.x is None or result.y is None or not _np.all(_np.isfinite(result.x)) \
                or not _np.all(_np.isfinite(result.y)):
            return SolverStatus.NUMERICAL_ERROR, None, None, hessian
        if not qp_status.startswith("solved"):
            # An unconverged QP solution is kept only while it still satisfies the linearized dynamics
            residual                                = lin.A[layout.dynamics_rows] @ result.x \
                                                        - lin.lower[layout.dynamics_rows]
            if float(_np.max(_np.abs(residual), initial=0.0)) > 1e-6:
                return SolverStatus.NUMERICAL_ERROR, None, None, hessian
        return SolverStatus.OPTIMAL, _np.asarray(result.x, dtype=float), _np.asarray(result.y, dtype=float), hessian

    def _gradient(self, layout, X, U, S):
        spec                                        = layout.spec
        options                                     = spec.options
        gX                                          = 2.0 * spec.cost_weights()[:, None] * ((X - spec.reference) @ spec.Q.T)
        gU                                          = _np.zeros_like(U) if spec.R is None else 2.0 * U @ spec.R.T
        gS                                          = options.slack_linear + 2.0 * options.slack_quadratic * S
        return layout.join(gX, gU, gS)

    def _objective(self, spec, X, U, S):
        options                                     = spec.options
        return spec.tracking_cost(X) + spec.input_cost(U) \
                + float(_np.sum(options.slack_linear * S + options.slack_quadratic * S * S))

    def _merit(self, spec, layout, X, U, S, multipliers, penalty):
        '''
        Augmented Lagrangian ``J - lambda_E . c + rho/2 ||c||^2 + sum psi(g, lambda_I, rho)`` with ``c`` the
        dynamics defects, ``g = h + s - rhs`` the softened constraint margins and ``psi`` the usual inequality term:
        ``-lambda g + rho/2 g^2`` if ``g <= lambda / rho``, else ``-lambda^2 / (2 rho)``.
        '''
        c                                           = (spec.model.step(X[:-1], U) - X[1:]).ravel()
        h, _                                        = layout.softened_values(X)
        g                                           = h + S - layout.row_rhs
        lam_E, lam_I                                = self._split_multipliers(layout, multipliers)

        merit                                       = self._objective(spec, X, U, S) - float(_np.dot(lam_E, c)) \
                                                        + 0.5 * penalty * float(_np.dot(c, c))
        if len(g) > 0:
            active                                  = g <= lam_I / penalty
            merit                                   += float(_np.sum(_np.where(active,
                                                                               -lam_I * g + 0.5 * penalty * g * g,
                                                                               -lam_I * lam_I / (2.0 * penalty))))
        return merit

    def _split_multipliers(self, layout, multipliers):
        '''
        OSQP duals are negative on active lower bounds, so the multipliers of ``c = 0`` and ``g >= 0`` in the
        ``J - lambda . constraint`` convention are the negated duals.
        '''
        lam_E                                       = multipliers[layout.dynamics_rows]
        lam_I                                       = _np.maximum(multipliers[layout.softened_rows], 0.0)
        return lam_E, lam_I

    def _penalty_for_descent(self, layout, lin, gradient, direction, hessian, multipliers, penalty):
        '''
        Raises the penalty until the directional derivative of the merit function along the QP step is below
        minus half the step's curvature.

        :return: pair ``(penalty, slope)``
        '''
        lam_E, lam_I                                = self._split_multipliers(layout, multipliers)
        c                                           = lin.defects.ravel()
        g                                           = lin.margins
        dc                                          = lin.A[layout.dynamics_rows] @ direction
        dg                                          = lin.A[layout.softened_rows] @ direction

        base                                        = float(_np.dot(gradient, direction))
        curvature                                   = 0.5 * float(_np.dot(direction, hessian @ direction))

        while True:
            slope                                   = base - float(_np.dot(lam_E, dc)) + penalty * float(_np.dot(c, dc))
            if len(g) > 0:
                active                              = g <= lam_I / penalty
                slope                               += float(_np.sum(_np.where(active, (-lam_I + penalty * g) * dg,
                                                                               0.0)))
            if slope <= -curvature or penalty >= DocpSolver.PENALTY_MAX:
                return penalty, min(slope, 0.0)
            penalty                                 *= DocpSolver.PENALTY_GROWTH

    def _rollout_objective(self, spec, layout, x_now, U):
        '''
        Objective of the exactly simulated trajectory of ``U``, with the slacks it would need.
        '''
        X                                           = spec.model.rollout(x_now, U)
        h, _                                        = layout.softened_values(X)
        S                                           = _np.maximum(0.0, layout.row_rhs - h)
        return self._objective(spec, X, U, S)

    def _finalize(self, spec, layout, x_now, U, status, iterations, message="", warm_inputs=None):
        '''
        Rolls ``U`` out and evaluates the KKT residual at that rollout. A converged ``status`` becomes
        ``OPTIMAL`` only if the residual is within the tolerance, else ``ACCEPTABLE``. The shifted warm start
        ``warm_inputs`` replaces the result when it needs no slack and is cheaper; it then carries its own residual
        and status.
        '''
        model                                       = spec.model
        tolerance                                   = spec.options.tolerance
        U                                           = model.params.input_box.clip(U)
        try:
            X                                       = model.rollout(x_now, U)
        except IntegrationError as ex:
            return self._failure(spec, layout, x_now, SolverStatus.NUMERICAL_ERROR, iterations, str(ex))
        kkt                                         = self._stationarity(layout, X, U)
        if status in [SolverStatus.OPTIMAL, SolverStatus.ACCEPTABLE]:
            status                                  = SolverStatus.OPTIMAL if kkt <= tolerance \
                                                        else SolverStatus.ACCEPTABLE
        solution                                    = self._assemble(spec, layout, X, U, status, iterations, kkt,
                                                                     message)

        if not warm_inputs is None:
            X_warm                                  = model.rollout(x_now, warm_inputs)
            candidate                               = self._assemble(spec, layout, X_warm, warm_inputs, status,
                                                                     iterations, _np.nan, message)
            if not candidate.slack_active() \
                    and candidate.max_constraint_violation <= OcpSolution.SLACK_ACTIVE_THRESHOLD \
                    and candidate.cost < solution.cost:
                warm_kkt                            = self._stationarity(layout, X_warm, warm_inputs)
                warm_status                         = SolverStatus.OPTIMAL if warm_kkt <= tolerance \
                                                        else SolverStatus.ACCEPTABLE
                solution                            = self._assemble(spec, layout, X_warm, warm_inputs, warm_status,
                                                                     iterations, warm_kkt,
                                                                     "shifted warm start kept over the " + status
                                                                     + " iterate")

        self._log("Solved " + model.name() + " problem: " + solution.status + " after " + str(iterations)
                  + " iterations, cost " + "{0:.6g}".format(solution.cost))
        return solution

    def _failure(self, spec, layout, x_now, status, iterations, message, U=None):
        '''
        Solution object for a hard failure. Its trajectory is the rollout of ``U`` (hover inputs by default) when
        that rollout is finite, else the frozen initial state.
        '''
        if U is None:
            U                                       = _np.zeros((layout.N, layout.m))
        try:
            X                                       = spec.model.rollout(x_now, U)
        except IntegrationError:
            X                                       = _np.tile(x_now, (layout.N + 1, 1))
        return self._assemble(spec, layout, X, U, status, iterations, _np.nan, message)

    def _assemble(self, spec, layout, X, U, status, iterations, kkt, message):
        model                                       = spec.model
        options                                     = spec.options
        try:
            defect                                  = float(_np.max(_np.abs(model.step(X[:-1], U) - X[1:]), initial=0.0))
        except IntegrationError:
            defect                                  = _np.inf
        box                                         = max(model.params.state_box.violation(X[1:]),
                                                          model.params.input_box.violation(U))
        h, _                                        = layout.softened_values(X)
        needed                                      = _np.maximum(0.0, layout.row_rhs - h)
        penalty                                     = float(_np.sum(options.slack_linear * needed
                                                                    + options.slack_quadratic * needed * needed))

        funnel                                      = layout.row_kinds == _Layout.FUNNEL
        collision                                   = layout.row_kinds == _Layout.COLLISION
        min_funnel                                  = float(_np.min(h[funnel])) if _np.any(funnel) else None
        min_collision                               = float(_np.min(h[collision] - layout.row_rhs[collision])) \
                                                        if _np.any(collision) else None

        return OcpSolution(states                   = X,
                           inputs                   = U,
                           cost                     = spec.tracking_cost(X) + spec.input_cost(U),
                           status                   = status,
                           iterations               = iterations,
                           kkt_residual             = kkt,
                           dynamics_defect          = defect,
                           max_constraint_violation = box,
                           max_slack                = float(_np.max(needed, initial=0.0)),
                           slack_penalty            = penalty,
                           min_funnel               = min_funnel,
                           min_collision            = min_collision,
                           message                  = message)

    def _log(self, message):
        if Application.is_initialized():
            Application.app().log(message, Logger.LEVEL_DEBUG, stack_level_increase=1)

def solve_docp(x_now, spec, warm=None, shift=1):
    '''
    Solves one agent's optimal control problem from its current state.

    :param x_now: current state ``x(t)``
    :param OcpSpec spec: problem data
    :param OcpSolution warm: optional previous solution, used to seed the iterations and as a fallback candidate
    :param int shift: steps between ``warm`` and now
    :rtype: OcpSolution
    '''
    return DocpSolver().solve(x_now, spec, warm=warm, shift=shift)
