import itertools
import numpy                                                       as _np
import scipy.optimize                                               as _opt

class WorstCaseRadius():

    '''
    Over-approximation of the largest one-step position displacement of a model under its boxes. The Lipschitz
    constant behind the slack is the largest Jacobian norm at the grid nodes, an estimate of its supremum over each
    cell, so the radius is an estimate rather than a certified bound.

    :param float radius: ``grid/refined maximum + lipschitz_slack + disturbance bound``
    :param float grid_value: largest displacement found on the grid
    :param float refined_value: largest displacement after local refinement (at least ``grid_value``)
    :param float lipschitz_slack: estimated Lipschitz constant times the grid-cell half diagonal
    :param float disturbance_bound: Euclidean bound on the position part of the disturbance box
    :param argmax: ``(x, u)`` attaining ``refined_value``
    '''
    def __init__(self, radius, grid_value, refined_value, lipschitz_slack, disturbance_bound, argmax):
        self.radius                                 = radius
        self.grid_value                             = grid_value
        self.refined_value                          = refined_value
        self.lipschitz_slack                        = lipschitz_slack
        self.disturbance_bound                      = disturbance_bound
        self.argmax                                 = argmax

def _displacement(model, x, u):
    return _np.linalg.norm(model.position(model.step(x, u)) - model.position(x), axis=-1)

def worst_case_radius(model, state_box=None, input_box=None, levels=3, refine_top=5):
    '''
    Maximizes the one-step position displacement ``||p(f(x, u)) - p(x)||`` over the state and input boxes: a dense
    grid over every non-degenerate component (corners and face midpoints for 3 levels), then L-BFGS-B refinement
    from the best grid points, then a Lipschitz slack for the maximum between grid points, estimated from the
    Jacobians at the nodes.

    :param VehicleModel model: vehicle model
    :param Box state_box: bounded state box; defaults to the model's displacement box
    :param Box input_box: bounded input box; defaults to the model's input box
    :param int levels: grid points per non-degenerate component, at least 2
    :param int refine_top: number of best grid points used as refinement starts
    :rtype: WorstCaseRadius
    '''
    if levels < 2:
        raise ValueError("The displacement grid needs at least 2 levels per component, got " + str(levels))
    if state_box is None:
        state_box                                   = model.displacement_box()
    if input_box is None:
        input_box                                   = model.params.input_box
    if not state_box.is_bounded() or not input_box.is_bounded():
        raise ValueError("Worst-case radius of the " + model.name() + " model needs bounded boxes")

    n_x                                             = model.n_x()
    lower                                           = _np.concatenate([state_box.lower, input_box.lower])
    upper                                           = _np.concatenate([state_box.upper, input_box.upper])
    free                                            = _np.nonzero(upper > lower)[0]

    def _split(points):
        return points[..., :n_x], points[..., n_x:]

    if len(free) == 0:
        x, u                                        = _split(lower[None, :])
        value                                       = float(_displacement(model, x, u)[0])
        disturbance                                 = _position_disturbance_bound(model)
        return WorstCaseRadius(value + disturbance, value, value, 0.0, disturbance, (x[0], u[0]))

    axes                                            = [_np.linspace(lower[i], upper[i], levels) for i in free]
    grid                                            = _np.tile(lower, (levels ** len(free), 1))
    grid[:, free]                                   = _np.array(list(itertools.product(*axes)))

    x_grid, u_grid                                  = _split(grid)
    values                                          = _displacement(model, x_grid, u_grid)
    grid_value                                      = float(_np.max(values))

    best_value                                      = grid_value
    best_point                                      = grid[int(_np.argmax(values))].copy()
    bounds                                          = list(zip(lower[free], upper[free]))

    def _negative_displacement(z_free):
        point                                       = lower.copy()
        point[free]                                 = z_free
        x, u                                        = _split(point)
        return -float(_displacement(model, x, u))

    for idx in _np.argsort(-values)[:refine_top]:
        start                                       = grid[idx, free]
        result                                      = _opt.minimize(_negative_displacement, start, method="L-BFGS-B",
                                                                    bounds=bounds)
        if -result.fun > best_value:
            best_value                              = float(-result.fun)
            best_point                              = lower.copy()
            best_point[free]                        = result.x

    lipschitz                                       = _displacement_lipschitz(model, x_grid, u_grid, free, n_x)
    spacing                                         = (upper[free] - lower[free]) / (levels - 1)
    slack                                           = lipschitz * 0.5 * float(_np.linalg.norm(spacing))
    disturbance                                     = _position_disturbance_bound(model)

    x_best, u_best                                  = _split(best_point)
    return WorstCaseRadius(radius            = best_value + slack + disturbance,
                           grid_value        = grid_value,
                           refined_value     = best_value,
                           lipschitz_slack   = slack,
                           disturbance_bound = disturbance,
                           argmax            = (x_best, u_best))

def _displacement_lipschitz(model, x_grid, u_grid, free, n_x):
    '''
    Largest Frobenius norm over the grid nodes of the Jacobian of ``p(f(x, u)) - p(x)`` with respect to the free
    components. It bounds the gradient norm of the displacement norm at the nodes, not between them.
    '''
    largest                                         = 0.0
    for start in range(0, len(x_grid), JACOBIAN_CHUNK):
        A, B                                        = model.linearize(x_grid[start:start + JACOBIAN_CHUNK],
                                                                      u_grid[start:start + JACOBIAN_CHUNK])
        J                                           = _np.concatenate([A[:, :3, :], B[:, :3, :]], axis=-1)
        J[:, :, :3]                                 -= _np.eye(3)
        J_free                                      = J[:, :, free]
        largest                                     = max(largest, float(_np.max(_np.linalg.norm(J_free, axis=(1, 2)))))
    return largest

# Grid points linearized at once; bounds the memory taken by the batched RK4 Jacobians
JACOBIAN_CHUNK                                                      = 4096

def _position_disturbance_bound(model):
    box                                             = model.params.disturbance_box
    extent                                          = _np.maximum(_np.abs(box.lower[:3]), _np.abs(box.upper[:3]))
    return float(_np.linalg.norm(extent))
