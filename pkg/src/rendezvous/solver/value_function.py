import numpy                                                       as _np

from rendezvous.models.state_mapping                                import map_leader_to_follower_space
from rendezvous.solver.sqp_solver                                   import solve_docp

class CostConvention():

    '''
    Which stage terms make up the value function.
    '''
    FULL                                            = "full"          # k = 0..N
    TRUNCATED                                       = "truncated"     # k = 0..N-1, no terminal term

    ALL                                             = [FULL, TRUNCATED]

class RoaMembership():

    INSIDE                                          = "INSIDE"
    OUTSIDE                                         = "OUTSIDE"
    UNKNOWN                                         = "UNKNOWN"       # the solver failed, membership undecided

def _target(x, z_l):
    target                                          = _np.asarray(z_l, dtype=float)
    if target.shape != x.shape:
        target                                      = map_leader_to_follower_space(target, n_follower=len(x))
    return target

def value_lower_bound(x_f, z_l, Q):
    '''
    ``||x_f - z_l||^2_Q``, the ``k = 0`` term of the cost, which no input can change.

    :param x_f: follower state
    :param z_l: target in follower coordinates, or a leader state that is mapped into them
    :param Q: stage weight
    :rtype: float
    '''
    x                                               = _np.asarray(x_f, dtype=float)
    e                                               = x - _target(x, z_l)
    return float(e @ _np.asarray(Q, dtype=float) @ e)

def value_function(x_f, z_l, spec, convention=CostConvention.FULL, warm=None):
    '''
    Optimal cost ``V_N(x_f, z_l)`` of the problem ``spec`` started at ``x_f``. The reference carried by ``spec`` is
    the one tracked; ``z_l`` only names the target of the lower bound and must agree with the reference at
    ``k = 0`` for the bound to be meaningful.

    :param OcpSpec spec: problem data
    :param str convention: a :class:`CostConvention` value
    :return: pair ``(value, solution)``; ``value`` is NaN when the solver failed hard
    '''
    if not convention in CostConvention.ALL:
        raise ValueError("Unknown cost convention '" + str(convention) + "', expected one of "
                         + str(CostConvention.ALL))
    problem                                         = spec.with_terminal(convention == CostConvention.FULL)
    solution                                        = solve_docp(x_f, problem, warm=warm, shift=0)
    if solution.hard_failure():
        return _np.nan, solution
    return float(solution.cost), solution

def roa_membership(x_f, z_l, spec, V_N_max, convention=CostConvention.FULL):
    '''
    Decides whether ``x_f`` lies in the sublevel set ``{ V_N <= V_N_max }``. Starts with the lower bound
    :func:`value_lower_bound`, which decides ``OUTSIDE`` without solving when it already exceeds the level.

    :rtype: str
    '''
    if not V_N_max > 0:
        raise ValueError("Region of attraction level must be positive, got " + str(V_N_max))

    if value_lower_bound(x_f, z_l, spec.Q) > V_N_max:
        return RoaMembership.OUTSIDE

    value, solution                                 = value_function(x_f, z_l, spec, convention=convention)
    if solution.failed():
        return RoaMembership.UNKNOWN
    return RoaMembership.INSIDE if value <= V_N_max else RoaMembership.OUTSIDE
