import numpy                                                       as _np

class SharedTrajectory():

    '''
    Predicted trajectory that an agent broadcasts to its peers after solving at step ``t_a``.

    Besides the positions, which are all a receiver strictly needs, the message carries the sender's planned
    velocities and full states so that a receiver running the same model can seed its predictor exactly.

    :param str sender: agent id of the sender
    :param int t_a: birth step
    :param positions: ``z(l|t_a)``, ``l = 0..N``, shape ``(N+1, 3)``
    :param velocities: optional, shape ``(N+1, 3)``
    :param states: optional full planned states, shape ``(N+1, n_x)``
    :param str model_name: name of the sender's model, to tell whether ``states`` can be reused
    '''
    def __init__(self, sender, t_a, positions, velocities=None, states=None, model_name=None):
        self.sender                                 = sender
        self.t_a                                    = int(t_a)
        self.positions                              = _np.array(positions, dtype=float)
        self.velocities                             = None if velocities is None else _np.array(velocities, dtype=float)
        self.states                                 = None if states is None else _np.array(states, dtype=float)
        self.model_name                             = model_name

        if self.positions.ndim != 2 or self.positions.shape[1] != 3 or len(self.positions) < 2:
            raise ValueError("Shared trajectory from " + str(sender) + " must have shape (N+1, 3) with N >= 1, got "
                             + str(self.positions.shape))
        if not _np.all(_np.isfinite(self.positions)):
            raise ValueError("Shared trajectory from " + str(sender) + " contains non-finite positions")
        if not self.velocities is None and self.velocities.shape != self.positions.shape:
            raise ValueError("Shared velocities from " + str(sender) + " must have shape " + str(self.positions.shape))
        if not self.states is None and len(self.states) != len(self.positions):
            raise ValueError("Shared states from " + str(sender) + " must have " + str(len(self.positions)) + " rows")

    def horizon(self):
        return len(self.positions) - 1

    def from_solution(sender, t_a, solution, model_name):
        '''
        :param OcpSolution solution: the sender's solution at ``t_a``
        :rtype: SharedTrajectory
        '''
        states                                      = solution.states
        return SharedTrajectory(sender, t_a, states[:, :3], velocities=_velocities(states, model_name),
                                states=states, model_name=model_name)

def _velocities(states, model_name):
    '''
    World-frame velocities of planned states: components 3..5 for the follower and constant-velocity models, and
    the surge speed along the heading for the leader.
    '''
    if model_name == "leader":
        heading, surge                              = states[:, 3], states[:, 4]
        return _np.stack([surge * _np.cos(heading), surge * _np.sin(heading), _np.zeros_like(surge)], axis=-1)
    if states.shape[1] >= 6:
        return states[:, 3:6].copy()
    return None
