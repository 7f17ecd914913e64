import numpy                                                       as _np

FOLLOWER_STATE_DIM                                                  = 9

def leader_to_follower_matrix(n_leader=6, n_follower=FOLLOWER_STATE_DIM):
    '''
    :return: the matrix ``H = [[I_3, 0], [0, 0]]`` of shape ``(n_follower, n_leader)`` that keeps the position of
        a leader state and zeroes everything else
    '''
    H                                                               = _np.zeros((n_follower, n_leader))
    H[:3, :3]                                                       = _np.eye(3)
    return H

def map_leader_to_follower_space(x_leader, n_follower=FOLLOWER_STATE_DIM):
    '''
    Maps a leader state (or a batch of them along the leading dimension) into the follower state space. Only the
    position is carried over; every other entry is exactly zero.

    :param x_leader: leader state(s), shape ``(..., n_l)`` with position first
    :return: array of shape ``(..., n_follower)``
    '''
    x_leader                                                        = _np.asarray(x_leader, dtype=float)
    result                                                          = _np.zeros(x_leader.shape[:-1] + (n_follower,))
    result[..., :3]                                                 = x_leader[..., :3]
    return result

def follower_reference(leader_positions, offset, n_follower=FOLLOWER_STATE_DIM):
    '''
    Landing reference of a follower: leader positions shifted by the follower's landing offset, with every
    non-position entry zero.

    :param leader_positions: shape ``(N+1, 3)`` (or ``(3,)``)
    :param offset: landing offset ``c_i``, shape ``(3,)``
    :return: shape ``(N+1, n_follower)`` (or ``(n_follower,)``)
    '''
    shifted                                                         = _np.asarray(leader_positions, dtype=float) \
                                                                        + _np.asarray(offset, dtype=float)
    return map_leader_to_follower_space(shifted, n_follower)
