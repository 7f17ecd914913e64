import numpy                                                       as _np

from rendezvous.safety.collision_constraint                         import eval_h_ij
from rendezvous.safety.funnel_constraint                            import eval_h_C
from rendezvous.util.errors                                         import ArtifactError

class CollisionReport():

    '''
    Realized clearances of a run.

    :param float min_pairwise: smallest ``h_ij`` over every step and follower pair, or None with a single follower
    :param tuple pairwise_argmin: ``(t, agent_i, agent_j)`` attaining ``min_pairwise``, or None
    :param dict funnel_by_agent: follower id -> smallest ``h_C`` over the run
    :param float tolerance: a clearance of at least ``-tolerance`` counts as admissible
    '''
    def __init__(self, min_pairwise, pairwise_argmin, funnel_by_agent, tolerance=1e-6):
        self.min_pairwise                           = min_pairwise
        self.pairwise_argmin                        = pairwise_argmin
        self.funnel_by_agent                        = funnel_by_agent
        self.tolerance                              = tolerance
        self.min_funnel                             = min(funnel_by_agent.values()) if len(funnel_by_agent) > 0 \
                                                        else None

    def pairwise_passed(self):
        return self.min_pairwise is None or self.min_pairwise >= -self.tolerance

    def funnel_passed(self):
        return all(h >= -self.tolerance for h in self.funnel_by_agent.values())

    def passed(self):
        return self.pairwise_passed() and self.funnel_passed()

    def to_dict(self):
        argmin                                      = None
        if not self.pairwise_argmin is None:
            t, a, b                                 = self.pairwise_argmin
            argmin                                  = {"t": int(t), "agents": [a, b]}
        return {"passed":           self.passed(),
                "min_pairwise":     None if self.min_pairwise is None else float(self.min_pairwise),
                "pairwise_argmin":  argmin,
                "min_funnel":       None if self.min_funnel is None else float(self.min_funnel),
                "funnel_by_agent":  {agent: float(h) for agent, h in self.funnel_by_agent.items()},
                "tolerance":        self.tolerance}

def verify_collision_free(trajectory_df, cp, fp, leader_id="leader", tolerance=1e-6):
    '''
    Checks a trajectory table for collisions between followers and for funnel violations.

    :param pandas.DataFrame trajectory_df: rows ``t, agent, p_x, p_y, p_z, ...``; the leader rows give the platform
        center used by the funnel
    :param CollisionParams cp: separation requirement
    :param FunnelParams fp: funnel shape
    :param str leader_id: agent id of the leader rows
    :raises ArtifactError: if follower rows have no leader row at the same step
    :rtype: CollisionReport
    '''
    followers_df                                    = trajectory_df[trajectory_df["agent"] != leader_id]
    leader_df                                       = trajectory_df[trajectory_df["agent"] == leader_id] \
                                                        .drop_duplicates("t").set_index("t")

    funnel_by_agent                                 = {}
    if len(followers_df) > 0:
        missing                                     = sorted(set(followers_df["t"]) - set(leader_df.index))
        if len(missing) > 0:
            raise ArtifactError("Trajectory table has follower rows without a leader row at steps " + str(missing[:5]))
        positions                                   = followers_df[["p_x", "p_y", "p_z"]].to_numpy(dtype=float)
        centers                                     = leader_df.loc[followers_df["t"], ["p_x", "p_y", "p_z"]] \
                                                        .to_numpy(dtype=float)
        h_C                                         = eval_h_C(positions, centers, fp)
        for agent, h in zip(followers_df["agent"], h_C):
            funnel_by_agent[agent]                  = min(funnel_by_agent.get(agent, _np.inf), float(h))

    min_pairwise                                    = None
    argmin                                          = None
    for t, step_df in followers_df.groupby("t", sort=True):
        if len(step_df) < 2:
            continue
        positions                                   = step_df[["p_x", "p_y", "p_z"]].to_numpy(dtype=float)
        agents                                      = step_df["agent"].tolist()
        i, j                                        = _np.triu_indices(len(positions), k=1)
        h                                           = eval_h_ij(positions[i], positions[j], cp)
        worst                                       = int(_np.argmin(h))
        if min_pairwise is None or h[worst] < min_pairwise:
            min_pairwise                            = float(h[worst])
            argmin                                  = (t, agents[i[worst]], agents[j[worst]])

    return CollisionReport(min_pairwise, argmin, funnel_by_agent, tolerance)
