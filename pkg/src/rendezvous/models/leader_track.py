import numpy                                                       as _np

from rendezvous.database.data_accessor                              import DataAccessor
from rendezvous.util.errors                                         import ConfigurationError

class LeaderTrack():

    '''
    Recorded planar leader motion, linearly interpolated in time. Headings are unwrapped before interpolation so
    that a track crossing +/-pi does not spin the platform.

    :param t: sample times in seconds, strictly increasing
    :param p_x: east positions in meters
    :param p_y: north positions in meters
    :param heading: headings in radians
    '''
    def __init__(self, t, p_x, p_y, heading):
        self.t                                      = _np.asarray(t, dtype=float)
        self.p_x                                    = _np.asarray(p_x, dtype=float)
        self.p_y                                    = _np.asarray(p_y, dtype=float)
        self.heading                                = _np.unwrap(_np.asarray(heading, dtype=float))

        if len(self.t) < 2:
            raise ConfigurationError("a recorded leader track needs at least two samples, got " + str(len(self.t)))
        if not (len(self.p_x) == len(self.t) and len(self.p_y) == len(self.t) and len(self.heading) == len(self.t)):
            raise ConfigurationError("leader track columns have different lengths")
        if _np.any(_np.diff(self.t) <= 0):
            raise ConfigurationError("leader track times must be strictly increasing")
        if not _np.all(_np.isfinite(_np.concatenate([self.t, self.p_x, self.p_y, self.heading]))):
            raise ConfigurationError("leader track contains non-finite values")

    COLUMNS                                         = ["t", "p_x", "p_y", "psi"]

    def load(path):
        '''
        :param str path: CSV file with columns ``t, p_x, p_y, psi``
        :rtype: LeaderTrack
        '''
        with DataAccessor(path) as ax:
            track_df                                = ax.retrieve(fail_if_not_found=True, required_columns=LeaderTrack.COLUMNS)

        track_df                                    = track_df.sort_values("t")
        return LeaderTrack(track_df["t"].to_numpy(), track_df["p_x"].to_numpy(), track_df["p_y"].to_numpy(),
                           track_df["psi"].to_numpy())

    def pose_at(self, time):
        '''
        :param float time: seconds; clamped to the recorded interval
        :return: ``(p_x, p_y, heading)``
        :rtype: tuple
        '''
        return (float(_np.interp(time, self.t, self.p_x)),
                float(_np.interp(time, self.t, self.p_y)),
                float(_np.interp(time, self.t, self.heading)))

    def state_at(self, time, dt):
        '''
        Leader state at ``time`` with surge speed and yaw rate estimated by central differences over ``dt``.

        :rtype: numpy.ndarray
        '''
        p_x, p_y, heading                           = self.pose_at(time)
        ahead                                       = self.pose_at(time + 0.5 * dt)
        behind                                      = self.pose_at(time - 0.5 * dt)
        v_x                                         = (ahead[0] - behind[0]) / dt
        v_y                                         = (ahead[1] - behind[1]) / dt
        surge                                       = v_x * _np.cos(heading) + v_y * _np.sin(heading)
        yaw_rate                                    = (ahead[2] - behind[2]) / dt
        return _np.array([p_x, p_y, 0.0, heading, surge, yaw_rate])
