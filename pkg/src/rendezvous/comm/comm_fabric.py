import threading
import pandas                                                      as _pd

from rendezvous.application.application                             import Application
from rendezvous.observability.logger                                import Logger

class DataCollection():

    '''
    What one agent knows from its peers at step ``t``: the newest trajectory received from each of them.

    :param str agent: id of the receiving agent
    :param int t: step at which the collection was taken
    :param dict entries: sender id -> :class:`SharedTrajectory`; peers never heard from are absent
    '''
    def __init__(self, agent, t, entries):
        self.agent                                  = agent
        self.t                                      = t
        self.entries                                = entries

    # Staleness above which an entry is flagged stale. One step is the nominal delivery latency.
    NOMINAL_STALENESS                               = 1

    def senders(self):
        return sorted(self.entries.keys())

    def get(self, sender):
        return self.entries.get(sender)

    def staleness(self, sender):
        '''
        :return: ``k = t - t_a`` for the newest trajectory of ``sender``, or None if nothing was ever received
        '''
        traj                                        = self.entries.get(sender)
        return None if traj is None else self.t - traj.t_a

    def is_stale(self, sender):
        k                                           = self.staleness(sender)
        return k is None or k > DataCollection.NOMINAL_STALENESS

class CommFabric():

    '''
    Simulated broadcast medium among the agents of one scenario.

    Messages broadcast at step ``t`` are held as pending until :meth:`commit` is called at the step barrier. A
    message born at ``t_a`` becomes visible to :meth:`collect` at ``t_a + 1``; the one exception is
    ``collect(..., include_current=True)``, used by the sequential first iteration, which also exposes pending
    messages born at the current step. Every delivery decision is recorded in an audit log.

    :param list agent_ids: ids of all agents, in roster order; the position of an id is its link index
    :param LossSchedule schedule: decides which messages are lost
    '''
    def __init__(self, agent_ids, schedule):
        self.agent_ids                              = list(agent_ids)
        self.schedule                               = schedule
        self._index                                 = {agent: idx for idx, agent in enumerate(self.agent_ids)}

        # receiver -> sender -> newest delivered trajectory
        self._inbox                                 = {agent: {} for agent in self.agent_ids}
        self._pending                               = []
        self._audit_rows                            = []
        self._last_birth                            = {}

        # Broadcasts may come from worker threads
        self._lock                                  = threading.Lock()

    DELIVERED                                       = "delivered"
    DROPPED                                         = "dropped"

    AUDIT_COLUMNS                                   = ["t", "link", "status"]

    def broadcast(self, sender, traj, t):
        '''
        Offers ``traj`` to every other agent. The loss schedule decides, per link, whether it is delivered.

        :param str sender: agent id
        :param SharedTrajectory traj: trajectory born at ``t``
        :param int t: current step
        '''
        if not sender in self._index.keys():
            raise ValueError("Unknown sender '" + str(sender) + "'")
        if traj.sender != sender or traj.t_a != t:
            raise ValueError("Trajectory from " + str(traj.sender) + " born at " + str(traj.t_a)
                             + " cannot be broadcast by " + str(sender) + " at step " + str(t))

        with self._lock:
            last                                    = self._last_birth.get(sender)
            if not last is None and t < last:
                raise ValueError("Trajectories from " + str(sender) + " must be broadcast in birth order; got step "
                                 + str(t) + " after " + str(last))
            self._last_birth[sender]                = t

            dropped                                 = 0
            for receiver in self.agent_ids:
                if receiver == sender:
                    continue
                delivered                           = self.schedule.delivers(sender, receiver, t,
                                                                             self._index[sender], self._index[receiver])
                status                              = CommFabric.DELIVERED if delivered else CommFabric.DROPPED
                self._audit_rows.append([t, sender + "->" + receiver, status])
                if delivered:
                    self._pending.append((receiver, traj))
                else:
                    dropped                         += 1

        if dropped > 0 and Application.is_initialized():
            Application.app().log("Step " + str(t) + ": " + str(dropped) + " of " + str(len(self.agent_ids) - 1)
                                  + " links dropped the trajectory of " + sender, Logger.LEVEL_DETAILED)

    def commit(self, t):
        '''
        Step barrier: moves pending messages into the receivers' inboxes, which keep only the newest trajectory
        per sender.

        :param int t: the step being closed
        '''
        with self._lock:
            for receiver, traj in self._pending:
                newest                              = self._inbox[receiver].get(traj.sender)
                if newest is None or traj.t_a >= newest.t_a:
                    self._inbox[receiver][traj.sender] = traj
            self._pending                           = []

    def collect(self, agent, t, include_current=False):
        '''
        :param str agent: receiving agent
        :param int t: current step
        :param bool include_current: also expose pending messages born at ``t``
        :return: the newest trajectory per peer born strictly before ``t`` (or at ``t`` with ``include_current``)
        :rtype: DataCollection
        '''
        if not agent in self._index.keys():
            raise ValueError("Unknown agent '" + str(agent) + "'")

        with self._lock:
            candidates                              = {}
            for sender, newest in self._inbox[agent].items():
                candidates[sender]                  = [newest]
            if include_current:
                for receiver, traj in self._pending:
                    if receiver == agent and traj.t_a == t:
                        candidates.setdefault(traj.sender, []).append(traj)

        horizon                                     = t + 1 if include_current else t
        entries                                     = {}
        for sender, history in candidates.items():
            visible                                 = [traj for traj in history if traj.t_a < horizon]
            if len(visible) > 0:
                entries[sender]                     = max(visible, key=lambda traj: traj.t_a)
        return DataCollection(agent, t, entries)

    def audit(self):
        '''
        :return: one row per offered message with columns ``t, link, status``
        :rtype: pandas.DataFrame
        '''
        with self._lock:
            rows                                    = list(self._audit_rows)
        return _pd.DataFrame(rows, columns=CommFabric.AUDIT_COLUMNS)
