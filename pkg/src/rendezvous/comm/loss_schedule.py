import numpy                                                       as _np

from rendezvous.util.errors                                         import ConfigurationError

WILDCARD                                                            = "*"

class LinkRule():

    '''
    Loss behavior of the directed links matching ``sender -> receiver``, where either end may be ``"*"``.

    :param str sender: agent id or ``"*"``
    :param str receiver: agent id or ``"*"``
    :param list windows: blackout windows ``(start, end)`` in steps; a message born at ``t`` is dropped when
        ``start <= t < end``. ``end = None`` means the blackout is permanent.
    :param float drop_probability: chance that any other message on the link is dropped
    '''
    def __init__(self, sender, receiver, windows=None, drop_probability=0.0, field_path="comm.loss"):
        self.sender                                 = str(sender)
        self.receiver                               = str(receiver)
        self.windows                                = [] if windows is None else [(int(s), None if e is None else int(e))
                                                                                  for s, e in windows]
        self.drop_probability                       = float(drop_probability)

        if not 0.0 <= self.drop_probability <= 1.0:
            raise ConfigurationError("drop probability must lie in [0, 1], got " + str(drop_probability),
                                     field_path=field_path + ".drop_probability")
        previous_end                                = None
        for start, end in self.windows:
            if start < 0 or (not end is None and end <= start):
                raise ConfigurationError("window [" + str(start) + ", " + str(end) + ") is empty or negative",
                                         field_path=field_path + ".windows")
            if not previous_end is None and start < previous_end:
                raise ConfigurationError("windows must be sorted and may not overlap", field_path=field_path + ".windows")
            previous_end                           = _np.inf if end is None else end

    def matches(self, sender, receiver):
        return (self.sender == WILDCARD or self.sender == sender) \
                and (self.receiver == WILDCARD or self.receiver == receiver)

    def blocks(self, t):
        for start, end in self.windows:
            if start <= t and (end is None or t < end):
                return True
        return False

    def to_dict(self):
        windows                                     = []
        for start, end in self.windows:
            window                                  = {"start": start}
            if not end is None:
                window["end"]                       = end
            windows.append(window)
        return {"from": self.sender, "to": self.receiver, "windows": windows,
                "drop_probability": self.drop_probability}

    def from_dict(d, field_path="comm.loss"):
        if not isinstance(d, dict):
            raise ConfigurationError("expected a table", field_path=field_path)
        unknown                                     = set(d.keys()) - set(["from", "to", "windows", "drop_probability"])
        if len(unknown) > 0:
            raise ConfigurationError("unknown keys " + str(sorted(unknown)), field_path=field_path)
        for key in ["from", "to"]:
            if not key in d.keys():
                raise ConfigurationError("missing key '" + key + "'", field_path=field_path)
        windows                                     = []
        for idx, w in enumerate(d.get("windows", [])):
            w_path                                  = field_path + ".windows[" + str(idx) + "]"
            if not isinstance(w, dict) or not "start" in w.keys() or len(set(w.keys()) - set(["start", "end"])) > 0:
                raise ConfigurationError("expected a table with 'start' and optional 'end'", field_path=w_path)
            windows.append((w["start"], w.get("end")))
        return LinkRule(d["from"], d["to"], windows, d.get("drop_probability", 0.0), field_path=field_path)

class LossSchedule():

    '''
    Decides, per directed link and step, whether a broadcast message is delivered.

    Random drops come from a generator keyed by ``(seed, t, sender index, receiver index)``, so the delivery
    pattern does not depend on the order in which messages are sent.

    :param list rules: :class:`LinkRule` objects; a message is lost if any matching rule drops it
    :param int seed: required when any rule has a positive drop probability
    '''
    def __init__(self, rules=None, seed=None):
        self.rules                                  = [] if rules is None else list(rules)
        self.seed                                   = seed

        if self.stochastic() and seed is None:
            raise ConfigurationError("random message drops need a seed", field_path="comm.loss")

    def stochastic(self):
        return any(rule.drop_probability > 0 for rule in self.rules)

    def delivers(self, sender, receiver, t, sender_index, receiver_index):
        '''
        :return: True if a message born at step ``t`` on the link ``sender -> receiver`` gets through
        :rtype: bool
        '''
        matching                                    = [rule for rule in self.rules if rule.matches(sender, receiver)]
        if any(rule.blocks(t) for rule in matching):
            return False
        p                                           = max([rule.drop_probability for rule in matching], default=0.0)
        if p <= 0.0:
            return True
        rng                                         = _np.random.default_rng([int(self.seed), int(t), int(sender_index),
                                                                              int(receiver_index)])
        return bool(rng.random() >= p)

    def to_list(self):
        return [rule.to_dict() for rule in self.rules]

    def from_list(rule_list, seed=None, field_path="comm.loss"):
        if not isinstance(rule_list, list):
            raise ConfigurationError("expected an array of tables", field_path=field_path)
        rules                                       = [LinkRule.from_dict(d, field_path + "[" + str(idx) + "]")
                                                       for idx, d in enumerate(rule_list)]
        return LossSchedule(rules, seed=seed)
