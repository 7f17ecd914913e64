import pandas                                                      as _pd

from rendezvous.comm.comm_fabric                                    import CommFabric
from rendezvous.coordinator.agent_runtime                           import AgentRuntime
from rendezvous.dataset.field                                       import Field, ValueField, EnumField
from rendezvous.util.errors                                         import ArtifactError

class ArtifactSchema():

    '''
    Versioned column set of one tabular artifact of a run. Writers lay their DataFrames out with :meth:`conform`
    and readers check what they load with :meth:`validate`, so a change of columns is always a change of version.

    :param str name: artifact name, also the CSV file name without extension
    :param int version: bumped whenever the column set changes
    :param list fields: :class:`Field` objects in column order
    '''
    def __init__(self, name, version, fields):
        self.name                                   = name
        self.version                                = version
        self.fields                                 = fields

    def columns(self):
        return [f.name for f in self.fields]

    def conform(self, data_df):
        '''
        :return: ``data_df`` with exactly the schema's columns, in order
        :raises ArtifactError: if a column is missing
        '''
        self._check_columns(data_df)
        return data_df[self.columns()]

    def validate(self, data_df):
        '''
        :raises ArtifactError: if ``data_df`` lacks a column or a column holds values outside its field
        '''
        self._check_columns(data_df)
        for f in self.fields:
            f.check(data_df[f.name], self.name)

    def _check_columns(self, data_df):
        missing                                     = [c for c in self.columns() if not c in data_df.columns]
        if len(missing) > 0:
            raise ArtifactError("Artifact '" + self.name + "' (schema version " + str(self.version)
                                + ") is missing columns " + str(missing))

    def empty(self):
        return _pd.DataFrame(columns=self.columns())

# Trajectories pad leader rows (6 states, 2 inputs) to the follower width (9 states, 4 inputs) with empty cells
STATE_COLUMNS                                                       = ["p_x", "p_y", "p_z"] \
                                                                        + ["x_" + str(i) for i in range(3, 9)]
INPUT_COLUMNS                                                       = ["u_" + str(i) for i in range(4)]

TRAJECTORY                                                          = ArtifactSchema(
    name                                                            = "trajectory",
    version                                                         = 1,
    fields                                                          = [ValueField("t", Field.INT),
                                                                       ValueField("agent", Field.STR),
                                                                       EnumField("role", AgentRuntime.ROLES),
                                                                       EnumField("mode", AgentRuntime.MODES)]
                                                                      + [ValueField(c, Field.FLOAT) for c in STATE_COLUMNS]
                                                                      + [ValueField(c, Field.FLOAT) for c in INPUT_COLUMNS])

LOSS_AUDIT                                                          = ArtifactSchema(
    name                                                            = "loss_audit",
    version                                                         = 1,
    fields                                                          = [ValueField("t", Field.INT),
                                                                       ValueField("link", Field.STR),
                                                                       EnumField("status", [CommFabric.DELIVERED,
                                                                                            CommFabric.DROPPED])])

TOP_VIEW                                                            = ArtifactSchema(
    name                                                            = "top_view",
    version                                                         = 1,
    fields                                                          = [ValueField("t", Field.INT),
                                                                       ValueField("agent", Field.STR),
                                                                       ValueField("p_x", Field.FLOAT),
                                                                       ValueField("p_y", Field.FLOAT),
                                                                       ValueField("rel_x", Field.FLOAT),
                                                                       ValueField("rel_y", Field.FLOAT)])

VIEW_3D                                                             = ArtifactSchema(
    name                                                            = "view_3d",
    version                                                         = 1,
    fields                                                          = [ValueField("t", Field.INT),
                                                                       ValueField("agent", Field.STR),
                                                                       ValueField("p_x", Field.FLOAT),
                                                                       ValueField("p_y", Field.FLOAT),
                                                                       ValueField("p_z", Field.FLOAT),
                                                                       ValueField("h_C", Field.FLOAT)])

# Keys of every line of step_records.jsonl, and of each entry of its "agents" list
STEP_RECORD_VERSION                                                 = 1
STEP_RECORD_KEYS                                                    = ["version", "t", "agents", "min_funnel",
                                                                       "min_pairwise", "gate", "broadcasts"]
AGENT_RECORD_KEYS                                                   = ["agent", "role", "mode", "latched", "state",
                                                                       "input", "cost", "stage_cost", "error_sq",
                                                                       "solver", "staleness", "predicted_entries",
                                                                       "inflation", "broadcast", "gate_distance",
                                                                       "leader_lambda_max", "perturbation"]
