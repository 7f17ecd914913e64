import os                                                           as _os
from pathlib                                                        import Path

from rendezvous.analysis.certification_report                       import certify_run
from rendezvous.application.application                             import Application
from rendezvous.database.data_accessor                              import DataAccessor
from rendezvous.dataset.artifact_schema                             import TRAJECTORY, LOSS_AUDIT, TOP_VIEW, VIEW_3D, \
                                                                           STEP_RECORD_VERSION, STEP_RECORD_KEYS, \
                                                                           AGENT_RECORD_KEYS
from rendezvous.observability.logger                                import Logger
from rendezvous.scenario.scenario_config                            import ScenarioConfig
from rendezvous.util.errors                                         import ArtifactError
from rendezvous.util.json_utils                                     import JSON_Utils

class RunHub():

    '''
    The artifacts of one run, all rooted at a single folder:

    ============================= ====================================================================
    ``trajectory.csv``            true state and applied input of every agent at every step
    ``step_records.jsonl``        one step record per line
    ``loss_audit.csv``            fate of every offered trajectory message
    ``scenario.json``             canonical scenario document of the run
    ``summary.json``              exit code, latch steps and headline clearances
    ``certification.json``        decrease, gate and collision certificates
    ``top_view.csv``              optional, horizontal positions for plotting
    ``view_3d.csv``               optional, positions and funnel clearance for plotting
    ============================= ====================================================================

    :param str root: folder of the run
    '''
    def __init__(self, root):
        self.root                                   = str(root)

    TRAJECTORY_FILE                                 = "trajectory.csv"
    STEP_RECORDS_FILE                               = "step_records.jsonl"
    LOSS_AUDIT_FILE                                 = "loss_audit.csv"
    SCENARIO_FILE                                   = "scenario.json"
    SUMMARY_FILE                                    = "summary.json"
    CERTIFICATION_FILE                              = "certification.json"
    TOP_VIEW_FILE                                   = "top_view.csv"
    VIEW_3D_FILE                                    = "view_3d.csv"

    def hub_root(self):
        return self.root

    def path(self, filename):
        return _os.path.join(self.root, filename)

    def write_run(self, result, plot_data=False):
        '''
        Persists every artifact of ``result``, certifying it on the way.

        :param RunResult result: outcome of a (possibly partial) run
        :param bool plot_data: also write the plot-data tables
        :return: the certification of the run
        :rtype: CertificationReport
        '''
        Path(self.root).mkdir(parents=True, exist_ok=True)
        JU                                          = JSON_Utils()

        with DataAccessor(self.path(RunHub.TRAJECTORY_FILE)) as ax:
            ax.persist(TRAJECTORY.conform(result.trajectory_df))
        with DataAccessor(self.path(RunHub.LOSS_AUDIT_FILE)) as ax:
            ax.persist(LOSS_AUDIT.conform(result.audit_df))

        record_dicts                                = [rec.to_dict() for rec in result.records]
        JU.save_lines(record_dicts, self.path(RunHub.STEP_RECORDS_FILE))
        JU.save(result.config.to_dict(), self.path(RunHub.SCENARIO_FILE))
        JU.save(result.summary(), self.path(RunHub.SUMMARY_FILE))

        certification                               = certify_run(record_dicts, result.config, result.trajectory_df)
        JU.save(certification.to_dict(), self.path(RunHub.CERTIFICATION_FILE))

        if plot_data:
            top_df, view_df                         = result.plot_tables()
            with DataAccessor(self.path(RunHub.TOP_VIEW_FILE)) as ax:
                ax.persist(top_df)
            with DataAccessor(self.path(RunHub.VIEW_3D_FILE)) as ax:
                ax.persist(view_df)

        if Application.is_initialized():
            Application.app().log("Wrote run artifacts to " + self.root, Logger.LEVEL_INFO)
        return certification

    def require(self):
        '''
        :raises ArtifactError: if the run folder does not exist or holds no step records
        '''
        if not Path(self.root).is_dir():
            raise ArtifactError("Run folder '" + self.root + "' does not exist")
        if not Path(self.path(RunHub.STEP_RECORDS_FILE)).exists():
            raise ArtifactError("Run folder '" + self.root + "' has no " + RunHub.STEP_RECORDS_FILE)

    def load_trajectory(self):
        with DataAccessor(self.path(RunHub.TRAJECTORY_FILE)) as ax:
            trajectory_df                           = ax.retrieve(fail_if_not_found=True)
        TRAJECTORY.validate(trajectory_df)
        return TRAJECTORY.conform(trajectory_df)

    def load_audit(self):
        with DataAccessor(self.path(RunHub.LOSS_AUDIT_FILE)) as ax:
            audit_df                                = ax.retrieve(fail_if_not_found=True)
        # An empty audit reads back without dtypes
        if len(audit_df) > 0:
            LOSS_AUDIT.validate(audit_df)
        return LOSS_AUDIT.conform(audit_df)

    def load_plot_tables(self):
        '''
        :return: pair ``(top_view_df, view_3d_df)``, or None if the run was written without plot data
        '''
        if not Path(self.path(RunHub.TOP_VIEW_FILE)).exists():
            return None
        tables                                      = []
        for schema, filename in [(TOP_VIEW, RunHub.TOP_VIEW_FILE), (VIEW_3D, RunHub.VIEW_3D_FILE)]:
            with DataAccessor(self.path(filename)) as ax:
                data_df                             = ax.retrieve(fail_if_not_found=True)
            schema.validate(data_df)
            tables.append(schema.conform(data_df))
        return tables[0], tables[1]

    def load_records(self):
        '''
        :return: the step records as dictionaries, in step order
        :raises ArtifactError: if a record has another schema version or lacks keys
        '''
        records                                     = JSON_Utils().load_lines(self.path(RunHub.STEP_RECORDS_FILE))
        for rec in records:
            if rec.get("version") != STEP_RECORD_VERSION:
                raise ArtifactError("Step record of version " + str(rec.get("version")) + " in " + self.root
                                    + "; this engine reads version " + str(STEP_RECORD_VERSION))
            missing                                 = [k for k in STEP_RECORD_KEYS if not k in rec.keys()]
            for agent_rec in rec.get("agents", []):
                missing                             += [k for k in AGENT_RECORD_KEYS if not k in agent_rec.keys()]
            if len(missing) > 0:
                raise ArtifactError("Step record " + str(rec.get("t")) + " in " + self.root + " lacks keys "
                                    + str(sorted(set(missing))))
        return records

    def load_config(self):
        return ScenarioConfig.from_dict(JSON_Utils().load(self.path(RunHub.SCENARIO_FILE)))

    def load_summary(self):
        return JSON_Utils().load(self.path(RunHub.SUMMARY_FILE))

    def load_certification(self):
        return JSON_Utils().load(self.path(RunHub.CERTIFICATION_FILE))
