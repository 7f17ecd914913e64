import argparse
import os                                                           as _os
import sys

from rendezvous.analysis.convergence_constants                      import compute_constants
from rendezvous.application.application                             import Application
from rendezvous.application.rendezvous_application                  import RendezvousApplication
from rendezvous.coordinator.rendezvous_coordinator                  import RendezvousCoordinator, RunResult
from rendezvous.database.run_hub                                    import RunHub
from rendezvous.reports.report_writer                               import RunReportWriter
from rendezvous.scenario.scenario_config                            import ScenarioConfig
from rendezvous.util.errors                                         import ConfigurationError, ArtifactError

def _load_config(args):
    if not args.config is None and not args.preset is None:
        raise ConfigurationError("give either --config or --preset, not both")
    if not args.config is None:
        return ScenarioConfig.load(args.config)
    return ScenarioConfig.load_preset("paper-sec6" if args.preset is None else args.preset)

def horizon_advisory(config):
    '''
    :return: one line comparing the horizon with ``N0`` for the configured sandwich constant
    :rtype: str
    '''
    constants                                       = compute_constants(config.follower_Q, config.V_N_max, 1.0,
                                                                        config.horizon, gamma_bar=config.gamma_bar)
    relation                                        = "<" if constants.horizon_exceeds_N0() else ">="
    line                                            = "advisory: N0 = {0:.4g} {1} N = {2}".format(constants.N0, relation,
                                                                                                   config.horizon)
    if not constants.horizon_exceeds_N0():
        line                                        += "; the decrease certificate needs N >= " \
                                                        + str(constants.minimal_horizon_worst())
    return line

def cmd_validate(args):
    '''
    Loads a scenario, checks the landing geometry and prints the horizon advisory.

    :return: 0 if the scenario can be run, 1 otherwise
    '''
    config                                          = _load_config(args)
    report                                          = config.geometry_report()
    print("scenario '" + config.name + "': " + str(config.follower_count) + " followers, horizon "
          + str(config.horizon) + ", dt " + str(config.dt))
    if report.ok():
        print("landing geometry: ok")
    else:
        print(report.describe())
    print(horizon_advisory(config))
    return 0 if report.ok() else 1

def cmd_run(args):
    '''
    Runs a scenario and writes its artifacts. Artifacts of the steps executed so far are written even when the run
    fails.

    :return: the run's exit code
    '''
    config                                          = _load_config(args).with_overrides(seed=args.seed, max_steps=args.steps)
    out                                             = args.out
    if out is None:
        root                                        = Application.app().config.output_root() \
                                                        if Application.is_initialized() else "runs"
        out                                         = _os.path.join(root, config.name)

    coordinator                                     = RendezvousCoordinator(config, worker_threads=args.workers)
    hub                                             = RunHub(out)
    try:
        result                                      = coordinator.run()
    except RuntimeError:
        hub.write_run(coordinator.result(), plot_data=args.plot_data)
        raise

    hub.write_run(result, plot_data=args.plot_data)
    print(RunReportWriter(hub).summary_text())
    return result.exit_code

def cmd_report(args):
    '''
    Prints the summary of a run folder and writes its Excel report next to the artifacts.
    '''
    writer                                          = RunReportWriter(RunHub(args.run_dir))
    print(writer.summary_text())
    if not args.no_xlsx:
        print("report: " + writer.write_workbook())
    return RunResult.EXIT_SUCCESS

def _add_scenario_arguments(parser):
    parser.add_argument("--config", help="TOML scenario document")
    parser.add_argument("--preset", choices=sorted(ScenarioConfig.PRESETS.keys()),
                        help="shipped scenario; paper-sec6 when neither --config nor --preset is given")

def build_parser():
    parser                                          = argparse.ArgumentParser(
                                                        prog        = "rendezvous",
                                                        description = "Distributed MPC rendezvous of quadrotors on a "
                                                                      + "moving landing platform")
    parser.add_argument("--app-config", dest="app_config",
                        help="folder holding a rendezvous_config.toml; the bundled one by default")
    subparsers                                      = parser.add_subparsers(dest="command", required=True)

    validate                                        = subparsers.add_parser("validate", help="check a scenario")
    _add_scenario_arguments(validate)
    validate.set_defaults(handler=cmd_validate)

    run                                             = subparsers.add_parser("run", help="run a scenario")
    _add_scenario_arguments(run)
    run.add_argument("--out", help="run folder; <output_root>/<scenario name> by default")
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--steps", type=int, help="override the step cap")
    run.add_argument("--workers", type=int, help="concurrent solves; from the application config by default")
    run.add_argument("--plot-data", dest="plot_data", action="store_true",
                     help="also write top_view.csv and view_3d.csv")
    run.set_defaults(handler=cmd_run)

    report                                          = subparsers.add_parser("report", help="summarize a run folder")
    report.add_argument("run_dir", help="folder written by 'rendezvous run'")
    report.add_argument("--no-xlsx", dest="no_xlsx", action="store_true", help="skip report.xlsx")
    report.set_defaults(handler=cmd_report)
    return parser

def main(argv=None):
    '''
    Entry point of the ``rendezvous`` command.

    :return: process exit code: 0 success, 1 usage or configuration error, 2 step cap hit, 3 safety abort,
        4 certificate failed after all followers latched
    :rtype: int
    '''
    args                                            = build_parser().parse_args(argv)
    try:
        if not Application.is_initialized():
            RendezvousApplication(config_path=args.app_config)
        return args.handler(args)
    except (ConfigurationError, ArtifactError) as ex:
        print("error: " + str(ex), file=sys.stderr)
        return RunResult.EXIT_ERROR

if __name__ == "__main__":
    sys.exit(main())
