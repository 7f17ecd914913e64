import pandas                                                      as _pd
import xlsxwriter

from rendezvous.application.application                             import Application
from rendezvous.observability.logger                                import Logger
from rendezvous.util.dataframe_utils                                import DataFrameUtils

class ReportWriter():

    def __init__(self):
        '''
        Utilities leveraged in the creation of multiple reports
        '''

    def populate_excel_worksheet(self, report_df, workbook, worksheet,
                                    widths_dict = {}, freeze_row_nb=1, freeze_col_nb=1):
        '''
        Helper function to format nicely a report (i.e., set Excel column widths, colors for column headers, and other
        such formatting)
        '''
        DFU                                             = DataFrameUtils()
        clean_df                                        = DFU.re_index(report_df)
        columns                                         = list(clean_df.columns)
        # Set column widths
        for jdx in range(len(columns)):
            header                                      = columns[jdx]
            width                                       = widths_dict.get(header, 14)
            worksheet.set_column(jdx, jdx, width)

        ROOT_FMT                                        = {'text_wrap': True, 'valign': 'top', 'border': True,
                                                           'border_color': Palette.WHITE}
        HEADER_FMT                                      = ROOT_FMT | {'bold': True, 'font_color': Palette.WHITE,
                                                                        'align': 'center','border_color': Palette.WHITE,
                                                                        'right': True, 'fg_color':     Palette.DARK_BLUE}
        header_fmt                                      = workbook.add_format(HEADER_FMT)
        even_fmt                                        = workbook.add_format(ROOT_FMT | {'bg_color': Palette.LIGHT_BLUE})
        odd_fmt                                         = workbook.add_format(ROOT_FMT)

        for jdx in range(len(columns)):
            worksheet.write(0, jdx, str(columns[jdx]), header_fmt)

        for row_nb, row_content in clean_df.iterrows():
            xl_row                                      = row_nb + 1 # Add 1 since header already took 1 row
            fmt                                         = even_fmt if row_nb % 2 == 0 else odd_fmt
            for jdx in range(len(columns)):
                col                                     = columns[jdx]
                val                                     = row_content[col]
                if DFU.is_nan(val) or val is None:
                    worksheet.write_blank(xl_row, jdx, None, fmt)
                    continue
                try:
                    worksheet.write(xl_row, jdx, val, fmt)
                except Exception as ex:
                    if Application.is_initialized():
                        Application.app().log("Unable to write value '" + str(val) + "'"
                                              + " at row=" + str(xl_row) + ", column=" + str(col)
                                              + "\nFor reference the columns are '"
                                              + "', '".join([str(c) for c in columns]),
                                              log_level = Logger.LEVEL_INFO)
                    raise ex

        # Freeze panes & set zoom to 85%
        worksheet.freeze_panes(freeze_row_nb, freeze_col_nb)
        worksheet.set_zoom(85)

class RunReportWriter(ReportWriter):

    '''
    Human-readable report of a run folder: a text summary for the console, and an Excel workbook with the summary,
    the latch steps, the safety gate trace and the realized clearances per step.

    :param RunHub hub: the run folder
    '''
    def __init__(self, hub):
        super().__init__()
        hub.require()
        self.hub                                    = hub
        self.summary                                = hub.load_summary()
        self.certification                          = hub.load_certification()
        self.records                                = hub.load_records()

    WORKBOOK_FILE                                   = "report.xlsx"

    def summary_text(self):
        '''
        :rtype: str
        '''
        s                                           = self.summary
        c                                           = self.certification
        gate                                        = c["safety_gate"]
        collision                                   = c["collision"]
        constants                                   = c["constants"]

        lines                                       = ["Scenario '" + s["scenario"] + "': exit code "
                                                       + str(s["exit_code"]) + " after " + str(s["steps"]) + " steps"]
        lines.append("collision-free: " + ("yes" if collision["passed"] else "no")
                     + " (min h_ij = " + _fmt(collision["min_pairwise"])
                     + ", min h_C = " + _fmt(collision["min_funnel"]) + ")")
        verdict                                     = "pass" if gate["passed"] else "fail"
        lines.append("safety gate: " + verdict + " (lambda_max<" + _fmt(gate["max_lambda"], 3)
                     + " vs " + _fmt(gate["threshold"], 3) + ", " + str(gate["failures"]) + " failing steps)")
        latches                                     = [agent + "=" + ("-" if step is None else str(step))
                                                       for agent, step in s["latch_steps"].items()]
        lines.append("latch steps: " + ", ".join(latches))
        lines.append("Lyapunov violations: " + str(c["lyapunov_violations"]) + " (sandwich: "
                     + str(c["sandwich_violations"]) + ", cost convention " + c["cost_convention"] + ")")
        lines.append("rho_hat: " + _fmt(c["rho_hat"]) + ", alpha_N: " + _fmt(constants["alpha_n"])
                     + ", N0: " + _fmt(constants["N0"]) + " vs N = " + str(constants["N"]))
        lines.append("predictor-filled reference entries: " + str(s["predicted_entries"]))
        return "\n".join(lines)

    def gate_df(self):
        rows                                        = [[rec["t"], rec["gate"]["lambda_max"], rec["gate"]["threshold"],
                                                        rec["gate"]["passed"], rec["gate"]["margin"]]
                                                       for rec in self.records if not rec["gate"] is None]
        return _pd.DataFrame(rows, columns=["t", "lambda_max", "threshold", "passed", "margin"])

    def clearance_df(self):
        rows                                        = []
        for rec in self.records:
            funnel                                  = list(rec["min_funnel"].values())
            rows.append([rec["t"], rec["min_pairwise"], min(funnel) if len(funnel) > 0 else None,
                         len(rec["broadcasts"])])
        return _pd.DataFrame(rows, columns=["t", "min_h_ij", "min_h_C", "broadcasts"])

    def write_workbook(self, path=None):
        '''
        :param str path: defaults to ``report.xlsx`` inside the run folder
        :return: the path written
        '''
        if path is None:
            path                                    = self.hub.path(RunReportWriter.WORKBOOK_FILE)

        summary_df                                  = _pd.DataFrame([[line] for line in self.summary_text().split("\n")],
                                                                    columns=["summary"])
        latch_df                                    = _pd.DataFrame([[agent, step] for agent, step
                                                                     in self.summary["latch_steps"].items()],
                                                                    columns=["agent", "latch_step"])
        workbook                                    = xlsxwriter.Workbook(path)
        try:
            for name, data_df, widths in [("Summary", summary_df, {"summary": 90}),
                                          ("Latch", latch_df, {}),
                                          ("Gate", self.gate_df(), {}),
                                          ("Clearance", self.clearance_df(), {})]:
                worksheet                           = workbook.add_worksheet(name)
                self.populate_excel_worksheet(data_df, workbook, worksheet, widths_dict=widths, freeze_col_nb=0)
        finally:
            workbook.close()
        return path

def _fmt(value, digits=4):
    return "n/a" if value is None else ("{0:." + str(digits) + "g}").format(value)

class Palette():

    DARK_BLUE                   = '#0070C0'
    LIGHT_BLUE                  = "#E1F2FF"
    WHITE                       = '#FFFFFF'
