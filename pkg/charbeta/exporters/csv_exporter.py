import pandas as pd

from charbeta.exporters import BaseExporter
from charbeta.results import CoverageReport


class CSVExporter(BaseExporter):
    """Coverage table, one row per (method, strength) cell."""

    extension = "csv"

    def export(self, report: CoverageReport) -> str:
        self.validate_inputs(report)
        frame = pd.DataFrame(
            report.to_records(self.include_timings),
            columns=report.columns(self.include_timings),
        )
        return frame.to_csv(index=False, lineterminator="\n")
