import json

from charbeta.exporters import BaseExporter
from charbeta.results import CoverageReport


class JSONLinesExporter(BaseExporter):
    """One JSON object per cell and line."""

    extension = "jsonl"

    def export(self, report: CoverageReport) -> str:
        self.validate_inputs(report)
        lines = [
            json.dumps({"experiment": report.name, **record}, ensure_ascii=False)
            for record in report.to_records(self.include_timings)
        ]
        return "".join(line + "\n" for line in lines)
