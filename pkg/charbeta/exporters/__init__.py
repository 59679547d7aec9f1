from pathlib import Path
from typing import IO, Union

from charbeta.results import CoverageReport


class BaseExporter:
    """
    Base exporter class with input validation.
    """

    extension = ""

    def __init__(self, include_timings: bool = False):
        self.include_timings = include_timings

    def export(self, report: CoverageReport) -> str:
        """
        Export a coverage report to a string.

        Raises:
            TypeError: If the input is not a CoverageReport
            NotImplementedError: If not implemented by subclass
        """
        raise NotImplementedError("Subclasses must implement export method")

    def stream_export(self, report: CoverageReport, file: IO) -> None:
        file.write(self.export(report))

    def validate_inputs(self, report: CoverageReport) -> None:
        """
        Validate input data for export.

        Raises:
            TypeError: If input types are incorrect
            ValueError: If a cell is inconsistent
        """
        if not isinstance(report, CoverageReport):
            raise TypeError("report must be a CoverageReport")
        for cell in report.cells:
            if cell.covered + cell.misses != cell.trials:
                raise ValueError(
                    f"inconsistent cell {cell.method}/{cell.strength_label}"
                )

    def write(self, report: CoverageReport, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            self.stream_export(report, f)
        return path


from .csv_exporter import CSVExporter  # noqa: E402
from .jsonl_exporter import JSONLinesExporter  # noqa: E402
from .report import emit_report  # noqa: E402

__all__ = ["BaseExporter", "CSVExporter", "JSONLinesExporter", "emit_report"]
