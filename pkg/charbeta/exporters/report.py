from pathlib import Path
from typing import Iterable, Union

from charbeta.core.logging import log_info
from charbeta.exceptions import ConfigurationError
from charbeta.exporters.csv_exporter import CSVExporter
from charbeta.exporters.jsonl_exporter import JSONLinesExporter
from charbeta.results import CoverageReport

EXPORTERS = {"csv": CSVExporter, "jsonl": JSONLinesExporter}


def emit_report(
    report: CoverageReport,
    output_dir: Union[str, Path],
    formats: Iterable[str] = ("csv", "jsonl"),
    include_timings: bool = False,
) -> list[Path]:
    """
    Write ``<name>.csv`` and/or ``<name>.jsonl`` under ``output_dir``.

    Timing columns are left out unless requested, so reruns with the same
    seed produce identical files.

    Raises:
        ConfigurationError: On an unknown format or an unwritable directory
    """
    paths = []
    for fmt in formats:
        if fmt not in EXPORTERS:
            raise ConfigurationError(
                f"unknown report format '{fmt}'",
                config_field="formats",
                provided_value=fmt,
                expected=", ".join(EXPORTERS),
            )
        exporter = EXPORTERS[fmt](include_timings=include_timings)
        path = Path(output_dir) / f"{report.name}.{exporter.extension}"
        try:
            paths.append(exporter.write(report, path))
        except OSError as exc:
            raise ConfigurationError(
                f"cannot write report to {path}: {exc}", config_field="output_dir"
            ) from exc
    log_info("Report written", {"paths": [str(p) for p in paths]})
    return paths
