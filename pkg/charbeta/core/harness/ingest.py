"""
Long-format CSV panels: ingestion with validation, and export.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from charbeta.core.harness.models import CsvSchema
from charbeta.core.logging import log_info, log_warning
from charbeta.core.panel.models import IncrementPanel, LocalWindow
from charbeta.core.sieve.models import CharacteristicPanel
from charbeta.exceptions import DataError, DimensionError

HEADER_LINES = 1


@dataclass
class IngestedPanel:
    """Validated arrays from a panel file."""

    panel: IncrementPanel
    characteristics: np.ndarray
    factors: Optional[np.ndarray] = None
    interval_index: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    dropped_assets: tuple[str, ...] = ()

    @property
    def asset_ids(self) -> tuple[str, ...]:
        return self.panel.asset_ids or ()

    def window_characteristics(self, window: LocalWindow) -> CharacteristicPanel:
        """Characteristics observed at the first interval of ``window``."""
        return CharacteristicPanel(self.characteristics[:, :, window.anchor])


def _line_of(frame: pd.DataFrame, position: int) -> int:
    return int(frame.index[position]) + HEADER_LINES + 1


def ingest_csv_panel(
    path: Union[str, Path],
    schema: Optional[CsvSchema] = None,
) -> IngestedPanel:
    """
    Read and validate a long-format panel file.

    Assets keep their order of first appearance; intervals are sorted.

    Raises:
        DataError: On schema violations, NaNs, duplicate or non-monotone
            interval indices, missing asset rows (unless
            ``schema.drop_incomplete``) or factor values that differ across
            assets within an interval
    """
    schema = schema or CsvSchema()
    path = Path(path)
    if not path.exists():
        raise DataError(f"panel file not found: {path}", path=str(path))
    try:
        frame = pd.read_csv(
            path, dtype={"asset_id": str}, float_precision="round_trip"
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot parse {path}: {exc}", path=str(path)) from exc

    expected = schema.columns()
    if list(frame.columns) != expected:
        raise DataError(
            f"columns {list(frame.columns)} do not match the schema {expected}",
            path=str(path),
        )
    if frame.empty:
        raise DataError("panel file has no rows", path=str(path))

    numeric = expected[2:]
    for column in ["interval_index"] + numeric:
        coerced = pd.to_numeric(frame[column], errors="coerce")
        bad = ~np.isfinite(coerced.to_numpy(dtype=float))
        if bad.any():
            pos = int(np.flatnonzero(bad)[0])
            raise DataError(
                f"missing or non-numeric value in column '{column}'",
                row=pos,
                column=column,
                line=_line_of(frame, pos),
                path=str(path),
            )
        frame[column] = coerced
    if frame["asset_id"].isna().any():
        pos = int(np.flatnonzero(frame["asset_id"].isna().to_numpy())[0])
        raise DataError(
            "missing asset_id", row=pos, column="asset_id", line=_line_of(frame, pos)
        )
    if not np.all(frame["interval_index"] == np.round(frame["interval_index"])):
        raise DataError(
            "interval_index must be integer-valued", column="interval_index"
        )
    frame["interval_index"] = frame["interval_index"].astype(int)

    for asset, rows in frame.groupby("asset_id", sort=False).groups.items():
        steps = np.diff(frame.loc[rows, "interval_index"].to_numpy())
        if np.any(steps <= 0):
            pos = frame.index.get_loc(rows[int(np.flatnonzero(steps <= 0)[0]) + 1])
            raise DataError(
                f"interval index of asset '{asset}' is not strictly increasing",
                row=pos,
                column="interval_index",
                line=_line_of(frame, pos),
                path=str(path),
            )

    assets = list(pd.unique(frame["asset_id"]))
    intervals = np.sort(pd.unique(frame["interval_index"]))
    counts = frame.groupby("asset_id", sort=False).size()
    incomplete = [a for a in assets if counts[a] != intervals.size]
    if incomplete:
        if not schema.drop_incomplete:
            first = incomplete[0]
            present = set(frame.loc[frame["asset_id"] == first, "interval_index"])
            missing = [int(i) for i in intervals if i not in present][:5]
            raise DataError(
                f"asset '{first}' is missing intervals {missing} "
                f"({len(incomplete)} incomplete assets)",
                column="interval_index",
                path=str(path),
            )
        log_warning(
            "Dropping incomplete assets",
            {"count": len(incomplete), "assets": incomplete[:10]},
        )
        frame = frame[~frame["asset_id"].isin(incomplete)]
        assets = [a for a in assets if a not in incomplete]
        if not assets:
            raise DataError("no complete assets left", path=str(path))

    def wide(column: str) -> np.ndarray:
        table = frame.pivot(index="asset_id", columns="interval_index", values=column)
        return table.reindex(index=assets, columns=intervals).to_numpy(dtype=float)

    d_y = wide("dY")
    chars = np.stack([wide(c) for c in schema.char_columns()], axis=1)
    factors = None
    if schema.n_factors:
        per_asset = np.stack([wide(c) for c in schema.factor_columns()], axis=1)
        factors = per_asset[0]
        if not np.array_equal(per_asset, np.broadcast_to(factors, per_asset.shape)):
            raise DataError(
                "factor increments differ across assets within an interval",
                column=schema.factor_columns()[0],
                path=str(path),
            )

    panel = IncrementPanel(d_y, schema.delta_n, tuple(assets))
    log_info(
        "Ingested panel",
        {"path": str(path), "p": panel.p, "n": panel.n, "dropped": len(incomplete)},
    )
    return IngestedPanel(panel, chars, factors, intervals, tuple(incomplete))


def export_panel_csv(
    path: Union[str, Path],
    panel: IncrementPanel,
    characteristics: np.ndarray,
    factors: Optional[np.ndarray] = None,
) -> CsvSchema:
    """
    Write a panel in the long format read by ``ingest_csv_panel``.

    ``characteristics`` is p x K_x (constant over time) or p x K_x x n.

    Returns:
        The schema that reads the file back
    """
    p, n = panel.p, panel.n
    chars = np.asarray(characteristics, dtype=float)
    if chars.ndim == 2:
        chars = np.repeat(chars[:, :, None], n, axis=2)
    if chars.shape[0] != p or chars.shape[2] != n:
        raise DimensionError(
            "characteristics must be p x K_x x n",
            expected=(p, "K_x", n),
            received=chars.shape,
        )
    schema = CsvSchema(
        n_chars=chars.shape[1],
        n_factors=0 if factors is None else np.atleast_2d(factors).shape[0],
        delta_n=panel.delta_n,
    )
    ids = panel.asset_ids or tuple(f"A{m:04d}" for m in range(p))
    columns = {
        "interval_index": np.tile(np.arange(1, n + 1), p),
        "asset_id": np.repeat(np.asarray(ids, dtype=object), n),
        "dY": panel.data.reshape(-1),
    }
    for j, name in enumerate(schema.char_columns()):
        columns[name] = chars[:, j, :].reshape(-1)
    if factors is not None:
        f = np.atleast_2d(np.asarray(factors, dtype=float))
        for k, name in enumerate(schema.factor_columns()):
            columns[name] = np.tile(f[k], p)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(columns, columns=schema.columns()).to_csv(path, index=False)
    return schema
