"""
Export module for CSV and Excel output.

Curve reports are CSV files preceded by a block of "# key: value" lines.
Floats are written with repr, so a report read back and written again is
byte-identical.
"""

import csv
import io
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import ConfigError
from point_process import Realization

try:
    from openpyxl import Workbook
    from openpyxl.styles import Alignment, Font, PatternFill
    OPENPYXL_AVAILABLE = True
except ImportError:
    OPENPYXL_AVAILABLE = False
    Workbook = None  # type: ignore
    Font = None  # type: ignore
    PatternFill = None  # type: ignore
    Alignment = None  # type: ignore

logger = logging.getLogger(__name__)

TOOL_VERSION = "1.0.0"
HEADER_PREFIX = "# "

Cell = Union[float, str]


def format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def parse_cell(text: str) -> Cell:
    """Inverse of format_cell for floats; anything that would not re-emit identically stays text."""
    try:
        value = float(text)
    except ValueError:
        return text
    return value if repr(value) == text else text


@dataclass
class CurveReport:
    """
    Tabular result of a command with its run metadata.

    Rows are kept sorted by the first column (the SINR threshold for curve
    commands).
    """
    command: str
    columns: Tuple[str, ...]
    rows: List[Tuple[Cell, ...]]
    metadata: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ConfigError(f"row has {len(row)} cells for {len(self.columns)} columns")
        self.rows = sorted((tuple(r) for r in self.rows), key=_sort_key)
        for key, value in self.metadata.items():
            if ":" in key or "\n" in key or "\n" in str(value):
                raise ConfigError(f"metadata entry {key!r} cannot be written to a header line")
        self.metadata = {k: str(v) for k, v in self.metadata.items()}

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([float(r[i]) for r in self.rows])

    def to_csv_text(self) -> str:
        buffer = io.StringIO()
        buffer.write(f"{HEADER_PREFIX}command: {self.command}\n")
        for key, value in self.metadata.items():
            buffer.write(f"{HEADER_PREFIX}{key}: {value}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(v) for v in row])
        return buffer.getvalue()

    @classmethod
    def from_csv_text(cls, text: str) -> "CurveReport":
        lines = text.splitlines(keepends=True)
        metadata: Dict[str, str] = {}
        command = None
        body_start = 0
        for body_start, line in enumerate(lines):
            if not line.startswith(HEADER_PREFIX):
                break
            key, sep, value = line[len(HEADER_PREFIX):].rstrip("\n").partition(": ")
            if not sep:
                raise ConfigError(f"malformed header line {body_start + 1}: {line.rstrip()!r}",
                                  line=body_start + 1, column=1)
            if key == "command":
                command = value
            else:
                metadata[key] = value
        else:
            body_start = len(lines)
        if command is None:
            raise ConfigError("report has no command header")
        reader = csv.reader(io.StringIO("".join(lines[body_start:])))
        table = list(reader)
        if not table:
            raise ConfigError("report has no column header")
        rows = [tuple(parse_cell(c) for c in r) for r in table[1:]]
        return cls(command, tuple(table[0]), rows, metadata)


def _sort_key(row: Tuple[Cell, ...]):
    first = row[0]
    if isinstance(first, str):
        return (1, 0.0, first)
    return (0, float(first), "")


def _ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_report(report: CurveReport, output_path: str):
    """Write a CurveReport as CSV."""
    _ensure_parent(output_path)
    with open(output_path, "w", newline="", encoding="utf-8") as f:
        f.write(report.to_csv_text())
    logger.info("[EXPORT] wrote %d rows to %s", len(report.rows), output_path)


def read_report(input_path: str) -> CurveReport:
    with open(input_path, "r", newline="", encoding="utf-8") as f:
        return CurveReport.from_csv_text(f.read())


def export_to_xlsx(report: CurveReport, output_path: str) -> bool:
    """
    Write the report table and its metadata to an Excel workbook.

    Returns:
        False (after a warning) when openpyxl is not installed
    """
    if not OPENPYXL_AVAILABLE:
        logger.warning("[EXPORT] openpyxl not installed; skipping %s", output_path)
        return False

    _ensure_parent(output_path)
    wb = Workbook()
    wb.remove(wb.active)
    _create_sheet(wb, "curve", report.columns, [[_xlsx_value(v) for v in r] for r in report.rows])
    meta = [("command", report.command)] + list(report.metadata.items())
    _create_sheet(wb, "run", ("key", "value"), meta)
    wb.save(output_path)
    logger.info("[EXPORT] wrote workbook %s", output_path)
    return True


def _xlsx_value(value: Cell):
    # Excel has no representation for inf/nan
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def _create_sheet(wb, sheet_name: str, fieldnames: Sequence[str], rows: Sequence[Sequence]):
    """Create a sheet with a styled header row."""
    ws = wb.create_sheet(title=sheet_name)

    header_fill = PatternFill(start_color="366092", end_color="366092", fill_type="solid")
    header_font = Font(bold=True, color="FFFFFF")
    for col, name in enumerate(fieldnames, start=1):
        cell = ws.cell(row=1, column=col, value=name)
        cell.fill = header_fill
        cell.font = header_font
        cell.alignment = Alignment(horizontal="center", vertical="center")

    for row_idx, values in enumerate(rows, start=2):
        for col, value in enumerate(values, start=1):
            cell = ws.cell(row=row_idx, column=col, value=value)
            if isinstance(value, float):
                cell.number_format = "0.000000E+00"

    for col in range(1, len(fieldnames) + 1):
        column_letter = ws.cell(row=1, column=col).column_letter
        max_length = max(len(str(c.value)) for c in ws[column_letter] if c.value is not None)
        ws.column_dimensions[column_letter].width = min(max_length + 2, 50)


def export_samples(by_trial: np.ndarray, output_path: str):
    """Raw per-trial SINR values; discarded trials are written as nan."""
    _ensure_parent(output_path)
    with open(output_path, "w", newline="", encoding="utf-8") as csvfile:
        writer = csv.DictWriter(csvfile, fieldnames=["trial_index", "sinr"], lineterminator="\n")
        writer.writeheader()
        for i, value in enumerate(np.asarray(by_trial, dtype=float)):
            writer.writerow({"trial_index": i, "sinr": repr(float(value))})
    logger.info("[EXPORT] wrote %d samples to %s", len(by_trial), output_path)


def export_realizations(realizations: Iterable[Tuple[int, Realization]], output_path: str) -> int:
    """
    Dump interferer positions, one row per point.

    Args:
        realizations: (trial_index, realization) pairs
        output_path: CSV path

    Returns:
        Number of points written
    """
    _ensure_parent(output_path)
    written = 0
    with open(output_path, "w", newline="", encoding="utf-8") as csvfile:
        writer = csv.DictWriter(csvfile, fieldnames=["trial_index", "point_index", "x", "y"],
                                lineterminator="\n")
        writer.writeheader()
        for trial_index, realization in realizations:
            for point_index, (x, y) in enumerate(realization.positions):
                writer.writerow({"trial_index": trial_index, "point_index": point_index,
                                 "x": repr(float(x)), "y": repr(float(y))})
                written += 1
    logger.info("[EXPORT] wrote %d points to %s", written, output_path)
    return written


def report_metadata(config_hash: str, seed: Optional[int] = None, trials: Optional[int] = None,
                    runtime: Optional[float] = None, **summary) -> Dict[str, str]:
    """Header block in a fixed key order; None entries are left out."""
    entries = [("config_hash", config_hash), ("seed", seed), ("trials", trials)]
    entries += sorted(summary.items())
    entries += [("runtime_s", None if runtime is None else f"{runtime:.3f}"),
                ("tool_version", TOOL_VERSION)]
    return {k: format_cell(v) for k, v in entries if v is not None}
