"""
Return Series CSV Loader
Reads a comma-delimited return file into a ReturnSeries with line-numbered errors
Returns are taken as given: no log-return transform and no rescaling is applied
"""

import io
import logging
import re
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from backend.exceptions import DataError, ParameterError
from backend.sagarch_model import SCALE_HINTS, ReturnSeries

logger = logging.getLogger(__name__)

RETURN_COLUMN = "return"
UNIT_PATTERN = re.compile(r"^#\s*unit\s*:\s*(\S+)\s*$", re.IGNORECASE)


class ReturnCsvLoader:
    """
    Loads one return column from a CSV file
    Think of this as the intake desk: it decides which column is the series and
    refuses anything it cannot parse, pointing at the offending lines
    """

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self.scale_hint = "raw"
        self.column: Optional[str] = None

    def load(self) -> ReturnSeries:
        text = self._read_text()
        data_lines = self._scan(text)
        frame = self._parse(text)
        if frame.empty:
            raise DataError(f"{self.path} has a header but no data rows")
        if len(frame) != len(data_lines):
            raise DataError(f"{self.path}: could not align rows with file lines")

        self.column = self._select_column(frame)
        values = self._coerce(frame[self.column], data_lines)
        try:
            series = ReturnSeries(values, scale_hint=self.scale_hint)
        except ParameterError as err:
            raise DataError(f"{self.path}: {err}") from err
        logger.info(f"Loaded {len(series)} returns from {self.path} (column {self.column!r}, unit {self.scale_hint})")
        return series

    def _read_text(self) -> str:
        try:
            text = self.path.read_text(encoding="utf-8")
        except FileNotFoundError as err:
            raise DataError(f"input file not found: {self.path}") from err
        except (OSError, UnicodeDecodeError) as err:
            raise DataError(f"cannot read {self.path}: {err}") from err
        if not text.strip():
            raise DataError(f"{self.path} is empty")
        return text

    def _scan(self, text: str) -> List[int]:
        """Pick up the unit comment; return 1-based line numbers of the data rows"""
        data_lines: List[int] = []
        header_seen = False
        for number, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                match = UNIT_PATTERN.match(stripped)
                if match:
                    self.scale_hint = self._unit(match.group(1), number)
                continue
            if header_seen:
                data_lines.append(number)
            else:
                header_seen = True
        return data_lines

    @staticmethod
    def _unit(value: str, line: int) -> str:
        unit = value.lower()
        if unit not in SCALE_HINTS:
            raise DataError(f"unknown unit {value!r}; expected one of {SCALE_HINTS}", lines=[line])
        return unit

    def _parse(self, text: str) -> pd.DataFrame:
        try:
            return pd.read_csv(
                io.StringIO(text),
                comment="#",
                dtype=str,
                skip_blank_lines=True,
                skipinitialspace=True,
            )
        except pd.errors.EmptyDataError as err:
            raise DataError(f"{self.path} has no header row") from err
        except pd.errors.ParserError as err:
            raise DataError(f"{self.path}: {err}") from err

    def _select_column(self, frame: pd.DataFrame) -> str:
        named = [col for col in frame.columns if str(col).strip().lower() == RETURN_COLUMN]
        if len(named) == 1:
            return named[0]
        if len(named) > 1:
            raise DataError(f"{self.path} has more than one {RETURN_COLUMN!r} column")

        numeric = [col for col in frame.columns if self._mostly_numeric(frame[col])]
        if len(numeric) == 1:
            return numeric[0]
        if not numeric:
            raise DataError(f"{self.path} has no {RETURN_COLUMN!r} column and no numeric column")
        raise DataError(
            f"{self.path} is ambiguous: numeric columns {', '.join(map(str, numeric))} and no {RETURN_COLUMN!r} header"
        )

    @staticmethod
    def _mostly_numeric(column: pd.Series) -> bool:
        parsed = pd.to_numeric(column.str.strip(), errors="coerce")
        return bool(parsed.notna().mean() > 0.5)

    def _coerce(self, column: pd.Series, data_lines: List[int]) -> np.ndarray:
        parsed = pd.to_numeric(column.str.strip(), errors="coerce").to_numpy(dtype=float)
        bad = np.flatnonzero(~np.isfinite(parsed))
        if bad.size:
            lines = [data_lines[i] for i in bad]
            logger.error(f"{self.path}: {bad.size} non-numeric or non-finite value(s) in column {column.name!r}")
            raise DataError(f"{self.path}: non-numeric or non-finite return", lines=lines)
        return parsed


# Quick helper functions
def ingest_csv(path: Union[str, Path]) -> ReturnSeries:
    """Parse a return CSV into a ReturnSeries"""
    return ReturnCsvLoader(path).load()


def write_series_csv(series: ReturnSeries, path: Union[str, Path]) -> Tuple[Path, int]:
    """Write a series as '# unit: ...' plus a single 'return' column; 17 significant digits"""
    path = Path(path)
    lines = [f"# unit: {series.scale_hint}", RETURN_COLUMN]
    lines.extend(f"{value:.17g}" for value in series.values)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path, len(series)
