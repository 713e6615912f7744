"""
CSV Ingestion Module

Reads per-year observation tables. Cells are read as text and parsed with
Decimal so that column totals can be computed exactly; row numbers in errors
are file line numbers (the header is line 1).

Schema (decimal point '.', no thousands separators, UTF-8):
    required   year, y_current, y_potential, revenue, expenditure
    optional   eps_v, eps_c                       per-row elasticity overrides
               t1..t4, eps_t1..eps_t4             revenue categories (disagg)
               x_term, u_current, u_structural, eps_c_u
               debt_ratio                         for compliance checks
Any other column is kept as a numeric extra.
"""

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import ValidationError

from ..analytics.balance_core import Elasticities, FiscalObservation
from ..analytics.disaggregate import DisaggregateInputs, RevenueCategory
from ..utils.errors import IngestionError
from ..utils.logging_config import get_logger

logger = get_logger("data.ingestion")

BASE_COLUMNS = ("year", "y_current", "y_potential", "revenue", "expenditure")
REVENUE_COLUMNS = ("t1", "t2", "t3", "t4")
REVENUE_ELASTICITY_COLUMNS = ("eps_t1", "eps_t2", "eps_t3", "eps_t4")
DISAGG_COLUMNS = REVENUE_COLUMNS + ("u_current", "u_structural")
OPTIONAL_COLUMNS = (
    ("eps_v", "eps_c")
    + REVENUE_COLUMNS
    + REVENUE_ELASTICITY_COLUMNS
    + ("x_term", "u_current", "u_structural", "eps_c_u", "debt_ratio")
)

HEADER_LINES = 1


@dataclass(frozen=True)
class ObservationRecord:
    """One validated CSV row."""

    row: int
    observation: FiscalObservation
    optional: dict[str, float | None]
    extras: dict[str, float | None]
    raw: dict[str, str]

    @property
    def year(self) -> int:
        return self.observation.period

    def get(self, column: str) -> float | None:
        if column in self.optional:
            return self.optional[column]
        return self.extras.get(column)


@dataclass(frozen=True)
class ObservationTable:
    """Ordered per-year records with strictly increasing years."""

    columns: tuple[str, ...]
    records: tuple[ObservationRecord, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def require(self, columns: Iterable[str]) -> None:
        """
        Ensure columns exist and are filled on every row.

        Raises:
            IngestionError: Column missing or empty on some row.
        """
        for column in columns:
            if column not in self.columns:
                raise IngestionError("missing required column", column=column)
            for record in self.records:
                if record.get(column) is None:
                    raise IngestionError("empty required cell", row=record.row, column=column)

    def observations(self) -> list[FiscalObservation]:
        return [record.observation for record in self.records]

    def elasticities_for(self, record: ObservationRecord, defaults: Elasticities) -> Elasticities:
        """Row-level eps_v / eps_c override the defaults when present."""
        eps_v = record.get("eps_v")
        eps_c = record.get("eps_c")
        return Elasticities(
            epsilon_v=defaults.epsilon_v if eps_v is None else eps_v,
            epsilon_c=defaults.epsilon_c if eps_c is None else eps_c,
        )

    def disaggregate_inputs(self, record: ObservationRecord) -> DisaggregateInputs:
        """
        Assemble disaggregate-method inputs for one row.

        Missing elasticities and x_term default to zero.

        Raises:
            IngestionError: Required disaggregate cells missing or invalid.
        """
        for column in DISAGG_COLUMNS:
            if record.get(column) is None:
                raise IngestionError("empty required cell", row=record.row, column=column)

        revenues = tuple(
            RevenueCategory(amount=record.get(t) or 0.0, elasticity=record.get(eps) or 0.0)
            for t, eps in zip(REVENUE_COLUMNS, REVENUE_ELASTICITY_COLUMNS, strict=True)
        )
        obs = record.observation
        try:
            return DisaggregateInputs(
                revenues=revenues,
                expenditure=obs.expenditure,
                expenditure_elasticity=record.get("eps_c_u") or 0.0,
                x_term=record.get("x_term") or 0.0,
                y_current=obs.y_current,
                y_potential=obs.y_potential,
                u_current=record.get("u_current"),
                u_structural=record.get("u_structural"),
            )
        except ValidationError as e:
            raise IngestionError(
                f"invalid disaggregate inputs: {_first_error(e)}", row=record.row
            ) from e

    def column_total(self, column: str) -> Decimal:
        """
        Exact decimal sum of a column as written in the file.

        Raises:
            IngestionError: Unknown column.
        """
        if column not in self.columns:
            raise IngestionError("unknown column", column=column)
        return sum(
            (Decimal(record.raw[column]) for record in self.records if record.raw.get(column)),
            Decimal(0),
        )


def _first_error(e: ValidationError) -> str:
    error = e.errors()[0]
    location = ".".join(str(part) for part in error.get("loc", ()))
    return f"{location}: {error.get('msg')}" if location else str(error.get("msg"))


def _parse_decimal(text: str, row: int, column: str) -> Decimal:
    # Decimal() accepts PEP 515 digit grouping
    if "_" in text:
        raise IngestionError(f"non-numeric cell '{text}'", row=row, column=column)
    try:
        value = Decimal(text)
    except InvalidOperation as e:
        raise IngestionError(f"non-numeric cell '{text}'", row=row, column=column) from e
    if not value.is_finite():
        raise IngestionError(f"non-finite cell '{text}'", row=row, column=column)
    return value


def _cell_text(value: object) -> str:
    return "" if pd.isna(value) else str(value).strip()


def _data_rows(frame: pd.DataFrame) -> Iterator[tuple[int, dict[str, str]]]:
    """
    Yield (file line, stripped cells) per data row.

    The frame must be read with skip_blank_lines=False: blank lines still
    advance the line count but are not yielded.
    """
    for index, raw_row in enumerate(frame.to_dict(orient="records")):
        raw = {str(column): _cell_text(value) for column, value in raw_row.items()}
        if all(text == "" for text in raw.values()):
            continue
        yield index + HEADER_LINES + 1, raw


def _parse_year(text: str, row: int) -> int:
    value = _parse_decimal(text, row, "year")
    if value != value.to_integral_value():
        raise IngestionError(f"year must be an integer, got '{text}'", row=row, column="year")
    return int(value)


def ingest_csv(path: str | Path) -> ObservationTable:
    """
    Read and validate an observation table.

    Args:
        path: CSV file path.

    Returns:
        ObservationTable with one record per data row.

    Raises:
        IngestionError: Unreadable file, missing required column, non-numeric
            cell, invalid observation, duplicate or decreasing year.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"file not found: {path}")

    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            skipinitialspace=True,
            encoding="utf-8",
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise IngestionError(f"cannot parse {path}: {e}") from e

    frame.columns = [str(column).strip() for column in frame.columns]
    columns = tuple(frame.columns)

    for column in BASE_COLUMNS:
        if column not in columns:
            raise IngestionError("missing required column", column=column)

    records: list[ObservationRecord] = []
    previous_year: int | None = None

    for row, raw in _data_rows(frame):
        for column in BASE_COLUMNS:
            if raw[column] == "":
                raise IngestionError("empty required cell", row=row, column=column)

        year = _parse_year(raw["year"], row)
        if previous_year is not None and year == previous_year:
            raise IngestionError(f"duplicate year {year}", row=row, column="year")
        if previous_year is not None and year < previous_year:
            raise IngestionError(f"year {year} is not increasing", row=row, column="year")
        previous_year = year

        try:
            observation = FiscalObservation(
                period=year,
                y_current=float(_parse_decimal(raw["y_current"], row, "y_current")),
                y_potential=float(_parse_decimal(raw["y_potential"], row, "y_potential")),
                revenue=float(_parse_decimal(raw["revenue"], row, "revenue")),
                expenditure=float(_parse_decimal(raw["expenditure"], row, "expenditure")),
            )
        except ValidationError as e:
            raise IngestionError(f"invalid observation: {_first_error(e)}", row=row) from e

        optional: dict[str, float | None] = {}
        extras: dict[str, float | None] = {}
        for column in columns:
            if column in BASE_COLUMNS:
                continue
            text = raw[column]
            value = None if text == "" else float(_parse_decimal(text, row, column))
            if column in OPTIONAL_COLUMNS:
                optional[column] = value
            else:
                extras[column] = value

        records.append(
            ObservationRecord(
                row=row,
                observation=observation,
                optional=optional,
                extras=extras,
                raw=raw,
            )
        )

    logger.info(f"Ingested {len(records)} rows from {path}")
    return ObservationTable(columns=columns, records=tuple(records))


def read_rate_samples(path: str | Path, times: np.ndarray) -> np.ndarray:
    """
    Read rate-of-action samples K for a sampling grid.

    The file needs a `K` column with one value per grid point. An optional
    `t` column must match the grid.

    Raises:
        IngestionError: Unreadable file, missing column, bad cell or grid mismatch.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"file not found: {path}")

    try:
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, skip_blank_lines=False, skipinitialspace=True
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise IngestionError(f"cannot parse {path}: {e}") from e

    frame.columns = [str(column).strip() for column in frame.columns]
    if "K" not in frame.columns:
        raise IngestionError("missing required column", column="K")
    samples = list(_data_rows(frame))
    if len(samples) != len(times):
        raise IngestionError(f"{len(samples)} rate samples for a grid of {len(times)} points")

    rates = np.empty(len(samples))
    for index, (row, raw) in enumerate(samples):
        rates[index] = float(_parse_decimal(raw["K"], row, "K"))
        if "t" in raw:
            t = float(_parse_decimal(raw["t"], row, "t"))
            if not np.isclose(t, times[index], rtol=0.0, atol=1e-9):
                raise IngestionError(
                    f"time {t!r} does not match grid point {times[index]!r}", row=row, column="t"
                )

    logger.info(f"Read {len(rates)} rate samples from {path}")
    return rates
