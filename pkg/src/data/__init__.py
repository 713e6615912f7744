"""
Data Module

CSV ingestion and deterministic report emission.
"""

from .ingestion import (
    BASE_COLUMNS,
    DISAGG_COLUMNS,
    OPTIONAL_COLUMNS,
    ObservationRecord,
    ObservationTable,
    ingest_csv,
    read_rate_samples,
)
from .reports import (
    DISCREPANCY_NOTES,
    Report,
    render,
    render_csv,
    render_json,
    render_text,
    write_output,
    write_plot_data,
)

__all__ = [
    "BASE_COLUMNS",
    "DISAGG_COLUMNS",
    "OPTIONAL_COLUMNS",
    "ObservationRecord",
    "ObservationTable",
    "ingest_csv",
    "read_rate_samples",
    "DISCREPANCY_NOTES",
    "Report",
    "render",
    "render_csv",
    "render_json",
    "render_text",
    "write_output",
    "write_plot_data",
]
