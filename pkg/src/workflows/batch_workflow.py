"""
Batch Workflow Module

Per-row evaluation of an observation table. Rows are computed in parallel
with a ThreadPoolExecutor and collected back in input order, so the pool
never changes what ends up in a report.
"""

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

from pydantic import ValidationError

from ..analytics.balance_core import (
    Elasticities,
    FiscalObservation,
    cyclical_closed_forms,
    decompose,
    fp_compliance,
    output_gap,
    sfa_from_deltas,
)
from ..analytics.disaggregate import DisaggregateInputs, disaggregate_breakdown
from ..data.ingestion import DISAGG_COLUMNS, ObservationRecord, ObservationTable
from ..utils.config_loader import RunConfig
from ..utils.errors import FiscalDomainError, FiscalError
from ..utils.logging_config import get_logger

logger = get_logger("workflows.batch")

RowTask = Callable[[ObservationTable, ObservationRecord], dict]


def balance_values(obs: FiscalObservation, el: Elasticities) -> dict:
    """Report row of the aggregate decomposition for one observation."""
    decomposition = decompose(obs, el)
    values = {
        "y_current": obs.y_current,
        "y_potential": obs.y_potential,
        "revenue": obs.revenue,
        "expenditure": obs.expenditure,
        "eps_v": el.epsilon_v,
        "eps_c": el.epsilon_c,
        "gap": output_gap(obs),
        "sbc": decomposition.sbc,
        "sbs": decomposition.sbs,
        "sbc_cyclical": decomposition.sbc_cyclical,
    }
    # Closed-form cross-checks only exist for the simplified elasticities
    if el.epsilon_v == 1.0 and el.epsilon_c == 0.0:
        first, second = cyclical_closed_forms(obs)
        values.update(cyclical_closed_form=first, cyclical_gap_form=second)
    return values


def disaggregate_values(inputs: DisaggregateInputs) -> dict:
    """Report row of the disaggregate method: adjusted items, level and ratio."""
    breakdown = disaggregate_breakdown(inputs)
    values = {f"adjusted_t{i}": amount for i, amount in enumerate(breakdown.adjusted_revenues, 1)}
    values.update(
        adjusted_expenditure=breakdown.adjusted_expenditure,
        x_term=breakdown.x_term,
        level=breakdown.level,
        ratio=breakdown.ratio,
    )
    return values


def compliance_values(
    obs: FiscalObservation,
    el: Elasticities,
    debt_ratio: float,
    config: RunConfig,
) -> dict:
    """Report row of the fiscal rule check with thresholds taken from config."""
    verdict = fp_compliance(
        decompose(obs, el),
        obs.y_current,
        debt_ratio,
        relaxation_threshold=config.relaxation_threshold,
        deficit_limit=config.deficit_limit,
        structural_limit=config.structural_limit,
        relaxed_structural_limit=config.relaxed_structural_limit,
    )
    return {**verdict.model_dump(), "compliant": verdict.compliant}


@dataclass
class YearResult:
    """Outcome of evaluating one table row."""

    year: int
    row: int
    success: bool
    values: dict = field(default_factory=dict)
    error: FiscalError | None = None

    def to_dict(self) -> dict:
        return {"year": self.year, **self.values}


@dataclass
class BatchResult:
    """Ordered per-row results of one batch run."""

    results: list[YearResult]

    @property
    def failures(self) -> list[YearResult]:
        return [r for r in self.results if not r.success]

    def raise_first_failure(self) -> None:
        """Re-raise the error of the earliest failing row, if any."""
        for result in self.results:
            if result.error is not None:
                raise result.error

    def rows(self) -> list[dict]:
        return [r.to_dict() for r in self.results]


class BatchWorkflow:
    """
    Evaluate every row of an ObservationTable.

    Usage:
        workflow = BatchWorkflow(load_run_config())
        batch = workflow.run_balance(ingest_csv("data.csv"))
        batch.raise_first_failure()
        rows = batch.rows()
    """

    def __init__(self, config: RunConfig | None = None):
        self._config = config or RunConfig()
        self._max_workers = self._config.max_workers
        self._defaults = Elasticities(
            epsilon_v=self._config.epsilon_v,
            epsilon_c=self._config.epsilon_c,
        )

        logger.debug(f"Initialized BatchWorkflow: max_workers={self._max_workers}")

    # =========================================================================
    # Public runs
    # =========================================================================

    def run_balance(self, table: ObservationTable) -> BatchResult:
        """
        Aggregate decomposition per row, plus year-on-year changes.

        When the previous row holds the preceding year, delta_sbc and delta_sbs
        are the changes against it and sfa is the automatic stabiliser
        contribution delta_sbc - delta_sbs. After a gap in the years, or a
        failed row, the three are None.
        """
        batch = self._run(table, self._balance_row)

        previous: YearResult | None = None
        for result in batch.results:
            consecutive = previous is not None and result.year - previous.year == 1
            if result.success and previous is not None and consecutive and previous.success:
                delta_sbc = result.values["sbc"] - previous.values["sbc"]
                delta_sbs = result.values["sbs"] - previous.values["sbs"]
                result.values.update(
                    delta_sbc=delta_sbc,
                    delta_sbs=delta_sbs,
                    sfa=sfa_from_deltas(delta_sbc, delta_sbs),
                )
            elif result.success:
                if previous is not None and not consecutive:
                    logger.info(
                        f"No year-on-year change for {result.year}: previous row is {previous.year}"
                    )
                result.values.update(delta_sbc=None, delta_sbs=None, sfa=None)
            previous = result

        return batch

    def run_disaggregate(self, table: ObservationTable) -> BatchResult:
        """Disaggregate structural balance per row."""
        table.require(DISAGG_COLUMNS)
        return self._run(table, self._disaggregate_row)

    def run_compliance(self, table: ObservationTable) -> BatchResult:
        """Fiscal rule verdict per row; needs a debt_ratio column."""
        table.require(["debt_ratio"])
        return self._run(table, self._compliance_row)

    # =========================================================================
    # Row tasks
    # =========================================================================

    def _balance_row(self, table: ObservationTable, record: ObservationRecord) -> dict:
        return balance_values(record.observation, table.elasticities_for(record, self._defaults))

    def _disaggregate_row(self, table: ObservationTable, record: ObservationRecord) -> dict:
        return disaggregate_values(table.disaggregate_inputs(record))

    def _compliance_row(self, table: ObservationTable, record: ObservationRecord) -> dict:
        return compliance_values(
            record.observation,
            table.elasticities_for(record, self._defaults),
            record.get("debt_ratio"),
            self._config,
        )

    # =========================================================================
    # Pool
    # =========================================================================

    def _run(self, table: ObservationTable, task: RowTask) -> BatchResult:
        results: dict[int, YearResult] = {}

        with ThreadPoolExecutor(max_workers=self._max_workers) as executor:
            future_to_record = {
                executor.submit(task, table, record): record for record in table.records
            }

            for future in as_completed(future_to_record):
                record = future_to_record[future]
                try:
                    values = future.result()
                    results[record.row] = YearResult(
                        year=record.year, row=record.row, success=True, values=values
                    )
                except (FiscalError, ValidationError) as e:
                    logger.error(f"Failed to evaluate year {record.year} (row {record.row}): {e}")
                    error = e
                    if isinstance(e, ValidationError):
                        error = FiscalDomainError(f"row {record.row}: {e.errors()[0]['msg']}")
                    results[record.row] = YearResult(
                        year=record.year, row=record.row, success=False, error=error
                    )

        ordered = [results[record.row] for record in table.records]
        logger.info(
            f"Batch complete: {len(ordered)} rows, "
            f"{sum(1 for r in ordered if not r.success)} failed"
        )
        return BatchResult(results=ordered)
