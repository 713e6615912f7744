"""
Workflows Module

Batch evaluation of observation tables.
"""

from .batch_workflow import (
    BatchResult,
    BatchWorkflow,
    YearResult,
    balance_values,
    compliance_values,
    disaggregate_values,
)

__all__ = [
    "BatchWorkflow",
    "BatchResult",
    "YearResult",
    "balance_values",
    "disaggregate_values",
    "compliance_values",
]
