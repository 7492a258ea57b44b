"""
table_report.py

Tab-separated tables for human-readable command output.
"""

import math
from typing import Any, List, Optional, Sequence

import numpy as np
from tabulate import tabulate

from utils import app_logger, config


class TableReportGenerator:
    """
    Renders rows as TSV with tabulate; numbers use a fixed number of
    significant digits and cells are never padded.
    """

    def __init__(self, significant_digits: Optional[int] = None):
        self.logger = app_logger
        self.digits = significant_digits or config.get_int("reports.significant_digits", 12)

    def format_cell(self, value: Any) -> str:
        if isinstance(value, (bool, np.bool_)):
            return str(bool(value)).lower()
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            value = float(value)
            if math.isinf(value):
                return "+inf" if value > 0 else "-inf"
            return f"{value + 0.0:.{self.digits}g}"
        return "" if value is None else str(value)

    def render(self, headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        cells: List[List[str]] = [[self.format_cell(v) for v in row] for row in rows]
        text = tabulate(
            cells,
            headers=list(headers),
            tablefmt="tsv",
            stralign=None,
            numalign=None,
            disable_numparse=True,
        )
        return text + "\n"
