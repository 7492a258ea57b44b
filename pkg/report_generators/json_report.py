"""
json_report.py

Canonical JSON rendering of sclkit reports.

Floats are rounded to a fixed number of significant digits and infinities
become the strings "+inf" / "-inf", so parsing a report and rendering it
again reproduces the same bytes.
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from utils import app_logger, config


class JSONReportGenerator:
    """
    Renders report dictionaries as canonical JSON text.
    """

    def __init__(self, significant_digits: Optional[int] = None):
        self.logger = app_logger
        self.digits = significant_digits or config.get_int("reports.significant_digits", 12)

    def format_float(self, value: float) -> Any:
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "+inf" if value > 0 else "-inf"
        rounded = float(f"{value:.{self.digits}g}")
        # avoid "-0.0" in reports
        return rounded + 0.0

    def canonical(self, value: Any) -> Any:
        """Convert numpy scalars, arrays and tuples into plain JSON values."""
        if isinstance(value, dict):
            return {str(k): self.canonical(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [self.canonical(v) for v in value]
        if isinstance(value, np.ndarray):
            return [self.canonical(v) for v in value.tolist()]
        if isinstance(value, (bool, np.bool_)):
            return bool(value)
        if isinstance(value, (int, np.integer)):
            return int(value)
        if isinstance(value, (float, np.floating)):
            return self.format_float(float(value))
        return value

    def render(self, report: Dict[str, Any]) -> str:
        return json.dumps(self.canonical(report), indent=2, ensure_ascii=False) + "\n"

    def write(self, report: Dict[str, Any], output_path: str) -> bool:
        """
        Write a report to disk.

        Returns:
            True if successful, False otherwise
        """
        try:
            path = Path(output_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.render(report), encoding="utf-8")
            self.logger.info(f"JSON report saved: {path}")
            return True
        except OSError as e:
            self.logger.error(f"Failed to save JSON report {output_path}: {e}")
            return False
