"""
report_generators package

Report rendering: canonical JSON and TSV tables.
"""

from report_generators.json_report import JSONReportGenerator
from report_generators.table_report import TableReportGenerator

__all__ = ["JSONReportGenerator", "TableReportGenerator"]
