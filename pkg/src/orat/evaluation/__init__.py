from .metrics import accuracy, predict, robust_accuracy
from .report import (
    EvalReport,
    EvalRow,
    SeedSummary,
    evaluate_model,
    format_summary,
    read_report_csv,
    standard_attacks,
    summarize_over_seeds,
    write_report_csv,
)

__all__ = [
    # metrics.py
    "accuracy",
    "predict",
    "robust_accuracy",

    # report.py
    "EvalReport",
    "EvalRow",
    "SeedSummary",
    "evaluate_model",
    "format_summary",
    "read_report_csv",
    "standard_attacks",
    "summarize_over_seeds",
    "write_report_csv",
]
