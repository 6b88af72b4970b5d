from .config import AttackConfig
from .linf import (
    feasibility_violation,
    fgsm,
    input_gradient,
    perturb,
    pgd,
    project_linf,
)

__all__ = [
    # config.py
    "AttackConfig",

    # linf.py
    "feasibility_violation",
    "fgsm",
    "input_gradient",
    "perturb",
    "pgd",
    "project_linf",
]
