from .contracts import verify_attack_feasibility, verify_phi_clamp
from .gradients import audit_mlp_gradients, audit_subgradients, fd_audit
from .identities import (
    reference_aorr,
    reference_topk_sum,
    verify_bottom_identity,
    verify_saddle_equivalence,
    verify_topk_identity,
)
from .report import CheckResult, CheckTally, OracleReport, write_oracle_csv
from .suite import DEFAULT_N_MAX, DEFAULT_TRIALS, run_oracle_suite

__all__ = [
    # contracts.py
    "verify_attack_feasibility",
    "verify_phi_clamp",

    # gradients.py
    "audit_mlp_gradients",
    "audit_subgradients",
    "fd_audit",

    # identities.py
    "reference_aorr",
    "reference_topk_sum",
    "verify_bottom_identity",
    "verify_saddle_equivalence",
    "verify_topk_identity",

    # report.py
    "CheckResult",
    "CheckTally",
    "OracleReport",
    "write_oracle_csv",

    # suite.py
    "DEFAULT_N_MAX",
    "DEFAULT_TRIALS",
    "run_oracle_suite",
]
