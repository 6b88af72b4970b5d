from pathlib import Path

import numpy as np
import pytest

from orat.core import ConfigError
from orat.losses import MARGIN_LOSSES, PhiParams, RankRange
from orat.oracle import (
    CheckResult,
    CheckTally,
    OracleReport,
    audit_mlp_gradients,
    audit_subgradients,
    fd_audit,
    reference_aorr,
    reference_topk_sum,
    run_oracle_suite,
    verify_attack_feasibility,
    verify_bottom_identity,
    verify_phi_clamp,
    verify_saddle_equivalence,
    verify_topk_identity,
    write_oracle_csv,
)
from orat.oracle.gradients import saddle_point_fd_error
from orat.oracle.identities import trial_vector
from orat.utils import make_rng


# ==================== REFERENCE ARITHMETIC ====================
def test_reference_sums() -> None:
    assert reference_topk_sum([3.0, 1.0, 2.0], 2) == 5.0
    assert reference_aorr([4.0, 3.0, 2.0, 1.0], 3, 1) == 2.5


def test_trial_vector_shapes() -> None:
    rng = make_rng(0)
    constant = trial_vector(rng, 6, 0)
    duplicated = trial_vector(rng, 6, 1)
    plain = trial_vector(rng, 6, 2)

    assert len(set(constant)) == 1
    assert len(set(duplicated)) <= 3
    for values in (constant, duplicated, plain):
        assert 1 <= len(values) <= 6
        assert all(0.0 <= v < 2.0 for v in values)


# ==================== IDENTITIES ====================
def test_topk_identity_holds() -> None:
    result = verify_topk_identity(60, 8, make_rng(1))

    assert result.passed
    assert result.trials == 60


def test_bottom_identity_holds() -> None:
    assert verify_bottom_identity(60, 8, make_rng(2)).passed


def test_saddle_equivalence_holds_for_every_rank_range() -> None:
    result = verify_saddle_equivalence(20, 6, make_rng(3))

    assert result.passed
    assert "held in" in result.note


def test_identity_verifier_rejects_zero_trials() -> None:
    with pytest.raises(ConfigError):
        verify_topk_identity(0, 4, make_rng(0))


# ==================== GRADIENTS ====================
def test_fd_audit_accepts_exact_gradient() -> None:
    error = fd_audit(lambda p: float(np.sum(p**2)), lambda p: 2 * p, [1.0, -2.0, 0.5])

    assert error <= 1e-8


def test_fd_audit_flags_wrong_gradient() -> None:
    error = fd_audit(lambda p: float(np.sum(p**2)), lambda p: p, [1.0, -2.0, 0.5])

    assert error == pytest.approx(0.5, abs=1e-6)


def test_fd_audit_rejects_nonpositive_step() -> None:
    with pytest.raises(ConfigError):
        fd_audit(lambda p: 0.0, lambda p: p, [1.0], step=0.0)


def test_saddle_subgradients_match_finite_differences() -> None:
    result = audit_subgradients(100, 6, make_rng(4))

    assert result.passed
    assert result.trials > 0


@pytest.mark.parametrize("n_max", [1, 2])
def test_flat_dual_directions_pass_the_subgradient_audit(n_max: int) -> None:
    result = audit_subgradients(300, n_max, make_rng(7))

    assert result.passed
    assert result.max_deviation <= 1e-9


def test_zero_dual_slopes_at_a_single_sample_range() -> None:
    values = [0.88491954, 1.69695680]
    lam, lam_hat = 1.18101463, 1.80873297

    flat = saddle_point_fd_error(values, RankRange(1, 0, 2), lam, lam_hat, 1e-5)
    sloped = saddle_point_fd_error(values, RankRange(2, 0, 2), lam, lam_hat, 1e-5)

    assert flat <= 1e-9
    assert sloped <= 1e-9


def test_fd_audit_reports_plain_gap_below_the_absolute_floor() -> None:
    error = fd_audit(lambda p: 0.0, lambda p: np.full(p.shape, 4e-10), [0.5, 1.5])

    assert error == pytest.approx(4e-10)


def test_mlp_gradients_match_finite_differences() -> None:
    assert audit_mlp_gradients(3, make_rng(5)).passed


# ==================== CONTRACTS ====================
@pytest.mark.parametrize("name", sorted(MARGIN_LOSSES))
def test_phi_clamp(name: str) -> None:
    params = PhiParams(0.3, 0.6, MARGIN_LOSSES[name])

    result = verify_phi_clamp(np.linspace(-2.0, 2.0, 41), params)

    assert result.passed
    assert result.trials == 41


def test_attack_feasibility() -> None:
    result = verify_attack_feasibility(20, make_rng(6))

    assert result.passed
    assert result.note == "20 samples per radius"


# ==================== SUITE / REPORT ====================
def test_small_suite_passes_and_is_deterministic() -> None:
    first = run_oracle_suite(trials=10, seed=1, n_max=3)
    second = run_oracle_suite(trials=10, seed=1, n_max=3)

    assert first.passed
    assert first.summary_lines() == second.summary_lines()
    checks = {r.check for r in first.results}
    assert {"topk_identity", "bottom_identity", "saddle_equivalence"} <= checks


def test_suite_scales_checks_from_trials() -> None:
    report = run_oracle_suite(trials=10, seed=2, n_max=3)
    by_check = {r.check: r for r in report.results}

    assert by_check["topk_identity"].trials == 10
    assert by_check["attack_feasibility"].note == "100 samples per radius"
    assert 0 < by_check["saddle_subgradients"].trials <= 100
    phi_checks = [r for r in report.results if r.check.startswith("phi_clamp")]
    assert len(phi_checks) == 3 * len(MARGIN_LOSSES)
    assert all(r.trials == 10_001 for r in phi_checks)


@pytest.mark.slow
def test_default_suite_passes_at_full_scale() -> None:
    report = run_oracle_suite()
    by_check = {r.check: r for r in report.results}

    assert report.passed, report.failed_checks
    assert by_check["topk_identity"].trials == 1000
    assert by_check["saddle_subgradients"].trials >= 9000


def test_suite_rejects_zero_trials() -> None:
    with pytest.raises(ConfigError):
        run_oracle_suite(trials=0)


def test_tally_counts_non_finite_deviation_as_failure() -> None:
    tally = CheckTally("demo", 1e-9)
    tally.record(0.0, "clean")
    tally.record(float("nan"), "broken")

    result = tally.result()

    assert result.failures == 1
    assert result.max_deviation == float("inf")
    assert result.worst == "broken"


def test_report_lists_failed_checks() -> None:
    report = OracleReport(
        results=[
            CheckResult("ok", trials=3, failures=0, max_deviation=0.0, tolerance=1e-9),
            CheckResult(
                "bad", trials=3, failures=2, max_deviation=0.1, tolerance=1e-9,
                note="x",
            ),
        ],
    )

    lines = report.summary_lines()

    assert not report.passed
    assert report.failed_checks == ["bad"]
    assert lines[0].startswith("PASS  ok")
    assert lines[1].startswith("FAIL  bad")
    assert lines[1].endswith("(x)")


def test_oracle_csv(tmp_path: Path) -> None:
    result = CheckResult("ok", 3, 0, 0.0, 1e-9, worst="k=1 values=[0.5]")
    report = OracleReport(results=[result])

    text = write_oracle_csv(tmp_path / "oracle.csv", report).read_text(encoding="utf-8")

    assert text.splitlines() == [
        "check,trials,failures,max_deviation,tolerance,worst",
        "ok,3,0,0.0,1e-09,k=1 values=[0.5]",
    ]
