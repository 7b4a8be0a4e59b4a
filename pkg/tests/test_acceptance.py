"""Acceptance suite: ten numbered criteria with pinned parameters.

Each test prints one [PASS]/[FAIL] line per check (visible with
pytest -s, and always in the failure report) and asserts the lot.
Criterion 4 runs one parameter tuple whose stated tolerance is out of
reach at any feasible level; that test reports the honest measured
value and fails.  See the README for the analysis.
"""

import pytest

from cantormap.cli import main
from cantormap.verify import (
    CheckResult,
    check_boundary_consistency,
    check_gain_ratio,
    check_geometry,
    check_jacobian,
    check_mass_distribution,
    check_power_gauges,
    check_reproducibility,
    check_series,
    check_threshold_near_half,
    check_threshold_scan,
)


def _report(checks):
    failed = []
    for c in checks:
        tag = "PASS" if c.passed else "FAIL"
        print(f"[{tag}] criterion {c.criterion:02d} {c.name}: "
              f"measured {c.measured}; target {c.target}")
        if not c.passed:
            failed.append(c.name)
    assert not failed, f"failed checks: {', '.join(failed)}"


def test_criterion_01_geometry_invariants():
    _report(check_geometry())


def test_criterion_02_boundary_consistency():
    _report(check_boundary_consistency())


def test_criterion_03_jacobian_integrals():
    _report(check_jacobian())


@pytest.mark.parametrize("tuple_index", [0, 1])
def test_criterion_04_gain_ratio_limit(tuple_index):
    _report(check_gain_ratio(tuple_index))


def test_criterion_05_series_ratios_and_flip():
    _report(check_series())


def test_criterion_06_gauge_exponent_scan():
    _report(check_threshold_scan())


def test_criterion_07_mass_distribution():
    _report(check_mass_distribution())


def test_criterion_08_power_gauge_dimensions():
    _report(check_power_gauges())


def test_criterion_09_threshold_near_half():
    _report(check_threshold_near_half())


def test_criterion_10_reproducibility(tmp_path):
    checks = list(check_reproducibility())
    argvs = {
        "construct": ["construct", "--depth", "4"],
        "map": ["map", "--samples", "200"],
        "series": ["series", "subexp"],
        "verify": ["verify"],
    }
    diverged = []
    for name, argv in argvs.items():
        # identical argv both times: the JSON document echoes --out,
        # so reproducibility is same-flags-same-bytes, not cross-path
        target = tmp_path / f"{name}.out"
        full = argv + ["--out", str(target)]
        main(full)
        first = target.read_bytes()
        main(full)
        if target.read_bytes() != first:
            diverged.append(name)
    checks.append(
        CheckResult(
            10,
            "cli_byte_reproducibility",
            "pass" if not diverged else "fail",
            "identical" if not diverged else f"diverged: {diverged}",
            "each command run twice, outputs byte-compared",
        )
    )
    _report(checks)
