"""Schatten summability diagnostics against the growth/decay arithmetic."""

import math

import pytest

from treeboundary import (
    DeviationProfile,
    FreeGroup,
    LocallyConstantFunction,
    VisualStructure,
    decay_exponent_fit,
    dplus_surrogate_check,
    hausdorff_dimension,
    lp_report,
    summability_threshold,
)

F2 = FreeGroup(2)
F3 = FreeGroup(3)
VS2 = VisualStructure(F2, math.log(3))

IA = LocallyConstantFunction.indicator(F2, F2.word("a"))


@pytest.fixture(scope="module")
def profile_r6():
    return DeviationProfile.compute(IA, 6, label="indicator_a")


def test_dimension_formula():
    assert abs(hausdorff_dimension(VS2) - 1.0) <= 1e-15
    assert hausdorff_dimension(VisualStructure(F2, math.log(3) / 2)) == (
        pytest.approx(2.0)
    )
    assert hausdorff_dimension(
        VisualStructure(F3, math.log(5))
    ) == pytest.approx(1.0)


def test_threshold_is_max_of_two_and_dimension():
    assert summability_threshold(VS2) == 2.0
    fine = VisualStructure(F2, math.log(3) / 5.0)  # dimension 5
    assert summability_threshold(fine) == pytest.approx(5.0)


def test_p3_converges_p2_diverges(profile_r6):
    r3 = lp_report(profile_r6, 3.0, VS2)
    assert r3.verdict == "converging"
    # sphere ratios approach 3 * 3^(-3/2) = 3^(-1/2)
    assert r3.tail_ratios[-1] == pytest.approx(3 ** -0.5, abs=0.02)
    r2 = lp_report(profile_r6, 2.0, VS2)
    assert r2.verdict in ("diverging", "inconclusive")
    # p = 2 sphere sums approach 1/2 from below: no decay
    assert all(s >= 0.1 for s in r2.sphere_sums)
    assert r2.sphere_sums[-1] == pytest.approx(0.5, abs=0.01)


def test_even_p_sphere_sums_exact(profile_r6):
    # p = 2 path sums Fractions; compare to a direct rational sum
    from fractions import Fraction

    r2 = lp_report(profile_r6, 2.0, VS2)
    for m in range(7):
        direct = sum(
            (row.deviation_sq for row in profile_r6.sphere_rows(m)),
            Fraction(0),
        )
        assert r2.sphere_sums[m] == float(direct)


def test_report_validation(profile_r6):
    with pytest.raises(ValueError):
        lp_report(DeviationProfile.compute(IA, 3), 2.0, VS2)  # radius < 4
    with pytest.raises(ValueError):
        lp_report(profile_r6, 0.0, VS2)


def test_constant_function_report_trivial():
    one = LocallyConstantFunction.constant(F2, 1)
    profile = DeviationProfile.compute(one, 4, label="one")
    report = lp_report(profile, 2.0, VS2)
    assert all(s == 0.0 for s in report.sphere_sums)
    assert report.verdict == "converging"


def test_decay_exponent_fit(profile_r6):
    # sigma ~ 3^(-m/2) so log sigma / m -> -(ln 3)/2 = -0.5493
    slope = decay_exponent_fit(profile_r6)
    assert slope == pytest.approx(-math.log(3) / 2, abs=0.06)


def test_decay_exponent_fit_rank3():
    phi = LocallyConstantFunction.indicator(F3, F3.word("a"))
    profile = DeviationProfile.compute(phi, 4, label="indicator_a")
    slope = decay_exponent_fit(profile)
    assert slope == pytest.approx(-math.log(5) / 2, abs=0.06)


def test_dplus_surrogate():
    check = dplus_surrogate_check(F2, VS2, 6)
    assert check.ok
    assert check.dimension == pytest.approx(1.0)
    assert check.max_ratio <= 1.0 + 1e-12
    # epsilon twice as coarse halves the dimension and still passes
    coarse = dplus_surrogate_check(F2, VisualStructure(F2, 2 * math.log(3)), 6)
    assert coarse.ok
    assert coarse.dimension == pytest.approx(0.5)


def test_report_json_shape(profile_r6):
    obj = lp_report(profile_r6, 3.0, VS2).to_json_obj()
    assert obj["p"] == 3.0
    assert obj["verdict"] == "converging"
    assert len(obj["sphere_sums"]) == 7
    assert obj["threshold"] == 2.0
