import json
import math

import pytest

from sieve_bounds import bounds as bd
from sieve_bounds.integrals import LOWER, UPPER
from sieve_bounds.quadrature import ADAPTIVE, QMC, IntegralEstimate


def fake(side, idx=0, err=0.0, method=QMC):
    return {n: IntegralEstimate(bd.REFERENCE_VALUES[n][idx], err, method)
            for names in bd.groups_for(side).values() for n in names}


@pytest.mark.parametrize("idx", range(5))
def test_reference_columns_reassemble(idx):
    low = bd.report_from_estimates(bd.REFERENCE_THETAS[idx], LOWER, fake(LOWER, idx))
    up = bd.report_from_estimates(bd.REFERENCE_THETAS[idx], UPPER, fake(UPPER, idx))
    assert low.bound == pytest.approx(bd.REFERENCE_TOTALS[(LOWER, "bound")][idx], abs=2e-6)
    assert up.bound == pytest.approx(bd.REFERENCE_TOTALS[(UPPER, "bound")][idx], abs=2e-6)
    assert abs(low.bound - bd.THEOREM_LB[idx]) < 1e-3
    assert abs(up.bound - bd.THEOREM_UB[idx]) < 1e-3


def test_region_losses_are_signed_sums():
    rep = bd.report_from_estimates(0.521, UPPER, fake(UPPER, 1))
    v = {n: e.value for n, e in rep.per_term.items()}
    assert rep.region_losses["A1"] == math.fsum([v["VA1"], -v["VA2"], v["VA3"]])
    assert rep.region_losses["A1"] == pytest.approx(0.245073, abs=1e-6)
    assert rep.total_loss == pytest.approx(math.fsum(rep.region_losses.values()), abs=1e-15)


def test_h_loss_zero_at_0524():
    rep = bd.report_from_estimates(0.524, UPPER, fake(UPPER, 4))
    assert rep.region_losses["H"] == 0.0


def test_trivial_and_inconclusive_flags():
    est = fake(LOWER)
    est["UC01"] = IntegralEstimate(0.5, 0.0, QMC)
    assert bd.report_from_estimates(0.52, LOWER, est).status == "trivial"
    est = fake(LOWER, err=0.01)
    assert bd.report_from_estimates(0.52, LOWER, est).status == "inconclusive"
    assert bd.report_from_estimates(0.52, LOWER, fake(LOWER)).status == "ok"


def test_savings_clamped_when_unresolved():
    est = fake(LOWER)
    est["UC02"] = IntegralEstimate(1e-5, 1e-4, QMC)
    rep = bd.report_from_estimates(0.52, LOWER, est)
    base = bd.report_from_estimates(0.52, LOWER, fake(LOWER))
    assert rep.region_losses["C"] == pytest.approx(base.region_losses["C"] + 0.001607, abs=1e-12)


def test_combined_error():
    est = fake(UPPER, err=1e-4)
    est["H"] = IntegralEstimate(0.182, 1e-6, ADAPTIVE)
    rep = bd.report_from_estimates(0.52, UPPER, est)
    want = math.sqrt(15 * 1e-8) + 1e-6
    assert rep.combined_error == pytest.approx(want, rel=1e-12)


def test_iwaniec_comparison_of_reference_columns():
    ub = bd.REFERENCE_TOTALS[(UPPER, "bound")]
    assert ub[0] >= 4 / 1.52
    assert ub[2] < 4 / 1.522


def test_monotone_reference_columns():
    lb = bd.REFERENCE_TOTALS[(LOWER, "bound")]
    ub = bd.REFERENCE_TOTALS[(UPPER, "bound")]
    assert list(lb) == sorted(lb) and list(ub) == sorted(ub, reverse=True)


def test_consistency_check_all_columns():
    for i in range(5):
        res = bd.consistency_check(i)
        assert all(ok for _, _, ok in res.values()), res


def test_policy_routing():
    p = bd.Policy()
    assert p.method_for(1) == "adaptive" and p.method_for(3) == "adaptive"
    assert p.method_for(4) == "mc"
    assert bd.Policy(adaptive_max_dim=2).method_for(3) == "mc"
    assert bd.Policy(method="adaptive").method_for(5) == "mc"
    assert p.tol_for(2) == 1e-6 and p.tol_for(3) == 1e-4
    assert p.samples_for(5) == 10**7 and p.samples_for(6) == 10**8


def test_theta_range_and_empty_table():
    with pytest.raises(ValueError):
        bd.compute_bound(0.53, LOWER)
    assert bd.table([]) == []


def test_small_compute_bound_runs():
    pol = bd.Policy(samples=2**14, adaptive_max_dim=2)
    rep = bd.compute_bound(0.524, UPPER, pol)
    assert rep.region_losses["H"] == 0.0
    doc = json.loads(rep.to_json())
    assert doc["side"] == UPPER and "V_A1" in doc["per_term"]
    csv_text = bd.table_csv([rep])
    rows = [line.split(",")[0] for line in csv_text.splitlines()]
    assert rows[0] == "Upper" and "Upper Bound" in rows and "Loss from H" in rows


def test_display_names():
    assert bd.display_name("UC01") == "U_C01"
    assert bd.display_name("H") == "H"
    assert bd.internal_name("v_a4") == "VA4"
