import math

import pytest

from geonresp.errors import DomainError, TableRangeError
from geonresp.rates import rate_BH, rate_J
from geonresp.response import Vacuum, response_BH, response_J
from geonresp.spacetime import local_temperature

HH = Vacuum.HARTLE_HAWKING
UNRUH = Vacuum.UNRUH
BOULWARE = Vacuum.BOULWARE

T_LOC_3 = local_temperature(3.0)


class TestRateBH:
    @pytest.mark.parametrize("x", [1.0, 2.0])
    def test_detailed_balance(self, table_r3, x):
        Om = x * T_LOC_3
        up = rate_BH(Om, 3.0, HH, table_r3)
        down = rate_BH(-Om, 3.0, HH, table_r3)
        assert abs(up / down - math.exp(-Om / T_LOC_3)) < 1e-8

    def test_hh_positive_both_signs(self, table_r3):
        for x in (-5.0, -0.5, 0.5, 5.0):
            assert rate_BH(x * T_LOC_3, 3.0, HH, table_r3) > 0.0

    def test_boulware_no_excitation(self, table_r3):
        assert rate_BH(0.5, 3.0, BOULWARE, table_r3) == 0.0
        assert rate_BH(-0.5, 3.0, BOULWARE, table_r3) > 0.0

    def test_vacuum_ordering_at_positive_gap(self, table_r3):
        Om = 1.5 * T_LOC_3
        hh = rate_BH(Om, 3.0, HH, table_r3)
        unruh = rate_BH(Om, 3.0, UNRUH, table_r3)
        boulware = rate_BH(Om, 3.0, BOULWARE, table_r3)
        assert hh > unruh > boulware == 0.0

    def test_boulware_limit_of_hh(self, table_r3):
        Om = -20.0 * T_LOC_3
        hh = rate_BH(Om, 3.0, HH, table_r3)
        b = rate_BH(Om, 3.0, BOULWARE, table_r3)
        assert abs(hh / b - 1.0) < 1e-4

    def test_unruh_between_with_in_term(self, table_r3):
        # de-excitation: Unruh keeps the non-thermal in-term
        Om = -1.0 * T_LOC_3
        assert rate_BH(Om, 3.0, BOULWARE, table_r3) < \
            rate_BH(Om, 3.0, UNRUH, table_r3) < rate_BH(Om, 3.0, HH, table_r3)

    def test_zero_gap_is_continuous_limit(self, table_r3):
        # the rate is smooth on each side of Omega = 0 but carries a |Omega|
        # term, so the symmetric average at +-eps still drifts linearly in
        # eps; Richardson over two eps values removes that drift
        r0 = rate_BH(0.0, 3.0, HH, table_r3)

        def sym(eps):
            return 0.5 * (rate_BH(eps, 3.0, HH, table_r3)
                          + rate_BH(-eps, 3.0, HH, table_r3))

        rich = 2.0 * sym(1e-3) - sym(2e-3)
        assert r0 > 0.0
        assert abs(rich / r0 - 1.0) < 1e-4

    def test_gap_outside_table_raises(self, table_r3):
        with pytest.raises(TableRangeError):
            rate_BH(20.0, 3.0, HH, table_r3)

    def test_per_l_diagnostics(self, table_r3):
        res = rate_BH(0.5, 3.0, HH, table_r3, full=True)
        assert res.rate == pytest.approx(sum(res.per_l.values()), rel=1e-14)
        assert res.Omega_tilde == pytest.approx(0.5 * math.sqrt(2.0 / 3.0), rel=1e-14)


class TestRateJ:
    def test_pv_identically_zero_at_tau0_zero(self, table_r3):
        res = rate_J(0.5, 3.0, 0.0, HH, table_r3, full=True)
        assert res.pv_term == 0.0
        assert res.rate == res.delta_term

    def test_delta_term_oscillates_with_period_pi_over_gap(self, table_r3):
        Om = 2.0 * T_LOC_3
        period = math.pi / Om
        a = rate_J(Om, 3.0, 40.0, HH, table_r3, full=True)
        b = rate_J(Om, 3.0, 40.0 + period, HH, table_r3, full=True)
        assert a.delta_term == pytest.approx(b.delta_term, rel=1e-10)
        half = rate_J(Om, 3.0, 40.0 + 0.5 * period, HH, table_r3, full=True)
        assert half.delta_term == pytest.approx(-a.delta_term, rel=1e-10)

    def test_pv_approaches_delta_term_at_late_times(self, table_r3):
        # distributional limit: the PV integral tends to +delta-term as
        # tau0 -> +infinity (and to -delta-term before the correlation epoch)
        res = rate_J(2.0 * T_LOC_3, 3.0, 200.0, HH, table_r3, full=True)
        assert abs(res.pv_term - res.delta_term) < 0.05 * abs(res.delta_term)

    def test_rate_vanishes_before_correlation_epoch(self, table_r3):
        early = rate_J(0.01 * T_LOC_3, 3.0, -100.0, HH, table_r3)
        now = rate_J(0.01 * T_LOC_3, 3.0, 0.0, HH, table_r3)
        assert abs(early) < abs(now)

    def test_unruh_drops_in_terms(self, table_r3):
        hh = rate_J(0.5, 3.0, 0.0, HH, table_r3)
        unruh = rate_J(0.5, 3.0, 0.0, UNRUH, table_r3)
        assert abs(unruh) < abs(hh)

    def test_boulware_rejected(self, table_r3):
        with pytest.raises(DomainError):
            rate_J(0.5, 3.0, 0.0, BOULWARE, table_r3)

    def test_zero_gap_limit(self, table_r3):
        r0 = rate_J(0.0, 3.0, 0.0, HH, table_r3)

        def sym(eps):
            return 0.5 * (rate_J(eps, 3.0, 0.0, HH, table_r3)
                          + rate_J(-eps, 3.0, 0.0, HH, table_r3))

        rich = 2.0 * sym(1e-3) - sym(2e-3)
        assert abs(rich / r0 - 1.0) < 1e-4


class TestCrossModuleConsistency:
    def test_rate_and_response_ratios_agree(self, table_r3):
        # slow switching: the Gaussian-window ratio F_J/F_BH and the
        # rate-based ratio at small gap agree in sign and magnitude
        f_ratio = response_J(0.0, 3.0, 100.0, HH, table_r3) / \
            response_BH(0.0, 3.0, 100.0, HH, table_r3)
        rate_ratio = rate_J(0.0, 3.0, 0.0, HH, table_r3) / \
            rate_BH(0.0, 3.0, HH, table_r3)
        assert f_ratio > 0 and rate_ratio > 0
        assert 0.5 < rate_ratio / f_ratio < 2.0
