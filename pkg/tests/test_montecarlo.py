import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from statsmodels.stats.proportion import proportion_confint

from marylink.exceptions import ConfigurationError, DomainError
from marylink.montecarlo import (
    DEFAULT_GRID_DB,
    BerCurve,
    StopCriteria,
    analytic_curve,
    estimate_ber,
    sweep,
    wilson_interval,
)

BPSK_6DB = 0.0023882907809328063  # Q(sqrt(2 * 10**0.6)), mpmath
Q2 = 0.022750131948179207

FAST = StopCriteria(min_bit_errors=200, max_bits=400_000, batch_size=50_000)


def within_sigmas(estimate, truth, n, sigmas=3):
    return abs(estimate - truth) <= sigmas * math.sqrt(truth * (1 - truth) / n)


class TestWilson:
    @given(st.integers(1, 10**7), st.data())
    def test_matches_statsmodels(self, n, data):
        e = data.draw(st.integers(0, n))
        for conf in (0.95, 0.99):
            lo, hi = wilson_interval(e, n, conf)
            ref_lo, ref_hi = proportion_confint(e, n, alpha=1 - conf, method="wilson")
            assert lo == pytest.approx(ref_lo, abs=1e-12)
            assert hi == pytest.approx(ref_hi, abs=1e-12)
            assert lo <= e / n <= hi

    def test_no_trials(self):
        assert wilson_interval(0, 0) == (0.0, 1.0)

    def test_bad_counts(self):
        with pytest.raises(DomainError):
            wilson_interval(5, 4)


def test_stop_criteria_validation():
    with pytest.raises(DomainError):
        StopCriteria(batch_size=0)


class TestEstimate:
    def test_bpsk_6db(self):
        est = estimate_ber("PSK", 2, 6.0, StopCriteria(min_bit_errors=10**9, max_bits=10**6))
        assert est.bits_sent == 10**6
        assert within_sigmas(est.ber, BPSK_6DB, est.bits_sent)
        assert est.ci_low <= est.ber <= est.ci_high
        assert est.ber == est.bit_errors / est.bits_sent

    def test_noiseless(self):
        for scheme in ("PSK", "QAM", "FSK"):
            est = estimate_ber(scheme, 4, math.inf, StopCriteria(max_bits=20_000))
            assert est.ber == 0.0 and est.bit_errors == 0
            assert est.stopped_by == "max_bits"
            assert est.bits_sent == 20_000

    def test_bfsk_symbol_errors(self):
        # M = 2: Es/N0 = 4 is 6.0206 dB on either axis convention
        snr_db = 10 * math.log10(4.0)
        est = estimate_ber("FSK", 2, snr_db, StopCriteria(min_bit_errors=10**9, max_bits=500_000))
        assert within_sigmas(est.ser, Q2, est.symbols_sent)
        assert est.ser == est.ber

    def test_stops_on_errors(self):
        est = estimate_ber("PSK", 8, 0.0, FAST)
        assert est.stopped_by == "min_bit_errors"
        assert est.bits_sent == 49_998  # one batch, rounded down to a multiple of k=3
        assert est.symbols_sent * 3 == est.bits_sent

    def test_budget_respected(self):
        est = estimate_ber("QAM", 16, 30.0, StopCriteria(max_bits=123_457, batch_size=10_000))
        assert est.stopped_by == "max_bits"
        assert est.bits_sent <= 123_457
        assert est.bits_sent % 4 == 0

    def test_reproducible(self):
        a = estimate_ber("QAM", 16, 8.0, FAST, seed=3)
        b = estimate_ber("QAM", 16, 8.0, FAST, seed=3)
        assert a == b
        c = estimate_ber("QAM", 16, 8.0, FAST, seed=4)
        assert c.bit_errors != a.bit_errors

    def test_unsupported(self):
        with pytest.raises(ConfigurationError):
            estimate_ber("QAM", 8, 3.0)

    def test_conventions_differ_for_k_above_1(self):
        paper = estimate_ber("PSK", 4, 6.0, FAST)
        physical = estimate_ber("PSK", 4, 6.0, FAST, convention="physical")
        assert paper.ber > 3 * physical.ber

    def test_symbol_errors_bound_bit_errors(self):
        est = estimate_ber("PSK", 16, 5.0, FAST)
        assert est.symbol_errors <= est.bit_errors <= 4 * est.symbol_errors


@pytest.fixture(scope="module")
def qpsk():
    return sweep("PSK", 4, stop=FAST, seed=1)


class TestSweep:
    def test_default_grid(self):
        assert DEFAULT_GRID_DB == tuple(float(x) for x in range(13))

    def test_monotone_up_to_ci(self, qpsk):
        for j in range(len(qpsk.values)):
            for i in range(j):
                assert qpsk.ci_low[j] <= qpsk.ci_high[i]

    def test_deterministic(self, qpsk):
        assert sweep("PSK", 4, stop=FAST, seed=1).estimates == qpsk.estimates

    def test_parallel_equals_sequential(self, qpsk):
        assert sweep("PSK", 4, stop=FAST, seed=1, workers=4).estimates == qpsk.estimates

    def test_appending_points_keeps_existing(self):
        short = sweep("FSK", 4, [0.0, 3.0], FAST, seed=2)
        longer = sweep("FSK", 4, [0.0, 3.0, 6.0], FAST, seed=2)
        assert longer.estimates[:2] == short.estimates

    def test_symbol_granularity(self):
        c = sweep("QAM", 16, [4.0], FAST, granularity="symbol")
        assert c.values[0] == c.estimates[0].ser
        assert c.granularity == "symbol"

    def test_bad_granularity(self):
        with pytest.raises(ConfigurationError):
            sweep("PSK", 2, [0.0], FAST, granularity="nibble")

    @pytest.mark.parametrize("scheme, m", [("PSK", 8), ("QAM", 16), ("FSK", 8)])
    def test_sanity_0db_above_9db(self, scheme, m):
        c = sweep(scheme, m, [0.0, 9.0], FAST)
        assert c.values[0] > c.values[1]


class TestAnalyticCurve:
    def test_bpsk_exact(self):
        c = analytic_curve("PSK", 2, [6.0])
        assert abs(c.values[0] - 0.00239) < 1e-5
        assert c.values[0] == pytest.approx(BPSK_6DB, abs=1e-12)
        assert math.isnan(c.ci_low[0]) and c.seed is None

    def test_m4_identity(self):
        psk = analytic_curve("PSK", 4)
        qam = analytic_curve("QAM", 4)
        assert np.max(np.abs(np.subtract(psk.values, qam.values))) < 1e-9

    def test_fsk_per_bit_union_improves_with_m(self):
        grid = [g for g in DEFAULT_GRID_DB if g >= 2]
        high = analytic_curve("FSK", 16, grid, "union_per_bit")
        low = analytic_curve("FSK", 2, grid, "union_per_bit")
        assert all(h < l for h, l in zip(high.values, low.values))

    def test_per_bit_mode_is_convention_independent(self):
        a = analytic_curve("FSK", 8, [5.0], "union_per_bit", convention="paper")
        b = analytic_curve("FSK", 8, [5.0], "union_per_bit", convention="physical")
        assert a.values == b.values

    def test_bit_vs_symbol(self):
        sym = analytic_curve("QAM", 16, [10.0], granularity="symbol").values[0]
        bit = analytic_curve("QAM", 16, [10.0]).values[0]
        assert bit == pytest.approx(sym / 4)

    def test_invalid_mode(self):
        with pytest.raises(ConfigurationError):
            analytic_curve("PSK", 4, [1.0], "approx3")

    def test_infinite_snr(self):
        assert analytic_curve("FSK", 4, [0.0, math.inf]).values[1] == 0.0


class TestBerCurve:
    def test_strictly_increasing(self):
        with pytest.raises(DomainError):
            BerCurve("PSK", 2, "exact", "bit", [1.0, 1.0], [0.1, 0.1])

    def test_values_in_range(self):
        with pytest.raises(DomainError):
            BerCurve("PSK", 2, "exact", "bit", [1.0], [1.5])

    def test_points_and_rows(self):
        c = BerCurve("PSK", 2, "exact", "bit", [1, 2], [0.2, 0.1])
        assert c.points == [(1.0, 0.2, "exact"), (2.0, 0.1, "exact")]
        row = next(c.rows())
        assert list(row) == ["scheme", "m", "mode", "granularity", "ebn0_db",
                             "value", "ci_low", "ci_high", "seed"]
        assert c.value_at(2) == 0.1
