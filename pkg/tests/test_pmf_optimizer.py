"""Multi-start search over auxiliary inputs.

Optimal values are checked against closed forms computed independently in
``oracle_values`` (binary-entropy corner points, the adder-erasure two-point
family), not against the library's own region evaluations.
"""

import numpy as np
import pytest

from oracle_values import BSC_QUARTER_MAX_SUM, P2_STAR_06, hb
from sdbc import (
    InfeasibleRateError,
    RateTuple,
    RegionKind,
    SearchConfig,
    certificate_search,
    check_x_functional,
    contains,
    evaluate,
    find_certificate,
    make_adder_erasure,
    make_bsc_pair,
    make_function_erasure,
    make_aux,
    max_rate_Y_given_Z,
    maximize_custom,
    maximize_rate_Y,
    maximize_weighted,
    p2_star,
    support_value,
    symmetric_adder_search,
    warm_starts,
)

BSC = make_bsc_pair(0.25)
ADDER = make_adder_erasure(0.6)


class TestSearchConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"restarts": 0},
            {"iterations": -1},
            {"v_card": 0},
            {"u_card": -2},
            {"step_schedule": (0.0, 0.9)},
            {"step_schedule": (0.5, 0.0)},
            {"step_schedule": (0.5, 1.5)},
        ],
    )
    def test_rejects_bad_budgets(self, kwargs):
        with pytest.raises(ValueError):
            SearchConfig(**kwargs)

    def test_defaults_are_valid(self):
        cfg = SearchConfig()
        assert cfg.restarts >= 1 and cfg.threads is None


class TestStructuredStarts:
    def test_p2_star_matches_independent_derivation(self):
        assert p2_star(0.6) == pytest.approx(P2_STAR_06, abs=1e-15)
        # p = 1: the family parameter solving the sum-rate stationarity
        assert p2_star(1.0) == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_symmetric_adder_family_rows(self):
        p2 = 0.2
        q = (1.0 - p2) / 2.0
        a = symmetric_adder_search(0.6, p2)
        assert a.p_x_given_u.rows.shape == (2, 4)
        assert a.p_x_given_u.rows[0] == pytest.approx([q, 0.0, q, p2])
        assert a.p_x_given_u.rows[1] == pytest.approx([p2, q, 0.0, q])
        assert a.p_vu.mass.sum() == pytest.approx(1.0)

    def test_symmetric_adder_family_v_equals_u(self):
        a = symmetric_adder_search(0.6, 0.2, v_equals_u=True)
        assert a.p_vu.mass.shape == (2, 2)
        assert np.count_nonzero(a.p_vu.mass) == 2  # diagonal coupling

    def test_warm_starts_recognize_channel_families(self):
        assert warm_starts(ADDER, RegionKind.COR2_FMSI_AT_Y)
        assert warm_starts(BSC, RegionKind.COR1_NO_MSI_AT_Z)
        fe = make_function_erasure([0, 1, 0, 1], 0.4)
        assert warm_starts(fe, RegionKind.COR2_FMSI_AT_Y)

    def test_warm_starts_x_only_kinds_get_uniform_input(self):
        (a,) = warm_starts(BSC, RegionKind.COR3_FMSI_AT_Z)
        assert a.p_vu.mass.shape == (1, 1)
        assert a.p_x_given_u.rows[0] == pytest.approx([0.5, 0.5])

    def test_warm_starts_functional_only_deterministic_tables(self):
        for a in warm_starts(ADDER, RegionKind.THEOREM1, functional=True):
            assert np.all(np.isin(a.p_x_given_u.rows, (0.0, 1.0)))


class TestMaximizeWeighted:
    def test_bsc_pair_sum_rate_matches_closed_form(self):
        cfg = SearchConfig(restarts=4, iterations=40, seed=0)
        res = maximize_weighted(
            RegionKind.COR4_FMSI_BOTH, BSC, (0.0, 0.0, 1.0, 0.0, 1.0), cfg
        )
        assert res.value == pytest.approx(BSC_QUARTER_MAX_SUM, abs=1e-3)
        assert res.rates is not None
        total = res.rates.r_y + res.rates.r_z + res.rates.r_common
        assert total == pytest.approx(res.value, abs=1e-9)

    def test_trace_and_restart_index_are_consistent(self):
        cfg = SearchConfig(restarts=5, iterations=15, seed=3)
        res = maximize_weighted(RegionKind.THEOREM1, BSC, (0, 1, 0, 0, 0), cfg)
        assert len(res.trace) == 5
        assert res.trace[res.restart_index] == pytest.approx(res.value, abs=1e-9)
        assert res.value >= max(res.trace) - 1e-9

    def test_same_seed_reproduces_bit_identical_result(self):
        cfg = SearchConfig(restarts=3, iterations=20, seed=11)
        a = maximize_weighted(RegionKind.THEOREM1, ADDER, (0, 1, 0, 1, 0), cfg)
        b = maximize_weighted(RegionKind.THEOREM1, ADDER, (0, 1, 0, 1, 0), cfg)
        assert a.value == b.value
        assert a.trace == b.trace
        assert np.array_equal(a.argument.p_vu.mass, b.argument.p_vu.mass)
        assert np.array_equal(a.argument.p_x_given_u.rows, b.argument.p_x_given_u.rows)

    def test_value_reproducible_at_argument(self):
        cfg = SearchConfig(restarts=3, iterations=25, seed=2)
        w = (0.0, 1.0, 0.0, 1.0, 0.0)
        res = maximize_weighted(RegionKind.THEOREM1, ADDER, w, cfg)
        region = evaluate(RegionKind.THEOREM1, ADDER, res.argument)
        val, rates = support_value(region, np.asarray(w))
        assert val == pytest.approx(res.value, abs=1e-9)
        assert rates.as_vector() == pytest.approx(res.rates.as_vector(), abs=1e-9)

    def test_threads_do_not_change_the_answer(self):
        w = (0, 1, 0, 0, 1)
        one = maximize_weighted(
            RegionKind.THEOREM1, BSC, w, SearchConfig(restarts=4, iterations=15, seed=9, threads=1)
        )
        two = maximize_weighted(
            RegionKind.THEOREM1, BSC, w, SearchConfig(restarts=4, iterations=15, seed=9, threads=2)
        )
        assert one.value == two.value
        assert one.trace == two.trace

    def test_infeasible_floor_scores_below_minus_one_with_no_rates(self):
        cfg = SearchConfig(restarts=2, iterations=10, seed=0)
        res = maximize_weighted(
            RegionKind.THEOREM1_NO_BINNING,
            BSC,
            (0, 1, 0, 0, 0),
            cfg,
            floor=(0, 0, 0, 2.5, 0),
        )
        assert res.value <= -1.0
        assert res.rates is None

    def test_feasible_floor_is_respected(self):
        cfg = SearchConfig(restarts=4, iterations=30, seed=1)
        res = maximize_weighted(
            RegionKind.THEOREM1, BSC, (0, 1, 0, 0, 0), cfg, floor=(0, 0, 0, 0.1, 0)
        )
        assert res.rates is not None
        assert res.rates.r_z_p >= 0.1 - 1e-9
        # private Y rate plus private Z rate never exceeds H(Y) = 1 here
        # (data processing: H(Y|U) + I(U;Z) <= H(Y) when Y = X), so the
        # floor provably costs Y rate relative to the unconstrained 1.0
        assert 0.0 <= res.value <= 0.9 + 1e-6

    def test_enforce_x_functional_constrains_the_argument(self):
        cfg = SearchConfig(restarts=4, iterations=20, seed=4, enforce_x_functional=True)
        res = maximize_weighted(RegionKind.THEOREM1_NO_BINNING, ADDER, (0, 1, 0, 1, 0), cfg)
        assert check_x_functional(ADDER, res.argument)

    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            maximize_weighted(RegionKind.THEOREM1, BSC, (1.0, 2.0))


class TestMaximizeCustom:
    def test_matches_builtin_on_identical_search(self):
        kind = RegionKind.THEOREM1
        cfg = SearchConfig(v_card=6, u_card=6, restarts=3, iterations=20, seed=5)
        w = (0.0, 1.0, 0.0, 0.0, 0.0)
        warm = warm_starts(BSC, kind)
        custom = maximize_custom(
            lambda ch, a: evaluate(kind, ch, a), BSC, w, cfg, warm=warm
        )
        builtin = maximize_weighted(kind, BSC, w, cfg)
        assert custom.value == pytest.approx(builtin.value, abs=1e-12)
        assert custom.trace == pytest.approx(builtin.trace, abs=1e-12)


class TestRateYSlice:
    def test_bsc_full_y_rate_at_zero_z(self):
        # the max over auxiliaries is H(Y) = 1, reached at constant (V, U)
        cfg = SearchConfig(v_card=1, u_card=1, restarts=3, iterations=60, seed=0)
        res = maximize_rate_Y(RegionKind.THEOREM1, BSC, 0.0, cfg)
        assert res.value == pytest.approx(1.0, abs=1e-4)
        assert res.value <= 1.0 + 1e-9
        assert res.rates is not None
        assert res.rates.r_z_p + res.rates.r_z_c == pytest.approx(0.0, abs=1e-12)

    def test_unreachable_z_rate_reports_negative_value(self):
        cfg = SearchConfig(restarts=2, iterations=10, seed=0)
        res = maximize_rate_Y(RegionKind.THEOREM1, BSC, 3.0, cfg)
        assert res.value < 0
        assert res.rates is None

    def test_slice_agrees_with_direct_evaluation_at_argument(self):
        cfg = SearchConfig(restarts=3, iterations=30, seed=1)
        r_z = 0.2
        res = maximize_rate_Y(RegionKind.THEOREM1, ADDER, r_z, cfg)
        direct = max_rate_Y_given_Z(RegionKind.THEOREM1, ADDER, res.argument, r_z)
        assert direct == pytest.approx(res.value, abs=1e-9)


class TestCertificates:
    def test_interior_point_gets_certificate(self):
        t = RateTuple(0.0, 0.5, 0.0, 0.0, 0.0)
        aux = find_certificate(
            RegionKind.THEOREM1, BSC, t, SearchConfig(restarts=3, iterations=15, seed=0)
        )
        assert aux is not None
        assert contains(evaluate(RegionKind.THEOREM1, BSC, aux), t).ok

    def test_hopeless_point_returns_none(self):
        t = RateTuple(0.0, 3.0, 0.0, 0.0, 0.0)
        cfg = SearchConfig(restarts=2, iterations=10, seed=0)
        assert find_certificate(RegionKind.THEOREM1, BSC, t, cfg) is None
        res = certificate_search(RegionKind.THEOREM1, BSC, t, cfg)
        assert res.value < 0
        assert res.rates == t
