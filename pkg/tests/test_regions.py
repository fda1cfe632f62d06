"""Region evaluation: constraint structure, membership, and support values."""

import numpy as np
import pytest

from oracle_values import hb
from sdbc.channels import (
    aux_from_px,
    make_adder_erasure,
    make_aux,
    make_bsc_pair,
)
from sdbc.pmf_optimizer import symmetric_adder_search
from sdbc.regions import (
    MEMBERSHIP_TOL,
    InfeasibleRateError,
    RateTuple,
    RegionKind,
    check_x_functional,
    contains,
    evaluate,
    max_rate_Y_given_Z,
    split_rates,
    support_value,
)


def random_aux(rng, v_size, u_size, x_size):
    p_vu = rng.dirichlet(np.ones(v_size * u_size)).reshape(v_size, u_size)
    p_x_u = rng.dirichlet(np.ones(x_size), size=u_size)
    return make_aux(p_vu, p_x_u)


# ---------------------------------------------------------------------------
# rate tuples
# ---------------------------------------------------------------------------

def test_rate_tuple_totals_and_vector_roundtrip():
    t = RateTuple(0.1, 0.2, 0.3, 0.4, 0.5)
    assert t.r_y == pytest.approx(0.5)
    assert t.r_z == pytest.approx(0.9)
    t2 = RateTuple.from_vector(t.as_vector())
    assert t2 == t


def test_rate_tuple_rejects_negative_rates():
    with pytest.raises(ValueError):
        RateTuple(0.0, -0.2, 0.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# constraint structure
# ---------------------------------------------------------------------------

def test_inner_region_emits_exactly_five_constraints():
    c = make_adder_erasure(0.6)
    a = random_aux(np.random.default_rng(0), 2, 3, 4)
    region = evaluate(RegionKind.THEOREM1, c, a)
    assert len(region.constraints) == 5
    assert region.common_message


def test_no_binning_variant_appends_three_rows():
    c = make_adder_erasure(0.6)
    a = random_aux(np.random.default_rng(1), 2, 3, 4)
    t1 = evaluate(RegionKind.THEOREM1, c, a)
    nb = evaluate(RegionKind.THEOREM1_NO_BINNING, c, a)
    assert len(nb.constraints) == len(t1.constraints) + 3


def test_no_binning_region_is_contained_in_binned_region():
    c = make_adder_erasure(0.6)
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = random_aux(rng, 2, 3, 4)
        nb = evaluate(RegionKind.THEOREM1_NO_BINNING, c, a)
        t1 = evaluate(RegionKind.THEOREM1, c, a)
        t = rng.uniform(0.0, 0.7, size=5)
        if contains(nb, RateTuple(*t)).ok:
            assert contains(t1, RateTuple(*t)).ok


def test_variants_without_common_message_lock_slot_zero():
    c = make_adder_erasure(0.6)
    a = random_aux(np.random.default_rng(3), 1, 2, 4)
    region = evaluate(RegionKind.COR1_NO_MSI_AT_Z, c, a)
    assert not region.common_message
    assert 0 in region.fixed_slots


def test_region_to_dict_is_json_shaped():
    c = make_bsc_pair(0.25)
    region = evaluate(RegionKind.COR3_FMSI_AT_Z, c, aux_from_px([0.5, 0.5]))
    d = region.to_dict()
    assert d["kind"] == "Cor3_FmsiAtZ"
    assert all(len(con["coeffs"]) == 5 for con in d["constraints"])
    assert all(isinstance(con["rhs"], float) for con in d["constraints"])


# ---------------------------------------------------------------------------
# closed-form values at the structured family
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("p2", [0.05, 0.15, 0.3])
def test_two_point_family_attains_its_closed_form_corner(p2):
    p = 0.6
    c = make_adder_erasure(p)
    fam = symmetric_adder_search(p, p2)
    corner = RateTuple(0.0, hb(p2) + 1.0 - p2, 0.0, (1.0 - p) * (1.0 - hb(p2)), 0.0)
    member = contains(evaluate(RegionKind.COR1_NO_MSI_AT_Z, c, fam), corner)
    assert member.ok
    # the corner is on the boundary: at least one constraint is tight
    assert min(member.slacks) == pytest.approx(0.0, abs=1e-9)


def test_two_point_family_degenerates_correctly_at_p2_zero():
    p = 0.6
    c = make_adder_erasure(p)
    fam = symmetric_adder_search(p, 1e-12)
    corner = RateTuple(0.0, 1.0, 0.0, 1.0 - p, 0.0)
    assert contains(evaluate(RegionKind.COR1_NO_MSI_AT_Z, c, fam), corner).ok


# ---------------------------------------------------------------------------
# membership and slacks
# ---------------------------------------------------------------------------

def test_membership_slacks_sign_convention():
    c = make_bsc_pair(0.25)
    region = evaluate(RegionKind.COR3_FMSI_AT_Z, c, aux_from_px([0.5, 0.5]))
    inside = contains(region, RateTuple(0.0, 0.5, 0.0, 0.1, 0.0))
    assert inside.ok and np.all(inside.slacks >= -MEMBERSHIP_TOL)
    outside = contains(region, RateTuple(0.0, 0.5, 0.0, 0.5, 0.0))
    assert not outside.ok and np.min(outside.slacks) < -MEMBERSHIP_TOL


def test_max_rate_y_matches_support_direction():
    c = make_adder_erasure(0.6)
    a = symmetric_adder_search(0.6, 0.2)
    region = evaluate(RegionKind.COR1_NO_MSI_AT_Z, c, a)
    r_z = 0.05
    best = max_rate_Y_given_Z(RegionKind.COR1_NO_MSI_AT_Z, c, a, r_z)
    # the completed point is a member and sits on the boundary
    t = split_rates(RegionKind.COR1_NO_MSI_AT_Z, best, r_z)
    member = contains(region, t)
    assert member.ok
    assert min(member.slacks) == pytest.approx(0.0, abs=1e-9)


def test_max_rate_y_raises_on_infeasible_z_rate():
    c = make_adder_erasure(0.6)
    a = symmetric_adder_search(0.6, 0.2)
    with pytest.raises(InfeasibleRateError):
        max_rate_Y_given_Z(RegionKind.COR1_NO_MSI_AT_Z, c, a, 3.0)


# ---------------------------------------------------------------------------
# support values
# ---------------------------------------------------------------------------

def test_support_value_is_feasible_and_dominates_samples():
    c = make_adder_erasure(0.6)
    rng = np.random.default_rng(4)
    for _ in range(10):
        a = random_aux(rng, 2, 3, 4)
        region = evaluate(RegionKind.THEOREM1, c, a)
        w = rng.dirichlet(np.ones(5))
        value, argmax = support_value(region, w)
        assert contains(region, argmax).ok
        assert value == pytest.approx(float(w @ argmax.as_vector()), abs=1e-9)
        # no sampled member may beat the support value
        for _ in range(50):
            t = rng.uniform(0.0, 1.5, size=5)
            if contains(region, RateTuple(*t)).ok:
                assert float(w @ t) <= value + 1e-7


def test_support_value_respects_floor_and_reports_empty():
    c = make_bsc_pair(0.25)
    region = evaluate(RegionKind.COR3_FMSI_AT_Z, c, aux_from_px([0.5, 0.5]))
    out = support_value(region, (0.0, 1.0, 0.0, 0.0, 0.0), floor=(0, 0, 0, 0.1, 0))
    assert out is not None
    value, argmax = out
    assert argmax.r_z_p >= 0.1 - 1e-12
    # an impossible floor empties the polytope
    assert support_value(region, (0, 1, 0, 0, 0), floor=(0, 0, 0, 5.0, 0)) is None


# ---------------------------------------------------------------------------
# rate placement and the functional-input check
# ---------------------------------------------------------------------------

def test_split_rates_uses_variant_slots():
    t = split_rates(RegionKind.COR1_NO_MSI_AT_Z, 0.7, 0.2)
    assert (t.r_y_p, t.r_z_p) == (0.7, 0.2)
    t4 = split_rates(RegionKind.COR4_FMSI_BOTH, 0.7, 0.2)
    assert (t4.r_y_c, t4.r_z_c) == (0.7, 0.2)
    t2 = split_rates(RegionKind.COR2_FMSI_AT_Y, 0.7, 0.2)
    assert t2.r_y_p == 0.7 and t2.r_z_c == 0.2


def test_check_x_functional_flags_soft_conditionals():
    c = make_bsc_pair(0.25)
    hard = aux_from_px([0.5, 0.5])
    # X | (Y, U) is deterministic here because Y = X reveals X
    assert check_x_functional(c, hard)
    c4 = make_adder_erasure(0.5)
    soft = make_aux(np.array([[1.0]]), np.array([[0.25, 0.25, 0.25, 0.25]]))
    # Y = x1 + x2 leaves X ambiguous at y = 1 under a uniform input
    assert not check_x_functional(c4, soft)
