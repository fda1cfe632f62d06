"""Acceptance suite: one pass/fail line per shipping criterion.

Every test pins the contracted tolerance and search budget.  Expected
values come from closed forms or from the independently derived constants
in ``oracle_values`` — never from the code under test.  Criteria that
bundle several distinct artifacts are split into lettered parts so each
artifact still gets its own line; the numbering is stable so a failure
can be traced straight back to the shipping contract.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from oracle_values import (
    ADDER_SUM_CAPACITY,
    BOUNDARY_GRID_06,
    BSC_QUARTER_CORNERS,
    BSC_QUARTER_MAX_SUM,
    LOG2_3,
    RZ_STAR_06,
    adder_boundary_ry,
)
from sdbc.channels import (
    aux_from_px,
    make_adder_erasure,
    make_aux,
    make_bsc_pair,
    make_function_erasure,
)
from sdbc.feedback import (
    example4_uselessness_check,
    theorem3_uselessness_check,
)
from sdbc.info_kernel import (
    JointPmf,
    conditional_entropy,
    csiszar_residual,
    entropy,
    functional_representation,
    mutual_information,
)
from sdbc.montecarlo import CodeParams, run_trials
from sdbc.pmf_optimizer import SearchConfig, maximize_rate_Y, maximize_weighted
from sdbc.polyhedra import theorem1_derivation_check
from sdbc.regions import RateTuple, RegionKind, contains, evaluate

CLI = [sys.executable, "-m", "sdbc.cli"]


def test_criterion_01_elimination_matches_the_reduced_region():
    """100 sampled valuations certify the eliminated system <-> direct system."""
    start = time.monotonic()
    report = theorem1_derivation_check(samples=100, seed=7)
    elapsed = time.monotonic() - start
    assert report["equivalent"] is True
    assert report["failed_valuations_forward"] == []
    assert report["failed_valuations_backward"] == []
    assert report["eliminated_variables"] == ["rt_c", "rt_y", "rt_z"]
    assert elapsed < 60.0


def test_criterion_02_sum_rate_closed_forms():
    """Optimized Cor2 sum rate meets its closed form across erasure rates."""
    start = time.monotonic()
    misses = []
    for p in (0.3, 0.5, 0.8):
        cfg = SearchConfig(restarts=6, iterations=60, seed=7)
        res = maximize_weighted(
            RegionKind.COR2_FMSI_AT_Y, make_adder_erasure(p), (1, 1, 1, 1, 1), cfg
        )
        diff = abs(res.value - ADDER_SUM_CAPACITY[p])
        if diff > 1e-3:
            misses.append(f"p={p}: |{res.value:.9f} - closed form| = {diff:.2e}")
    cfg = SearchConfig(restarts=2, iterations=25, seed=7)
    exact = maximize_weighted(
        RegionKind.COR2_FMSI_AT_Y, make_adder_erasure(1.0), (1, 1, 1, 1, 1), cfg
    )
    if abs(exact.value - LOG2_3) > 1e-6:
        misses.append(f"p=1: |{exact.value:.12f} - log2(3)| = {abs(exact.value - LOG2_3):.2e}")
    elapsed = time.monotonic() - start
    assert not misses, "; ".join(misses)
    assert elapsed < 300.0


def test_criterion_03_boundary_grid_matches_the_parametric_curve():
    """Max R_Y over 10 R_Z grid points tracks the closed-form boundary."""
    c = make_adder_erasure(0.6)
    worst = 0.0
    for i, r_z in enumerate(np.linspace(RZ_STAR_06, 0.4, 10)):
        cfg = SearchConfig(restarts=3, iterations=40, seed=0)
        res = maximize_rate_Y(RegionKind.COR1_NO_MSI_AT_Z, c, float(r_z), cfg)
        target = adder_boundary_ry(float(r_z))
        assert target == pytest.approx(BOUNDARY_GRID_06[i][1], abs=1e-12)
        worst = max(worst, abs(res.value - target))
    assert worst <= 1e-3, f"worst boundary deviation {worst:.2e} exceeds 1e-3"


@pytest.fixture(scope="module")
def certified_gains(tmp_path_factory):
    """Run ``feedback certify --p 0.6`` (both modes) once through the CLI."""
    out = tmp_path_factory.mktemp("acceptance") / "gains.json"
    start = time.monotonic()
    proc = subprocess.run(
        CLI + ["feedback", "certify", "--p", "0.6", "--out", str(out)],
        capture_output=True,
        text=True,
        timeout=600,
    )
    return proc, out, time.monotonic() - start


def test_criterion_04a_certified_gain_with_side_information(certified_gains):
    """P-MSI-at-Y mode: margin > 1e-4, artifact re-validates via the CLI."""
    proc, out, elapsed = certified_gains
    assert proc.returncode == 0, proc.stderr
    assert elapsed < 600.0
    doc = json.loads(out.read_text())
    entry = doc["certificates"]["pmsi_y"]
    assert entry["validation"]["ok"] is True
    assert entry["validation"]["margin"] > 1e-4
    verify = subprocess.run(
        CLI + ["feedback", "verify", str(out)],
        capture_output=True,
        text=True,
        timeout=600,
    )
    assert verify.returncode == 0, verify.stderr
    assert json.loads(verify.stdout)["reports"]["pmsi_y"]["ok"] is True


def test_criterion_04b_certified_gain_without_side_information(certified_gains):
    """No-MSI mode: margin > 1e-4 is the contracted threshold.

    The two-phase construction at p = 0.6 yields a strictly positive,
    re-validating margin, but every search strategy tried (structured
    families, budget escalation, feedback-rate sweeps) tops out near
    7e-6 — see the analysis ledger in /root/notes/decisions.md.  The
    threshold is asserted at full contracted strength anyway; this line
    failing records the shortfall honestly instead of hiding it.
    """
    proc, out, _ = certified_gains
    assert proc.returncode == 0, proc.stderr
    entry = json.loads(out.read_text())["certificates"]["no_msi"]
    assert entry["validation"]["ok"] is True
    margin = entry["validation"]["margin"]
    assert margin > 1e-4, (
        f"no-MSI margin {margin:.3e} is positive and re-validates but does not "
        f"clear the contracted 1e-4 threshold (best known is about 7e-6)"
    )


def test_criterion_04c_precondition_error_below_half():
    """No-MSI certification at p = 0.4 must exit with the input-error code."""
    proc = subprocess.run(
        CLI + ["feedback", "certify", "--p", "0.4", "--mode", "no_msi"],
        capture_output=True,
        text=True,
        timeout=600,
    )
    assert proc.returncode == 2
    assert "no-msi-gain-requires-p-above-half" in proc.stderr


def test_criterion_05a_feedback_useless_with_fmsi_at_z():
    """20 weighted sums with/without feedback agree to 1e-6 on the binary pair."""
    report = theorem3_uselessness_check(make_bsc_pair(0.25))
    assert report["ok"] is True
    assert len(report["rows"]) == 20
    assert report["max_diff"] <= 1e-6


@pytest.mark.parametrize("p", [0.3, 0.5])
def test_criterion_05b_feedback_useless_on_the_mod2_channel(p):
    """Three-way agreement within 2e-3 for f(x) = x mod 2 with erasures."""
    report = example4_uselessness_check([0, 1, 0, 1], p, budget=4, seed=0)
    assert report["ok"] is True
    assert report["max_spread"] <= 2e-3


def test_criterion_06a_binning_point_certified_inside():
    """(0, 0.5, 0, 0.5, 0) is inside the Cor3 region at X ~ Ber(1/2)."""
    c = make_function_erasure([0, 1], 0.5)
    region = evaluate(RegionKind.COR3_FMSI_AT_Z, c, aux_from_px([0.5, 0.5]))
    member = contains(region, RateTuple(0.0, 0.5, 0.0, 0.5, 0.0))
    assert member.ok, f"slacks: {member.slacks}"


def test_criterion_06b_no_binning_search_falls_short():
    """Without binned cloud centers the same corner is out of search reach.

    Best found R_Y + R_Z_p subject to R_Z_p >= 0.49, X functional, and 50
    restarts must fall short of 1.0 by at least 0.01.  A search cannot
    prove non-membership; the repeatable shortfall margin is the claim.
    """
    c = make_function_erasure([0, 1], 0.5)
    cfg = SearchConfig(restarts=50, iterations=30, seed=0, enforce_x_functional=True)
    res = maximize_weighted(
        RegionKind.THEOREM1_NO_BINNING,
        c,
        (0, 1, 1, 1, 0),
        cfg,
        floor=(0, 0, 0, 0.49, 0),
    )
    assert res.rates is not None and res.rates.r_z_p >= 0.49 - 1e-9
    assert res.value <= 1.0 - 0.01, f"no-binning search reached {res.value:.9f}"


def test_criterion_07a_total_error_rate_decreases_with_blocklength():
    """Interior point on the binary pair: errors shrink as n grows."""
    start = time.monotonic()
    c = make_bsc_pair(0.25)
    a = make_aux([[1.0]], [[0.5, 0.5]])
    totals = []
    for n in (6, 9, 12):
        params = CodeParams(
            n=n,
            rates=RateTuple(0.0, 0.4, 0.0, 0.0, 0.0),
            aux_rates=(0.0, 0.8, 0.0),
            seed=7,
        )
        totals.append(run_trials(c, a, params, 2000).total_error_rate)
    assert totals[0] > totals[1] > totals[2], f"totals not decreasing: {totals}"
    assert time.monotonic() - start < 600.0


def test_criterion_07b_exterior_point_overwhelms_the_decoder():
    """R_Y = H(Y) + 0.2 forces a Y-error rate of at least one half."""
    c = make_bsc_pair(0.25)
    a = make_aux([[1.0]], [[0.5, 0.5]])
    params = CodeParams(
        n=12,
        rates=RateTuple(0.0, 0.6, 0.6, 0.0, 0.0),
        aux_rates=(0.0, 0.65, 0.0),
        seed=7,
    )
    stats = run_trials(c, a, params, 2000)
    assert stats.y_errors / stats.trials >= 0.5


def test_criterion_08a_telescoping_identity_residual():
    """Csiszar-style residual below 1e-10 on 100 random paired-sequence joints."""
    rng = np.random.default_rng(2026)
    worst = 0.0
    for _ in range(100):
        sizes = rng.integers(2, 4, size=6)
        axes = [(f"A{i + 1}", int(sizes[i])) for i in range(3)]
        axes += [(f"B{i + 1}", int(sizes[3 + i])) for i in range(3)]
        mass = rng.dirichlet(np.ones(int(np.prod(sizes))))
        j = JointPmf(axes, mass.reshape([int(s) for s in sizes]))
        worst = max(worst, abs(csiszar_residual(j)))
    assert worst < 1e-10, f"worst residual {worst:.3e}"


def test_criterion_08b_functional_representation_roundtrip():
    """Z = g(X, S) reconstructions: TV < 1e-12 and S independent of X."""
    rng = np.random.default_rng(77)
    worst_tv = 0.0
    worst_dep = 0.0
    for _ in range(50):
        xs, zs = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        joint = rng.dirichlet(np.ones(xs * zs)).reshape(xs, zs)
        rep = functional_representation(JointPmf([("X", xs), ("Z", zs)], joint))
        s = rep.s_pmf.mass
        p_x = joint.sum(axis=1)
        full = np.zeros((xs, len(s), zs))
        for x in range(xs):
            for si, w in enumerate(s):
                full[x, si, rep.g_table[x, si]] += p_x[x] * w
        worst_tv = max(worst_tv, 0.5 * np.abs(full.sum(axis=1) - joint).sum())
        marg_xs = full.sum(axis=2)
        worst_dep = max(worst_dep, np.abs(marg_xs - np.outer(p_x, s)).max())
        q = JointPmf([("X", xs), ("S", len(s))], marg_xs)
        worst_dep = max(worst_dep, abs(mutual_information(q, "X", "S")))
    assert worst_tv < 1e-12, f"worst round-trip TV {worst_tv:.3e}"
    assert worst_dep < 1e-12, f"worst independence deviation {worst_dep:.3e}"


def test_criterion_08c_chain_rule_and_nonnegativity_properties():
    """Entropy/MI identities and inequalities hold on 500 random joints."""
    rng = np.random.default_rng(11)
    for _ in range(500):
        sizes = [int(s) for s in rng.integers(2, 5, size=3)]
        mass = rng.dirichlet(np.ones(int(np.prod(sizes)))).reshape(sizes)
        j = JointPmf([("A", sizes[0]), ("B", sizes[1]), ("C", sizes[2])], mass)
        h_a, h_b = entropy(j, "A"), entropy(j, "B")
        h_ab = entropy(j, ["A", "B"])
        assert 0.0 <= h_a <= np.log2(sizes[0]) + 1e-12
        # chain rule, both orders, against the jointly computed entropy
        assert h_ab == pytest.approx(h_a + conditional_entropy(j, "B", "A"), abs=1e-10)
        assert h_ab == pytest.approx(h_b + conditional_entropy(j, "A", "B"), abs=1e-10)
        # mutual-information decomposition and symmetry
        i_ab = mutual_information(j, "A", "B")
        assert i_ab == pytest.approx(mutual_information(j, "B", "A"), abs=1e-10)
        assert mutual_information(j, "A", ["B", "C"]) == pytest.approx(
            i_ab + mutual_information(j, "A", "C", "B"), abs=1e-10
        )
        # nonnegativity and conditioning-reduces-entropy
        assert i_ab >= 0.0
        assert mutual_information(j, "A", "C", "B") >= 0.0
        assert conditional_entropy(j, "A", ["B", "C"]) <= conditional_entropy(
            j, "A", "B"
        ) + 1e-12


def test_criterion_09a_region_bound_triple():
    """Cor3 constraint values on the binary pair equal the closed-form triple."""
    region = evaluate(
        RegionKind.COR3_FMSI_AT_Z, make_bsc_pair(0.25), aux_from_px([0.5, 0.5])
    )
    rhs = sorted(con.rhs for con in region.constraints)
    assert len(rhs) == 3
    for got, want in zip(rhs, sorted(BSC_QUARTER_CORNERS)):
        assert got == pytest.approx(want, abs=1e-9)


def test_criterion_09b_max_sum_rate():
    """Optimized Cor4 sum rate on the binary pair hits 2 - h_b(1/4)."""
    cfg = SearchConfig(restarts=4, iterations=40, seed=0)
    res = maximize_weighted(
        RegionKind.COR4_FMSI_BOTH, make_bsc_pair(0.25), (0, 0, 1, 0, 1), cfg
    )
    assert res.value == pytest.approx(BSC_QUARTER_MAX_SUM, abs=1e-3)
