"""Ascent over auxiliary-input distributions for rate-region objectives.

Once the auxiliary input is fixed, every quantity of interest here (weighted
rate maxima, boundary slices, membership slacks) is exact -- see
``sdbc.regions``.  What remains is the outer maximization over the auxiliary
law itself, i.e. over the joint p(v, u) and the rows of p(x | u).  This
module does that by multi-start exponentiated-gradient ascent:

* every iterate is a product of probability simplexes, updated
  multiplicatively, so no projection step is needed;
* gradients are central differences along multiplicative perturbations,
  costing two objective evaluations per strictly-positive coordinate;
* a coordinate that starts at exactly zero keeps multiplier zero forever,
  so structured warm starts (two-point input families, deterministic input
  maps) stay inside their structured family while free parameters move;
* with ``enforce_x_functional`` set, rows of p(x | u) are deterministic
  tables searched by discrete single-entry moves instead of continuous
  ascent, while p(v, u) continues to move multiplicatively;
* only improving steps are accepted, so per-restart progress is monotone.

Restarts are independent and deterministic given (seed, restart index); the
best value wins, with ties within 1e-9 resolved to the lowest restart index.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channels import (
    AuxiliaryInput,
    BroadcastChannel,
    aux_from_px,
    detect_adder_erasure,
    detect_bsc_pair,
    detect_function_erasure,
    make_aux,
)
from .info_kernel import binary_entropy_inv
from .regions import (
    MEMBERSHIP_TOL,
    InfeasibleRateError,
    RateTuple,
    RegionAtPmf,
    RegionKind,
    contains,
    evaluate,
    max_rate_Y_given_Z,
    split_rates,
    support_value,
)

__all__ = [
    "IMPROVEMENT_TOL",
    "SearchConfig",
    "OptResult",
    "p2_star",
    "symmetric_adder_search",
    "warm_starts",
    "maximize_weighted",
    "maximize_custom",
    "maximize_rate_Y",
    "find_certificate",
    "certificate_search",
]

#: gains below this count as "converged" for acceptance and budget reporting
IMPROVEMENT_TOL = 1e-9

#: central-difference step along multiplicative perturbations
_DIFF_STEP = 1e-5

#: consecutive non-improving iterations before a restart stops early
_STALE_LIMIT = 10

#: variants whose formulas mention the cloud variable V
_NEEDS_V = frozenset({RegionKind.THEOREM1, RegionKind.THEOREM1_NO_BINNING})

#: variants whose formulas depend on p(x) alone
_X_ONLY = frozenset({RegionKind.COR3_FMSI_AT_Z, RegionKind.COR4_FMSI_BOTH})


@dataclass(frozen=True)
class SearchConfig:
    """Budget and search-space shape for one ascent run.

    ``v_card`` / ``u_card`` of None defer to the region kind: variants whose
    formulas never mention V (or U) search with cardinality 1, the rest
    default to |X| + 4, enough auxiliary support for every polytope here.
    ``step_schedule`` is (initial step, per-iteration decay factor).
    ``enforce_x_functional`` restricts the search to deterministic input
    tables; see the module docstring.  ``threads`` bounds concurrent
    restarts and defaults to the SDBC_THREADS environment variable, else 1.
    """

    v_card: int | None = None
    u_card: int | None = None
    restarts: int = 12
    iterations: int = 80
    seed: int = 0
    step_schedule: tuple[float, float] = (0.5, 0.97)
    enforce_x_functional: bool = False
    threads: int | None = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.iterations < 0:
            raise ValueError(f"iterations must be >= 0, got {self.iterations}")
        for name in ("v_card", "u_card"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1, got {v}")
        init, decay = self.step_schedule
        if init <= 0 or not 0 < decay <= 1:
            raise ValueError(f"bad step_schedule {self.step_schedule!r}")


@dataclass(frozen=True)
class OptResult:
    """Outcome of one multi-start search.

    ``value`` is the best objective found and ``argument`` the auxiliary
    input attaining it; re-evaluating the objective at ``argument``
    reproduces ``value`` within 1e-9.  ``rates`` carries the maximizing
    rate tuple when the objective has one (weighted maxima, boundary
    slices), else the queried tuple (certificate searches).  ``trace``
    holds each restart's final best value, indexed by restart.
    ``budget_exhausted`` is True when the winning restart was still
    improving by more than 1e-9 at its final iteration, i.e. more
    iterations could plausibly help.
    """

    value: float
    argument: AuxiliaryInput
    rates: RateTuple | None
    restart_index: int
    trace: tuple[float, ...]
    budget_exhausted: bool


# ---------------------------------------------------------------------------
# structured warm starts
# ---------------------------------------------------------------------------

def p2_star(p: float) -> float:
    """Two-point-family parameter maximizing the adder-erasure sum rate."""
    return 1.0 / (1.0 + 2.0 ** (1.0 / p))


def symmetric_adder_search(p: float, p2: float, v_equals_u: bool = False) -> AuxiliaryInput:
    """Two-point satellite family for the adder-erasure channel.

    U picks one of two input laws on {0,1,2,3} that are reflections of each
    other and overlap on the middle symbols: row 0 puts mass (1-p2)/2 on
    symbols 0 and 2 and p2 on symbol 3, row 1 mirrors it.  Both rows induce
    the same composition on the adder output, giving H(Y|U) = h_b(p2)+1-p2,
    and the unerased Z-symbol separates them, giving
    I(U;Z) = (1-p)(1-h_b(p2)) under erasure probability ``p``.  The
    construction itself depends only on ``p2``; ``p`` is validated because
    the family is meaningful only alongside an adder-erasure channel.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be a probability, got {p!r}")
    if not 0.0 <= p2 <= 0.5:
        raise ValueError(f"p2 must lie in [0, 0.5], got {p2!r}")
    q = (1.0 - p2) / 2.0
    rows = np.array([[q, 0.0, q, p2], [p2, q, 0.0, q]])
    p_vu = np.diag([0.5, 0.5]) if v_equals_u else np.array([[0.5, 0.5]])
    return make_aux(p_vu, rows)


def _lift_v_equal(a: AuxiliaryInput) -> AuxiliaryInput:
    """Copy of an auxiliary input with the cloud variable set equal to U."""
    p_u = a.p_vu.mass.sum(axis=0)
    return make_aux(np.diag(p_u), a.p_x_given_u.rows.copy())


def _rank_selector_aux(f: Sequence[int], x_size: int) -> AuxiliaryInput | None:
    """U = rank of X inside its preimage class of f, X uniform.

    Each value of U then holds exactly one input per output value of f, so
    U is independent of Y = f(X) while still informative about X.  Only
    defined when all preimage classes have equal size.
    """
    classes: dict[int, list[int]] = {}
    for x in range(x_size):
        classes.setdefault(int(f[x]), []).append(x)
    sizes = {len(v) for v in classes.values()}
    if len(sizes) != 1:
        return None
    k = sizes.pop()
    rows = np.zeros((k, x_size))
    for xs in classes.values():
        for j, x in enumerate(sorted(xs)):
            rows[j, x] = 1.0 / len(classes)
    return make_aux(np.full((1, k), 1.0 / k), rows)


def _identity_aux(x_size: int) -> AuxiliaryInput:
    """U = X with X uniform; the rows are one-hot, hence a deterministic table."""
    return make_aux(np.full((1, x_size), 1.0 / x_size), np.eye(x_size))


def _is_deterministic_rows(a: AuxiliaryInput, tol: float = 1e-12) -> bool:
    return bool(np.all(a.p_x_given_u.rows.max(axis=1) >= 1.0 - tol))


def warm_starts(
    c: BroadcastChannel,
    kind: RegionKind,
    r_z: float | None = None,
    functional: bool = False,
) -> list[AuxiliaryInput]:
    """Structured starting points recognized from the channel's form.

    Adder-erasure channels get the two-point family at its sum-rate-optimal
    parameter, plus, when a target Z-rate is supplied, the parameter whose
    induced I(U;Z) matches it exactly.  The deterministic pair channel gets
    U = X.  Function-erasure channels get the rank-selector auxiliary
    (U independent of Y).  Variants over p(x) alone get the uniform input.
    When ``functional`` is set, only deterministic input tables survive and
    U = X is added.
    """
    kind = RegionKind(kind)
    if kind in _X_ONLY:
        return [aux_from_px(np.full(c.x_size, 1.0 / c.x_size))]
    out: list[AuxiliaryInput] = []
    p_add = detect_adder_erasure(c)
    if p_add is not None:
        out.append(symmetric_adder_search(p_add, p2_star(p_add)))
        if r_z is not None and p_add < 1.0 - 1e-12:
            t = 1.0 - r_z / (1.0 - p_add)
            if 0.0 <= t <= 1.0:
                out.append(symmetric_adder_search(p_add, binary_entropy_inv(t)))
    if detect_bsc_pair(c) is not None:
        out.append(_identity_aux(c.x_size))
    fe = detect_function_erasure(c)
    if fe is not None:
        sel = _rank_selector_aux(fe[0], c.x_size)
        if sel is not None:
            out.append(sel)
    if functional:
        out = [a for a in out if _is_deterministic_rows(a)]
        out.append(_identity_aux(c.x_size))
    if kind in _NEEDS_V:
        out = out + [_lift_v_equal(a) for a in out]
    return out


# ---------------------------------------------------------------------------
# exponentiated-gradient core
# ---------------------------------------------------------------------------

def _renorm(vec: np.ndarray) -> np.ndarray:
    return vec / vec.sum()


def _block_grad(f: Callable[[np.ndarray], float], theta: np.ndarray) -> np.ndarray:
    """Central-difference gradient along multiplicative coordinate bumps."""
    g = np.zeros_like(theta)
    up = math.exp(_DIFF_STEP)
    dn = math.exp(-_DIFF_STEP)
    for i, ti in enumerate(theta):
        if ti <= 0.0:
            continue
        plus = theta.copy()
        plus[i] = ti * up
        minus = theta.copy()
        minus[i] = ti * dn
        g[i] = (f(_renorm(plus)) - f(_renorm(minus))) / (2.0 * _DIFF_STEP)
    return g


def _eg_step(theta: np.ndarray, g: np.ndarray, eta: float) -> np.ndarray:
    gn = g / max(1.0, float(np.abs(g).max()))
    return _renorm(theta * np.exp(eta * gn))


def _best_row_flip(
    objective: Callable[[np.ndarray, np.ndarray], float],
    p_vu: np.ndarray,
    p_x_u: np.ndarray,
    best: float,
) -> tuple[float, np.ndarray] | None:
    """Best single-entry change to a deterministic table, if any improves.

    Tries moving each row's unit mass to every other input symbol and
    returns (value, new rows) for the best strictly-improving move.
    """
    top: tuple[float, np.ndarray] | None = None
    u_card, x_size = p_x_u.shape
    for k in range(u_card):
        if np.count_nonzero(p_x_u[k]) != 1:
            continue
        cur = int(np.argmax(p_x_u[k]))
        for x in range(x_size):
            if x == cur:
                continue
            rows2 = p_x_u.copy()
            rows2[k] = 0.0
            rows2[k, x] = 1.0
            val = objective(p_vu, rows2)
            if val > best and (top is None or val > top[0]):
                top = (val, rows2)
    return top


def _ascend(
    objective: Callable[[np.ndarray, np.ndarray], float],
    p_vu: np.ndarray,
    p_x_u: np.ndarray,
    cfg: SearchConfig,
) -> tuple[float, np.ndarray, np.ndarray, bool]:
    """One monotone ascent run; returns (value, p_vu, p_x_u, exhausted)."""
    p_vu = np.array(p_vu, dtype=float)
    p_x_u = np.array(p_x_u, dtype=float)
    step_init, step_decay = cfg.step_schedule
    best = objective(p_vu, p_x_u)
    stale = 0
    last_gain = 0.0
    ran_full = True
    for t in range(cfg.iterations):
        improved = False

        g_vu = None
        if p_vu.size > 1 and np.count_nonzero(p_vu) > 1:
            shape = p_vu.shape
            g_vu = _block_grad(
                lambda b: objective(b.reshape(shape), p_x_u), p_vu.ravel()
            )
        g_rows: list[np.ndarray | None] = [None] * p_x_u.shape[0]
        if not cfg.enforce_x_functional:
            for k in range(p_x_u.shape[0]):
                if p_x_u.shape[1] > 1 and np.count_nonzero(p_x_u[k]) > 1:
                    def fk(b: np.ndarray, k: int = k) -> float:
                        rows2 = p_x_u.copy()
                        rows2[k] = b
                        return objective(p_vu, rows2)
                    g_rows[k] = _block_grad(fk, p_x_u[k].copy())

        if g_vu is not None or any(g is not None for g in g_rows):
            eta0 = step_init * step_decay**t
            for eta in (eta0, eta0 / 4.0, eta0 / 16.0):
                cand_vu = (
                    p_vu if g_vu is None
                    else _eg_step(p_vu.ravel(), g_vu, eta).reshape(p_vu.shape)
                )
                cand_rows = p_x_u.copy()
                for k, g in enumerate(g_rows):
                    if g is not None:
                        cand_rows[k] = _eg_step(p_x_u[k], g, eta)
                val = objective(cand_vu, cand_rows)
                if val > best:
                    last_gain = val - best
                    best = val
                    p_vu, p_x_u = cand_vu, cand_rows
                    improved = True
                    break

        if cfg.enforce_x_functional:
            flip = _best_row_flip(objective, p_vu, p_x_u, best)
            if flip is not None:
                last_gain = flip[0] - best
                best, p_x_u = flip[0], flip[1]
                improved = True

        if improved:
            stale = 0
        else:
            stale += 1
            if stale >= _STALE_LIMIT or (g_vu is None and not cfg.enforce_x_functional
                                         and all(g is None for g in g_rows)):
                ran_full = False
                break
    exhausted = ran_full and cfg.iterations > 0 and last_gain > IMPROVEMENT_TOL
    return best, p_vu, p_x_u, exhausted


# ---------------------------------------------------------------------------
# multi-start driver
# ---------------------------------------------------------------------------

def _resolved_cards(kind: RegionKind | None, c: BroadcastChannel, cfg: SearchConfig) -> tuple[int, int]:
    if cfg.v_card is not None:
        v = cfg.v_card
    else:
        v = c.x_size + 4 if (kind in _NEEDS_V) else 1
    if cfg.u_card is not None:
        u = cfg.u_card
    else:
        u = 1 if (kind in _X_ONLY) else c.x_size + 4
    return v, u


def _worker_count(cfg: SearchConfig, n_tasks: int) -> int:
    if cfg.threads is not None:
        w = cfg.threads
    else:
        w = int(os.environ.get("SDBC_THREADS", "1") or "1")
    return max(1, min(w, n_tasks))


def _drive(
    objective: Callable[[np.ndarray, np.ndarray], float],
    c: BroadcastChannel,
    cards: tuple[int, int],
    cfg: SearchConfig,
    warm: Sequence[AuxiliaryInput],
) -> OptResult:
    v_card, u_card = cards
    starts: list[tuple[np.ndarray, np.ndarray]] = []
    for a in list(warm)[: cfg.restarts]:
        starts.append((a.p_vu.mass.copy(), a.p_x_given_u.rows.copy()))
    for i in range(cfg.restarts - len(starts)):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(i,)))
        p_vu = rng.dirichlet(np.ones(v_card * u_card)).reshape(v_card, u_card)
        if cfg.enforce_x_functional:
            rows = np.zeros((u_card, c.x_size))
            rows[np.arange(u_card), rng.integers(0, c.x_size, size=u_card)] = 1.0
        else:
            rows = rng.dirichlet(np.ones(c.x_size), size=u_card)
        starts.append((p_vu, rows))

    def run(start: tuple[np.ndarray, np.ndarray]):
        return _ascend(objective, start[0], start[1], cfg)

    workers = _worker_count(cfg, len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run, starts))
    else:
        results = [run(s) for s in starts]

    top = max(r[0] for r in results)
    widx = next(i for i, r in enumerate(results) if r[0] >= top - 1e-9)
    val, p_vu, p_x_u, exhausted = results[widx]
    return OptResult(
        value=float(val),
        argument=make_aux(p_vu, p_x_u),
        rates=None,
        restart_index=widx,
        trace=tuple(float(r[0]) for r in results),
        budget_exhausted=exhausted,
    )


# ---------------------------------------------------------------------------
# objectives and public entry points
# ---------------------------------------------------------------------------

def _check_weights(weights: Sequence[float]) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (5,):
        raise ValueError(f"weights must have 5 entries, got shape {w.shape}")
    if np.any(w < 0) or not np.any(w > 0):
        raise ValueError("weights must be nonnegative and not all zero")
    return w


def _weighted_objective(
    region_fn: Callable[[BroadcastChannel, AuxiliaryInput], RegionAtPmf],
    c: BroadcastChannel,
    w: np.ndarray,
    floor: np.ndarray | None,
) -> Callable[[np.ndarray, np.ndarray], float]:
    def f(p_vu: np.ndarray, p_x_u: np.ndarray) -> float:
        region = region_fn(c, make_aux(p_vu, p_x_u))
        res = support_value(region, w, floor)
        if res is not None:
            return res[0]
        # the floor made the polytope empty: score by how far the floor
        # point itself is from feasibility, so ascent can cross into it
        v = np.zeros(5) if floor is None else floor.copy()
        if region.fixed_slots:
            v[list(region.fixed_slots)] = 0.0
        viol = float(np.max(region.coeff_matrix() @ v - region.rhs_vector()))
        return -1.0 - max(0.0, viol)

    return f


def _with_rates(
    result: OptResult,
    region_fn: Callable[[BroadcastChannel, AuxiliaryInput], RegionAtPmf],
    c: BroadcastChannel,
    w: np.ndarray,
    floor: np.ndarray | None,
) -> OptResult:
    res = support_value(region_fn(c, result.argument), w, floor)
    return OptResult(
        value=result.value,
        argument=result.argument,
        rates=res[1] if res is not None else None,
        restart_index=result.restart_index,
        trace=result.trace,
        budget_exhausted=result.budget_exhausted,
    )


def maximize_custom(
    region_fn: Callable[[BroadcastChannel, AuxiliaryInput], RegionAtPmf],
    c: BroadcastChannel,
    weights: Sequence[float],
    cfg: SearchConfig | None = None,
    floor: Sequence[float] | None = None,
    warm: Sequence[AuxiliaryInput] | None = None,
) -> OptResult:
    """Maximize weights . rates over a caller-supplied region map.

    ``region_fn(channel, aux)`` must return a :class:`RegionAtPmf`; the
    search treats it as a black box, so independently coded outer bounds
    can be optimized with the same machinery and seeds as the built-in
    variants.  Cardinalities default to (1, |X| + 4) unless set in ``cfg``.
    """
    cfg = cfg or SearchConfig()
    w = _check_weights(weights)
    fl = None if floor is None else np.asarray(floor, dtype=float)
    v = cfg.v_card if cfg.v_card is not None else 1
    u = cfg.u_card if cfg.u_card is not None else c.x_size + 4
    result = _drive(_weighted_objective(region_fn, c, w, fl), c, (v, u), cfg, warm or [])
    return _with_rates(result, region_fn, c, w, fl)


def maximize_weighted(
    kind: RegionKind,
    c: BroadcastChannel,
    weights: Sequence[float],
    cfg: SearchConfig | None = None,
    floor: Sequence[float] | None = None,
    r_z_hint: float | None = None,
) -> OptResult:
    """Maximize weights . rates over a region variant and its auxiliaries.

    The first restarts are the recognized structured warm starts when the
    channel has any (see :func:`warm_starts`); remaining restarts are
    random.  With a ``floor``, the maximization is constrained to
    rates >= floor and the reported value is -1 - violation when no visited
    auxiliary makes the floor feasible.
    """
    kind = RegionKind(kind)
    cfg = cfg or SearchConfig()
    w = _check_weights(weights)
    fl = None if floor is None else np.asarray(floor, dtype=float)
    cards = _resolved_cards(kind, c, cfg)
    warm = warm_starts(c, kind, r_z=r_z_hint, functional=cfg.enforce_x_functional)
    region_fn = lambda ch, a: evaluate(kind, ch, a)  # noqa: E731
    result = _drive(_weighted_objective(region_fn, c, w, fl), c, cards, cfg, warm)
    return _with_rates(result, region_fn, c, w, fl)


def maximize_rate_Y(
    kind: RegionKind,
    c: BroadcastChannel,
    r_z: float,
    cfg: SearchConfig | None = None,
) -> OptResult:
    """Largest R_Y compatible with total Z-rate ``r_z`` over auxiliaries.

    Auxiliaries at which ``r_z`` is infeasible score -1 - violation, which
    keeps ascent directed toward feasibility without special casing.
    """
    kind = RegionKind(kind)
    cfg = cfg or SearchConfig()
    cards = _resolved_cards(kind, c, cfg)
    warm = warm_starts(c, kind, r_z=r_z, functional=cfg.enforce_x_functional)
    y_slot = int(np.argmax(split_rates(kind, 1.0, 0.0).as_vector()))

    def objective(p_vu: np.ndarray, p_x_u: np.ndarray) -> float:
        aux = make_aux(p_vu, p_x_u)
        try:
            return max_rate_Y_given_Z(kind, c, aux, r_z)
        except InfeasibleRateError:
            region = evaluate(kind, c, aux)
            base = split_rates(kind, 0.0, r_z).as_vector()
            viol = 0.0
            for con in region.constraints:
                if con.coeffs[y_slot] == 0:
                    viol = max(viol, float(np.dot(con.coeffs, base)) - con.rhs)
            return -1.0 - max(0.0, viol)

    result = _drive(objective, c, cards, cfg, warm)
    rates = split_rates(kind, result.value, r_z) if result.value >= 0.0 else None
    return OptResult(
        value=result.value,
        argument=result.argument,
        rates=rates,
        restart_index=result.restart_index,
        trace=result.trace,
        budget_exhausted=result.budget_exhausted,
    )


def certificate_search(
    kind: RegionKind,
    c: BroadcastChannel,
    t: RateTuple,
    cfg: SearchConfig | None = None,
) -> OptResult:
    """Maximize the minimum constraint slack at ``t`` over auxiliaries.

    The returned ``value`` is the best minimum slack found; ``t`` lies in
    the region's union over visited auxiliaries iff value >= -MEMBERSHIP_TOL.
    """
    kind = RegionKind(kind)
    cfg = cfg or SearchConfig()
    cards = _resolved_cards(kind, c, cfg)
    warm = warm_starts(c, kind, functional=cfg.enforce_x_functional)

    def objective(p_vu: np.ndarray, p_x_u: np.ndarray) -> float:
        region = evaluate(kind, c, make_aux(p_vu, p_x_u))
        return float(np.min(contains(region, t).slacks))

    result = _drive(objective, c, cards, cfg, warm)
    return OptResult(
        value=result.value,
        argument=result.argument,
        rates=t,
        restart_index=result.restart_index,
        trace=result.trace,
        budget_exhausted=result.budget_exhausted,
    )


def find_certificate(
    kind: RegionKind,
    c: BroadcastChannel,
    t: RateTuple,
    cfg: SearchConfig | None = None,
) -> AuxiliaryInput | None:
    """Auxiliary input whose polytope contains ``t``, or None if none found.

    Absence is not a proof of non-membership -- only that the budgeted
    search found no certificate.  A returned auxiliary always satisfies
    ``contains(evaluate(kind, c, a), t).ok``.
    """
    result = certificate_search(kind, c, t, cfg)
    if result.value >= -MEMBERSHIP_TOL:
        return result.argument
    return None
