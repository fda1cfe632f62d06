"""Rate-region inequality systems for the semideterministic broadcast channel.

All region variants live here, each as a list of linear constraints on the
rate tuple (R, R_Y^p, R_Y^c, R_Z^p, R_Z^c) whose right-hand sides are
information measures of the joint induced by a channel and an auxiliary
input.  R_Y = R_Y^p + R_Y^c is receiver Y's total message rate and R_Y^c the
part of it known in advance at receiver Z (symmetrically for Z).  The
reported region is the union of these polytopes over auxiliary inputs; no
convex-hull step is applied.

Coordinates outside a variant's regime (the common rate R for variants
without a common message, R_Y^c for the variant where Y's message is fully
known at Z) are fixed to 0 internally: membership and optimization
substitute 0 for those coordinates instead of erroring.

A small exact LP (vertex enumeration over cached 5x5 bases; coefficient
matrices per variant are fixed small integers) supports weighted
maximization, used by the search layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .channels import AuxiliaryInput, BroadcastChannel, induced_joint
from .info_kernel import (
    ZERO_MASS_TOL,
    JointPmf,
    conditional_entropy,
    entropy,
    mutual_information,
)

__all__ = [
    "MEMBERSHIP_TOL",
    "RateTuple",
    "RegionKind",
    "Constraint",
    "RegionAtPmf",
    "Membership",
    "InfeasibleRateError",
    "RegionEvaluationError",
    "evaluate",
    "contains",
    "max_rate_Y_given_Z",
    "appendixI_region",
    "support_value",
    "fmsi_z_feedback_outer",
    "enhanced_feedback_outer",
    "check_x_functional",
]

#: slack tolerance for membership checks
MEMBERSHIP_TOL = 1e-9
#: right-hand sides are clipped to 0 when within this of zero from below
RHS_NONNEG_TOL = 1e-12


class InfeasibleRateError(ValueError):
    """The requested rate coordinate is infeasible at this auxiliary input."""


class RegionEvaluationError(ValueError):
    """The (kind, channel, auxiliary) combination is malformed for evaluation."""


@dataclass(frozen=True)
class RateTuple:
    """(R, R_Y^p, R_Y^c, R_Z^p, R_Z^c) in bits per channel use."""

    r_common: float = 0.0
    r_y_p: float = 0.0
    r_y_c: float = 0.0
    r_z_p: float = 0.0
    r_z_c: float = 0.0

    def __post_init__(self):
        for name, v in self.__dict__.items():
            if v < -1e-12:
                raise ValueError(f"negative rate {name}={v!r}")

    @property
    def r_y(self) -> float:
        return self.r_y_p + self.r_y_c

    @property
    def r_z(self) -> float:
        return self.r_z_p + self.r_z_c

    def as_vector(self) -> np.ndarray:
        return np.array(
            [self.r_common, self.r_y_p, self.r_y_c, self.r_z_p, self.r_z_c], dtype=float
        )

    @staticmethod
    def from_vector(v: Sequence[float]) -> "RateTuple":
        v = [max(0.0, float(x)) for x in v]
        return RateTuple(*v)


class RegionKind(str, Enum):
    THEOREM1 = "Theorem1"
    THEOREM1_NO_BINNING = "Theorem1NoBinning"
    COR1_NO_MSI_AT_Z = "Cor1_NoMsiAtZ"
    COR2_FMSI_AT_Y = "Cor2_FmsiAtY"
    COR3_FMSI_AT_Z = "Cor3_FmsiAtZ"
    COR4_FMSI_BOTH = "Cor4_FmsiBoth"
    PROP1_ENHANCED = "Prop1_Enhanced"
    COR5_ENHANCED_NO_MSI = "Cor5_EnhancedNoMsi"
    APPI_CLOSED_FORM = "AppI_ClosedForm"


#: coordinates outside each variant's regime, fixed to zero internally.
#: slot order: (R, R_Y^p, R_Y^c, R_Z^p, R_Z^c).  Variants without a common
#: message lock slot 0; the full-MSI-at-Y variant additionally locks R_Y^c
#: (its setting gives receiver Z no side information about M_Y, and its
#: third formula row distinguishes R_Y^p from R_Y^c, so the slot cannot be
#: left free without enlarging the polytope beyond the stated region).
_FIXED_SLOTS: dict[RegionKind, tuple[int, ...]] = {
    RegionKind.THEOREM1: (),
    RegionKind.THEOREM1_NO_BINNING: (),
    RegionKind.COR1_NO_MSI_AT_Z: (0,),
    RegionKind.COR2_FMSI_AT_Y: (2,),
    RegionKind.COR3_FMSI_AT_Z: (),
    RegionKind.COR4_FMSI_BOTH: (),
    RegionKind.PROP1_ENHANCED: (0,),
    RegionKind.COR5_ENHANCED_NO_MSI: (0,),
    RegionKind.APPI_CLOSED_FORM: (0,),
}


@dataclass(frozen=True)
class Constraint:
    """coeffs . (R, R_Y^p, R_Y^c, R_Z^p, R_Z^c) <= rhs."""

    name: str
    coeffs: tuple[int, int, int, int, int]
    rhs: float


@dataclass(frozen=True)
class RegionAtPmf:
    kind: RegionKind
    constraints: tuple[Constraint, ...]
    fixed_slots: tuple[int, ...] = ()

    @property
    def common_message(self) -> bool:
        return 0 not in self.fixed_slots

    def coeff_matrix(self) -> np.ndarray:
        return np.array([c.coeffs for c in self.constraints], dtype=float)

    def rhs_vector(self) -> np.ndarray:
        return np.array([c.rhs for c in self.constraints], dtype=float)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "common_message": self.common_message,
            "fixed_slots": list(self.fixed_slots),
            "constraints": [
                {"name": c.name, "coeffs": list(c.coeffs), "rhs": c.rhs}
                for c in self.constraints
            ],
        }


class Membership(NamedTuple):
    ok: bool
    slacks: np.ndarray  # rhs - lhs per constraint, >= -MEMBERSHIP_TOL when ok


def _rhs(value: float, name: str) -> float:
    if value < -RHS_NONNEG_TOL:
        raise RegionEvaluationError(f"negative right-hand side {name} = {value!r}")
    return max(0.0, float(value))


def _measures(j: JointPmf) -> dict[str, float]:
    return {
        "H(Y)": entropy(j, "Y"),
        "H(Y|U)": conditional_entropy(j, "Y", "U"),
        "H(Y|V)": conditional_entropy(j, "Y", "V"),
        "I(U;Z)": mutual_information(j, "U", "Z"),
        "I(U;Z|V)": mutual_information(j, "U", "Z", "V"),
        "I(V;Y)": mutual_information(j, "V", "Y"),
        "I(U;Y)": mutual_information(j, "U", "Y"),
        "I(X;Z)": mutual_information(j, "X", "Z"),
        "I(X;YZ)": mutual_information(j, "X", ("Y", "Z")),
        "I(X;YZ|U)": mutual_information(j, "X", ("Y", "Z"), "U"),
    }


def check_x_functional(c: BroadcastChannel, a: AuxiliaryInput, tol: float = 1e-9) -> bool:
    """True when X is a deterministic function of (Y, U) under the induced joint."""
    j = induced_joint(c, a)
    p_xyu = j.marginal(("U", "X", "Y")).mass  # axes in joint order: U, X, Y
    p_yu = p_xyu.sum(axis=1)  # (U, Y)
    for u in range(p_xyu.shape[0]):
        for y in range(p_xyu.shape[2]):
            if p_yu[u, y] > ZERO_MASS_TOL:
                if p_xyu[:, :, y][u].max() < (1.0 - tol) * p_yu[u, y]:
                    return False
    return True


def _erasure_structure(c: BroadcastChannel) -> tuple[float, np.ndarray]:
    """Validate Y=f(X), Z = X or erasure (last symbol) w.p. p; return (p, f)."""
    if c.deterministic_map is None:
        raise RegionEvaluationError("channel is not semideterministic")
    if c.z_size != c.x_size + 1:
        raise RegionEvaluationError(
            f"|Z|={c.z_size} != |X|+1={c.x_size + 1}: not a function-erasure channel"
        )
    w = c.w()
    f = np.asarray(c.deterministic_map)
    p = float(w[0, f[0], c.z_size - 1])
    for x in range(c.x_size):
        ok = (
            abs(w[x, f[x], c.z_size - 1] - p) <= 1e-9
            and abs(w[x, f[x], x] - (1.0 - p)) <= 1e-9
        )
        if not ok or abs(w[x].sum() - (1.0)) > 1e-9:
            raise RegionEvaluationError("kernel is not of the function-erasure form")
    return p, f


def evaluate(kind: RegionKind, c: BroadcastChannel, a: AuxiliaryInput) -> RegionAtPmf:
    """Constraint system of the given region variant at one auxiliary input."""
    kind = RegionKind(kind)
    if not isinstance(a, AuxiliaryInput):
        raise RegionEvaluationError(f"auxiliary input missing or malformed: {a!r}")
    j = induced_joint(c, a)
    m = _measures(j)
    rows: list[Constraint]

    if kind is RegionKind.THEOREM1 or kind is RegionKind.THEOREM1_NO_BINNING:
        rows = [
            Constraint("R+RY<=H(Y)", (1, 1, 1, 0, 0), _rhs(m["H(Y)"], "H(Y)")),
            Constraint("R+RZ<=I(U;Z)", (1, 0, 0, 1, 1), _rhs(m["I(U;Z)"], "I(U;Z)")),
            Constraint(
                "R+RY+RZp<=I(V;Y)+H(Y|U)+I(U;Z|V)",
                (1, 1, 1, 1, 0),
                _rhs(m["I(V;Y)"] + m["H(Y|U)"] + m["I(U;Z|V)"], "row3"),
            ),
            Constraint(
                "R+RYp+RZ<=H(Y|U)+I(U;Z)",
                (1, 1, 0, 1, 1),
                _rhs(m["H(Y|U)"] + m["I(U;Z)"], "row4"),
            ),
            Constraint(
                "2R+RY+RZ<=I(V;Y)+H(Y|U)+I(U;Z)",
                (2, 1, 1, 1, 1),
                _rhs(m["I(V;Y)"] + m["H(Y|U)"] + m["I(U;Z)"], "row5"),
            ),
        ]
        if kind is RegionKind.THEOREM1_NO_BINNING:
            rows += [
                Constraint("RYp<=H(Y|V)", (0, 1, 0, 0, 0), _rhs(m["H(Y|V)"], "H(Y|V)")),
                Constraint("RZp<=I(U;Z|V)", (0, 0, 0, 1, 0), _rhs(m["I(U;Z|V)"], "I(U;Z|V)")),
                Constraint(
                    "RYp+RZp<=H(Y|U)+I(U;Z|V)",
                    (0, 1, 0, 1, 0),
                    _rhs(m["H(Y|U)"] + m["I(U;Z|V)"], "no-binning sum"),
                ),
            ]
    elif kind is RegionKind.COR1_NO_MSI_AT_Z:
        rows = [
            Constraint("RY<=H(Y)", (0, 1, 1, 0, 0), _rhs(m["H(Y)"], "H(Y)")),
            Constraint("RZ<=I(U;Z)", (0, 0, 0, 1, 1), _rhs(m["I(U;Z)"], "I(U;Z)")),
            Constraint(
                "RY+RZ<=H(Y|U)+I(U;Z)",
                (0, 1, 1, 1, 1),
                _rhs(m["H(Y|U)"] + m["I(U;Z)"], "sum"),
            ),
        ]
    elif kind is RegionKind.COR2_FMSI_AT_Y:
        rows = [
            Constraint("R+RY<=H(Y)", (1, 1, 1, 0, 0), _rhs(m["H(Y)"], "H(Y)")),
            Constraint("R+RZ<=I(U;Z)", (1, 0, 0, 1, 1), _rhs(m["I(U;Z)"], "I(U;Z)")),
            Constraint(
                "R+RYp+RZ<=H(Y|U)+I(U;Z)",
                (1, 1, 0, 1, 1),
                _rhs(m["H(Y|U)"] + m["I(U;Z)"], "sum"),
            ),
        ]
    elif kind is RegionKind.COR3_FMSI_AT_Z:
        rows = [
            Constraint("R+RY<=H(Y)", (1, 1, 1, 0, 0), _rhs(m["H(Y)"], "H(Y)")),
            Constraint("R+RZ<=I(X;Z)", (1, 0, 0, 1, 1), _rhs(m["I(X;Z)"], "I(X;Z)")),
            Constraint(
                "R+RY+RZp<=I(X;YZ)", (1, 1, 1, 1, 0), _rhs(m["I(X;YZ)"], "I(X;YZ)")
            ),
        ]
    elif kind is RegionKind.COR4_FMSI_BOTH:
        rows = [
            Constraint("R+RY<=H(Y)", (1, 1, 1, 0, 0), _rhs(m["H(Y)"], "H(Y)")),
            Constraint("R+RZ<=I(X;Z)", (1, 0, 0, 1, 1), _rhs(m["I(X;Z)"], "I(X;Z)")),
        ]
    elif kind is RegionKind.PROP1_ENHANCED:
        rows = [
            Constraint("RZ<=I(U;Z)", (0, 0, 0, 1, 1), _rhs(m["I(U;Z)"], "I(U;Z)")),
            Constraint(
                "RY+RZp<=I(X;YZ)", (0, 1, 1, 1, 0), _rhs(m["I(X;YZ)"], "I(X;YZ)")
            ),
            Constraint(
                "RYp+RZ<=I(X;YZ|U)+I(U;Z)",
                (0, 1, 0, 1, 1),
                _rhs(m["I(X;YZ|U)"] + m["I(U;Z)"], "row3"),
            ),
        ]
    elif kind is RegionKind.COR5_ENHANCED_NO_MSI:
        rows = [
            Constraint(
                "RY<=I(X;YZ|U)", (0, 1, 1, 0, 0), _rhs(m["I(X;YZ|U)"], "I(X;YZ|U)")
            ),
            Constraint("RZ<=I(U;Z)", (0, 0, 0, 1, 1), _rhs(m["I(U;Z)"], "I(U;Z)")),
        ]
    elif kind is RegionKind.APPI_CLOSED_FORM:
        p, f = _erasure_structure(c)
        if not check_x_functional(c, a, tol=1e-12):
            raise RegionEvaluationError(
                "closed form needs X to be a function of (Y, U) under the auxiliary input"
            )
        p_y = j.marginal("Y").mass
        preimage_log = float(
            sum(
                p_y[y] * np.log2(np.count_nonzero(f == y))
                for y in range(c.y_size)
                if p_y[y] > ZERO_MASS_TOL
            )
        )
        pbar = 1.0 - p
        rows = [
            Constraint("RY<=H(Y)", (0, 1, 1, 0, 0), _rhs(m["H(Y)"], "H(Y)")),
            Constraint(
                "RZ<=(1-p)I(U;Y)+(1-p)E[log|Xy|]",
                (0, 0, 0, 1, 1),
                _rhs(pbar * m["I(U;Y)"] + pbar * preimage_log, "Z bound"),
            ),
            Constraint(
                "RY+RZ<=H(Y)-pI(U;Y)+(1-p)E[log|Xy|]",
                (0, 1, 1, 1, 1),
                _rhs(m["H(Y)"] - p * m["I(U;Y)"] + pbar * preimage_log, "sum"),
            ),
        ]
    else:  # pragma: no cover
        raise RegionEvaluationError(f"unknown region kind {kind!r}")

    return RegionAtPmf(kind, tuple(rows), _FIXED_SLOTS[kind])


def appendixI_region(c: BroadcastChannel, a: AuxiliaryInput) -> RegionAtPmf:
    """Closed-form region of the function-erasure channel (no MSI, no common)."""
    return evaluate(RegionKind.APPI_CLOSED_FORM, c, a)


# --- feedback outer bounds, coded from first principles -------------------
#
# These intentionally recompute their information measures from entropies
# rather than reusing _measures(), so comparisons against the no-feedback
# optimum exercise two independent code paths.

def fmsi_z_feedback_outer(c: BroadcastChannel, a: AuxiliaryInput) -> RegionAtPmf:
    """Outer bound with feedback when Z knows Y's message; depends on p(x) only."""
    j = induced_joint(c, a)
    h_y = entropy(j, "Y")
    i_xz = entropy(j, "X") + entropy(j, "Z") - entropy(j, ("X", "Z"))
    i_xyz = entropy(j, "X") + entropy(j, ("Y", "Z")) - entropy(j, ("X", "Y", "Z"))
    rows = (
        Constraint("R+RY<=H(Y)", (1, 1, 1, 0, 0), _rhs(h_y, "H(Y)")),
        Constraint("R+RZ<=I(X;Z)", (1, 0, 0, 1, 1), _rhs(i_xz, "I(X;Z)")),
        Constraint("R+RY+RZp<=I(X;YZ)", (1, 1, 1, 1, 0), _rhs(i_xyz, "I(X;YZ)")),
    )
    return RegionAtPmf(RegionKind.COR3_FMSI_AT_Z, rows, ())


def enhanced_feedback_outer(c: BroadcastChannel, a: AuxiliaryInput) -> RegionAtPmf:
    """Outer bound with feedback, no MSI, for the erasure examples."""
    j = induced_joint(c, a)
    i_uz = entropy(j, "U") + entropy(j, "Z") - entropy(j, ("U", "Z"))
    h_xyz_u = entropy(j, ("X", "Y", "Z", "U")) - entropy(j, "U")
    h_x_u = entropy(j, ("X", "U")) - entropy(j, "U")
    h_yz_u = entropy(j, ("Y", "Z", "U")) - entropy(j, "U")
    i_x_yz_u = h_x_u + h_yz_u - h_xyz_u
    rows = (
        Constraint("RY<=H(Y)", (0, 1, 1, 0, 0), _rhs(entropy(j, "Y"), "H(Y)")),
        Constraint("RZ<=I(U;Z)", (0, 0, 0, 1, 1), _rhs(i_uz, "I(U;Z)")),
        Constraint(
            "RY+RZ<=I(X;YZ|U)+I(U;Z)",
            (0, 1, 1, 1, 1),
            _rhs(i_x_yz_u + i_uz, "sum"),
        ),
    )
    return RegionAtPmf(RegionKind.COR5_ENHANCED_NO_MSI, rows, (0,))


# ---------------------------------------------------------------------------
# membership and exact linear programming over one polytope
# ---------------------------------------------------------------------------

def _effective_vector(r: RegionAtPmf, t: RateTuple) -> np.ndarray:
    v = t.as_vector()
    if r.fixed_slots:
        v = v.copy()
        # coordinates outside the variant's model are pinned to zero rather
        # than rejected, so totals-only callers can pass full tuples
        v[list(r.fixed_slots)] = 0.0
    return v


def contains(r: RegionAtPmf, t: RateTuple) -> Membership:
    v = _effective_vector(r, t)
    slacks = r.rhs_vector() - r.coeff_matrix() @ v
    return Membership(bool(np.all(slacks >= -MEMBERSHIP_TOL)), slacks)


#: canonical coordinate for the Y rate / Z rate per variant, used when a
#: caller supplies only totals (split follows which side holds the MSI)
_Y_SLOT = {
    RegionKind.COR3_FMSI_AT_Z: 2,  # Y's message fully known at Z
    RegionKind.COR4_FMSI_BOTH: 2,
}
_Z_SLOT = {
    RegionKind.COR2_FMSI_AT_Y: 4,  # Z's message fully known at Y
    RegionKind.COR4_FMSI_BOTH: 4,
}


def split_rates(kind: RegionKind, r_y: float, r_z: float) -> RateTuple:
    """Place total rates into the variant's canonical private/common slots."""
    v = np.zeros(5)
    v[_Y_SLOT.get(kind, 1)] = r_y
    v[_Z_SLOT.get(kind, 3)] = r_z
    return RateTuple.from_vector(v)


def max_rate_Y_given_Z(
    kind: RegionKind, c: BroadcastChannel, a: AuxiliaryInput, r_z: float
) -> float:
    """Largest R_Y with R = 0 compatible with total Z-rate r_z at this PMF.

    Raises :class:`InfeasibleRateError` when r_z itself violates a constraint
    that does not involve R_Y.
    """
    kind = RegionKind(kind)
    if r_z < -1e-12:
        raise InfeasibleRateError(f"negative r_z = {r_z!r}")
    region = evaluate(kind, c, a)
    base = split_rates(kind, 0.0, max(0.0, r_z)).as_vector()
    y_slot = _Y_SLOT.get(kind, 1)
    best = np.inf
    for con in region.constraints:
        fixed = float(np.dot(con.coeffs, base))
        cy = con.coeffs[y_slot]
        if cy == 0:
            if fixed > con.rhs + MEMBERSHIP_TOL:
                raise InfeasibleRateError(
                    f"r_z={r_z!r} violates {con.name} by {fixed - con.rhs:.3g}"
                )
        else:
            best = min(best, (con.rhs - fixed) / cy)
    if best < -MEMBERSHIP_TOL:
        raise InfeasibleRateError(f"r_z={r_z!r} leaves no nonnegative R_Y")
    return float(max(0.0, best)) if np.isfinite(best) else np.inf


# --- exact weighted maximization by vertex enumeration ---------------------

_BASIS_CACHE: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _bases_for(G: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All nonsingular 5-row bases of G: (combo index array, stacked inverses)."""
    key = (G.shape[0], G.tobytes())
    hit = _BASIS_CACHE.get(key)
    if hit is not None:
        return hit
    combos = np.array(list(combinations(range(G.shape[0]), 5)), dtype=np.int64)
    mats = G[combos]  # (k, 5, 5)
    dets = np.abs(np.linalg.det(mats))
    good = dets > 1e-9
    combos = combos[good]
    invs = np.linalg.inv(mats[good])
    _BASIS_CACHE[key] = (combos, invs)
    return combos, invs


def support_value(
    r: RegionAtPmf,
    weights: Sequence[float],
    floor: Sequence[float] | None = None,
) -> tuple[float, RateTuple] | None:
    """Maximize weights . t over the polytope (plus bounds t >= floor, R-lock).

    Returns (value, argmax) or None when the polytope is empty (possible only
    with a nonzero floor).  Exact up to float solves; no iterative solver.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (5,):
        raise ValueError(f"weights must have 5 entries, got {w.shape}")
    A = r.coeff_matrix()
    b = r.rhs_vector()
    lo = np.zeros(5) if floor is None else np.asarray(floor, dtype=float)
    G = np.vstack([A, -np.eye(5)])
    h = np.concatenate([b, -lo])
    for slot in r.fixed_slots:
        lock = np.zeros((1, 5))
        lock[0, slot] = 1.0  # out-of-model coordinate: lock to <= 0
        G = np.vstack([G, lock])
        h = np.concatenate([h, [0.0]])
    combos, invs = _bases_for(G)
    if len(combos) == 0:
        return None
    verts = np.einsum("kij,kj->ki", invs, h[combos])
    feas = np.all(verts @ G.T <= h[None, :] + MEMBERSHIP_TOL, axis=1)
    verts = verts[feas]
    if len(verts) == 0:
        return None
    vals = verts @ w
    i = int(np.argmax(vals))
    return float(vals[i]), RateTuple.from_vector(np.clip(verts[i], 0.0, None))
