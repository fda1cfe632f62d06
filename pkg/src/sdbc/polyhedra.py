"""Exact symbolic inequality systems and Fourier-Motzkin elimination.

Rows are linear inequalities

    sum_i a_i x_i <= sum_k c_k K_k

with rational coefficients over named variables x and named nonnegative
constants K.  Elimination is exact over ``fractions.Fraction``; deduplication
is purely syntactic (identical rows and positive scalar multiples).

Numeric implication between two systems on the same variables is checked by
vertex enumeration: every vertex of the candidate polytope must satisfy the
target system.  This is valid for bounded polytopes, which all systems in
this package are once rate nonnegativity is included.

:func:`theorem1_derivation_check` runs the package's flagship derivation: the
pre-elimination coding-scheme system in (message rates, codebook rates) is
reduced by eliminating the codebook rates, and the result is checked for
mutual implication against the direct five-constraint system across sampled
valuations induced by random channels and auxiliary inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Mapping, Sequence

import numpy as np

from .channels import make_aux, make_channel
from .info_kernel import (
    JointPmf,
    conditional_entropy,
    entropy,
    mutual_information,
)

__all__ = [
    "Row",
    "SymbolicIneqSystem",
    "SystemValidationError",
    "eliminate",
    "polytope_vertices",
    "implies",
    "sample_valuations",
    "coding_scheme_system",
    "theorem1_target_system",
    "theorem1_derivation_check",
]


class SystemValidationError(ValueError):
    """A system failed structural validation."""


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**9)
    return Fraction(v)


@dataclass(frozen=True)
class Row:
    """var_coeffs . x <= const_coeffs . K"""

    var_coeffs: tuple[Fraction, ...]
    const_coeffs: tuple[Fraction, ...]

    @staticmethod
    def make(var_coeffs: Iterable, const_coeffs: Iterable) -> "Row":
        return Row(
            tuple(_frac(v) for v in var_coeffs),
            tuple(_frac(v) for v in const_coeffs),
        )

    def canonical(self) -> tuple:
        """Scale by the unique positive rational giving integer, gcd-1 entries."""
        nums = [f for f in self.var_coeffs + self.const_coeffs if f != 0]
        if not nums:
            return ((0,) * len(self.var_coeffs), (0,) * len(self.const_coeffs))
        denom_lcm = 1
        for f in nums:
            denom_lcm = denom_lcm * f.denominator // gcd(denom_lcm, f.denominator)
        ints = [int(f * denom_lcm) for f in self.var_coeffs + self.const_coeffs]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        ints = [v // g for v in ints]
        n = len(self.var_coeffs)
        return (tuple(ints[:n]), tuple(ints[n:]))


@dataclass(frozen=True)
class SymbolicIneqSystem:
    variables: tuple[str, ...]
    constants: tuple[str, ...]
    rows: tuple[Row, ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row.var_coeffs) != len(self.variables):
                raise SystemValidationError("row/variable arity mismatch")
            if len(row.const_coeffs) != len(self.constants):
                raise SystemValidationError("row/constant arity mismatch")
            if all(v == 0 for v in row.var_coeffs):
                # with all constants nonnegative, a variable-free row whose
                # constant side is certainly negative is unsatisfiable
                if all(c <= 0 for c in row.const_coeffs) and any(
                    c < 0 for c in row.const_coeffs
                ):
                    raise SystemValidationError(
                        f"variable-free row with negative constant side: {row}"
                    )

    def deduped(self) -> "SymbolicIneqSystem":
        seen: dict[tuple, Row] = {}
        for row in self.rows:
            seen.setdefault(row.canonical(), row)
        return SymbolicIneqSystem(self.variables, self.constants, tuple(seen.values()))

    def numeric(self, valuation: Mapping[str, float]) -> tuple[np.ndarray, np.ndarray]:
        """(A, b) with A x <= b at the given constant valuation."""
        missing = [k for k in self.constants if k not in valuation]
        if missing:
            raise SystemValidationError(f"valuation missing constants {missing}")
        A = np.array([[float(v) for v in r.var_coeffs] for r in self.rows])
        kvec = np.array([float(valuation[k]) for k in self.constants])
        b = np.array([[float(c) for c in r.const_coeffs] for r in self.rows]) @ kvec
        return A, b

    def to_json(self) -> str:
        return json.dumps(
            {
                "variables": list(self.variables),
                "constants": list(self.constants),
                "rows": [
                    {
                        "var_coeffs": [str(v) for v in r.var_coeffs],
                        "const_coeffs": [str(v) for v in r.const_coeffs],
                    }
                    for r in self.rows
                ],
            },
            indent=2,
        )

    @staticmethod
    def from_json(text: str) -> "SymbolicIneqSystem":
        doc = json.loads(text)
        rows = tuple(
            Row.make(r["var_coeffs"], r["const_coeffs"]) for r in doc["rows"]
        )
        return SymbolicIneqSystem(tuple(doc["variables"]), tuple(doc["constants"]), rows)


def eliminate(sys_: SymbolicIneqSystem, var: str) -> SymbolicIneqSystem:
    """Project out one variable by Fourier-Motzkin; strict rows are treated
    as their closures (the projection of the closure contains the closure of
    the projection, which is what the downstream membership checks need)."""
    if var not in sys_.variables:
        raise SystemValidationError(f"unknown variable {var!r}")
    i = sys_.variables.index(var)
    pos: list[Row] = []
    neg: list[Row] = []
    free: list[Row] = []
    for row in sys_.rows:
        c = row.var_coeffs[i]
        (pos if c > 0 else neg if c < 0 else free).append(row)
    new_rows: list[Row] = []

    def drop(row: Row) -> Row:
        return Row(
            row.var_coeffs[:i] + row.var_coeffs[i + 1 :],
            row.const_coeffs,
        )

    for rp in pos:
        cp = rp.var_coeffs[i]
        for rn in neg:
            cn = -rn.var_coeffs[i]
            # cn * rp + cp * rn cancels the eliminated column
            var_c = tuple(
                cn * a + cp * b for a, b in zip(rp.var_coeffs, rn.var_coeffs)
            )
            const_c = tuple(
                cn * a + cp * b for a, b in zip(rp.const_coeffs, rn.const_coeffs)
            )
            new_rows.append(drop(Row(var_c, const_c)))
    new_rows.extend(drop(r) for r in free)
    variables = sys_.variables[:i] + sys_.variables[i + 1 :]
    return SymbolicIneqSystem(variables, sys_.constants, tuple(new_rows)).deduped()


# ---------------------------------------------------------------------------
# numeric implication by vertex enumeration
# ---------------------------------------------------------------------------

def polytope_vertices(A: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Vertices of {x : A x <= b} (bounded polytopes only)."""
    m, d = A.shape
    if m < d:
        return np.empty((0, d))
    combos = np.array(list(combinations(range(m), d)), dtype=np.int64)
    mats = A[combos]
    dets = np.abs(np.linalg.det(mats))
    good = dets > 1e-9
    if not np.any(good):
        return np.empty((0, d))
    # keep b as a stack of vectors (2-D b means "matrix" to numpy >= 2.0)
    verts = np.linalg.solve(mats[good], b[combos[good]][..., None])[..., 0]
    feas = np.all(verts @ A.T <= b[None, :] + tol, axis=1)
    return verts[feas]


def _vertices_cached(
    A: np.ndarray, b: np.ndarray, cache: dict, key, tol: float
) -> np.ndarray:
    """Vertex enumeration with the basis factorization cached across calls
    sharing the same coefficient matrix (only b varies between valuations)."""
    hit = cache.get(key)
    if hit is None:
        m, d = A.shape
        combos = np.array(list(combinations(range(m), d)), dtype=np.int64)
        mats = A[combos]
        dets = np.abs(np.linalg.det(mats))
        good = dets > 1e-9
        combos = combos[good]
        invs = np.linalg.inv(mats[good])
        cache[key] = (combos, invs)
    else:
        combos, invs = hit
    if len(combos) == 0:
        return np.empty((0, A.shape[1]))
    verts = np.einsum("kij,kj->ki", invs, b[combos])
    feas = np.all(verts @ A.T <= b[None, :] + tol, axis=1)
    return verts[feas]


def implies(
    sys_a: SymbolicIneqSystem,
    sys_b: SymbolicIneqSystem,
    valuations: Sequence[Mapping[str, float]],
    tol: float = 1e-9,
) -> bool:
    """True when every vertex of sys_a's polytope satisfies sys_b, at every
    valuation.  Both systems must share the variable tuple."""
    return not failed_implications(sys_a, sys_b, valuations, tol)


def failed_implications(
    sys_a: SymbolicIneqSystem,
    sys_b: SymbolicIneqSystem,
    valuations: Sequence[Mapping[str, float]],
    tol: float = 1e-9,
) -> list[int]:
    """Indices of valuations where some vertex of sys_a violates sys_b."""
    if sys_a.variables != sys_b.variables:
        raise SystemValidationError(
            f"variable mismatch: {sys_a.variables} vs {sys_b.variables}"
        )
    cache: dict = {}
    Aa = np.array([[float(v) for v in r.var_coeffs] for r in sys_a.rows])
    Ca = np.array([[float(v) for v in r.const_coeffs] for r in sys_a.rows])
    Ab = np.array([[float(v) for v in r.var_coeffs] for r in sys_b.rows])
    Cb = np.array([[float(v) for v in r.const_coeffs] for r in sys_b.rows])
    bad: list[int] = []
    for idx, val in enumerate(valuations):
        kvec = np.array([float(val[k]) for k in sys_a.constants])
        kvec_b = np.array([float(val[k]) for k in sys_b.constants])
        ba = Ca @ kvec
        bb = Cb @ kvec_b
        verts = _vertices_cached(Aa, ba, cache, ("A", Aa.tobytes()), tol)
        if len(verts) == 0:
            continue
        if np.any(verts @ Ab.T > bb[None, :] + tol):
            bad.append(idx)
    return bad


# ---------------------------------------------------------------------------
# the flagship derivation
# ---------------------------------------------------------------------------

#: message-rate variables, in fixed order
RATE_VARS = ("r", "r_y_p", "r_y_c", "r_z_p", "r_z_c")
#: codebook-rate variables eliminated by the derivation
CODE_VARS = ("rt_c", "rt_y", "rt_z")
#: information-measure constants
CONSTS = ("H(Y)", "H(Y|V)", "I(U;Z)", "I(U;Z|V)", "I(Y;U|V)", "I(V;Y)")
_K = {name: i for i, name in enumerate(CONSTS)}


def _crow(var_map: Mapping[str, int], const_map: Mapping[str, int], nvars: int) -> Row:
    var_c = [0] * nvars
    order = RATE_VARS + CODE_VARS
    for name, coeff in var_map.items():
        var_c[order.index(name)] = coeff
    const_c = [0] * len(CONSTS)
    for name, coeff in const_map.items():
        const_c[_K[name]] = coeff
    return Row.make(var_c, const_c)


def coding_scheme_system() -> tuple[SymbolicIneqSystem, list[int]]:
    """Pre-elimination reliability conditions of the binned Marton scheme.

    Variables: the five message rates plus the codebook rates
    (rt_c, rt_y, rt_z) = (cloud reuse rate, total Y-codebook rate, total
    Z-codebook rate).  Returns the system together with the indices of the
    nonnegativity rows added for the message-rate variables (the report
    flags them; the ten scheme rows are the rest).
    """
    n = len(RATE_VARS) + len(CODE_VARS)
    rows = [
        # encoding (mutual covering across bins):
        #   (rt_y - r_y_p) + (rt_z - r_z_p) - rt_c >= I(Y;U|V)
        _crow(
            {"r_y_p": 1, "r_z_p": 1, "rt_c": 1, "rt_y": -1, "rt_z": -1},
            {"I(Y;U|V)": -1},
            n,
        ),
        # decoding at Y: wrong satellite within the cloud
        _crow({"rt_y": 1, "rt_c": -1}, {"H(Y|V)": 1}, n),
        # decoding at Y: wrong cell (unknown common part)
        _crow({"r": 1, "r_y_c": 1, "rt_y": 1}, {"H(Y)": 1}, n),
        # decoding at Y: wrong cloud within the cell
        _crow({"rt_y": 1}, {"H(Y)": 1}, n),
        # decoding at Z: wrong satellite within the cloud
        _crow({"rt_z": 1, "rt_c": -1}, {"I(U;Z|V)": 1}, n),
        # decoding at Z: wrong cell
        _crow({"r": 1, "r_z_c": 1, "rt_z": 1}, {"I(U;Z)": 1}, n),
        # decoding at Z: wrong cloud within the cell
        _crow({"rt_z": 1}, {"I(U;Z)": 1}, n),
        # every bin must be populated
        _crow({"r_y_p": 1, "rt_y": -1}, {}, n),
        _crow({"r_z_p": 1, "rt_z": -1}, {}, n),
        # the cloud reuse rate is nonnegative
        _crow({"rt_c": -1}, {}, n),
    ]
    added: list[int] = []
    for v in RATE_VARS:
        added.append(len(rows))
        rows.append(_crow({v: -1}, {}, n))
    return (
        SymbolicIneqSystem(RATE_VARS + CODE_VARS, CONSTS, tuple(rows)).deduped(),
        added,
    )


def theorem1_target_system(include_nonneg: bool = True) -> SymbolicIneqSystem:
    """The direct five-constraint system on the message rates.

    Right-hand sides are expressed in the same constant basis as the coding
    scheme, using H(Y|U) = H(Y|V) - I(Y;U|V) and I(V;Y) = H(Y) - H(Y|V),
    identities that hold for every joint respecting the V -- U -- X chain.
    """
    n = len(RATE_VARS)

    def row(vm, cm):
        var_c = [0] * n
        for name, coeff in vm.items():
            var_c[RATE_VARS.index(name)] = coeff
        const_c = [0] * len(CONSTS)
        for name, coeff in cm.items():
            const_c[_K[name]] = coeff
        return Row.make(var_c, const_c)

    rows = [
        row({"r": 1, "r_y_p": 1, "r_y_c": 1}, {"H(Y)": 1}),
        row({"r": 1, "r_z_p": 1, "r_z_c": 1}, {"I(U;Z)": 1}),
        # I(V;Y) + H(Y|U) + I(U;Z|V) = H(Y) - I(Y;U|V) + I(U;Z|V)
        row(
            {"r": 1, "r_y_p": 1, "r_y_c": 1, "r_z_p": 1},
            {"H(Y)": 1, "I(Y;U|V)": -1, "I(U;Z|V)": 1},
        ),
        # H(Y|U) + I(U;Z) = H(Y|V) - I(Y;U|V) + I(U;Z)
        row(
            {"r": 1, "r_y_p": 1, "r_z_p": 1, "r_z_c": 1},
            {"H(Y|V)": 1, "I(Y;U|V)": -1, "I(U;Z)": 1},
        ),
        # I(V;Y) + H(Y|U) + I(U;Z) = H(Y) - I(Y;U|V) + I(U;Z)
        row(
            {"r": 2, "r_y_p": 1, "r_y_c": 1, "r_z_p": 1, "r_z_c": 1},
            {"H(Y)": 1, "I(Y;U|V)": -1, "I(U;Z)": 1},
        ),
    ]
    if include_nonneg:
        for v in RATE_VARS:
            rows.append(row({v: -1}, {}))
    return SymbolicIneqSystem(RATE_VARS, CONSTS, tuple(rows))


def sample_valuations(
    samples: int, seed: int, max_alphabet: int = 3
) -> list[dict[str, float]]:
    """Constant valuations induced by random channels and auxiliary chains.

    Channel alphabets are drawn in {2, ..., max_alphabet}; auxiliary
    cardinalities likewise.  Every valuation automatically satisfies the
    identities the derivation relies on.
    """
    rng = np.random.default_rng(seed)
    out: list[dict[str, float]] = []
    for _ in range(samples):
        xs, ys, zs = rng.integers(2, max_alphabet + 1, size=3)
        vs, us = rng.integers(2, max_alphabet + 1, size=2)
        kernel = rng.dirichlet(np.ones(ys * zs), size=xs).reshape(xs, ys, zs)
        c = make_channel(kernel)
        p_vu = rng.dirichlet(np.ones(vs * us)).reshape(vs, us)
        p_x_u = rng.dirichlet(np.ones(xs), size=us)
        a = make_aux(p_vu, p_x_u)
        j = _joint(c, a)
        out.append(
            {
                "H(Y)": entropy(j, "Y"),
                "H(Y|V)": conditional_entropy(j, "Y", "V"),
                "I(U;Z)": mutual_information(j, "U", "Z"),
                "I(U;Z|V)": mutual_information(j, "U", "Z", "V"),
                "I(Y;U|V)": mutual_information(j, "Y", "U", "V"),
                "I(V;Y)": mutual_information(j, "V", "Y"),
            }
        )
    return out


def _joint(c, a) -> JointPmf:
    from .channels import induced_joint

    return induced_joint(c, a)


def theorem1_derivation_check(samples: int = 100, seed: int = 0) -> dict:
    """Eliminate the codebook rates and compare against the direct system.

    Returns a report with row counts per stage, the flagged nonnegativity
    rows, and the two implication verdicts across sampled valuations.
    """
    scheme, added_nonneg = coding_scheme_system()
    stages = {"initial": len(scheme.rows)}
    reduced = scheme
    for var in CODE_VARS:
        reduced = eliminate(reduced, var)
        stages[f"after_{var}"] = len(reduced.rows)
    target = theorem1_target_system(include_nonneg=True)
    vals = sample_valuations(samples, seed)
    bad_fwd = failed_implications(reduced, target, vals)
    bad_bwd = failed_implications(target, reduced, vals)
    return {
        "samples": samples,
        "seed": seed,
        "row_counts": stages,
        "nonnegativity_rows_added": len(added_nonneg),
        "eliminated_variables": list(CODE_VARS),
        "reduced_rows": len(reduced.rows),
        "reduced_implies_direct": not bad_fwd,
        "direct_implies_reduced": not bad_bwd,
        "failed_valuations_forward": bad_fwd,
        "failed_valuations_backward": bad_bwd,
        "equivalent": not bad_fwd and not bad_bwd,
    }
