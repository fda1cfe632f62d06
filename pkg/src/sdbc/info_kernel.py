"""Finite-alphabet probability objects and information measures.

Everything downstream (channel models, rate regions, optimizers, the Monte
Carlo harness) is built on the three containers defined here:

* :class:`Pmf`            -- a distribution on ``{0, ..., k-1}``;
* :class:`JointPmf`       -- a distribution on a named product alphabet;
* :class:`ConditionalKernel` -- a stochastic matrix between product alphabets.

Conventions, fixed once for the whole package:

* all logarithms are base 2, so every measure is in bits;
* ``0 * log 0 = 0``; probabilities below ``ZERO_MASS_TOL`` are treated as
  exact zeros inside logarithms;
* joint axes are addressed by name (e.g. ``"Y"``, ``"A2"``), never by
  position, to keep marginalisation calls readable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ZERO_MASS_TOL",
    "MASS_SUM_TOL",
    "Pmf",
    "JointPmf",
    "ConditionalKernel",
    "FunctionalRepresentation",
    "entropy",
    "conditional_entropy",
    "mutual_information",
    "binary_entropy",
    "binary_entropy_inv",
    "csiszar_residual",
    "functional_representation",
]

#: masses below this are exact zeros for the purpose of logarithms
ZERO_MASS_TOL = 1e-15
#: total mass must match 1 within this tolerance
MASS_SUM_TOL = 1e-12


class PmfError(ValueError):
    """Raised when a probability object fails validation."""


def _as_mass(mass: Iterable[float], shape=None) -> np.ndarray:
    arr = np.asarray(mass, dtype=float)
    if shape is not None and arr.shape != tuple(shape):
        raise PmfError(f"mass has shape {arr.shape}, expected {tuple(shape)}")
    if arr.size == 0:
        raise PmfError("empty mass array")
    if np.any(arr < -ZERO_MASS_TOL):
        raise PmfError(f"negative mass entry {arr.min()!r}")
    arr = np.where(arr < 0.0, 0.0, arr)
    total = float(arr.sum())
    if abs(total - 1.0) > MASS_SUM_TOL:
        raise PmfError(f"mass sums to {total!r}, not 1")
    return arr


@dataclass(frozen=True)
class Pmf:
    """Distribution on ``{0, ..., support_size - 1}``."""

    mass: np.ndarray

    def __init__(self, mass: Iterable[float]):
        object.__setattr__(self, "mass", _as_mass(mass))
        if self.mass.ndim != 1:
            raise PmfError("Pmf mass must be one-dimensional")

    @property
    def support_size(self) -> int:
        return int(self.mass.shape[0])

    def __eq__(self, other) -> bool:  # ndarray fields break dataclass eq
        return isinstance(other, Pmf) and np.array_equal(self.mass, other.mass)


@dataclass(frozen=True)
class JointPmf:
    """Distribution on a named product alphabet.

    ``axes`` is a tuple of ``(name, size)`` pairs, in the storage order of
    ``mass``; names must be unique.
    """

    axes: tuple[tuple[str, int], ...]
    mass: np.ndarray = field(repr=False)

    def __init__(self, axes: Sequence[tuple[str, int]], mass: Iterable[float]):
        axes = tuple((str(n), int(s)) for n, s in axes)
        names = [n for n, _ in axes]
        if len(set(names)) != len(names):
            raise PmfError(f"duplicate axis names in {names}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "mass", _as_mass(mass, shape=[s for _, s in axes]))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.axes)

    def axis_size(self, name: str) -> int:
        return dict(self.axes)[name]

    def _positions(self, names: Iterable[str]) -> list[int]:
        order = {n: i for i, (n, _) in enumerate(self.axes)}
        out = []
        for n in names:
            if n not in order:
                raise PmfError(f"axis {n!r} not in joint over {self.names}")
            out.append(order[n])
        return out

    def marginal(self, names: Iterable[str]) -> "JointPmf":
        """Marginal over the named axes, kept in this joint's axis order."""
        keep = set(self._positions(_as_axis_tuple(names)))
        drop = tuple(i for i in range(len(self.axes)) if i not in keep)
        mass = self.mass.sum(axis=drop) if drop else self.mass
        axes = tuple(a for i, a in enumerate(self.axes) if i in keep)
        if not axes:  # scalar marginal: mass 1 on a singleton
            return JointPmf((("_", 1),), np.array([1.0]))
        return JointPmf(axes, mass)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, JointPmf)
            and self.axes == other.axes
            and np.array_equal(self.mass, other.mass)
        )


def _as_axis_tuple(axes: str | Iterable[str] | None) -> tuple[str, ...]:
    if axes is None:
        return ()
    if isinstance(axes, str):
        return (axes,)
    return tuple(axes)


@dataclass(frozen=True)
class ConditionalKernel:
    """Stochastic matrix from a product alphabet to a product alphabet.

    ``rows[i]`` is the distribution of the target tuple given the ``i``-th
    source tuple; source/target tuples are flattened row-major, with the
    *last* axis fastest (C order).
    """

    from_axes: tuple[tuple[str, int], ...]
    to_axes: tuple[tuple[str, int], ...]
    rows: np.ndarray = field(repr=False)

    def __init__(
        self,
        from_axes: Sequence[tuple[str, int]],
        to_axes: Sequence[tuple[str, int]],
        rows: Iterable[Iterable[float]],
    ):
        from_axes = tuple((str(n), int(s)) for n, s in from_axes)
        to_axes = tuple((str(n), int(s)) for n, s in to_axes)
        n_from = int(np.prod([s for _, s in from_axes]))
        n_to = int(np.prod([s for _, s in to_axes]))
        arr = np.asarray(rows, dtype=float)
        if arr.shape != (n_from, n_to):
            raise PmfError(f"kernel rows have shape {arr.shape}, expected {(n_from, n_to)}")
        for i in range(n_from):
            _as_mass(arr[i])
        arr = np.where(arr < 0.0, 0.0, arr)
        object.__setattr__(self, "from_axes", from_axes)
        object.__setattr__(self, "to_axes", to_axes)
        object.__setattr__(self, "rows", arr)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ConditionalKernel)
            and self.from_axes == other.from_axes
            and self.to_axes == other.to_axes
            and np.array_equal(self.rows, other.rows)
        )


# ---------------------------------------------------------------------------
# information measures
# ---------------------------------------------------------------------------

def _plogp(mass: np.ndarray) -> float:
    p = mass[mass > ZERO_MASS_TOL]
    return float(-(p * np.log2(p)).sum())


def entropy(j: JointPmf, axes: str | Iterable[str] | None = None) -> float:
    """H(axes) in bits; ``axes=None`` means all axes of the joint."""
    names = _as_axis_tuple(axes) if axes is not None else j.names
    if not names:
        return 0.0
    return _plogp(j.marginal(names).mass)


def conditional_entropy(
    j: JointPmf,
    target: str | Iterable[str],
    given: str | Iterable[str] | None = None,
) -> float:
    """H(target | given) = H(target, given) - H(given)."""
    t = _as_axis_tuple(target)
    g = _as_axis_tuple(given)
    if not t:
        return 0.0
    overlap = set(t) & set(g)
    if overlap:
        raise PmfError(f"target/given axes overlap: {sorted(overlap)}")
    return entropy(j, t + g) - entropy(j, g)


def mutual_information(
    j: JointPmf,
    a: str | Iterable[str],
    b: str | Iterable[str],
    given: str | Iterable[str] | None = None,
) -> float:
    """I(a; b | given), clipped to 0 from below at float-noise scale."""
    a_t, b_t, g_t = _as_axis_tuple(a), _as_axis_tuple(b), _as_axis_tuple(given)
    if not a_t or not b_t:
        return 0.0
    val = conditional_entropy(j, a_t, g_t) - conditional_entropy(j, a_t, b_t + g_t)
    return 0.0 if -1e-12 < val < 0.0 else val


def binary_entropy(p: float) -> float:
    """h_b(p) in bits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p!r} outside [0, 1]")
    if p < ZERO_MASS_TOL or 1.0 - p < ZERO_MASS_TOL:
        return 0.0
    return float(-(p * np.log2(p) + (1.0 - p) * np.log2(1.0 - p)))


def binary_entropy_inv(y: float) -> float:
    """Inverse of h_b on [0, 1/2], by 200 bisection steps."""
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"y={y!r} outside [0, 1]")
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _split_csiszar_axes(j: JointPmf) -> tuple[list[str], list[str], list[str]]:
    a_axes: dict[int, str] = {}
    b_axes: dict[int, str] = {}
    t_axes: list[str] = []
    for name, _ in j.axes:
        if name == "T":
            t_axes.append(name)
        elif len(name) >= 2 and name[0] in "AB" and name[1:].isdigit():
            (a_axes if name[0] == "A" else b_axes)[int(name[1:])] = name
        else:
            raise PmfError(
                f"axis {name!r} does not follow the A<i>/B<i>/T naming convention"
            )
    if sorted(a_axes) != sorted(b_axes) or not a_axes:
        raise PmfError(
            f"mismatched sequence axes: A-indices {sorted(a_axes)}, B-indices {sorted(b_axes)}"
        )
    idx = sorted(a_axes)
    return [a_axes[i] for i in idx], [b_axes[i] for i in idx], t_axes


def csiszar_residual(j: JointPmf) -> float:
    """Telescoping-sum identity residual for paired sequences.

    For a joint over axes ``A1..An, B1..Bn`` and optionally ``T``, returns

        sum_i [ I(A_{i+1..n}; B_i | B_{1..i-1}, T)
                - I(B_{1..i-1}; A_i | A_{i+1..n}, T) ],

    which is identically zero; the returned value measures only the
    floating-point noise of the two interleaved expansions.
    """
    a, b, t = _split_csiszar_axes(j)
    n = len(a)
    total = 0.0
    for i in range(1, n + 1):
        a_future = a[i:]  # A_{i+1..n}
        b_past = b[: i - 1]  # B_{1..i-1}
        total += mutual_information(j, a_future, [b[i - 1]], b_past + t)
        total -= mutual_information(j, b_past, [a[i - 1]], a_future + t)
    return total


# ---------------------------------------------------------------------------
# functional representation of a conditional law
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionalRepresentation:
    """Noise variable S (independent of X) and table g with Z = g(X, S)."""

    s_pmf: Pmf
    g_table: np.ndarray = field(repr=False)  # shape (x_size, s_size), entries in Z

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FunctionalRepresentation)
            and self.s_pmf == other.s_pmf
            and np.array_equal(self.g_table, other.g_table)
        )


def functional_representation(p_xz: JointPmf) -> FunctionalRepresentation:
    """Represent the conditional law p(z|x) as Z = g(X, S) with S independent of X.

    The noise alphabet is the common refinement of the per-x inverse-CDF
    breakpoints, so ``s_size <= x_size * z_size``.  Rows of p(z|x) for
    zero-mass x default to a point mass at z = 0.
    """
    if len(p_xz.axes) != 2:
        raise PmfError(f"need a two-axis joint (X, Z); got axes {p_xz.names}")
    x_size, z_size = (s for _, s in p_xz.axes)
    joint = p_xz.mass
    p_x = joint.sum(axis=1)
    cond = np.zeros_like(joint)
    for x in range(x_size):
        if p_x[x] > ZERO_MASS_TOL:
            cond[x] = joint[x] / p_x[x]
        else:
            cond[x, 0] = 1.0
    cdfs = np.cumsum(cond, axis=1)
    cdfs[:, -1] = 1.0
    breaks = np.unique(np.concatenate([[0.0], cdfs.ravel()]))
    breaks = breaks[(breaks >= 0.0) & (breaks <= 1.0)]
    widths = np.diff(breaks)
    keep = widths > ZERO_MASS_TOL
    widths = widths[keep]
    mids = ((breaks[:-1] + breaks[1:]) / 2.0)[keep]
    s_pmf = Pmf(widths / widths.sum())
    g = np.empty((x_size, len(widths)), dtype=np.int64)
    for x in range(x_size):
        g[x] = np.minimum(np.searchsorted(cdfs[x], mids, side="right"), z_size - 1)
    return FunctionalRepresentation(s_pmf=s_pmf, g_table=g)
