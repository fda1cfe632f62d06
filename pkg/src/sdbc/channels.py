"""Broadcast channel models and auxiliary-input descriptions.

A two-receiver broadcast channel is a kernel W(y, z | x) on finite alphabets.
The package's main object of study is the semideterministic case, where the
Y-output is a deterministic function of the input; :func:`is_semideterministic`
recovers that function when it exists.

An :class:`AuxiliaryInput` bundles the auxiliary chain V -- U -- X used by the
rate-region formulas: a joint p(v, u) and a conditional p(x | u).
:func:`induced_joint` composes it with a channel into the full five-axis
joint p(v, u, x, y, z).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Sequence

import numpy as np

from .info_kernel import (
    MASS_SUM_TOL,
    ZERO_MASS_TOL,
    ConditionalKernel,
    JointPmf,
    Pmf,
)

__all__ = [
    "BroadcastChannel",
    "AuxiliaryInput",
    "ChannelFormatError",
    "is_semideterministic",
    "enhance",
    "induced_joint",
    "make_bsc_pair",
    "make_adder_erasure",
    "make_function_erasure",
    "channel_to_json",
    "channel_from_json",
    "aux_to_json",
    "aux_from_json",
    "aux_from_px",
    "detect_bsc_pair",
    "detect_adder_erasure",
    "detect_function_erasure",
]


class ChannelFormatError(ValueError):
    """Malformed channel/auxiliary description (schema or semantics)."""


@dataclass(frozen=True)
class BroadcastChannel:
    """W(y, z | x) with alphabets {0..x_size-1}, {0..y_size-1}, {0..z_size-1}.

    ``kernel.rows[x]`` enumerates (y, z) pairs row-major with z fastest.
    ``deterministic_map`` holds f with Y = f(X) when the channel is
    semideterministic, else ``None``.
    """

    x_size: int
    y_size: int
    z_size: int
    kernel: ConditionalKernel
    deterministic_map: tuple[int, ...] | None = None

    def w(self) -> np.ndarray:
        """Kernel as an (x, y, z) array."""
        return self.kernel.rows.reshape(self.x_size, self.y_size, self.z_size)


@dataclass(frozen=True)
class AuxiliaryInput:
    """Auxiliary chain V -- U -- X: joint p(v, u) plus conditional p(x | u)."""

    v_size: int
    u_size: int
    p_vu: JointPmf
    p_x_given_u: ConditionalKernel

    def __post_init__(self):
        if self.p_vu.axes != (("V", self.v_size), ("U", self.u_size)):
            raise ChannelFormatError(
                f"p_vu axes {self.p_vu.axes} do not match sizes (V={self.v_size}, U={self.u_size})"
            )
        fa = self.p_x_given_u.from_axes
        if fa != (("U", self.u_size),):
            raise ChannelFormatError(f"p_x_given_u conditions on {fa}, expected U")

    @property
    def x_size(self) -> int:
        return self.p_x_given_u.to_axes[0][1]


def make_channel(kernel_xyz: np.ndarray) -> BroadcastChannel:
    """Build a channel from an (x, y, z) kernel array, detecting determinism."""
    kernel_xyz = np.asarray(kernel_xyz, dtype=float)
    x_size, y_size, z_size = kernel_xyz.shape
    kern = ConditionalKernel(
        (("X", x_size),),
        (("Y", y_size), ("Z", z_size)),
        kernel_xyz.reshape(x_size, y_size * z_size),
    )
    c = BroadcastChannel(x_size, y_size, z_size, kern)
    f = is_semideterministic(c)
    if f is not None:
        c = BroadcastChannel(x_size, y_size, z_size, kern, tuple(f))
    return c


def is_semideterministic(c: BroadcastChannel, tol: float = 1e-12) -> list[int] | None:
    """Return f with Y = f(X) a.s. if each input has one supported Y, else None."""
    w = c.w()
    p_y_given_x = w.sum(axis=2)
    f: list[int] = []
    for x in range(c.x_size):
        ys = np.flatnonzero(p_y_given_x[x] > tol)
        if len(ys) != 1:
            return None
        f.append(int(ys[0]))
    return f


def enhance(c: BroadcastChannel) -> BroadcastChannel:
    """Reveal the stochastic output also to the deterministic receiver.

    The enhanced channel's Y-output is the pair (y, z) on the alphabet Y x Z
    flattened row-major (z fastest); the Z-output is unchanged, so the
    Z-marginal kernel is preserved exactly.  The enhanced Y-branch is
    deterministic only when Z was deterministic too (determinism is
    re-detected from the product kernel).
    """
    w = c.w()
    out = np.zeros((c.x_size, c.y_size * c.z_size, c.z_size))
    for y in range(c.y_size):
        for z in range(c.z_size):
            out[:, y * c.z_size + z, z] = w[:, y, z]
    return make_channel(out)


def induced_joint(c: BroadcastChannel, a: AuxiliaryInput) -> JointPmf:
    """p(v, u, x, y, z) = p(v, u) p(x|u) W(y, z|x)."""
    if a.x_size != c.x_size:
        raise ChannelFormatError(
            f"auxiliary input feeds |X|={a.x_size}, channel expects |X|={c.x_size}"
        )
    pvu = a.p_vu.mass  # (V, U)
    pxu = a.p_x_given_u.rows  # (U, X)
    w = c.w()  # (X, Y, Z)
    mass = np.einsum("vu,ux,xyz->vuxyz", pvu, pxu, w)
    return JointPmf(
        (
            ("V", a.v_size),
            ("U", a.u_size),
            ("X", c.x_size),
            ("Y", c.y_size),
            ("Z", c.z_size),
        ),
        mass,
    )


# ---------------------------------------------------------------------------
# example channels
# ---------------------------------------------------------------------------

def make_bsc_pair(p: float) -> BroadcastChannel:
    """Y = X noiselessly; Z = X xor S with S ~ Ber(p); everything binary."""
    if not 0.0 <= p <= 1.0:
        raise ChannelFormatError(f"flip probability {p!r} outside [0, 1]")
    w = np.zeros((2, 2, 2))
    for x in range(2):
        w[x, x, x] = 1.0 - p
        w[x, x, 1 - x] = p
    return make_channel(w)


def make_adder_erasure(p: float) -> BroadcastChannel:
    """Input x = 2*x1 + x2; Y = x1 + x2; Z = x2 or erased (symbol 2) w.p. p."""
    if not 0.0 <= p <= 1.0:
        raise ChannelFormatError(f"erasure probability {p!r} outside [0, 1]")
    w = np.zeros((4, 3, 3))
    for x1 in range(2):
        for x2 in range(2):
            x = 2 * x1 + x2
            y = x1 + x2
            w[x, y, x2] = 1.0 - p
            w[x, y, 2] = p
    return make_channel(w)


def make_function_erasure(f: Sequence[int], p: float) -> BroadcastChannel:
    """Y = f(X) noiselessly; Z = X or the erasure symbol (last index) w.p. p."""
    if not 0.0 <= p <= 1.0:
        raise ChannelFormatError(f"erasure probability {p!r} outside [0, 1]")
    f = [int(v) for v in f]
    x_size = len(f)
    if x_size < 1:
        raise ChannelFormatError("empty function table")
    y_size = max(f) + 1
    if sorted(set(f)) != list(range(y_size)):
        raise ChannelFormatError(f"function table {f} skips output symbols")
    z_size = x_size + 1
    w = np.zeros((x_size, y_size, z_size))
    for x in range(x_size):
        w[x, f[x], x] = 1.0 - p
        w[x, f[x], z_size - 1] = p
    return make_channel(w)


# ---------------------------------------------------------------------------
# structural detection of the example families (used for warm starts)
# ---------------------------------------------------------------------------

def _kernel_close(c: BroadcastChannel, other: BroadcastChannel, tol: float = 1e-9) -> bool:
    return (
        (c.x_size, c.y_size, c.z_size) == (other.x_size, other.y_size, other.z_size)
        and np.allclose(c.kernel.rows, other.kernel.rows, atol=tol)
    )


def detect_bsc_pair(c: BroadcastChannel, tol: float = 1e-9) -> float | None:
    if (c.x_size, c.y_size, c.z_size) != (2, 2, 2):
        return None
    p = float(c.w()[0, 0, 1])
    if 0.0 <= p <= 1.0 and _kernel_close(c, make_bsc_pair(p), tol):
        return p
    return None


def detect_adder_erasure(c: BroadcastChannel, tol: float = 1e-9) -> float | None:
    if (c.x_size, c.y_size, c.z_size) != (4, 3, 3):
        return None
    p = float(c.w()[0, 0, 2])
    if 0.0 <= p <= 1.0 and _kernel_close(c, make_adder_erasure(p), tol):
        return p
    return None


def detect_function_erasure(c: BroadcastChannel, tol: float = 1e-9) -> tuple[list[int], float] | None:
    if c.z_size != c.x_size + 1 or c.deterministic_map is None:
        return None
    f = list(c.deterministic_map)
    p = float(c.w()[0, f[0], c.z_size - 1])
    if 0.0 <= p <= 1.0 and _kernel_close(c, make_function_erasure(f, p), tol):
        return (f, p)
    return None


# ---------------------------------------------------------------------------
# JSON descriptions
#
# Channel schema:
#   {"x_size": int, "y_size": int, "z_size": int,
#    "kernel": [[decimal strings]],   # one row per x, columns (y, z) z-fastest
#    "f": [int, ...]}                 # optional deterministic map
# Auxiliary schema:
#   {"v_size": int, "u_size": int,
#    "p_vu": [[decimal strings]],          # v rows, u columns
#    "p_x_given_u": [[decimal strings]]}   # u rows, x columns
# ---------------------------------------------------------------------------

def _parse_decimal_matrix(obj, what: str) -> np.ndarray:
    try:
        return np.array([[float(Decimal(str(v))) for v in row] for row in obj], dtype=float)
    except (ValueError, TypeError, ArithmeticError) as exc:
        raise ChannelFormatError(f"bad {what} matrix: {exc}") from exc


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def channel_to_json(c: BroadcastChannel) -> str:
    doc = {
        "x_size": c.x_size,
        "y_size": c.y_size,
        "z_size": c.z_size,
        "kernel": [[_fmt(v) for v in row] for row in c.kernel.rows],
    }
    if c.deterministic_map is not None:
        doc["f"] = list(c.deterministic_map)
    return json.dumps(doc, indent=2)


def channel_from_json(text: str) -> BroadcastChannel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"invalid JSON: {exc}") from exc
    for key in ("x_size", "y_size", "z_size", "kernel"):
        if key not in doc:
            raise ChannelFormatError(f"missing channel field {key!r}")
    x_size, y_size, z_size = (int(doc[k]) for k in ("x_size", "y_size", "z_size"))
    if min(x_size, y_size, z_size) < 1:
        raise ChannelFormatError("alphabet sizes must be positive")
    rows = _parse_decimal_matrix(doc["kernel"], "kernel")
    if rows.shape != (x_size, y_size * z_size):
        raise ChannelFormatError(
            f"kernel shape {rows.shape} does not match (x_size, y_size*z_size)"
        )
    sums = rows.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > MASS_SUM_TOL) or np.any(rows < -ZERO_MASS_TOL):
        rows = rows / np.where(sums > 0, sums, 1.0)[:, None]
        if np.any(np.abs(sums - 1.0) > 1e-6):
            raise ChannelFormatError("kernel rows do not sum to 1")
    c = make_channel(rows.reshape(x_size, y_size, z_size))
    if "f" in doc:
        f = tuple(int(v) for v in doc["f"])
        if c.deterministic_map is None or f != c.deterministic_map:
            raise ChannelFormatError(
                f"declared deterministic map {f} does not match the kernel"
            )
    return c


def aux_to_json(a: AuxiliaryInput) -> str:
    return json.dumps(
        {
            "v_size": a.v_size,
            "u_size": a.u_size,
            "p_vu": [[_fmt(v) for v in row] for row in a.p_vu.mass],
            "p_x_given_u": [[_fmt(v) for v in row] for row in a.p_x_given_u.rows],
        },
        indent=2,
    )


def aux_from_json(text: str) -> AuxiliaryInput:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"invalid JSON: {exc}") from exc
    for key in ("v_size", "u_size", "p_vu", "p_x_given_u"):
        if key not in doc:
            raise ChannelFormatError(f"missing auxiliary field {key!r}")
    v_size, u_size = int(doc["v_size"]), int(doc["u_size"])
    pvu = _parse_decimal_matrix(doc["p_vu"], "p_vu")
    pxu = _parse_decimal_matrix(doc["p_x_given_u"], "p_x_given_u")
    if pvu.shape != (v_size, u_size):
        raise ChannelFormatError(f"p_vu shape {pvu.shape} != ({v_size}, {u_size})")
    if pxu.shape[0] != u_size:
        raise ChannelFormatError(f"p_x_given_u has {pxu.shape[0]} rows, expected {u_size}")
    return make_aux(pvu, pxu)


def make_aux(p_vu: np.ndarray, p_x_given_u: np.ndarray) -> AuxiliaryInput:
    """Build an AuxiliaryInput from raw (V, U) and (U, X) arrays."""
    p_vu = np.asarray(p_vu, dtype=float)
    p_x_given_u = np.asarray(p_x_given_u, dtype=float)
    v_size, u_size = p_vu.shape
    x_size = p_x_given_u.shape[1]
    return AuxiliaryInput(
        v_size=v_size,
        u_size=u_size,
        p_vu=JointPmf((("V", v_size), ("U", u_size)), p_vu),
        p_x_given_u=ConditionalKernel((("U", u_size),), (("X", x_size),), p_x_given_u),
    )


def aux_from_px(p_x: Pmf | Sequence[float]) -> AuxiliaryInput:
    """Degenerate auxiliary (V and U constant) carrying just an input law."""
    mass = p_x.mass if isinstance(p_x, Pmf) else np.asarray(p_x, dtype=float)
    return make_aux(np.array([[1.0]]), mass[None, :])
