"""Desk-scale Monte-Carlo simulation of the binned-cloud-center Marton code.

The codebook is organized in cells indexed by the common message and the two
common message parts.  Each cell holds a handful of cloud-center words; each
cloud word carries conditionally drawn satellite words for the two receivers,
and the satellites are randomly allocated to bins indexed by the private
message parts.  Encoding searches the designated bins for a jointly typical
(cloud, Y-satellite, Z-satellite) triple; the Y-decoder matches its noiseless
observation against the bins it can see given its side information, and the
Z-decoder looks for a bin holding a satellite jointly typical with its noisy
observation.

Everything here is exact finite-blocklength simulation: no asymptotic
approximations, no error exponents.  At these blocklengths only trends are
meaningful, and the test suite asserts trends, not thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import AuxiliaryInput, BroadcastChannel, induced_joint
from .regions import RateTuple

__all__ = [
    "ALPHABET_CAP",
    "BLOCKLENGTH_CAP",
    "DIMENSION_CAP",
    "MEMORY_CAP_BYTES",
    "CodeParams",
    "MartonCodebook",
    "TrialStats",
    "EncodeFailure",
    "DecodeError",
    "is_typical",
    "build_codebook",
    "encode",
    "decode_y",
    "decode_z",
    "run_trials",
]

#: largest supported blocklength (typicality search cost grows as 2^(rate*n))
BLOCKLENGTH_CAP = 16
#: largest word count along any codebook dimension
DIMENSION_CAP = 1 << 14
#: largest supported alphabet on any axis
ALPHABET_CAP = 4
#: default cap on total codeword storage
MEMORY_CAP_BYTES = 1 << 26


def _word_count(n: int, rate: float) -> int:
    """Number of words at a given rate: floor(2^(n*rate)), at least 1."""
    if rate <= 0.0:
        return 1
    return max(1, int(np.floor(2.0 ** (n * rate) + 1e-9)))


@dataclass(frozen=True)
class CodeParams:
    """Blocklength, message rates, codebook rates, and typicality slacks.

    ``rates`` carries the five message rates; ``aux_rates`` the codebook
    rates (cloud rate, total Y-satellite rate, total Z-satellite rate).  The
    cloud rate may not exceed either satellite rate -- each cloud word needs
    at least one satellite of each kind -- and decoding must be run with
    strictly more slack than encoding: ``epsilon_tilde > epsilon > 0``.
    """

    n: int
    rates: RateTuple
    aux_rates: tuple[float, float, float]
    epsilon: float = 0.2
    epsilon_tilde: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"blocklength must be a positive integer, got {self.n!r}")
        if self.n > BLOCKLENGTH_CAP:
            raise ValueError(f"blocklength {self.n} exceeds cap {BLOCKLENGTH_CAP}")
        if any(v < 0.0 for v in self.rates.as_vector()):
            raise ValueError("message rates must be nonnegative")
        r_c, r_y, r_z = (float(v) for v in self.aux_rates)
        if r_c < 0.0 or r_y < 0.0 or r_z < 0.0:
            raise ValueError("codebook rates must be nonnegative")
        if r_c > min(r_y, r_z) + 1e-12:
            raise ValueError(
                f"cloud rate {r_c} exceeds a satellite rate min({r_y}, {r_z})"
            )
        if not 0.0 < self.epsilon < self.epsilon_tilde:
            raise ValueError(
                f"need epsilon_tilde > epsilon > 0, got "
                f"({self.epsilon!r}, {self.epsilon_tilde!r})"
            )

    def counts(self) -> dict[str, int]:
        """Word counts of every codebook dimension."""
        r = self.rates
        r_c, r_y, r_z = (float(v) for v in self.aux_rates)
        return {
            "m": _word_count(self.n, r.r_common),
            "m_y_p": _word_count(self.n, r.r_y_p),
            "m_y_c": _word_count(self.n, r.r_y_c),
            "m_z_p": _word_count(self.n, r.r_z_p),
            "m_z_c": _word_count(self.n, r.r_z_c),
            "v_per_cell": _word_count(self.n, r_c),
            "y_per_cloud": _word_count(self.n, r_y - r_c),
            "u_per_cloud": _word_count(self.n, r_z - r_c),
        }


@dataclass(frozen=True)
class EncodeFailure:
    """No jointly typical triple exists in the designated bins."""

    cell: int
    triples_searched: int


@dataclass(frozen=True)
class DecodeError:
    """Decoding failed: ``reason`` is "none" or "ambiguous"."""

    reason: str


@dataclass(frozen=True)
class TrialStats:
    """Error counts over a batch of independent trials."""

    trials: int
    encode_failures: int
    y_errors: int
    z_errors: int

    def __post_init__(self):
        for name in ("encode_failures", "y_errors", "z_errors"):
            v = getattr(self, name)
            if not 0 <= v <= self.trials:
                raise ValueError(f"{name}={v} outside [0, trials={self.trials}]")

    @property
    def total_error_rate(self) -> float:
        """(encode failures + Y errors + Z errors) / trials."""
        return (self.encode_failures + self.y_errors + self.z_errors) / self.trials

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "encode_failures": self.encode_failures,
            "y_errors": self.y_errors,
            "z_errors": self.z_errors,
            "encode_failure_rate": self.encode_failures / self.trials,
            "y_error_rate": self.y_errors / self.trials,
            "z_error_rate": self.z_errors / self.trials,
            "total_error_rate": self.total_error_rate,
        }


def is_typical(
    words: Sequence[np.ndarray], mass: np.ndarray, epsilon: float
) -> bool:
    """Relative-deviation typicality of a tuple of aligned words.

    True iff the empirical joint type pi of the words satisfies
    |pi(a) - p(a)| <= epsilon * p(a) for every cell a of ``mass`` -- in
    particular pi must vanish wherever p does.
    """
    words = [np.asarray(w) for w in words]
    n = words[0].shape[0]
    idx = np.ravel_multi_index(tuple(words), mass.shape)
    pi = np.bincount(idx, minlength=mass.size) / n
    p = mass.ravel()
    return bool(np.all(np.abs(pi - p) <= epsilon * p))


def _cdf_rows(rows: np.ndarray) -> np.ndarray:
    return np.cumsum(rows, axis=-1)


def _sample(rng: np.random.Generator, cdf: np.ndarray) -> np.ndarray:
    """One symbol per leading entry of ``cdf`` (last axis is the alphabet)."""
    u = rng.random(cdf.shape[:-1])
    return np.minimum(
        (u[..., None] >= cdf).sum(axis=-1), cdf.shape[-1] - 1
    ).astype(np.int8)


def _conditional(joint: np.ndarray) -> np.ndarray:
    """Rows p(last axis | leading axes), uniform where the margin vanishes."""
    denom = joint.sum(axis=-1, keepdims=True)
    size = joint.shape[-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        rows = np.where(denom > 0.0, joint / np.where(denom > 0.0, denom, 1.0), 1.0 / size)
    return rows


class MartonCodebook:
    """Immutable codeword storage plus the distributions needed at run time.

    ``v_words[cell, k]``, ``y_words[cell, k, l]``, ``u_words[cell, k, j]``
    are the cloud and satellite words of one cell; ``bin_y[cell, k * y_per_cloud + l]``
    and ``bin_z[cell, k * u_per_cloud + j]`` give each satellite's bin.  Cells
    enumerate (m, m_y_c, m_z_c) row-major with m_z_c fastest.
    """

    def __init__(
        self,
        c: BroadcastChannel,
        a: AuxiliaryInput,
        params: CodeParams,
        memory_cap: int = MEMORY_CAP_BYTES,
    ):
        for label, size in (
            ("X", c.x_size),
            ("Y", c.y_size),
            ("Z", c.z_size),
            ("U", a.u_size),
            ("V", a.v_size),
        ):
            if size > ALPHABET_CAP:
                raise ValueError(f"alphabet |{label}|={size} exceeds cap {ALPHABET_CAP}")
        counts = params.counts()
        self.counts = counts
        n_cells = counts["m"] * counts["m_y_c"] * counts["m_z_c"]
        y_per_cell = counts["v_per_cell"] * counts["y_per_cloud"]
        u_per_cell = counts["v_per_cell"] * counts["u_per_cloud"]
        for label, dim in (
            ("cells", n_cells),
            ("y words per cell", y_per_cell),
            ("u words per cell", u_per_cell),
            ("Y bins", counts["m_y_p"]),
            ("Z bins", counts["m_z_p"]),
        ):
            if dim > DIMENSION_CAP:
                raise ValueError(f"{label}={dim} exceeds cap {DIMENSION_CAP}")
        required = n_cells * (counts["v_per_cell"] + y_per_cell + u_per_cell) * params.n
        if required > memory_cap:
            raise ValueError(
                f"codeword storage needs {required} bytes, cap is {memory_cap}"
            )

        self.channel = c
        self.params = params
        self.n_cells = n_cells
        j = induced_joint(c, a)
        self.p_vyu = np.moveaxis(
            j.marginal(["V", "U", "Y"]).mass, 1, 2
        )  # (V, Y, U) for the encoder's triple test
        self.p_y = j.marginal(["Y"]).mass
        self.p_uz = j.marginal(["U", "Z"]).mass
        p_v = j.marginal(["V"]).mass
        p_y_v = _conditional(j.marginal(["V", "Y"]).mass)
        p_u_v = _conditional(j.marginal(["V", "U"]).mass)
        # p(x | y, u) over axes (U, Y, X): the encoder's input sampler
        p_x_yu = _conditional(np.moveaxis(j.marginal(["U", "X", "Y"]).mass, 1, 2))
        self._cdf_x_yu = _cdf_rows(p_x_yu)
        self._cdf_yz_x = _cdf_rows(c.kernel.rows)  # (X, Y*Z), z fastest

        n = params.n
        rng_v = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(0,)))
        rng_y = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(1,)))
        rng_u = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(2,)))
        rng_by = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(3,)))
        rng_bz = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(4,)))
        cdf_v = _cdf_rows(p_v)
        cdf_y_v = _cdf_rows(p_y_v)
        cdf_u_v = _cdf_rows(p_u_v)
        nv, nys, nus = counts["v_per_cell"], counts["y_per_cloud"], counts["u_per_cloud"]
        self.v_words = np.empty((n_cells, nv, n), dtype=np.int8)
        self.y_words = np.empty((n_cells, nv, nys, n), dtype=np.int8)
        self.u_words = np.empty((n_cells, nv, nus, n), dtype=np.int8)
        for cell in range(n_cells):
            v = _sample(rng_v, np.broadcast_to(cdf_v, (nv, n, cdf_v.shape[0])))
            self.v_words[cell] = v
            self.y_words[cell] = _sample(rng_y, cdf_y_v[v][:, None, :, :].repeat(nys, 1))
            self.u_words[cell] = _sample(rng_u, cdf_u_v[v][:, None, :, :].repeat(nus, 1))
        self.bin_y = rng_by.integers(counts["m_y_p"], size=(n_cells, nv * nys))
        self.bin_z = rng_bz.integers(counts["m_z_p"], size=(n_cells, nv * nus))

        # value index for the Y decoder: word bytes -> [(cell, flat index)]
        self._y_index: dict[bytes, list[tuple[int, int]]] = {}
        flat_y = self.y_words.reshape(n_cells, nv * nys, n)
        for cell in range(n_cells):
            for w in range(nv * nys):
                self._y_index.setdefault(flat_y[cell, w].tobytes(), []).append((cell, w))

    def cell_of(self, m: int, m_y_c: int, m_z_c: int) -> int:
        return (m * self.counts["m_y_c"] + m_y_c) * self.counts["m_z_c"] + m_z_c

    def cell_messages(self, cell: int) -> tuple[int, int, int]:
        rest, m_z_c = divmod(cell, self.counts["m_z_c"])
        m, m_y_c = divmod(rest, self.counts["m_y_c"])
        return m, m_y_c, m_z_c


def build_codebook(
    c: BroadcastChannel,
    a: AuxiliaryInput,
    params: CodeParams,
    memory_cap: int = MEMORY_CAP_BYTES,
) -> MartonCodebook:
    """Draw the full codebook; deterministic given ``params.seed``."""
    return MartonCodebook(c, a, params, memory_cap)


def encode(
    cb: MartonCodebook,
    messages: tuple[int, int, int, int, int],
    rng: np.random.Generator | None = None,
) -> np.ndarray | EncodeFailure:
    """Channel input for (m, m_y_p, m_y_c, m_z_p, m_z_c), or a failure.

    Scans the designated cell's clouds in label order -- cloud index first,
    then Y-satellite, then Z-satellite -- and takes the first triple that is
    jointly epsilon-typical with both satellites in their designated bins.
    The input word is then drawn symbolwise from p(x | y, u).
    """
    m, m_y_p, m_y_c, m_z_p, m_z_c = (int(v) for v in messages)
    counts = cb.counts
    for name, idx in (
        ("m", (m, counts["m"])),
        ("m_y_p", (m_y_p, counts["m_y_p"])),
        ("m_y_c", (m_y_c, counts["m_y_c"])),
        ("m_z_p", (m_z_p, counts["m_z_p"])),
        ("m_z_c", (m_z_c, counts["m_z_c"])),
    ):
        if not 0 <= idx[0] < idx[1]:
            raise ValueError(f"message {name}={idx[0]} outside [0, {idx[1]})")
    if rng is None:
        rng = np.random.default_rng(
            np.random.SeedSequence(cb.params.seed, spawn_key=(7,))
        )
    cell = cb.cell_of(m, m_y_c, m_z_c)
    nv, nys, nus = counts["v_per_cell"], counts["y_per_cloud"], counts["u_per_cloud"]
    eps = cb.params.epsilon
    searched = 0
    for k in range(nv):
        v = cb.v_words[cell, k]
        ls = [l for l in range(nys) if cb.bin_y[cell, k * nys + l] == m_y_p]
        js = [jj for jj in range(nus) if cb.bin_z[cell, k * nus + jj] == m_z_p]
        for l in ls:
            y = cb.y_words[cell, k, l]
            for jj in js:
                searched += 1
                u = cb.u_words[cell, k, jj]
                if is_typical((v, y, u), cb.p_vyu, eps):
                    cdf = cb._cdf_x_yu[u, y]  # (n, |X|) rows indexed per symbol
                    return _sample(rng, cdf)
    return EncodeFailure(cell=cell, triples_searched=searched)


def decode_y(
    cb: MartonCodebook, y_word: np.ndarray, m_z_c: int
) -> tuple[int, int, int] | DecodeError:
    """(m, m_y_p, m_y_c) whose visible bin holds the observed word, if unique.

    The observation must itself pass the wider typicality test; candidates
    are every (m, m_y_c, m_y_p) whose bin -- at the decoder's known m_z_c --
    contains a word equal to the observation.
    """
    if not 0 <= int(m_z_c) < cb.counts["m_z_c"]:
        raise ValueError(f"side information m_z_c={m_z_c} out of range")
    y_word = np.asarray(y_word, dtype=np.int8)
    if not is_typical((y_word,), cb.p_y, cb.params.epsilon_tilde):
        return DecodeError("none")
    found: set[tuple[int, int, int]] = set()
    for cell, w in cb._y_index.get(y_word.tobytes(), ()):
        m, m_y_c, mzc = cb.cell_messages(cell)
        if mzc != m_z_c:
            continue
        found.add((m, int(cb.bin_y[cell, w]), m_y_c))
        if len(found) > 1:
            return DecodeError("ambiguous")
    if not found:
        return DecodeError("none")
    return found.pop()


def decode_z(
    cb: MartonCodebook, z_word: np.ndarray, m_y_c: int
) -> tuple[int, int, int] | DecodeError:
    """(m, m_z_p, m_z_c) whose bin holds a satellite typical with the word.

    A bin qualifies when any of its Z-satellites is jointly typical with the
    observation under the wider slack; the decoder needs exactly one
    qualifying (m, m_z_c, m_z_p) triple.
    """
    if not 0 <= int(m_y_c) < cb.counts["m_y_c"]:
        raise ValueError(f"side information m_y_c={m_y_c} out of range")
    z_word = np.asarray(z_word, dtype=np.int8)
    counts = cb.counts
    nv, nus = counts["v_per_cell"], counts["u_per_cloud"]
    eps_t = cb.params.epsilon_tilde
    found: set[tuple[int, int, int]] = set()
    flat_u = cb.u_words.reshape(cb.n_cells, nv * nus, -1)
    for m in range(counts["m"]):
        for m_z_c in range(counts["m_z_c"]):
            cell = cb.cell_of(m, int(m_y_c), m_z_c)
            hit_bins = set()
            for w in range(nv * nus):
                b = int(cb.bin_z[cell, w])
                if b in hit_bins:
                    continue
                if is_typical((flat_u[cell, w], z_word), cb.p_uz, eps_t):
                    hit_bins.add(b)
            for b in hit_bins:
                found.add((m, b, m_z_c))
                if len(found) > 1:
                    return DecodeError("ambiguous")
    if not found:
        return DecodeError("none")
    return found.pop()


def run_trials(
    c: BroadcastChannel,
    a: AuxiliaryInput,
    params: CodeParams,
    trials: int,
) -> TrialStats:
    """Simulate independent transmissions; deterministic given params.seed.

    Each trial draws fresh uniform messages, encodes, passes the input
    through the channel kernel, and runs both decoders with their respective
    side information.  A failed encode counts only as an encode failure --
    nothing is transmitted.  Per-trial randomness comes from streams keyed by
    (seed, trial index), so trial outcomes do not depend on batch size or
    ordering.
    """
    if not (isinstance(trials, int) and trials >= 1):
        raise ValueError(f"need at least one trial, got {trials!r}")
    cb = build_codebook(c, a, params)
    counts = cb.counts
    sizes = (counts["m"], counts["m_y_p"], counts["m_y_c"], counts["m_z_p"], counts["m_z_c"])
    enc_fail = y_err = z_err = 0
    for t in range(trials):
        rng_msg = np.random.default_rng(
            np.random.SeedSequence(params.seed, spawn_key=(5, t))
        )
        rng_ch = np.random.default_rng(
            np.random.SeedSequence(params.seed, spawn_key=(6, t))
        )
        rng_x = np.random.default_rng(
            np.random.SeedSequence(params.seed, spawn_key=(7, t))
        )
        msg = tuple(int(rng_msg.integers(s)) for s in sizes)
        x = encode(cb, msg, rng=rng_x)
        if isinstance(x, EncodeFailure):
            enc_fail += 1
            continue
        yz = _sample(rng_ch, cb._cdf_yz_x[x])
        y_word = (yz // c.z_size).astype(np.int8)
        z_word = (yz % c.z_size).astype(np.int8)
        m, m_y_p, m_y_c, m_z_p, m_z_c = msg
        got_y = decode_y(cb, y_word, m_z_c)
        if got_y != (m, m_y_p, m_y_c):
            y_err += 1
        got_z = decode_z(cb, z_word, m_y_c)
        if got_z != (m, m_z_p, m_z_c):
            z_err += 1
    return TrialStats(trials, enc_fail, y_err, z_err)
