"""Discrete memoryless channels, GEC decompositions and the two emulation families.

All entropies are in bits with the convention ``0 log 0 = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf2core import check_s, popcount, subgroup_chain

ROW_TOL = 1e-12
GEC_TOL = 1e-12
#: Largest transition matrix ``polar_round_channel`` will materialize.
MAX_MATRIX_ENTRIES = 1 << 22


class ChannelError(ValueError):
    """Invalid channel, or a channel that is not a supported GEC."""


@dataclass(frozen=True)
class Dmc:
    """Transition matrix ``W[x, y] = W(y|x)``, one row per input symbol."""

    matrix: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.matrix, dtype=float)
        if w.ndim != 2 or 0 in w.shape:
            raise ChannelError(f"transition matrix must be a non-empty 2-D array, got shape {w.shape}")
        if np.any(w < 0) or np.any(w > 1):
            raise ChannelError("transition probabilities must lie in [0, 1]")
        bad = np.abs(w.sum(axis=1) - 1.0) > ROW_TOL
        if np.any(bad):
            raise ChannelError(f"rows {np.flatnonzero(bad).tolist()} do not sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "matrix", w)

    @property
    def n_inputs(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class GecChannel:
    """A channel whose outputs split into non-erasure ``Y0`` and erasure ``Y1`` parts.

    ``W(y|x) = (1-p) W0(y|x)`` on ``Y0`` and ``p W1(y|x)`` on ``Y1``.  ``y0`` and
    ``y1`` list the base output indices of each part, in the column order of
    ``w0`` and ``w1``.
    """

    base: Dmc
    y0: tuple[int, ...]
    y1: tuple[int, ...]
    p: float
    w0: Dmc
    w1: Dmc
    input_dist: np.ndarray


@dataclass(frozen=True)
class PolarRoundStats:
    t: int
    p_t: float
    h_good: float
    h_bad: float
    survive_mass: float

    @property
    def gap(self) -> float:
        return self.h_bad - self.h_good


def _check_prob(q: float, name: str = "q") -> float:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {q}")
    return float(q)


def _check_open(q: float) -> float:
    _check_prob(q)
    if q in (0.0, 1.0):
        raise ChannelError(f"degenerate channel at q={q}; use 0 < q < 1")
    return float(q)


def bsc(q: float) -> Dmc:
    q = _check_prob(q)
    return Dmc(np.array([[1 - q, q], [q, 1 - q]]))


def _xlog2x(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def entropy(dist) -> float:
    return float(-_xlog2x(np.asarray(dist, dtype=float)).sum())


def conditional_entropy(ch: Dmc, input_dist) -> float:
    """``H(X|Y)`` for input law ``input_dist`` through ``ch``."""
    px = np.asarray(input_dist, dtype=float)
    if px.shape != (ch.n_inputs,):
        raise ValueError(f"input_dist has shape {px.shape}, expected ({ch.n_inputs},)")
    if abs(px.sum() - 1.0) > ROW_TOL or np.any(px < 0):
        raise ValueError("input_dist must be a probability vector")
    joint = px[:, None] * ch.matrix
    py = joint.sum(axis=0)
    h = -_xlog2x(joint).sum() + _xlog2x(py).sum()
    return max(float(h), 0.0)


def gec_decompose(base: Dmc, partition, input_dist, allow_all_inputs: bool = True) -> GecChannel:
    """Split ``base`` along ``partition`` (0 = non-erasure, 1 = erasure per output).

    Input-independence of the erasure mass is checked on every input in the
    support of ``input_dist`` (all inputs when ``allow_all_inputs`` is false is
    not required; unused inputs are ignored).
    """
    part = np.asarray(partition, dtype=int)
    if part.shape != (base.n_outputs,) or not np.all((part == 0) | (part == 1)):
        raise ChannelError("partition must assign 0 or 1 to every output symbol")
    if not part.any():
        raise ChannelError("erasure set Y1 is empty")
    if part.all():
        raise ChannelError("non-erasure set Y0 is empty")
    px = np.asarray(input_dist, dtype=float)
    if px.shape != (base.n_inputs,) or abs(px.sum() - 1.0) > ROW_TOL or np.any(px < 0):
        raise ValueError("input_dist must be a probability vector over the base inputs")
    used = px > 0 if allow_all_inputs else np.ones_like(px, dtype=bool)
    y0 = tuple(np.flatnonzero(part == 0).tolist())
    y1 = tuple(np.flatnonzero(part == 1).tolist())
    w = base.matrix
    mass = w[:, y1].sum(axis=1)
    p = float(mass[used][0])
    if np.any(np.abs(mass[used] - p) > GEC_TOL):
        raise ChannelError(
            f"not a GEC: erasure mass varies across inputs ({mass[used].min():.6g}..{mass[used].max():.6g})"
        )
    if p <= 0.0:
        raise ChannelError("not a GEC: erasure probability is zero")
    if p > 0.5 + GEC_TOL:
        raise ChannelError(f"unsupported erasure regime: p={p:.6g} > 1/2")
    w0 = np.zeros((base.n_inputs, len(y0)))
    w1 = np.zeros((base.n_inputs, len(y1)))
    w0[used] = w[np.ix_(used, y0)] / (1.0 - p)
    w1[used] = w[np.ix_(used, y1)] / p
    # rows of unused inputs carry no information; keep them stochastic
    w0[~used] = 1.0 / len(y0)
    w1[~used] = 1.0 / len(y1)
    return GecChannel(base=base, y0=y0, y1=y1, p=min(p, 0.5), w0=Dmc(w0), w1=Dmc(w1), input_dist=px)


def block_bsc(q: float, n: int) -> Dmc:
    """``n`` independent uses of BSC(q) as one channel on ``{0,1}^n`` (packed, MSB first)."""
    q = _check_prob(q)
    size = 1 << n
    x = np.arange(size)
    flips = np.array([bin(v).count("1") for v in range(size)])
    wt = flips[x[:, None] ^ x[None, :]]
    return Dmc(q**wt * (1 - q) ** (n - wt))


def bsec_from_extension(q: float) -> GecChannel:
    """Two BSC uses with inputs restricted to 00/11; 01 and 10 act as erasures."""
    q = _check_open(q)
    base = block_bsc(q, 2)
    partition = [0, 1, 1, 0]
    return gec_decompose(base, partition, [0.5, 0.0, 0.0, 0.5])


def extension_params(q: float) -> tuple[float, float]:
    """Erasure probability and residual crossover of the 00/11 emulation."""
    p1 = 2.0 * q * (1.0 - q)
    q1 = q * q / ((1.0 - q) ** 2 + q * q)
    return p1, q1


# -- polarization rounds ---------------------------------------------------


def _weight_probs(q: float, n: int) -> np.ndarray:
    w = np.arange(n + 1)
    return q**w * (1.0 - q) ** (n - w)


def _coset_mass_entropy(counts: np.ndarray, probs: np.ndarray) -> tuple[float, float]:
    """Mass and conditional entropy of a set given its weight enumerator."""
    mass = float(counts @ probs)
    if mass <= 0.0:
        return 0.0, 0.0
    cond = probs / mass
    h = -float(counts @ _xlog2x(cond))
    return mass, max(h, 0.0)


@lru_cache(maxsize=None)
def _enumerators(s: int) -> tuple[np.ndarray, np.ndarray]:
    chain = subgroup_chain(s)
    n = chain.n
    sub = np.stack([chain.weight_enumerator(t) for t in range(n)])
    cos = np.stack([np.zeros(n + 1, dtype=np.int64)] + [chain.weight_enumerator(t, coset=True) for t in range(1, n)])
    sub.setflags(write=False)
    cos.setflags(write=False)
    return sub, cos


def polar_round_stats(q: float, s: int, t: int) -> PolarRoundStats:
    """Exact round-``t`` quantities for the N = 2**s polarization emulation.

    Surviving blocks have error ``e`` in ``X_{t-1}``; round ``t`` erases iff
    ``e`` falls in the coset ``X_{t-1} \\ X_t``.  Because the channel is additive and
    the input uniform on a subgroup, ``H(X_t | Y_{t,b})`` is the entropy of ``e``
    restricted to the matching coset.
    """
    q = _check_open(q)
    check_s(s)
    n = 1 << s
    if not 1 <= t <= n - 1:
        raise ValueError(f"round index t={t} outside [1, {n - 1}]")
    sub, cos = _enumerators(s)
    probs = _weight_probs(q, n)
    prev_mass = float(sub[t - 1] @ probs)
    good_mass, h_good = _coset_mass_entropy(sub[t], probs)
    bad_mass, h_bad = _coset_mass_entropy(cos[t], probs)
    p_t = bad_mass / prev_mass
    return PolarRoundStats(t=t, p_t=p_t, h_good=h_good, h_bad=h_bad, survive_mass=good_mass)


def polar_round_channel(q: float, s: int, t: int) -> tuple[GecChannel, PolarRoundStats]:
    """The round-``t`` emulated GEC as an explicit transition matrix.

    Inputs are the members of ``X_t`` (uniform), outputs the members of
    ``X_{t-1}``; ``W(y|x) = Pr(e = x + y | e in X_{t-1})``.
    """
    stats = polar_round_stats(q, s, t)
    chain = subgroup_chain(s)
    n = chain.n
    xs = chain.member_words(t).astype(np.int64)
    ys = chain.member_words(t - 1).astype(np.int64)
    if len(xs) * len(ys) > MAX_MATRIX_ENTRIES:
        raise ChannelError(
            f"round channel s={s}, t={t} has {len(xs)}x{len(ys)} entries; use polar_round_stats"
        )
    probs = _weight_probs(q, n)
    e = xs[:, None] ^ ys[None, :]
    wt = popcount(e).astype(np.int64)
    w = probs[wt]
    w = w / w.sum(axis=1, keepdims=True)
    partition = (chain.level_of(ys) == t).astype(int)
    px = np.full(len(xs), 1.0 / len(xs))
    return gec_decompose(Dmc(w), partition, px), stats
