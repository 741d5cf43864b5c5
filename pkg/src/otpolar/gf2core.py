"""GF(2) vectors, Kronecker generator matrices and the subgroup chain they define.

Vectors of length N are packed into Python ints with coordinate 1 in the most
significant position, so integer order is the lexicographic order on
``(y_1, ..., y_N)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_BITS = 24
#: Largest supported ``s``; 2**s must also fit in MAX_BITS.
MAX_S = 4


class CapacityError(ValueError):
    """Raised when a size parameter exceeds the configured cap."""


@dataclass(frozen=True, order=True)
class BitVec:
    """Immutable binary vector of fixed length."""

    bits: int
    length: int

    def __post_init__(self):
        if not 1 <= self.length <= MAX_BITS:
            raise ValueError(f"length must be in [1, {MAX_BITS}], got {self.length}")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"bits {self.bits:#x} do not fit in length {self.length}")

    @classmethod
    def from_tuple(cls, coords) -> "BitVec":
        bits = 0
        for c in coords:
            if c not in (0, 1):
                raise ValueError(f"coordinate {c!r} is not a bit")
            bits = (bits << 1) | c
        return cls(bits, len(coords))

    def to_tuple(self) -> tuple[int, ...]:
        n = self.length
        return tuple((self.bits >> (n - 1 - i)) & 1 for i in range(n))

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def __xor__(self, other: "BitVec") -> "BitVec":
        _check_same_length(self, other)
        return BitVec(self.bits ^ other.bits, self.length)

    def dot(self, other: "BitVec") -> int:
        _check_same_length(self, other)
        return (self.bits & other.bits).bit_count() & 1

    def __str__(self):
        return "(" + ",".join(map(str, self.to_tuple())) + ")"


def _check_same_length(a: BitVec, b: BitVec) -> None:
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} != {b.length}")


def check_s(s: int, max_s: int = MAX_S) -> int:
    if s < 0:
        raise ValueError(f"s must be non-negative, got {s}")
    if s > max_s:
        raise CapacityError(f"s={s} exceeds the cap s <= {max_s} (N <= {2 ** max_s})")
    return s


@dataclass(frozen=True)
class GeneratorMatrix:
    """``G_N = F^{(x)s}`` with ``F = [[1, 0], [1, 1]]``.

    ``rows`` is the 0/1 matrix in row form (lower triangular); ``columns`` are the
    packed columns ``G_N(:, 1), ..., G_N(:, N)``.
    """

    s: int
    rows: np.ndarray
    columns: tuple[BitVec, ...]

    @property
    def n(self) -> int:
        return 1 << self.s

    def column(self, t: int) -> BitVec:
        """1-based column accessor, matching ``G_N(:, t)``."""
        if not 1 <= t <= self.n:
            raise ValueError(f"column index {t} outside [1, {self.n}]")
        return self.columns[t - 1]


@lru_cache(maxsize=None)
def kronecker_generator(s: int, max_s: int = MAX_S) -> GeneratorMatrix:
    check_s(s, max_s)
    f = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    g = np.ones((1, 1), dtype=np.uint8)
    for _ in range(s):
        g = np.kron(g, f)
    g.setflags(write=False)
    cols = tuple(BitVec.from_tuple(tuple(int(b) for b in g[:, j])) for j in range(g.shape[1]))
    return GeneratorMatrix(s=s, rows=g, columns=cols)


def syndrome(x: BitVec, c: BitVec) -> int:
    """Parity of ``x AND c``; membership test for the subgroup chain."""
    return x.dot(c)


def _popcount_parity(words: np.ndarray) -> np.ndarray:
    w = words.astype(np.uint32)
    w ^= w >> 16
    w ^= w >> 8
    w ^= w >> 4
    w ^= w >> 2
    w ^= w >> 1
    return (w & 1).astype(np.uint8)


def popcount(words: np.ndarray) -> np.ndarray:
    w = words.astype(np.uint32)
    w = w - ((w >> 1) & 0x55555555)
    w = (w & 0x33333333) + ((w >> 2) & 0x33333333)
    w = (w + (w >> 4)) & 0x0F0F0F0F
    return ((w * 0x01010101) & 0xFFFFFFFF) >> 24


class SubgroupChain:
    """The chain ``X_0 > X_1 > ... > X_{N-1}`` cut out by successive columns of ``G_N``.

    ``X_t`` holds the vectors whose syndromes against columns ``1..t`` all vanish.
    Each vector is tagged with its *level*: the first column giving syndrome 1,
    or ``N`` if no column among ``1..N-1`` does.  Then ``x`` is in ``X_t`` iff
    ``level > t``, and ``X_{t-1} \\ X_t`` is exactly the level-``t`` vectors.
    """

    def __init__(self, s: int, max_s: int = MAX_S):
        self.generator = kronecker_generator(s, max_s)
        self.s = s
        self.n = self.generator.n
        n = self.n
        words = np.arange(1 << n, dtype=np.uint32)
        level = np.full(words.shape, n, dtype=np.int64)
        for t in range(n - 1, 0, -1):
            col = self.generator.column(t).bits
            odd = _popcount_parity(words & col).astype(bool)
            level[odd] = t
        self._words = words
        self._level = level
        self._weight = popcount(words).astype(np.int64)
        self._level.setflags(write=False)
        self._weight.setflags(write=False)

    def _check_t(self, t: int, lo: int) -> None:
        if not lo <= t <= self.n - 1:
            raise ValueError(f"round index t={t} outside [{lo}, {self.n - 1}]")

    def contains(self, x: BitVec, t: int) -> bool:
        """Membership in ``X_t`` via syndrome tests."""
        self._check_t(t, 0)
        if x.length != self.n:
            raise ValueError(f"length mismatch: {x.length} != {self.n}")
        return all(syndrome(x, self.generator.column(j)) == 0 for j in range(1, t + 1))

    def member_words(self, t: int) -> np.ndarray:
        """Packed members of ``X_t`` in ascending (lexicographic) order."""
        self._check_t(t, 0)
        return self._words[self._level > t]

    def coset_words(self, t: int) -> np.ndarray:
        """Packed members of ``X_{t-1} \\ X_t`` in ascending order."""
        self._check_t(t, 1)
        return self._words[self._level == t]

    def level_of(self, words) -> np.ndarray:
        return self._level[np.asarray(words, dtype=np.int64)]

    def weight_enumerator(self, t: int, coset: bool = False) -> np.ndarray:
        """Counts of members by Hamming weight: ``out[w] = #{x : wt(x) = w}``.

        ``coset=False`` gives the enumerator of ``X_t``; ``coset=True`` that of
        ``X_{t-1} \\ X_t``.
        """
        mask = self._level == t if coset else self._level > t
        if coset:
            self._check_t(t, 1)
        else:
            self._check_t(t, 0)
        return np.bincount(self._weight[mask], minlength=self.n + 1)


@lru_cache(maxsize=None)
def subgroup_chain(s: int, max_s: int = MAX_S) -> SubgroupChain:
    return SubgroupChain(s, max_s)


def subgroup_members(chain: SubgroupChain, t: int) -> list[BitVec]:
    """``X_t`` in ascending lexicographic order."""
    return [BitVec(int(w), chain.n) for w in chain.member_words(t)]


def min_coset_rep(chain: SubgroupChain, t: int) -> BitVec:
    """Lexicographically smallest element of ``X_{t-1} \\ X_t``; the round-``t`` shift."""
    words = chain.coset_words(t)
    return BitVec(int(words[0]), chain.n)


def coordinates(words, chain: SubgroupChain, t: int) -> np.ndarray:
    """Free coordinates of members of ``X_t``: syndromes against columns ``t+1..N``.

    ``G_N`` is an involution over GF(2), so ``u = x G_N`` is a bijection and the
    first ``t`` entries of ``u`` vanish on ``X_t``.  Returns a uint8 array of shape
    ``(len(words), N - t)``.
    """
    words = np.asarray(words, dtype=np.uint32)
    cols = [chain.generator.column(j).bits for j in range(t + 1, chain.n + 1)]
    out = np.empty(words.shape + (len(cols),), dtype=np.uint8)
    for k, c in enumerate(cols):
        out[..., k] = _popcount_parity(words & c)
    return out
