"""Toeplitz universal hashing over GF(2).

Bit strings are uint8 arrays of 0/1.  ``toeplitz_hash`` is the plain Toeplitz
family; ``UniversalHash`` is the modified family ``[I | T]`` used by the
protocol, which is also universal and always has full rank when the output is
no longer than the input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def toeplitz_matrix(seed_bits, in_len: int, out_len: int) -> np.ndarray:
    """``T[i, j] = seed[in_len - 1 + i - j]``; needs ``in_len + out_len - 1`` seed bits."""
    seed = np.asarray(seed_bits, dtype=np.uint8)
    if in_len < 1 or out_len < 0:
        raise ValueError("need in_len >= 1 and out_len >= 0")
    if out_len == 0:
        return np.zeros((0, in_len), dtype=np.uint8)
    need = in_len + out_len - 1
    if seed.shape != (need,):
        raise ValueError(f"seed has {seed.size} bits, expected in_len + out_len - 1 = {need}")
    idx = in_len - 1 + np.arange(out_len)[:, None] - np.arange(in_len)[None, :]
    return seed[idx]


def toeplitz_hash(seed_bits, input_bits, out_len: int) -> np.ndarray:
    x = np.asarray(input_bits, dtype=np.uint8)
    t = toeplitz_matrix(seed_bits, x.size, out_len)
    return gf2_matvec(t, x)


def gf2_matvec(mat: np.ndarray, x: np.ndarray) -> np.ndarray:
    return ((mat.astype(np.int64) @ x.astype(np.int64)) & 1).astype(np.uint8)


@dataclass(frozen=True)
class UniversalHash:
    """``x -> [I_out | T] x`` for ``out_len <= in_len``; plain Toeplitz otherwise."""

    in_len: int
    out_len: int
    seed: np.ndarray

    @classmethod
    def draw(cls, rng: np.random.Generator, in_len: int, out_len: int) -> "UniversalHash":
        return cls(in_len, out_len, rng.integers(0, 2, cls.seed_len(in_len, out_len), dtype=np.uint8))

    @staticmethod
    def seed_len(in_len: int, out_len: int) -> int:
        if out_len == 0:
            return 0
        if out_len <= in_len:
            return max(in_len - 1, 0) if out_len < in_len else 0
        return in_len + out_len - 1

    @property
    def matrix(self) -> np.ndarray:
        m = self.__dict__.get("_matrix")
        if m is None:
            m = self._build()
            m.setflags(write=False)
            object.__setattr__(self, "_matrix", m)
        return m

    def _build(self) -> np.ndarray:
        n, k = self.in_len, self.out_len
        if k == 0:
            return np.zeros((0, n), dtype=np.uint8)
        if k > n:
            return toeplitz_matrix(self.seed, n, k)
        mat = np.zeros((k, n), dtype=np.uint8)
        mat[:, :k] = np.eye(k, dtype=np.uint8)
        if k < n:
            mat[:, k:] = toeplitz_matrix(self.seed, n - k, k)
        return mat

    def __call__(self, bits) -> np.ndarray:
        x = np.asarray(bits, dtype=np.uint8)
        if x.shape != (self.in_len,):
            raise ValueError(f"hash input has {x.size} bits, expected {self.in_len}")
        return gf2_matvec(self.matrix, x)


def pack_bits(bits) -> int:
    """Big-endian packing of a 0/1 array into a Python int."""
    b = np.asarray(bits, dtype=np.uint8)
    if b.size == 0:
        return 0
    return int.from_bytes(np.packbits(b).tobytes(), "big") >> ((-b.size) % 8)
