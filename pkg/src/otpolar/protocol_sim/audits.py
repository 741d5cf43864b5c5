"""Correctness and privacy audits of the simulated protocol."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2_contingency

from ..gf2core import coordinates, popcount, subgroup_chain
from .hashing import UniversalHash
from .protocol import Step2Sampler, Transcript

EXACT_TOL = 1e-12
EXACT_AUDIT_MAX_M = 12
#: Largest ``l + kappa`` for the transform-based exact distance.
TRANSFORM_MAX_BITS = 22


@dataclass(frozen=True)
class ReceiverPrivacy:
    exact_pass: bool
    max_deviation: float
    chi2: float | None = None
    p_value: float | None = None


def exact_sampler_check(sampler: Step2Sampler, erase_probs) -> tuple[bool, float]:
    """``P(V=0|x) = P(V=1|x) = p`` for every input, from the sampler's own law.

    ``erase_probs`` lists ``sum_{y in Y1} W(y|x)`` for each input ``x``.
    """
    dev = 0.0
    for e in np.atleast_1d(erase_probs):
        law = sampler.law_given_input(float(e))
        dev = max(dev, abs(law[0] - sampler.p), abs(law[1] - sampler.p))
    return dev <= EXACT_TOL, dev


def index_statistics(transcripts: list[Transcript], cap: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """Choice bits and categorical summaries of ``(I_0, I_1)`` for non-aborted runs.

    The summary is ``(min(I_0[0], cap), min(I_1[0], cap))``: where each index list
    starts, which is all the sender could tell the two lists apart by.
    """
    bs, cats = [], []
    for tr in transcripts:
        if tr.aborted:
            continue
        bs.append(tr.b)
        cats.append(min(int(tr.i0[0]), cap) * (cap + 1) + min(int(tr.i1[0]), cap))
    return np.array(bs, dtype=int), np.array(cats, dtype=int)


def chi2_independence(bs: np.ndarray, cats: np.ndarray) -> tuple[float, float]:
    """Chi-square test of independence between ``B`` and the index summary."""
    if bs.size == 0:
        return 0.0, 1.0
    labels = np.unique(cats)
    table = np.array([[np.sum((bs == b) & (cats == c)) for c in labels] for b in (0, 1)])
    table = table[table.sum(axis=1) > 0]
    if table.shape[0] < 2 or table.shape[1] < 2:
        return 0.0, 1.0
    res = chi2_contingency(table)
    return float(res[0]), float(res[1])


def audit_receiver_privacy(sampler: Step2Sampler, erase_probs, transcripts=None) -> ReceiverPrivacy:
    ok, dev = exact_sampler_check(sampler, erase_probs)
    if transcripts is None:
        return ReceiverPrivacy(ok, dev)
    stat, pval = chi2_independence(*index_statistics(transcripts))
    return ReceiverPrivacy(ok, dev, stat, pval)


# -- sender privacy -----------------------------------------------------------


def _fwht(a: np.ndarray) -> np.ndarray:
    a = a.astype(float).copy()
    h = 1
    n = a.size
    while h < n:
        a = a.reshape(-1, 2, h)
        lo, hi = a[:, 0, :].copy(), a[:, 1, :]
        a[:, 0, :] += hi
        a[:, 1, :] = lo - hi
        a = a.reshape(n)
        h *= 2
    return a


def _stack(f: UniversalHash, g: UniversalHash) -> np.ndarray:
    return np.vstack([f.matrix, g.matrix]).astype(np.int64)


def _distance_from_joint(joint: np.ndarray, l: int, kappa: int) -> float:
    """``d(P_SC, U_S x P_C)`` from ``joint[s * 2**kappa + c]``."""
    p = joint.reshape(1 << l, 1 << kappa)
    pc = p.sum(axis=0)
    return 0.5 * float(np.abs(p - pc[None, :] / (1 << l)).sum())


def hash_distance_enumerate(f: UniversalHash, g: UniversalHash, symbol_law, symbol_bits: int) -> float:
    """Exact distance by listing every input string (``m * symbol_bits`` small)."""
    law = np.asarray(symbol_law, float)
    m = f.in_len // symbol_bits
    mat = _stack(f, g)
    l, kappa = f.out_len, g.out_len
    joint = np.zeros(1 << (l + kappa))
    weights = 1 << np.arange(l + kappa)[::-1]
    for syms in itertools.product(range(1 << symbol_bits), repeat=m):
        pr = np.prod(law[list(syms)])
        if pr == 0.0:
            continue
        bits = np.array([(sy >> (symbol_bits - 1 - k)) & 1 for sy in syms for k in range(symbol_bits)])
        out = (mat @ bits) & 1
        joint[int(out @ weights)] += pr
    return _distance_from_joint(joint, l, kappa)


def hash_distance_transform(f: UniversalHash, g: UniversalHash, symbol_law, symbol_bits: int) -> float:
    """Exact distance through the Walsh-Hadamard transform of the output law.

    With independent symbols, ``E(-1)^{u . Mx} = prod_i phi_i(M_i^T u)`` where
    ``phi`` is the transform of one symbol's law, so the output law costs
    ``O(2**(l + kappa) * m)`` instead of an enumeration of all inputs.
    """
    law = np.asarray(symbol_law, float)
    mat = _stack(f, g)
    k = mat.shape[0]
    if k > TRANSFORM_MAX_BITS:
        raise ValueError(f"l + kappa = {k} exceeds {TRANSFORM_MAX_BITS}")
    m = f.in_len // symbol_bits
    phi = _fwht(law)
    us = np.arange(1 << k)
    ubits = (us[:, None] >> np.arange(k)[::-1]) & 1
    a = (ubits @ mat) & 1
    place = 1 << np.arange(symbol_bits)[::-1]
    char = np.ones(1 << k)
    for i in range(m):
        char *= phi[a[:, i * symbol_bits:(i + 1) * symbol_bits] @ place]
    joint = _fwht(char) / (1 << k)
    return _distance_from_joint(np.clip(joint, 0.0, None), f.out_len, g.out_len)


def bernoulli_law(bias: float) -> np.ndarray:
    return np.array([1.0 - bias, bias])


def erased_symbol_law(q: float, s: int, t: int) -> np.ndarray:
    """Law of one symbol of ``X`` given an erased round-``t`` output, in coordinate order.

    The symbol is the ``N - t`` coordinate bits of ``x`` in ``X_t`` (MSB first).
    The output fixed here is the smallest erased word; any other erased output
    gives the same law up to an affine relabelling of symbols.
    """
    chain = subgroup_chain(s)
    y = int(np.min(chain.coset_words(t)))
    xs = chain.member_words(t).astype(np.int64)
    d = popcount(xs ^ y)
    w = np.exp(d * np.log(q) + (chain.n - d) * np.log1p(-q))
    bits = coordinates(xs, chain, t).astype(np.int64)
    idx = bits @ (1 << np.arange(bits.shape[1])[::-1])
    law = np.zeros(1 << bits.shape[1])
    np.add.at(law, idx, w)
    return law / law.sum()


def audit_sender_privacy_small_m(
    m: int,
    kappa: int,
    l: int,
    rng: np.random.Generator,
    symbol_law=None,
    symbol_bits: int = 1,
    n_seeds: int = 100,
    method: str = "auto",
) -> float:
    """Mean over random hash pairs of ``d(P_{S C}, U_S x P_C)`` for the unchosen key.

    ``symbol_law`` is the law of one symbol of ``X_{I_notB}`` given the
    receiver's view (uniform by default, as for the BSEC whose erasure side is
    useless).  Exact for every seed; ``m`` above the cap is refused.
    """
    if m > EXACT_AUDIT_MAX_M:
        raise ValueError(f"exact audit unavailable for m={m} > {EXACT_AUDIT_MAX_M}")
    if l < 1 or kappa < 0 or m < 1:
        raise ValueError("need m >= 1, l >= 1 and kappa >= 0")
    law = np.full(1 << symbol_bits, 1.0 / (1 << symbol_bits)) if symbol_law is None else np.asarray(symbol_law)
    in_len = m * symbol_bits
    if method == "auto":
        method = "transform" if l + kappa <= TRANSFORM_MAX_BITS else "enumerate"
    dist = hash_distance_transform if method == "transform" else hash_distance_enumerate
    total = 0.0
    for _ in range(n_seeds):
        f = UniversalHash.draw(rng, in_len, l)
        g = UniversalHash.draw(rng, in_len, kappa)
        total += dist(f, g, law, symbol_bits)
    return total / n_seeds
