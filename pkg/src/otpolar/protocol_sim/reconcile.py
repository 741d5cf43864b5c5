"""Information reconciliation: list decoding against a linear hash.

The receiver ranks candidate strings by posterior probability (symbols are
independent given the channel outputs) and accepts the first candidate whose
hash equals the sender's message.  Hashes are linear, so a candidate's hash is
the hash of the per-symbol MAP string XOR the hash differences of its
deviations; everything is tracked as packed Python ints.
"""

from __future__ import annotations

import heapq
import math
from typing import Callable, Sequence

import numpy as np

from ..channels import Dmc
from .hashing import UniversalHash, pack_bits


def best_first(
    deltas: Sequence[np.ndarray],
    contrib: Callable[[int, int], int],
    target: int,
    list_cap: int,
):
    """Enumerate rank vectors in order of increasing total cost; return the first hit.

    ``deltas[i][r]`` is the cost (negative log posterior ratio, non-decreasing in
    ``r``, ``deltas[i][0] == 0``) of taking alternative ``r`` at position ``i``.
    ``contrib(i, r)`` gives the hash difference of that choice relative to rank 0.
    Returns ``(deviations, visited)`` where ``deviations`` maps position to rank,
    or ``(None, visited)`` if no candidate within ``list_cap`` matches ``target``.

    Each candidate is a set of deviations ordered by the rank-1 cost of their
    positions; its unique parent either lowers the last rank by one, drops a
    trailing rank-1 deviation that follows its predecessor directly, or shifts
    a trailing rank-1 deviation back by one position.  Children never cost
    less than their parent, so a heap yields candidates in cost order.
    """
    order = [i for i in range(len(deltas)) if len(deltas[i]) > 1]
    order.sort(key=lambda i: deltas[i][1])
    visited = 0
    if list_cap < 1:
        return None, visited
    visited = 1
    if target == 0:
        return {}, visited
    if not order:
        return None, visited
    k = len(order)
    counter = 0
    # entries: (cost, tiebreak, devs as tuple of (slot, rank), hash)
    first = order[0]
    heap = [(float(deltas[first][1]), counter, ((0, 1),), contrib(first, 1))]
    while heap and visited < list_cap:
        cost, _, devs, h = heapq.heappop(heap)
        visited += 1
        if h == target:
            return {order[slot]: r for slot, r in devs}, visited
        slot, r = devs[-1]
        pos = order[slot]
        d = deltas[pos]
        children = []
        if r + 1 < len(d):
            children.append((cost - d[r] + d[r + 1], devs[:-1] + ((slot, r + 1),),
                             h ^ contrib(pos, r) ^ contrib(pos, r + 1)))
        if slot + 1 < k:
            nxt = order[slot + 1]
            nd = deltas[nxt][1]
            children.append((cost + nd, devs + ((slot + 1, 1),), h ^ contrib(nxt, 1)))
            if r == 1:
                children.append((cost - d[1] + nd, devs[:-1] + ((slot + 1, 1),),
                                 h ^ contrib(pos, 1) ^ contrib(nxt, 1)))
        for c_cost, c_devs, c_h in children:
            counter += 1
            heapq.heappush(heap, (c_cost, counter, c_devs, c_h))
    return None, visited


class _HashColumns:
    """Hash differences of per-position symbol changes, cached."""

    def __init__(self, hash_fn: UniversalHash, symbol_bits: int):
        self.matrix = hash_fn.matrix.astype(np.int64)
        self.b = symbol_bits

    def of(self, pos: int, bits: np.ndarray) -> int:
        block = self.matrix[:, pos * self.b:(pos + 1) * self.b]
        return pack_bits((block @ bits.astype(np.int64)) & 1)


def reconcile_decode(
    y_view,
    c_bits,
    w0: Dmc,
    list_cap: int,
    hash_fn: UniversalHash,
    encode: np.ndarray,
    input_dist=None,
):
    """Recover the sender's symbols from outputs ``y_view`` and hash ``c_bits``.

    ``encode[x]`` is the bit string of input symbol ``x`` (all of equal length);
    the hash acts on the concatenation.  Per-symbol posteriors come from ``w0``
    and ``input_dist`` (uniform over inputs with a non-zero encode row if
    omitted).  Returns an int array of input symbols, or ``None`` on failure.
    """
    y_view = np.asarray(y_view, dtype=np.int64)
    encode = np.asarray(encode, dtype=np.uint8)
    b = encode.shape[1]
    if hash_fn.in_len != b * len(y_view):
        raise ValueError("hash input length does not match m * symbol bits")
    px = np.full(w0.n_inputs, 1.0 / w0.n_inputs) if input_dist is None else np.asarray(input_dist, float)
    cols = _HashColumns(hash_fn, b)
    alts, deltas = [], []
    for y in y_view:
        post = px * w0.matrix[:, y]
        cand = np.flatnonzero(post > 0)
        logp = np.log(post[cand])
        idx = np.lexsort((cand, -logp))
        alts.append(cand[idx])
        deltas.append(logp[idx][0] - logp[idx])
    base_bits = np.concatenate([encode[a[0]] for a in alts]) if alts else np.zeros(0, np.uint8)
    base = pack_bits(hash_fn(base_bits))
    target = pack_bits(c_bits) ^ base
    cache: dict = {}

    def contrib(i, r):
        key = (i, r)
        v = cache.get(key)
        if v is None:
            v = cols.of(i, encode[alts[i][r]] ^ encode[alts[i][0]])
            cache[key] = v
        return v

    devs, _ = best_first(deltas, contrib, target, list_cap)
    if devs is None:
        return None
    out = np.array([a[0] for a in alts], dtype=np.int64)
    for i, r in devs.items():
        out[i] = alts[i][r]
    return out


def shells_within(m: int, list_cap: int) -> int:
    """Largest ``w`` with ``sum_{k<=w} C(m, k) <= list_cap`` (-1 if even ``w=0`` does not fit)."""
    total, w = 0, -1
    while w < m:
        nxt = total + math.comb(m, w + 1)
        if nxt > list_cap:
            break
        total, w = nxt, w + 1
    return w


def min_weight_solution(columns, target: int, max_weight: int):
    """Lexicographically first index set of minimum size ``<= max_weight`` whose
    columns XOR to ``target``; ``None`` if there is none.

    Meet in the middle over subsets of size <= 2, so ``max_weight`` <= 4.
    ``columns`` are packed ints; all must fit in 63 bits.
    """
    if max_weight > 4:
        raise ValueError("min_weight_solution supports max_weight <= 4")
    if max_weight < 0:
        return None
    if target == 0:
        return ()
    cols = np.asarray(columns, dtype=np.uint64)
    m = cols.size
    tgt = np.uint64(target)
    if max_weight >= 1:
        hit = np.flatnonzero(cols == tgt)
        if hit.size:
            return (int(hit[0]),)
    if max_weight < 2 or m < 2:
        return None
    ii, jj = np.triu_indices(m, 1)
    pairs = cols[ii] ^ cols[jj]
    order = np.argsort(pairs, kind="stable")
    sorted_pairs = pairs[order]

    def lookup(values):
        lo = np.searchsorted(sorted_pairs, values, side="left")
        hi = np.searchsorted(sorted_pairs, values, side="right")
        return lo, hi

    hit = np.flatnonzero(pairs == tgt)
    if hit.size:
        return (int(ii[hit[0]]), int(jj[hit[0]]))
    if max_weight < 3:
        return None
    best = None
    lo, hi = lookup(cols ^ tgt)
    for a in np.flatnonzero(hi > lo):
        for k in order[lo[a]:hi[a]]:
            trip = {int(a), int(ii[k]), int(jj[k])}
            if len(trip) == 3:
                cand = tuple(sorted(trip))
                best = cand if best is None or cand < best else best
    if best is not None or max_weight < 4:
        return best
    lo, hi = lookup(pairs ^ tgt)
    for p in np.flatnonzero(hi > lo):
        for k in order[lo[p]:hi[p]]:
            quad = {int(ii[p]), int(jj[p]), int(ii[k]), int(jj[k])}
            if len(quad) == 4:
                cand = tuple(sorted(quad))
                best = cand if best is None or cand < best else best
    return best
