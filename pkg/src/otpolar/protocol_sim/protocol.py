"""Finite-length runs of the standard GEC oblivious-transfer protocol.

Every scheme here is an additive block channel over ``{0,1}^N``: the sender's
block lies in a subgroup ``X_t`` of the polarization chain, the BSC adds an
error block ``e`` and the receiver sees ``y = x ^ e``.  The 00/11 alphabet
extension is the case ``N = 2, t = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..channels import GecChannel, PolarRoundStats, conditional_entropy, polar_round_stats
from ..gf2core import coordinates, min_coset_rep, subgroup_chain
from .hashing import UniversalHash, pack_bits
from .reconcile import best_first, min_weight_solution, shells_within

EPS = 1e-9
DEFAULT_DELTA = 0.05
DEFAULT_TRIALS = 1000
DEFAULT_LIST_CAP = 1 << 16


class InfeasibleError(ValueError):
    """The requested (n, delta) leaves no extractable key."""


@dataclass(frozen=True)
class OtParams:
    n: int
    q: float
    scheme: str = "bsec"
    s: int = 1
    delta: float = DEFAULT_DELTA
    delta_m: float | None = None
    delta_ir: float | None = None
    delta_pa: float | None = None
    seed: int = 0
    trials: int = DEFAULT_TRIALS
    decode_list_cap: int = DEFAULT_LIST_CAP

    def __post_init__(self):
        if self.scheme not in ("bsec", "polar"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.scheme == "bsec" and self.s != 1:
            object.__setattr__(self, "s", 1)
        if self.n < 1 or self.trials < 1 or self.decode_list_cap < 1:
            raise ValueError("n, trials and decode_list_cap must be positive")
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must be in (0, 1), got {self.q}")

    @property
    def margins(self) -> tuple[float, float, float]:
        d = self.delta
        pick = lambda v: d if v is None else v  # noqa: E731
        return pick(self.delta_m), pick(self.delta_ir), pick(self.delta_pa)

    @property
    def block_len(self) -> int:
        return 1 << self.s

    def as_dict(self) -> dict:
        dm, di, dp = self.margins
        return {
            "scheme": self.scheme,
            "q": self.q,
            "s": self.s,
            "n": self.n,
            "delta_m": dm,
            "delta_ir": di,
            "delta_pa": dp,
            "trials": self.trials,
            "seed": self.seed,
            "decode_list_cap": self.decode_list_cap,
        }


@dataclass(frozen=True)
class Lengths:
    m: int
    kappa: int
    l: int


def _entropies(ch) -> tuple[float, float, float]:
    if isinstance(ch, GecChannel):
        return ch.p, conditional_entropy(ch.w0, ch.input_dist), conditional_entropy(ch.w1, ch.input_dist)
    if isinstance(ch, PolarRoundStats):
        return ch.p_t, ch.h_good, ch.h_bad
    raise TypeError(f"expected GecChannel or PolarRoundStats, got {type(ch).__name__}")


def derive_lengths(ch, n: int, delta, check: bool = True) -> Lengths:
    """``m = floor(n(p - D))``, ``kappa = ceil(m(H(X|Y0) + D))``, ``l = floor(m(H(X|Y1) - D)) - kappa``.

    ``delta`` is one margin or a triple ``(D_m, D_ir, D_pa)``.
    """
    p, h0, h1 = _entropies(ch)
    dm, di, dp = (delta, delta, delta) if np.isscalar(delta) else delta
    for d in (dm, di, dp):
        if d <= 0:
            raise ValueError(f"margins must be positive, got {d}")
    if dm >= p:
        raise ValueError(f"margin {dm} must be smaller than the erasure probability {p:.6g}")
    m = math.floor(n * (p - dm) + EPS)
    kappa = max(math.ceil(m * (h0 + di) - EPS), 0)
    l = math.floor(m * (h1 - dp) + EPS) - kappa
    if check and (m < 1 or l < 1):
        raise InfeasibleError(f"no extractable key at n={n}, delta={delta} (m={m}, kappa={kappa}, l={l})")
    return Lengths(m, kappa, l)


@dataclass(frozen=True)
class Step2Sampler:
    """Receiver's labelling: erasures get ``V=1``; non-erasures ``V=0`` w.p. ``p/(1-p)``, else ``V=2``.

    ``fault=True`` applies the discard coin to the erasure side instead, which
    breaks obliviousness; it exists for negative tests.
    """

    p: float
    fault: bool = False

    @property
    def keep(self) -> float:
        return self.p / (1.0 - self.p)

    def law(self, erased: bool) -> tuple[float, float, float]:
        """``(P(V=0), P(V=1), P(V=2))`` given the output's side of the partition."""
        k = self.keep
        if self.fault:
            return (0.0, k, 1.0 - k) if erased else (1.0, 0.0, 0.0)
        return (0.0, 1.0, 0.0) if erased else (k, 0.0, 1.0 - k)

    def law_given_input(self, erase_prob: float) -> np.ndarray:
        on_y1 = np.array(self.law(True))
        on_y0 = np.array(self.law(False))
        return erase_prob * on_y1 + (1.0 - erase_prob) * on_y0

    def sample(self, erased: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(erased.shape)
        p0 = np.where(erased, self.law(True)[0], self.law(False)[0])
        p1 = np.where(erased, self.law(True)[1], self.law(False)[1])
        return np.where(u < p0, 0, np.where(u < p0 + p1, 1, 2)).astype(np.int8)


@dataclass(frozen=True)
class RoundSpec:
    """Static description of one emulated GEC: round ``t`` of the N = 2**s chain."""

    s: int
    t: int
    q: float
    stats: PolarRoundStats
    errors: np.ndarray  # members of X_t sorted by decreasing probability
    error_cost: np.ndarray  # log-probability deficit relative to errors[0]

    @classmethod
    def build(cls, q: float, s: int, t: int) -> "RoundSpec":
        chain = subgroup_chain(s)
        n = chain.n
        stats = polar_round_stats(q, s, t)
        members = chain.member_words(t).astype(np.int64)
        wt = np.array([int(w).bit_count() for w in members])
        logp = wt * math.log(q) + (n - wt) * math.log1p(-q)
        idx = np.lexsort((members, -logp))
        return cls(s=s, t=t, q=q, stats=stats, errors=members[idx], error_cost=logp[idx][0] - logp[idx])

    @property
    def n(self) -> int:
        return 1 << self.s

    @property
    def symbol_bits(self) -> int:
        return self.n - self.t

    def bits(self, words) -> np.ndarray:
        """Concatenated coordinate bits of members of ``X_t``."""
        return coordinates(words, subgroup_chain(self.s), self.t).reshape(-1)

    def erased(self, y) -> np.ndarray:
        return subgroup_chain(self.s).level_of(y) == self.t


@dataclass
class Transcript:
    x: np.ndarray
    y: np.ndarray
    v: np.ndarray
    b: int
    lengths: Lengths
    aborted: bool = False
    i0: np.ndarray | None = None
    i1: np.ndarray | None = None
    hash_f: UniversalHash | None = None
    hash_g: UniversalHash | None = None
    pi2: tuple | None = None
    k0: np.ndarray | None = None
    k1: np.ndarray | None = None
    k_hat: np.ndarray | None = None
    x_hat: np.ndarray | None = None
    decode_visited: int = 0

    @property
    def key_error(self) -> bool | None:
        if self.aborted:
            return None
        kb = self.k1 if self.b else self.k0
        return self.k_hat is None or not np.array_equal(self.k_hat, kb)


def decode_additive(spec: RoundSpec, y_words, c_bits, hash_g: UniversalHash, list_cap: int):
    """List-decode ``x = y ^ e`` for every position, ``e`` ranked by probability.

    When each position has exactly two alternatives the best-first order is the
    order of increasing flip count, and complete flip-count shells are searched
    by meet in the middle (up to 4 flips) instead of one candidate at a time.
    Returns ``(x_hat or None, candidates_visited)``.
    """
    y_words = np.asarray(y_words, dtype=np.int64)
    m, b = len(y_words), spec.symbol_bits
    mat = hash_g.matrix.astype(np.int64)
    kappa = mat.shape[0]
    base = pack_bits(hash_g(spec.bits(y_words ^ spec.errors[0])))
    target = pack_bits(c_bits) ^ base
    e_bits = coordinates(spec.errors, subgroup_chain(spec.s), spec.t).astype(np.int64)

    def column(i, r):
        block = mat[:, i * b:(i + 1) * b]
        return pack_bits((block @ (e_bits[r] ^ e_bits[0])) & 1)

    if len(spec.errors) == 2 and kappa <= 64:
        w = min(shells_within(m, list_cap), 4)
        cols = [column(i, 1) for i in range(m)] if m else []
        flips = min_weight_solution(cols, target, w)
        visited = sum(math.comb(m, k) for k in range(w + 1)) if flips is None else None
        if flips is None:
            return None, visited
        x_hat = y_words ^ spec.errors[0]
        x_hat[list(flips)] = y_words[list(flips)] ^ spec.errors[1]
        return x_hat, sum(math.comb(m, k) for k in range(len(flips))) + 1
    deltas = [spec.error_cost] * m
    cache: dict = {}

    def contrib(i, r):
        v = cache.get((i, r))
        if v is None:
            v = cache[(i, r)] = column(i, r)
        return v

    devs, visited = best_first(deltas, contrib, target, list_cap)
    if devs is None:
        return None, visited
    x_hat = y_words ^ spec.errors[0]
    for i, r in devs.items():
        x_hat[i] = y_words[i] ^ spec.errors[r]
    return x_hat, visited


def sample_blocks(q: float, s: int, n: int, rng: np.random.Generator):
    """Step 1: ``n`` blocks uniform on ``X_1`` sent through BSC(q) bit by bit."""
    chain = subgroup_chain(s)
    members = chain.member_words(1).astype(np.int64)
    x = members[rng.integers(0, len(members), n)]
    flips = rng.random((n, chain.n)) < q
    e = flips @ (1 << np.arange(chain.n)[::-1])
    return x, x ^ e.astype(np.int64)


def run_round(
    spec: RoundSpec,
    x: np.ndarray,
    y: np.ndarray,
    lengths: Lengths,
    rng: np.random.Generator,
    list_cap: int,
    b: int | None = None,
    sampler: Step2Sampler | None = None,
) -> Transcript:
    """Steps 2-6 on blocks ``x`` (in ``X_t``) and outputs ``y`` (in ``X_{t-1}``)."""
    sampler = sampler or Step2Sampler(spec.stats.p_t)
    b = int(rng.integers(0, 2)) if b is None else b
    v = sampler.sample(spec.erased(y), rng)
    tr = Transcript(x=x, y=y, v=v, b=b, lengths=lengths)
    m, kappa, l = lengths.m, lengths.kappa, lengths.l
    good = np.flatnonzero(v == 0)
    bad = np.flatnonzero(v == 1)
    if len(good) < m or len(bad) < m or m < 1 or l < 1:
        tr.aborted = True
        return tr
    idx = {b: good[:m], 1 - b: bad[:m]}
    tr.i0, tr.i1 = idx[0], idx[1]
    in_len = m * spec.symbol_bits
    f = UniversalHash.draw(rng, in_len, l)
    g = UniversalHash.draw(rng, in_len, kappa)
    k = [rng.integers(0, 2, l, dtype=np.uint8) for _ in range(2)]
    xb = [spec.bits(x[idx[j]]) for j in (0, 1)]
    s_keys = [f(xb[j]) for j in (0, 1)]
    c = [g(xb[j]) for j in (0, 1)]
    tr.hash_f, tr.hash_g = f, g
    tr.k0, tr.k1 = k
    tr.pi2 = (k[0] ^ s_keys[0], k[1] ^ s_keys[1], (c[0], c[1]))
    x_hat, tr.decode_visited = decode_additive(spec, y[idx[b]], c[b], g, list_cap)
    tr.x_hat = x_hat
    if x_hat is not None:
        tr.k_hat = tr.pi2[b] ^ f(spec.bits(x_hat))
    return tr


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream for one trial, independent of execution order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial])))


def run_protocol(params: OtParams, rng: np.random.Generator, b: int | None = None,
                 sampler: Step2Sampler | None = None) -> Transcript:
    """One run of the protocol on the emulated BSEC (``N = 2``)."""
    spec = RoundSpec.build(params.q, 1, 1)
    lengths = derive_lengths(spec.stats, params.n, params.margins)
    b = int(rng.integers(0, 2)) if b is None else b
    x, y = sample_blocks(params.q, 1, params.n, rng)
    return run_round(spec, x, y, lengths, rng, params.decode_list_cap, b=b, sampler=sampler)


@dataclass
class RoundRecord:
    t: int
    blocks: int
    p_t: float
    counts: tuple[int, int, int]
    lengths: Lengths | None
    aborted: bool
    key_error: bool | None
    carried: int


@dataclass
class OrchestratedRun:
    rounds: list[RoundRecord] = field(default_factory=list)
    transcripts: list[Transcript] = field(default_factory=list)

    def key_bits(self) -> int:
        return sum(r.lengths.l for r in self.rounds if r.lengths is not None and not r.aborted)


def recursive_run(params: OtParams, rng: np.random.Generator) -> OrchestratedRun:
    """Run rounds ``t = 1..L`` on one batch of ``n`` blocks of ``N`` channel uses.

    Blocks discarded (``V = 2``) in round ``t`` move on to round ``t + 1``: the
    sender reveals the syndrome of column ``t + 1`` and, if it is 1, both sides
    add the lexicographically smallest vector of ``X_t \\ X_{t+1}``.  A round whose
    lengths leave no key still labels blocks so the rest can move on.
    """
    s = params.s
    chain = subgroup_chain(s)
    n_rounds = chain.n - 1
    out = OrchestratedRun()
    b = int(rng.integers(0, 2))
    x, y = sample_blocks(params.q, s, params.n, rng)
    for t in range(1, n_rounds + 1):
        if t > 1:
            col = chain.generator.column(t).bits
            shift = min_coset_rep(chain, t).bits
            odd = np.array([(int(w) & col).bit_count() & 1 for w in x], dtype=bool)
            x = np.where(odd, x ^ shift, x)
            y = np.where(odd, y ^ shift, y)
        spec = RoundSpec.build(params.q, s, t)
        if spec.stats.p_t > 0.5 + 1e-12 or len(x) == 0:
            break
        try:
            lengths = derive_lengths(spec.stats, len(x), params.margins)
        except ValueError:
            lengths = None
        if lengths is None:
            sampler = Step2Sampler(spec.stats.p_t)
            v = sampler.sample(spec.erased(y), rng)
            out.rounds.append(RoundRecord(t, len(x), spec.stats.p_t, _counts(v), None, True, None,
                                          int((v == 2).sum())))
        else:
            tr = run_round(spec, x, y, lengths, rng, params.decode_list_cap, b=b)
            v = tr.v
            out.transcripts.append(tr)
            out.rounds.append(RoundRecord(t, len(x), spec.stats.p_t, _counts(v), lengths, tr.aborted,
                                          tr.key_error, int((v == 2).sum())))
        keep = v == 2
        x, y = x[keep], y[keep]
    return out


def _counts(v: np.ndarray) -> tuple[int, int, int]:
    return tuple(int((v == k).sum()) for k in range(3))
