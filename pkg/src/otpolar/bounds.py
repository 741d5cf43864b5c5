"""OT-capacity lower bounds for BSC(q) and the h(q) upper bound.

Every bound is a scalar function of the crossover probability ``q``; ``sweep``
evaluates one over a grid.  Rates are OT bits per BSC use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .channels import (
    GecChannel,
    conditional_entropy,
    extension_params,
    polar_round_stats,
)
from .gf2core import MAX_S, check_s, kronecker_generator

HALF_TOL = 1e-12


def binary_entropy(q: float) -> float:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    if q == 0.0 or q == 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def _degenerate(q: float) -> bool:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    return q == 0.0 or q == 1.0


def gec_rate(ch: GecChannel) -> float:
    """Rate ``p (H(X|Y1) - H(X|Y0))`` of the standard GEC protocol, per GEC use."""
    gap = conditional_entropy(ch.w1, ch.input_dist) - conditional_entropy(ch.w0, ch.input_dist)
    return max(ch.p * gap, 0.0)


def extension_bound(q: float) -> float:
    if _degenerate(q):
        return 0.0
    p1, q1 = extension_params(q)
    return max(0.5 * p1 * (1.0 - binary_entropy(q1)), 0.0)


def recursive_sequence(q: float, rounds: int) -> list[tuple[float, float]]:
    """``[(p_t, q_t)]`` for ``t = 1..rounds`` of the recursive 00/11 emulation."""
    out = []
    qt = q
    for _ in range(rounds):
        p, qt = extension_params(qt)
        out.append((p, qt))
    return out


def recursive_bsec_terms(q: float, rounds: int) -> list[float]:
    if rounds < 0:
        raise ValueError(f"number of rounds must be non-negative, got {rounds}")
    if _degenerate(q):
        return [0.0] * rounds
    terms = []
    weight = 1.0
    for p, qt in recursive_sequence(q, rounds):
        terms.append(weight * max(0.5 * p * (1.0 - binary_entropy(qt)), 0.0))
        weight *= (1.0 - 2.0 * p) / 2.0
    return terms


def recursive_bsec_bound(q: float, rounds: int) -> float:
    if rounds < 1:
        raise ValueError(f"T must be >= 1, got {rounds}")
    return math.fsum(recursive_bsec_terms(q, rounds))


def polar_terms(q: float, s: int) -> list[float]:
    """Per-round contributions to the polarization bound (rounds stop once ``p_t > 1/2``)."""
    check_s(s)
    if s < 1:
        raise ValueError("polarization needs s >= 1")
    n = 1 << s
    if _degenerate(q):
        return [0.0] * (n - 1)
    terms = []
    weight = 1.0
    for t in range(1, n):
        st = polar_round_stats(q, s, t)
        if st.p_t > 0.5 + HALF_TOL:
            break
        terms.append(weight * st.p_t / n * max(st.gap, 0.0))
        weight *= max(1.0 - 2.0 * st.p_t, 0.0)
    return terms


def polar_bound(q: float, s: int) -> float:
    return math.fsum(polar_terms(q, s))


# -- closed form for the first polarization round ---------------------------


@dataclass(frozen=True)
class Prop1Scalars:
    q: float
    p_bar: tuple[float, ...]  # index j = 0..s
    q_bar: tuple[float, ...]  # index j = 1..s stored at position j-1
    f: float


def _p_bar(q: float, j: int) -> float:
    if j == 0:
        return q
    # (1 - (1-2q)^(2^j)) / 2 without cancellation near q = 0
    if q == 0.5:
        return 0.5
    return -math.expm1((1 << j) * math.log(abs(1.0 - 2.0 * q))) / 2.0


def prop1_f(q: float, s: int) -> Prop1Scalars:
    """First-round rate of the polarization bound in closed form."""
    check_s(s)
    if s < 1:
        raise ValueError("s must be >= 1")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must be in (0, 1), got {q}")
    n = 1 << s
    p_bar = [_p_bar(q, j) for j in range(s + 1)]
    q_bar = [p_bar[j - 1] ** 2 / (1.0 - p_bar[j]) for j in range(1, s + 1)]

    def qb(j):
        return q_bar[j - 1]

    total = []
    for i in range(s):
        prod = 1.0
        for j in range(1, i + 1):
            prod *= 1.0 - 2.0 * qb(s - j + 1)
        total.append(prod * (1.0 - binary_entropy(qb(s - i))))
    f = p_bar[s] / n * math.fsum(total)
    return Prop1Scalars(q=q, p_bar=tuple(p_bar), q_bar=tuple(q_bar), f=f)


def prop1_derivative_check(s: int, q0: float = 1e-6, step: float = 1e-7) -> float:
    """Central finite difference of ``f`` near ``q = 0``; tends to ``s``."""
    return (prop1_f(q0 + step, s).f - prop1_f(q0 - step, s).f) / (2.0 * step)


def appendix_entropy_recursion(q: float, s: int) -> list[tuple[float, float]]:
    """``(H(E_j | even parity), H(E_j | odd parity))`` for blocks of length ``2**j``.

    Runs the pair recursion and, alongside, the recursion for the difference;
    raises ``ArithmeticError`` if the two disagree beyond 1e-9.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must be in (0, 1), got {q}")
    scal = prop1_f(q, s) if s >= 1 else None
    h0, h1 = 0.0, 0.0
    diff = 0.0
    out = []
    for j in range(1, s + 1):
        qj = scal.q_bar[j - 1]
        h0, h1 = (
            binary_entropy(qj) + (1.0 - qj) * 2.0 * h0 + qj * 2.0 * h1,
            1.0 + h0 + h1,
        )
        diff = 1.0 - binary_entropy(qj) + (1.0 - 2.0 * qj) * diff
        if abs((h1 - h0) - diff) > 1e-9:
            raise ArithmeticError(f"entropy recursions disagree at j={j}: {h1 - h0} vs {diff}")
        out.append((h0, h1))
    return out


# -- interactive key agreement (N = 4) --------------------------------------

SKA_VARIANTS = ("erasure-side", "literal")


def _cond_entropy(joint: dict, target, given) -> float:
    """``H(target | given)`` from a dict mapping atoms to probabilities."""
    pj: dict = {}
    pg: dict = {}
    for atom, pr in joint.items():
        if pr <= 0.0:
            continue
        g = given(atom)
        key = (target(atom), g)
        pj[key] = pj.get(key, 0.0) + pr
        pg[g] = pg.get(g, 0.0) + pr
    h = -math.fsum(p * math.log2(p) for p in pj.values())
    h += math.fsum(p * math.log2(p) for p in pg.values())
    return max(h, 0.0)


@dataclass(frozen=True)
class SkaTerms:
    """Entropies entering the improved first-round term (bits per block)."""

    p1: float
    pr_u2: float
    h_key_given_view: float
    h_u1: float
    h_u3: float
    residual_u2_zero: float

    @property
    def gap(self) -> float:
        return self.h_key_given_view - self.h_u1 - self.h_u3

    @property
    def term(self) -> float:
        return max(self.p1 / 4.0 * self.gap, 0.0)


def ska_terms_n4(q: float, variant: str = "erasure-side") -> SkaTerms:
    """Enumerate the joint law of ``(X_1, E, U2')`` for the N = 4 interactive scheme.

    ``X_1`` is uniform on the even-weight vectors, ``E`` is the BSC error block.
    The honest side conditions on an even-weight error; the adversary side on an
    odd-weight error (``variant="erasure-side"``) or, as the formula is printed,
    on an even-weight error (``variant="literal"``).
    """
    if variant not in SKA_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {SKA_VARIANTS}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must be in (0, 1), got {q}")
    g = kronecker_generator(2)
    g2, g3, g4 = (g.column(j).bits for j in (2, 3, 4))
    par = lambda v, c: (v & c).bit_count() & 1  # noqa: E731
    xs = [x for x in range(16) if x.bit_count() % 2 == 0]
    pe = {e: q ** e.bit_count() * (1 - q) ** (4 - e.bit_count()) for e in range(16)}

    def joint_for(parity: int) -> dict:
        es = [e for e in range(16) if e.bit_count() % 2 == parity]
        z = math.fsum(pe[e] for e in es)
        return {(x, e): pe[e] / z / len(xs) for x in xs for e in es}

    def u1(x):
        return (par(x, g2), par(x, g3))

    def u2(e):
        # the received syndromes match U1 iff the error's syndromes vanish
        return int(par(e, g2) == 0 and par(e, g3) == 0)

    honest = joint_for(0)
    pr_u2 = math.fsum(p for (x, e), p in honest.items() if u2(e))
    h_u1 = _cond_entropy(honest, lambda a: u1(a[0]), lambda a: a[0] ^ a[1])
    h_u3 = _cond_entropy(
        honest,
        lambda a: par(a[0], g4) if u2(a[1]) else None,
        lambda a: (a[0] ^ a[1], u2(a[1])),
    )
    residual = _cond_entropy(
        {a: p for a, p in honest.items() if not u2(a[1])},
        lambda a: a[0],
        lambda a: (a[0] ^ a[1], u1(a[0])),
    ) / max(1.0 - pr_u2, 1e-300)

    view = joint_for(1 if variant == "erasure-side" else 0)
    adv = {}
    for (x, e), p in view.items():
        for u2p, pu in ((1, pr_u2), (0, 1.0 - pr_u2)):
            adv[(x, e, u2p)] = p * pu
    h_key = _cond_entropy(
        adv,
        lambda a: (u1(a[0]), par(a[0], g4) if a[2] else None),
        lambda a: (a[0] ^ a[1], a[2]),
    )
    p1 = polar_round_stats(q, 2, 1).p_t
    return SkaTerms(p1=p1, pr_u2=pr_u2, h_key_given_view=h_key, h_u1=h_u1, h_u3=h_u3, residual_u2_zero=residual)


def interactive_ska_bound_n4(q: float, variant: str = "erasure-side") -> float:
    """N = 4 polarization bound with the interactive first-round key agreement."""
    if _degenerate(q):
        return 0.0
    rest = polar_terms(q, 2)[1:]
    return ska_terms_n4(q, variant).term + math.fsum(rest)


def hybrid_bound(q: float, rounds: int, s: int) -> float:
    """``rounds`` recursive 00/11 rounds, then polarization on the leftover BSC(q_T) uses."""
    if rounds < 0:
        raise ValueError(f"T must be >= 0, got {rounds}")
    if _degenerate(q):
        return 0.0
    prefix = recursive_bsec_terms(q, rounds)
    weight = 1.0
    qt = q
    for p, qt in recursive_sequence(q, rounds):
        weight *= (1.0 - 2.0 * p) / 2.0
    tail = polar_bound(qt, s) if 0.0 < qt < 1.0 else 0.0
    return math.fsum(prefix) + weight * tail


def upper_bound(q: float) -> float:
    return binary_entropy(q)


# -- method identifiers and sweeps -----------------------------------------


@dataclass(frozen=True)
class MethodId:
    """A bound and its parameters, e.g. ``polar:4`` or ``hybrid:3:4``."""

    kind: str
    params: tuple = ()

    KINDS = ("extension", "recursive", "polar", "ska", "hybrid", "upper")

    @classmethod
    def parse(cls, text: str) -> "MethodId":
        parts = text.strip().split(":")
        kind, args = parts[0].lower(), parts[1:]
        try:
            if kind in ("extension", "upper") and not args:
                return cls(kind)
            if kind == "recursive" and len(args) <= 1:
                t = int(args[0]) if args else 5
                if t < 1:
                    raise ValueError
                return cls(kind, (t,))
            if kind == "polar" and len(args) == 1:
                s = check_s(int(args[0]))
                if s < 1:
                    raise ValueError
                return cls(kind, (s,))
            if kind == "ska" and len(args) <= 1:
                variant = args[0] if args else "erasure-side"
                if variant not in SKA_VARIANTS:
                    raise ValueError
                return cls(kind, (variant,))
            if kind == "hybrid" and len(args) == 2:
                t, s = int(args[0]), check_s(int(args[1]))
                if t < 0 or s < 1:
                    raise ValueError
                return cls(kind, (t, s))
        except ValueError as exc:
            raise ValueError(f"bad parameters in method {text!r}") from exc
        raise ValueError(f"unknown method {text!r}; expected one of {', '.join(cls.KINDS)}")

    @property
    def label(self) -> str:
        return ":".join([self.kind, *map(str, self.params)])

    @property
    def param_text(self) -> str:
        names = {
            "recursive": ("T",),
            "polar": ("s",),
            "ska": ("variant",),
            "hybrid": ("T", "s"),
        }.get(self.kind, ())
        return ";".join(f"{k}={v}" for k, v in zip(names, self.params))

    @property
    def is_lower_bound(self) -> bool:
        return self.kind != "upper"

    def evaluate(self, q: float) -> float:
        k, a = self.kind, self.params
        if k == "extension":
            return extension_bound(q)
        if k == "recursive":
            return recursive_bsec_bound(q, *a)
        if k == "polar":
            return polar_bound(q, *a)
        if k == "ska":
            return interactive_ska_bound_n4(q, *a)
        if k == "hybrid":
            return hybrid_bound(q, *a)
        if k == "upper":
            return upper_bound(q)
        raise ValueError(f"unknown method {k!r}")


@dataclass(frozen=True)
class Grid:
    start: float
    end: float
    step: float

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("grid step must be positive")
        if not 0.0 <= self.start < self.end <= 1.0:
            raise ValueError("need 0 <= start < end <= 1")

    def points(self) -> np.ndarray:
        count = int(math.floor((self.end - self.start) / self.step + 1e-9)) + 1
        return np.round(self.start + self.step * np.arange(count), 12)


@dataclass(frozen=True)
class BoundCurve:
    method: MethodId
    grid: Grid
    q: np.ndarray = field(repr=False)
    rate: np.ndarray = field(repr=False)


def sweep(method, grid: Grid) -> BoundCurve:
    if isinstance(method, str):
        method = MethodId.parse(method)
    if not isinstance(method, MethodId):
        raise ValueError(f"unknown method {method!r}")
    qs = grid.points()
    rates = np.array([method.evaluate(float(q)) for q in qs])
    return BoundCurve(method=method, grid=grid, q=qs, rate=rates)


def crossovers(a: BoundCurve, b: BoundCurve) -> list[float]:
    """Grid locations where ``a - b`` changes sign (linear interpolation)."""
    d = a.rate - b.rate
    out = []
    for i in range(len(d) - 1):
        if d[i] == 0.0 or d[i] * d[i + 1] >= 0:
            continue
        frac = d[i] / (d[i] - d[i + 1])
        out.append(float(a.q[i] + frac * (a.q[i + 1] - a.q[i])))
    return out


__all__ = [
    "MAX_S",
    "BoundCurve",
    "Grid",
    "MethodId",
    "Prop1Scalars",
    "SkaTerms",
    "appendix_entropy_recursion",
    "binary_entropy",
    "crossovers",
    "extension_bound",
    "gec_rate",
    "hybrid_bound",
    "interactive_ska_bound_n4",
    "polar_bound",
    "polar_terms",
    "prop1_derivative_check",
    "prop1_f",
    "recursive_bsec_bound",
    "recursive_bsec_terms",
    "ska_terms_n4",
    "sweep",
    "upper_bound",
]
