"""Cross-checks between closed forms, recursions and exact enumeration."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import bounds
from .channels import extension_params, polar_round_stats
from .gf2core import subgroup_chain

DEFAULT_Q_GRID = (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.49)
DERIVATIVE_TOL = 0.05


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def closed_form_rounds_n4(q: float) -> tuple[float, float, float]:
    a = q * q * (1 - q) ** 2
    p1 = 4 * q * (1 - q) * ((1 - q) ** 2 + q * q)
    p2 = 4 * a / (1 - p1)
    p3 = 2 * a / ((1 - p1) * (1 - p2))
    return p1, p2, p3


def _direct_survival(q: float, s: int, t: int) -> float:
    """``Pr(e in X_t)`` summed term by term over the members of ``X_t``."""
    chain = subgroup_chain(s)
    n = chain.n
    return math.fsum(q ** int(w).bit_count() * (1 - q) ** (n - int(w).bit_count()) for w in chain.member_words(t))


def check_closed_forms(qs) -> float:
    dev = 0.0
    for q in qs:
        for t, closed in enumerate(closed_form_rounds_n4(q), start=1):
            dev = max(dev, abs(polar_round_stats(q, 2, t).p_t - closed))
    return dev


def check_prop1(qs, s_max: int) -> float:
    return max(abs(bounds.prop1_f(q, s).f - bounds.polar_terms(q, s)[0]) for q in qs for s in range(1, s_max + 1))


def check_entropy_recursions(qs, s_max: int) -> float:
    """Pair recursion against enumeration; the pair/difference agreement is checked inside."""
    dev = 0.0
    for q in qs:
        rec = bounds.appendix_entropy_recursion(q, s_max)
        for j, (h0, h1) in enumerate(rec, start=1):
            st = polar_round_stats(q, j, 1)
            dev = max(dev, abs(h0 - st.h_good), abs(h1 - st.h_bad))
    return dev


def check_telescoping(qs, s_max: int) -> float:
    dev = 0.0
    for q in qs:
        for s in range(1, s_max + 1):
            prod = 1.0
            for t in range(1, (1 << s)):
                prod *= 1.0 - polar_round_stats(q, s, t).p_t
                dev = max(dev, abs(prod - _direct_survival(q, s, t)))
    return dev


def check_symmetry(qs, s_max: int) -> float:
    methods = ["extension", "recursive:5"] + [f"polar:{s}" for s in range(1, s_max + 1)]
    if s_max >= 2:
        methods.append("ska")
    dev = 0.0
    for name in methods:
        m = bounds.MethodId.parse(name)
        for q in qs:
            dev = max(dev, abs(m.evaluate(q) - m.evaluate(1.0 - q)))
    return dev


def check_reductions(qs) -> float:
    dev = 0.0
    for q in qs:
        e = bounds.extension_bound(q)
        dev = max(dev, abs(e - bounds.recursive_bsec_bound(q, 1)), abs(e - bounds.polar_bound(q, 1)))
        p1, q1 = extension_params(q)
        dev = max(dev, abs(e - 0.5 * p1 * (1 - bounds.binary_entropy(q1))))
    return dev


def check_derivative(s_max: int) -> float:
    return max(abs(bounds.prop1_derivative_check(s) - s) for s in range(1, s_max + 1))


def run_all(s_max: int = 4, qs=DEFAULT_Q_GRID, tolerance: float = 1e-9) -> list[CheckResult]:
    qs = tuple(qs)
    return [
        CheckResult("closed-form p1,p2,p3 (N=4) vs enumeration", check_closed_forms(qs), tolerance),
        CheckResult(f"closed-form f(q) vs first round, s<={s_max}", check_prop1(qs, s_max), tolerance),
        CheckResult("entropy recursions vs enumeration", check_entropy_recursions(qs, s_max), tolerance),
        CheckResult("prod(1-p_t) vs Pr(e in X_t)", check_telescoping(qs, s_max), tolerance),
        CheckResult("symmetry q <-> 1-q", check_symmetry(qs, s_max), tolerance),
        CheckResult("extension = recursive(T=1) = polar(s=1)", check_reductions(qs), tolerance),
        CheckResult("f'(0+) = s (finite difference)", check_derivative(s_max), DERIVATIVE_TOL),
    ]
