import numpy as np
import pytest

from otpolar.channels import polar_round_stats
from otpolar.protocol_sim import OtParams, Step2Sampler, audit_receiver_privacy, run_protocol, trial_rng
from otpolar.protocol_sim.audits import (
    audit_sender_privacy_small_m,
    bernoulli_law,
    chi2_independence,
    erased_symbol_law,
    exact_sampler_check,
    hash_distance_enumerate,
    hash_distance_transform,
)
from otpolar.protocol_sim.hashing import UniversalHash


def test_exact_sampler_passes():
    p = polar_round_stats(0.1, 1, 1).p_t
    ok, dev = exact_sampler_check(Step2Sampler(p), [p, p])
    assert ok and dev <= 1e-12


def test_fault_sampler_fails():
    p = 0.18
    ok, dev = exact_sampler_check(Step2Sampler(p, fault=True), [p, p])
    assert not ok and dev > 0.01


def test_receiver_privacy_chi2_on_runs():
    params = OtParams(n=300, q=0.05, delta=0.05)
    trs = [run_protocol(params, trial_rng(4, i)) for i in range(60)]
    p = polar_round_stats(0.05, 1, 1).p_t
    res = audit_receiver_privacy(Step2Sampler(p), [p, p], trs)
    assert res.exact_pass
    assert 0.0 <= res.p_value <= 1.0


def test_chi2_detects_dependence():
    bs = np.array([0, 1] * 200)
    _, pval = chi2_independence(bs, bs.copy())
    assert pval < 1e-6


@pytest.mark.parametrize("symbol_bits", [1, 2])
def test_distance_methods_agree(rng, symbol_bits):
    law = rng.random(1 << symbol_bits)
    law /= law.sum()
    m = 4
    for _ in range(5):
        f = UniversalHash.draw(rng, m * symbol_bits, 3)
        g = UniversalHash.draw(rng, m * symbol_bits, 2)
        a = hash_distance_enumerate(f, g, law, symbol_bits)
        b = hash_distance_transform(f, g, law, symbol_bits)
        assert a == pytest.approx(b, abs=1e-12)


def test_uniform_source_is_perfect(rng):
    # each hash is full rank, so a uniform input gives a uniform key
    assert audit_sender_privacy_small_m(8, 0, 6, rng, n_seeds=10) == pytest.approx(0.0, abs=1e-12)


def test_distance_grows_with_bias(rng):
    d1 = audit_sender_privacy_small_m(8, 0, 4, rng, symbol_law=bernoulli_law(0.45), n_seeds=20)
    d2 = audit_sender_privacy_small_m(8, 0, 4, rng, symbol_law=bernoulli_law(0.1), n_seeds=20)
    assert d1 < d2


def test_erased_symbol_law_entropy_matches_stats():
    for s, t in ((1, 1), (2, 1), (2, 2), (3, 1)):
        law = erased_symbol_law(0.1, s, t)
        nz = law[law > 0]
        h = float(-(nz * np.log2(nz)).sum())
        assert h == pytest.approx(polar_round_stats(0.1, s, t).h_bad, abs=1e-12)


def test_audit_refuses_large_m(rng):
    with pytest.raises(ValueError):
        audit_sender_privacy_small_m(13, 0, 4, rng)
