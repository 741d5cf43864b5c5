"""Aggregation of simulated runs into reports."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from ..channels import bsec_from_extension
from .audits import EXACT_AUDIT_MAX_M, audit_receiver_privacy, audit_sender_privacy_small_m
from .protocol import (
    OtParams,
    RoundSpec,
    Step2Sampler,
    derive_lengths,
    recursive_run,
    run_protocol,
    trial_rng,
)

NOT_COMPUTED = "not computed"


def wilson_interval(k: int, n: int) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    ci = binomtest(k, n).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class SimReport:
    params: OtParams
    trials: int
    aborts: int
    key_errors: int
    key_error_ci: tuple[float, float]
    receiver_privacy_exact: bool
    receiver_privacy_chi2_p: float
    sender_privacy_dvar: float | str
    realized_rate: float
    lengths: dict
    rounds: list[dict] = field(default_factory=list)

    @property
    def abort_rate(self) -> float:
        return self.aborts / self.trials

    @property
    def key_error_rate(self) -> float:
        done = self.trials - self.aborts
        return self.key_errors / done if done else 0.0

    def to_dict(self) -> dict:
        out = {
            "abort_rate": self.abort_rate,
            "key_error_rate": self.key_error_rate,
            "key_error_ci": list(self.key_error_ci),
            "receiver_privacy_exact": self.receiver_privacy_exact,
            "receiver_privacy_chi2_p": self.receiver_privacy_chi2_p,
            "sender_privacy_dvar": self.sender_privacy_dvar,
            "realized_rate_bits_per_use": self.realized_rate,
            "trials": self.trials,
            "lengths": self.lengths,
            "params": self.params.as_dict(),
        }
        if self.rounds:
            out["rounds"] = self.rounds
        return out


def simulate(params: OtParams, log=None) -> SimReport:
    """Run ``params.trials`` independent trials and audit them.

    ``bsec`` runs the single-round protocol; ``polar`` runs the full round chain
    on each batch and reports per round.  Raises ``InfeasibleError`` when the
    first round leaves no key.
    """
    first = RoundSpec.build(params.q, params.s, 1)
    lengths = derive_lengths(first.stats, params.n, params.margins)
    if params.scheme == "bsec":
        return _simulate_bsec(params, lengths, log)
    return _simulate_polar(params, log)


def _simulate_bsec(params: OtParams, lengths, log) -> SimReport:
    transcripts = []
    for trial in range(params.trials):
        transcripts.append(run_protocol(params, trial_rng(params.seed, trial)))
        if log and (trial + 1) % max(params.trials // 10, 1) == 0:
            log(f"trial {trial + 1}/{params.trials}")
    aborts = sum(tr.aborted for tr in transcripts)
    errors = sum(bool(tr.key_error) for tr in transcripts if not tr.aborted)
    ch = bsec_from_extension(params.q)
    sampler = Step2Sampler(ch.p)
    erase = ch.base.matrix[:, list(ch.y1)].sum(axis=1)[ch.input_dist > 0]
    rp = audit_receiver_privacy(sampler, erase, transcripts)
    if lengths.m <= EXACT_AUDIT_MAX_M:
        dvar = audit_sender_privacy_small_m(lengths.m, lengths.kappa, lengths.l, trial_rng(params.seed, -1 % 2**32))
    else:
        dvar = NOT_COMPUTED
    done = params.trials - aborts
    rate = lengths.l * done / (params.trials * params.n * 2)
    return SimReport(
        params=params,
        trials=params.trials,
        aborts=aborts,
        key_errors=errors,
        key_error_ci=wilson_interval(errors, done),
        receiver_privacy_exact=rp.exact_pass,
        receiver_privacy_chi2_p=rp.p_value,
        sender_privacy_dvar=dvar,
        realized_rate=rate,
        lengths={"m": lengths.m, "kappa": lengths.kappa, "l": lengths.l},
    )


def _simulate_polar(params: OtParams, log) -> SimReport:
    n_uses = params.n * params.block_len
    per_round: dict[int, dict] = {}
    first_round = []
    total_bits = 0
    for trial in range(params.trials):
        run = recursive_run(params, trial_rng(params.seed, trial))
        total_bits += run.key_bits()
        if run.transcripts and run.rounds[0].lengths is not None:
            first_round.append(run.transcripts[0])
        for rec in run.rounds:
            agg = per_round.setdefault(rec.t, {
                "t": rec.t, "p_t": rec.p_t, "runs": 0, "blocks": 0, "v0": 0, "v1": 0, "v2": 0,
                "carried": 0, "keyed_runs": 0, "aborts": 0, "key_errors": 0, "key_bits": 0,
            })
            agg["runs"] += 1
            agg["blocks"] += rec.blocks
            for k, c in zip(("v0", "v1", "v2"), rec.counts):
                agg[k] += c
            agg["carried"] += rec.carried
            if rec.lengths is None:
                continue
            agg["keyed_runs"] += 1
            agg["aborts"] += int(rec.aborted)
            agg["key_errors"] += int(bool(rec.key_error))
            if not rec.aborted:
                agg["key_bits"] += rec.lengths.l
        if log and (trial + 1) % max(params.trials // 10, 1) == 0:
            log(f"trial {trial + 1}/{params.trials}")
    rounds = []
    for t in sorted(per_round):
        agg = per_round[t]
        done = agg["keyed_runs"] - agg["aborts"]
        agg["abort_rate"] = agg["aborts"] / agg["keyed_runs"] if agg["keyed_runs"] else None
        agg["key_error_rate"] = agg["key_errors"] / done if done else None
        agg["realized_rate_bits_per_use"] = agg["key_bits"] / (params.trials * n_uses)
        rounds.append(agg)
    head = rounds[0] if rounds else {"aborts": 0, "key_errors": 0, "keyed_runs": 0}
    spec = RoundSpec.build(params.q, params.s, 1)
    lengths = derive_lengths(spec.stats, params.n, params.margins)
    rp = audit_receiver_privacy(Step2Sampler(spec.stats.p_t), [spec.stats.p_t], first_round)
    done = head["keyed_runs"] - head["aborts"]
    return SimReport(
        params=params,
        trials=params.trials,
        aborts=head["aborts"],
        key_errors=head["key_errors"],
        key_error_ci=wilson_interval(head["key_errors"], done),
        receiver_privacy_exact=rp.exact_pass,
        receiver_privacy_chi2_p=rp.p_value,
        sender_privacy_dvar=NOT_COMPUTED,
        realized_rate=total_bits / (params.trials * n_uses),
        lengths={"m": lengths.m, "kappa": lengths.kappa, "l": lengths.l},
        rounds=rounds,
    )
