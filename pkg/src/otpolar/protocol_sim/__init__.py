"""Executable GEC oblivious-transfer protocol with reconciliation, hashing and audits."""

from .audits import (
    ReceiverPrivacy,
    audit_receiver_privacy,
    audit_sender_privacy_small_m,
    exact_sampler_check,
)
from .hashing import UniversalHash, toeplitz_hash
from .protocol import (
    InfeasibleError,
    Lengths,
    OtParams,
    RoundSpec,
    Step2Sampler,
    Transcript,
    derive_lengths,
    recursive_run,
    run_protocol,
    run_round,
    trial_rng,
)
from .reconcile import reconcile_decode
from .report import SimReport, simulate

__all__ = [
    "InfeasibleError",
    "Lengths",
    "OtParams",
    "ReceiverPrivacy",
    "RoundSpec",
    "SimReport",
    "Step2Sampler",
    "Transcript",
    "UniversalHash",
    "audit_receiver_privacy",
    "audit_sender_privacy_small_m",
    "derive_lengths",
    "exact_sampler_check",
    "reconcile_decode",
    "recursive_run",
    "run_protocol",
    "run_round",
    "simulate",
    "toeplitz_hash",
    "trial_rng",
]
