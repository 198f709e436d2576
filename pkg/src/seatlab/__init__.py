"""Simulation and exact verification of the lost boarding pass process."""

from .core import (
    Choice,
    DomainError,
    Instance,
    InvalidInstance,
    NotConsecutive,
    Outcome,
    SeatlabError,
    TooLarge,
    events_of,
    replay,
    validate,
)
from .exact import closed_form, enumerate_outcomes, event_prob, joint_prob, verify_independence
from .forward import BatchResult, run_batch, sample_outcome
from .rng import SplitMix64, mix64

__all__ = [
    "BatchResult",
    "Choice",
    "DomainError",
    "Instance",
    "InvalidInstance",
    "NotConsecutive",
    "Outcome",
    "SeatlabError",
    "SplitMix64",
    "TooLarge",
    "closed_form",
    "enumerate_outcomes",
    "event_prob",
    "events_of",
    "joint_prob",
    "mix64",
    "replay",
    "run_batch",
    "sample_outcome",
    "validate",
    "verify_independence",
]
