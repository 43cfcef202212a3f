"""Python access to the spincharge simulator core."""

from ._core import (
    ChargeProfile,
    DomainError,
    DriftAbort,
    K_vector,
    PreconditionError,
    huygens_cutoff,
    instability_scan,
    kappa_cos,
    kappa_sin,
    read_fst,
    run_cli,
    soliton_energy,
)

__all__ = [
    "ChargeProfile",
    "DomainError",
    "DriftAbort",
    "K_vector",
    "PreconditionError",
    "huygens_cutoff",
    "instability_scan",
    "kappa_cos",
    "kappa_sin",
    "read_fst",
    "run_cli",
    "soliton_energy",
]
