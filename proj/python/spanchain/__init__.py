"""Slot-synchronous wireless blockchain simulator (SINR physics, spanner
backbone, crash-fault-tolerant epochs)."""

from ._core import (
    DeploymentSpec,
    ExperimentConfig,
    NodePlacement,
    SinrParams,
    Spanner,
    broadcast_power,
    build_spanner,
    collect,
    density_check,
    emit_rows,
    resolve_slot,
    run_experiment,
    sweep,
    transmit_power,
)

__all__ = [
    "DeploymentSpec",
    "ExperimentConfig",
    "NodePlacement",
    "SinrParams",
    "Spanner",
    "broadcast_power",
    "build_spanner",
    "collect",
    "density_check",
    "emit_rows",
    "resolve_slot",
    "run_experiment",
    "sweep",
    "transmit_power",
]
