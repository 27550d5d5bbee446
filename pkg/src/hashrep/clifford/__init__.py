"""Stabilizer engine and measurement-based resource states."""

from .circuits import (
    HashingCircuit,
    apply_ops,
    bell_measure,
    byproduct,
    jamiolkowski_resource,
    jamiolkowski_tableau,
    propagate_pauli,
    read_in,
    station_resource,
)
from .graph import GraphResource, graph_state, to_graph_state
from .local import LOCAL_CLIFFORDS
from .tableau import StabilizerTableau, format_pauli, parse_pauli, random_stabilizer_state


def measure_pauli(tableau, qubit, basis="Z", forced_outcome=None):
    """Functional measurement: ``(new_tableau, outcome, deterministic)``."""
    t = tableau.copy()
    outcome, det = t.measure_pauli(qubit, basis, forced_outcome)
    return t, outcome, det


__all__ = [
    "GraphResource",
    "HashingCircuit",
    "LOCAL_CLIFFORDS",
    "StabilizerTableau",
    "apply_ops",
    "bell_measure",
    "byproduct",
    "format_pauli",
    "graph_state",
    "jamiolkowski_resource",
    "jamiolkowski_tableau",
    "measure_pauli",
    "parse_pauli",
    "propagate_pauli",
    "random_stabilizer_state",
    "read_in",
    "station_resource",
    "to_graph_state",
]
