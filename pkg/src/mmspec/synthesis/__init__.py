"""Controlled time-evolution synthesis, routing and fidelity estimation."""
from .controlled import (
    ProtocolLayout,
    SynthesisVariant,
    choose_rz_site,
    controlled_evolution,
    controlled_pauli_rotation,
    controlled_trotter_step,
    defer_pointer_preparation,
    mms_prep_circuit,
    protocol_circuit,
    toffoli_gates,
)
from .fidelity import CalibrationModel, error_budget, estimate_fidelity, gate_error_factors, wrap_angle
from .mapping import compile_protocol, fidelity_vs_chain_length, path_layout
from .routing import RoutedCircuit, route
from .topology import CouplingGraph, heavy_hex_graph, heavy_hex_snake, line_graph, parse_edge_list

__all__ = [
    "CalibrationModel", "CouplingGraph", "ProtocolLayout", "RoutedCircuit", "SynthesisVariant",
    "choose_rz_site", "compile_protocol", "controlled_evolution", "controlled_pauli_rotation",
    "controlled_trotter_step", "defer_pointer_preparation", "error_budget", "estimate_fidelity",
    "fidelity_vs_chain_length", "gate_error_factors", "heavy_hex_graph", "heavy_hex_snake",
    "line_graph", "mms_prep_circuit", "parse_edge_list", "path_layout", "protocol_circuit",
    "route", "toffoli_gates", "wrap_angle",
]
