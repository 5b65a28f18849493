"""Placing the trace-estimation register on a device and compiling it."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..circuit import Circuit
from ..operators import Hamiltonian
from .controlled import protocol_circuit
from .fidelity import CalibrationModel, estimate_fidelity
from .routing import RoutedCircuit, route
from .topology import CouplingGraph, heavy_hex_graph, heavy_hex_snake


def path_layout(n: int, path: Sequence[int]) -> list[int]:
    """Logical->physical map putting Bell pairs side by side and the pointer mid-path.

    Along the path the order is ``g0 c0 g1 c1 ... P ... c_k g_k ...`` so
    every computation qubit starts next to its garbage partner, and the
    computation qubits nearest the pointer flank it.
    """
    if len(path) < 2 * n + 1:
        raise ValueError(f"path of {len(path)} nodes cannot hold {2 * n + 1} qubits")
    k = n // 2
    order: list[tuple[str, int]] = []
    for i in range(k):
        order += [("g", i), ("c", i)]
    order.append(("p", 0))
    for i in range(k, n):
        order += [("c", i), ("g", i)]
    layout = [0] * (2 * n + 1)
    for node, (kind, i) in zip(path, order):
        if kind == "c":
            layout[i] = node
        elif kind == "g":
            layout[n + i] = node
        else:
            layout[2 * n] = node
    return layout


@dataclass(frozen=True)
class CompiledProtocol:
    logical: Circuit
    routed: RoutedCircuit
    fidelity: float | None = None


def compile_protocol(H: Hamiltonian, graph: CouplingGraph, path: Sequence[int], t: float,
                     n_steps: int = 1, variant="c", native_rzz: bool = True, seed=0,
                     trials: int = 1) -> CompiledProtocol:
    """Synthesize the full circuit with rz sites nearest the pointer on ``graph``, then route it."""
    layout = path_layout(H.num_qubits, path)
    dist = graph.distances

    def distance(a: int, b: int) -> float:
        return float(dist[layout[a], layout[b]])

    circ, _ = protocol_circuit(H, t, n_steps, variant, native_rzz, "X", distance)
    return CompiledProtocol(circ, route(circ, graph, layout, seed, trials))


def fidelity_vs_chain_length(sizes: Sequence[int], cal: CalibrationModel | None = None,
                             graph: CouplingGraph | None = None, path: Sequence[int] | None = None,
                             J: float = 1.0, B: float = 1.0, t: float = 6.0, variant="c",
                             seed=0, trials: int = 4, eps1: float = 3e-4, eps2: float = 0.007):
    """Estimated protocol fidelity for Heisenberg chains of each size in ``sizes``."""
    from ..operators import build_heisenberg

    graph = graph or heavy_hex_graph()
    path = path if path is not None else heavy_hex_snake()
    cal = cal or CalibrationModel.uniform(graph, eps1, eps2, pulse_scaling=True)
    rows = []
    for n in sizes:
        H = build_heisenberg(n, J, B)
        comp = compile_protocol(H, graph, path, t, 1, variant, True, seed, trials)
        f = estimate_fidelity(comp.routed, cal)
        rows.append({
            "n": n,
            "fidelity": f,
            "cx": comp.routed.cx_count,
            "rzz": comp.routed.rzz_count,
            "swaps": comp.routed.swap_count,
            "log_fidelity": math.log(f) if f > 0 else -math.inf,
        })
    return rows
