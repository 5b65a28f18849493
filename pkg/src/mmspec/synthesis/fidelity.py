"""Calibration data and the product-of-error-rates fidelity estimate."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from ..circuit import Circuit, Gate, GateKind
from ..errors import CalibrationError
from .routing import RoutedCircuit
from .topology import CouplingGraph


def wrap_angle(theta: float) -> float:
    """Map ``theta`` into ``(-pi, pi]``."""
    w = math.remainder(theta, 2 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class CalibrationModel:
    eps1: Mapping[int, float]
    eps2: Mapping[tuple[int, int], float]
    t1_us: Mapping[int, float] = field(default_factory=dict)
    pulse_scaling: bool = True
    angle_divisor: float = math.pi

    def __post_init__(self):
        eps2 = {(min(a, b), max(a, b)): float(v) for (a, b), v in self.eps2.items()}
        object.__setattr__(self, "eps2", eps2)
        object.__setattr__(self, "eps1", {int(k): float(v) for k, v in self.eps1.items()})
        object.__setattr__(self, "t1_us", {int(k): float(v) for k, v in self.t1_us.items()})
        for name, table in (("eps1", self.eps1), ("eps2", eps2)):
            for key, v in table.items():
                if not 0 <= v < 1:
                    raise ValueError(f"{name}[{key}] = {v} outside [0, 1)")
        for key, v in self.t1_us.items():
            if not v > 0:
                raise ValueError(f"t1_us[{key}] = {v} must be positive")
        if not self.angle_divisor > 0:
            raise ValueError("angle_divisor must be positive")

    @classmethod
    def uniform(cls, graph: CouplingGraph, eps1: float, eps2: float, t1_us: float = 100.0,
                pulse_scaling: bool = True, angle_divisor: float = math.pi) -> "CalibrationModel":
        return cls({q: eps1 for q in range(graph.num_nodes)}, {e: eps2 for e in graph.edges},
                   {q: t1_us for q in range(graph.num_nodes)}, pulse_scaling, angle_divisor)

    @classmethod
    def from_dict(cls, data: Mapping) -> "CalibrationModel":
        unknown = set(data) - {"nodes", "edges", "pulse_scaling", "angle_divisor"}
        if unknown:
            raise ValueError(f"unknown calibration keys {sorted(unknown)}")
        eps1, t1 = {}, {}
        for i, node in enumerate(data.get("nodes", [])):
            try:
                q = int(node["id"])
                eps1[q] = float(node["eps1"])
                if "t1_us" in node:
                    t1[q] = float(node["t1_us"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"nodes[{i}]: {exc!r}") from None
        eps2 = {}
        for i, edge in enumerate(data.get("edges", [])):
            try:
                eps2[(int(edge["a"]), int(edge["b"]))] = float(edge["eps2"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"edges[{i}]: {exc!r}") from None
        return cls(eps1, eps2, t1, bool(data.get("pulse_scaling", True)),
                   float(data.get("angle_divisor", math.pi)))

    @classmethod
    def load(cls, path) -> "CalibrationModel":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        nodes = []
        for q in sorted(set(self.eps1) | set(self.t1_us)):
            entry = {"id": q, "eps1": self.eps1.get(q, 0.0)}
            if q in self.t1_us:
                entry["t1_us"] = self.t1_us[q]
            nodes.append(entry)
        edges = [{"a": a, "b": b, "eps2": v} for (a, b), v in sorted(self.eps2.items())]
        return {"nodes": nodes, "edges": edges, "pulse_scaling": self.pulse_scaling,
                "angle_divisor": self.angle_divisor}

    def edge_error(self, a: int, b: int) -> float:
        try:
            return self.eps2[(min(a, b), max(a, b))]
        except KeyError:
            raise CalibrationError(f"no two-qubit calibration for edge ({a}, {b})") from None

    def node_error(self, q: int) -> float:
        try:
            return self.eps1[q]
        except KeyError:
            raise CalibrationError(f"no single-qubit calibration for qubit {q}") from None


def gate_error_factors(g: Gate, cal: CalibrationModel) -> list[float]:
    """Error rates contributed by one gate (one entry per physical operation)."""
    k = g.kind
    if k is GateKind.RZ:
        return []
    if k.arity == 1:
        return [cal.node_error(g.qubits[0])]
    e2 = cal.edge_error(*g.qubits)
    if k is GateKind.CX:
        return [e2]
    if k is GateKind.SWAP:
        return [e2] * 3
    if cal.pulse_scaling:
        return [e2 * abs(wrap_angle(g.angle)) / cal.angle_divisor]
    return [e2, e2]


def estimate_fidelity(circuit, cal: CalibrationModel) -> float:
    """Product of ``(1 - eps)`` over every gate; virtual ``Rz`` gates are free."""
    if isinstance(circuit, RoutedCircuit):
        circuit = circuit.circuit
    f = 1.0
    for g in circuit.gates:
        for e in gate_error_factors(g, cal):
            f *= 1.0 - e
    return f


def error_budget(circuit: Circuit | RoutedCircuit, cal: CalibrationModel) -> dict[str, float]:
    """Summed ``-log(1 - eps)`` per gate kind (useful for seeing what dominates)."""
    if isinstance(circuit, RoutedCircuit):
        circuit = circuit.circuit
    out: dict[str, float] = {}
    for g in circuit.gates:
        for e in gate_error_factors(g, cal):
            out[g.kind.value] = out.get(g.kind.value, 0.0) - math.log1p(-e)
    return out
