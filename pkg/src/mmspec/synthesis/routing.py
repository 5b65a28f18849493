"""Greedy shortest-path SWAP insertion with lookahead and seeded tie-breaking."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..circuit import Circuit, Gate, GateKind, SWAP, count_gates
from .topology import CouplingGraph

LOOKAHEAD = 20
DECAY = 0.7


@dataclass(frozen=True)
class RoutedCircuit:
    """Circuit over physical qubits plus the logical->physical layouts before and after."""

    circuit: Circuit
    initial_layout: tuple[int, ...]
    final_layout: tuple[int, ...]
    swap_count: int
    graph: CouplingGraph

    @property
    def cx_count(self) -> int:
        """CX gates with each SWAP counted as three."""
        return count_gates(self.circuit, GateKind.CX, effective=True)

    @property
    def rzz_count(self) -> int:
        return count_gates(self.circuit, GateKind.RZZ)

    def ecr_count(self, pulse_scaling: bool = True) -> int:
        """Two-qubit pulse tally: CX-equivalents plus one (scaled) or two per RZZ."""
        return self.cx_count + self.rzz_count * (1 if pulse_scaling else 2)

    def is_conformant(self) -> bool:
        return all(g.kind.arity == 1 or self.graph.has_edge(*g.qubits) for g in self.circuit.gates)


def _check_layout(layout: Sequence[int], width: int, graph: CouplingGraph) -> list[int]:
    layout = [int(p) for p in layout]
    if len(layout) != width:
        raise ValueError(f"layout has {len(layout)} entries for {width} logical qubits")
    if len(set(layout)) != len(layout):
        raise ValueError("layout is not injective")
    if any(not 0 <= p < graph.num_nodes for p in layout):
        raise ValueError("layout maps outside the coupling graph")
    return layout


def _route_once(c: Circuit, g: CouplingGraph, layout: list[int], rng: np.random.Generator):
    dist = g.distances
    l2p = list(layout)
    p2l = {p: l for l, p in enumerate(l2p)}
    out: list[Gate] = []
    swaps = 0
    two_q = [(i, gate.qubits) for i, gate in enumerate(c.gates) if gate.kind.arity == 2]
    next2q = 0
    for i, gate in enumerate(c.gates):
        if gate.kind.arity == 1:
            out.append(gate.remap(l2p))
            continue
        while two_q[next2q][0] < i:
            next2q += 1
        a, b = gate.qubits
        while dist[l2p[a], l2p[b]] > 1:
            pa, pb = l2p[a], l2p[b]
            if not np.isfinite(dist[pa, pb]):
                raise ValueError(f"physical qubits {pa} and {pb} are disconnected")
            cands = []
            for x, other in ((pa, pb), (pb, pa)):
                for nb in g.neighbors(x):
                    if dist[nb, other] < dist[x, other]:
                        cands.append((x, nb))
            window = two_q[next2q:next2q + LOOKAHEAD]
            scores = []
            for x, nb in cands:
                lx, lnb = p2l.get(x), p2l.get(nb)
                trial = l2p.copy()
                if lx is not None:
                    trial[lx] = nb
                if lnb is not None:
                    trial[lnb] = x
                s = 0.0
                w = 1.0
                for _, (u, v) in window:
                    s += w * dist[trial[u], trial[v]]
                    w *= DECAY
                scores.append(s)
            best = min(scores)
            ties = [cand for cand, s in zip(cands, scores) if s <= best + 1e-12]
            x, nb = ties[int(rng.integers(len(ties)))] if len(ties) > 1 else ties[0]
            lx, lnb = p2l.get(x), p2l.get(nb)
            if lx is not None:
                l2p[lx] = nb
            if lnb is not None:
                l2p[lnb] = x
            p2l.pop(x, None)
            p2l.pop(nb, None)
            if lx is not None:
                p2l[nb] = lx
            if lnb is not None:
                p2l[x] = lnb
            out.append(SWAP(x, nb))
            swaps += 1
        out.append(gate.remap(l2p))
    return Circuit(g.num_nodes, tuple(out)), tuple(l2p), swaps


def route(c: Circuit, g: CouplingGraph, layout: Sequence[int] | None = None, seed=0,
          trials: int = 1) -> RoutedCircuit:
    """Make every two-qubit gate act on a graph edge by inserting SWAPs.

    Each blocked gate is resolved one SWAP at a time; every SWAP moves one
    operand a step along a shortest path, and among those moves the one
    minimizing a decayed distance sum over the next few two-qubit gates wins.
    Remaining ties are broken by the seeded generator. With ``trials > 1``
    independent seeds are tried and the result with the fewest SWAPs kept.
    """
    if layout is None:
        layout = list(range(c.width))
    layout = _check_layout(layout, c.width, g)
    root = np.random.SeedSequence(seed)
    best = None
    for child in root.spawn(max(1, trials)):
        rc = _route_once(c, g, layout, np.random.default_rng(child))
        if best is None or rc[2] < best[2]:
            best = rc
    circuit, final, swaps = best
    return RoutedCircuit(circuit, tuple(layout), final, swaps, g)
