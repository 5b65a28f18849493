import json
import math
from collections import deque

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from mmspec.circuit import CX, RZZ, SWAP, Circuit, GateKind, H, Rz, count_gates, equal_up_to_phase, \
    permutation_unitary, unitary_of
from mmspec.errors import CalibrationError, ParseError
from mmspec.operators import Hamiltonian, PauliString, build_heisenberg
from mmspec.simulator import StateVector, apply_circuit, partial_trace
from mmspec.synthesis import (
    CalibrationModel,
    CouplingGraph,
    ProtocolLayout,
    SynthesisVariant,
    choose_rz_site,
    compile_protocol,
    controlled_evolution,
    controlled_pauli_rotation,
    controlled_trotter_step,
    error_budget,
    estimate_fidelity,
    fidelity_vs_chain_length,
    heavy_hex_graph,
    heavy_hex_snake,
    line_graph,
    mms_prep_circuit,
    parse_edge_list,
    path_layout,
    protocol_circuit,
    route,
    wrap_angle,
)
from mmspec.synthesis.fidelity import gate_error_factors

from strategies import circuits


def controlled_rotation_matrix(pauli: str, theta: float) -> np.ndarray:
    """Pointer as the top qubit: block-diag(I, exp(-i theta P / 2))."""
    p = PauliString(pauli).to_matrix()
    d = p.shape[0]
    out = np.eye(2 * d, dtype=complex)
    out[d:, d:] = scipy.linalg.expm(-0.5j * theta * p)
    return out


nonidentity = st.text(alphabet="IXYZ", min_size=1, max_size=3).filter(lambda s: set(s) != {"I"})


class TestVariant:
    def test_parse(self):
        assert SynthesisVariant.parse("c") is SynthesisVariant.HALF_ANGLE
        assert SynthesisVariant.parse("TOFFOLI_BASED") is SynthesisVariant.TOFFOLI_BASED
        with pytest.raises(ValueError):
            SynthesisVariant.parse("d")


class TestControlledRotation:
    @given(nonidentity, st.floats(-7, 7, allow_nan=False), st.sampled_from("abc"), st.booleans())
    def test_equivalence(self, pauli, theta, variant, native):
        n = len(pauli)
        c = controlled_pauli_rotation(pauli, theta, variant, pointer=n, native_rzz=native)
        assert equal_up_to_phase(controlled_rotation_matrix(pauli, theta), unitary_of(c), atol=1e-10)

    @pytest.mark.parametrize("variant", "abc")
    def test_zero_angle_is_identity(self, variant):
        c = controlled_pauli_rotation("ZZ", 0.0, variant, pointer=2)
        assert equal_up_to_phase(np.eye(8), unitary_of(c), atol=1e-10)

    def test_zz_variant_c_counts(self):
        c = controlled_pauli_rotation("ZZ", 0.4, "c", pointer=2)
        assert count_gates(c, GateKind.CX) == 4
        assert count_gates(c, GateKind.RZ) == 2

    def test_zz_variant_b_counts(self):
        assert count_gates(controlled_pauli_rotation("ZZ", 0.4, "b", pointer=2), GateKind.CX) == 6

    def test_z_variant_c(self):
        c = controlled_pauli_rotation("Z", 0.4, "c", pointer=1)
        assert count_gates(c, GateKind.CX) == 2
        native = controlled_pauli_rotation("Z", 0.4, "c", pointer=1, native_rzz=True)
        assert [g.kind for g in native.gates] == [GateKind.RZ, GateKind.RZZ]
        assert native.gates[0].angle == pytest.approx(0.2)
        assert native.gates[1].angle == pytest.approx(-0.2)

    def test_rz_site_must_be_in_support(self):
        with pytest.raises(ValueError):
            controlled_pauli_rotation("ZI", 0.3, "c", pointer=2, rz_site=1)

    def test_identity_rejected(self):
        with pytest.raises(ValueError):
            controlled_pauli_rotation("II", 0.3, "c", pointer=2)

    def test_pointer_must_be_distinct(self):
        with pytest.raises(ValueError):
            controlled_pauli_rotation("ZZ", 0.3, "c", pointer=1)

    @given(st.sampled_from("abc"), st.floats(-3, 3, allow_nan=False))
    def test_explicit_rz_site_and_remap(self, variant, theta):
        # letters on qubits 3, 1, 0; pointer 2; rz on qubit 0
        c = controlled_pauli_rotation("XYZ", theta, variant, pointer=2, rz_site=0,
                                      qubits=[3, 1, 0], width=4)
        ref = controlled_pauli_rotation("XYZ", theta, variant, pointer=3, rz_site=2)
        # compare both against the direct matrix after undoing the relabelling
        perm = permutation_unitary([3, 1, 0, 2])  # reference qubit i -> circuit qubit perm[i]
        got = perm.T @ unitary_of(c) @ perm
        assert equal_up_to_phase(controlled_rotation_matrix("XYZ", theta), got, atol=1e-10)
        assert equal_up_to_phase(unitary_of(ref), got, atol=1e-10)

    def test_rz_site_nearest_pointer(self):
        assert choose_rz_site([0, 1, 2], pointer=3) == 2
        assert choose_rz_site([1, 5], pointer=3) == 1  # tie goes to the lower index
        assert choose_rz_site([0, 4], 2, distance=lambda a, b: {0: 5, 4: 1}[a]) == 4


class TestTrotterStep:
    @pytest.mark.parametrize("variant,expected", [("c", 16), ("b", 22)])
    def test_dimer_counts(self, dimer, variant, expected):
        assert count_gates(controlled_trotter_step(dimer, 0.1, variant, pointer=2), GateKind.CX) == expected

    def test_variant_a_band_and_ordering(self, dimer):
        counts = {v: count_gates(controlled_trotter_step(dimer, 0.1, v, 2), GateKind.CX) for v in "abc"}
        assert 40 <= counts["a"] <= 60
        assert counts["a"] > counts["b"] > counts["c"]
        assert counts["a"] == 46

    @pytest.mark.parametrize("variant", "abc")
    def test_matches_product_of_exponentials(self, variant, rng):
        H = Hamiltonian.from_list([(0.7, "XZ"), (-0.4, "YI"), (1.1, "ZZ"), (0.3, "II")])
        dt = 0.37
        u = np.eye(4, dtype=complex)
        for t in H.terms:
            u = scipy.linalg.expm(-1j * t.coefficient * dt * t.string.to_matrix()) @ u
        expected = np.eye(8, dtype=complex)
        expected[4:, 4:] = u
        got = unitary_of(controlled_trotter_step(H, dt, variant, pointer=2))
        # the identity term is a relative phase, so compare exactly (no global-phase freedom lost)
        assert equal_up_to_phase(expected, got, atol=1e-10)

    def test_pointer_first_gate_is_two_qubit(self, dimer):
        c = controlled_evolution(dimer, 0.5, 3, "c", pointer=2, native_rzz=True)
        first = c.qubit_gates(2)[0]
        assert first.kind.arity == 2

    def test_steps_repeat(self, dimer):
        one = controlled_trotter_step(dimer, 0.25, "c", 2)
        four = controlled_evolution(dimer, 1.0, 4, "c", 2)
        assert four.gates == one.gates * 4
        with pytest.raises(ValueError):
            controlled_evolution(dimer, 1.0, 0, "c", 2)


class TestPrep:
    def test_single_pair(self):
        c = mms_prep_circuit(1)
        assert [g.kind for g in c.gates] == [GateKind.H, GateKind.CX]
        assert c.gates[1].qubits == (1, 0)
        psi = apply_circuit(StateVector.zero(2), c)
        np.testing.assert_allclose(psi.amplitudes, np.array([1, 0, 0, 1]) / math.sqrt(2), atol=1e-15)

    def test_two_pairs_reduced_state(self):
        psi = apply_circuit(StateVector.zero(4), mms_prep_circuit(2))
        np.testing.assert_allclose(partial_trace(psi, [0, 1]).entries, np.eye(4) / 4, atol=1e-12)

    def test_empty(self):
        assert len(mms_prep_circuit(0)) == 0

    def test_protocol_layout(self):
        lay = ProtocolLayout(3)
        assert lay.computation == (0, 1, 2) and lay.garbage == (3, 4, 5)
        assert lay.pointer == 6 and lay.width == 7
        assert ProtocolLayout(3, purified=False).pointer == 3

    def test_protocol_circuit_defers_pointer(self, dimer):
        c, lay = protocol_circuit(dimer, 1.0)
        pg = c.qubit_gates(lay.pointer)
        assert pg[0].kind is GateKind.H and pg[1].kind.arity == 2
        idx_h = c.gates.index(pg[0])
        assert c.gates[idx_h + 1] == pg[1]


class TestTopology:
    def test_127_qubit_instance(self):
        g = heavy_hex_graph()
        assert g.num_nodes == 127
        assert len(g.edges) == 144
        assert g.max_degree == 3

    @pytest.mark.parametrize("rows,cells", [(2, 1), (3, 1), (3, 2), (5, 2)])
    def test_degree_and_connectivity(self, rows, cells):
        g = heavy_hex_graph(rows, cells)
        assert g.max_degree == 3
        assert np.all(np.isfinite(g.distances))

    def test_snake_is_simple_path(self):
        g = heavy_hex_graph()
        path = heavy_hex_snake()
        assert len(set(path)) == len(path) >= 29
        assert all(g.has_edge(a, b) for a, b in zip(path, path[1:]))

    def test_rejects_disconnected_and_loops(self):
        with pytest.raises(ValueError):
            CouplingGraph(4, frozenset({(0, 1), (2, 3)}))
        with pytest.raises(ValueError):
            CouplingGraph(2, frozenset({(1, 1)}))

    def test_edge_list(self):
        g = parse_edge_list("# nodes 4\n0 1\n1 2\n2 3\n")
        assert g.num_nodes == 4 and g.distance(0, 3) == 3
        assert parse_edge_list(g.to_text()).edges == g.edges
        with pytest.raises(ParseError) as info:
            parse_edge_list("0 1\n1 x\n")
        assert info.value.line == 2


def optimal_swaps(layout, pairs, graph):
    """Breadth-first search over layouts for the fewest SWAPs making each pair adjacent in turn."""
    def advance(lay, k):
        while k < len(pairs) and graph.has_edge(lay[pairs[k][0]], lay[pairs[k][1]]):
            k += 1
        return k

    start = (tuple(layout), advance(layout, 0))
    seen = {start}
    queue = deque([(start, 0)])
    while queue:
        (lay, k), d = queue.popleft()
        if k == len(pairs):
            return d
        for a, b in graph.edges:
            new = [b if p == a else a if p == b else p for p in lay]
            state = (tuple(new), advance(new, k))
            if state not in seen:
                seen.add(state)
                queue.append((state, d + 1))
    raise AssertionError("unreachable")


class TestRouting:
    def test_conformant_untouched(self):
        c = Circuit(4, (H(0), CX(0, 1), CX(1, 2), RZZ(2, 3, 0.3)))
        r = route(c, line_graph(4))
        assert r.swap_count == 0 and r.circuit.gates == c.gates
        assert r.is_conformant()

    def test_contiguous_register_prep_needs_three_swaps(self):
        # line g1 g0 c0 c1 c2 c3 g2 g3: computation block contiguous, garbage flanking it
        g = line_graph(8)
        layout = [2, 3, 4, 5, 1, 0, 6, 7]
        prep = mms_prep_circuit(4)
        pairs = [(4 + k, k) for k in range(4)]
        r = route(prep, g, layout)
        assert r.swap_count == 3 == optimal_swaps(layout, pairs, g)
        assert r.is_conformant()

    def test_interleaved_prep_needs_none(self):
        g = line_graph(9)
        layout = path_layout(4, list(range(9)))
        c, _ = protocol_circuit(build_heisenberg(4), 1.0)
        prep_len = len(mms_prep_circuit(4))
        r = route(Circuit(9, c.gates[:prep_len]), g, layout)
        assert r.swap_count == 0

    @given(circuits(max_width=6, max_gates=15), st.integers(0, 1000), st.sampled_from(["line", "hex"]))
    def test_soundness(self, c, seed, kind):
        g = line_graph(c.width) if kind == "line" else None
        if g is None:
            g = CouplingGraph(c.width, frozenset({(i, i + 1) for i in range(c.width - 1)} | {(0, c.width - 1)}))
        layout = list(np.random.default_rng(seed).permutation(c.width))
        r = route(c, g, layout, seed=seed)
        assert r.is_conformant()
        p_in = permutation_unitary(r.initial_layout)
        p_out = permutation_unitary(r.final_layout)
        np.testing.assert_allclose(unitary_of(r.circuit) @ p_in, p_out @ unitary_of(c), atol=1e-10)

    def test_seeded_determinism(self):
        c, _ = protocol_circuit(build_heisenberg(3), 1.0)
        g = heavy_hex_graph()
        lay = path_layout(3, heavy_hex_snake())
        a = route(c, g, lay, seed=7, trials=3)
        b = route(c, g, lay, seed=7, trials=3)
        assert a.circuit == b.circuit

    def test_layout_validation(self):
        c = Circuit(2, (CX(0, 1),))
        with pytest.raises(ValueError):
            route(c, line_graph(3), [0, 0])
        with pytest.raises(ValueError):
            route(c, line_graph(3), [0, 5])

    def test_routed_dimer_at_least_16(self, dimer):
        g = heavy_hex_graph()
        comp = compile_protocol(dimer, g, heavy_hex_snake(), 1.0, variant="c", native_rzz=False)
        assert comp.routed.cx_count >= 16
        assert comp.routed.is_conformant()


class TestFidelity:
    def cal(self, graph, eps1=3e-4, eps2=0.007, **kw):
        return CalibrationModel.uniform(graph, eps1, eps2, **kw)

    def test_empty(self):
        assert estimate_fidelity(Circuit(2), self.cal(line_graph(2))) == 1.0

    def test_single_cx(self):
        cal = self.cal(line_graph(2), eps2=0.01)
        assert estimate_fidelity(Circuit(2, (CX(0, 1),)), cal) == pytest.approx(0.99)

    def test_rz_free_and_swap_triple(self):
        cal = self.cal(line_graph(2), eps2=0.01)
        assert estimate_fidelity(Circuit(2, (Rz(0, 1.0),)), cal) == 1.0
        assert estimate_fidelity(Circuit(2, (SWAP(0, 1),)), cal) == pytest.approx(0.99 ** 3)

    def test_missing_calibration(self):
        cal = CalibrationModel({0: 0.001}, {(0, 1): 0.01})
        with pytest.raises(CalibrationError):
            estimate_fidelity(Circuit(3, (CX(1, 2),)), cal)
        with pytest.raises(CalibrationError):
            estimate_fidelity(Circuit(3, (H(2),)), cal)

    def test_pulse_scaling(self):
        cal = self.cal(line_graph(2), eps2=0.01)
        assert gate_error_factors(RZZ(0, 1, math.pi / 2), cal) == [pytest.approx(0.005)]
        # wrapped into (-pi, pi]
        assert gate_error_factors(RZZ(0, 1, 2 * math.pi - 0.1), cal)[0] == pytest.approx(0.01 * 0.1 / math.pi)
        flat = self.cal(line_graph(2), eps2=0.01, pulse_scaling=False)
        assert gate_error_factors(RZZ(0, 1, 0.1), flat) == [0.01, 0.01]

    @given(st.floats(0.0, math.pi), st.floats(0.0, math.pi))
    def test_pulse_error_monotone(self, a, b):
        cal = self.cal(line_graph(2), eps2=0.01)
        lo, hi = sorted((a, b))
        assert gate_error_factors(RZZ(0, 1, lo), cal)[0] <= gate_error_factors(RZZ(0, 1, hi), cal)[0]

    @given(circuits(max_width=4, max_gates=8), st.sampled_from(["h", "cx"]))
    def test_adding_a_gate_decreases(self, c, kind):
        g = CouplingGraph(c.width, frozenset((i, j) for i in range(c.width) for j in range(i + 1, c.width)))
        cal = self.cal(g)
        extra = H(0) if kind == "h" else CX(0, 1)
        assert estimate_fidelity(Circuit(c.width, c.gates + (extra,)), cal) < estimate_fidelity(c, cal)

    def test_wrap_angle(self):
        assert wrap_angle(math.pi) == pytest.approx(math.pi)
        assert wrap_angle(-math.pi) == pytest.approx(math.pi)
        assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)

    def test_dimer_hand_tally(self, dimer):
        g = heavy_hex_graph()
        comp = compile_protocol(dimer, g, heavy_hex_snake(), 6.0, variant="c", native_rzz=True)
        gates = comp.routed.circuit.gates
        n_1q = sum(1 for x in gates if x.kind.arity == 1 and x.kind is not GateKind.RZ)
        n_cx = sum(1 for x in gates if x.kind is GateKind.CX) + 3 * sum(1 for x in gates if x.kind is GateKind.SWAP)
        rzz = [x.angle for x in gates if x.kind is GateKind.RZZ]
        expected = (1 - 3e-4) ** n_1q * (1 - 0.007) ** n_cx
        for a in rzz:
            expected *= 1 - 0.007 * abs(math.remainder(a, 2 * math.pi)) / math.pi
        cal = self.cal(g)
        assert estimate_fidelity(comp.routed, cal) == pytest.approx(expected, rel=1e-12)
        budget = error_budget(comp.routed, cal)
        assert math.exp(-sum(budget.values())) == pytest.approx(expected, rel=1e-12)

    def test_json_round_trip(self, tmp_path):
        cal = CalibrationModel({0: 1e-4, 1: 2e-4}, {(1, 0): 0.008}, {0: 90.0, 1: 110.0})
        path = tmp_path / "cal.json"
        path.write_text(json.dumps(cal.to_dict()))
        back = CalibrationModel.load(path)
        assert back.to_dict() == cal.to_dict()
        assert back.edge_error(0, 1) == 0.008

    @pytest.mark.parametrize("data", [
        {"nodes": [{"id": 0, "eps1": 1.5}]},
        {"nodes": [{"id": 0}]},
        {"edges": [{"a": 0, "b": 1, "eps2": -0.1}]},
        {"nodes": [{"id": 0, "eps1": 0.1, "t1_us": 0}]},
        {"bogus": 1},
    ])
    def test_invalid_calibration(self, data):
        with pytest.raises(ValueError):
            CalibrationModel.from_dict(data)


class TestChainSweep:
    def test_monotone_and_crossing(self):
        rows = fidelity_vs_chain_length(range(2, 15))
        f = [r["fidelity"] for r in rows]
        assert all(a > b for a, b in zip(f, f[1:]))
        crossing = next(r["n"] for r in rows if r["fidelity"] < 0.5)
        assert 6 <= crossing <= 14

    def test_path_layout(self):
        lay = path_layout(4, list(range(10, 19)))
        # g0 c0 g1 c1 P c2 g2 c3 g3
        assert lay == [11, 13, 15, 17, 10, 12, 16, 18, 14]
        with pytest.raises(ValueError):
            path_layout(4, list(range(5)))
