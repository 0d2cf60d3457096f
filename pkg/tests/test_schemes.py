import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctn_mbqc import gates
from ctn_mbqc.schemes import (FAMILIES, CircuitError, Gate, LogicalCircuit, ProtocolError,
                              compile, exact_distribution, execute, family_for_resource,
                              ideal_distribution, lockstep, parse_circuit, random_circuit,
                              realize_gate, trace_jsonl, tv_distance)
from ctn_mbqc.schemes.circuit import euler_angles, euler_product, primitive_ops, rotation
from ctn_mbqc.schemes.codec import DECODE, ENCODE, decode, encode, parity_codec
from ctn_mbqc.schemes.families import encoded_pair_pattern
from ctn_mbqc.tensor import matrices_equal_mod_phase

BELL = {"qubits": 2, "gates": [
    {"g": "prep_z", "q": 0}, {"g": "prep_z", "q": 1}, {"g": "H", "q": 0}, {"g": "H", "q": 1},
    {"g": "CZ", "a": 0, "b": 1}, {"g": "H", "q": 1},
    {"g": "measure_z", "q": 0}, {"g": "measure_z", "q": 1}]}


def single_qubit(*body):
    return LogicalCircuit(1, (Gate("prep_z", (0,)),) + body + (Gate("measure_z", (0,)),))


def unitary_of(ops, n):
    """Matrix of a primitive op list (no prep or measure)."""
    U = np.eye(2**n, dtype=complex)
    for op in ops:
        if op[0] == "H":
            m = [gates.I2] * n
            m[op[1]] = gates.H
            U = gates.kron(*m) @ U
        elif op[0] == "D":
            m = [gates.I2] * n
            m[op[1]] = gates.phase_gate(op[2])
            U = gates.kron(*m) @ U
        elif op[0] == "ZZ":
            U = gates.zz_phase(op[3]) @ U
    return U


class TestCircuitFormat:
    def test_round_trip(self):
        c = parse_circuit(json.dumps(BELL))
        assert parse_circuit(c.to_json()) == c
        assert c.measured == [0, 1]

    @pytest.mark.parametrize("text,where", [
        ('{"qubits": 1, "gates": [', "line 1 column 25"),
        ('{"qubits": 1, "gates": [{"g": "Q", "q": 0}]}', "gates[0]"),
        ('{"qubits": 1, "gates": [{"g": "H", "q": 3}]}', "gates[0]"),
        ('{"qubits": 1, "gates": [{"g": "H", "q": "0"}]}', "gates[0].q"),
        ('{"qubits": 1, "gates": [{"g": "rot", "q": 0, "angle": 1}]}', "gates[0].axis"),
        ('{"qubits": 2, "gates": [{"g": "CZ", "a": 1, "b": 1}]}', "gates[0]"),
        ('{"qubits": 1, "gates": [{"g": "measure_z", "q": 0}, {"g": "H", "q": 0}]}', "gates[1]"),
        ('{"qubits": 1, "gates": [{"g": "H", "q": 0, "x": 1}]}', "gates[0]"),
        ('[1]', "$"),
        ('{"gates": []}', "qubits"),
    ])
    def test_error_positions(self, text, where):
        with pytest.raises(CircuitError) as err:
            parse_circuit(text)
        assert err.value.position == where

    def test_random_circuit_reproducible(self):
        assert random_circuit(3, 4, seed=2) == random_circuit(3, 4, seed=2)
        assert random_circuit(3, 4, seed=2).measured == [0, 1, 2]


class TestDecomposition:
    @settings(max_examples=50, deadline=None)
    @given(st.sampled_from("xyz"), st.floats(-7, 7))
    def test_euler_angles(self, axis, angle):
        u = rotation(axis, angle)
        assert matrices_equal_mod_phase(u, euler_product(*euler_angles(u)), 1e-9)

    def test_euler_random_unitaries(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
            assert matrices_equal_mod_phase(q, euler_product(*euler_angles(q)), 1e-9)

    @pytest.mark.parametrize("name,want", [("CZ", gates.CZ), ("CS", gates.controlled_phase(np.pi / 2))])
    def test_controlled_phase_via_zz(self, name, want):
        ops = primitive_ops(LogicalCircuit(2, (Gate(name, (0, 1)),)))
        assert matrices_equal_mod_phase(unitary_of(ops, 2), want)

    def test_rot_decomposition(self):
        ops = primitive_ops(LogicalCircuit(1, (Gate("rot", (0,), (0.8,), "y"),)))
        assert [o[0] for o in ops] == ["D", "H", "D", "H", "D"]
        assert matrices_equal_mod_phase(unitary_of(ops, 1), rotation("y", 0.8))


class TestIdealDistribution:
    def test_bell(self):
        d = ideal_distribution(parse_circuit(json.dumps(BELL)))
        assert d == pytest.approx({"00": 0.5, "11": 0.5})

    def test_rotation(self):
        d = ideal_distribution(single_qubit(Gate("rot", (0,), (np.pi / 3,), "x")))
        assert d["1"] == pytest.approx(np.sin(np.pi / 6) ** 2)

    def test_prep_on_entangled_qubit(self):
        c = LogicalCircuit(2, (Gate("H", (0,)), Gate("H", (1,)), Gate("CZ", (0, 1)),
                               Gate("prep_z", (0,))))
        with pytest.raises(CircuitError):
            ideal_distribution(c)

    def test_tv(self):
        assert tv_distance({"0": 1.0}, {"1": 1.0}) == 1.0
        assert tv_distance({"0": 0.5, "1": 0.5}, {"0": 0.5, "1": 0.5}) == 0.0


class TestCodec:
    def test_inverse(self):
        assert np.allclose(ENCODE @ DECODE, np.eye(4))

    def test_sign_register(self):
        # sign |+> and |-> with parity 0 decode to |00> and |11>
        assert np.allclose(decode(np.kron(gates.KET_PLUS, gates.KET0)), [1, 0, 0, 0])
        assert np.allclose(decode(np.kron(gates.KET_MINUS, gates.KET0)), [0, 0, 0, 1])
        bell = decode(np.kron(gates.KET0, gates.KET0))
        assert np.allclose(bell, np.array([1, 0, 0, 1]) / np.sqrt(2))

    @pytest.mark.parametrize("phys,enc", [
        (("Z", "Z"), ("I", "Z")), (("I", "X"), ("I", "X")), (("Z", "I"), ("X", "I")),
        (("X", "X"), ("Z", "I")),
    ])
    def test_pauli_map(self, phys, enc):
        P = np.kron(gates.PAULIS[phys[0]], gates.PAULIS[phys[1]])
        Q = np.kron(gates.PAULIS[enc[0]], gates.PAULIS[enc[1]])
        assert matrices_equal_mod_phase(ENCODE @ P @ DECODE, Q)

    def test_local_z_on_second_qubit(self):
        P = np.kron(gates.I2, gates.Z)
        assert matrices_equal_mod_phase(ENCODE @ P @ DECODE, np.kron(gates.X, gates.Z))

    def test_direction(self):
        v = np.arange(4.0)
        assert np.allclose(parity_codec("encode", v), encode(v))
        with pytest.raises(ValueError):
            parity_codec("sideways", v)
        with pytest.raises(ValueError):
            encode(np.ones(3))


class TestFamilies:
    @pytest.mark.parametrize("res,fam", [
        ("cluster1d", "cluster1d"), ("aklt", "aklt"), ("toric_scheme2", "toric2"),
        ("toric_scheme1", "toric1"), ("dihedral:5", "dihedral"), ("weighted_graph", "weighted"),
        ("aklt-orig", None), ("toric_plain", None),
    ])
    def test_resource_map(self, res, fam):
        assert family_for_resource(res) == fam

    def test_unknown_resource(self):
        with pytest.raises(KeyError):
            family_for_resource("kagome")

    def test_scopes(self):
        ends = {k for k, f in FAMILIES.items() if f.scope == "end-to-end"}
        assert ends == {"cluster1d", "aklt", "toric2"}
        assert all(FAMILIES[k].executable for k in ends)

    def test_restart_offsets(self):
        assert FAMILIES["weighted"].restart_offset == 3
        assert FAMILIES["aklt2d"].restart_offset == 5

    def test_realizations(self):
        r = realize_gate("cluster1d", "S", ledger=0, phi=0.5)
        assert r.measurements[0][1].startswith("EQ(")
        assert realize_gate("aklt", "rot").gate == "rot"
        with pytest.raises(ProtocolError):
            realize_gate("aklt", "CZ")

    def test_compile_rejections(self):
        bell = parse_circuit(json.dumps(BELL))
        with pytest.raises(ProtocolError):
            compile(bell, "aklt")
        with pytest.raises(ProtocolError):
            compile(single_qubit(Gate("S", (0,), (0.3,))), "toric1")
        with pytest.raises(ProtocolError):
            compile(single_qubit(Gate("H", (0,))), "weighted")
        with pytest.raises(KeyError):
            compile(bell, "hexagonal")

    def test_empty_circuit_halts(self):
        pat = compile(LogicalCircuit(1, ()), "cluster1d")
        assert pat.halts_immediately
        r = execute(pat, "correlation_space", seed=0, shots=3)
        assert r.distribution == {"": 1.0}
        assert r.mean_sites == 0.0


CIRCUITS_1Q = [
    single_qubit(Gate("H", (0,))),
    single_qubit(Gate("rot", (0,), (1.1,), "x"), Gate("S", (0,), (0.4,)), Gate("H", (0,))),
    single_qubit(Gate("S", (0,), (0.7,)), Gate("rot", (0,), (-2.0,), "y")),
]


class TestExecution:
    @pytest.mark.parametrize("family", ["cluster1d", "aklt"])
    @pytest.mark.parametrize("k", range(len(CIRCUITS_1Q)))
    def test_backends_step_in_lockstep(self, family, k):
        assert lockstep(compile(CIRCUITS_1Q[k], family), seed=k, shots=5) < 1e-10

    def test_toric2_lockstep(self):
        assert lockstep(compile(parse_circuit(json.dumps(BELL)), "toric2"), seed=1, shots=3) < 1e-10

    @pytest.mark.parametrize("k", range(len(CIRCUITS_1Q)))
    def test_cluster_exact_distribution(self, k):
        c = CIRCUITS_1Q[k]
        dist, lost = exact_distribution(compile(c, "cluster1d"))
        assert lost == 0.0
        assert tv_distance(dist, ideal_distribution(c)) < 1e-10

    def test_toric2_bell_exact(self):
        c = parse_circuit(json.dumps(BELL))
        dist, _ = exact_distribution(compile(c, "toric2"))
        assert tv_distance(dist, {"00": 0.5, "11": 0.5}) < 1e-10

    def test_aklt_sampling(self):
        c = CIRCUITS_1Q[1]
        r = execute(compile(c, "aklt"), "correlation_space", seed=3, shots=2000)
        assert tv_distance(r.distribution, ideal_distribution(c)) < 0.05
        assert r.mean_sites > 3

    def test_same_seed_same_samples_across_backends(self):
        pat = compile(CIRCUITS_1Q[2], "aklt")
        a = execute(pat, "correlation_space", seed=8, shots=200)
        b = execute(pat, "oracle", seed=8, shots=200)
        assert a.counts == b.counts
        assert a.sites == b.sites

    def test_report_dict(self):
        r = execute(compile(CIRCUITS_1Q[0], "cluster1d"), "correlation_space", seed=1, shots=10)
        d = r.to_dict()
        assert d["shots"] == 10
        assert sum(d["counts"].values()) == 10

    def test_trace_ends_with_readout(self):
        r = execute(compile(CIRCUITS_1Q[0], "cluster1d"), "correlation_space", seed=1, shots=2,
                    trace_shots=1)
        lines = [json.loads(x) for x in trace_jsonl(r).splitlines()]
        assert {x["shot"] for x in lines} == {0}
        assert lines[-1]["basis"] == "Z"
        assert [x["step"] for x in lines] == list(range(len(lines)))

    def test_unknown_backend(self):
        with pytest.raises((KeyError, ValueError)):
            execute(compile(CIRCUITS_1Q[0], "cluster1d"), "gpu", seed=1, shots=1)


def encoded_reference(angles, sign):
    """Matrix model of the encoded pair program (parity line read out)."""
    W = gates.SQRT_Z @ gates.H
    s = gates.KET_PLUS if sign == 0 else gates.KET_MINUS
    psi = decode(np.kron(s, gates.KET0))
    for t1, t2, t12 in angles:
        psi = np.kron(W @ gates.phase_gate(t1), gates.phase_gate(t2)) @ psi
        psi = np.kron(gates.I2, W) @ gates.zz_phase(t12) @ psi
    psi = np.kron(W, gates.I2) @ psi
    p = np.abs(psi) ** 2
    return {"0": p[0] + p[3], "1": p[1] + p[2]}


class TestEncodedPair:
    ANGLES = [(0.7, -1.2, 0.0), (2.1, 0.4, 0.0)]

    def test_reference_sign_independent(self):
        a, b = (encoded_reference(self.ANGLES, s) for s in (0, 1))
        assert tv_distance(a, b) < 1e-12

    @pytest.mark.parametrize("sign", [0, 1])
    def test_sampled_matches_reference(self, sign):
        r = execute(encoded_pair_pattern(self.ANGLES, sign), "correlation_space", seed=sign,
                    shots=1500)
        assert tv_distance(r.distribution, encoded_reference(self.ANGLES, sign)) < 0.05

    def test_lockstep(self):
        assert lockstep(encoded_pair_pattern(self.ANGLES, 1), seed=0, shots=2) < 1e-10
