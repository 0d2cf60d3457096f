"""Logical circuits: JSON schema, rotation decomposition and a reference simulator."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .. import gates

# gate name -> (qubit fields, float fields)
GATE_FIELDS = {
    "prep_z": (("q",), ()),
    "H": (("q",), ()),
    "S": (("q",), ("phi",)),
    "rot": (("q",), ("angle",)),
    "CZ": (("a", "b"), ()),
    "CS": (("a", "b"), ()),
    "ZZ": (("a", "b"), ("phi",)),
    "measure_z": (("q",), ()),
}
AXES = ("x", "y", "z")


class CircuitError(ValueError):
    """Malformed circuit; ``position`` locates the problem in the input."""

    def __init__(self, message: str, position: str = ""):
        super().__init__(f"{position}: {message}" if position else message)
        self.position = position


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple
    params: tuple = ()
    axis: str | None = None

    def to_dict(self) -> dict:
        qf, pf = GATE_FIELDS[self.name]
        d = {"g": self.name}
        d.update({k: int(q) for k, q in zip(qf, self.qubits)})
        d.update({k: float(p) for k, p in zip(pf, self.params)})
        if self.axis is not None:
            d["axis"] = self.axis
        return d


@dataclass(frozen=True)
class LogicalCircuit:
    """Gate list on ``num_qubits`` qubits, all starting in ``|0⟩``."""

    num_qubits: int
    gates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        validate(self)

    @property
    def measured(self) -> list[int]:
        """Qubits in the order of their final ``measure_z``."""
        return [g.qubits[0] for g in self.gates if g.name == "measure_z"]

    def to_json(self) -> str:
        return json.dumps({"qubits": self.num_qubits, "gates": [g.to_dict() for g in self.gates]},
                          sort_keys=True)


def validate(circuit: LogicalCircuit) -> None:
    if circuit.num_qubits < 1:
        raise CircuitError("need at least one qubit", "qubits")
    done = set()
    for k, g in enumerate(circuit.gates):
        where = f"gates[{k}]"
        if g.name not in GATE_FIELDS:
            raise CircuitError(f"unknown gate {g.name!r}", where)
        for q in g.qubits:
            if not 0 <= q < circuit.num_qubits:
                raise CircuitError(f"qubit {q} out of range", where)
            if q in done:
                raise CircuitError(f"qubit {q} used after its measurement", where)
        if len(set(g.qubits)) != len(g.qubits):
            raise CircuitError("two-qubit gate needs distinct qubits", where)
        if not all(np.isfinite(p) for p in g.params):
            raise CircuitError("angles must be finite", where)
        if g.name == "rot" and g.axis not in AXES:
            raise CircuitError("rot needs axis x, y or z", where)
        if g.name == "measure_z":
            done.add(g.qubits[0])


def _line_col(text: str, pos: int) -> str:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return f"line {line} column {col}"


def parse_circuit(text: str) -> LogicalCircuit:
    """Read the circuit JSON format.

    ``{"qubits": n, "gates": [{"g": "S", "q": 0, "phi": 1.5708}, ...]}``;
    two-qubit gates use ``"a"`` and ``"b"``, ``rot`` takes ``"axis"`` and
    ``"angle"``.

    Raises
    ------
    CircuitError
        With the line/column of a syntax error or the path of a schema error.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitError(exc.msg, _line_col(text, exc.pos)) from None
    if not isinstance(doc, dict):
        raise CircuitError("top level must be an object", "$")
    if "qubits" not in doc or not isinstance(doc["qubits"], int) or isinstance(doc["qubits"], bool):
        raise CircuitError("'qubits' must be an integer", "qubits")
    raw = doc.get("gates", [])
    if not isinstance(raw, list):
        raise CircuitError("'gates' must be a list", "gates")
    out = []
    for k, item in enumerate(raw):
        where = f"gates[{k}]"
        if not isinstance(item, dict) or "g" not in item:
            raise CircuitError("gate must be an object with a 'g' field", where)
        name = item["g"]
        if name not in GATE_FIELDS:
            raise CircuitError(f"unknown gate {name!r}", where)
        qf, pf = GATE_FIELDS[name]
        extra = set(item) - {"g", *qf, *pf, "axis"}
        if extra:
            raise CircuitError(f"unexpected fields {sorted(extra)}", where)
        qubits, params = [], []
        for f in qf:
            v = item.get(f)
            if not isinstance(v, int) or isinstance(v, bool):
                raise CircuitError(f"field {f!r} must be an integer", f"{where}.{f}")
            qubits.append(v)
        for f in pf:
            v = item.get(f)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise CircuitError(f"field {f!r} must be a number", f"{where}.{f}")
            params.append(float(v))
        axis = item.get("axis")
        if name == "rot" and axis not in AXES:
            raise CircuitError("rot needs axis x, y or z", f"{where}.axis")
        out.append(Gate(name, tuple(qubits), tuple(params), axis if name == "rot" else None))
    return LogicalCircuit(doc["qubits"], tuple(out))


# --------------------------------------------------------------------------
# single-qubit decomposition
# --------------------------------------------------------------------------
def rotation(axis: str, angle: float) -> np.ndarray:
    """exp(-i angle/2 σ_axis)."""
    sigma = {"x": gates.X, "y": gates.Y, "z": gates.Z}[axis]
    return np.cos(angle / 2) * gates.I2 - 1j * np.sin(angle / 2) * sigma


def _wrap(a: float) -> float:
    """Map to (-π, π]."""
    a = float(np.mod(a + np.pi, 2 * np.pi) - np.pi)
    return np.pi if a <= -np.pi + 1e-15 else a


def euler_angles(u: np.ndarray, tol: float = 1e-12) -> tuple[float, float, float]:
    """Angles with ``u ∝ S(α) H S(β) H S(γ)``, each in (-π, π].

    From the Z-X-Z factorization ``u ∝ Rz(α) Rx(β) Rz(γ)`` together with
    ``Rx = H Rz H`` and ``Rz ∝ S``.
    """
    u = np.asarray(u, dtype=complex)
    u = u / np.sqrt(np.linalg.det(u))
    a, b = abs(u[0, 0]), abs(u[0, 1])
    beta = 2 * np.arctan2(b, a)
    plus = np.angle(u[1, 1] / u[0, 0]) if a > tol else 0.0  # α + γ
    minus = np.angle(u[1, 0] / u[0, 1]) if b > tol else 0.0  # α − γ
    alpha, gamma = (plus + minus) / 2, (plus - minus) / 2
    # the half-angle split is ambiguous by π, which amounts to the sign of β
    for b in (beta, -beta):
        cand = (_wrap(alpha), _wrap(b), _wrap(gamma))
        if _matches(u, cand):
            return cand
    raise ValueError("Euler decomposition failed; matrix is not unitary")


def _matches(u, angles, tol=1e-9) -> bool:
    from ..tensor import matrices_equal_mod_phase

    return bool(matrices_equal_mod_phase(u, euler_product(*angles), tol))


def euler_product(alpha: float, beta: float, gamma: float) -> np.ndarray:
    S = gates.phase_gate
    return S(alpha) @ gates.H @ S(beta) @ gates.H @ S(gamma)


def primitive_ops(circuit: LogicalCircuit) -> list[tuple]:
    """Rewrite into ``("H", q)``, ``("D", q, φ)`` diagonal phases, ``("ZZ", a, b, φ)``,
    ``("prep", q)`` and ``("measure", q)``, in time order.

    CZ and CS become a ZZ coupling plus single-qubit phases.
    """
    ops = []
    for g in circuit.gates:
        if g.name == "prep_z":
            ops.append(("prep", g.qubits[0]))
        elif g.name == "H":
            ops.append(("H", g.qubits[0]))
        elif g.name == "S":
            ops.append(("D", g.qubits[0], g.params[0]))
        elif g.name == "rot":
            al, be, ga = euler_angles(rotation(g.axis, g.params[0]))
            q = g.qubits[0]
            ops += [("D", q, ga), ("H", q), ("D", q, be), ("H", q), ("D", q, al)]
        elif g.name == "CZ":
            a, b = g.qubits
            ops += [("ZZ", a, b, np.pi / 2), ("D", a, -np.pi / 2), ("D", b, -np.pi / 2)]
        elif g.name == "CS":
            a, b = g.qubits
            ops += [("ZZ", a, b, -np.pi / 4), ("D", a, np.pi / 4), ("D", b, np.pi / 4)]
        elif g.name == "ZZ":
            ops.append(("ZZ", g.qubits[0], g.qubits[1], g.params[0]))
        elif g.name == "measure_z":
            ops.append(("measure", g.qubits[0]))
    return ops


# --------------------------------------------------------------------------
# reference simulation
# --------------------------------------------------------------------------
def _apply(psi, op, qubits, n):
    k = len(qubits)
    t = np.moveaxis(psi.reshape((2,) * n), qubits, range(k))
    t = (op @ t.reshape(2**k, -1)).reshape(t.shape)
    return np.moveaxis(t, range(k), qubits).reshape(-1)


def gate_matrix(g: Gate) -> np.ndarray:
    if g.name == "H":
        return gates.H
    if g.name == "S":
        return gates.phase_gate(g.params[0])
    if g.name == "rot":
        return rotation(g.axis, g.params[0])
    if g.name == "CZ":
        return gates.CZ
    if g.name == "CS":
        return gates.controlled_phase(np.pi / 2)
    if g.name == "ZZ":
        return gates.zz_phase(g.params[0])
    raise ValueError(f"{g.name} has no unitary")


def ideal_distribution(circuit: LogicalCircuit) -> dict:
    """Exact distribution of the measured bits (string keys, measurement order).

    Measurements must come after every other gate on that qubit; a
    ``prep_z`` resets its qubit, which is exact here because all qubits
    are unentangled at that point only if the caller ensures it, so a
    reset of an entangled qubit raises.
    """
    n = circuit.num_qubits
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    order = []
    for g in circuit.gates:
        if g.name == "measure_z":
            order.append(g.qubits[0])
        elif g.name == "prep_z":
            q = g.qubits[0]
            t = np.moveaxis(psi.reshape((2,) * n), q, 0).reshape(2, -1)
            if np.linalg.matrix_rank(t, tol=1e-10) > 1:
                raise CircuitError("prep_z on an entangled qubit is not supported")
            rest = t[0] if np.linalg.norm(t[0]) > np.linalg.norm(t[1]) else t[1]
            new = np.stack([rest / np.linalg.norm(rest), np.zeros_like(rest)])
            psi = np.moveaxis(new.reshape((2,) * n), 0, q).reshape(-1)
        else:
            psi = _apply(psi, gate_matrix(g), list(g.qubits), n)
    if not order:
        return {}
    p = np.abs(psi.reshape((2,) * n)) ** 2
    others = tuple(q for q in range(n) if q not in order)
    if others:
        p = p.sum(axis=others)
    kept = [q for q in range(n) if q in order]
    p = np.transpose(p, [kept.index(q) for q in order])
    out = {}
    for idx in np.ndindex(*p.shape):
        if p[idx] > 1e-15:
            out["".join(map(str, idx))] = float(p[idx])
    return out


def random_circuit(num_qubits: int, depth: int, seed=None, *, two_qubit: str = "CZ",
                   measure: bool = True) -> LogicalCircuit:
    """Layers of random single-qubit rotations, with neighbour couplings for n > 1."""
    rng = np.random.default_rng(seed)
    out = []
    for layer in range(depth):
        for q in range(num_qubits):
            axis = AXES[int(rng.integers(0, 3))]
            out.append(Gate("rot", (q,), (float(rng.uniform(-np.pi, np.pi)),), axis))
        if num_qubits > 1 and layer < depth - 1:
            for q in range(layer % 2, num_qubits - 1, 2):
                if two_qubit == "ZZ":
                    out.append(Gate("ZZ", (q, q + 1), (float(rng.uniform(-np.pi, np.pi)),)))
                else:
                    out.append(Gate(two_qubit, (q, q + 1)))
    if measure:
        out += [Gate("measure_z", (q,)) for q in range(num_qubits)]
    return LogicalCircuit(num_qubits, tuple(out))


def tv_distance(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
