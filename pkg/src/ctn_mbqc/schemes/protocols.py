"""Adaptive measurement protocols.

A protocol is a generator: it yields :class:`Request` objects and is sent the
outcome of each. Its by-product ledger is a dict from logical wire to an
element index of the family's declared group; ``ledger_matrices`` exposes
the corresponding matrices. Everything a protocol decides depends only on
previous outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import gates
from ..groups import build_group
from ..mps import build_1d_resource
from ..peps import build_2d_resource
from .circuit import LogicalCircuit, primitive_ops
from .codec import decode

ANGLE_TOL = 1e-12


class ProtocolError(RuntimeError):
    """A retry loop exceeded its step budget, or the circuit is unsupported."""


@dataclass(frozen=True)
class Request:
    """One measurement: ``site``, basis label and the reason it is made."""

    site: object
    basis: str
    role: str


def _eq(theta: float) -> str:
    theta = float(np.mod(theta + np.pi, 2 * np.pi) - np.pi)
    return "X" if abs(theta) < ANGLE_TOL else f"EQ({theta:.15g})"


def _yz(theta: float) -> str:
    theta = float(np.mod(theta + np.pi, 2 * np.pi) - np.pi)
    return "Z" if abs(theta) < ANGLE_TOL else f"YZ({theta:.15g})"


@lru_cache(maxsize=None)
def group_by_name(name: str):
    return build_group(name)


@lru_cache(maxsize=None)
def _aklt_tables():
    g = group_by_name("aklt8")
    mp = np.linalg.matrix_power
    steps = tuple(g.index_of(m) for m in (gates.H, gates.X, gates.Z @ gates.X))
    phase = (None, g.index_of(gates.X), g.index_of(gates.X @ gates.Z))
    pauli = {g.index_of(mp(gates.X, a) @ mp(gates.Z, b)): (a, b) for a in (0, 1) for b in (0, 1)}
    return g.index_of(gates.H), steps, phase, pauli, g.index_of(gates.X)


class _Pauli:
    """Index lookup for ``X^a Z^b`` in the projective Pauli group."""

    group = None
    table = None

    @classmethod
    def index(cls, a: int, b: int) -> int:
        if cls.group is None:
            cls.group = group_by_name("pauli")
            cls.table = {(x, z): cls.group.index_of(
                np.linalg.matrix_power(gates.X, x) @ np.linalg.matrix_power(gates.Z, z))
                for x in (0, 1) for z in (0, 1)}
        return cls.table[(a & 1, b & 1)]


class Protocol:
    """Base class; subclasses implement :meth:`steps` and :meth:`network_resource`."""

    family = ""
    group_name = "pauli"

    def __init__(self, circuit: LogicalCircuit, max_steps: int = 100_000):
        self.circuit = circuit
        self.max_steps = int(max_steps)
        self.group = group_by_name(self.group_name)
        self.ledger: dict = {}
        self.bits: dict = {}

    def ledger_indices(self) -> dict:
        return dict(self.ledger)

    def ledger_matrices(self) -> dict:
        return {w: self.group.elements[i] for w, i in self.ledger.items()}

    def result(self) -> str:
        return "".join(str(self.bits[q]) for q in self.circuit.measured)

    def steps(self):
        raise NotImplementedError

    def network_resource(self):
        raise NotImplementedError

    def network_initial(self):
        return None


def _single_qubit_ops(circuit: LogicalCircuit, family: str):
    if circuit.num_qubits != 1:
        raise ProtocolError(f"{family} carries one logical qubit; circuit has {circuit.num_qubits}")
    return logical_ops(circuit)


def logical_ops(circuit: LogicalCircuit) -> list:
    """Primitive ops with resets of still-fresh qubits dropped."""
    touched, out = set(), []
    for op in primitive_ops(circuit):
        if op[0] == "prep" and op[1] not in touched:
            continue
        touched.update(q for q in op[1:] if isinstance(q, int))
        out.append(op)
    return out


# --------------------------------------------------------------------------
# 1-D cluster chain: Pauli frame
# --------------------------------------------------------------------------
class ClusterChainProtocol(Protocol):
    """Correlation state ``X^a Z^b ψ``; each site applies ``H Z^x S(-θ)``.

    The chain starts in ``|+⟩``, so the logical ``|0⟩`` costs one site.
    """

    family = "cluster1d"
    group_name = "pauli"

    def __init__(self, circuit, max_steps=100_000):
        super().__init__(circuit, max_steps)
        self.ops = [("H", 0)] + _single_qubit_ops(circuit, self.family)
        self.a = self.b = 0
        self.ledger = {0: 0}

    def network_resource(self):
        return build_1d_resource("cluster1d")

    def _sync(self):
        self.ledger = {0: _Pauli.index(self.a, self.b)}

    def steps(self):
        site, pending = 0, 0.0
        for op in self.ops:
            kind = op[0]
            if kind == "D":
                pending += op[2]
            elif kind == "prep":
                z = yield Request(site, "Z", "prep")
                site += 1
                self.a, self.b, pending = 0, z, 0.0
                self._sync()
                x = yield Request(site, "X", "prep")
                site += 1
                self.a, self.b = x ^ self.b, self.a
                self._sync()
            elif kind == "H":
                theta = -((-1) ** self.a) * pending
                x = yield Request(site, _eq(theta), "gate")
                site += 1
                self.a, self.b = x ^ self.b, self.a
                pending = 0.0
                self._sync()
            elif kind == "measure":
                z = yield Request(site, "Z", "readout")
                site += 1
                self.bits[op[1]] = z ^ self.a
                self.a, self.b = 0, z
                self._sync()
        return self.result()


# --------------------------------------------------------------------------
# AKLT-type chain: trial until success on the 8-element group
# --------------------------------------------------------------------------
class AkltChainProtocol(Protocol):
    """Ledger ``B`` with correlation state ``B ψ``.

    Transport outcomes multiply ``B`` by H, X or ZX. Diagonal phases need a
    Pauli ``B``; otherwise the protocol walks with transport measurements
    until it is. Logical Hadamards are absorbed as ``B ← B H``.
    """

    family = "aklt"
    group_name = "aklt8"

    def __init__(self, circuit, max_steps=100_000):
        super().__init__(circuit, max_steps)
        self.ops = _single_qubit_ops(circuit, self.family)
        self._H, self._step, self._phase_op, self._pauli, self._X = _aklt_tables()
        self.ledger = {0: 0}
        self._site = 0

    def network_resource(self):
        return build_1d_resource("aklt_variant")

    def _left(self, g):
        self.ledger[0] = self.group.multiply(g, self.ledger[0])

    def _request(self, basis, role):
        if self._site >= self.max_steps:
            raise ProtocolError(f"{self.family}: step budget of {self.max_steps} sites exhausted "
                                f"during {role}")
        req = Request(self._site, basis, role)
        self._site += 1
        return req

    def _walk_to_pauli(self):
        while self.ledger[0] not in self._pauli:
            k = yield self._request("T3", "walk")
            self._left(self._step[k])

    def _phase(self, alpha):
        while True:
            yield from self._walk_to_pauli()
            a, b = self._pauli[self.ledger[0]]
            phi = ((-1) ** a) * alpha
            k = yield self._request(f"P3({float(phi):.15g})", "gate")
            if k == 0:
                self._left(self._H)
                continue
            self._left(self._phase_op[k])
            return

    def steps(self):
        pending = 0.0
        for op in self.ops:
            kind = op[0]
            if kind == "D":
                pending += op[2]
            elif kind == "H":
                if abs(np.mod(pending + np.pi, 2 * np.pi) - np.pi) > ANGLE_TOL:
                    yield from self._phase(pending)
                pending = 0.0
                self.ledger[0] = self.group.multiply(self.ledger[0], self._H)
            elif kind == "prep":
                pending = 0.0
                while True:
                    k = yield self._request("Z", "prep")
                    if k:
                        self.ledger[0] = 0 if k == 1 else self._X
                        break
            elif kind == "measure":
                while True:
                    yield from self._walk_to_pauli()
                    k = yield self._request("Z", "readout")
                    if k == 0:
                        self._left(self._H)
                        continue
                    a, _ = self._pauli[self.ledger[0]]
                    self.bits[op[1]] = (1 if k == 1 else 0) ^ a
                    self.ledger[0] = 0 if k == 1 else self._X
                    break
        return self.result()


# --------------------------------------------------------------------------
# toric code, scheme 2: cluster-like pairs coupled through K_H
# --------------------------------------------------------------------------
def _pad_blocks(count: int) -> list:
    """Angles of ``count`` blocks ``H S(α)`` whose product is the identity."""
    if count == 0:
        return []
    if count == 1:
        raise ValueError("a single block cannot be the identity")
    if count % 2 == 0:
        return [0.0] * count
    return [np.pi / 2] * 3 + [0.0] * (count - 3)


class ToricPairProtocol(Protocol):
    """Logical qubit ``k`` lives on the line pair ``(2k, 2k+1)``.

    Even columns hold the modified vertical tensors, one per pair, whose
    equatorial measurement applies ``H Z^x S(-θ)`` to the pair's code
    space. Odd columns hold plain horizontal tensors between neighbouring
    pairs: a Z measurement decouples them, a ``YZ(φ)`` measurement applies
    ``ZZ(φ)``. Each pair carries a Pauli frame ``X^a Z^b``.
    """

    family = "toric2"
    group_name = "pauli"
    LOOKAHEAD_MARGIN = 5

    def __init__(self, circuit, max_steps=100_000):
        super().__init__(circuit, max_steps)
        self.n = circuit.num_qubits
        self.lines = 2 * max(self.n, 2)
        self.columns = self._schedule(logical_ops(circuit))
        self.ledger = {q: 0 for q in range(self.n)}
        self.frame = {q: [0, 0] for q in range(self.n)}

    # schedule ----------------------------------------------------------
    def _schedule(self, ops):
        """Columns: even entries map wire to a block, odd entries map pair to φ.

        Ops are cut into segments, each a run of single-qubit blocks followed
        by one group of couplings on disjoint neighbour pairs. All live wires
        get the same number of blocks per segment; the shortfall is filled
        with identity words of two or three blocks.
        """
        n = self.n
        segments = []
        items, coup = {q: [("H",)] for q in range(n)}, []
        for op in ops:
            if op[0] == "ZZ":
                a, b = sorted(op[1:3])
                if b - a != 1:
                    raise ProtocolError("toric2 couples neighbouring logical qubits only")
                if any({a, b} & {c[0], c[1]} for c in coup):
                    segments.append((items, coup))
                    items, coup = {q: [] for q in range(n)}, []
                coup.append((a, b, op[3]))
            else:
                if coup:
                    segments.append((items, coup))
                    items, coup = {q: [] for q in range(n)}, []
                items[op[1]].append(op[:1] + op[2:])
        segments.append((items, coup))

        columns, done = [], set()
        pending = {q: 0.0 for q in range(n)}
        for items, coup in segments:
            blocks = {}
            for q in range(n):
                seq = []
                for it in items[q]:
                    if it[0] == "D":
                        pending[q] += it[1]
                    elif it[0] == "H":
                        seq.append(("H", pending[q]))
                        pending[q] = 0.0
                    elif it[0] == "prep":
                        seq += [("prep",), ("H", 0.0)]
                        pending[q] = 0.0
                    elif it[0] == "measure":
                        seq.append(("measure", q))
                blocks[q] = seq
            live = [q for q in range(n) if q not in done and not _ends(blocks[q])]
            length = max([len(b) for b in blocks.values()] + [1])
            while any(length - len(blocks[q]) == 1 for q in live):
                length += 1
            for q in range(n):
                seq = blocks[q]
                if q in live:
                    seq = [("H", a) for a in _pad_blocks(length - len(seq))] + seq
                else:
                    seq = seq + [("idle",)] * (length - len(seq))
                    if _ends(blocks[q]):
                        done.add(q)
                blocks[q] = seq
            for k in range(length):
                columns.append({q: blocks[q][k] for q in range(n)})
                columns.append({(c[0], c[1]): c[2] for c in coup} if k == length - 1 else {})
        return columns

    def network_resource(self):
        return build_2d_resource("toric_scheme2", self.lines, len(self.columns) +
                                 self.LOOKAHEAD_MARGIN)

    def steps(self):
        for col, spec in enumerate(self.columns):
            if col % 2 == 0:
                for k in range(self.lines // 2):
                    site = (2 * k, col)
                    if k >= self.n or spec[k][0] == "idle":
                        yield Request(site, "X", "idle")
                        continue
                    yield from self._block(k, site, spec[k])
            else:
                for k in range(self.lines // 2 - 1):
                    site = (2 * k + 1, col)
                    pair = (k, k + 1)
                    if pair in spec and k + 1 < self.n:
                        fa, fb = self.frame[k], self.frame[k + 1]
                        phi = ((-1) ** (fa[0] ^ fb[0])) * spec[pair]
                        s = yield Request(site, _yz(phi), "couple")
                    else:
                        s = yield Request(site, "Z", "decouple")
                    for q in pair:
                        if q < self.n:
                            self.frame[q][1] ^= s
                    self._sync()
        return self.result()

    def _block(self, q, site, item):
        f = self.frame[q]
        if item[0] == "H":
            theta = -((-1) ** f[0]) * item[1]
            x = yield Request(site, _eq(theta), "gate")
            f[0], f[1] = x ^ f[1], f[0]
        elif item[0] == "prep":
            z = yield Request(site, "Z", "prep")
            f[0], f[1] = 0, z
        elif item[0] == "measure":
            z = yield Request(site, "Z", "readout")
            self.bits[item[1]] = z ^ f[0]
            f[0], f[1] = 0, z
        self._sync()

    def _sync(self):
        self.ledger = {q: _Pauli.index(*self.frame[q]) for q in range(self.n)}


def _ends(seq) -> bool:
    return bool(seq) and seq[-1][0] == "measure"


# --------------------------------------------------------------------------
# toric code, scheme 1: one encoded pair on a four-line patch
# --------------------------------------------------------------------------
class EncodedPairProtocol(Protocol):
    """Angle program on the pair of lines 1 and 2 of a four-line patch.

    Lines 0 and 3 are closed after every use, so the pair sees single-line
    phases from the even columns and a ``ZZ`` coupling plus ``√Z H`` on
    line 2 from the odd columns. The program is a list of target angles,
    three per period: line 1, line 2, and the coupling. Measurements are
    adapted to a two-line Pauli frame; the final X measurement on the
    coupling tensor reads the parity of the pair.

    Parameters
    ----------
    angles : sequence of (θ1, θ2, θ12)
    sign : {0, 1}
        Initial sign register of the pair, ``|+⟩_s`` (0) or ``|−⟩_s`` (1),
        with the parity register in ``|0⟩``.
    """

    family = "toric1"
    group_name = "pauli"
    LINES = 4

    def __init__(self, angles, sign: int = 0, max_steps=100_000):
        super().__init__(LogicalCircuit(1, ()), max_steps)
        self.angles = [tuple(float(x) for x in a) for a in angles]
        self.sign = int(sign)
        # frame[line] = [a, b] for X^a Z^b on lines 1 and 2
        self.frame = {1: [0, 0], 2: [0, 0]}
        self._sync()

    def result(self) -> str:
        return str(self.bits["parity"])

    def network_resource(self):
        cols = 2 * len(self.angles) + 2 + 4
        return build_2d_resource("toric_scheme1", self.LINES, cols)

    def network_initial(self):
        s_state = gates.KET_PLUS if self.sign == 0 else gates.KET_MINUS
        return {(1, 2): decode(np.kron(s_state, gates.KET0))}

    def _sync(self):
        self.ledger = {line: _Pauli.index(*self.frame[line]) for line in (1, 2)}

    @staticmethod
    def _through_w(f):
        f[0], f[1] = f[1], f[0] ^ f[1]

    def steps(self):
        col = 0
        for t1, t2, t12 in self.angles:
            f1, f2 = self.frame[1], self.frame[2]
            k = yield Request((0, col), _yz(((-1) ** f1[0]) * t1), "gate")
            f1[1] ^= k
            self._through_w(f1)
            k = yield Request((2, col), _yz(((-1) ** f2[0]) * t2), "gate")
            f2[1] ^= k
            self._sync()
            col += 1
            k = yield Request((1, col), _yz(((-1) ** (f1[0] ^ f2[0])) * t12), "couple")
            f1[1] ^= k
            f2[1] ^= k
            self._through_w(f2)
            self._sync()
            col += 1
        # readout needs an odd column: spend one even column on plain phases
        f1, f2 = self.frame[1], self.frame[2]
        k = yield Request((0, col), "Z", "gate")
        f1[1] ^= k
        self._through_w(f1)
        k = yield Request((2, col), "Z", "gate")
        f2[1] ^= k
        self._sync()
        col += 1
        x = yield Request((1, col), "X", "readout")
        self.bits["parity"] = x ^ f1[0] ^ f2[0]
        return self.result()
