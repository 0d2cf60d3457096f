"""Scheme families: resource, by-product group, gate realizations, compilation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..mps import build_1d_resource
from .circuit import LogicalCircuit, primitive_ops
from .protocols import (AkltChainProtocol, ClusterChainProtocol, EncodedPairProtocol, Protocol,
                        ProtocolError, ToricPairProtocol, _Pauli, group_by_name)
from .runtime import AdaptivePattern
from .templates import AKLT_CZ_RESTART, WEIGHTED_CZ_RESTART

LOGICAL_GATES = frozenset({"prep_z", "H", "S", "rot", "CZ", "CS", "ZZ", "measure_z"})


@dataclass(frozen=True)
class GateRealization:
    """Measurement recipe for one logical gate in one family.

    Attributes
    ----------
    measurements : tuple
        ``(site, basis, role)`` entries relative to the current position;
        bases may depend on the ledger (the adapted angle is already filled in).
    outcomes : dict
        Outcome label → ``(operator applied, ledger factor)`` description.
    success : str
        Predicate on the outcomes under which the gate is done.
    restart_offset : int or None
        Columns to skip before retrying after a failure (None: never fails).
    templates : tuple
        Names of the soundness checks that verify the recipe.
    """

    family: str
    gate: str
    measurements: tuple
    outcomes: dict
    success: str = "always"
    restart_offset: int | None = None
    templates: tuple = ()


@dataclass(frozen=True)
class SchemeFamily:
    name: str
    resource: str
    group: str
    ledger_policy: str
    gates: frozenset
    scope: str
    protocol: type | None = None
    restart_offset: int | None = None
    max_qubits: int | None = None
    notes: str = ""
    realizations: dict = field(default_factory=dict, compare=False)

    @property
    def executable(self) -> bool:
        return self.protocol is not None


FAMILIES: dict[str, SchemeFamily] = {
    "cluster1d": SchemeFamily("cluster1d", "cluster1d", "pauli", "pauli-frame",
                              frozenset({"prep_z", "H", "S", "rot", "measure_z"}), "end-to-end",
                              ClusterChainProtocol, max_qubits=1),
    "aklt": SchemeFamily("aklt", "aklt", "aklt8", "walk-until-inverse",
                         frozenset({"prep_z", "H", "S", "rot", "measure_z"}), "end-to-end",
                         AkltChainProtocol, max_qubits=1,
                         notes="walks until the ledger is a Pauli, then adapts the phase sign"),
    "toric2": SchemeFamily("toric2", "toric_scheme2", "pauli", "pauli-frame",
                           LOGICAL_GATES, "end-to-end", ToricPairProtocol),
    "toric1": SchemeFamily("toric1", "toric_scheme1", "pauli", "pauli-frame",
                           frozenset({"S", "ZZ", "CZ"}), "angle-programs", None,
                           notes="encoded pair programs run end-to-end through "
                                 "encoded_pair_pattern; the coupling circuit is "
                                 "verified at fragment level"),
    "cluster2d": SchemeFamily("cluster2d", "cluster2d", "pauli", "pauli-frame",
                              frozenset({"H", "S", "rot", "CZ"}), "fragment"),
    "aklt2d": SchemeFamily("aklt2d", "aklt2d", "clifford1", "walk-until-inverse",
                           frozenset({"CZ"}), "fragment", restart_offset=AKLT_CZ_RESTART),
    "weighted": SchemeFamily("weighted", "weighted_graph", "clifford1", "walk-until-inverse",
                             frozenset({"H", "S", "CZ"}), "fragment",
                             restart_offset=WEIGHTED_CZ_RESTART),
    "rerouting": SchemeFamily("rerouting", "rerouting", "clifford1", "pauli-frame",
                              frozenset({"H", "S", "CS", "CZ"}), "fragment",
                              notes="vertical transport only at junction corners"),
    "dihedral": SchemeFamily("dihedral", "dihedral", "dihedral:m", "walk-until-inverse",
                             frozenset({"S"}), "fragment"),
}

# resource names accepted on the command line -> family
RESOURCE_FAMILY = {
    "cluster1d": "cluster1d", "aklt": "aklt", "cluster2d": "cluster2d", "aklt2d": "aklt2d",
    "toric_scheme1": "toric1", "toric_scheme2": "toric2", "weighted_graph": "weighted",
    "rerouting": "rerouting", "aklt-orig": None, "toric_plain": None,
}


def family_for_resource(name: str) -> str | None:
    """Family that computes on a resource, or None for resources with no scheme."""
    if name.startswith("dihedral"):
        return "dihedral"
    if name not in RESOURCE_FAMILY:
        raise KeyError(f"unknown resource {name!r}")
    return RESOURCE_FAMILY[name]


def _family(name: str) -> SchemeFamily:
    if name not in FAMILIES:
        raise KeyError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    return FAMILIES[name]


def realize_gate(family: str, gate: str, ledger=0, phi: float = 0.0) -> GateRealization:
    """Recipe for ``gate`` in ``family`` given the current ledger element index.

    Raises
    ------
    ProtocolError
        Unsupported gate for this family.
    """
    fam = _family(family)
    if gate not in fam.gates:
        raise ProtocolError(f"{family} has no realization of {gate}")
    if gate == "rot":
        return GateRealization(family, gate, (("word", "S(gamma) H S(beta) H S(alpha)", "euler"),),
                               {"-": ("rotation as an S/H word", "per constituent gate")},
                               templates=tuple(realize_gate(family, "S", ledger).templates))
    g = group_by_name(fam.group) if fam.group != "dihedral:m" else None
    if family == "cluster1d":
        a = _frame_x(g, ledger)
        if gate == "H":
            return GateRealization(family, gate, ((0, "X", "gate"),),
                                   {"x": ("H Z^x", "(a,b) <- (x xor b, a)")},
                                   templates=("cluster1d.x_basis",))
        if gate == "S":
            th = -((-1) ** a) * phi
            return GateRealization(family, gate, ((0, f"EQ({th:.15g})", "gate"),),
                                   {"x": ("H Z^x S(phi)", "(a,b) <- (x xor b, a)")},
                                   templates=("cluster1d.equatorial",))
        if gate == "measure_z":
            return GateRealization(family, gate, ((0, "Z", "readout"),),
                                   {"z": ("bit z xor a", "(a,b) <- (0, z)")})
        if gate == "prep_z":
            return GateRealization(family, gate, ((0, "Z", "prep"), (1, "X", "prep")),
                                   {"z,x": ("|0> then H", "(a,b) <- (x xor z, 0)")})
    if family == "aklt":
        if gate == "S":
            return GateRealization(
                family, gate, ((0, "T3", "walk until the ledger is a Pauli"),
                               (0, f"P3(+-{phi:.15g})", "gate")),
                {"0": ("H", "retry"), "1": ("X S(phi)", "ledger X"),
                 "2": ("X Z S(phi)", "ledger XZ")},
                success="outcome 1 or 2", templates=("aklt.transport", "aklt.phase_gate"))
        if gate == "H":
            return GateRealization(family, gate, (), {"-": ("absorbed", "ledger <- ledger H")})
        if gate == "measure_z":
            return GateRealization(family, gate, ((0, "Z", "readout"),),
                                   {"0": ("H", "retry"), "1": ("bit 1 xor a", "ledger I"),
                                    "2": ("bit a", "ledger X")}, success="outcome 1 or 2")
        if gate == "prep_z":
            return GateRealization(family, gate, ((0, "Z", "prep"),),
                                   {"0": ("-", "retry"), "1": ("|0>", "ledger I"),
                                    "2": ("|0>", "ledger X")}, success="outcome 1 or 2")
    if family == "toric2":
        if gate in ("H", "S", "rot", "prep_z", "measure_z"):
            return GateRealization(family, gate, ((0, "EQ(theta)", "gate"),),
                                   {"x": ("H Z^x S(-theta) on the pair", "(a,b) <- (x xor b, a)")},
                                   templates=("toric2.pair_block",))
        return GateRealization(family, gate, ((1, "YZ(+-phi)", "couple"),),
                               {"k": ("(Z x Z)^k ZZ(phi)", "b ^= k on both wires")},
                               templates=("toric.zz_phase", "toric2.parallel_couplings"))
    if family == "toric1":
        if gate == "CZ":
            return GateRealization(family, gate, (("swap-couple-swap", "YZ(-pi/2)", "couple"),),
                                   {"-": ("CZ on the logical pair", "pauli frame")},
                                   templates=("toric1.coupling_circuit", "toric.cnot_decomposition"))
        return GateRealization(family, gate, ((0, "YZ(phi)", "gate"),),
                               {"k": ("(1 x sqrtZ H)(Z x Z)^k ZZ(phi)", "b ^= k on both lines")},
                               templates=("toric1.site",))
    if family == "cluster2d":
        if gate == "CZ":
            return GateRealization(family, gate, ((0, "X", "wire"), (1, "X", "wire")),
                                   {"x0,x1": ("(H Z^x0 x H Z^x1) CZ", "Z^x on each wire")},
                                   templates=("cluster2d.cz",))
        return GateRealization(family, gate, ((0, "EQ(theta)", "gate"),),
                               {"zu,x,zd": ("H Z^(zu+x+zd) S(-theta)", "Z^(zu+x+zd)")},
                               templates=("cluster2d.column",))
    if family == "aklt2d":
        return GateRealization(
            family, gate,
            (((1, 0), "Z", "ends"), ((1, 1), "Z", "ends"), ((0, 2), "T3", "flank"),
             ((2, 2), "T3", "flank"), ((1, 2), "P3(pi/2)", "centre")),
            {"success": ("(X Z^y S)^2 CZ between transports", "clifford ledger"),
             "failure": ("centre in Z decouples", "restart")},
            success="middle row (1,0,.,0,1), flanks 1, centre y in {1,2}",
            restart_offset=AKLT_CZ_RESTART, templates=("aklt2d.cz", "aklt2d.cz_failure_decouples"))
    if family == "weighted":
        if gate == "CZ":
            return GateRealization(
                family, gate, (("flanks", "X", "wire"), ("ends", "Z", "row"), ((1, 1), "Y", "centre")),
                {"success": ("(H S Z^y)^2 CZ", "clifford ledger"),
                 "failure": ("centre in Z decouples", "restart")},
                success="all flank X outcomes 0 and end Z outcomes 0",
                restart_offset=WEIGHTED_CZ_RESTART,
                templates=("weighted.cz", "weighted.cz_failure_decouples"))
        return GateRealization(family, gate, ((0, "X", "gate"),),
                               {"x,z": ("H S^(2x + sum z)", "clifford ledger")},
                               templates=("weighted.wire",))
    if family == "rerouting":
        if gate == "CS":
            return GateRealization(family, gate, ((0, "X", "A wire"), (1, "X", "B wire")),
                                   {"x0,x1": ("(H Z^x0 x H Z^x1) CS", "Z^x on each wire")},
                                   templates=("rerouting.A_over_B",))
        if gate == "CZ":
            return GateRealization(family, gate, ((0, "X", "B wire"), (1, "X", "A wire")),
                                   {"x0,x1": ("(H Z^x0 x H Z^x1) CZ", "Z^x on each wire")},
                                   templates=("rerouting.B_over_A",))
        return GateRealization(family, gate, ((0, "X", "gate"),),
                               {"x,zu,zd": ("H Z^(x+z) S^z", "clifford ledger")},
                               templates=("rerouting.B.straight", "rerouting.A.straight"))
    if family == "dihedral":
        return GateRealization(family, gate, ((0, "EQ(theta)", "gate"),),
                               {"x": ("S(-theta) Z^x G", "dihedral ledger")},
                               templates=("dihedral.x_basis", "dihedral.equatorial"))
    raise ProtocolError(f"{family} has no realization of {gate}")


def _frame_x(group, ledger) -> int:
    """X exponent of a Pauli-frame ledger element."""
    if group is None:
        return 0
    for a in (0, 1):
        for b in (0, 1):
            if _Pauli.index(a, b) == int(ledger):
                return a
    raise ProtocolError(f"ledger element {ledger} is not a Pauli")


class _Halt(Protocol):
    family = "none"

    def steps(self):
        return ""
        yield  # pragma: no cover

    def result(self) -> str:
        return ""

    def network_resource(self):
        # never measured; any chain gives the backends something to hold
        return build_1d_resource("cluster1d")


def compile(circuit: LogicalCircuit, family: str) -> AdaptivePattern:  # noqa: A001
    """Lazy adaptive pattern computing ``circuit`` on ``family``.

    Raises
    ------
    ProtocolError
        The family cannot run this circuit end to end (unsupported gate,
        too many qubits, or a family verified only at fragment level).
    """
    fam = _family(family)
    if not circuit.gates:
        return AdaptivePattern(family, lambda: _Halt(circuit), circuit)
    used = {g.name for g in circuit.gates}
    missing = sorted(used - fam.gates)
    if missing:
        raise ProtocolError(f"{family} does not realize {', '.join(missing)}")
    if fam.max_qubits is not None and circuit.num_qubits > fam.max_qubits:
        raise ProtocolError(f"{family} carries {fam.max_qubits} logical qubit(s); "
                            f"circuit has {circuit.num_qubits}")
    if not fam.executable:
        raise ProtocolError(f"{family} gates are verified per fragment "
                            f"(`verify --suite fragments`); end-to-end runs are not provided")
    primitive_ops(circuit)  # decomposition errors surface here
    cls = fam.protocol
    return AdaptivePattern(family, lambda: cls(circuit), circuit)


def encoded_pair_pattern(angles, sign: int = 0) -> AdaptivePattern:
    """Encoded-pair program on the four-line scheme-one patch."""
    angles = [tuple(float(x) for x in a) for a in angles]
    return AdaptivePattern("toric1", lambda: EncodedPairProtocol(angles, sign), None)
