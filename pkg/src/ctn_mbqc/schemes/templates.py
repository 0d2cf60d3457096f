"""Soundness checks for gate templates and correlation-space identities.

Every check contracts the resource tensors for one outcome branch and
compares the induced operator with its target modulo a global phase (or a
nonzero scalar where the identity only holds up to normalization). The
result is a flat list of :class:`Check` records.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import gates
from ..groups import build_group
from ..mps import LocalBasis, build_1d_resource, dihedral_generator, project_site
from ..peps import COPY, Fragment, build_2d_resource, fragment_operator, fragment_tensor
from ..tensor import matrices_equal_mod_phase, proportional
from .codec import parity_codec

TOL = 1e-10
H, S, X, Z = gates.H, gates.S, gates.X, gates.Z
SQRT_Z = gates.SQRT_Z
W = SQRT_Z @ H
CS = gates.controlled_phase(np.pi / 2)
mp = np.linalg.matrix_power


@dataclass(frozen=True)
class Check:
    """One verified branch: ``name`` of the identity, ``case`` label, fitted phase."""

    name: str
    case: str
    phase: complex
    deviation: float
    passed: bool

    def to_dict(self) -> dict:
        return {"identity": self.name, "case": self.case,
                "phase": [round(float(self.phase.real), 12), round(float(self.phase.imag), 12)],
                "deviation": float(self.deviation), "pass": bool(self.passed)}


def _check(name, case, got, want, tol=TOL, scalar=True) -> Check:
    m = proportional(got, want, tol) if scalar else matrices_equal_mod_phase(got, want, tol)
    return Check(name, str(case), complex(m.phase), float(m.max_abs_deviation), bool(m.equal))


def _flag(name, case, ok: bool, deviation: float = 0.0) -> Check:
    return Check(name, str(case), 1.0 + 0j, float(deviation), bool(ok))


def schmidt_values(m: np.ndarray) -> np.ndarray:
    """Operator Schmidt coefficients of a two-qubit operator, largest first."""
    r = np.asarray(m).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    return np.linalg.svd(r, compute_uv=False)


def _rank_one(m, tol=TOL) -> tuple[bool, float]:
    s = schmidt_values(m)
    if s[0] <= tol:
        return True, 0.0
    rel = float(s[1] / s[0])
    return rel <= tol, rel


def branch_operators(res, sites, through_in, through_out, bases: dict, fixed: dict,
                     closures=None) -> np.ndarray:
    """Induced operators for every outcome of the sites in ``bases`` at once.

    Returns an array ``[k_1, ..., k_m, out, in]`` with one axis per entry of
    ``bases`` (in insertion order); the sites of ``fixed`` are projected on
    the given vectors.
    """
    open_sites = [s for s in sites if s not in fixed]
    order = list(bases)
    if sorted(order) != sorted(open_sites):
        raise ValueError("every unfixed fragment site needs a basis")
    T = fragment_tensor(res, sites, through_in, through_out, closures, fixed)
    # contract axis by axis; each contraction moves the new outcome axis last
    for s in open_sites:
        B = bases[s].matrix().conj().T
        T = np.moveaxis(np.tensordot(B, T, axes=(1, 0)), 0, -1)
    # T is now [out, in, k(open_sites order)]
    perm = [open_sites.index(s) for s in order]
    T = np.moveaxis(T, [2 + p for p in perm], range(len(order)))
    return T


# --------------------------------------------------------------------------
# chains
# --------------------------------------------------------------------------
def cluster1d_x_basis() -> list[Check]:
    res = build_1d_resource("cluster1d")
    xb = LocalBasis.x()
    return [_check("cluster1d.x_basis", f"x={x}", project_site(res, xb.vectors[x]), H @ mp(Z, x))
            for x in (0, 1)]


def cluster1d_equatorial(angles=(0.3, -1.1, np.pi / 2, 2.5)) -> list[Check]:
    res = build_1d_resource("cluster1d")
    out = []
    for th in angles:
        b = LocalBasis.equatorial(th)
        for x in (0, 1):
            out.append(_check("cluster1d.equatorial", f"theta={th:.6g},x={x}",
                              project_site(res, b.vectors[x]),
                              H @ mp(Z, x) @ gates.phase_gate(-th)))
    return out


def aklt_transport() -> list[Check]:
    res = build_1d_resource("aklt_variant")
    T3 = LocalBasis.aklt_transport()
    targets = (H, X, Z @ X)
    return [_check("aklt.transport", f"k={k}", project_site(res, T3.vectors[k]), targets[k])
            for k in range(3)]


def aklt_phase_gate(angles=(0.4, -2.0, np.pi / 3)) -> list[Check]:
    """Phase measurement: outcome 0 transports by H (retry), k gives X Z^(k-1) S(φ)."""
    res = build_1d_resource("aklt_variant")
    out = []
    for phi in angles:
        P3 = LocalBasis.aklt_phase(phi)
        for k in range(3):
            want = H if k == 0 else X @ mp(Z, k - 1) @ gates.phase_gate(phi)
            out.append(_check("aklt.phase_gate", f"phi={phi:.6g},k={k}",
                              project_site(res, P3.vectors[k]), want))
    return out


def aklt_group() -> list[Check]:
    g = build_group("aklt8")
    return [_flag("aklt.byproduct_group_order", "order", g.order == 8, abs(g.order - 8))]


def dihedral_fragments(ms=(3, 4, 5)) -> list[Check]:
    """X outcome x gives Z^x G; equatorial outcome x gives S(-θ) Z^x G."""
    out = []
    for m in ms:
        res = build_1d_resource("dihedral", m=m)
        G = dihedral_generator(m)
        for x in (0, 1):
            out.append(_check("dihedral.x_basis", f"m={m},x={x}",
                              project_site(res, LocalBasis.x().vectors[x]), mp(Z, x) @ G))
            th = 0.7
            out.append(_check("dihedral.equatorial", f"m={m},theta={th},x={x}",
                              project_site(res, LocalBasis.equatorial(th).vectors[x]),
                              gates.phase_gate(-th) @ mp(Z, x) @ G))
    return out


def group_orders() -> list[Check]:
    out = []
    c = build_group("clifford1")
    out.append(_flag("clifford1.order", "order", c.order == 24, abs(c.order - 24)))
    for m in range(2, 7):
        g = build_group(f"dihedral:{m}")
        out.append(_flag("dihedral.group_order", f"m={m}", g.order == 2 * m, abs(g.order - 2 * m)))
    return out


# --------------------------------------------------------------------------
# two-dimensional single-wire identities
# --------------------------------------------------------------------------
def cluster2d_column() -> list[Check]:
    """Column (Z above, X on the wire, Z below) acts as H Z^(z_u + x + z_d)."""
    res = build_2d_resource("cluster2d", 3, 1)
    out = []
    for zu, x, zd in itertools.product((0, 1), repeat=3):
        f = Fragment((((0, 0), "Z", zu), ((1, 0), "X", x), ((2, 0), "Z", zd)),
                     ((1, 0, "l"),), ((1, 0, "r"),))
        out.append(_check("cluster2d.column", f"zu={zu},x={x},zd={zd}",
                          fragment_operator(res, f).data, H @ mp(Z, zu + x + zd)))
    return out


def weighted_wire() -> list[Check]:
    """Centre measured X among four Z-measured diagonal neighbours: H S^(2x + Σz)."""
    res = build_2d_resource("weighted_graph", 3, 3)
    out = []
    for x, *zs in itertools.product((0, 1), repeat=5):
        f = Fragment((((1, 1), "X", x), ((0, 0), "Z", zs[0]), ((0, 2), "Z", zs[1]),
                      ((2, 0), "Z", zs[2]), ((2, 2), "Z", zs[3])),
                     ((1, 1, "l"),), ((1, 1, "r"),))
        out.append(_check("weighted.wire", f"x={x},z={''.join(map(str, zs))}",
                          fragment_operator(res, f).data, H @ mp(S, 2 * x + sum(zs))))
    return out


# name -> (measured (site, basis), in leg, out leg, outcome names, target)
_CORNERS = {
    "B.straight": ([((1, 1), "X"), ((0, 1), "Z"), ((2, 1), "Z")], (1, 1, "l"), (1, 1, "r"),
                   ("x", "zu", "zd"), lambda o: H @ mp(Z, o["x"] + o["zd"]) @ mp(S, o["zu"])),
    "A.straight": ([((2, 1), "X"), ((1, 1), "Z"), ((3, 1), "Z")], (2, 1, "l"), (2, 1, "r"),
                   ("x", "zu", "zd"), lambda o: H @ mp(Z, o["x"] + o["zu"]) @ mp(S, o["zd"])),
    "A.left_to_up": ([((2, 1), "X"), ((2, 2), "Z"), ((3, 1), "Z")], (2, 1, "l"), (2, 1, "u"),
                     ("x", "zr", "zd"), lambda o: H @ mp(Z, o["x"] + o["zr"]) @ mp(S, o["zd"])),
    "A.up_to_right": ([((2, 1), "X"), ((2, 0), "Z"), ((3, 1), "Z")], (2, 1, "u"), (2, 1, "r"),
                      ("x", "zl", "zd"), lambda o: mp(H @ S @ H, o["zd"]) @ mp(X, o["zl"] + o["x"])),
    "B.left_to_down": ([((1, 1), "X"), ((0, 1), "Z"), ((1, 2), "Z")], (1, 1, "l"), (1, 1, "d"),
                       ("x", "zu", "zr"), lambda o: mp(Z, o["x"] + o["zr"]) @ mp(S, o["zu"])),
    "B.down_to_right": ([((1, 1), "X"), ((0, 1), "Z"), ((1, 0), "Z")], (1, 1, "d"), (1, 1, "r"),
                        ("x", "zu", "zl"),
                        lambda o: H @ mp(Z, o["x"] + o["zu"] + o["zl"]) @ mp(S @ Z, o["zu"])),
}


def rerouting_corners() -> list[Check]:
    """Straight transport and the four turns on both sublattices."""
    res = build_2d_resource("rerouting", 4, 3)
    out = []
    for name, (meas, tin, tout, names, target) in _CORNERS.items():
        for outs in itertools.product((0, 1), repeat=3):
            o = dict(zip(names, outs))
            f = Fragment(tuple((s, b, k) for (s, b), k in zip(meas, outs)), (tin,), (tout,))
            out.append(_check(f"rerouting.{name}", ",".join(f"{k}={v}" for k, v in o.items()),
                              fragment_operator(res, f).data, target(o)))
    return out


# --------------------------------------------------------------------------
# toric code tensors
# --------------------------------------------------------------------------
def toric_zz(angles=(0.0, np.pi / 2, -np.pi / 2, np.pi)) -> list[Check]:
    """Plain horizontal tensor in YZ(φ): ZZ(φ), or (Z⊗Z)·ZZ(φ) on outcome 1."""
    res = build_2d_resource("toric_plain", 4, 4)
    site = (1, 1)
    out = []
    for phi in angles:
        for k in (0, 1):
            f = Fragment(((site, LocalBasis.yz(phi).label, k),),
                         ((1, 1, "lu"), (1, 1, "ld")), ((1, 1, "ru"), (1, 1, "rd")))
            want = mp(np.kron(Z, Z), k) @ gates.zz_phase(phi)
            out.append(_check("toric.zz_phase", f"phi={phi:.6g},k={k}",
                              fragment_operator(res, f).data, want))
    return out


def cnot_identity() -> list[Check]:
    lhs = np.kron(gates.I2, H) @ np.kron(SQRT_Z, SQRT_Z) @ gates.zz_phase(-np.pi / 2) \
        @ np.kron(gates.I2, H)
    return [_check("toric.cnot_decomposition", "ZZ(-pi/2)", lhs, gates.CNOT, scalar=False)]


def sqrt_z_h_cube() -> list[Check]:
    return [_check("toric.sqrtz_h_cubed", "(sqrtZ H)^3", mp(W, 3), gates.I2, scalar=False)]


def _kv_matrix(t) -> np.ndarray:
    return t.transpose(["ru", "rd", "lu", "ld"]).data.reshape(4, 4)


def kv_factorization() -> list[Check]:
    """Vertical tensors through the copy map, for both physical outcomes.

    The plain tensor is ``COPY·A[s]·H·COPY†`` and the modified one
    ``COPY·A[s]·COPY†``, with ``A`` the cluster chain tensor; an
    X-basis-weighted sum of the modified one lives on even parity.
    """
    from ..peps import toric_v_class, toric_v_mod_class

    A = build_1d_resource("cluster1d").matrices
    kv, kvt = toric_v_class(), toric_v_mod_class()
    out = []
    scale = None
    for s in (0, 1):
        plain = _kv_matrix(kv.tensors[s])
        want = COPY @ A[s] @ H @ COPY.conj().T
        ratio = np.vdot(want, plain) / np.vdot(want, want)
        scale = ratio if scale is None else scale
        dev = float(np.max(np.abs(plain - scale * want)))
        out.append(Check("toric.kv_factorization", f"plain,s={s}", complex(scale / abs(scale)),
                         dev, dev <= TOL))
        mod = _kv_matrix(kvt.tensors[s])
        dev = float(np.max(np.abs(mod - COPY @ A[s] @ COPY.conj().T)))
        out.append(Check("toric.kv_factorization", f"modified,s={s}", 1.0 + 0j, dev, dev <= TOL))
    odd = np.array([0, 1, 1, 0], dtype=float)
    for x in (0, 1):
        phi = LocalBasis.x().vectors[x]
        m = sum(np.conj(phi[s]) * _kv_matrix(kvt.tensors[s]) for s in (0, 1))
        leak = float(max(np.abs(m[odd == 1, :]).max(), np.abs(m[:, odd == 1]).max()))
        out.append(Check("toric.kv_even_parity", f"x={x}", 1.0 + 0j, leak, leak <= TOL))
    return out


def parity_codec_examples() -> list[Check]:
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    out = [_check("codec.encode", "|00>+|11>", parity_codec("encode", bell),
                  np.kron(gates.KET0, gates.KET0), scalar=False),
           _check("codec.encode", "|01>-|10>", parity_codec("encode", singlet),
                  np.kron(gates.KET1, gates.KET1), scalar=False)]
    rng = np.random.default_rng(20)
    for i in range(20):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        back = parity_codec("decode", parity_codec("encode", psi))
        dev = float(np.max(np.abs(back - psi)))
        out.append(Check("codec.involution", f"random={i}", 1.0 + 0j, dev, dev <= TOL))
    return out


def toric_scheme2_blocks(angles=(0.0, 0.9, -np.pi / 2)) -> list[Check]:
    """Modified vertical tensor on a line pair: H Z^x S(-θ) on the copied qubit."""
    res = build_2d_resource("toric_scheme2", 2, 3)
    out = []
    enc = COPY
    for th in angles:
        for x in (0, 1):
            f = Fragment((((0, 0), LocalBasis.equatorial(th).label if th else "X", x),),
                         ((0, 0, "lu"), (0, 0, "ld")), ((0, 0, "ru"), (0, 0, "rd")))
            m = fragment_operator(res, f).data
            want = enc @ H @ mp(Z, x) @ gates.phase_gate(-th) @ enc.conj().T
            out.append(_check("toric2.pair_block", f"theta={th:.6g},x={x}", m, want))
    return out


def toric_scheme1_sites(angles=(0.0, 0.8, -1.9)) -> list[Check]:
    """Modified horizontal tensor in YZ(θ): (1⊗√Z H)(Z⊗Z)^k ZZ(θ)."""
    res = build_2d_resource("toric_scheme1", 4, 4)
    site = (1, 1)
    out = []
    for th in angles:
        for k in (0, 1):
            f = Fragment(((site, LocalBasis.yz(th).label, k),),
                         ((1, 1, "lu"), (1, 1, "ld")), ((1, 1, "ru"), (1, 1, "rd")))
            want = np.kron(gates.I2, W) @ mp(np.kron(Z, Z), k) @ gates.zz_phase(th)
            out.append(_check("toric1.site", f"theta={th:.6g},k={k}",
                              fragment_operator(res, f).data, want))
    return out


def toric2_parallel(pairs=((0.6, -1.3), (np.pi / 2, np.pi / 2), (-0.4, 2.2))) -> list[Check]:
    """Two couplings in one column equal the product of each alone."""
    res = build_2d_resource("toric_scheme2", 6, 3)
    a, b = (1, 1), (3, 1)
    tin = ((1, 1, "lu"), (1, 1, "ld"), (3, 1, "lu"), (3, 1, "ld"))
    tout = ((1, 1, "ru"), (1, 1, "rd"), (3, 1, "ru"), (3, 1, "rd"))
    out = []
    for p1, p2 in pairs:
        l1, l2 = LocalBasis.yz(p1).label, LocalBasis.yz(p2).label
        for k1, k2 in itertools.product((0, 1), repeat=2):
            both = fragment_operator(res, Fragment(((a, l1, k1), (b, l2, k2)), tin, tout)).data
            first = fragment_operator(res, Fragment(((a, l1, k1), (b, "Z", 0)), tin, tout)).data
            second = fragment_operator(res, Fragment(((a, "Z", 0), (b, l2, k2)), tin, tout)).data
            out.append(_check("toric2.parallel_couplings", f"phi=({p1:.4g},{p2:.4g}),k=({k1},{k2})",
                              both, second @ first))
    return out


def _cnot_from_zz() -> np.ndarray:
    return np.kron(gates.I2, H) @ np.kron(SQRT_Z, SQRT_Z) @ gates.zz_phase(-np.pi / 2) \
        @ np.kron(gates.I2, H)


def _on(op2: np.ndarray, a: int, b: int, n: int = 3) -> np.ndarray:
    """Embed a two-qubit operator on qubits ``a`` (first factor) and ``b``."""
    full = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for col in range(2 ** n):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        vec = op2[:, bits[a] * 2 + bits[b]]
        for r in range(4):
            nb = list(bits)
            nb[a], nb[b] = r >> 1, r & 1
            full[sum(v << (n - 1 - q) for q, v in enumerate(nb)), col] += vec[r]
    return full


def toric1_coupling() -> list[Check]:
    """Swap into the ancilla, couple, swap back; each CNOT from ZZ(-π/2).

    Qubits are (logical 1, ancilla, logical 2) with the ancilla in |0⟩; the
    net action on the logical pair is a controlled phase.
    """
    cnot = _cnot_from_zz()
    one = np.kron(gates.I2, H)
    swap_in = _on(cnot, 1, 0) @ _on(cnot, 0, 1)
    couple = _on(one, 1, 2) @ _on(cnot, 1, 2) @ _on(one, 1, 2)
    swap_out = _on(cnot, 0, 1) @ _on(cnot, 1, 0)
    seq = swap_out @ couple @ swap_in
    embed = np.zeros((8, 4), dtype=complex)  # logical pair -> (l1, |0>, l2)
    for i in range(4):
        embed[((i >> 1) << 2) | (i & 1), i] = 1
    got = embed.conj().T @ seq @ embed
    leak = float(np.linalg.norm(seq @ embed - embed @ got))
    return [_check("toric1.coupling_circuit", "ancilla |0>", got, gates.CZ, scalar=False),
            Check("toric1.coupling_circuit", "ancilla restored", 1.0 + 0j, leak, leak <= TOL)]


# --------------------------------------------------------------------------
# two-qubit fragments
# --------------------------------------------------------------------------
def cluster2d_cz() -> list[Check]:
    """Adjacent wires measured in X: (H Z^x0 ⊗ H Z^x1)·CZ."""
    res = build_2d_resource("cluster2d", 2, 1)
    out = []
    for x0, x1 in itertools.product((0, 1), repeat=2):
        f = Fragment((((0, 0), "X", x0), ((1, 0), "X", x1)),
                     ((0, 0, "l"), (1, 0, "l")), ((0, 0, "r"), (1, 0, "r")))
        want = np.kron(H @ mp(Z, x0), H @ mp(Z, x1)) @ gates.CZ
        out.append(_check("cluster2d.cz", f"x=({x0},{x1})", fragment_operator(res, f).data, want))
    return out


def rerouting_junctions() -> list[Check]:
    """Neighbouring wires of the two sublattices: controlled-S one way, CZ the other."""
    out = []
    for rows, top, core, label in ((2, 0, CS, "A_over_B"), (3, 1, gates.CZ, "B_over_A")):
        res = build_2d_resource("rerouting", rows, 1)
        a, b = (top, 0), (top + 1, 0)
        for x0, x1 in itertools.product((0, 1), repeat=2):
            f = Fragment(((a, "X", x0), (b, "X", x1)), ((*a, "l"), (*b, "l")), ((*a, "r"), (*b, "r")))
            want = np.kron(H @ mp(Z, x0), H @ mp(Z, x1)) @ core
            out.append(_check(f"rerouting.{label}", f"x=({x0},{x1})",
                              fragment_operator(res, f).data, want))
    return out


WEIGHTED_CZ_RESTART = 3
AKLT_CZ_RESTART = 5


def weighted_cz() -> list[Check]:
    """3×3 weighted patch: flank wires in X, middle-row ends in Z, centre in Y.

    Success (all X outcomes 0, Z outcomes 0) gives (H S Z^y)^⊗2·CZ. On every
    other flank outcome the centre is measured in Z instead, which must
    leave the two wires uncoupled before the restart.
    """
    res = build_2d_resource("weighted_graph", 3, 3)
    flank = [(0, 0), (0, 1), (0, 2), (2, 0), (2, 1), (2, 2)]
    ends = [(1, 0), (1, 2)]
    sites = flank + ends + [(1, 1)]
    tin, tout = ((0, 0, "l"), (2, 0, "l")), ((0, 2, "r"), (2, 2, "r"))
    out = []
    xb, zb = LocalBasis.x(), LocalBasis.computational()
    fixed = {s: xb.vectors[0] for s in flank}
    fixed.update({s: zb.vectors[0] for s in ends})
    ops = branch_operators(res, sites, tin, tout, {(1, 1): LocalBasis.y()}, fixed)
    for y in (0, 1):
        want = np.kron(H @ S @ mp(Z, y), H @ S @ mp(Z, y)) @ gates.CZ
        out.append(_check("weighted.cz", f"success,y={y}", ops[y], want))
    bases = {s: xb for s in flank}
    bases.update({s: zb for s in ends})
    bases[(1, 1)] = zb
    ops = branch_operators(res, sites, tin, tout, bases, {})
    worst, n = 0.0, 0
    for idx in itertools.product((0, 1), repeat=9):
        if not any(idx[:8]):
            continue
        ok, rel = _rank_one(ops[idx])
        worst = max(worst, rel)
        n += 1
    out.append(Check("weighted.cz_failure_decouples", f"{n} branches", 1.0 + 0j, worst, worst <= TOL))
    return out


@lru_cache(maxsize=None)
def _aklt_transport_matrices():
    res = build_1d_resource("aklt_variant")
    return [project_site(res, v) for v in LocalBasis.aklt_transport().vectors]


def aklt2d_cz() -> list[Check]:
    """Five-column AKLT-type patch: the conditional controlled phase.

    Middle row measured in Z with outcomes (1, 0, ·, 0, 1), both wires
    measured in the transport basis with outcome 1 in the centre column and
    the centre in the phase basis P3(π/2) with outcome y ∈ {1, 2}:
    the patch acts as (U_a⊗L_a)(X Z^y S ⊗ X Z^y S)·CZ·(U_b⊗L_b), where the
    outer factors are the transport operators of the other wire sites.
    All other middle-row and centre-column outcomes are declared failures;
    the centre is then measured in Z, which must decouple the wires.
    """
    res = build_2d_resource("aklt2d", 3, 5)
    closures = {(1, 0, "l"): gates.KET_PLUS, (1, 4, "r"): gates.KET_PLUS}
    sites = [(r, c) for r in range(3) for c in range(5)]
    tin, tout = ((0, 0, "l"), (2, 0, "l")), ((0, 4, "r"), (2, 4, "r"))
    T3, Z3 = LocalBasis.aklt_transport(), LocalBasis.computational(3)
    mid = {0: 1, 1: 0, 3: 0, 4: 1}
    A = _aklt_transport_matrices()
    out = []
    # success: wire transports free
    wire = [(r, c) for r in (0, 2) for c in (0, 1, 3, 4)]
    for y in (1, 2):
        fixed = {(1, c): Z3.vectors[k] for c, k in mid.items()}
        fixed[(0, 2)] = fixed[(2, 2)] = T3.vectors[1]
        fixed[(1, 2)] = LocalBasis.aklt_phase(np.pi / 2).vectors[y]
        ops = branch_operators(res, sites, tin, tout, {s: T3 for s in wire}, fixed, closures)
        core = np.kron(X @ mp(Z, y) @ S, X @ mp(Z, y) @ S) @ gates.CZ
        worst, n, ok_all, phase = 0.0, 0, True, None
        for idx in itertools.product(range(3), repeat=8):
            u0, u1, u3, u4, l0, l1, l3, l4 = idx
            before = np.kron(A[u1] @ A[u0], A[l1] @ A[l0])
            after = np.kron(A[u4] @ A[u3], A[l4] @ A[l3])
            m = proportional(ops[idx], after @ core @ before, TOL)
            ok_all &= bool(m.equal)
            worst = max(worst, m.max_abs_deviation)
            phase = m.phase if phase is None else phase
            n += 1
        out.append(Check("aklt2d.cz", f"success,y={y},{n} transport branches",
                         complex(phase), float(worst), ok_all))
    # failures: centre measured in Z, wire transports fixed
    fixed = {(r, c): T3.vectors[1] for r in (0, 2) for c in (0, 1, 3, 4)}
    bases = {(1, c): Z3 for c in (0, 1, 3, 4)}
    bases[(0, 2)] = bases[(2, 2)] = T3
    bases[(1, 2)] = Z3
    ops = branch_operators(res, sites, tin, tout, bases, fixed, closures)
    worst, n = 0.0, 0
    for idx in itertools.product(range(3), repeat=7):
        m0, m1, m3, m4, up, lo, _ = idx
        if (m0, m1, m3, m4, up, lo) == (1, 0, 0, 1, 1, 1):
            continue
        ok, rel = _rank_one(ops[idx])
        worst = max(worst, rel)
        n += 1
    out.append(Check("aklt2d.cz_failure_decouples", f"{n} branches", 1.0 + 0j, worst, worst <= TOL))
    return out


def weighted_z_decouple() -> list[Check]:
    """Centre of the weighted patch measured in Z: the wires stay uncoupled."""
    res = build_2d_resource("weighted_graph", 3, 3)
    xb, zb = LocalBasis.x(), LocalBasis.computational()
    out = []
    for k in (0, 1):
        phys = [((r, c), "X", 0) for r in (0, 2) for c in range(3)]
        phys += [((1, 0), "Z", 0), ((1, 2), "Z", 0), ((1, 1), "Z", k)]
        f = Fragment(tuple(phys), ((0, 0, "l"), (2, 0, "l")), ((0, 2, "r"), (2, 2, "r")))
        ok, rel = _rank_one(fragment_operator(res, f).data)
        out.append(Check("weighted.centre_z_decouples", f"z={k}", 1.0 + 0j, rel, ok))
    return out


# --------------------------------------------------------------------------
# suites
# --------------------------------------------------------------------------
SUITES = {
    "identities": (cluster1d_x_basis, cluster2d_column, aklt_group, toric_zz, cnot_identity,
                   sqrt_z_h_cube, kv_factorization, weighted_wire, group_orders,
                   rerouting_corners),
    "gates": (cluster1d_equatorial, aklt_transport, aklt_phase_gate, dihedral_fragments,
              toric_scheme2_blocks, toric_scheme1_sites, parity_codec_examples),
    "fragments": (cluster2d_cz, rerouting_junctions, weighted_cz, weighted_z_decouple,
                  aklt2d_cz, toric2_parallel, toric1_coupling),
}


def run_suite(name: str) -> list[Check]:
    """All checks of one suite (or of every suite for ``"all"``)."""
    if name == "all":
        return [c for key in SUITES for c in run_suite(key)]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    return [c for fn in SUITES[name] for c in fn()]
