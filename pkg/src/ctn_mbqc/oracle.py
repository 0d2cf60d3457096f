"""Brute-force reference engine.

States are built the slow, obvious way: graph-type resources by applying
controlled-phase gates to ``|+⟩`` product states, 1-D chains by enumerating
every outcome string, and the remaining 2-D resources by a single
``einsum`` over all site tensors. Measurements follow the Born rule on the
full amplitude vector. Nothing here reuses the sweep contraction or the
chain environments of :mod:`ctn_mbqc.mps` and :mod:`ctn_mbqc.peps`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import gates
from .mps import LocalBasis, MpsResource, basis_from_label, build_1d_resource
from .peps import KINDS_2D, PepsResource, build_2d_resource

ORACLE_CAP = 2**20
ZERO_PROB = 1e-14


class OracleCapError(ValueError):
    """The requested state exceeds the amplitude cap."""


class ZeroProbabilityError(ValueError):
    """Every amplitude of a post-selected branch vanishes."""


@dataclass(frozen=True, eq=False)
class DenseState:
    """Normalized amplitude vector over sites with the given dimensions.

    Site 0 is the most significant index.
    """

    dims: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != int(np.prod(dims, dtype=np.int64)):
            raise ValueError("amplitude count does not match the site dimensions")
        n = np.linalg.norm(amps)
        if n == 0:
            raise ZeroProbabilityError("state has zero norm")
        if abs(n - 1.0) > 1e-14:  # keep stored states bit-exact on reload
            amps = amps / n
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_sites(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def probabilities(self, site: int, basis: LocalBasis) -> np.ndarray:
        """Born probabilities of every outcome of ``basis`` on ``site``."""
        proj = self._project_all(site, basis)
        p = np.array([np.vdot(v, v).real for v in proj])
        return p

    def _project_all(self, site: int, basis: LocalBasis) -> list:
        if basis.dim != self.dims[site]:
            raise ValueError("basis dimension does not match the site")
        t = np.moveaxis(self.tensor(), site, 0)
        return [np.tensordot(phi.conj(), t, axes=(0, 0)) for phi in basis.vectors]

    def collapse(self, site: int, basis: LocalBasis, outcome: int) -> "DenseState":
        """Post-selected state with ``site`` left in the basis vector."""
        rest = self._project_all(site, basis)[outcome]
        if np.vdot(rest, rest).real <= ZERO_PROB:
            raise ZeroProbabilityError(f"outcome {outcome} on site {site} has zero probability")
        t = np.multiply.outer(basis.vectors[outcome], rest)
        return DenseState(self.dims, np.moveaxis(t, 0, site).reshape(-1))

    def export_binary(self, path) -> None:
        """Write amplitudes as little-endian complex doubles."""
        self.amplitudes.astype("<c16").tofile(path)

    @staticmethod
    def import_binary(path, dims) -> "DenseState":
        return DenseState(tuple(dims), np.fromfile(path, dtype="<c16"))


def measure(state: DenseState, site: int, basis: LocalBasis, seed=None):
    """Sample an outcome by the Born rule and return ``(outcome, collapsed_state)``."""
    rng = np.random.default_rng(seed)
    p = state.probabilities(site, basis)
    p = np.clip(p, 0.0, None)
    k = int(rng.choice(len(p), p=p / p.sum()))
    return k, state.collapse(site, basis, k)


def joint_distribution(state: DenseState, bases: Mapping[int, LocalBasis]) -> dict:
    """Exact distribution of outcomes on the listed sites (others traced)."""
    t = state.tensor()
    sites = sorted(bases)
    for site in sites:
        U = bases[site].matrix().conj().T  # rows are ⟨φ_k|
        t = np.moveaxis(np.tensordot(U, t, axes=(1, site)), 0, site)
    p = np.abs(t) ** 2
    others = tuple(i for i in range(state.num_sites) if i not in sites)
    p = p.sum(axis=others) if others else p
    return {k: float(p[k]) for k in itertools.product(*[range(state.dims[s]) for s in sites])}


# --------------------------------------------------------------------------
# direct constructions
# --------------------------------------------------------------------------
def _check_cap(dims) -> None:
    total = int(np.prod(dims, dtype=np.int64))
    if total > ORACLE_CAP:
        raise OracleCapError(f"{total} amplitudes exceed the oracle cap of {ORACLE_CAP}")


def _apply_two_site_diag(psi: np.ndarray, a: int, b: int, diag: np.ndarray) -> np.ndarray:
    """Multiply by a diagonal two-site gate given as ``diag[s_a, s_b]``."""
    shape = [1] * psi.ndim
    shape[a], shape[b] = diag.shape
    if a > b:
        diag = diag.T
        shape[a], shape[b] = diag.shape[1], diag.shape[0]
    return psi * diag.reshape(shape)


def _apply_one_site(psi: np.ndarray, a: int, op: np.ndarray) -> np.ndarray:
    return np.moveaxis(np.tensordot(op, psi, axes=(1, a)), 0, a)


def graph_state(n: int, edges: Sequence[tuple], local=None) -> np.ndarray:
    """Controlled-phase circuit on ``|+⟩^n``.

    Parameters
    ----------
    edges : sequence of (a, b, phi)
        ``P(phi)`` is applied between qubits ``a`` and ``b``.
    local : dict, optional
        Extra single-qubit gates applied afterwards, qubit to list of 2x2.
    """
    _check_cap([2] * n)
    psi = np.ones([2] * n, dtype=complex) / np.sqrt(2.0) ** n
    for a, b, phi in edges:
        diag = gates.controlled_phase(phi).diagonal().reshape(2, 2)
        psi = _apply_two_site_diag(psi, a, b, diag)
    for q, ops in (local or {}).items():
        for op in ops:
            psi = _apply_one_site(psi, q, op)
    return psi.reshape(-1)


def _chain_by_enumeration(res: MpsResource, n: int) -> np.ndarray:
    """Amplitudes ⟨R|A[s_n]...A[s_1]|L⟩ one string at a time."""
    _check_cap([res.d] * n)
    out = np.empty(res.d**n, dtype=complex)
    right = res.right.conj()
    for k, s in enumerate(itertools.product(range(res.d), repeat=n)):
        v = res.left
        for x in s:
            v = res.matrices[x] @ v
        out[k] = right @ v
    return out


def _square_edges(rows: int, cols: int, vertical_phase):
    idx = lambda r, c: r * cols + c  # noqa: E731
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((idx(r, c), idx(r, c + 1), np.pi))
            if r + 1 < rows:
                edges.append((idx(r + 1, c), idx(r, c), vertical_phase(r + 1)))
    return edges


def build_direct(kind: str, size=None, *, m: int | None = None,
                 ket1_boundaries: bool = False) -> DenseState:
    """Independent construction of a catalog resource.

    Parameters
    ----------
    kind : str
        Any 1-D or 2-D kind.
    size : int or (rows, cols)
        Chain length for 1-D kinds; patch shape for 2-D kinds (lines and
        columns for the toric kinds).
    """
    if kind in ("cluster1d", "aklt_variant", "aklt_original", "dihedral"):
        n = int(size)
        if kind == "cluster1d":
            amps = graph_state(n, [(i, i + 1, np.pi) for i in range(n - 1)])
            return DenseState((2,) * n, amps)
        res = build_1d_resource(kind, m=m)
        return DenseState((res.d,) * n, _chain_by_enumeration(res, n))
    if kind not in KINDS_2D:
        raise ValueError(f"unknown kind {kind!r}")
    rows, cols = size
    n = rows * cols
    if kind in ("cluster2d", "rerouting"):
        if kind == "cluster2d":
            edges = _square_edges(rows, cols, lambda r: np.pi)
        else:
            # edge from a B-row site (odd row) up to the A row above carries π/2
            edges = _square_edges(rows, cols, lambda r: np.pi / 2 if r % 2 == 1 else np.pi)
        local = None
        if ket1_boundaries:
            local = {}
            for r in range(rows):
                for c in range(cols):
                    k = (c == cols - 1) + (r == 0)
                    if k:
                        local[r * cols + c] = [gates.Z] * k
        return DenseState((2,) * n, graph_state(n, edges, local))
    if kind == "weighted_graph":
        idx = lambda r, c: r * cols + c  # noqa: E731
        edges = []
        for r in range(rows):
            for c in range(cols):
                if c + 1 < cols:
                    edges.append((idx(r, c), idx(r, c + 1), np.pi))
                if r + 1 < rows and c + 1 < cols:
                    edges.append((idx(r + 1, c), idx(r, c + 1), np.pi / 2))
                if r + 1 < rows and c > 0:
                    edges.append((idx(r + 1, c), idx(r, c - 1), np.pi / 2))
        return DenseState((2,) * n, graph_state(n, edges))
    if kind == "aklt2d":
        _check_cap([3] * n)
        row = _chain_by_enumeration(build_1d_resource("aklt_variant"), cols).reshape([3] * cols)
        psi = np.ones((), dtype=complex)
        for _ in range(rows):
            psi = np.multiply.outer(psi, row)
        coupling = np.ones((3, 3), dtype=complex)
        coupling[2, 2] = -1.0  # exp(iπ |2⟩⟨2| ⊗ |2⟩⟨2|)
        for r in range(rows - 1):
            for c in range(cols):
                psi = _apply_two_site_diag(psi, r * cols + c, (r + 1) * cols + c, coupling)
        return DenseState((3,) * n, psi.reshape(-1))
    if kind.startswith("toric"):
        res = build_2d_resource(kind, rows, cols)
        return assemble_state(res)
    raise ValueError(f"unknown kind {kind!r}")


# --------------------------------------------------------------------------
# one-shot network assembly
# --------------------------------------------------------------------------
def _network_operands(res: PepsResource, sites, open_legs=(), closures=None, phys=None):
    """Operands and integer sublists for a single ``np.einsum`` call."""
    sites = [tuple(s) for s in sites]
    inside = set(sites)
    closures = dict(closures or {})
    bond_id = {}
    for a, b in res.geometry.bonds:
        if a[0] in inside and b[0] in inside:
            key = len(bond_id) // 2
            bond_id[(a[0][0], a[0][1], a[1])] = key
            bond_id[(b[0][0], b[0][1], b[1])] = key
    next_label = [len(bond_id) // 2]

    def fresh():
        next_label[0] += 1
        return next_label[0] - 1

    operands, phys_labels, open_labels = [], [], {}
    for site in sites:
        cls = res.site_class(site)
        t = cls.stacked()
        labels = [fresh()]
        if phys is not None:
            t = np.tensordot(np.asarray(phys[site]).conj(), t, axes=(0, 0))
            labels = []
        else:
            phys_labels.append(labels[0])
        closed = []
        for leg in cls.legs:
            key = (site[0], site[1], leg)
            if key in open_legs:
                lab = fresh()
                open_labels[key] = lab
                labels.append(lab)
                continue
            if key in bond_id:
                labels.append(bond_id[key])
                continue
            vec = closures.get(key)
            if vec is None:
                vec = res.geometry.boundary.get(key, cls.closure[leg])
            if vec is None:
                raise ValueError(f"leg {key} has no closure")
            vec = np.asarray(vec, dtype=complex)
            closed.append((len(labels), vec if cls.roles[leg] == "in" else vec.conj()))
            labels.append(None)
        # boundary vectors are absorbed right away to keep the index count low
        for axis, vec in reversed(closed):
            t = np.tensordot(t, vec, axes=([axis], [0]))
            del labels[axis]
        operands += [t, labels]
    if next_label[0] > 52:
        raise OracleCapError("network has too many indices for a single einsum")
    return operands, phys_labels, open_labels


def assemble_state(res: PepsResource) -> DenseState:
    """All site tensors contracted in one ``einsum``; sites row-major."""
    sites = res.geometry.sites
    dims = tuple(res.phys_dims())
    _check_cap(dims)
    if any(v is None for v in res.geometry.boundary.values()):
        raise ValueError("assemble_state needs every boundary leg closed")
    operands, phys_labels, _ = _network_operands(res, sites)
    amps = np.einsum(*operands, phys_labels, optimize="greedy")
    return DenseState(dims, amps.reshape(-1))


def induced_operator(
    res: PepsResource | MpsResource,
    fragment,
    through_in: Sequence = (),
    through_out: Sequence = (),
) -> np.ndarray:
    """Post-selected correlation map of a measured fragment.

    For a 2-D resource ``fragment`` is a sequence of ``(site, basis, outcome)``
    with ``basis`` a :class:`LocalBasis` or label; computational basis
    states are injected on every through leg and the fragment network is
    contracted for each pair. For a 1-D resource ``fragment`` is a list of
    ``(basis, outcome)`` applied to consecutive sites and the through legs
    are the two ends of the chain.

    Raises
    ------
    ZeroProbabilityError
        If the resulting map vanishes.
    """
    if isinstance(res, MpsResource):
        D = res.D
        M = np.zeros((D, D), dtype=complex)
        for k in range(D):
            for j in range(D):
                amp = 0.0 + 0j
                vecs = [_as_basis(b, res.d).vectors[o] for b, o in fragment]
                for s in itertools.product(range(res.d), repeat=len(vecs)):
                    w = np.prod([vecs[i][x].conj() for i, x in enumerate(s)])
                    if w == 0:
                        continue
                    v = np.eye(D, dtype=complex)[k]
                    for x in s:
                        v = res.matrices[x] @ v
                    amp += w * v[j]
                M[j, k] = amp
        if np.max(np.abs(M)) <= ZERO_PROB:
            raise ZeroProbabilityError("fragment map vanishes")
        return M
    sites = [tuple(s) for s, _, _ in fragment]
    phys = {}
    for s, b, o in fragment:
        phys[tuple(s)] = _as_basis(b, res.site_class(s).phys_dim).vectors[int(o)]
    through_in = [tuple(x) for x in through_in]
    through_out = [tuple(x) for x in through_out]
    M = np.zeros((2 ** len(through_out), 2 ** len(through_in)), dtype=complex)
    for k, ins in enumerate(itertools.product(range(2), repeat=len(through_in))):
        for j, outs in enumerate(itertools.product(range(2), repeat=len(through_out))):
            closures = {}
            for leg, x in zip(through_in, ins):
                closures[leg] = np.eye(2, dtype=complex)[x]
            for leg, x in zip(through_out, outs):
                closures[leg] = np.eye(2, dtype=complex)[x]
            operands, _, _ = _network_operands(res, sites, (), _fragment_closures(
                res, sites, closures), phys)
            M[j, k] = np.einsum(*operands, [], optimize="greedy")
    if np.max(np.abs(M)) <= ZERO_PROB:
        raise ZeroProbabilityError("fragment map vanishes")
    return M


def _fragment_closures(res: PepsResource, sites, explicit):
    """Close legs bonded to sites outside the fragment with class defaults."""
    inside = set(sites)
    out = dict(explicit)
    for a, b in res.geometry.bonds:
        for (s, leg), (t, _) in ((a, b), (b, a)):
            if s in inside and t not in inside:
                key = (s[0], s[1], leg)
                out.setdefault(key, res.site_class(s).closure[leg])
    return out


def _as_basis(b, d) -> LocalBasis:
    return b if isinstance(b, LocalBasis) else basis_from_label(b, d)


def normalized_overlap(a: np.ndarray, b: np.ndarray) -> float:
    """|⟨a|b⟩| / (|a||b|); 1 means equal up to a global scalar."""
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    return float(abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)))


def max_relative_deviation(a: np.ndarray, b: np.ndarray) -> float:
    """Largest entrywise deviation after fitting one global complex scalar.

    Measured relative to the largest magnitude of ``a``.
    """
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    denom = np.vdot(b, b)
    if denom == 0:
        return float("inf") if np.any(a) else 0.0
    c = np.vdot(b, a) / denom
    return float(np.max(np.abs(a - c * b)) / np.max(np.abs(a)))

