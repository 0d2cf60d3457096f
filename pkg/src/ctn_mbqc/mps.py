"""One-dimensional resources as translation-invariant matrix product states.

Conventions
-----------
Each site carries a set of ``D x D`` matrices ``A[s]`` acting on the
correlation space from left to right. The amplitude of an outcome string is
``⟨R| A[s_n] ... A[s_1] |L⟩``; a right boundary of ``None`` means the right
virtual leg is left open (traced), which models a chain that continues far
beyond the region being measured.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from . import gates
from .tensor import DEFAULT_TOL

KINDS_1D = ("cluster1d", "aklt_variant", "aklt_original", "dihedral")

# Weight of A[0] relative to the normalized Hadamard in the AKLT variant.
# sqrt(2) reproduces the ±1-entry Hadamard, for which the two-site support
# of the chain matches the listed parent-Hamiltonian null vectors.
AKLT_ZERO_WEIGHT = np.sqrt(2.0)
AKLT_FLIP_WEIGHT = gates.SQ2


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MpsResource:
    """Site matrices plus boundary vectors of a 1-D resource.

    Parameters
    ----------
    name : str
        Catalog name.
    matrices : sequence of (D, D) arrays
        ``A[s]`` for ``s = 0 .. d-1``.
    left : (D,) array
        Left boundary ``|L⟩``.
    right : (D,) array or None
        Right boundary ``|R⟩``; ``None`` leaves the right virtual leg open.
    """

    name: str
    matrices: tuple
    left: np.ndarray
    right: np.ndarray | None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        mats = tuple(_frozen(m) for m in self.matrices)
        if not mats:
            raise ValueError("need at least one site matrix")
        D = mats[0].shape[0]
        if any(m.shape != (D, D) for m in mats):
            raise ValueError("all site matrices must be D x D")
        left = _frozen(np.asarray(self.left).reshape(-1))
        if left.shape != (D,):
            raise ValueError("left boundary must have D entries")
        right = None
        if self.right is not None:
            right = _frozen(np.asarray(self.right).reshape(-1))
            if right.shape != (D,):
                raise ValueError("right boundary must have D entries")
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        for n in range(1, 9):
            if chain_norm_sq(self, n) <= 1e-14:
                raise ValueError(f"resource {self.name} has a vanishing {n}-site state")

    @property
    def d(self) -> int:
        return len(self.matrices)

    @property
    def D(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def stacked(self) -> np.ndarray:
        """Array ``T[s, out, in]`` of all site matrices."""
        return np.stack(self.matrices)

    def with_open_right(self) -> "MpsResource":
        """Same chain with the right virtual leg left open."""
        return MpsResource(self.name, self.matrices, self.left, None, dict(self.params))

    def right_projector(self) -> np.ndarray:
        if self.right is None:
            return np.eye(self.D, dtype=complex)
        return np.outer(self.right, self.right.conj())


@dataclass(frozen=True)
class LocalBasis:
    """Orthonormal measurement basis; ``vectors[i]`` is the i-th eigenvector."""

    label: str
    vectors: tuple

    def __post_init__(self):
        vecs = tuple(_frozen(np.asarray(v).reshape(-1)) for v in self.vectors)
        gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
        if gram.shape[0] != vecs[0].size or not np.allclose(
            gram, np.eye(len(vecs)), atol=1e-12
        ):
            raise ValueError(f"basis {self.label!r} is not orthonormal and complete")
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def matrix(self) -> np.ndarray:
        """Columns are the basis vectors."""
        return np.stack(self.vectors, axis=1)

    # constructors -----------------------------------------------------
    @staticmethod
    def computational(d: int = 2) -> "LocalBasis":
        return LocalBasis("Z", tuple(np.eye(d, dtype=complex)))

    @staticmethod
    def x() -> "LocalBasis":
        return LocalBasis("X", (gates.KET_PLUS, gates.KET_MINUS))

    @staticmethod
    def y() -> "LocalBasis":
        return LocalBasis("Y", (gates.KET_I, gates.KET_MINUS_I))

    @staticmethod
    def equatorial(phi: float) -> "LocalBasis":
        return LocalBasis(f"EQ({phi:.12g})", gates.equatorial(phi))

    @staticmethod
    def yz(phi: float) -> "LocalBasis":
        return LocalBasis(f"YZ({phi:.12g})", gates.yz_plane(phi))

    @staticmethod
    def aklt_transport() -> "LocalBasis":
        """{|0⟩, (|1⟩+|2⟩)/√2, (|1⟩−|2⟩)/√2} on a spin-1 site."""
        s = gates.SQ2
        return LocalBasis(
            "T3",
            (
                np.array([1, 0, 0], dtype=complex),
                np.array([0, s, s], dtype=complex),
                np.array([0, s, -s], dtype=complex),
            ),
        )

    @staticmethod
    def aklt_phase(phi: float) -> "LocalBasis":
        """{|0⟩, (|1⟩ ± e^{iφ}|2⟩)/√2} on a spin-1 site."""
        s, e = gates.SQ2, np.exp(1j * phi)
        return LocalBasis(
            f"P3({phi:.12g})",
            (
                np.array([1, 0, 0], dtype=complex),
                np.array([0, s, s * e], dtype=complex),
                np.array([0, s, -s * e], dtype=complex),
            ),
        )


@dataclass
class CorrelationState:
    """State of the correlation system plus the by-product ledger.

    ``value`` is either a column (pure correlation state) or a square
    operator (accumulated map).
    """

    value: np.ndarray
    ledger: list = field(default_factory=list)

    @property
    def is_pure(self) -> bool:
        return np.asarray(self.value).ndim == 1

    def normalized(self) -> np.ndarray:
        v = np.asarray(self.value)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("zero correlation state")
        return v / n


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------
def dihedral_generator(m: int) -> np.ndarray:
    """G = exp(iπ/m X)."""
    return expm(1j * np.pi / m * gates.X)


def build_1d_resource(kind: str, m: int | None = None, **params) -> MpsResource:
    """Build a catalog resource.

    Parameters
    ----------
    kind : {"cluster1d", "aklt_variant", "aklt_original", "dihedral"}
    m : int, optional
        Order parameter of the dihedral chain (``m >= 2``).
    zero_weight, flip_weight : float, optional
        AKLT variants only: scale of ``A[0]`` relative to the normalized
        Hadamard (or Z) and of the two spin-flip matrices.
    """
    if kind == "cluster1d":
        mats = (np.outer(gates.KET_PLUS, gates.KET0), np.outer(gates.KET_MINUS, gates.KET1))
        return MpsResource("cluster1d", mats, gates.KET_PLUS, gates.KET0)
    if kind in ("aklt_variant", "aklt_original"):
        alpha = float(params.get("zero_weight", AKLT_ZERO_WEIGHT))
        beta = float(params.get("flip_weight", AKLT_FLIP_WEIGHT))
        a0 = alpha * (gates.H if kind == "aklt_variant" else gates.Z)
        a1 = beta * np.outer(gates.KET0, gates.KET1)
        a2 = beta * np.outer(gates.KET1, gates.KET0)
        name = "aklt" if kind == "aklt_variant" else "aklt-orig"
        return MpsResource(
            name, (a0, a1, a2), gates.KET0, gates.KET0,
            {"zero_weight": alpha, "flip_weight": beta},
        )
    if kind == "dihedral":
        if m is None or int(m) < 2:
            raise ValueError("dihedral chain needs m >= 2")
        m = int(m)
        G = dihedral_generator(m)
        mats = tuple(np.outer(e, e) @ G for e in np.eye(2, dtype=complex))
        return MpsResource(
            f"dihedral:{m}", mats, G.conj().T @ gates.KET_PLUS, gates.KET_PLUS, {"m": m}
        )
    raise ValueError(f"unknown 1-D resource kind {kind!r}")


CATALOG_1D = ("cluster1d", "aklt", "aklt-orig", "dihedral:m")


def resource_from_name(name: str) -> MpsResource:
    """Resolve a CLI catalog name such as ``aklt`` or ``dihedral:3``."""
    if name == "cluster1d":
        return build_1d_resource("cluster1d")
    if name == "aklt":
        return build_1d_resource("aklt_variant")
    if name == "aklt-orig":
        return build_1d_resource("aklt_original")
    if name.startswith("dihedral:"):
        try:
            m = int(name.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad dihedral order in {name!r}") from None
        return build_1d_resource("dihedral", m=m)
    raise ValueError(f"unknown 1-D resource {name!r}")


# --------------------------------------------------------------------------
# amplitudes and projections
# --------------------------------------------------------------------------
def amplitude(res: MpsResource, outcomes: Sequence[int]) -> complex:
    """⟨R| A[s_n] ... A[s_1] |L⟩ (unnormalized)."""
    if len(outcomes) == 0:
        raise ValueError("need at least one outcome")
    if res.right is None:
        raise ValueError("open right boundary has no scalar amplitude; use chain_vector")
    v = res.left
    for s in outcomes:
        if not 0 <= int(s) < res.d:
            raise ValueError(f"outcome {s} out of range for d={res.d}")
        v = res.matrices[int(s)] @ v
    return complex(np.vdot(res.right, v))


def chain_vector(res: MpsResource, n: int) -> np.ndarray:
    """All amplitudes of the n-site chain, site 1 most significant.

    With an open right boundary an extra trailing axis of size D holds the
    open virtual index.
    """
    T = res.stacked  # (d, D, D)
    # psi[s1..sk, a]: correlation vector after k sites
    psi = res.left.reshape(1, -1)
    for _ in range(n):
        psi = np.einsum("xa,sba->xsb", psi, T).reshape(-1, res.D)
    if res.right is None:
        return psi.reshape(-1)
    return psi @ res.right.conj()


def chain_norm_sq(res: MpsResource, n: int) -> float:
    rho = np.outer(res.left, res.left.conj())
    for _ in range(n):
        rho = sum(A @ rho @ A.conj().T for A in res.matrices)
    return float(np.real(np.trace(res.right_projector() @ rho)))


def project_site(res: MpsResource, phi) -> np.ndarray:
    """A[φ] = Σ_s ⟨φ|s⟩ A[s]."""
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if phi.size != res.d:
        raise ValueError(f"basis vector has {phi.size} entries, need {res.d}")
    if not np.any(phi):
        raise ValueError("basis vector must be nonzero")
    return np.tensordot(phi.conj(), res.stacked, axes=(0, 0))


def right_environments(res: MpsResource, n: int) -> list[np.ndarray]:
    """``envs[k]`` is the operator weighting the correlation state after k sites."""
    envs = [None] * (n + 1)
    F = res.right_projector()
    envs[n] = F
    for k in range(n - 1, -1, -1):
        F = sum(A.conj().T @ F @ A for A in res.matrices)
        envs[k] = F
    return envs


def sample_chain(
    res: MpsResource,
    bases: Sequence[LocalBasis],
    seed=None,
) -> tuple[list[int], CorrelationState]:
    """Measure every site of an n-site chain in order with exact Born probabilities.

    Returns the outcomes and the correlation state ``A[φ_n]...A[φ_1]|L⟩``.
    """
    rng = np.random.default_rng(seed)
    n = len(bases)
    envs = right_environments(res, n)
    v = res.left.astype(complex)
    outcomes = []
    for k, basis in enumerate(bases):
        if basis.dim != res.d:
            raise ValueError("basis dimension does not match the site")
        cands = [project_site(res, phi) @ v for phi in basis.vectors]
        w = np.array([np.real(np.vdot(c, envs[k + 1] @ c)) for c in cands])
        w = np.clip(w, 0.0, None)
        total = w.sum()
        if total <= 1e-300:
            raise RuntimeError("all outcomes have vanishing probability")
        s = int(rng.choice(len(w), p=w / total))
        outcomes.append(s)
        v = cands[s]
        nv = np.linalg.norm(v)
        if nv == 0:
            raise RuntimeError("sampled a zero-probability branch")
        v = v / nv
    return outcomes, CorrelationState(v)


def outcome_distribution(res: MpsResource, bases: Sequence[LocalBasis]) -> dict:
    """Exact joint distribution of all outcomes for fixed bases (small n)."""
    n = len(bases)
    envs = right_environments(res, n)
    out = {}

    def rec(k, v, prefix):
        if k == n:
            out[tuple(prefix)] = float(np.real(np.vdot(v, envs[n] @ v)))
            return
        for s, phi in enumerate(bases[k].vectors):
            rec(k + 1, project_site(res, phi) @ v, prefix + [s])

    rec(0, res.left.astype(complex), [])
    total = sum(out.values())
    return {k: v / total for k, v in out.items()}


def is_unital(res: MpsResource, tol: float = DEFAULT_TOL) -> bool:
    """True when Σ A[s]†A[s] ∝ 1, i.e. traced future sites act trivially."""
    M = sum(A.conj().T @ A for A in res.matrices)
    return bool(np.allclose(M, M[0, 0] * np.eye(res.D), atol=tol))


def basis_from_label(label: str, d: int = 2) -> LocalBasis:
    """Inverse of the ``LocalBasis`` labels: ``Z``, ``X``, ``Y``, ``EQ(φ)``, ``YZ(φ)``, ``T3``, ``P3(φ)``."""
    label = label.strip()
    if label == "Z":
        return LocalBasis.computational(d)
    if label == "X" and d == 2:
        return LocalBasis.x()
    if label == "Y" and d == 2:
        return LocalBasis.y()
    if label == "T3" and d == 3:
        return LocalBasis.aklt_transport()
    for prefix, ctor, dim in (("EQ(", LocalBasis.equatorial, 2), ("YZ(", LocalBasis.yz, 2),
                              ("P3(", LocalBasis.aklt_phase, 3)):
        if label.startswith(prefix) and label.endswith(")") and d == dim:
            return ctor(float(label[len(prefix):-1]))
    raise ValueError(f"unknown basis label {label!r} for d={d}")
