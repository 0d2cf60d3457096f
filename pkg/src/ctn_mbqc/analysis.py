"""Correlation functions, parent Hamiltonians and diluted-cluster bounds."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, null_space, orth

from . import gates
from .mps import MpsResource, build_1d_resource

# --------------------------------------------------------------------------
# transfer channel and two-point functions
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TransferChannel:
    """Matrix ``E`` with ``vec(Φ(ρ)) = E vec(ρ)`` (row-major vec)."""

    matrix: np.ndarray
    D: int

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return (self.matrix @ np.asarray(rho, dtype=complex).reshape(-1)).reshape(self.D, self.D)

    def choi(self) -> np.ndarray:
        """Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)."""
        D = self.D
        C = np.zeros((D * D, D * D), dtype=complex)
        for i in range(D):
            for j in range(D):
                E = np.zeros((D, D), dtype=complex)
                E[i, j] = 1.0
                C += np.kron(E, self.apply(E))
        return C

    def is_completely_positive(self, tol: float = 1e-10) -> bool:
        w = np.linalg.eigvalsh(self.choi())
        return bool(w.min() >= -tol)


def _site_map(mats, weights=None) -> np.ndarray:
    if weights is None:
        weights = np.ones(len(mats))
    return sum(w * np.kron(A, A.conj()) for w, A in zip(weights, mats))


def transfer_channel(res: MpsResource) -> TransferChannel:
    """Φ(ρ) = Σ_s A[s] ρ A[s]†."""
    return TransferChannel(_site_map(res.matrices), res.D)


def _z_values(d: int) -> np.ndarray:
    if d == 2:
        return np.array([1.0, -1.0])
    # spin-1 sites: S_z eigenvalues
    return np.linspace(1.0, -1.0, d)


def _expectation(res: MpsResource, n: int, weights_at: dict) -> float:
    """⟨R|·⟩ of the chain with site-dependent weighted channels, unnormalized."""
    E = _site_map(res.matrices)
    v = np.outer(res.left, res.left.conj()).reshape(-1)
    for site in range(1, n + 1):
        if site in weights_at:
            v = _site_map(res.matrices, weights_at[site]) @ v
        else:
            v = E @ v
    rho = v.reshape(res.D, res.D)
    return float(np.real(np.trace(res.right_projector() @ rho)))


def zz_correlation(res: MpsResource, i: int, k: int, n: int, normalized: bool = True) -> float:
    """Connected ⟨Z_i Z_{i+k}⟩ − ⟨Z_i⟩⟨Z_{i+k}⟩ on an n-site chain (sites 1..n).

    With ``normalized=False`` the expectation values are taken in the
    unnormalized chain state, i.e. without dividing by its norm.
    """
    if not (1 <= i and k >= 1 and i + k <= n):
        raise ValueError("need 1 <= i < i+k <= n")
    z = _z_values(res.d)
    norm = _expectation(res, n, {}) if normalized else 1.0
    zz = _expectation(res, n, {i: z, i + k: z}) / norm
    zi = _expectation(res, n, {i: z}) / norm
    zj = _expectation(res, n, {i + k: z}) / norm
    return zz - zi * zj


def markov_closed_form(m: int, k: int) -> float:
    """2 (2 sin²(π/m) − 1)^k, the target closed form for the dihedral chain."""
    return 2.0 * (2.0 * np.sin(np.pi / m) ** 2 - 1.0) ** k


def dihedral_decay_rate(m: int) -> float:
    """Rate of the normalized dihedral correlator, cos(2π/m) = 1 − 2 sin²(π/m)."""
    return float(np.cos(2 * np.pi / m))


def markov_stay_probability(res: MpsResource) -> float:
    """Probability that Φ maps |0⟩⟨0| back onto |0⟩⟨0|."""
    rho = np.diag([1.0, 0.0]).astype(complex)
    return float(np.real(transfer_channel(res).apply(rho)[0, 0] / np.trace(
        transfer_channel(res).apply(rho))))


def correlation_report(m: int, kmax: int, n: int, i: int | None = None) -> dict:
    """Normalized and raw correlators of the dihedral chain with their ratios."""
    res = build_1d_resource("dihedral", m=m)
    if i is None:
        i = max(1, (n - kmax) // 2)
    rows = []
    prev = None
    for k in range(1, kmax + 1):
        c = zz_correlation(res, i, k, n)
        raw = zz_correlation(res, i, k, n, normalized=False)
        ratio = None if prev is None or abs(prev) < 1e-14 else c / prev
        rows.append({"k": k, "connected": c, "raw": raw, "ratio": ratio,
                     "closed_form": markov_closed_form(m, k)})
        prev = c
    return {
        "m": m, "n": n, "i": i,
        "xi_target": 2 * np.sin(np.pi / m) ** 2 - 1,
        "xi_measured": dihedral_decay_rate(m),
        "stay_probability": markov_stay_probability(res),
        "rows": rows,
    }


# --------------------------------------------------------------------------
# parent Hamiltonian
# --------------------------------------------------------------------------
def _two_site(a: int, b: int) -> np.ndarray:
    v = np.zeros(9, dtype=complex)
    v[3 * a + b] = 1.0
    return v


def parent_support() -> np.ndarray:
    """The five listed two-site vectors as columns (unnormalized)."""
    q = 1 / np.sqrt(8.0)
    vecs = [
        _two_site(1, 1),
        _two_site(2, 2),
        -0.25 * _two_site(0, 0) + _two_site(1, 2) + _two_site(2, 1),
        -q * _two_site(0, 0) + _two_site(0, 2) + _two_site(2, 0),
        -q * _two_site(0, 0) + _two_site(0, 1) + _two_site(1, 0),
    ]
    return np.stack(vecs, axis=1)


def local_projector() -> np.ndarray:
    """Orthogonal projector onto the span of :func:`parent_support`."""
    Q = orth(parent_support())
    return Q @ Q.conj().T


def ring_hamiltonian(N: int, h: np.ndarray | None = None) -> np.ndarray:
    """Σ_i τ_i(h) on a ring of N spin-1 sites (site 1 most significant)."""
    h = local_projector() if h is None else h
    dim = 3**N
    Hm = np.zeros((dim, dim), dtype=complex)
    h4 = h.reshape(3, 3, 3, 3)
    for i in range(N):
        j = (i + 1) % N
        Hm += _embed_two_site(h4, i, j, N)
    return Hm


def _embed_two_site(h4: np.ndarray, i: int, j: int, N: int) -> np.ndarray:
    dim = 3**N
    eye = np.eye(dim, dtype=complex).reshape([3] * N + [dim])
    # apply h on axes (i, j) of every basis column
    out = np.tensordot(h4, eye, axes=([2, 3], [i, j]))
    out = np.moveaxis(out, [0, 1], [i, j])
    return out.reshape(dim, dim)


def ring_state(res: MpsResource, N: int) -> np.ndarray:
    """Σ tr(A[s_N] ... A[s_1]) |s_1 ... s_N⟩, normalized."""
    psi = np.empty(res.d**N, dtype=complex)
    for k, s in enumerate(itertools.product(range(res.d), repeat=N)):
        M = np.eye(res.D, dtype=complex)
        for x in s:
            M = res.matrices[x] @ M
        psi[k] = np.trace(M)
    return psi / np.linalg.norm(psi)


def gamma_map(res: MpsResource, L: int = 2) -> np.ndarray:
    """Matrix of B ↦ Σ tr(B A[i_1]...A[i_L]) |i_1...i_L⟩ on vec(B)."""
    D = res.D
    cols = []
    for a in range(D):
        for b in range(D):
            B = np.zeros((D, D), dtype=complex)
            B[a, b] = 1.0
            col = []
            for s in itertools.product(range(res.d), repeat=L):
                M = np.eye(D, dtype=complex)
                for x in s:
                    M = M @ res.matrices[x]
                col.append(np.trace(B @ M))
            cols.append(col)
    return np.array(cols).T


def intersection_dimension(G2: np.ndarray, d: int) -> int:
    """dim(G₂⊗1 ∩ 1⊗G₂) inside the three-site space."""
    left = np.kron(orth(G2), np.eye(d))
    right = np.kron(np.eye(d), orth(G2))
    # x ∈ both spans iff left a = right b
    K = null_space(np.hstack([left, -right]))
    if K.size == 0:
        return 0
    return int(np.linalg.matrix_rank(left @ K[: left.shape[1]], tol=1e-9))


def parent_hamiltonian(N: int, res: MpsResource | None = None) -> tuple[np.ndarray, dict]:
    """Ring parent Hamiltonian and a report on its spectrum.

    Raises
    ------
    ValueError
        If ``N`` is outside 4..8.
    """
    if not 4 <= N <= 8:
        raise ValueError("ring size must be between 4 and 8")
    res = build_1d_resource("aklt_variant") if res is None else res
    h = local_projector()
    Hm = ring_hamiltonian(N, h)
    herm_dev = float(np.max(np.abs(Hm - Hm.conj().T)))
    w, V = eigh(Hm)
    psi = ring_state(res, N)
    h4 = h.reshape(3, 3, 3, 3)
    terms = [float(np.real(np.vdot(psi, _embed_two_site(h4, i, (i + 1) % N, N) @ psi)))
             for i in range(N)]
    tol = 1e-9
    degeneracy = int(np.sum(w < w[0] + tol))
    gap = float(w[degeneracy] - w[0]) if degeneracy < len(w) else 0.0
    G2 = gamma_map(res, 2)
    overlap = float(abs(np.vdot(V[:, 0], psi))) if degeneracy == 1 else None
    report = {
        "N": N,
        "ground_energy": float(w[0]),
        "degeneracy": degeneracy,
        "gap": gap,
        "state_energy": float(np.real(np.vdot(psi, Hm @ psi))),
        "term_energies": terms,
        "ground_state_overlap": overlap,
        "hermiticity_deviation": herm_dev,
        "support_rank": int(np.linalg.matrix_rank(parent_support())),
        "gamma2_rank": int(np.linalg.matrix_rank(G2, tol=1e-10)),
        "intersection_dim": intersection_dimension(G2, res.d),
    }
    return Hm, report


# --------------------------------------------------------------------------
# diluted cluster
# --------------------------------------------------------------------------
def w_state(k: int) -> np.ndarray:
    """Equal superposition of all weight-one strings on k qubits."""
    v = np.zeros(2**k, dtype=complex)
    for j in range(k):
        v[1 << (k - 1 - j)] = 1.0
    return v / np.sqrt(k)


def encoder(k: int) -> np.ndarray:
    """V = |0…0⟩⟨0| + |W_k⟩⟨1| as a 2^k × 2 isometry."""
    zero = np.zeros(2**k, dtype=complex)
    zero[0] = 1.0
    return np.stack([zero, w_state(k)], axis=1)


def diluted_chain(n: int, k: int, cap: int = 2**20) -> np.ndarray:
    """Linear cluster of n logical qubits with every qubit encoded into k."""
    if 2 ** (n * k) > cap:
        raise ValueError(f"{n} blocks of {k} qubits exceed the amplitude cap")
    psi = np.ones([2] * n, dtype=complex) / np.sqrt(2.0) ** n
    for a in range(n - 1):
        diag = np.ones((2, 2), dtype=complex)
        diag[1, 1] = -1.0
        shape = [1] * n
        shape[a], shape[a + 1] = 2, 2
        psi = psi * diag.reshape(shape)
    V = encoder(k)
    out = psi
    for a in range(n):
        out = np.tensordot(V, out, axes=(1, a))  # new axis first
        out = np.moveaxis(out, 0, a)
    return out.reshape(-1)


def binary_entropy(p: float) -> float:
    """H_b(p) in bits."""
    p = float(p)
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def entropy_bound(k: int) -> float:
    return binary_entropy(3.0 / (4 * k + 2))


def single_site_state(psi: np.ndarray, site: int, nqubits: int) -> np.ndarray:
    t = np.moveaxis(psi.reshape([2] * nqubits), site, 0).reshape(2, -1)
    return t @ t.conj().T


def diluted_bounds(n: int, k: int, blocks: int = 2, site: int = 0) -> dict:
    """Report on the diluted cluster's single-site statistics and bound values.

    ``n`` enters only the symbolic bound ``2n²/k``; the state itself is a
    chain of ``blocks`` encoded qubits.
    """
    if k < 1:
        raise ValueError("codeword length must be positive")
    psi = diluted_chain(blocks, k)
    rho = single_site_state(psi, site, blocks * k)
    p1 = float(np.real(rho[1, 1]))
    w = np.clip(np.linalg.eigvalsh(rho), 0.0, 1.0)
    vn = float(-sum(x * np.log2(x) for x in w if x > 0))
    shannon = binary_entropy(p1)
    bound = entropy_bound(k)
    return {
        "n": n,
        "k": k,
        "blocks": blocks,
        "p1": p1,
        "p1_closed_form": 1.0 / (2 * k),
        "entropy_z": shannon,
        "entropy_vn": vn,
        "entropy_bound": bound,
        "bound_1_over_k": 1.0 / k,
        "bound_2_over_k": 2.0 / k,
        "bound_2n2_over_k": 2.0 * n * n / k,
        "p1_below_1_over_k": p1 < 1.0 / k,
        "entropy_within_bound": shannon <= bound + 1e-12 and vn <= bound + 1e-12,
    }


def permutation_invariant(k: int, seed=None) -> bool:
    """A random permutation of the block qubits leaves the codewords unchanged."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(k)
    for col in encoder(k).T:
        t = np.transpose(col.reshape([2] * k), perm).reshape(-1)
        if not np.array_equal(t, col):
            return False
    return True


def cluster_depolarizes(tol: float = 1e-12) -> bool:
    """Φ² of the 1-D cluster sends every ρ to tr(ρ)·1/2 (up to the channel scale)."""
    ch = transfer_channel(build_1d_resource("cluster1d"))
    for rho in (np.diag([1, 0]), np.outer(gates.KET_PLUS, gates.KET_PLUS.conj()),
                np.outer(gates.KET_I, gates.KET_I.conj())):
        out = ch.apply(ch.apply(rho))
        out = out / np.trace(out)
        if np.max(np.abs(out - np.eye(2) / 2)) > tol:
            return False
    return True
