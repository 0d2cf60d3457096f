import numpy as np
import pytest

from ctn_mbqc.analysis import (binary_entropy, cluster_depolarizes, correlation_report,
                               diluted_bounds, diluted_chain, dihedral_decay_rate, encoder,
                               entropy_bound, gamma_map, intersection_dimension,
                               local_projector, markov_closed_form, parent_hamiltonian,
                               parent_support, permutation_invariant, ring_state,
                               transfer_channel, w_state, zz_correlation)
from ctn_mbqc.mps import build_1d_resource
from ctn_mbqc.oracle import build_direct


def dense_zz(m, i, k, n):
    """Connected correlator from the brute-force chain state (sites 1..n)."""
    p = np.abs(build_direct("dihedral", n, m=m).tensor()) ** 2
    z = np.array([1.0, -1.0])

    def ev(sites):
        q = p
        for s in sorted(sites, reverse=True):
            q = np.moveaxis(q, s - 1, -1) @ z
        return float(q.sum())

    return ev([i, i + k]) - ev([i]) * ev([i + k])


class TestTransferChannel:
    @pytest.mark.parametrize("kind", ["cluster1d", "aklt_variant", "aklt_original"])
    def test_completely_positive(self, kind):
        assert transfer_channel(build_1d_resource(kind)).is_completely_positive()

    def test_cluster_two_steps_depolarize(self):
        assert cluster_depolarizes()


class TestDihedralCorrelations:
    @pytest.mark.parametrize("m", [3, 5, 6])
    def test_matches_dense_state(self, m):
        res = build_1d_resource("dihedral", m=m)
        for k in (1, 2, 3):
            assert zz_correlation(res, 4, k, 10) == pytest.approx(dense_zz(m, 4, k, 10), abs=1e-12)

    @pytest.mark.parametrize("m", [3, 5, 6])
    def test_ratio_is_cos_two_pi_over_m(self, m):
        rows = correlation_report(m, 4, 12)["rows"]
        for row in rows[1:]:
            assert row["ratio"] == pytest.approx(np.cos(2 * np.pi / m), abs=1e-9)

    def test_m3_ratio_value(self):
        assert dihedral_decay_rate(3) == pytest.approx(-0.5)
        assert correlation_report(3, 4, 12)["xi_target"] == pytest.approx(0.5)

    def test_m4_vanishes(self):
        res = build_1d_resource("dihedral", m=4)
        for k in range(2, 5):
            assert abs(zz_correlation(res, 3, k, 12)) < 1e-10

    def test_closed_form(self):
        assert markov_closed_form(4, 3) == pytest.approx(0.0)
        assert markov_closed_form(3, 2) == pytest.approx(0.5)

    def test_index_validation(self):
        with pytest.raises(ValueError):
            zz_correlation(build_1d_resource("dihedral", m=3), 5, 3, 6)


class TestParentHamiltonian:
    def test_projector(self):
        h = local_projector()
        assert np.allclose(h, h @ h)
        assert np.allclose(h, h.conj().T)
        assert np.linalg.matrix_rank(parent_support()) == 5

    @pytest.mark.parametrize("N", [4, 6])
    def test_ring_state_is_unique_ground_state(self, N):
        _, r = parent_hamiltonian(N)
        assert abs(r["state_energy"]) < 1e-10
        assert abs(r["ground_energy"]) < 1e-10
        assert r["degeneracy"] == 1
        assert r["gap"] > 1e-3
        assert r["ground_state_overlap"] == pytest.approx(1.0)
        assert max(abs(t) for t in r["term_energies"]) < 1e-10

    def test_gamma2_rank(self):
        res = build_1d_resource("aklt_variant")
        G2 = gamma_map(res, 2)
        assert G2.shape == (9, 4)
        assert np.linalg.matrix_rank(G2, tol=1e-10) == 4
        assert intersection_dimension(G2, 3) == 4

    def test_ring_state_normalized(self):
        psi = ring_state(build_1d_resource("aklt_variant"), 4)
        assert np.linalg.norm(psi) == pytest.approx(1.0)

    def test_other_weights_break_zero_energy(self):
        # uniform transport outcomes need A[0] = H/2, which leaves the kernel
        _, r = parent_hamiltonian(4, build_1d_resource("aklt_variant", zero_weight=0.5))
        assert r["state_energy"] > 0.5

    def test_size_limits(self):
        with pytest.raises(ValueError):
            parent_hamiltonian(3)


class TestDilutedCluster:
    def test_w_state(self):
        v = w_state(3)
        assert np.count_nonzero(v) == 3
        assert np.linalg.norm(v) == pytest.approx(1.0)

    def test_encoder_isometry(self):
        V = encoder(4)
        assert np.allclose(V.conj().T @ V, np.eye(2))

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_p1_exact(self, k):
        r = diluted_bounds(200, k)
        assert abs(r["p1"] - 1 / (2 * k)) < 1e-12
        assert r["p1_below_1_over_k"]
        assert r["entropy_within_bound"]

    @pytest.mark.parametrize("k", [2, 3])
    def test_p1_by_counting(self, k):
        # a site reads 1 only when its block is logical 1 (prob 1/2) and the W weight sits there (1/k)
        psi = diluted_chain(2, k)
        p = np.abs(psi.reshape([2] * (2 * k))) ** 2
        assert p[1].sum() == pytest.approx(1 / (2 * k), abs=1e-12)

    def test_bound_monotone(self):
        vals = [entropy_bound(k) for k in range(1, 200)]
        assert all(a > b for a, b in zip(vals[1:], vals[2:]))

    def test_bound_at_k100(self):
        assert entropy_bound(100) == pytest.approx(0.0634, abs=1e-4)
        assert binary_entropy(3 / 402) == entropy_bound(100)

    def test_binary_entropy(self):
        assert binary_entropy(0.5) == 1.0
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(0.11) == pytest.approx(0.4999, abs=1e-3)

    def test_permutation_invariant(self):
        assert permutation_invariant(5, seed=0)

    def test_amplitude_cap(self):
        with pytest.raises(ValueError):
            diluted_chain(3, 8)
