import numpy as np
import pytest

from ctn_mbqc import gates
from ctn_mbqc.mps import LocalBasis, build_1d_resource, chain_vector, project_site
from ctn_mbqc.oracle import (DenseState, OracleCapError, ZeroProbabilityError, build_direct,
                             graph_state, induced_operator, joint_distribution,
                             max_relative_deviation, measure, normalized_overlap)
from ctn_mbqc.peps import build_2d_resource
from ctn_mbqc.tensor import proportional

ONE_D = [("cluster1d", None), ("aklt_variant", None), ("aklt_original", None),
         ("dihedral", 2), ("dihedral", 3), ("dihedral", 5)]


class TestGraphStates:
    def test_two_qubit_cluster(self):
        psi = graph_state(2, [(0, 1, np.pi)])
        assert np.allclose(psi, np.array([1, 1, 1, -1]) / 2)

    def test_controlled_s_edge(self):
        psi = graph_state(2, [(0, 1, np.pi / 2)])
        assert np.allclose(psi, np.array([1, 1, 1, 1j]) / 2)

    def test_local_gates_applied_after(self):
        psi = graph_state(1, [], {0: [gates.H]})
        assert np.allclose(psi, [1, 0])

    def test_cap(self):
        with pytest.raises(OracleCapError):
            graph_state(21, [])


class TestDenseState:
    def test_normalizes(self):
        st = DenseState((2,), [3, 4])
        assert np.allclose(st.amplitudes, [0.6, 0.8])

    def test_zero_state(self):
        with pytest.raises(ZeroProbabilityError):
            DenseState((2,), [0, 0])

    def test_probabilities_and_collapse(self):
        st = DenseState((2, 2), graph_state(2, [(0, 1, np.pi)]))
        assert np.allclose(st.probabilities(0, LocalBasis.computational()), [0.5, 0.5])
        post = st.collapse(0, LocalBasis.computational(), 1)
        # qubit 1 is left in |->
        assert np.allclose(post.tensor()[1], gates.KET_MINUS)

    def test_zero_probability_branch(self):
        st = DenseState((2,), [1, 0])
        with pytest.raises(ZeroProbabilityError):
            st.collapse(0, LocalBasis.computational(), 1)

    def test_measure_reproducible(self):
        st = DenseState((2, 2), graph_state(2, [(0, 1, np.pi)]))
        assert measure(st, 0, LocalBasis.x(), seed=4)[0] == measure(st, 0, LocalBasis.x(), seed=4)[0]

    def test_joint_distribution_traces_others(self):
        st = DenseState((2, 2, 2), graph_state(3, [(0, 1, np.pi), (1, 2, np.pi)]))
        d = joint_distribution(st, {0: LocalBasis.computational(), 2: LocalBasis.computational()})
        assert sum(d.values()) == pytest.approx(1.0)
        assert d[(0, 1)] == pytest.approx(0.25)

    def test_binary_round_trip(self, tmp_path):
        st = DenseState((2, 3), np.arange(6) + 1j)
        path = tmp_path / "amps.bin"
        st.export_binary(path)
        back = DenseState.import_binary(path, (2, 3))
        assert np.array_equal(back.amplitudes, st.amplitudes)
        assert path.stat().st_size == 6 * 16


class TestDirectConstruction:
    @pytest.mark.parametrize("kind,m", ONE_D)
    def test_chain_agrees_with_mps(self, kind, m):
        res = build_1d_resource(kind, m=m)
        for n in range(1, 7):
            dev = max_relative_deviation(chain_vector(res, n), build_direct(kind, n, m=m).amplitudes)
            assert dev < 1e-9

    def test_cluster_chain_is_graph_state(self):
        st = build_direct("cluster1d", 3)
        assert normalized_overlap(st.amplitudes, graph_state(3, [(0, 1, np.pi), (1, 2, np.pi)])) \
            == pytest.approx(1.0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            build_direct("spin-3/2", 3)

    def test_aklt2d_cap(self):
        with pytest.raises(OracleCapError):
            build_direct("aklt2d", (4, 4))


class TestInducedOperator:
    def test_chain_fragment_is_product(self):
        res = build_1d_resource("aklt_variant")
        basis = LocalBasis.aklt_transport()
        frag = [(basis, 1), (basis, 0), ("T3", 2)]
        want = (project_site(res, basis.vectors[2]) @ project_site(res, basis.vectors[0])
                @ project_site(res, basis.vectors[1]))
        assert np.allclose(induced_operator(res, frag), want)

    def test_cluster_chain_x_outcomes(self):
        res = build_1d_resource("cluster1d")
        M = induced_operator(res, [("X", 1), ("X", 0)])
        assert proportional(M, gates.H @ gates.H @ gates.Z)

    def test_2d_fragment(self):
        res = build_2d_resource("cluster2d", 3, 1)
        frag = [((0, 0), "Z", 0), ((1, 0), "X", 1), ((2, 0), "Z", 0)]
        M = induced_operator(res, frag, [(1, 0, "l")], [(1, 0, "r")])
        assert proportional(M, gates.H @ gates.Z)

    def test_vanishing_fragment(self):
        res = build_1d_resource("aklt_variant")
        with pytest.raises(ZeroProbabilityError):
            induced_operator(res, [(LocalBasis.computational(3), 1), (LocalBasis.computational(3), 1)])


class TestComparisons:
    def test_overlap_ignores_scalar(self):
        a = np.array([1, 2j, 3])
        assert normalized_overlap(a, -5j * a) == pytest.approx(1.0)

    def test_relative_deviation(self):
        a = np.array([1.0, 2.0])
        assert max_relative_deviation(a, 3j * a) < 1e-15
        assert max_relative_deviation(a, np.array([1.0, -2.0])) > 0.5
        assert max_relative_deviation(a, np.zeros(2)) == float("inf")
