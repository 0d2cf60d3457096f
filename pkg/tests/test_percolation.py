import dataclasses

import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ctn_mbqc._kernels import _fallback, bfs_path, label_components
from ctn_mbqc.percolation import (CurvePoint, check_certificate, curve_csv, renormalize, sample,
                                  spans, success_curve, wilson_interval)


def _same_partition(a, b):
    pairs = set(zip(a.tolist(), b.tolist()))
    return len(pairs) == len(set(a.tolist())) == len(set(b.tolist()))


class TestLattice:
    def test_shapes(self):
        lat = sample(3, 4, 6, 0.5, seed=0)
        assert lat.shape == (4, 4, 6)
        assert [b.shape for b in lat.bits] == [(3, 4, 6), (4, 3, 6), (4, 4, 5)]
        assert lat.num_sites == 96

    def test_reproducible(self):
        a, b = sample(2, 10, None, 0.4, seed=3), sample(2, 10, None, 0.4, seed=3)
        assert all(np.array_equal(x, y) for x, y in zip(a.bits, b.bits))

    def test_full_and_empty(self):
        full = sample(2, 5, None, 1.0, seed=0)
        assert full.num_edges == 2 * 5 * 4
        assert len(full.edges()[0]) == 40
        assert len(sample(2, 5, None, 0.0, seed=0).edges()[0]) == 0

    def test_has_edge(self):
        full = sample(2, 3, None, 1.0)
        assert full.has_edge(0, 1)
        assert full.has_edge(4, 1)
        assert not full.has_edge(0, 4)
        assert not full.has_edge(2, 3)

    def test_adjacency_sorted(self):
        indptr, idx = sample(2, 4, None, 1.0).adjacency()
        assert list(idx[indptr[5]:indptr[6]]) == [1, 4, 6, 9]

    @pytest.mark.parametrize("kw", [dict(dim=4, n=3, t=None, p=0.5), dict(dim=2, n=3, t=None, p=1.5),
                                    dict(dim=2, n=0, t=None, p=0.5)])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            sample(**kw)


class TestKernels:
    @pytest.mark.parametrize("seed", range(4))
    def test_components_match_scipy(self, seed):
        lat = sample(3, 6, None, 0.3, seed=seed)
        u, v = lat.edges()
        g = coo_matrix((np.ones(len(u)), (u, v)), shape=(lat.num_sites,) * 2)
        _, ref = connected_components(g, directed=False)
        assert _same_partition(label_components(lat.num_sites, u, v), ref)
        assert np.array_equal(label_components(lat.num_sites, u, v),
                              _fallback.label_components(lat.num_sites, u, v))

    def test_bfs_path_shortest(self):
        lat = sample(2, 5, None, 1.0)
        indptr, idx = lat.adjacency()
        allowed = np.ones(25, dtype=bool)
        path = bfs_path(indptr, idx, 0, 24, allowed)
        assert len(path) == 9
        assert np.array_equal(path, _fallback.bfs_path(indptr, idx, 0, 24, allowed))

    def test_bfs_respects_allowed(self):
        lat = sample(2, 3, None, 1.0)
        indptr, idx = lat.adjacency()
        allowed = np.ones(9, dtype=bool)
        allowed[[1, 4, 7]] = False
        assert bfs_path(indptr, idx, 0, 2, allowed).size == 0


class TestSpanning:
    def test_extremes(self):
        assert spans(sample(3, 5, None, 1.0))
        assert not spans(sample(3, 5, None, 0.0))

    def test_straight_line(self):
        lat = sample(2, 4, None, 0.0)
        bits = [b.copy() for b in lat.bits]
        bits[0][:, 2] = True  # column 2 fully open along axis 0
        lat = dataclasses.replace(lat, bits=tuple(bits))
        assert spans(lat, axis=0)
        assert not spans(lat, axis=1)


class TestRenormalization:
    def test_full_lattice_certificate(self):
        lat = sample(2, 10, None, 1.0, seed=0)
        cert = renormalize(lat, b=5)
        assert cert is not None
        ok, problems = check_certificate(lat, cert)
        assert ok, problems
        assert cert.m == 2
        assert len(cert.paths) == 4

    def test_empty_lattice(self):
        assert renormalize(sample(2, 10, None, 0.0, seed=0), b=5) is None

    def test_checker_catches_missing_bond(self):
        lat = sample(2, 10, None, 1.0, seed=0)
        cert = renormalize(lat, b=5)
        bits = [b.copy() for b in lat.bits]
        key = next(iter(cert.paths))
        x, y = cert.paths[key][:2]
        (rx, cx), (ry, cy) = divmod(int(x), 10), divmod(int(y), 10)
        axis = 0 if cx == cy else 1
        bits[axis][min(rx, ry), min(cx, cy)] = False
        broken = dataclasses.replace(lat, bits=tuple(bits))
        ok, problems = check_certificate(broken, cert)
        assert not ok
        assert any("missing bond" in p for p in problems)

    def test_checker_catches_wrong_flag(self):
        lat = sample(2, 10, None, 1.0, seed=0)
        cert = renormalize(lat, b=5)
        bad = dataclasses.replace(cert, all_disjoint=not cert.all_disjoint)
        assert not check_certificate(lat, bad)[0]

    def test_certificate_dict(self):
        cert = renormalize(sample(2, 10, None, 1.0, seed=0), b=5)
        d = cert.to_dict()
        assert d["b"] == 5 and len(d["paths"]) == 4

    def test_confine_option(self):
        with pytest.raises(ValueError):
            renormalize(sample(2, 10, None, 1.0), confine="box")


class TestCurves:
    def test_wilson_reference_values(self):
        lo, hi = wilson_interval(5, 10)
        assert (lo, hi) == pytest.approx((0.2366, 0.7634), abs=1e-4)
        assert wilson_interval(0, 20)[0] == pytest.approx(0.0, abs=1e-15)

    def test_wilson_validation(self):
        with pytest.raises(ValueError):
            wilson_interval(0, 0)

    def test_curve_reproducible(self):
        a = success_curve(2, 20, [0.5, 0.7], 10, seed=4)
        b = success_curve(2, 20, [0.5, 0.7], 10, seed=4)
        assert a == b
        assert all(pt.certificate_failures == 0 for pt in a)

    def test_curve_monotone_in_p(self):
        pts = success_curve(3, 8, [0.1, 0.5], 30, seed=1)
        assert pts[0].successes <= pts[1].successes
        assert pts[1].fraction == 1.0

    def test_csv(self):
        text = curve_csv([CurvePoint(0.5, 10, 5, 0.2366, 0.7634)])
        assert text == "p,trials,successes,ci_low,ci_high\n0.5,10,5,0.236600,0.763400\n"
