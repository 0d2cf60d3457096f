"""Bond percolation on square and cubic lattices.

Two questions are studied by Monte Carlo: whether a 2-D lattice with
missing bonds still contains a coarse grid of connected block centres
(a perfect sublattice), and whether a 3-D slab has an open cluster joining
two opposite faces.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from . import _kernels as kernels

DEFAULT_BLOCK = 5


@dataclass(frozen=True, eq=False)
class BondLattice:
    """Open-boundary lattice with i.i.d. bond occupation.

    ``bits[a]`` holds the bonds along axis ``a``; its shape is the site
    shape with that axis shortened by one. Sites are numbered row-major.
    """

    dim: int
    n: int
    t: int
    p: float
    seed: object
    bits: tuple

    @property
    def shape(self) -> tuple:
        return (self.n, self.n) if self.dim == 2 else (self.n, self.n, self.t)

    @property
    def num_sites(self) -> int:
        return int(np.prod(self.shape))

    @property
    def num_edges(self) -> int:
        return int(sum(b.size for b in self.bits))

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoints ``(u, v)`` of every present bond, axis by axis."""
        idx = np.arange(self.num_sites, dtype=np.int64).reshape(self.shape)
        us, vs = [], []
        for axis, b in enumerate(self.bits):
            lo = [slice(None)] * self.dim
            hi = [slice(None)] * self.dim
            lo[axis] = slice(0, -1)
            hi[axis] = slice(1, None)
            us.append(idx[tuple(lo)][b])
            vs.append(idx[tuple(hi)][b])
        return np.concatenate(us), np.concatenate(vs)

    def has_edge(self, a: int, b: int) -> bool:
        ca = np.unravel_index(a, self.shape)
        cb = np.unravel_index(b, self.shape)
        diff = [int(y) - int(x) for x, y in zip(ca, cb)]
        if sorted(map(abs, diff)) != [0] * (self.dim - 1) + [1]:
            return False
        axis = next(i for i, d in enumerate(diff) if d)
        lo = ca if diff[axis] > 0 else cb
        return bool(self.bits[axis][tuple(int(x) for x in lo)])

    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR arrays of the present bonds with sorted neighbour lists."""
        u, v = self.edges()
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(self.num_sites + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        return np.cumsum(indptr).astype(np.int64), dst.astype(np.int64)


def sample(dim: int, n: int, t: int | None, p: float, seed=None) -> BondLattice:
    """Draw every bond independently with probability ``p``."""
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if n < 1:
        raise ValueError("n must be positive")
    t = n if t is None else int(t)
    shape = (n, n) if dim == 2 else (n, n, t)
    rng = np.random.default_rng(seed)
    bits = []
    for axis in range(dim):
        s = list(shape)
        s[axis] -= 1
        b = rng.random(tuple(s)) < p
        b.setflags(write=False)
        bits.append(b)
    return BondLattice(dim, n, t, float(p), seed, tuple(bits))


# --------------------------------------------------------------------------
# 2-D renormalization
# --------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SublatticeCertificate:
    """Chosen block centres and the open paths joining neighbouring centres.

    Block ``(I, J)`` covers rows ``I*b .. I*b+b-1`` and columns
    ``J*b .. J*b+b-1``; its lower neighbour is ``(I-1, J)`` and its left
    neighbour ``(I, J-1)``.
    """

    b: int
    m: int
    n: int
    centrals: np.ndarray  # (m, m) site indices
    paths: dict = field(default_factory=dict)  # ((I,J),(I2,J2)) -> tuple of sites
    all_disjoint: bool = False

    def to_dict(self) -> dict:
        return {
            "b": self.b, "m": self.m, "n": self.n,
            "centrals": self.centrals.tolist(),
            "paths": [[list(a), list(c), list(map(int, p))] for (a, c), p in
                      sorted(self.paths.items())],
            "all_disjoint": self.all_disjoint,
        }


def _block_sites(n: int, b: int, I: int, J: int) -> list[int]:
    """Sites of a block, nearest to the block centre first (row-major ties)."""
    c = (b - 1) / 2
    sites = [(abs(x - c) + abs(y - c), (I * b + x) * n + J * b + y)
             for x in range(b) for y in range(b)]
    return [s for _, s in sorted(sites)]


def _paths_disjoint(paths: dict) -> bool:
    seen: dict = {}
    for key, path in paths.items():
        for site in path[1:-1]:
            if site in seen:
                return False
            seen[site] = key
    ends = {p[0] for p in paths.values()} | {p[-1] for p in paths.values()}
    return not (ends & set(seen))


def renormalize(lattice: BondLattice, b: int = DEFAULT_BLOCK,
                confine: str = "none") -> SublatticeCertificate | None:
    """Greedy search for a perfect sublattice of block centres.

    Blocks are visited row by row from the bottom-left. Each block takes the
    first candidate (closest to its centre) that reaches the centres of its
    left and lower neighbours by breadth-first search.

    Parameters
    ----------
    confine : {"none", "pair"}
        ``"pair"`` restricts each path to the union of the two blocks it
        joins; ``"none"`` allows any open path in the lattice, in which case
        all candidates are drawn from the largest cluster.

    Returns
    -------
    SublatticeCertificate or None
        ``None`` when some block has no admissible centre.
    """
    if lattice.dim != 2:
        raise ValueError("renormalization is implemented for 2-D lattices only")
    if confine not in ("none", "pair"):
        raise ValueError("confine must be 'none' or 'pair'")
    n = lattice.n
    m = n // b
    if m < 1:
        return None
    indptr, indices = lattice.adjacency()
    everywhere = np.ones(lattice.num_sites, dtype=np.uint8)
    allowed_site = None
    if confine == "none":
        u, v = lattice.edges()
        labels = kernels.label_components(lattice.num_sites, u, v)
        big = int(np.bincount(labels).argmax())
        allowed_site = labels == big
    centrals = np.full((m, m), -1, dtype=np.int64)
    paths: dict = {}

    def region(blocks):
        if confine == "none":
            return everywhere
        mask = np.zeros(lattice.num_sites, dtype=np.uint8)
        for I, J in blocks:
            rows = np.arange(I * b, I * b + b)
            cols = np.arange(J * b, J * b + b)
            mask[(rows[:, None] * n + cols[None, :]).ravel()] = 1
        return mask

    for I in range(m):
        for J in range(m):
            neighbours = [(I, J - 1)] if J > 0 else []
            if I > 0:
                neighbours.append((I - 1, J))
            chosen = None
            for cand in _block_sites(n, b, I, J):
                if allowed_site is not None and not allowed_site[cand]:
                    continue
                found = {}
                for nb in neighbours:
                    path = kernels.bfs_path(indptr, indices, int(centrals[nb]), int(cand),
                                            region([(I, J), nb]))
                    if path.size == 0:
                        break
                    found[(nb, (I, J))] = tuple(int(x) for x in path)
                else:
                    chosen = cand
                    paths.update(found)
                    break
            if chosen is None:
                return None
            centrals[I, J] = chosen
    centrals.setflags(write=False)
    return SublatticeCertificate(b, m, n, centrals, paths, _paths_disjoint(paths))


def check_certificate(lattice: BondLattice, cert: SublatticeCertificate) -> tuple[bool, list]:
    """Independently walk every path of a certificate.

    Checks that centres lie in their blocks, that every neighbouring pair
    has a path between the right centres, that each step uses a present
    bond, and that the disjointness flag is truthful.
    """
    problems = []
    n, b, m = cert.n, cert.b, cert.m
    if m * b > lattice.n or n != lattice.n:
        problems.append("certificate does not fit the lattice")
    for I in range(m):
        for J in range(m):
            r, c = divmod(int(cert.centrals[I, J]), n)
            if not (I * b <= r < I * b + b and J * b <= c < J * b + b):
                problems.append(f"centre of block {(I, J)} outside its block")
    expected = set()
    for I in range(m):
        for J in range(m):
            if J > 0:
                expected.add(((I, J - 1), (I, J)))
            if I > 0:
                expected.add(((I - 1, J), (I, J)))
    if set(cert.paths) != expected:
        problems.append("path set does not match the block adjacency")
    for (a, c), path in cert.paths.items():
        if path[0] != cert.centrals[a] or path[-1] != cert.centrals[c]:
            problems.append(f"path {a}->{c} has wrong endpoints")
        for x, y in zip(path, path[1:]):
            if not lattice.has_edge(int(x), int(y)):
                problems.append(f"path {a}->{c} uses a missing bond {x}-{y}")
                break
    visits: dict = {}
    for path in cert.paths.values():
        for site in path[1:-1]:
            visits[site] = visits.get(site, 0) + 1
    centres = set(int(x) for x in np.ravel(cert.centrals))
    disjoint = all(v == 1 for v in visits.values()) and not (centres & set(visits))
    if disjoint != cert.all_disjoint:
        problems.append("disjointness flag is wrong")
    return not problems, problems


# --------------------------------------------------------------------------
# 3-D spanning
# --------------------------------------------------------------------------
def spans(lattice: BondLattice, axis: int = 0) -> bool:
    """True if one open cluster touches both faces normal to ``axis``."""
    u, v = lattice.edges()
    labels = kernels.label_components(lattice.num_sites, u, v).reshape(lattice.shape)
    lo = np.take(labels, 0, axis=axis)
    hi = np.take(labels, lattice.shape[axis] - 1, axis=axis)
    return bool(np.intersect1d(lo, hi).size)


# --------------------------------------------------------------------------
# curves
# --------------------------------------------------------------------------
def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    z = float(norm.ppf(0.5 + level / 2))
    ph = successes / trials
    denom = 1 + z * z / trials
    centre = (ph + z * z / (2 * trials)) / denom
    half = z * np.sqrt(ph * (1 - ph) / trials + z * z / (4 * trials * trials)) / denom
    return float(max(0.0, centre - half)), float(min(1.0, centre + half))


@dataclass(frozen=True)
class CurvePoint:
    p: float
    trials: int
    successes: int
    ci_low: float
    ci_high: float
    certificate_failures: int = 0

    @property
    def fraction(self) -> float:
        return self.successes / self.trials


def success_curve(dim: int, n: int, p_list, trials: int, seed=None, *, b: int = DEFAULT_BLOCK,
                  t: int | None = None, confine: str = "none") -> list[CurvePoint]:
    """Success fraction per ``p`` with Wilson 95% intervals.

    For ``dim=2`` a trial succeeds when :func:`renormalize` returns a
    certificate (each one is re-checked with :func:`check_certificate`);
    for ``dim=3`` when the slab spans along its first axis.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    root = np.random.SeedSequence(seed)
    p_list = [float(p) for p in p_list]
    children = root.spawn(len(p_list))
    out = []
    for p, child in zip(p_list, children):
        wins = bad = 0
        for s in child.spawn(trials):
            lat = sample(dim, n, t, p, s)
            if dim == 2:
                cert = renormalize(lat, b, confine)
                if cert is not None:
                    wins += 1
                    if not check_certificate(lat, cert)[0]:
                        bad += 1
            else:
                wins += spans(lat)
        lo, hi = wilson_interval(wins, trials)
        out.append(CurvePoint(p, trials, wins, lo, hi, bad))
    return out


def curve_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "trials", "successes", "ci_low", "ci_high"])
    for pt in points:
        w.writerow([f"{pt.p:.6g}", pt.trials, pt.successes, f"{pt.ci_low:.6f}", f"{pt.ci_high:.6f}"])
    return buf.getvalue()
