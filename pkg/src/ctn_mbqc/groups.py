"""Finite groups of unitaries modulo global phase.

These house the by-product operators that measurements leave on the
correlation system, together with the random walk used by the
trial-until-success strategy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _kernels as kernels
from . import gates
from .mps import dihedral_generator

GROUP_TOL = 1e-9
CLOSURE_CAP = 10_000


def canonical(u: np.ndarray, tol: float = GROUP_TOL) -> np.ndarray:
    """Divide by the phase of the first nonzero entry (row-major)."""
    u = np.asarray(u, dtype=complex)
    flat = u.reshape(-1)
    idx = int(np.argmax(np.abs(flat) > tol))
    z = flat[idx]
    return u * (abs(z) / z)


def _key(u: np.ndarray) -> tuple:
    c = canonical(u)
    # round well above the comparison tolerance; collisions resolved by _lookup
    return tuple(np.round(np.concatenate([c.real.ravel(), c.imag.ravel()]), 7) + 0.0)


@dataclass(frozen=True, eq=False)
class ProjectiveGroup:
    """Closure of a generating set under multiplication modulo phase.

    Attributes
    ----------
    name : str
    generators : dict
        Label to unitary.
    elements : tuple of arrays
        Canonical representatives; index 0 is the identity.
    cayley : (n, n) int array
        ``cayley[i, j]`` is the index of ``elements[i] @ elements[j]``.
    inverse : (n,) int array
    """

    name: str
    generators: dict
    elements: tuple
    cayley: np.ndarray
    inverse: np.ndarray
    _index: dict

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, u: np.ndarray, tol: float = GROUP_TOL) -> int:
        """Index of ``u`` mod phase; raises KeyError if absent."""
        u = np.asarray(u, dtype=complex)
        # rescale so that unnormalized multiples of a unitary are accepted
        scale = np.linalg.norm(u) / np.sqrt(u.shape[0])
        if scale == 0:
            raise KeyError("zero matrix is not a group element")
        u = u / scale
        k = _key(u)
        if k in self._index:
            i = self._index[k]
            if _same(self.elements[i], u, tol):
                return i
        for i, e in enumerate(self.elements):
            if _same(e, u, tol):
                return i
        raise KeyError("matrix is not an element of the group")

    def contains(self, u: np.ndarray) -> bool:
        try:
            self.index_of(u)
            return True
        except KeyError:
            return False

    def label_index(self, label: str) -> int:
        if label in self.generators:
            return self.index_of(self.generators[label])
        if label == "I":
            return 0
        raise KeyError(f"unknown group label {label!r}")

    def multiply(self, i: int, j: int) -> int:
        return int(self.cayley[i, j])


def _same(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    return bool(np.max(np.abs(canonical(a) - canonical(b))) <= tol)


def generate_closure(
    generators: Mapping[str, np.ndarray],
    name: str = "group",
    cap: int = CLOSURE_CAP,
    tol: float = 1e-10,
) -> ProjectiveGroup:
    """Enumerate the projective closure of ``generators``.

    Raises
    ------
    ValueError
        If a generator is not unitary or the closure exceeds ``cap``.
    """
    gens = {}
    for label, g in generators.items():
        g = np.asarray(g, dtype=complex)
        if not np.allclose(g.conj().T @ g, np.eye(g.shape[0]), atol=tol):
            raise ValueError(f"generator {label!r} is not unitary")
        gens[label] = g
    dim = next(iter(gens.values())).shape[0]
    elements = [canonical(np.eye(dim, dtype=complex))]
    index = {_key(elements[0]): 0}

    def lookup(u):
        k = _key(u)
        if k in index and _same(elements[index[k]], u, GROUP_TOL):
            return index[k]
        for i, e in enumerate(elements):
            if _same(e, u, GROUP_TOL):
                return i
        return None

    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for g in gens.values():
                u = canonical(g @ elements[i])
                if lookup(u) is None:
                    if len(elements) >= cap:
                        raise ValueError(f"closure exceeds cap of {cap} elements")
                    index.setdefault(_key(u), len(elements))
                    elements.append(u)
                    nxt.append(len(elements) - 1)
        frontier = nxt
    n = len(elements)
    cayley = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            k = lookup(elements[i] @ elements[j])
            if k is None:
                raise ValueError("closure is not closed; tolerance too tight")
            cayley[i, j] = k
    inverse = np.array([int(np.nonzero(cayley[i] == 0)[0][0]) for i in range(n)])
    for e in elements:
        e.setflags(write=False)
    cayley.setflags(write=False)
    inverse.setflags(write=False)
    return ProjectiveGroup(name, gens, tuple(elements), cayley, inverse, index)


def reduce_word(group: ProjectiveGroup, labels: Sequence[str]) -> int:
    """Index of ``labels[0] @ labels[1] @ ...`` (rightmost acts first)."""
    acc = 0
    for label in reversed(list(labels)):
        acc = group.multiply(group.label_index(label), acc)
    return acc


@dataclass(frozen=True)
class WalkResult:
    """Outcome of a random walk on a group.

    ``path`` lists generator labels in the order they were drawn;
    ``reached`` is ``None`` when ``max_steps`` ran out first.
    """

    steps: int
    path: tuple
    reached: int | None

    @property
    def hit(self) -> bool:
        return self.reached is not None


def walk_until(
    group: ProjectiveGroup,
    target: int,
    gen_distribution: Mapping[str, float],
    seed=None,
    max_steps: int = 10_000,
    start: int = 0,
) -> WalkResult:
    """Left-multiply random generators onto ``start`` until ``target`` is reached.

    At least one step is always taken. When ``max_steps`` is exhausted the
    result has ``reached=None`` instead of raising.
    """
    labels = list(gen_distribution)
    probs = np.array([gen_distribution[k] for k in labels], dtype=float)
    if np.any(probs <= 0):
        raise ValueError("generator probabilities must be strictly positive")
    probs = probs / probs.sum()
    idx = [group.label_index(k) for k in labels]
    rng = np.random.default_rng(seed)
    cur = int(start)
    drawn: list[int] = []
    chunk = 64
    while len(drawn) < max_steps:
        draws = rng.choice(len(labels), size=min(chunk, max_steps - len(drawn)), p=probs)
        elems = np.asarray([idx[k] for k in draws], dtype=np.int64)
        hit, cur = kernels.walk_hits(group.cayley, elems, cur, int(target))
        if hit > 0:
            drawn.extend(draws[:hit].tolist())
            return WalkResult(len(drawn), tuple(labels[k] for k in drawn), int(cur))
        drawn.extend(draws.tolist())
    return WalkResult(len(drawn), tuple(labels[k] for k in drawn), None)


def hitting_times(
    group: ProjectiveGroup,
    target: int,
    gen_distribution: Mapping[str, float],
    runs: int,
    seed=None,
    max_steps: int = 10_000,
) -> np.ndarray:
    """Step counts of ``runs`` independent walks from the identity (-1 when not hit)."""
    seq = np.random.SeedSequence(seed)
    out = np.empty(runs, dtype=np.int64)
    for r, child in enumerate(seq.spawn(runs)):
        res = walk_until(group, target, gen_distribution, child, max_steps)
        out[r] = res.steps if res.hit else -1
    return out


# --------------------------------------------------------------------------
# catalog
# --------------------------------------------------------------------------
def aklt_byproducts() -> dict:
    return {"H": gates.H, "X": gates.X, "ZX": gates.Z @ gates.X}


def build_group(name: str) -> ProjectiveGroup:
    """Catalog lookup: ``pauli``, ``clifford1``, ``aklt8`` or ``dihedral:m``."""
    if name == "pauli":
        return generate_closure({"X": gates.X, "Z": gates.Z}, "pauli")
    if name == "clifford1":
        return generate_closure({"H": gates.H, "S": gates.S}, "clifford1")
    if name == "aklt8":
        return generate_closure(aklt_byproducts(), "aklt8")
    if name.startswith("dihedral:"):
        m = int(name.split(":", 1)[1])
        if m < 2:
            raise ValueError("dihedral group needs m >= 2")
        return generate_closure({"Z": gates.Z, "G": dihedral_generator(m)}, name)
    raise ValueError(f"unknown group {name!r}")


GROUP_CATALOG = ("pauli", "clifford1", "aklt8", "dihedral:m")
