"""Site tensors viewed as maps between correlation lines, and two backends.

A :class:`LineNetwork` hands out, for every site, an array
``T[p, out_1.., in_1..]`` together with the correlation lines its input
and output legs carry. Legs closed by boundary or edge vectors are
absorbed. Both backends consume this view:

* :class:`CorrelationBackend` keeps only the correlation state of the live
  lines and samples with weights ``||⟨φ_k|T ψ||²`` (the unmeasured rest of
  the resource is taken as a trivial environment).
* :class:`OracleBackend` keeps a dense state of the live lines together with
  a lookahead of unmeasured physical sites, and measures by the Born rule on
  that full vector. Agreement of the two is therefore a check that the
  unmeasured future really acts trivially.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ..mps import LocalBasis, MpsResource, basis_from_label
from ..oracle import ZERO_PROB, ZeroProbabilityError
from ..peps import PepsResource, TORIC_ROLES, fragment_tensor, line_of


class LineNetwork:
    """Sites in schedule order with their line-to-line tensors.

    Parameters
    ----------
    resource : MpsResource or PepsResource
        A 1-D chain (one line, site ``k`` is the integer ``k``) or a toric
        brickwork patch (sites ``(line, col)``).
    initial : dict, optional
        Toric only: ``{(line_a, line_b, ...): vector}`` replacing the left
        boundary vectors of those lines by a joint state.
    """

    def __init__(self, resource, initial: Mapping | None = None):
        self.resource = resource
        self._cache: dict = {}
        self._bases: dict = {}
        self._projected: dict = {}
        if isinstance(resource, MpsResource):
            self.kind = "chain"
            self.order = None
            self.initial = [((0,), np.asarray(resource.left, dtype=complex))]
            return
        if not isinstance(resource, PepsResource) or not resource.kind.startswith("toric"):
            raise ValueError("line view needs a 1-D chain or a toric patch")
        self.kind = "toric"
        geom = resource.geometry
        self.order = sorted(geom.sites, key=lambda s: (s[1], s[0]))
        self._position = {s: k for k, s in enumerate(self.order)}
        first = {}
        for site in self.order:
            for leg in ("lu", "ld"):
                first.setdefault(line_of(site, leg), (site, leg))
        injected = {}
        for lines, vec in (initial or {}).items():
            lines = tuple(lines)
            vec = np.asarray(vec, dtype=complex).reshape(-1)
            if vec.size != 2 ** len(lines):
                raise ValueError("initial state size does not match its lines")
            injected[lines] = vec
        covered = {l for lines in injected for l in lines}
        self.initial = list(injected.items())
        self._left_open = set()
        for line, (site, leg) in sorted(first.items()):
            if site[1] != 0:
                continue
            self._left_open.add((site[0], site[1], leg))
            if line not in covered:
                self.initial.append(((line,), np.asarray(geom.boundary[(site[0], site[1], leg)],
                                                          dtype=complex)))

    # ------------------------------------------------------------------
    def position(self, site) -> int:
        return int(site) if self.kind == "chain" else self._position[tuple(site)]

    def column(self, site) -> int:
        return int(site) if self.kind == "chain" else int(site[1])

    def phys_dim(self, site) -> int:
        if self.kind == "chain":
            return self.resource.d
        return self.resource.site_class(site).phys_dim

    def site_tensor(self, site):
        """``(T, in_lines, out_lines)`` with ``T[p, outs.., ins..]``."""
        key = site if self.kind == "chain" else tuple(site)
        if key in self._cache:
            return self._cache[key]
        if self.kind == "chain":
            out = (self.resource.stacked, (0,), (0,))
        else:
            out = self._toric_tensor(key)
        self._cache[key] = out
        return out

    def _toric_tensor(self, site):
        res = self.resource
        ins, outs = [], []
        for leg, role in TORIC_ROLES.items():
            key = (site[0], site[1], leg)
            bonded = res.partner(site, leg) is not None
            if role == "in" and (bonded or key in self._left_open):
                ins.append(key)
            elif role == "out" and (bonded or res.geometry.boundary.get(key, 0) is None
                                    or site[1] == res.geometry.width - 1):
                outs.append(key)
        T = fragment_tensor(res, [site], ins, outs)
        T = T.reshape((T.shape[0],) + (2,) * (len(outs) + len(ins)))
        return (T, tuple(line_of(site, k[2]) for k in ins),
                tuple(line_of(site, k[2]) for k in outs))

    def basis(self, site, label) -> LocalBasis:
        if isinstance(label, LocalBasis):
            return label
        key = (self.phys_dim(site), label)
        if key not in self._bases:
            self._bases[key] = basis_from_label(label, key[0])
        return self._bases[key]

    def projected(self, site, label):
        """``(P, in_lines, out_lines)`` with ``P[k, outs.., ins..] = ⟨φ_k|T``."""
        key = (site if self.kind == "chain" else tuple(site), label)
        if self.kind == "chain":
            key = (None, label)
        if key not in self._projected:
            T, ins, outs = self.site_tensor(site)
            B = self.basis(site, label).matrix().conj().T  # rows ⟨φ_k|
            self._projected[key] = (np.tensordot(B, T, axes=(1, 0)), ins, outs)
        return self._projected[key]

    def projected_rows(self, label):
        """Chain only: the projected stack of ``label`` as nested Python lists."""
        key = ("rows", label)
        if key not in self._projected:
            self._projected[key] = self.projected(0, label)[0].tolist()
        return self._projected[key]


# --------------------------------------------------------------------------
# labelled dense arrays
# --------------------------------------------------------------------------
def _absorb(data, labels, T, ins, outs, keep_phys_label=None):
    """Contract a site tensor onto the line axes ``ins`` of ``data``.

    ``T`` has axes ``[p?, outs.., ins..]``; with ``keep_phys_label`` the
    physical axis is kept under that label, otherwise ``T`` has no physical
    axis.
    """
    lead = 1 if keep_phys_label is not None else 0
    nout = len(outs)
    missing = [l for l in ins if ("line", l) not in labels]
    if missing:
        raise ZeroProbabilityError(f"lines {missing} are not live")
    ax_state = [labels.index(("line", l)) for l in ins]
    ax_T = [lead + nout + k for k in range(len(ins))]
    new = np.tensordot(data, T, axes=(ax_state, ax_T))
    kept = [l for k, l in enumerate(labels) if k not in ax_state]
    tail = ([keep_phys_label] if lead else []) + [("line", l) for l in outs]
    clash = [l for l in tail if l in kept]
    if clash:
        raise ValueError(f"line {clash} written twice")
    return new, kept + tail


class _Backend:
    def __init__(self, network: LineNetwork):
        self.net = network
        self.measured: set = set()

    def _check(self, site):
        key = site if self.net.kind == "chain" else tuple(site)
        if key in self.measured or (self.net.kind == "chain" and key < getattr(self, "_next", 0)):
            raise ValueError(f"site {site} already measured")
        return key

    def sample(self, site, label, rng) -> int:
        p = self.probabilities(site, label)
        k = min(int(np.searchsorted(np.cumsum(p), rng.random() * p.sum(), side="right")),
                len(p) - 1)
        self.apply(site, label, k)
        return k


class CorrelationBackend(_Backend):
    """Correlation-state propagation with trivial environment on the future."""

    def __init__(self, network: LineNetwork):
        super().__init__(network)
        data, labels = np.ones((), dtype=complex), []
        for lines, vec in network.initial:
            data = np.multiply.outer(data, vec.reshape((2,) * len(lines) if network.kind ==
                                                       "toric" else vec.shape))
            labels += [("line", l) for l in lines]
        self._data, self.labels = data / np.linalg.norm(data), labels
        self._vec = None
        self._next = 0

    @property
    def data(self):
        if self._vec is not None:
            self._data, self._vec = np.array(self._vec, dtype=complex), None
        return self._data

    @data.setter
    def data(self, value):
        self._data, self._vec = value, None

    def sample(self, site, label, rng) -> int:
        if self.net.kind != "chain" or self._data.ndim != 1:
            return super().sample(site, label, rng)
        if site != self._next:
            raise ValueError(f"chain sites must be measured in order; expected {self._next}")
        # scalar arithmetic beats numpy dispatch for bond dimensions this small
        rows = self.net.projected_rows(label)
        v = self._vec if self._vec is not None else self._data.tolist()
        cands, weights = [], []
        if len(v) == 2:
            v0, v1 = v
            for (r0, r1) in rows:
                c0 = r0[0] * v0 + r0[1] * v1
                c1 = r1[0] * v0 + r1[1] * v1
                cands.append((c0, c1))
                weights.append(c0.real * c0.real + c0.imag * c0.imag
                               + c1.real * c1.real + c1.imag * c1.imag)
        else:
            for Pk in rows:
                w_k = [sum(a * b for a, b in zip(r, v)) for r in Pk]
                cands.append(w_k)
                weights.append(sum(c.real * c.real + c.imag * c.imag for c in w_k))
        u = rng.random() * sum(weights)
        k, acc = len(weights) - 1, 0.0
        for i, w in enumerate(weights):
            acc += w
            if u < acc:
                k = i
                break
        if weights[k] <= ZERO_PROB * sum(weights):
            raise ZeroProbabilityError(f"outcome {k} at {site} has zero probability")
        n = weights[k] ** 0.5
        self._vec = [c / n for c in cands[k]]
        self._pending = None
        self._next += 1
        return k

    def _candidates(self, site, label):
        key = self._check(site)
        if self.net.kind == "chain" and key != self._next:
            raise ValueError(f"chain sites must be measured in order; expected {self._next}")
        P, ins, outs = self.net.projected(key, label)
        if self.net.kind == "chain" and self.data.ndim == 1:
            # one bond line in, one out: a stack of matrix-vector products
            return P @ self.data, self.labels
        missing = [l for l in ins if ("line", l) not in self.labels]
        if missing:
            raise ZeroProbabilityError(f"lines {missing} are not live")
        ax_state = [self.labels.index(("line", l)) for l in ins]
        ax_P = list(range(1 + len(outs), 1 + len(outs) + len(ins)))
        new = np.tensordot(P, self.data, axes=(ax_P, ax_state))
        kept = [l for k, l in enumerate(self.labels) if k not in ax_state]
        labels = [("line", l) for l in outs] + kept
        if len(set(labels)) != len(labels):
            raise ValueError(f"a line is written twice at {site}")
        return new, labels

    def probabilities(self, site, label) -> np.ndarray:
        new, labels = self._candidates(site, label)
        w = (new.real ** 2 + new.imag ** 2).reshape(new.shape[0], -1).sum(axis=1)
        self._pending = (site, label, new, labels)
        return w / w.sum()

    def apply(self, site, label, k: int) -> None:
        cached = getattr(self, "_pending", None)
        if cached is not None and cached[0] == site and cached[1] == label:
            new, labels = cached[2], cached[3]
        else:
            new, labels = self._candidates(site, label)
        self._pending = None
        data = new[k]
        n = float(np.sqrt(np.vdot(data, data).real))
        if n ** 2 <= ZERO_PROB:
            raise ZeroProbabilityError(f"outcome {k} at {site} has zero probability")
        self.data, self.labels = data / n, labels
        if self.net.kind != "chain":
            self.measured.add(tuple(site))
        self._next += 1

    def line_state(self, lines: Sequence[int]) -> np.ndarray:
        """Correlation vector with axes ordered by ``lines`` (all live lines)."""
        if sorted(lines) != sorted(l for _, l in self.labels):
            raise ValueError("line_state needs exactly the live lines")
        perm = [self.labels.index(("line", l)) for l in lines]
        return np.transpose(self.data, perm).reshape(-1)

    def snapshot(self):
        return (self.data, list(self.labels), set(self.measured), self._next)

    def restore(self, snap) -> None:
        self.data, labels, measured, self._next = snap
        self.labels, self.measured = list(labels), set(measured)
        self._pending = None


class OracleBackend(_Backend):
    """Born rule on a dense state of live lines plus unmeasured lookahead sites.

    Parameters
    ----------
    lookahead : int
        Number of columns beyond the measured site whose physical sites are
        kept in the state.
    """

    def __init__(self, network: LineNetwork, lookahead: int = 2):
        super().__init__(network)
        self.lookahead = int(lookahead)
        data, labels = np.ones((), dtype=complex), []
        for lines, vec in network.initial:
            shape = (2,) * len(lines) if network.kind == "toric" else vec.shape
            data = np.multiply.outer(data, vec.reshape(shape))
            labels += [("line", l) for l in lines]
        self.data, self.labels = data / np.linalg.norm(data), labels
        self._appended = 0  # schedule position of the next site to add

    def _site_at(self, pos):
        if self.net.kind == "chain":
            return pos
        return self.net.order[pos] if pos < len(self.net.order) else None

    def _grow(self, upto_col: int) -> None:
        while True:
            site = self._site_at(self._appended)
            if site is None or self.net.column(site) > upto_col:
                return
            T, ins, outs = self.net.site_tensor(site)
            self.data, self.labels = _absorb(self.data, self.labels, T, ins, outs,
                                             ("site", site))
            self._appended += 1

    def _projections(self, site, label):
        key = self._check(site)
        self._grow(self.net.column(key) + self.lookahead)
        if ("site", key) not in self.labels:
            raise ValueError(f"site {site} is not in the oracle window")
        ax = self.labels.index(("site", key))
        basis = self.net.basis(key, label)
        t = np.moveaxis(self.data, ax, 0)
        labels = [l for l in self.labels if l != ("site", key)]
        return [np.tensordot(phi.conj(), t, axes=(0, 0)) for phi in basis.vectors], labels

    def probabilities(self, site, label) -> np.ndarray:
        proj, _ = self._projections(site, label)
        p = np.array([np.vdot(v, v).real for v in proj])
        return p / p.sum()

    def apply(self, site, label, k: int) -> None:
        proj, labels = self._projections(site, label)
        v = proj[k]
        n = np.linalg.norm(v)
        if n ** 2 <= ZERO_PROB * max(1.0, sum(np.vdot(x, x).real for x in proj)):
            raise ZeroProbabilityError(f"outcome {k} at {site} has zero probability")
        self.data, self.labels = v / n, labels
        self.measured.add(site if self.net.kind == "chain" else tuple(site))

    def snapshot(self):
        return (self.data, list(self.labels), set(self.measured), self._appended)

    def restore(self, snap) -> None:
        self.data, labels, measured, self._appended = snap
        self.labels, self.measured = list(labels), set(measured)


BACKENDS = {"correlation_space": CorrelationBackend, "oracle": OracleBackend}


def make_backend(name: str, network: LineNetwork):
    try:
        return BACKENDS[name](network)
    except KeyError:
        raise ValueError(f"unknown backend {name!r}") from None
