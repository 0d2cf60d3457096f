"""Two-dimensional tensor-network resources and their exact contraction.

Sites are addressed as ``(row, col)`` with row 0 at the top. Every site
belongs to a *class* whose tensors ``A[s]`` carry named virtual legs, each
playing either an input role (bra side, e.g. ``l``, ``d``) or an output role
(ket side, e.g. ``r``, ``u``). A bond joins an output leg of one site to an
input leg of another. Legs without a partner are closed by boundary vectors:
inputs receive ``|b⟩`` and outputs are contracted with ``⟨b|``. A boundary
of ``None`` keeps the leg open as an extra index of the contracted state.

The toric geometries are stored in a straightened form: site ``(i, j)``
couples correlation lines ``i`` (upper) and ``i + 1`` (lower) in column ``j``,
with inputs ``lu``, ``ld`` and outputs ``ru``, ``rd``. Adjacent columns are
offset by one line, which reproduces the diagonal neighbourhood of the
centered square lattice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import gates
from .mps import AKLT_FLIP_WEIGHT, AKLT_ZERO_WEIGHT, LocalBasis
from .tensor import ComplexTensor, reshape_as_operator

Site = tuple  # (row, col)
LegRef = tuple  # (row, col, leg)

AMPLITUDE_CAP = 2**20
MAX_SWEEP_WIDTH = 6

KINDS_2D = (
    "cluster2d",
    "aklt2d",
    "toric_plain",
    "toric_scheme1",
    "toric_scheme2",
    "weighted_graph",
    "rerouting",
)


class GeometryError(ValueError):
    """Malformed lattice, leg assignment or fragment."""


# --------------------------------------------------------------------------
# site classes
# --------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SiteClass:
    """Tensors of one kind of site.

    Attributes
    ----------
    name : str
    legs : tuple of str
        Leg order of every tensor in ``tensors``.
    roles : dict
        Leg name to ``"in"`` or ``"out"``.
    tensors : tuple of ComplexTensor
        ``tensors[s]`` is ``A[s]``.
    closure : dict
        Default boundary vector per leg, used for lattice edges and for
        closing fragment legs that point outside the fragment.
    """

    name: str
    legs: tuple
    roles: dict
    tensors: tuple
    closure: dict

    @property
    def phys_dim(self) -> int:
        return len(self.tensors)

    def stacked(self) -> np.ndarray:
        """Array ``T[s, leg...]`` in the class leg order."""
        return np.stack([t.data for t in self.tensors])


def _product_tensor(legs: Sequence[str], factors) -> ComplexTensor:
    """Outer product of factors ``(leg_names, array)`` reordered to ``legs``."""
    names: list[str] = []
    data = np.ones((), dtype=complex)
    for fl, arr in factors:
        arr = np.asarray(arr, dtype=complex)
        data = np.multiply.outer(data, arr)
        names += list(fl)
    t = ComplexTensor([(n, 2) for n in names], data)
    return t.transpose(list(legs))


def _ket(v):
    return np.asarray(v, dtype=complex)


def _bra(v):
    # coefficient of input index a in ⟨v| is conj(v[a])
    return np.asarray(v, dtype=complex).conj()


def _op(m):
    # factor for a map in→out stored as [in, out] to follow leg order (l, r)
    return np.asarray(m, dtype=complex).T


SQUARE_LEGS = ("l", "r", "u", "d")
SQUARE_ROLES = {"l": "in", "d": "in", "r": "out", "u": "out"}
SIX_LEGS = ("l", "r", "lu", "ru", "ld", "rd")
SIX_ROLES = {"l": "in", "ld": "in", "rd": "in", "r": "out", "lu": "out", "ru": "out"}
TORIC_LEGS = ("lu", "ld", "ru", "rd")
TORIC_ROLES = {"lu": "in", "ld": "in", "ru": "out", "rd": "out"}


def _closure(roles, in_vec, out_vec):
    return {leg: (in_vec if role == "in" else out_vec) for leg, role in roles.items()}


def cluster_class(name: str = "A", u_one=gates.KET_MINUS) -> SiteClass:
    """A[s] = |±_s⟩_r |·⟩_u ⟨s|_l ⟨s|_d; ``u_one`` is the up-output for s=1."""
    t0 = _product_tensor(
        SQUARE_LEGS,
        [(("r",), _ket(gates.KET_PLUS)), (("u",), _ket(gates.KET_PLUS)),
         (("l",), _bra(gates.KET0)), (("d",), _bra(gates.KET0))],
    )
    t1 = _product_tensor(
        SQUARE_LEGS,
        [(("r",), _ket(gates.KET_MINUS)), (("u",), _ket(u_one)),
         (("l",), _bra(gates.KET1)), (("d",), _bra(gates.KET1))],
    )
    return SiteClass(name, SQUARE_LEGS, SQUARE_ROLES, (t0, t1),
                     _closure(SQUARE_ROLES, gates.KET_PLUS, gates.KET0))


def aklt2d_class(zero_weight: float = AKLT_ZERO_WEIGHT,
                 flip_weight: float = AKLT_FLIP_WEIGHT) -> SiteClass:
    a0 = zero_weight * gates.H
    a1 = flip_weight * np.outer(gates.KET0, gates.KET1)
    a2 = flip_weight * np.outer(gates.KET1, gates.KET0)
    up = [gates.KET_PLUS, gates.KET_PLUS, gates.KET_MINUS]
    down = [gates.KET0, gates.KET0, gates.KET1]
    tensors = tuple(
        _product_tensor(
            SQUARE_LEGS,
            [(("l", "r"), _op(a)), (("u",), _ket(u)), (("d",), _bra(dv))],
        )
        for a, u, dv in zip((a0, a1, a2), up, down)
    )
    # |+⟩ on the horizontal legs overlaps every A[s]; lattice edges use |0⟩
    closure = {"l": gates.KET_PLUS, "r": gates.KET_PLUS, "u": gates.KET0, "d": gates.KET_PLUS}
    return SiteClass("K", SQUARE_LEGS, SQUARE_ROLES, tensors, closure)


def weighted_class() -> SiteClass:
    t0 = _product_tensor(
        SIX_LEGS,
        [(("ru",), _ket(gates.KET_PLUS)), (("lu",), _ket(gates.KET_PLUS)),
         (("r",), _ket(gates.KET_PLUS)), (("ld",), _bra(gates.KET0)),
         (("rd",), _bra(gates.KET0)), (("l",), _bra(gates.KET0))],
    )
    t1 = _product_tensor(
        SIX_LEGS,
        [(("ru",), _ket(gates.KET_I)), (("lu",), _ket(gates.KET_I)),
         (("r",), _ket(gates.KET_MINUS)), (("ld",), _bra(gates.KET1)),
         (("rd",), _bra(gates.KET1)), (("l",), _bra(gates.KET1))],
    )
    return SiteClass("W", SIX_LEGS, SIX_ROLES, (t0, t1),
                     _closure(SIX_ROLES, gates.KET_PLUS, gates.KET0))


def _two_line(upper: np.ndarray, lower: np.ndarray) -> ComplexTensor:
    """Two independent through-lines lu→ru and ld→rd."""
    return _product_tensor(TORIC_LEGS, [(("lu", "ru"), _op(upper)), (("ld", "rd"), _op(lower))]
                           ).transpose(list(TORIC_LEGS))


def _cup_cap(cup: np.ndarray, cap: np.ndarray) -> ComplexTensor:
    """Map ``|cap⟩⟨cup|`` from (lu, ld) to (ru, rd)."""
    return _product_tensor(
        TORIC_LEGS,
        [(("lu", "ld"), np.asarray(cup, dtype=complex).conj().reshape(2, 2)),
         (("ru", "rd"), np.asarray(cap, dtype=complex).reshape(2, 2))],
    )


def parity_vector(s: int) -> np.ndarray:
    """|00⟩ + (−1)^s |11⟩ (unnormalized)."""
    return np.array([1, 0, 0, (-1) ** s], dtype=complex)


COPY = np.array([[1, 0], [0, 0], [0, 0], [0, 1]], dtype=complex)  # |a⟩ ↦ |aa⟩


def toric_h_class() -> SiteClass:
    tensors = tuple(_two_line(np.linalg.matrix_power(gates.Z, s),
                              np.linalg.matrix_power(gates.Z, s)) for s in (0, 1))
    return SiteClass("KH", TORIC_LEGS, TORIC_ROLES, tensors,
                     _closure(TORIC_ROLES, gates.KET0, gates.KET0))


def toric_v_class() -> SiteClass:
    tensors = tuple(_cup_cap(parity_vector(s), parity_vector(s)) for s in (0, 1))
    return SiteClass("KV", TORIC_LEGS, TORIC_ROLES, tensors,
                     _closure(TORIC_ROLES, gates.KET0, gates.KET0))


def toric_h_mod_class() -> SiteClass:
    """K_H followed by √Z·H on the lower line."""
    w = gates.SQRT_Z @ gates.H
    tensors = tuple(
        _two_line(np.linalg.matrix_power(gates.Z, s), w @ np.linalg.matrix_power(gates.Z, s))
        for s in (0, 1)
    )
    return SiteClass("KHt", TORIC_LEGS, TORIC_ROLES, tensors,
                     _closure(TORIC_ROLES, gates.KET0, gates.KET_PLUS))


def toric_v_mod_class() -> SiteClass:
    """COPY ∘ A_cluster[s] ∘ COPY† with A_cluster[s] = |±_s⟩⟨s|."""
    mats = (np.outer(gates.KET_PLUS, gates.KET0), np.outer(gates.KET_MINUS, gates.KET1))
    tensors = []
    for a in mats:
        m = COPY @ a @ COPY.conj().T  # (ru rd) x (lu ld)
        t = ComplexTensor([("ru", 2), ("rd", 2), ("lu", 2), ("ld", 2)], m.reshape(-1))
        tensors.append(t.transpose(list(TORIC_LEGS)))
    return SiteClass("KVt", TORIC_LEGS, TORIC_ROLES, tuple(tensors),
                     _closure(TORIC_ROLES, gates.KET_PLUS, gates.KET_PLUS))


# --------------------------------------------------------------------------
# geometry
# --------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class LatticeGeometry:
    """Sites, bonds and boundary assignment of a planar patch.

    Attributes
    ----------
    kind : {"square", "centered_square", "six_neighbor", "period2_rows"}
    width, height : int
        Number of columns and rows (lines for the toric geometries).
    site_class : dict
        ``(row, col)`` to class name.
    bonds : tuple
        ``((site_a, out_leg), (site_b, in_leg))`` pairs.
    boundary : dict
        ``(row, col, leg)`` to boundary vector, or ``None`` for an open leg.
    """

    kind: str
    width: int
    height: int
    site_class: dict
    bonds: tuple
    boundary: dict

    @property
    def sites(self) -> tuple:
        return tuple(sorted(self.site_class))

    def to_json(self) -> str:
        def vec(v):
            return None if v is None else [[float(z.real), float(z.imag)] for z in v]

        doc = {
            "kind": self.kind,
            "width": self.width,
            "height": self.height,
            "sites": [[r, c, self.site_class[(r, c)]] for r, c in self.sites],
            "bonds": [[list(a[0]), a[1], list(b[0]), b[1]] for a, b in self.bonds],
            "boundary": [[r, c, leg, vec(v)] for (r, c, leg), v in sorted(
                self.boundary.items(), key=lambda kv: kv[0])],
        }
        return json.dumps(doc, sort_keys=True)


def _validate(geom: LatticeGeometry, classes: Mapping[str, SiteClass]) -> None:
    used: dict = {}
    for (sa, la), (sb, lb) in geom.bonds:
        for site, leg, role in ((sa, la, "out"), (sb, lb, "in")):
            cls = classes[geom.site_class[site]]
            if cls.roles.get(leg) != role:
                raise GeometryError(f"leg {leg} of {site} is not an {role}put")
            key = (site[0], site[1], leg)
            if key in used:
                raise GeometryError(f"leg {key} bonded twice")
            used[key] = True
    for site, cname in geom.site_class.items():
        if cname not in classes:
            raise GeometryError(f"class {cname} missing")
        for leg in classes[cname].legs:
            key = (site[0], site[1], leg)
            if (key in used) == (key in geom.boundary):
                raise GeometryError(f"leg {key} must be bonded or on the boundary, not both")


def _square_bonds(rows: int, cols: int):
    bonds = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                bonds.append((((r, c), "r"), ((r, c + 1), "l")))
            if r > 0:
                bonds.append((((r, c), "u"), ((r - 1, c), "d")))
    return bonds


def _six_bonds(rows: int, cols: int):
    bonds = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                bonds.append((((r, c), "r"), ((r, c + 1), "l")))
            if r > 0 and c + 1 < cols:
                bonds.append((((r, c), "ru"), ((r - 1, c + 1), "ld")))
            if r > 0 and c > 0:
                bonds.append((((r, c), "lu"), ((r - 1, c - 1), "rd")))
    return bonds


def _open_legs(site_class, bonds, classes):
    bonded = {(s[0], s[1], leg) for a, b in bonds for s, leg in (a, b)}
    out = []
    for site, cname in site_class.items():
        for leg in classes[cname].legs:
            if (site[0], site[1], leg) not in bonded:
                out.append((site[0], site[1], leg))
    return out


def brickwork_sites(lines: int, cols: int, offsets: Sequence[int]) -> list:
    """Toric site positions: column j pairs lines (i, i+1) with i ≡ offsets[j] mod 2."""
    sites = []
    for j in range(cols):
        for i in range(offsets[j] % 2, lines - 1, 2):
            sites.append((i, j))
    return sites


def _brickwork_bonds(lines: int, cols: int, offsets, edge: str):
    """Bonds of the straightened centered-square lattice.

    ``edge="close"`` closes a line at every column in which it is unpaired
    (faithful planar patch); ``edge="pass"`` carries it straight through.
    """
    sites = set(brickwork_sites(lines, cols, offsets))
    bonds = []
    boundary_pairs = []  # (site, leg) that need boundary vectors
    last = [None] * lines  # open output leg per line
    for j in range(cols):
        for i in range(lines):
            if (i, j) in sites:
                upper, lower = (i, j), None
            elif (i - 1, j) in sites:
                upper, lower = None, (i - 1, j)
            else:
                if edge == "close" and last[i] is not None:
                    boundary_pairs.append(last[i])
                    last[i] = None
                continue
            site, in_leg, out_leg = (upper, "lu", "ru") if upper else (lower, "ld", "rd")
            if last[i] is None:
                boundary_pairs.append((site, in_leg))
            else:
                bonds.append((last[i], (site, in_leg)))
            last[i] = (site, out_leg)
    for i in range(lines):
        if last[i] is not None:
            boundary_pairs.append(last[i])
    return sorted(sites), bonds, boundary_pairs


def line_of(site: Site, leg: str) -> int:
    """Correlation line carried by a toric leg."""
    return site[0] + (0 if leg in ("lu", "ru") else 1)


@dataclass(frozen=True, eq=False)
class PepsResource:
    """Geometry plus site classes."""

    kind: str
    geometry: LatticeGeometry
    classes: dict
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        _validate(self.geometry, self.classes)

    def site_class(self, site: Site) -> SiteClass:
        return self.classes[self.geometry.site_class[tuple(site)]]

    def phys_dims(self) -> list[int]:
        return [self.site_class(s).phys_dim for s in self.geometry.sites]

    def with_boundary(self, overrides: Mapping) -> "PepsResource":
        b = dict(self.geometry.boundary)
        for key, v in overrides.items():
            if key not in b:
                raise GeometryError(f"{key} is not a boundary leg")
            b[key] = None if v is None else np.asarray(v, dtype=complex)
        g = LatticeGeometry(self.geometry.kind, self.geometry.width, self.geometry.height,
                            self.geometry.site_class, self.geometry.bonds, b)
        return PepsResource(self.kind, g, self.classes, dict(self.params))

    def partner(self, site: Site, leg: str):
        """The ``(site, leg)`` bonded to this leg, or ``None`` on the boundary."""
        site = tuple(site)
        for a, b in self.geometry.bonds:
            if a == (site, leg):
                return b
            if b == (site, leg):
                return a
        return None


def _default_boundary(open_legs, site_class, classes, overrides=None):
    b = {}
    for r, c, leg in open_legs:
        b[(r, c, leg)] = np.asarray(classes[site_class[(r, c)]].closure[leg], dtype=complex)
    for key, v in (overrides or {}).items():
        b[key] = v
    return b


def build_2d_resource(
    kind: str,
    rows: int = 2,
    cols: int = 2,
    *,
    ket1_boundaries: bool = False,
    edge: str | None = None,
) -> PepsResource:
    """Construct a 2-D catalog resource on a ``rows x cols`` patch.

    For the toric kinds ``rows`` counts correlation lines and ``cols``
    counts columns of the straightened brickwork.

    Parameters
    ----------
    ket1_boundaries : bool
        Use ``|1⟩`` on the right and upper output legs of the cluster and
        rerouting lattices instead of the default ``|0⟩``.
    edge : {"close", "pass"}, optional
        Treatment of toric lines that are unpaired in a column.
    """
    if rows < 1 or cols < 1:
        raise GeometryError("lattice must have at least one row and column")
    if kind in ("cluster2d", "rerouting"):
        if kind == "cluster2d":
            classes = {"A": cluster_class("A")}
            site_class = {(r, c): "A" for r in range(rows) for c in range(cols)}
            gkind = "square"
        else:
            classes = {"A": cluster_class("A"), "B": cluster_class("B", gates.KET_I)}
            site_class = {(r, c): ("A" if r % 2 == 0 else "B")
                          for r in range(rows) for c in range(cols)}
            gkind = "period2_rows"
        bonds = _square_bonds(rows, cols)
        open_legs = _open_legs(site_class, bonds, classes)
        boundary = _default_boundary(open_legs, site_class, classes)
        if ket1_boundaries:
            for key in boundary:
                if key[2] in ("r", "u"):
                    boundary[key] = gates.KET1.copy()
        geom = LatticeGeometry(gkind, cols, rows, site_class, tuple(bonds), boundary)
        return PepsResource(kind, geom, classes, {"ket1_boundaries": ket1_boundaries})
    if kind == "aklt2d":
        classes = {"K": aklt2d_class()}
        site_class = {(r, c): "K" for r in range(rows) for c in range(cols)}
        bonds = _square_bonds(rows, cols)
        boundary = _default_boundary(_open_legs(site_class, bonds, classes), site_class, classes)
        for key in boundary:
            if key[2] in ("l", "r"):
                boundary[key] = gates.KET0.copy()
        geom = LatticeGeometry("square", cols, rows, site_class, tuple(bonds), boundary)
        return PepsResource(kind, geom, classes)
    if kind == "weighted_graph":
        classes = {"W": weighted_class()}
        site_class = {(r, c): "W" for r in range(rows) for c in range(cols)}
        bonds = _six_bonds(rows, cols)
        boundary = _default_boundary(_open_legs(site_class, bonds, classes), site_class, classes)
        geom = LatticeGeometry("six_neighbor", cols, rows, site_class, tuple(bonds), boundary)
        return PepsResource(kind, geom, classes)
    if kind in ("toric_plain", "toric_scheme1", "toric_scheme2"):
        return _build_toric(kind, rows, cols, edge)
    raise GeometryError(f"unknown 2-D resource kind {kind!r}")


def toric_offsets(kind: str, cols: int) -> list[int]:
    """Pair offset per column; V-type columns pair lines (0,1), (2,3), ..."""
    return [j % 2 for j in range(cols)]


def _build_toric(kind: str, lines: int, cols: int, edge: str | None) -> PepsResource:
    if lines < 2:
        raise GeometryError("toric patches need at least two lines")
    offsets = toric_offsets(kind, cols)
    if kind == "toric_scheme1":
        classes = {"KHt": toric_h_mod_class()}
        col_class = ["KHt"] * cols
        left, edge_in, edge_out = gates.KET0, gates.KET0, gates.KET_PLUS
        edge = edge or "close"
    elif kind == "toric_scheme2":
        classes = {"KH": toric_h_class(), "KVt": toric_v_mod_class()}
        col_class = ["KVt" if j % 2 == 0 else "KH" for j in range(cols)]
        left, edge_in, edge_out = gates.KET_PLUS, gates.KET_PLUS, gates.KET_PLUS
        edge = edge or "close"
    else:
        classes = {"KH": toric_h_class(), "KV": toric_v_class()}
        col_class = ["KV" if j % 2 == 0 else "KH" for j in range(cols)]
        left, edge_in, edge_out = gates.KET0, gates.KET0, gates.KET0
        edge = edge or "close"
    sites, bonds, bpairs = _brickwork_bonds(lines, cols, offsets, edge)
    if not sites:
        raise GeometryError("toric patch has no sites")
    site_class = {s: col_class[s[1]] for s in sites}
    boundary = {}
    first_col = min(s[1] for s in sites)
    last_col = max(s[1] for s in sites)
    for site, leg in bpairs:
        role = TORIC_ROLES[leg]
        if role == "in":
            vec = left if site[1] == first_col or _first_on_line(site, leg, sites) else edge_in
        else:
            vec = gates.KET0 if site[1] == last_col or _last_on_line(site, leg, sites, cols) \
                else edge_out
        boundary[(site[0], site[1], leg)] = np.asarray(vec, dtype=complex)
    geom = LatticeGeometry("centered_square", cols, lines, site_class, tuple(bonds), boundary)
    return PepsResource(kind, geom, classes, {"offsets": offsets, "edge": edge})


def _first_on_line(site, leg, sites) -> bool:
    line = line_of(site, leg)
    cols = [s[1] for s in sites if s[0] in (line, line - 1)]
    return site[1] == min(cols)


def _last_on_line(site, leg, sites, ncols) -> bool:
    line = line_of(site, leg)
    cols = [s[1] for s in sites if s[0] in (line, line - 1)]
    return site[1] == max(cols)


CATALOG_2D = KINDS_2D


# --------------------------------------------------------------------------
# contraction
# --------------------------------------------------------------------------
class _Net:
    """Axis-labelled ndarray used inside the sweep."""

    __slots__ = ("data", "labels")

    def __init__(self, data, labels):
        self.data = data
        self.labels = list(labels)

    def contract(self, other: "_Net") -> "_Net":
        shared = [l for l in self.labels if l in other.labels]
        ax_a = [self.labels.index(l) for l in shared]
        ax_b = [other.labels.index(l) for l in shared]
        data = np.tensordot(self.data, other.data, axes=(ax_a, ax_b))
        labels = [l for l in self.labels if l not in shared] + \
                 [l for l in other.labels if l not in shared]
        return _Net(data, labels)


def _bond_labels(geom: LatticeGeometry) -> dict:
    labels = {}
    for k, ((sa, la), (sb, lb)) in enumerate(geom.bonds):
        labels[(sa[0], sa[1], la)] = f"b{k}"
        labels[(sb[0], sb[1], lb)] = f"b{k}"
    return labels


def _site_net(res: PepsResource, site: Site, bond_labels: dict, phys: np.ndarray | None,
              extra_closure: Mapping | None = None, open_legs: Sequence = ()) -> _Net:
    """Site tensor with boundary legs closed.

    ``phys`` (optional) is a covector contracted with the physical index;
    otherwise the physical index stays open under label ``p:(r,c)``.
    """
    cls = res.site_class(site)
    data = cls.stacked()
    labels = [f"p:{site[0]},{site[1]}"] + list(cls.legs)
    if phys is not None:
        data = np.tensordot(np.asarray(phys, dtype=complex), data, axes=(0, 0))
        labels = labels[1:]
    net = _Net(data, labels)
    for leg in cls.legs:
        key = (site[0], site[1], leg)
        if key in open_legs:
            net.labels[net.labels.index(leg)] = f"t:{key[0]},{key[1]},{leg}"
            continue
        if extra_closure is not None and key in extra_closure:
            vec = extra_closure[key]
        elif key in bond_labels:
            net.labels[net.labels.index(leg)] = bond_labels[key]
            continue
        else:
            vec = res.geometry.boundary[key]
        if vec is None:
            net.labels[net.labels.index(leg)] = f"o:{key[0]},{key[1]},{leg}"
            continue
        vec = np.asarray(vec, dtype=complex)
        coeff = vec if cls.roles[leg] == "in" else vec.conj()
        ax = net.labels.index(leg)
        net.data = np.tensordot(net.data, coeff, axes=([ax], [0]))
        del net.labels[ax]
    return net


def contract_full(
    res: PepsResource,
    cap: int = AMPLITUDE_CAP,
    max_width: int = MAX_SWEEP_WIDTH,
) -> np.ndarray:
    """All amplitudes of the resource, sites in row-major order.

    Sites are absorbed column by column into a growing boundary tensor.
    Open boundary legs, if any, trail the physical indices.

    Raises
    ------
    GeometryError
        If the lattice is wider than ``max_width`` or has more than ``cap``
        amplitudes.
    """
    geom = res.geometry
    if geom.height > max_width:
        raise GeometryError(f"sweep width {geom.height} exceeds limit {max_width}")
    dims = res.phys_dims()
    n_open = [k for k, v in geom.boundary.items() if v is None]
    total = int(np.prod(dims, dtype=np.int64)) * int(np.prod([2] * len(n_open), dtype=np.int64))
    if total > cap:
        raise GeometryError(f"state has {total} amplitudes, cap is {cap}")
    labels = _bond_labels(geom)
    acc = _Net(np.ones((), dtype=complex), [])
    for site in sorted(geom.sites, key=lambda s: (s[1], s[0])):
        acc = acc.contract(_site_net(res, site, labels, None))
    order = [f"p:{r},{c}" for r, c in geom.sites]
    order += sorted(l for l in acc.labels if l.startswith("o:"))
    data = np.transpose(acc.data, [acc.labels.index(l) for l in order])
    return data.reshape(-1)


# --------------------------------------------------------------------------
# fragments
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class Fragment:
    """Measured sites of a patch plus the legs kept open.

    Attributes
    ----------
    sites : tuple
        ``(site, basis_label, outcome)`` triples.
    through_in, through_out : tuple
        ``(row, col, leg)`` references; these become the input and output
        of the induced operator (first listed is most significant).
    closures : dict
        Optional explicit vectors for other fragment legs.
    """

    sites: tuple
    through_in: tuple
    through_out: tuple
    closures: tuple = ()

    def to_json(self) -> str:
        doc = {
            "sites": [[s[0], s[1], b, int(o)] for s, b, o in self.sites],
            "through_in": [list(x) for x in self.through_in],
            "through_out": [list(x) for x in self.through_out],
        }
        return json.dumps(doc, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "Fragment":
        doc = json.loads(text)
        return Fragment(
            tuple(((s[0], s[1]), s[2], int(s[3])) for s in doc["sites"]),
            tuple(tuple(x) for x in doc["through_in"]),
            tuple(tuple(x) for x in doc["through_out"]),
        )


def fragment_tensor(
    res: PepsResource,
    sites: Sequence[Site],
    through_in: Sequence[LegRef],
    through_out: Sequence[LegRef],
    closures: Mapping | None = None,
    phys: Mapping | None = None,
) -> np.ndarray:
    """Array ``T[p_1, ..., p_k, out, in]`` with physical indices left open.

    Legs of fragment sites that are neither bonded inside the fragment nor
    designated as through legs are closed with the class closure vectors
    (or the lattice boundary vectors on the patch edge). Sites listed in
    ``phys`` are projected on ``⟨φ|`` as they are absorbed and carry no
    physical index in the result.
    """
    phys = {tuple(k): v for k, v in (phys or {}).items()}
    sites = [tuple(s) for s in sites]
    inside = set(sites)
    through = [tuple(x) for x in through_in] + [tuple(x) for x in through_out]
    labels = _bond_labels(res.geometry)
    local_labels = {}
    extra = dict(closures or {})
    for site in sites:
        cls = res.site_class(site)
        for leg in cls.legs:
            key = (site[0], site[1], leg)
            if key in through:
                continue
            if key in labels:
                partner = res.partner(site, leg)
                if partner[0] in inside:
                    local_labels[key] = labels[key]
                elif key not in extra:
                    extra[key] = cls.closure[leg]
    acc = _Net(np.ones((), dtype=complex), [])
    for site in sorted(sites, key=lambda s: (s[1], s[0])):
        covec = None if site not in phys else np.asarray(phys[site], dtype=complex).conj()
        acc = acc.contract(_site_net(res, site, local_labels, covec, extra, through))
    leftover = [l for l in acc.labels if l.startswith("b") or l.startswith("o:")]
    if leftover:
        raise GeometryError(f"fragment leaves legs open: {leftover}")
    outs = [f"t:{r},{c},{leg}" for r, c, leg in through_out]
    ins = [f"t:{r},{c},{leg}" for r, c, leg in through_in]
    open_phys = [f"p:{r},{c}" for r, c in sites if (r, c) not in phys]
    data = np.transpose(acc.data, [acc.labels.index(l) for l in open_phys + outs + ins])
    k = len(open_phys)
    dout = int(np.prod(data.shape[k:k + len(outs)], dtype=np.int64))
    return data.reshape(data.shape[:k] + (dout, -1))


def fragment_operator(res: PepsResource, fragment: Fragment) -> ComplexTensor:
    """Operator induced on the through legs by the fragment's outcomes."""
    from .mps import basis_from_label

    sites = [tuple(s) for s, _, _ in fragment.sites]
    closures = {tuple(k): np.asarray(v, dtype=complex) for k, v in fragment.closures}
    phys = {}
    for (site, label, outcome) in fragment.sites:
        basis = basis_from_label(label, res.site_class(site).phys_dim) \
            if isinstance(label, str) else label
        phys[tuple(site)] = basis.vectors[int(outcome)]
    T = fragment_tensor(res, sites, fragment.through_in, fragment.through_out, closures, phys)
    return ComplexTensor([("out", T.shape[0]), ("in", T.shape[1])], T)


def operator_from_tensor(T: np.ndarray, vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Contract the physical indices of a fragment tensor with ``⟨φ_k|``."""
    for phi in vectors:
        T = np.tensordot(np.asarray(phi).conj(), T, axes=(0, 0))
    return T


def as_operator(t: ComplexTensor, in_legs, out_legs) -> ComplexTensor:
    return reshape_as_operator(t, in_legs, out_legs)
