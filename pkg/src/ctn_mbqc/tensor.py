"""Dense complex tensors with named legs.

A :class:`ComplexTensor` is an immutable n-dimensional complex array whose
axes carry string names. Contraction pairs legs by name, and comparisons
are made modulo a global phase because every identity checked by this
package is projective.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-10


class LegError(ValueError):
    """Raised for unknown legs, duplicate names or dimension mismatches."""


@dataclass(frozen=True, eq=False)
class ComplexTensor:
    """Immutable dense tensor with named legs.

    Parameters
    ----------
    legs : sequence of (str, int)
        Leg names and dimensions, in axis order.
    data : array_like
        Amplitudes. Anything that reshapes to the leg dimensions in row-major
        order is accepted.
    """

    legs: tuple[tuple[str, int], ...]
    data: np.ndarray

    def __init__(self, legs: Iterable[tuple[str, int]], data) -> None:
        legs = tuple((str(name), int(dim)) for name, dim in legs)
        names = [name for name, _ in legs]
        if len(set(names)) != len(names):
            raise LegError(f"duplicate leg names in {names}")
        if any(dim <= 0 for _, dim in legs):
            raise LegError(f"leg dimensions must be positive: {legs}")
        shape = tuple(dim for _, dim in legs)
        arr = np.asarray(data, dtype=complex)
        if arr.size != int(np.prod(shape, dtype=np.int64)):
            raise LegError(
                f"data has {arr.size} entries but legs {legs} need {int(np.prod(shape))}"
            )
        arr = np.array(arr.reshape(shape), dtype=complex, copy=True)
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor amplitudes must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "legs", legs)
        object.__setattr__(self, "data", arr)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.legs)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.legs)

    def dim(self, name: str) -> int:
        return self.shape[self.axis(name)]

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise LegError(f"unknown leg {name!r}; tensor has {self.names}") from None

    def flat(self) -> np.ndarray:
        """Amplitudes in row-major order over the legs."""
        return self.data.reshape(-1)

    def rename(self, mapping: dict[str, str]) -> "ComplexTensor":
        legs = [(mapping.get(name, name), dim) for name, dim in self.legs]
        return ComplexTensor(legs, self.data)

    def transpose(self, order: Sequence[str]) -> "ComplexTensor":
        """Reorder the legs to ``order`` (must be a permutation of the names)."""
        if sorted(order) != sorted(self.names):
            raise LegError(f"{order} is not a permutation of {self.names}")
        axes = [self.axis(name) for name in order]
        legs = [self.legs[a] for a in axes]
        return ComplexTensor(legs, np.transpose(self.data, axes))

    def conj(self) -> "ComplexTensor":
        return ComplexTensor(self.legs, self.data.conj())

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def __mul__(self, scalar) -> "ComplexTensor":
        return ComplexTensor(self.legs, self.data * complex(scalar))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"ComplexTensor(legs={list(self.legs)})"


@dataclass(frozen=True)
class PhaseMatch:
    """Outcome of a comparison modulo global phase.

    ``phase`` is the unit scalar with ``a ≈ phase * b`` when ``equal``.
    ``max_abs_deviation`` is the largest entrywise deviation after the fit.
    """

    equal: bool
    phase: complex
    max_abs_deviation: float

    def __bool__(self) -> bool:
        return self.equal

    def to_dict(self) -> dict:
        return {
            "equal": bool(self.equal),
            "phase": [float(self.phase.real), float(self.phase.imag)],
            "max_abs_deviation": float(self.max_abs_deviation),
        }


def tensor_from_matrix(matrix, out_leg: str = "r", in_leg: str = "l") -> ComplexTensor:
    """Wrap a matrix ``M[out, in]`` as a two-leg tensor."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2:
        raise LegError("expected a matrix")
    return ComplexTensor([(out_leg, m.shape[0]), (in_leg, m.shape[1])], m)


def tensor_from_vector(vector, leg: str) -> ComplexTensor:
    v = np.asarray(vector, dtype=complex).reshape(-1)
    return ComplexTensor([(leg, v.size)], v)


def contract(
    a: ComplexTensor, b: ComplexTensor, pairs: Sequence[tuple[str, str]]
) -> ComplexTensor:
    """Sum over paired legs of ``a`` and ``b``.

    The result carries the unpaired legs of ``a`` followed by those of ``b``.
    """
    a_axes, b_axes = [], []
    for la, lb in pairs:
        ia, ib = a.axis(la), b.axis(lb)
        if a.shape[ia] != b.shape[ib]:
            raise LegError(
                f"cannot pair {la!r} (dim {a.shape[ia]}) with {lb!r} (dim {b.shape[ib]})"
            )
        a_axes.append(ia)
        b_axes.append(ib)
    if len(set(a_axes)) != len(a_axes) or len(set(b_axes)) != len(b_axes):
        raise LegError("a leg may appear in at most one pair")
    legs = [leg for i, leg in enumerate(a.legs) if i not in a_axes]
    legs += [leg for i, leg in enumerate(b.legs) if i not in b_axes]
    data = np.tensordot(a.data, b.data, axes=(a_axes, b_axes))
    return ComplexTensor(legs, data)


def equal_mod_phase(
    a: ComplexTensor, b: ComplexTensor, tol: float = DEFAULT_TOL
) -> PhaseMatch:
    """Test ``a == e^{iθ} b`` entrywise within ``tol``.

    The phase is fitted from the largest-magnitude entry of ``b``. Legs of
    ``b`` are matched to ``a`` by name, so leg order may differ.
    """
    if sorted(a.legs) != sorted(b.legs):
        raise LegError(f"shape mismatch: {a.legs} vs {b.legs}")
    bd = b.transpose(a.names).data.reshape(-1)
    ad = a.data.reshape(-1)
    return _match_arrays(ad, bd, tol)


def _match_arrays(ad: np.ndarray, bd: np.ndarray, tol: float) -> PhaseMatch:
    if np.max(np.abs(bd), initial=0.0) <= tol and np.max(np.abs(ad), initial=0.0) <= tol:
        dev = float(np.max(np.abs(ad - bd), initial=0.0))
        return PhaseMatch(True, 1.0 + 0j, dev)
    k = int(np.argmax(np.abs(bd)))
    if abs(bd[k]) <= tol or abs(ad[k]) <= tol:
        dev = float(np.max(np.abs(ad - bd)))
        return PhaseMatch(False, 1.0 + 0j, dev)
    ratio = ad[k] / bd[k]
    phase = ratio / abs(ratio)
    dev = float(np.max(np.abs(ad - phase * bd)))
    return PhaseMatch(dev <= tol, complex(phase), dev)


def matrices_equal_mod_phase(a, b, tol: float = DEFAULT_TOL) -> PhaseMatch:
    """Phase-insensitive comparison of two plain arrays of equal shape."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise LegError(f"shape mismatch: {a.shape} vs {b.shape}")
    return _match_arrays(a.reshape(-1), b.reshape(-1), tol)


def proportional(a, b, tol: float = DEFAULT_TOL) -> PhaseMatch:
    """Compare ``a`` and ``b`` after scaling both to unit Frobenius norm.

    Used for identities that hold up to an arbitrary nonzero scalar.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return PhaseMatch(bool(na == nb), 1.0 + 0j, float(abs(na - nb)))
    return matrices_equal_mod_phase(a / na, b / nb, tol)


def reshape_as_operator(
    t: ComplexTensor, in_legs: Sequence[str], out_legs: Sequence[str]
) -> ComplexTensor:
    """Group legs into a matrix ``M[out, in]``.

    The result has two legs named ``"out"`` and ``"in"`` whose dimensions are
    the products of the grouped legs (first listed leg most significant).
    """
    in_legs, out_legs = list(in_legs), list(out_legs)
    if sorted(in_legs + out_legs) != sorted(t.names):
        raise LegError(f"legs {in_legs} + {out_legs} do not partition {t.names}")
    tt = t.transpose(out_legs + in_legs)
    dout = int(np.prod([t.dim(n) for n in out_legs], dtype=np.int64))
    din = int(np.prod([t.dim(n) for n in in_legs], dtype=np.int64))
    return ComplexTensor([("out", dout), ("in", din)], tt.data.reshape(dout, din))


def operator_to_tensor(
    m: ComplexTensor | np.ndarray,
    in_legs: Sequence[tuple[str, int]],
    out_legs: Sequence[tuple[str, int]],
) -> ComplexTensor:
    """Inverse of :func:`reshape_as_operator`; legs come out as ``out_legs + in_legs``."""
    data = m.data if isinstance(m, ComplexTensor) else np.asarray(m, dtype=complex)
    legs = list(out_legs) + list(in_legs)
    return ComplexTensor(legs, data.reshape(-1))
