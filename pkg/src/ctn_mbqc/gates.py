"""Exact single- and two-qubit constants used across the package."""

from __future__ import annotations

import numpy as np

SQ2 = 1.0 / np.sqrt(2.0)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([SQ2, SQ2], dtype=complex)
KET_MINUS = np.array([SQ2, -SQ2], dtype=complex)
KET_I = np.array([SQ2, 1j * SQ2], dtype=complex)
KET_MINUS_I = np.array([SQ2, -1j * SQ2], dtype=complex)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = SQ2 * np.array([[1, 1], [1, -1]], dtype=complex)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
SQRT_Z = S

CZ = np.diag([1, 1, 1, -1]).astype(complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def phase_gate(phi: float) -> np.ndarray:
    """S(φ) = diag(1, e^{iφ})."""
    return np.diag([1.0, np.exp(1j * phi)]).astype(complex)


def zz_phase(phi: float) -> np.ndarray:
    """ZZ(φ) = diag(1, e^{iφ}, e^{iφ}, 1), equal to exp(-iφ/2 Z⊗Z) up to phase."""
    e = np.exp(1j * phi)
    return np.diag([1.0, e, e, 1.0]).astype(complex)


def controlled_phase(phi: float) -> np.ndarray:
    """P(φ) = diag(1, 1, 1, e^{iφ}); P(π) is the controlled-Z."""
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * phi)]).astype(complex)


def equatorial(phi: float) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal pair (|0⟩ ± e^{iφ}|1⟩)/√2 on the X–Y great circle."""
    e = np.exp(1j * phi)
    return (
        np.array([SQ2, SQ2 * e], dtype=complex),
        np.array([SQ2, -SQ2 * e], dtype=complex),
    )


def yz_plane(phi: float) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal pair cos(φ/2)|0⟩ + i sin(φ/2)|1⟩ and its complement.

    Measuring a toric K_H tensor in this basis induces ZZ(φ) on its two
    correlation lines for the first outcome and Z⊗Z·ZZ(φ) for the second.
    """
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return (
        np.array([c, 1j * s], dtype=complex),
        np.array([s, -1j * c], dtype=complex),
    )


def kron(*ops) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out
