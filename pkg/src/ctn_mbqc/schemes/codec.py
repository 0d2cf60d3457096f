"""Sign/parity relabelling of a qubit pair.

``|s⟩_s |l⟩_l`` labels the Bell-type pair state ``|0,l⟩ + (−1)^s |1,1−l⟩``
(up to normalization): ``l`` is the parity register and ``s`` the sign.
"""

from __future__ import annotations

import numpy as np

from .. import gates

_H1 = np.kron(gates.H, gates.I2)
ENCODE = _H1 @ gates.CNOT  # physical pair -> (sign, parity)
DECODE = gates.CNOT @ _H1  # (sign, parity) -> physical pair


def _check(state) -> np.ndarray:
    v = np.asarray(state, dtype=complex).reshape(-1)
    if v.size != 4:
        raise ValueError("parity codec acts on two-qubit states")
    return v


def encode(state) -> np.ndarray:
    return ENCODE @ _check(state)


def decode(state) -> np.ndarray:
    return DECODE @ _check(state)


def parity_codec(direction: str, state) -> np.ndarray:
    """Apply the relabelling in ``direction`` ``"encode"`` or ``"decode"``."""
    if direction == "encode":
        return encode(state)
    if direction == "decode":
        return decode(state)
    raise ValueError("direction must be 'encode' or 'decode'")
