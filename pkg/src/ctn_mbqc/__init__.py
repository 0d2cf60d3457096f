"""Measurement-based quantum computation in correlation space.

Resources are matrix product states (1-D) and projected entangled pair
states (2-D). Local measurements induce operators on the virtual
correlation system; the subpackage :mod:`ctn_mbqc.schemes` compiles logical
circuits into adaptive measurement protocols and runs them against an
independent dense-state oracle.
"""

__version__ = "0.1.0"
