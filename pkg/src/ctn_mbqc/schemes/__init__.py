"""Computational schemes: logical circuits, adaptive protocols and backends."""

from .circuit import (CircuitError, Gate, LogicalCircuit, ideal_distribution, parse_circuit,
                      random_circuit, tv_distance)
from .families import (FAMILIES, GateRealization, SchemeFamily, compile, family_for_resource,
                       realize_gate)
from .network import CorrelationBackend, LineNetwork, OracleBackend, make_backend
from .protocols import Protocol, ProtocolError, Request
from .runtime import AdaptivePattern, RunReport, exact_distribution, execute, lockstep, trace_jsonl
from .templates import SUITES, Check, run_suite

__all__ = [
    "AdaptivePattern", "CircuitError", "Check", "CorrelationBackend", "FAMILIES", "Gate",
    "GateRealization", "LineNetwork", "LogicalCircuit", "OracleBackend", "Protocol",
    "ProtocolError", "Request", "RunReport", "SUITES", "SchemeFamily", "compile",
    "exact_distribution", "execute", "family_for_resource", "ideal_distribution", "lockstep",
    "make_backend", "parse_circuit", "random_circuit", "realize_gate", "run_suite",
    "trace_jsonl", "tv_distance",
]
