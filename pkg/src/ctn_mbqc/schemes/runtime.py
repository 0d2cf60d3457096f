"""Running adaptive patterns: sampling, exact outcome trees, reports and traces."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .network import LineNetwork, make_backend
from .protocols import Protocol, ProtocolError


@dataclass
class AdaptivePattern:
    """A compiled circuit: a factory of fresh protocol instances.

    The protocol object carries the adaptive rule and the ledger; the
    resource it runs on is built once and shared by all shots.
    """

    family: str
    factory: Callable[[], Protocol]
    circuit: object = None
    _network: LineNetwork | None = field(default=None, repr=False)

    def protocol(self) -> Protocol:
        return self.factory()

    def network(self) -> LineNetwork:
        if self._network is None:
            proto = self.factory()
            self._network = LineNetwork(proto.network_resource(), proto.network_initial())
        return self._network

    @property
    def halts_immediately(self) -> bool:
        gen = self.protocol().steps()
        try:
            next(gen)
        except StopIteration:
            return True
        return False


@dataclass
class RunReport:
    """Per-shot results of one pattern on one backend.

    ``counts`` maps result strings to shot counts; ``ledgers`` counts the
    final ledger (tuple of group element indices per wire); ``sites`` lists
    the number of measurements of each shot.
    """

    family: str
    backend: str
    seed: object
    shots: int
    counts: dict
    ledgers: dict
    sites: list
    trace: list = field(default_factory=list)

    @property
    def distribution(self) -> dict:
        return {k: v / self.shots for k, v in sorted(self.counts.items())}

    @property
    def mean_sites(self) -> float:
        return float(np.mean(self.sites)) if self.sites else 0.0

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "backend": self.backend,
            "seed": self.seed,
            "shots": self.shots,
            "counts": dict(sorted(self.counts.items())),
            "distribution": self.distribution,
            "final_ledgers": {",".join(map(str, k)): v for k, v in sorted(self.ledgers.items())},
            "mean_sites": self.mean_sites,
        }


def _site_json(site):
    return list(site) if isinstance(site, tuple) else site


def run_shot(protocol: Protocol, backend, rng, trace: list | None = None, shot: int = 0):
    """Drive one protocol instance to completion; returns ``(result, measurements)``."""
    gen = protocol.steps()
    count = 0
    try:
        req = next(gen)
    except StopIteration as stop:
        return stop.value, 0
    while True:
        k = backend.sample(req.site, req.basis, rng)
        count += 1
        try:
            nxt = gen.send(k)
        except StopIteration as stop:
            nxt, value = None, stop.value
        if trace is not None:
            trace.append({"shot": shot, "step": count - 1, "site": _site_json(req.site),
                          "basis": req.basis, "role": req.role, "outcome": int(k),
                          "ledger": {str(w): int(i) for w, i in
                                     sorted(protocol.ledger.items(), key=lambda x: str(x))}})
        if nxt is None:
            return value, count
        req = nxt


def execute(pattern: AdaptivePattern, backend: str = "correlation_space", seed=None,
            shots: int = 1000, trace_shots: int = 0) -> RunReport:
    """Sample ``shots`` independent runs of ``pattern``.

    Parameters
    ----------
    backend : {"correlation_space", "oracle"}
    trace_shots : int
        Number of leading shots whose measurement records are kept.

    Raises
    ------
    ProtocolError
        When a retry loop exhausts its step budget.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    net = pattern.network()
    rng = np.random.default_rng(seed)
    counts, ledgers, sites, trace = Counter(), Counter(), [], []
    for shot in range(shots):
        proto = pattern.protocol()
        be = make_backend(backend, net)
        result, n = run_shot(proto, be, rng, trace if shot < trace_shots else None, shot)
        counts[result] += 1
        ledgers[tuple(proto.ledger[w] for w in sorted(proto.ledger, key=str))] += 1
        sites.append(n)
    return RunReport(pattern.family, backend, seed, shots, dict(counts), dict(ledgers),
                     sites, trace)


def lockstep(pattern: AdaptivePattern, seed=None, shots: int = 10) -> float:
    """Largest per-measurement probability gap between the two backends.

    Each shot drives one protocol instance with both backends in step:
    both compute the outcome distribution of every requested measurement,
    the outcome is drawn from the correlation-space one and applied to both.
    """
    net = pattern.network()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(shots):
        corr, orac = make_backend("correlation_space", net), make_backend("oracle", net)
        gen = pattern.protocol().steps()
        try:
            req = next(gen)
            while True:
                p = corr.probabilities(req.site, req.basis)
                q = orac.probabilities(req.site, req.basis)
                worst = max(worst, float(np.max(np.abs(p - q))))
                k = min(int(np.searchsorted(np.cumsum(p), rng.random() * p.sum(), side="right")),
                        len(p) - 1)
                corr.apply(req.site, req.basis, k)
                orac.apply(req.site, req.basis, k)
                req = gen.send(k)
        except StopIteration:
            pass
    return worst


def _replay(pattern: AdaptivePattern, prefix):
    proto = pattern.protocol()
    gen = proto.steps()
    try:
        req = next(gen)
        for k in prefix:
            req = gen.send(k)
    except StopIteration as stop:
        return None, stop.value
    return req, None


def exact_distribution(pattern: AdaptivePattern, backend: str = "correlation_space",
                       min_weight: float = 0.0, max_depth: int = 400,
                       prob_floor: float = 1e-13) -> tuple[dict, float]:
    """Exact result distribution by walking the whole outcome tree.

    Branches whose probability drops below ``min_weight`` are abandoned;
    their total mass is returned as the second value (0 for finite
    patterns explored completely).
    """
    be = make_backend(backend, pattern.network())
    dist: Counter = Counter()
    lost = 0.0
    stack = [((), 1.0, be.snapshot())]
    while stack:
        prefix, w, snap = stack.pop()
        req, result = _replay(pattern, prefix)
        if req is None:
            dist[result] += w
            continue
        if len(prefix) >= max_depth:
            raise ProtocolError(f"outcome tree deeper than {max_depth}")
        be.restore(snap)
        p = be.probabilities(req.site, req.basis)
        for k, pk in enumerate(p):
            if pk <= prob_floor:
                continue
            if w * pk < min_weight:
                lost += w * pk
                continue
            be.restore(snap)
            be.apply(req.site, req.basis, k)
            stack.append((prefix + (k,), w * pk, be.snapshot()))
    return {k: float(v) for k, v in sorted(dist.items())}, float(lost)


def trace_jsonl(report: RunReport) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in report.trace)
