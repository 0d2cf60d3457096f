"""Command-line front end.

Every command writes JSON lines to stdout; each line carries the provenance
fields ``resource``, ``seed``, ``tolerance`` and ``version``. Exit codes:
0 when every verdict passes, 1 when a verdict fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SIM_TV_TOL = 0.05


class UsageError(Exception):
    """Bad flags, unreadable input or an unsupported request (exit 2)."""


def version_string() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(["git", "describe", "--tags", "--always", "--dirty"], cwd=here,
                             capture_output=True, text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return f"v{__version__}-g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return f"v{__version__}"


def _clean(x):
    """JSON-safe copy with numpy scalars converted and floats rounded to 12 digits."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return v if not np.isfinite(v) else float(f"{v:.12g}")
    if isinstance(x, complex):
        return [_clean(x.real), _clean(x.imag)]
    return x


class Reporter:
    """Collects report lines and the overall verdict of one command."""

    def __init__(self, args, resource: str, tolerance):
        self.human = getattr(args, "human", False)
        self.prov = {"resource": resource, "seed": getattr(args, "seed", None),
                     "tolerance": tolerance, "version": args.version_string}
        self.failed = False

    def emit(self, record: dict, verdict: bool | None = None, text: str | None = None) -> None:
        if verdict is not None:
            record = dict(record, verdict="pass" if verdict else "fail")
            self.failed |= not verdict
        if self.human:
            print(text if text is not None else _human_line(record))
        else:
            print(json.dumps(_clean({**record, **self.prov}), sort_keys=True))

    @property
    def code(self) -> int:
        return EXIT_FAIL if self.failed else EXIT_OK


def _human_line(rec: dict) -> str:
    head = rec.get("kind", "")
    body = ", ".join(f"{k}={_short(v)}" for k, v in rec.items() if k != "kind")
    return f"{head}: {body}"


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_short(x)}" for k, x in v.items()) + "}"
    return str(v)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------
def cmd_list_resources(args) -> int:
    from .mps import CATALOG_1D
    from .peps import CATALOG_2D
    from .schemes.families import FAMILIES, family_for_resource

    rep = Reporter(args, "catalog", None)
    for dim, names in ((1, CATALOG_1D), (2, CATALOG_2D)):
        for name in names:
            fam = family_for_resource(name)
            scope = FAMILIES[fam].scope if fam else "resource only"
            rep.emit({"kind": "resource", "name": name, "dimension": dim, "family": fam,
                      "scope": scope},
                     text=f"{dim}-D  {name:16s} family={fam or '-'}  scope={scope}")
    return rep.code


def cmd_verify(args) -> int:
    from .schemes.families import family_for_resource
    from .schemes.templates import SUITES, TOL, run_suite

    if args.suite not in list(SUITES) + ["all"]:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES) + ['all']}")
    checks = run_suite(args.suite)
    if args.resource:
        try:
            fam = family_for_resource(args.resource)
        except KeyError as e:
            raise UsageError(str(e.args[0])) from None
        prefixes = {fam, args.resource.split(":")[0], "toric" if fam and "toric" in fam else None}
        prefixes.discard(None)
        checks = [c for c in checks if c.name.split(".")[0] in prefixes]
        if not checks:
            raise UsageError(f"suite {args.suite!r} has no checks for {args.resource}")
    rep = Reporter(args, args.resource or "all", TOL)
    for c in checks:
        rep.emit({"kind": "identity", **c.to_dict()}, c.passed,
                 text=f"{'PASS' if c.passed else 'FAIL'}  {c.name:32s} {c.case:40s} "
                      f"dev={c.deviation:.2e}")
    passed = sum(c.passed for c in checks)
    rep.emit({"kind": "summary", "suite": args.suite, "checks": len(checks), "passed": passed},
             passed == len(checks), text=f"{passed}/{len(checks)} checks pass")
    return rep.code


def _load_circuit(path: str):
    from .schemes.circuit import CircuitError, parse_circuit

    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read circuit file {path}: {e.strerror}") from None
    try:
        return parse_circuit(text)
    except CircuitError as e:
        raise UsageError(f"malformed circuit {path}: {e}") from None


def cmd_simulate(args) -> int:
    from .schemes.circuit import ideal_distribution, tv_distance
    from .schemes.families import compile as compile_circuit
    from .schemes.families import family_for_resource
    from .schemes.protocols import ProtocolError
    from .schemes.runtime import execute, trace_jsonl

    try:
        fam = family_for_resource(args.resource)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    if fam is None:
        raise UsageError(f"{args.resource} has no computational scheme")
    circuit = _load_circuit(args.circuit)
    if args.shots < 1:
        raise UsageError("--shots must be positive")
    try:
        pattern = compile_circuit(circuit, fam)
    except ProtocolError as e:
        raise UsageError(str(e)) from None
    backends = ["correlation_space", "oracle"] if args.backend == "both" else [args.backend]
    ideal = ideal_distribution(circuit) if circuit.measured else {"": 1.0}
    rep = Reporter(args, args.resource, SIM_TV_TOL)
    dists = {}
    for be in backends:
        try:
            report = execute(pattern, be, args.seed, args.shots,
                             trace_shots=args.trace_shots if args.trace else 0)
        except ProtocolError as e:
            raise UsageError(str(e)) from None
        dists[be] = report.distribution
        tv = tv_distance(report.distribution, ideal)
        rep.emit({"kind": "simulation", "family": fam, "backend": be, "shots": args.shots,
                  "distribution": report.distribution, "mean_sites": report.mean_sites,
                  "final_ledgers": report.to_dict()["final_ledgers"], "tv_to_ideal": tv},
                 tv < SIM_TV_TOL)
        if args.trace:
            Path(f"{args.trace}.{be}.jsonl" if len(backends) > 1 else args.trace).write_text(
                trace_jsonl(report))
    rec = {"kind": "comparison", "family": fam, "ideal": ideal}
    if len(backends) == 2:
        tv = tv_distance(dists["correlation_space"], dists["oracle"])
        rep.emit({**rec, "distributions": dists, "tv": tv}, tv < SIM_TV_TOL,
                 text=f"TV(correlation_space, oracle) = {tv:.4f}")
    return rep.code


def cmd_correlations(args) -> int:
    from .analysis import correlation_report

    if args.m < 2 or args.kmax < 1 or args.n < args.kmax + 2:
        raise UsageError("need m >= 2, kmax >= 1 and n >= kmax + 2")
    rep = Reporter(args, f"dihedral:{args.m}", args.tol)
    r = correlation_report(args.m, args.kmax, args.n)
    for row in r["rows"]:
        rep.emit({"kind": "correlation", "m": args.m, "n": args.n, "i": r["i"], **row})
    ratios = [row["ratio"] for row in r["rows"] if row["ratio"] is not None]
    target = r["xi_target"]
    if abs(np.cos(2 * np.pi / args.m)) < 1e-12:
        ok = all(abs(row["connected"]) <= 1e-10 for row in r["rows"])
    else:
        ok = bool(ratios) and all(abs(x - target) <= args.tol for x in ratios)
    rep.emit({"kind": "decay", "m": args.m, "xi_target": target, "xi_measured": r["xi_measured"],
              "ratios": ratios, "stay_probability": r["stay_probability"]}, ok)
    return rep.code


def cmd_hamiltonian(args) -> int:
    from .analysis import parent_hamiltonian

    if not 4 <= args.N <= 8:
        raise UsageError("ring length N must lie in 4..8 (dense diagonalization)")
    rep = Reporter(args, "aklt", 1e-10)
    _, r = parent_hamiltonian(args.N)
    ok = (abs(r["state_energy"]) < 1e-10 and r["degeneracy"] == 1 and r["gap"] > 1e-9
          and r["gamma2_rank"] == 4)
    rep.emit({"kind": "hamiltonian", **{k: v for k, v in r.items() if k != "term_energies"}}, ok)
    return rep.code


def cmd_diluted(args) -> int:
    from .analysis import diluted_bounds

    if args.k < 1 or args.n < 1:
        raise UsageError("n and k must be positive")
    if args.k * args.blocks > 20:
        raise UsageError("blocks * k above 20 qubits exceeds the state-vector cap")
    rep = Reporter(args, "cluster1d", 1e-12)
    r = diluted_bounds(args.n, args.k, blocks=args.blocks)
    ok = abs(r["p1"] - r["p1_closed_form"]) < 1e-12 and r["entropy_within_bound"]
    rep.emit({"kind": "diluted", **r}, ok)
    return rep.code


def _p_values(text: str) -> list[float]:
    try:
        if ":" in text:
            lo, hi, step = (float(x) for x in text.split(":"))
            count = int(round((hi - lo) / step)) + 1
            vals = [lo + i * step for i in range(count)]
        else:
            vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --p {text!r}; use a comma list or lo:hi:step") from None
    if not vals or any(not 0 <= v <= 1 for v in vals):
        raise UsageError("probabilities must lie in [0, 1]")
    return [round(v, 10) for v in vals]


def cmd_percolation(args) -> int:
    from .percolation import curve_csv, success_curve

    if args.dim not in (2, 3):
        raise UsageError("--dim must be 2 or 3")
    if args.trials < 1 or args.n < 2:
        raise UsageError("need n >= 2 and trials >= 1")
    ps = _p_values(args.p)
    rep = Reporter(args, f"bond-percolation-{args.dim}d", None)
    pts = success_curve(args.dim, args.n, ps, args.trials, args.seed, b=args.block,
                        confine=args.confine)
    for pt in pts:
        rep.emit({"kind": "percolation", "dim": args.dim, "n": args.n, "p": pt.p,
                  "trials": pt.trials, "successes": pt.successes, "fraction": pt.fraction,
                  "wilson_low": pt.ci_low, "wilson_high": pt.ci_high,
                  "invalid_certificates": pt.certificate_failures},
                 pt.certificate_failures == 0)
    if args.csv:
        Path(args.csv).write_text(curve_csv(pts))
    return rep.code


def cmd_report(args) -> int:
    """Compact run of every study at small sizes."""
    from .analysis import correlation_report, diluted_bounds, parent_hamiltonian
    from .schemes.templates import run_suite

    checks = run_suite("all")
    rows = [{"study": "identities", "checks": len(checks), "passed": sum(c.passed for c in checks)}]
    for N in (4, 6):
        _, r = parent_hamiltonian(N)
        rows.append({"study": f"hamiltonian N={N}", "ground_energy": r["state_energy"],
                     "gap": r["gap"], "degeneracy": r["degeneracy"]})
    for k in (2, 3, 4):
        r = diluted_bounds(2, k)
        rows.append({"study": f"diluted k={k}", "p1": r["p1"], "entropy": r["entropy_z"],
                     "bound": r["entropy_bound"]})
    for m in (3, 4):
        r = correlation_report(m, 4, 12)
        rows.append({"study": f"dihedral m={m}", "xi_target": r["xi_target"],
                     "xi_measured": r["xi_measured"]})
    rep = Reporter(args, "all", None)
    if args.format == "csv":
        keys = sorted({k for r in rows for k in r})
        print(",".join(keys))
        for r in rows:
            print(",".join(str(_clean(r.get(k, ""))) for k in keys))
        return EXIT_OK
    if args.format == "markdown":
        print("| study | values |\n|---|---|")
        for r in rows:
            print(f"| {r['study']} | " + ", ".join(f"{k}={_short(_clean(v))}" for k, v in r.items()
                                                 if k != "study") + " |")
        return EXIT_OK
    for r in rows:
        rep.emit({"kind": "report", **r})
    return rep.code


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------
def _default_seed() -> int:
    env = os.environ.get("CTN_MBQC_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"CTN_MBQC_SEED must be an integer, got {env!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ctn-mbqc", description="Measurement-based computation in correlation space")
    p.add_argument("--human", action="store_true", help="plain-text summaries instead of JSON")
    p.add_argument("--version", action="version", version=f"ctn-mbqc {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=False):
        sp.add_argument("--human", action="store_true", default=argparse.SUPPRESS)
        if seed:
            sp.add_argument("--seed", type=int, default=None,
                            help="RNG seed (default: $CTN_MBQC_SEED or 0)")
        return sp

    sp = common(sub.add_parser("list-resources", help="catalog of resource states"))
    sp.set_defaults(func=cmd_list_resources)

    sp = common(sub.add_parser("verify", help="operator identity suites"))
    sp.add_argument("--suite", default="identities",
                    help="identities, gates, fragments or all")
    sp.add_argument("--resource", default=None, help="only checks for this resource")
    sp.set_defaults(func=cmd_verify)

    sp = common(sub.add_parser("simulate", help="run a circuit on a resource"), seed=True)
    sp.add_argument("--resource", required=True)
    sp.add_argument("--circuit", required=True, help="circuit JSON file")
    sp.add_argument("--shots", type=int, default=1000)
    sp.add_argument("--backend", choices=["correlation_space", "oracle", "both"],
                    default="correlation_space")
    sp.add_argument("--trace", default=None, help="write the measurement trace (JSONL)")
    sp.add_argument("--trace-shots", type=int, default=1)
    sp.set_defaults(func=cmd_simulate)

    sp = common(sub.add_parser("correlations", help="dihedral chain Z-Z correlators"))
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--kmax", type=int, default=4)
    sp.add_argument("--n", type=int, default=12)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.set_defaults(func=cmd_correlations)

    sp = common(sub.add_parser("hamiltonian", help="parent Hamiltonian on a ring"))
    sp.add_argument("--N", type=int, default=4)
    sp.set_defaults(func=cmd_hamiltonian)

    sp = common(sub.add_parser("diluted", help="diluted cluster statistics"))
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--blocks", type=int, default=2)
    sp.set_defaults(func=cmd_diluted)

    sp = common(sub.add_parser("percolation", help="bond percolation success curves"), seed=True)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--n", type=int, default=40)
    sp.add_argument("--p", default="0.4,0.5,0.6", help="comma list or lo:hi:step")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--block", type=int, default=5)
    sp.add_argument("--confine", choices=["none", "pair"], default="none")
    sp.add_argument("--csv", default=None, help="also write the curve as CSV")
    sp.set_defaults(func=cmd_percolation)

    sp = common(sub.add_parser("report", help="summary of all studies"))
    sp.add_argument("--format", choices=["jsonl", "csv", "markdown"], default="jsonl")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        args.version_string = version_string()
        return args.func(args)
    except UsageError as e:
        print(json.dumps({"error": str(e), "exit": EXIT_USAGE}), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
