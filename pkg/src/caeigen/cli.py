"""Command-line entry point.

Every analysis is exposed as a subcommand; every report embeds the full
command spec, seed and tool version so runs replay byte-identically.  Timing
is printed to stderr only, never serialized into the payload.  Exit codes:
0 success, 2 ran fine but the evidence is inconclusive (Unknown-dominated or
fully censored), 1 error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .blocking import (
    BlockingBudget,
    BlockingQuery,
    BlockingSearchReport,
    BlockingVerdict,
    CERTIFIED,
    REFUTED,
    UNKNOWN,
    certify_blocking,
    classify_kurka,
    refute_blocking,
    search_blocking_words,
)
from .errors import CaeigenError, MalformedSpec
from .factor import FactorMap, build_periodic_factor, verify_semiconjugacy
from .lattice import Alphabet, Pattern, RandomSource, TorusConfig, parse_pattern, parse_torus
from .rules import CellularAutomaton, automaton, parse_rule, step
from .spectral import (
    EigenvalueReport,
    Observable,
    WeylSpectrum,
    character_observable,
    default_observable,
    identity_power_search,
    indicator_observable,
    scan_spectrum,
)
from .surjectivity import (
    BALANCED_NECESSARY_ONLY,
    NOT_SURJECTIVE,
    SURJECTIVE,
    SurjectivityVerdict,
    balance_check,
    decide_surjective,
    decide_surjective_1d,
)
from .traces import (
    GilmanReport,
    QnEstimate,
    classify_gilman,
    estimate_mu_qn,
    trace as trace_op,
)

ENV_SEED = "CAEIGEN_SEED"
DEFAULT_SEED = 0


@dataclass(frozen=True)
class CommandSpec:
    command: str
    params: dict
    seed: int
    output_format: str = "json"
    output_path: str | None = None

    def to_json_obj(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "format": self.output_format,
        }


@dataclass
class ReportEnvelope:
    spec: CommandSpec
    results: dict
    warnings: list[str]
    timing_seconds: float = 0.0
    exit_code: int = 0

    def payload(self) -> dict:
        # timing deliberately excluded: replays must be byte-identical
        return {
            "tool": "caeigen",
            "version": __version__,
            "spec": self.spec.to_json_obj(),
            "results": self.results,
            "warnings": sorted(self.warnings),
        }

    def serialize(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2) + "\n"


# ------------------------------ serialization ------------------------------

def _pattern_obj(p: Pattern | TorusConfig) -> dict:
    return p.to_json_obj()


def _surjectivity_obj(v: SurjectivityVerdict) -> dict:
    out = {"status": v.status, "method": v.method}
    if v.witness is not None:
        out["witness"] = _pattern_obj(v.witness)
    if v.symbol_counts is not None:
        out["symbol_counts"] = list(v.symbol_counts)
    return out


def _verdict_obj(v: BlockingVerdict) -> dict:
    out = {
        "status": v.status,
        "word": _pattern_obj(v.query.word),
        "offset": list(v.query.offset),
        "window": list(v.query.window),
        "horizon": v.horizon,
    }
    if v.reason:
        out["reason"] = v.reason
    if v.order is not None:
        out["order"] = {"preperiod": v.order[0], "period": v.order[1]}
    if v.certificate is not None:
        out["certificate"] = {
            "set_preperiod": v.certificate.set_preperiod,
            "set_period": v.certificate.set_period,
            "preperiod": v.certificate.preperiod,
            "period": v.certificate.period,
            "window_patterns": [_pattern_obj(p) for p in v.certificate.window_patterns],
        }
    if v.witness is not None:
        out["witness"] = {
            "pattern_a": _pattern_obj(v.witness.pattern_a),
            "pattern_b": _pattern_obj(v.witness.pattern_b),
            "position": list(v.witness.position),
            "time": v.witness.time,
            "window_a": _pattern_obj(v.witness.window_a),
            "window_b": _pattern_obj(v.witness.window_b),
        }
    return out


def _search_obj(rep: BlockingSearchReport) -> dict:
    return {
        "certified": [_verdict_obj(v) for v in rep.certified],
        "examined": rep.examined,
        "refuted_count": rep.refuted_count,
        "unknown_count": rep.unknown_count,
        "max_len": rep.max_len,
        "offsets_mode": rep.offsets_mode,
        "skipped_sizes": [list(s) for s in rep.skipped_sizes],
    }


def _qn_obj(est: QnEstimate) -> dict:
    return {
        "n": est.n,
        "k": est.k,
        "horizon": est.horizon,
        "samples": est.samples,
        "hits": est.hits,
        "no_k_count": est.no_k_count,
        "censored_count": est.censored_count,
        "point": est.point,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "note": est.note,
    }


def _spectrum_obj(ws: WeylSpectrum) -> dict:
    return {
        "orbit_len": ws.orbit_len,
        "samples": ws.samples,
        "threshold": ws.threshold,
        "points": [
            {
                "label": pt.label,
                "alpha": pt.value,
                "magnitude": mag,
                "stderr": err,
            }
            for pt, mag, err in zip(ws.points, ws.magnitudes, ws.stderr)
        ],
        "peaks": [{"label": pt.label, "magnitude": mag} for pt, mag in ws.peaks],
    }


def _gilman_obj(rep: GilmanReport) -> dict:
    return {
        "class": rep.klass,
        "certified": rep.certified,
        "m": rep.m,
        "n_grid": list(rep.n_grid),
        "horizon": rep.horizon,
        "samples": rep.samples,
        "scores": [list(row) for row in rep.scores],
        "decision_path": list(rep.decision_path),
    }


# ------------------------------ literal parsing ------------------------------

def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get(ENV_SEED)
    return int(env) if env else DEFAULT_SEED


def _parse_vector(text: str, d: int) -> tuple[int, ...]:
    parts = [p for p in text.split(",") if p != ""]
    if len(parts) == 1 and d > 1:
        parts = parts * d
    if len(parts) != d:
        raise MalformedSpec(f"expected {d} comma-separated integers, got {text!r}")
    return tuple(int(p) for p in parts)


def parse_observable(text: str, ca: CellularAutomaton) -> Observable:
    """"[PATTERN]@POS" (cylinder indicator) or "char:WEIGHTS@POS"."""
    text = text.strip()
    m = re.fullmatch(r"\[(.+)\]@(.+)", text)
    if m:
        pat = parse_pattern(m.group(1), ca.alphabet)
        pos = _parse_vector(m.group(2), ca.dimension)
        return indicator_observable(pat, pos)
    m = re.fullmatch(r"char:(.+)@(.+)", text)
    if m:
        rows = m.group(1).split("/")
        weights = [[int(v) for v in row.split(",")] for row in rows]
        arr = np.array(weights[0] if len(weights) == 1 else weights)
        pos = _parse_vector(m.group(2), ca.dimension)
        return character_observable(arr, pos)
    raise MalformedSpec(f"unrecognized observable literal {text!r}")


# ------------------------------ handlers ------------------------------

def _blocking_budget(args) -> BlockingBudget:
    kw = {}
    if getattr(args, "state_cap", None) is not None:
        kw["state_cap"] = args.state_cap
    if getattr(args, "budget", None) is not None:
        kw["certify_horizon"] = args.budget
        kw["refute_horizon"] = args.budget
    return BlockingBudget(**kw)


def _handle_rule(args, seed):
    ca = automaton(args.rule)
    if args.sub == "parse":
        return {"rule": ca.rule.to_json_obj()}, [], 0
    if args.sub == "info":
        bal = balance_check(ca)
        return {
            "rule": ca.rule.to_json_obj(),
            "radius": ca.radius,
            "diameter": list(ca.rule.diameter),
            "balance": _surjectivity_obj(bal),
        }, [], 0
    # surjective
    verdict = decide_surjective(ca)
    warnings = []
    if verdict.status == BALANCED_NECESSARY_ONLY:
        warnings.append(
            "balance is only a necessary condition; exact surjectivity is "
            "undecidable for d >= 2"
        )
    code = 2 if verdict.status == "Unknown" else 0
    return {"surjectivity": _surjectivity_obj(verdict)}, warnings, code


def _handle_step(args, seed):
    ca = automaton(args.rule)
    x = parse_torus(args.config, ca.alphabet)
    y = step(ca, x, args.steps)
    return {"initial": _pattern_obj(x), "steps": args.steps, "result": _pattern_obj(y)}, [], 0


def _handle_blocking(args, seed):
    ca = automaton(args.rule)
    budget = _blocking_budget(args)
    if args.sub == "search":
        rep = search_blocking_words(ca, args.max_len, offsets=args.offsets, budget=budget)
        warnings = []
        if rep.unknown_count:
            warnings.append(f"{rep.unknown_count} candidate words remained Unknown")
        if rep.skipped_sizes:
            warnings.append("some candidate sizes were skipped by the enumeration budget")
        return {"search": _search_obj(rep)}, warnings, 0
    word = parse_pattern(args.word, ca.alphabet)
    d = ca.dimension
    offset = _parse_vector(args.offset, d) if args.offset else (0,) * d
    window = _parse_vector(args.window, d) if args.window else (ca.radius,) * d
    query = BlockingQuery(ca, word, offset, window)
    if args.sub == "certify":
        verdict = certify_blocking(query, budget)
    else:
        verdict = refute_blocking(query, horizon=args.horizon, budget=budget)
    warnings = []
    code = 0
    if verdict.status == UNKNOWN:
        warnings.append(f"verdict Unknown: {verdict.reason}")
        code = 2
    return {"verdict": _verdict_obj(verdict)}, warnings, code


def _handle_trace(args, seed):
    ca = automaton(args.rule)
    x = parse_torus(args.config, ca.alphabet)
    n = args.n if args.n is not None else 2 * ca.radius
    windows = trace_op(ca, x, n, args.horizon)
    return {
        "n": n,
        "horizon": args.horizon,
        "windows": [_pattern_obj(p) for p in windows],
    }, [], 0


def _handle_qn(args, seed):
    ca = automaton(args.rule)
    rng = RandomSource(seed)
    est = estimate_mu_qn(ca, args.n, args.k, args.horizon, args.samples, rng)
    warnings = []
    if est.censored_count:
        warnings.append(
            f"{est.censored_count} draws censored at horizon {est.horizon}; "
            "the point estimate is a lower bound"
        )
    code = 2 if est.censored_count == est.samples else 0
    return {"estimate": _qn_obj(est), "rule": args.rule}, warnings, code


def _handle_gilman(args, seed):
    ca = automaton(args.rule)
    rng = RandomSource(seed)
    probes = None
    if args.probes:
        with open(args.probes, "r", encoding="utf-8") as fh:
            literals = json.load(fh)
        probes = [parse_torus(json.dumps(obj) if isinstance(obj, dict) else obj, ca.alphabet)
                  for obj in literals]
    rep = classify_gilman(
        ca, probes=probes, m=args.m, T=args.horizon, N=args.samples, rng=rng
    )
    warnings = []
    if not rep.certified:
        warnings.append("classification is heuristic (no certificate)")
    return {"gilman": _gilman_obj(rep)}, warnings, 0


def _handle_spectrum(args, seed):
    ca = automaton(args.rule)
    rng = RandomSource(seed)
    g = parse_observable(args.observable, ca) if args.observable else default_observable(ca)
    ws = scan_spectrum(
        ca,
        g=g,
        p_max=args.pmax,
        samples=args.samples,
        N=args.N,
        rng=rng,
        torus_extent=args.torus_extent,
        threshold=args.threshold,
    )
    return {"spectrum": _spectrum_obj(ws), "rule": args.rule}, [], 0


def _handle_factor(args, seed):
    rng = RandomSource(seed)
    if args.sub == "build":
        ca = automaton(args.rule)
        word = parse_pattern(args.word, ca.alphabet)
        fm = build_periodic_factor(ca, word, n=args.n, rng=rng)
        return {"factor": fm.to_json_obj()}, [], 0
    with open(args.factor, "r", encoding="utf-8") as fh:
        fm = FactorMap.from_json_obj(json.load(fh))
    rep = verify_semiconjugacy(fm, samples=args.samples, horizon=args.horizon, rng=rng)
    warnings = []
    if rep.domain_misses:
        warnings.append(f"{rep.domain_misses} iterate observations fell outside the factor domain")
    return {
        "verify": {
            "samples": rep.samples,
            "horizon": rep.horizon,
            "rotation_period": rep.rotation_period,
            "violation_count": rep.violation_count,
            "violations": [list(v) for v in rep.violations],
            "domain_misses": rep.domain_misses,
            "verified": rep.verified,
        }
    }, warnings, 0 if rep.verified else 2


# ------------------------------ theorem suite ------------------------------

@dataclass(frozen=True)
class SuiteBudgets:
    blocking_max_len: int = 4
    qn_n: int = 1
    qn_k: int = 8
    qn_horizon: int = 64
    qn_samples: int = 300
    spectrum_pmax: int = 8
    spectrum_samples: int = 25
    spectrum_N: int = 4096
    identity_pmax: int = 16
    factor_samples: int = 1000
    factor_horizon: int = 200
    probe_threshold: float = 0.05


CONSISTENT = "Consistent"
NOT_APPLICABLE = "NotApplicable"
ATTENTION = "AttentionNeeded"

PROP_RATIONAL_ONLY = "rational-only-topological-spectrum"
PROP_FACTOR = "periodic-factor-from-blocking-word"
PROP_TRACE = "trace-periodicity-excludes-irrational-eigenvalues"
PROP_EQUI = "equicontinuous-implies-rational-spectrum"
PROP_FULLY = "fully-blocking-excludes-irrational-eigenvalues"


def theorem_suite(
    rule_specs: list[str],
    seed: int = DEFAULT_SEED,
    budgets: SuiteBudgets | None = None,
) -> tuple[dict, list[str], int]:
    """Batch every analysis over a rule list and mark each reference claim
    Consistent / NotApplicable / AttentionNeeded per rule."""
    budgets = budgets or SuiteBudgets()
    warnings: list[str] = []
    rows = {}
    streams = RandomSource(seed).split(max(1, len(rule_specs)))
    for spec, stream in zip(rule_specs, streams):
        qn_rng, spec_rng, factor_rng = stream.split(3)
        ca = automaton(spec)
        row: dict = {}

        surj = decide_surjective(ca)
        row["surjectivity"] = _surjectivity_obj(surj)
        surjective_established = surj.status == SURJECTIVE
        if surj.status == BALANCED_NECESSARY_ONLY:
            warnings.append(f"{spec}: surjectivity undecided (necessary condition only)")

        search = search_blocking_words(ca, budgets.blocking_max_len)
        row["blocking_search"] = _search_obj(search)
        fully = [
            v for v in search.certified
            if all(p == 0 for p in v.query.offset)
        ]

        est = estimate_mu_qn(
            ca, budgets.qn_n, budgets.qn_k, budgets.qn_horizon, budgets.qn_samples, qn_rng
        )
        row["qn_estimate"] = _qn_obj(est)
        if est.censored_count:
            warnings.append(f"{spec}: {est.censored_count} censored trace draws")

        ws = scan_spectrum(
            ca,
            p_max=budgets.spectrum_pmax,
            samples=budgets.spectrum_samples,
            N=budgets.spectrum_N,
            rng=spec_rng,
        )
        row["spectrum"] = _spectrum_obj(ws)
        probe_max = max(
            mag for pt, mag in zip(ws.points, ws.magnitudes) if not pt.is_rational
        )
        probes_ok = probe_max <= budgets.probe_threshold

        ident = identity_power_search(ca, p_max=budgets.identity_pmax, rng=spec_rng)
        row["identity_power"] = {"power": ident.power, "p_max": ident.p_max, "caveat": ident.caveat}
        warnings.append(f"{spec}: identity power evidence is necessary-only")

        factor_status = "not-attempted"
        factor_report = None
        candidate = next((v for v in fully if v.order and v.order[1] >= 2), None)
        if candidate is not None:
            try:
                fm = build_periodic_factor(
                    ca, candidate.query.word, n=max(1, ca.radius), rng=factor_rng
                )
                rep = verify_semiconjugacy(
                    fm,
                    ca,
                    samples=budgets.factor_samples,
                    horizon=budgets.factor_horizon,
                    rng=factor_rng,
                )
                factor_status = "verified" if rep.verified else "violations"
                factor_report = {
                    "period": fm.period,
                    "word": _pattern_obj(fm.word),
                    "violation_count": rep.violation_count,
                    "domain_misses": rep.domain_misses,
                }
            except CaeigenError as exc:
                factor_status = f"failed: {type(exc).__name__}"
        row["factor"] = {"status": factor_status, "report": factor_report}

        matrix = {}
        matrix[PROP_RATIONAL_ONLY] = CONSISTENT if probes_ok else ATTENTION
        if candidate is None:
            matrix[PROP_FACTOR] = NOT_APPLICABLE
        else:
            matrix[PROP_FACTOR] = CONSISTENT if factor_status == "verified" else ATTENTION
        qn_high = est.point >= 0.99 and est.censored_count == 0
        if surjective_established and qn_high:
            matrix[PROP_TRACE] = CONSISTENT if probes_ok else ATTENTION
        else:
            matrix[PROP_TRACE] = NOT_APPLICABLE
        if surjective_established and ident.power is not None:
            rational_peaks = all(
                pt.is_rational and pt.fraction.denominator and ident.power % pt.fraction.denominator == 0
                for pt, _ in ws.peaks
            )
            matrix[PROP_EQUI] = CONSISTENT if (rational_peaks and probes_ok) else ATTENTION
        else:
            matrix[PROP_EQUI] = NOT_APPLICABLE
        if surjective_established and fully:
            matrix[PROP_FULLY] = CONSISTENT if probes_ok else ATTENTION
        else:
            matrix[PROP_FULLY] = NOT_APPLICABLE
        row["consistency"] = matrix
        rows[spec] = row
    results = {"rules": rows, "budgets": budgets.__dict__}
    attention = any(
        status == ATTENTION
        for row in rows.values()
        for status in row["consistency"].values()
    )
    return results, warnings, 0 if not attention else 2


def _handle_suite(args, seed):
    rules = [r.strip() for r in args.rules.split(",") if r.strip()]
    budgets = SuiteBudgets(
        qn_samples=args.qn_samples,
        spectrum_samples=args.spectrum_samples,
        spectrum_N=args.spectrum_N,
    )
    return theorem_suite(rules, seed, budgets)


# ------------------------------ CSV rendering ------------------------------

def _render_csv(envelope: ReportEnvelope) -> str | None:
    results = envelope.results
    buf = io.StringIO()
    buf.write("# spec: " + json.dumps(envelope.payload()["spec"], sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    if "estimate" in results:
        est = results["estimate"]
        writer.writerow(["rule", "n", "k", "T", "N", "point", "ci_lo", "ci_hi", "censored"])
        writer.writerow([
            results.get("rule", ""), est["n"], est["k"], est["horizon"], est["samples"],
            est["point"], est["ci_low"], est["ci_high"], est["censored_count"],
        ])
        return buf.getvalue()
    if "spectrum" in results:
        writer.writerow(["alpha", "magnitude", "stderr"])
        for pt in results["spectrum"]["points"]:
            writer.writerow([pt["label"], pt["magnitude"], pt["stderr"]])
        return buf.getvalue()
    return None


# ------------------------------ argument parser ------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${ENV_SEED} or 0)")
    p.add_argument("--out", default=None, help="write the report to this path")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caeigen",
        description="Blocking words, trace periodicity and spectral probes for cellular automata",
    )
    parser.add_argument("--version", action="version", version=f"caeigen {__version__}")
    top = parser.add_subparsers(dest="cmd", required=True)

    rule = top.add_parser("rule", help="parse and inspect rules").add_subparsers(
        dest="sub", required=True
    )
    for name in ("parse", "info", "surjective"):
        p = rule.add_parser(name)
        p.add_argument("--rule", required=True)
        _add_common(p)

    p = top.add_parser("step", help="evolve a torus configuration")
    p.add_argument("--rule", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--steps", type=int, default=1)
    _add_common(p)

    blocking = top.add_parser("blocking", help="blocking-word analyses").add_subparsers(
        dest="sub", required=True
    )
    for name in ("certify", "refute"):
        p = blocking.add_parser(name)
        p.add_argument("--rule", required=True)
        p.add_argument("--word", required=True)
        p.add_argument("--offset", default=None)
        p.add_argument("--window", default=None)
        p.add_argument("--horizon", type=int, default=None)
        p.add_argument("--budget", type=int, default=None)
        p.add_argument("--state-cap", dest="state_cap", type=int, default=None)
        _add_common(p)
    p = blocking.add_parser("search")
    p.add_argument("--rule", required=True)
    p.add_argument("--max-len", dest="max_len", type=int, required=True)
    p.add_argument("--offsets", choices=("all", "fully"), default="all")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--state-cap", dest="state_cap", type=int, default=None)
    _add_common(p)

    p = top.add_parser("trace", help="window trace of a configuration")
    p.add_argument("--rule", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--horizon", type=int, default=32)
    _add_common(p)

    qn = top.add_parser("qn", help="trace-periodicity measure estimation").add_subparsers(
        dest="sub", required=True
    )
    p = qn.add_parser("estimate")
    p.add_argument("--rule", required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--horizon", type=int, default=64)
    p.add_argument("--samples", type=int, default=1000)
    _add_common(p)

    p = top.add_parser("gilman", help="measure-equicontinuity classification")
    p.add_argument("--rule", required=True)
    p.add_argument("--probes", default=None, help="JSON file with probe configurations")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--horizon", type=int, default=64)
    p.add_argument("--samples", type=int, default=200)
    _add_common(p)

    p = top.add_parser("spectrum", help="twisted-average frequency scan")
    p.add_argument("--rule", required=True)
    p.add_argument("--observable", default=None, help='e.g. "[1]@0" or "char:1@0"')
    p.add_argument("--pmax", type=int, default=12)
    p.add_argument("--N", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--torus-extent", dest="torus_extent", type=int, default=None)
    p.add_argument("--threshold", type=float, default=0.1)
    _add_common(p)

    factor = top.add_parser("factor", help="rotation factor construction").add_subparsers(
        dest="sub", required=True
    )
    p = factor.add_parser("build")
    p.add_argument("--rule", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--n", type=int, default=1)
    _add_common(p)
    p = factor.add_parser("verify")
    p.add_argument("--factor", required=True, help="FactorMap JSON file")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--horizon", type=int, default=100)
    _add_common(p)

    p = top.add_parser("suite", help="theorem-consistency batch over several rules")
    p.add_argument("--rules", default="eca:204,eca:51,eca:232,eca:170,eca:90")
    p.add_argument("--qn-samples", dest="qn_samples", type=int, default=300)
    p.add_argument("--spectrum-samples", dest="spectrum_samples", type=int, default=25)
    p.add_argument("--spectrum-N", dest="spectrum_N", type=int, default=4096)
    _add_common(p)

    return parser


_HANDLERS = {
    "rule": _handle_rule,
    "step": _handle_step,
    "blocking": _handle_blocking,
    "trace": _handle_trace,
    "qn": _handle_qn,
    "gilman": _handle_gilman,
    "spectrum": _handle_spectrum,
    "factor": _handle_factor,
    "suite": _handle_suite,
}


def run(args: argparse.Namespace) -> ReportEnvelope:
    """Dispatch a parsed command to its handler and assemble the envelope."""
    seed = _resolve_seed(args)
    started = time.monotonic()
    results, warnings, code = _HANDLERS[args.cmd](args, seed)
    elapsed = time.monotonic() - started
    params = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("cmd", "seed", "out", "format") and v is not None
    }
    command = args.cmd if not getattr(args, "sub", None) else f"{args.cmd} {args.sub}"
    spec = CommandSpec(
        command=command,
        params=params,
        seed=seed,
        output_format=getattr(args, "format", "json"),
        output_path=getattr(args, "out", None),
    )
    return ReportEnvelope(spec, results, warnings, timing_seconds=elapsed, exit_code=code)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        envelope = run(args)
    except CaeigenError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = None
    if envelope.spec.output_format == "csv":
        text = _render_csv(envelope)
        if text is None:
            print("note: no tabular rendering for this command, emitting JSON", file=sys.stderr)
    if text is None:
        text = envelope.serialize()
    if envelope.spec.output_path:
        with open(envelope.spec.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"elapsed: {envelope.timing_seconds:.2f}s", file=sys.stderr)
    return envelope.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
