"""Command-line front end: scenario files in, deterministic reports out.

Scenario files are JSON documents::

    {
      "worlds": ["w1", "w2"],
      "agent": [0.5, 0.5],
      "expert": [[0.0, 1.0], [1.0, 0.0]],
      "gambles": {"bet": [1.0, -1.0]}
    }

``worlds`` labels the space, ``agent`` is the agent's mass function,
``expert`` row i is the expert's mass function if world i is the case, and
the optional ``gambles`` map names payoff vectors for local checks.

Subcommands: ``check`` (exact trust verdict, optionally for one named
gamble), ``score`` (expected gap plus its identity form), ``identity``
(identity form alone), ``ae-trust`` (sampled violation frequency), and
``counterexample`` (witness, violation box, and an adversarial measure
with a statistically positive gap).

Exit codes: 0 evaluated, 2 input error, 3 counterexample requested but
trust holds, 4 adversarial search exhausted.

Reports render as JSON (machine) or aligned text (human).  JSON output is
byte-identical across reruns with the same inputs and seed: numbers carry
17 significant digits and wall-clock timing goes to stderr, never into the
JSON document.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from .accuracy import expected_gap, rhs_identity
from .adversarial import SearchExhaustedError, build_adversarial_measure
from .boxes import ViolationBox, build_positive_box, build_violation_box
from .core import Event, Gamble, ProbMass, ValidationError, WorldSpace, expectation
from .measures import MeasureSpec
from .sampling import ScoreEstimate
from .trust import (
    Scenario,
    TrustVerdict,
    check_global_trust,
    check_local_trust,
    estimate_ae_trust,
)

__all__ = ["main", "load_scenario", "scenario_digest", "scenario_to_document"]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TRUST_HOLDS = 3
EXIT_EXHAUSTED = 4


class InputError(Exception):
    """Anything wrong with the invocation or the scenario file."""


# ---------------------------------------------------------------------------
# Scenario ingestion
# ---------------------------------------------------------------------------


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InputError(message)


def load_scenario(path: str) -> tuple[Scenario, dict[str, Gamble]]:
    """Parse and validate a scenario file, with field-level diagnostics."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc

    _require(isinstance(raw, dict), "scenario document must be a JSON object")
    for key in ("worlds", "agent", "expert"):
        _require(key in raw, f"scenario is missing the {key!r} field")
    unknown = set(raw) - {"worlds", "agent", "expert", "gambles"}
    _require(not unknown, f"unknown scenario fields: {sorted(unknown)}")

    worlds = raw["worlds"]
    _require(
        isinstance(worlds, list) and worlds and all(isinstance(w, str) for w in worlds),
        "worlds must be a nonempty array of label strings",
    )
    try:
        space = WorldSpace(tuple(worlds))
    except ValidationError as exc:
        raise InputError(f"worlds: {exc}") from exc
    n = space.n

    def parse_vector(values: object, field: str) -> np.ndarray:
        _require(
            isinstance(values, list) and all(isinstance(v, (int, float)) for v in values),
            f"{field} must be an array of numbers",
        )
        _require(
            len(values) == n, f"{field} has {len(values)} entries, expected {n}"
        )
        return np.asarray(values, dtype=float)

    def parse_mass(values: object, field: str) -> ProbMass:
        vec = parse_vector(values, field)
        try:
            return ProbMass(vec)
        except ValidationError as exc:
            raise InputError(f"{field} {exc}") from exc

    agent = parse_mass(raw["agent"], "agent")
    expert_raw = raw["expert"]
    _require(
        isinstance(expert_raw, list) and len(expert_raw) == n,
        f"expert must be an array of {n} rows (one prevision per world)",
    )
    expert = tuple(parse_mass(row, f"expert row {i + 1}") for i, row in enumerate(expert_raw))
    scenario = Scenario(space=space, agent=agent, expert=expert)

    gambles: dict[str, Gamble] = {}
    if "gambles" in raw:
        _require(isinstance(raw["gambles"], dict), "gambles must be an object of named vectors")
        for name, values in raw["gambles"].items():
            try:
                gambles[name] = Gamble(parse_vector(values, f"gamble {name!r}"))
            except ValidationError as exc:
                raise InputError(f"gamble {name!r}: {exc}") from exc
    return scenario, gambles


def scenario_to_document(scenario: Scenario, gambles: dict[str, Gamble] | None = None) -> dict:
    """The JSON-ready document a scenario (re)serializes to."""
    document = {
        "worlds": list(scenario.space.labels),
        "agent": scenario.agent.weights.tolist(),
        "expert": [p.weights.tolist() for p in scenario.expert],
    }
    if gambles:
        document["gambles"] = {name: g.values.tolist() for name, g in gambles.items()}
    return document


def scenario_digest(scenario: Scenario) -> str:
    """Content hash of the normalized scenario (labels included)."""
    canonical = json.dumps(
        {
            "worlds": list(scenario.space.labels),
            "agent": [_format_float(w) for w in scenario.agent.weights],
            "expert": [[_format_float(w) for w in p.weights] for p in scenario.expert],
        },
        sort_keys=True,
        separators=(",", ":"),
    )
    return "sha256:" + hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------


def _format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    text = format(x, ".17g")
    if not any(ch in text for ch in ".eE"):
        text += ".0"
    return text


def _to_json(value, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {_to_json(v, indent + 1)}" for k, v in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_to_json(v, indent) for v in value) + "]"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        text = _format_float(float(value))
        return json.dumps(text) if text in ("nan", "inf", "-inf") else text
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _to_text(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(value, dict):
        width = max((len(str(k)) for k in value), default=0)
        for key, item in value.items():
            if isinstance(item, dict):
                lines.append(f"{pad}{key}:")
                lines.extend(_to_text(item, indent + 1))
            else:
                lines.append(f"{pad}{str(key):<{width}}  {_scalar_text(item)}")
    else:
        lines.append(f"{pad}{_scalar_text(value)}")
    return lines


def _scalar_text(value) -> str:
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_scalar_text(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_scalar_text(v)}" for k, v in value.items()) + "}"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    return str(value)


def _emit(report: dict, fmt: str, elapsed: float) -> None:
    if fmt == "json":
        sys.stdout.write(_to_json(report) + "\n")
        sys.stderr.write(f"wall_clock_s: {elapsed:.3f}\n")
    else:
        lines = _to_text(report)
        lines.append(f"wall_clock_s  {elapsed:.3f}")
        sys.stdout.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Report fragments
# ---------------------------------------------------------------------------


def _event_labels(space: WorldSpace, event: Event | None) -> list[str] | None:
    if event is None:
        return None
    return [space.labels[i] for i in event.sorted_members()]


def _verdict_fragment(scenario: Scenario, verdict: TrustVerdict) -> dict:
    return {
        "holds": verdict.holds,
        "margin": verdict.margin,
        "witness": None if verdict.witness is None else verdict.witness.values.tolist(),
        "witness_event": _event_labels(scenario.space, verdict.witness_event),
        "witness_value": verdict.witness_value,
    }


def _estimate_fragment(estimate: ScoreEstimate) -> dict:
    return {
        "value": estimate.value,
        "std_error": estimate.std_error,
        "samples": estimate.samples,
        "seed": estimate.seed,
    }


def _box_fragment(scenario: Scenario, box: ViolationBox) -> dict:
    return {
        "orientation": box.orientation.value,
        "event": _event_labels(scenario.space, box.event),
        "value_margin": box.value_margin,
        "event_margin": box.event_margin,
        "delta": box.delta,
        "lower": box.lower.tolist(),
        "upper": box.upper.tolist(),
    }


def _measure_fragment(measure: MeasureSpec) -> dict:
    return {
        "kind": measure.kind,
        "sigma": measure.sigma,
        "base_weight": measure.base_weight,
        "bumps": [
            {"center": b.center.values.tolist(), "scale": b.scale, "weight": b.weight}
            for b in measure.bumps
        ],
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(raw: str) -> float:
    value = float(raw)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def _base_report(command: str, args: argparse.Namespace, scenario: Scenario) -> dict:
    report = {"command": command, "scenario": args.scenario, "digest": scenario_digest(scenario)}
    for key in ("gamble", "sigma", "samples", "seed"):
        if hasattr(args, key) and getattr(args, key) is not None:
            report[key] = getattr(args, key)
    return report


def _cmd_check(args: argparse.Namespace) -> tuple[int, dict]:
    scenario, gambles = load_scenario(args.scenario)
    report = _base_report("check", args, scenario)
    report["global"] = _verdict_fragment(scenario, check_global_trust(scenario))
    if args.gamble is not None:
        if args.gamble not in gambles:
            raise InputError(
                f"gamble {args.gamble!r} not present in {args.scenario} "
                f"(available: {sorted(gambles)})"
            )
        verdict = check_local_trust(scenario, gambles[args.gamble])
        fragment = _verdict_fragment(scenario, verdict)
        fragment["gamble"] = args.gamble
        report["local"] = fragment
    return EXIT_OK, report


def _cmd_score(args: argparse.Namespace) -> tuple[int, dict]:
    scenario, _ = load_scenario(args.scenario)
    measure = MeasureSpec.gaussian(args.sigma)
    report = _base_report("score", args, scenario)
    report["gap"] = _estimate_fragment(expected_gap(scenario, measure, args.samples, args.seed))
    report["identity"] = _estimate_fragment(
        rhs_identity(scenario, measure, args.samples, args.seed)
    )
    return EXIT_OK, report


def _cmd_identity(args: argparse.Namespace) -> tuple[int, dict]:
    scenario, _ = load_scenario(args.scenario)
    measure = MeasureSpec.gaussian(args.sigma)
    report = _base_report("identity", args, scenario)
    report["identity"] = _estimate_fragment(
        rhs_identity(scenario, measure, args.samples, args.seed)
    )
    return EXIT_OK, report


def _cmd_ae_trust(args: argparse.Namespace) -> tuple[int, dict]:
    scenario, _ = load_scenario(args.scenario)
    report = _base_report("ae-trust", args, scenario)
    report["violation_frequency"] = _estimate_fragment(
        estimate_ae_trust(scenario, args.sigma, args.samples, args.seed)
    )
    return EXIT_OK, report


def _cmd_counterexample(args: argparse.Namespace) -> tuple[int, dict]:
    scenario, _ = load_scenario(args.scenario)
    report = _base_report("counterexample", args, scenario)
    verdict = check_global_trust(scenario)
    report["verdict"] = _verdict_fragment(scenario, verdict)
    if verdict.holds:
        return EXIT_TRUST_HOLDS, report

    witness = verdict.witness
    assert witness is not None
    if expectation(scenario.agent, witness) > 0.0:
        box = build_positive_box(scenario, witness)
    else:
        box = build_violation_box(scenario, witness)
    report["box"] = _box_fragment(scenario, box)

    try:
        measure, estimate = build_adversarial_measure(
            scenario, box, base_sigma=args.sigma, samples=args.samples, seed=args.seed
        )
    except SearchExhaustedError as exc:
        report["error"] = str(exc)
        report["best_weight"] = exc.best_weight
        report["gap"] = _estimate_fragment(exc.best_estimate)
        return EXIT_EXHAUSTED, report
    report["measure"] = _measure_fragment(measure)
    report["gap"] = _estimate_fragment(estimate)
    return EXIT_OK, report


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deference-lab",
        description="Decide Total Trust exactly and verify its accuracy characterisation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, *, gamble=False, sigma=False, sampled=False):
        cmd = sub.add_parser(name)
        cmd.add_argument("scenario", help="path to a scenario JSON file")
        if gamble:
            cmd.add_argument("--gamble", default=None, help="named gamble for a local check")
        if sigma:
            cmd.add_argument("--sigma", type=_positive_float, default=1.0)
        if sampled:
            cmd.add_argument("--samples", type=_positive_int, default=100_000)
            cmd.add_argument("--seed", type=int, default=0)
        cmd.add_argument("--format", choices=("json", "text"), default="json")
        cmd.set_defaults(handler=handler)

    add("check", _cmd_check, gamble=True)
    add("score", _cmd_score, sigma=True, sampled=True)
    add("identity", _cmd_identity, sigma=True, sampled=True)
    add("ae-trust", _cmd_ae_trust, sigma=True, sampled=True)
    add("counterexample", _cmd_counterexample, sigma=True, sampled=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0

    started = time.perf_counter()
    try:
        code, report = args.handler(args)
    except (InputError, ValidationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    _emit(report, args.format, time.perf_counter() - started)
    return code


if __name__ == "__main__":
    sys.exit(main())
