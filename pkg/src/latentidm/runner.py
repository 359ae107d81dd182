"""Scenario documents, execution, and machine-readable reports.

Scenarios are JSON objects with self-describing field names; reports echo
the scenario, carry a kind-specific results payload, and embed the grid and
clamp provenance needed to reproduce every numeric field.  Serialization is
canonical (sorted keys, two-space indent), so re-running a scenario on the
same platform reproduces the report byte-for-byte apart from the timing
block.
"""

from __future__ import annotations

import importlib.resources
import json
import os
import re
import time
from dataclasses import dataclass, field
from typing import Any

from . import __version__
from .errors import ScenarioError
from .idm import BoundaryLimit
from .manifest import (
    BinaryChannel,
    direct_manifest_idm,
    naive_reconstruction,
    scaled_beta_posterior_bounds,
    scaled_beta_posterior_mean,
)
from .observation import (
    EmissionMatrix,
    ManifestDataset,
    SearchSpec,
    posterior_predictive_at_t,
    predictive_bounds,
    vacuity_diagnosis,
)
from .simplex import CLAMP_TO_EPSILON, DirichletParams, SimplexGrid, SimplexPoint
from .vacuity import (
    BoundedFunction,
    ConcentratingSequence,
    LikelihoodFunction,
    TrendReport,
    canonical_concentrating_sequence,
    constant_likelihood,
    coordinate_function,
    coordinate_likelihood,
    dataset_likelihood,
    fixed_strength_concentrating_sequence,
    monomial_function,
    monomial_likelihood,
    verify_theorem1,
)

KINDS = (
    "predict",
    "diagnose",
    "verify-theorem1",
    "theorem-a1a2",
    "scaled-beta",
    "naive-reconstruction",
    "direct-manifest",
)

SCENARIO_DIR_ENV = "LATENTIDM_SCENARIO_DIR"

_CHANNEL_PRESET = re.compile(r"^binary-channel\(\s*([0-9.eE+-]+)\s*,\s*([0-9.eE+-]+)\s*\)$")
_DEFAULT_SCHEDULE = (10, 100, 1000)
_DEFAULT_TREND_GRID_RESOLUTION = 2000


@dataclass(frozen=True)
class Scenario:
    """A validated scenario document."""

    name: str
    kind: str
    raw: dict = field(repr=False)

    @staticmethod
    def from_dict(doc: Any) -> "Scenario":
        if not isinstance(doc, dict):
            raise ScenarioError("scenario document must be a JSON object")
        name = doc.get("name")
        if not isinstance(name, str) or not name:
            raise ScenarioError("field 'name': required non-empty string")
        kind = doc.get("kind")
        if kind not in KINDS:
            raise ScenarioError(f"field 'kind': must be one of {', '.join(KINDS)}; got {kind!r}")
        _VALIDATORS[kind](doc)
        return Scenario(name=name, kind=kind, raw=doc)


# ---------------------------------------------------------------------------
# Field helpers.  Every failure names the offending field.


def _require(doc: dict, key: str, kind=None):
    if key not in doc:
        raise ScenarioError(f"field '{key}': required for this scenario kind")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ScenarioError(f"field '{key}': wrong type, expected {kind}")
    return value


def _positive_number(doc: dict, key: str, default=None) -> float:
    if key not in doc and default is not None:
        return default
    value = _require(doc, key)
    if not isinstance(value, (int, float)) or not value > 0:
        raise ScenarioError(f"field '{key}': must be a positive number")
    return float(value)


def _int_list(doc: dict, key: str) -> list[int]:
    value = _require(doc, key, list)
    if not all(isinstance(v, int) and v >= 0 for v in value):
        raise ScenarioError(f"field '{key}': must be a list of nonnegative integers")
    return value


def _parse_emission(spec, k: int) -> EmissionMatrix:
    if isinstance(spec, str):
        if spec == "identity":
            return EmissionMatrix.identity(k)
        match = _CHANNEL_PRESET.match(spec)
        if match:
            return BinaryChannel(float(match.group(1)), float(match.group(2))).emission()
        raise ScenarioError(
            f"field 'model.emission': unknown preset {spec!r} "
            "(use 'identity', 'binary-channel(eps1,eps2)', or an inline matrix)"
        )
    if isinstance(spec, list):
        try:
            return EmissionMatrix(spec)
        except ValueError as exc:
            raise ScenarioError(f"field 'model.emission': {exc}") from exc
    raise ScenarioError("field 'model.emission': must be a preset string or a matrix")


def _build_dataset(doc: dict) -> ManifestDataset:
    model = _require(doc, "model", dict)
    k = doc.get("k", 2)
    if not isinstance(k, int) or k < 2:
        raise ScenarioError("field 'k': must be an integer >= 2")
    observations = _int_list(doc, "observations")
    if "emissions" in model:
        specs = model["emissions"]
        if not isinstance(specs, list) or len(specs) != len(observations):
            raise ScenarioError("field 'model.emissions': one matrix per observation required")
        emissions = [_parse_emission(spec, k) for spec in specs]
    elif "emission" in model:
        emissions = [_parse_emission(model["emission"], k)] * len(observations)
    else:
        raise ScenarioError("field 'model': needs 'emission' or 'emissions'")
    try:
        return ManifestDataset(
            tuple((em, row) for em, row in zip(emissions, observations)),
            k=k,
        )
    except ValueError as exc:
        raise ScenarioError(f"field 'observations': {exc}") from exc


def _build_search(doc: dict) -> SearchSpec:
    spec = doc.get("search", {})
    if not isinstance(spec, dict):
        raise ScenarioError("field 'search': must be an object")
    try:
        return SearchSpec(
            resolution=spec.get("resolution"),
            clamp=spec.get("clamp", 1e-6),
            refinement_passes=spec.get("refinement_passes", 1),
        )
    except ValueError as exc:
        raise ScenarioError(f"field 'search': {exc}") from exc


def _build_function(spec, k: int) -> BoundedFunction:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ScenarioError("field 'function': must be an object with a 'kind'")
    if spec["kind"] == "coordinate":
        return coordinate_function(int(spec.get("index", 0)), k)
    if spec["kind"] == "monomial":
        return monomial_function(spec.get("exponents", []))
    raise ScenarioError(f"field 'function.kind': unknown kind {spec['kind']!r}")


def _build_likelihood(spec, k: int) -> LikelihoodFunction:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ScenarioError("field 'likelihood': must be an object with a 'kind'")
    kind = spec["kind"]
    if kind == "constant":
        return constant_likelihood()
    if kind == "coordinate":
        return coordinate_likelihood(int(spec.get("index", 0)))
    if kind == "monomial":
        return monomial_likelihood(spec.get("exponents", []))
    if kind == "channel":
        channel = BinaryChannel(float(spec.get("eps1", 0.1)), float(spec.get("eps2", 0.1)))
        rows = spec.get("observations", [])
        data = ManifestDataset.from_rows(channel.emission(), rows)
        return dataset_likelihood(data)
    raise ScenarioError(f"field 'likelihood.kind': unknown kind {kind!r}")


def _build_sequence(doc: dict, target: SimplexPoint) -> ConcentratingSequence:
    spec = doc.get("sequence", {"family": "canonical"})
    if not isinstance(spec, dict):
        raise ScenarioError("field 'sequence': must be an object")
    family = spec.get("family", "canonical")
    if family == "canonical":
        return canonical_concentrating_sequence(target)
    if family == "fixed-strength":
        return fixed_strength_concentrating_sequence(target, float(spec.get("s", 2.0)))
    raise ScenarioError(f"field 'sequence.family': unknown family {family!r}")


def _build_target(doc: dict) -> SimplexPoint:
    target = _require(doc, "target", list)
    try:
        return SimplexPoint(target)
    except ValueError as exc:
        raise ScenarioError(f"field 'target': {exc}") from exc


def _build_channel(doc: dict) -> BinaryChannel:
    spec = _require(doc, "channel", dict)
    try:
        return BinaryChannel(float(spec.get("eps1")), float(spec.get("eps2")))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"field 'channel': {exc}") from exc


def _build_counts(doc: dict) -> tuple[int, int]:
    spec = _require(doc, "dataset", dict)
    positives, total = spec.get("positives"), spec.get("total")
    if not isinstance(positives, int) or not isinstance(total, int) or not 0 <= positives <= total:
        raise ScenarioError("field 'dataset': needs integers 0 <= positives <= total")
    return positives, total


# ---------------------------------------------------------------------------
# Per-kind validation (structure only; numeric work happens in run_scenario).


def _validate_predict(doc: dict) -> None:
    _build_dataset(doc)
    hyper = _require(doc, "hyper", dict)
    if not isinstance(hyper.get("s"), (int, float)) or not hyper["s"] > 0:
        raise ScenarioError("field 'hyper.s': must be a positive number")
    _build_search(doc)


def _validate_diagnose(doc: dict) -> None:
    _build_dataset(doc)


def _validate_trend(doc: dict) -> None:
    target = _build_target(doc)
    _build_function(_require(doc, "function", dict), target.k)
    _build_likelihood(_require(doc, "likelihood", dict), target.k)
    if "contrast_likelihood" in doc:
        _build_likelihood(doc["contrast_likelihood"], target.k)
    _build_sequence(doc, target)
    schedule = doc.get("schedule", list(_DEFAULT_SCHEDULE))
    if not isinstance(schedule, list) or not all(isinstance(n, int) and n > 1 for n in schedule):
        raise ScenarioError("field 'schedule': must be a list of integers > 1")
    deltas = doc.get("deltas", [0.1, 0.01])
    if not isinstance(deltas, list) or not all(
        isinstance(d, (int, float)) and d > 0 for d in deltas
    ):
        raise ScenarioError("field 'deltas': must be a list of positive numbers")


def _validate_scaled_beta(doc: dict) -> None:
    _build_channel(doc)
    _build_counts(doc)
    _positive_number(doc.get("hyper", {}), "s", default=2.0)
    fixed = doc.get("fixed_t1")
    if fixed is not None and not (isinstance(fixed, (int, float)) and 0 < fixed < 1):
        raise ScenarioError("field 'fixed_t1': must lie strictly in (0, 1)")


def _validate_naive(doc: dict) -> None:
    _build_channel(doc)
    _build_counts(doc)


def _validate_direct(doc: dict) -> None:
    _build_counts(doc)


_VALIDATORS = {
    "predict": _validate_predict,
    "diagnose": _validate_diagnose,
    "verify-theorem1": _validate_trend,
    "theorem-a1a2": _validate_trend,
    "scaled-beta": _validate_scaled_beta,
    "naive-reconstruction": _validate_naive,
    "direct-manifest": _validate_direct,
}


# ---------------------------------------------------------------------------
# Execution.


def _describe_extremizer(value) -> dict:
    if isinstance(value, BoundaryLimit):
        return {"limit": {"coordinate": value.coordinate, "value": value.value}}
    if isinstance(value, SimplexPoint):
        return {"point": list(value.coords)}
    return {"unknown": None}


def _trend_payload(report: TrendReport) -> dict:
    return {
        "side": report.side,
        "extremum": report.extremum,
        "deltas": list(report.deltas),
        "rows": [
            {
                "n": row.n,
                "expectation": row.expectation,
                "mass": list(row.delta_masses),
                "ratio": row.posterior_ratio,
            }
            for row in report.rows
        ],
        "tolerance": report.tolerance,
        "final_gap": report.final_gap,
        "extremum_reached": report.extremum_reached,
    }


def _run_predict(doc: dict) -> dict:
    data = _build_dataset(doc)
    s = float(doc["hyper"]["s"])
    search = _build_search(doc)
    outcomes = doc.get("outcomes", list(range(data.k)))
    results: dict[str, Any] = {"level": "latent", "bounds": []}
    for j in outcomes:
        bounds = predictive_bounds(data, s, int(j), search)
        results["bounds"].append(
            {
                "outcome": int(j),
                "lower": bounds.lower,
                "upper": bounds.upper,
                "argmin_t": _describe_extremizer(bounds.argmin_t),
                "argmax_t": _describe_extremizer(bounds.argmax_t),
            }
        )
    t_spec = doc["hyper"].get("t")
    if t_spec is not None:
        prior = DirichletParams(s=s, t=SimplexPoint(t_spec))
        results["at_t"] = {
            "t": list(prior.t.coords),
            "values": [
                posterior_predictive_at_t(data, prior, int(j)) for j in outcomes
            ],
        }
    return results


def _run_diagnose(doc: dict) -> dict:
    data = _build_dataset(doc)
    diagnosis = vacuity_diagnosis(data)
    return {
        "outcomes": [
            {
                "outcome": d.outcome,
                "upper_strictly_below_one": d.upper_strictly_below_one,
                "upper_witnesses": list(d.upper_witnesses),
                "lower_strictly_above_zero": d.lower_strictly_above_zero,
                "lower_witnesses": list(d.lower_witnesses),
            }
            for d in diagnosis.per_outcome
        ],
        "fully_vacuous": diagnosis.fully_vacuous,
    }


def _run_trend(doc: dict) -> dict:
    target = _build_target(doc)
    f = _build_function(doc["function"], target.k)
    likelihood = _build_likelihood(doc["likelihood"], target.k)
    sequence = _build_sequence(doc, target)
    schedule = doc.get("schedule", list(_DEFAULT_SCHEDULE))
    deltas = doc.get("deltas", [0.1, 0.01])
    grid = SimplexGrid(
        k=target.k,
        resolution=doc.get("grid_resolution", _DEFAULT_TREND_GRID_RESOLUTION),
        boundary_policy=CLAMP_TO_EPSILON,
    )
    main = verify_theorem1(f, likelihood, sequence, schedule, grid, deltas=deltas)
    payload = {"main": _trend_payload(main), "contrast": None}
    if "contrast_likelihood" in doc:
        contrast = verify_theorem1(
            f,
            _build_likelihood(doc["contrast_likelihood"], target.k),
            sequence,
            schedule,
            grid,
            deltas=deltas,
        )
        payload["contrast"] = _trend_payload(contrast)
    return payload


def _run_scaled_beta(doc: dict) -> dict:
    channel = _build_channel(doc)
    positives, total = _build_counts(doc)
    s = _positive_number(doc.get("hyper", {}), "s", default=2.0)
    bounds = scaled_beta_posterior_bounds(channel, positives, total, s)
    payload = {
        "lower": bounds.lower,
        "upper": bounds.upper,
        "interval": [channel.xi_range[0], channel.xi_range[1]],
        "argmin_t": _describe_extremizer(bounds.argmin_t),
        "argmax_t": _describe_extremizer(bounds.argmax_t),
        "fixed_t": None,
    }
    if doc.get("fixed_t1") is not None:
        t1 = float(doc["fixed_t1"])
        payload["fixed_t"] = {
            "t1": t1,
            "posterior_mean": scaled_beta_posterior_mean(channel, positives, total, s, t1),
        }
    return payload


def _run_naive(doc: dict) -> dict:
    channel = _build_channel(doc)
    positives, total = _build_counts(doc)
    s = _positive_number(doc.get("hyper", {}), "s", default=2.0)
    manifest = direct_manifest_idm(positives, total, s)
    lower = naive_reconstruction(channel, manifest.lower)
    upper = naive_reconstruction(channel, manifest.upper)
    return {
        "manifest": {"lower": manifest.lower, "upper": manifest.upper},
        "reconstructed_lower": {"value": lower.value, "out_of_range": lower.out_of_range},
        "reconstructed_upper": {"value": upper.value, "out_of_range": upper.out_of_range},
    }


def _run_direct(doc: dict) -> dict:
    positives, total = _build_counts(doc)
    s = _positive_number(doc.get("hyper", {}), "s", default=2.0)
    bounds = direct_manifest_idm(positives, total, s)
    return {
        "level": "manifest",
        "lower": bounds.lower,
        "upper": bounds.upper,
        "argmin_t": _describe_extremizer(bounds.argmin_t),
        "argmax_t": _describe_extremizer(bounds.argmax_t),
    }


_RUNNERS = {
    "predict": _run_predict,
    "diagnose": _run_diagnose,
    "verify-theorem1": _run_trend,
    "theorem-a1a2": _run_trend,
    "scaled-beta": _run_scaled_beta,
    "naive-reconstruction": _run_naive,
    "direct-manifest": _run_direct,
}


def _provenance(scenario: Scenario) -> dict:
    doc = scenario.raw
    prov: dict[str, Any] = {"tool_version": __version__}
    if scenario.kind == "predict":
        search = _build_search(doc)
        k = doc.get("k", 2)
        prov["t_search"] = {
            "resolution": search.resolution_for(k),
            "clamp": search.clamp,
            "refinement_passes": search.refinement_passes,
        }
    if scenario.kind in ("verify-theorem1", "theorem-a1a2"):
        prov["grid"] = {
            "base_resolution": doc.get("grid_resolution", _DEFAULT_TREND_GRID_RESOLUTION),
            "resolution_rule": "max(base, 20*n) for k=2",
            "boundary_policy": CLAMP_TO_EPSILON,
            "eps_clamp": 1e-9,
        }
    if scenario.kind == "scaled-beta":
        prov["grid"] = {
            "theta_resolution": 2000,
            "t_resolution": 400,
            "boundary_policy": CLAMP_TO_EPSILON,
            "eps_clamp": 1e-9,
        }
    return prov


def run_scenario(scenario: Scenario) -> dict:
    """Execute a validated scenario; returns the full report dict."""
    started = time.perf_counter()
    results = _RUNNERS[scenario.kind](scenario.raw)
    elapsed = time.perf_counter() - started
    return {
        "scenario": scenario.raw,
        "results": results,
        "provenance": _provenance(scenario),
        "timing": {"seconds": elapsed},
    }


# ---------------------------------------------------------------------------
# Serialization and the bundled catalog.


def report_to_doc(report: dict) -> str:
    """Canonical serialization: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _flatten(prefix: str, value, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else str(key), value[key], rows)
    elif isinstance(value, list):
        for i, item in enumerate(value):
            _flatten(f"{prefix}.{i}", item, rows)
    else:
        rows.append((prefix, json.dumps(value)))


def report_to_table(report: dict) -> str:
    """Flat tab-separated export; trend rows come out as one line per index."""
    results = report.get("results", {})
    lines = []
    for block_name in ("main", "contrast"):
        block = results.get(block_name) if isinstance(results, dict) else None
        if isinstance(block, dict) and "rows" in block:
            deltas = block.get("deltas", [])
            header = ["block", "n", "expectation"] + [f"mass_{d:g}" for d in deltas] + ["ratio"]
            if not lines:
                lines.append("\t".join(header))
            for row in block["rows"]:
                cells = [block_name, str(row["n"]), repr(row["expectation"])]
                cells += [repr(m) for m in row["mass"]]
                cells.append(repr(row["ratio"]))
                lines.append("\t".join(cells))
    if lines:
        return "\n".join(lines) + "\n"
    rows: list[tuple[str, str]] = []
    _flatten("", results, rows)
    return "\n".join(f"{path}\t{value}" for path, value in rows) + "\n"


def write_report(report: dict, path: str, format: str = "doc") -> None:
    """Atomic write: serialize fully, then rename into place."""
    text = report_to_doc(report) if format == "doc" else report_to_table(report)
    tmp_path = f"{path}.tmp.{os.getpid()}"
    with open(tmp_path, "w", encoding="utf-8") as handle:
        handle.write(text)
    os.replace(tmp_path, path)


def bundled_scenarios() -> dict[str, dict]:
    """Name -> scenario document for every bundled scenario, sorted by name."""
    root = importlib.resources.files("latentidm") / "bundled"
    catalog = {}
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json") and entry.name != "assertions.json":
            doc = json.loads(entry.read_text(encoding="utf-8"))
            catalog[doc["name"]] = doc
    return catalog


def custom_scenarios(directory: str | None = None) -> dict[str, dict]:
    directory = directory or os.environ.get(SCENARIO_DIR_ENV)
    if not directory or not os.path.isdir(directory):
        return {}
    catalog = {}
    for filename in sorted(os.listdir(directory)):
        if filename.endswith(".json"):
            with open(os.path.join(directory, filename), encoding="utf-8") as handle:
                doc = json.load(handle)
            if isinstance(doc, dict) and "name" in doc:
                catalog[doc["name"]] = doc
    return catalog


def assertion_manifest() -> dict[str, list[dict]]:
    path = importlib.resources.files("latentidm") / "bundled" / "assertions.json"
    return json.loads(path.read_text(encoding="utf-8"))


def _resolve_path(payload, path: str):
    node = payload
    for piece in path.split("."):
        if isinstance(node, list):
            node = node[int(piece)]
        elif isinstance(node, dict):
            if piece not in node:
                raise KeyError(f"path {path!r}: missing key {piece!r}")
            node = node[piece]
        else:
            raise KeyError(f"path {path!r}: cannot descend into {type(node).__name__}")
    return node


def check_assertions(report: dict, checks: list[dict]) -> list[str]:
    """Evaluate assertion-manifest entries against a report's results.

    Returns a list of human-readable failure strings (empty = all pass).
    """
    failures = []
    for check in checks:
        path, op = check["path"], check["op"]
        try:
            actual = _resolve_path(report["results"], path)
        except (KeyError, IndexError, ValueError) as exc:
            failures.append(f"{path}: unresolvable ({exc})")
            continue
        expected = check.get("value")
        ok = False
        if op == "approx":
            ok = abs(float(actual) - float(expected)) <= float(check.get("tol", 1e-9))
        elif op == "le":
            ok = float(actual) <= float(expected)
        elif op == "ge":
            ok = float(actual) >= float(expected)
        elif op == "eq":
            ok = actual == expected
        elif op == "is_true":
            ok = actual is True
        elif op == "is_false":
            ok = actual is False
        else:
            failures.append(f"{path}: unknown op {op!r}")
            continue
        if not ok:
            failures.append(f"{path}: {op} {expected!r} failed (actual {actual!r})")
    return failures
