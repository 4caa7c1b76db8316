"""JSON encoding of scenarios, correlations, bounds, efficiencies, vertices and verdicts.

Indices are 1-based on disk; the non-detection outcome is the string
``"null-outcome"``. Exact numbers are written as ``"p/q"`` strings, floats as
JSON numbers. Numbers are read from ``"p/q"`` or decimal strings (exactly) or
from JSON numbers (as floats).
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import numpy as np

from .errors import ScenarioMismatch
from .inequality import LdlIneqResult, region_csv
from .model import (
    NULL_OUTCOME,
    DetectionBounds,
    FullCorrelation,
    ObservedEfficiencies,
    PostselectedCorrelation,
    Scenario,
    to_number,
)


def num_to_json(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return float(v)


def num_from_json(v):
    if isinstance(v, bool):
        raise ValueError("booleans are not probabilities")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    return to_number(v)


def scenario_to_json(sc: Scenario) -> dict:
    return {"parties": sc.n_parties, "inputs": list(sc.inputs), "outcomes": list(sc.outcomes)}


def scenario_from_json(doc) -> Scenario:
    doc = doc.get("scenario", doc)
    sc = Scenario(tuple(doc["inputs"]), tuple(doc["outcomes"]))
    if "parties" in doc and int(doc["parties"]) != sc.n_parties:
        raise ScenarioMismatch("'parties' disagrees with the alphabet lists")
    return sc


def _outcome_label(a, m):
    return NULL_OUTCOME if a == m else a + 1


def _outcome_index(label, m, full):
    if label == NULL_OUTCOME:
        if not full:
            raise ScenarioMismatch("null outcome in a postselected table")
        return m
    i = int(label) - 1
    if not 0 <= i < m:
        raise ScenarioMismatch(f"outcome {label} outside 1..{m}")
    return i


def correlation_to_json(corr, key: str = "p") -> dict:
    sc = corr.scenario
    full = isinstance(corr, FullCorrelation)
    entries = []
    for x in sc.input_tuples():
        for a in sc.outcome_tuples(with_null=full):
            entries.append({
                "x": [i + 1 for i in x],
                "a": [_outcome_label(ai, m) for ai, m in zip(a, sc.outcomes)],
                key: num_to_json(corr.table[x + a]),
            })
    return {"scenario": scenario_to_json(sc), "kind": "full" if full else "postselected", "entries": entries}


def _table_from_entries(sc: Scenario, entries, full: bool, key: str):
    shape = sc.table_shape(full)
    vals = {}
    for e in entries:
        x = tuple(int(i) - 1 for i in e["x"])
        if len(x) != sc.n_parties or any(not 0 <= xi < n for xi, n in zip(x, sc.inputs)):
            raise ScenarioMismatch(f"input {e['x']} outside the scenario")
        a = tuple(_outcome_index(lbl, m, full) for lbl, m in zip(e["a"], sc.outcomes))
        if len(a) != sc.n_parties:
            raise ScenarioMismatch(f"outcome {e['a']} has the wrong length")
        vals[x + a] = num_from_json(e[key])
    exact = all(isinstance(v, Fraction) for v in vals.values())
    table = np.full(shape, Fraction(0) if exact else 0.0, dtype=object if exact else float)
    for idx, v in vals.items():
        table[idx] = v if exact else float(v)
    return table


def correlation_from_json(doc):
    sc = scenario_from_json(doc["scenario"])
    kind = doc.get("kind", "postselected")
    if kind not in ("full", "postselected"):
        raise ScenarioMismatch(f"unknown correlation kind {kind!r}")
    full = kind == "full"
    table = _table_from_entries(sc, doc["entries"], full, "p")
    return (FullCorrelation if full else PostselectedCorrelation)(sc, table)


def bounds_to_json(bounds: DetectionBounds) -> dict:
    return {"bounds": [{"eta_min": num_to_json(lo), "eta_max": num_to_json(hi)} for lo, hi in bounds.per_party]}


def bounds_from_json(doc, n_parties: int | None = None) -> DetectionBounds:
    if isinstance(doc, dict) and "bounds" in doc:
        items = doc["bounds"]
    elif isinstance(doc, dict) and "eta_min" in doc:
        if n_parties is None:
            raise ScenarioMismatch("symmetric bounds need a party count")
        items = [doc] * n_parties
    else:
        items = doc
    pairs = []
    for it in items:
        if isinstance(it, dict):
            pairs.append((num_from_json(it["eta_min"]), num_from_json(it["eta_max"])))
        else:
            lo, hi = it
            pairs.append((num_from_json(lo), num_from_json(hi)))
    return DetectionBounds(tuple(pairs))


def effs_to_json(effs: ObservedEfficiencies) -> dict:
    return {
        "effs": [{"x": [i + 1 for i in x], "eta": num_to_json(v)} for x, v in effs.items()]
    }


def effs_from_json(doc, scenario: Scenario) -> ObservedEfficiencies:
    if "uniform" in doc:
        return ObservedEfficiencies.uniform(scenario, num_from_json(doc["uniform"]))
    mapping = {tuple(int(i) - 1 for i in e["x"]): num_from_json(e["eta"]) for e in doc["effs"]}
    missing = [x for x in scenario.input_tuples() if x not in mapping]
    if missing:
        raise ScenarioMismatch(f"efficiencies missing for inputs {[[i + 1 for i in x] for x in missing]}")
    if all(isinstance(v, Fraction) for v in mapping.values()):
        return ObservedEfficiencies.from_mapping(scenario, mapping)
    table = np.array([float(mapping[x]) for x in scenario.input_tuples()]).reshape(scenario.inputs)
    return ObservedEfficiencies(scenario, table)


def _vertex_label(v):
    return [
        [[NULL_OUTCOME if a is None else a + 1, lvl, num_to_json(eta)] for a, lvl, eta in zip(p.outcomes, p.levels, p.effs)]
        for p in v.parts
    ]


def vertex_from_label(label, scenario: Scenario):
    from .vertices import ProductVertex, SinglePartyVertex

    if len(label) != scenario.n_parties:
        raise ScenarioMismatch("vertex label has the wrong number of parties")
    parts = []
    for part, n, m in zip(label, scenario.inputs, scenario.outcomes):
        if len(part) != n:
            raise ScenarioMismatch("vertex label has the wrong number of inputs")
        outs = tuple(None if a == NULL_OUTCOME else _outcome_index(a, m, False) for a, _, _ in part)
        parts.append(SinglePartyVertex(outs, tuple(l for _, l, _ in part), tuple(num_from_json(e) for _, _, e in part), m))
    return ProductVertex(tuple(parts))


def vertex_to_json(v) -> dict:
    from .vertices import vertex_to_full

    doc = correlation_to_json(vertex_to_full(v))
    doc["vertex"] = _vertex_label(v)
    return doc


def vertex_from_json(doc):
    from .vertices import vertex_to_full

    corr = correlation_from_json(doc)
    v = vertex_from_label(doc["vertex"], corr.scenario)
    if vertex_to_full(v) != corr:
        raise ValueError("vertex label disagrees with its table")
    return v


def certificate_to_json(cert) -> dict:
    sc = cert.scenario
    entries = []
    for x in sc.input_tuples():
        for a in sc.outcome_tuples():
            entries.append({
                "x": [i + 1 for i in x],
                "a": [ai + 1 for ai in a],
                "c": num_to_json(cert.coefficients[x + a]),
            })
    return {
        "scenario": scenario_to_json(sc),
        "kind": "certificate",
        "entries": entries,
        "bound": num_to_json(cert.bound),
        "violation": num_to_json(cert.violation),
    }


def certificate_from_json(doc):
    from .geometry import Certificate

    sc = scenario_from_json(doc["scenario"])
    coeffs = _table_from_entries(sc, doc["entries"], False, "c")
    coeffs.setflags(write=False)
    return Certificate(sc, coeffs, num_from_json(doc["bound"]), num_from_json(doc["violation"]))


def membership_to_json(result) -> dict:
    if result.member:
        sc = result.witness[0][0].scenario
        return {
            "member": True,
            "scenario": scenario_to_json(sc),
            "witness": [{"vertex": _vertex_label(v), "weight": num_to_json(w)} for v, w in result.witness],
            "residual": num_to_json(result.residual),
        }
    return {"member": False, "certificate": certificate_to_json(result.certificate)}


def membership_from_json(doc):
    from .geometry import Member, NonMember

    if not doc["member"]:
        return NonMember(certificate_from_json(doc["certificate"]))
    sc = scenario_from_json(doc["scenario"])
    witness = tuple((vertex_from_label(e["vertex"], sc), num_from_json(e["weight"])) for e in doc["witness"])
    return Member(witness, num_from_json(doc["residual"]))


def verdict_from_json(doc):
    from .model import Verdict

    def loc(t):
        return None if t is None else tuple(i - 1 for i in t)

    return Verdict(
        doc["valid"],
        num_from_json(doc["worst_negative"]),
        loc(doc["negative_at"]),
        num_from_json(doc["worst_normalization_error"]),
        loc(doc["normalization_at"]),
        doc["message"],
    )


def eq5_result_from_json(doc):
    return LdlIneqResult(num_from_json(doc["lhs"]), doc["violated"])


def region_from_csv(text: str):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["eta_min", "eta_max", "lhs", "violated"]:
        raise ValueError("not a region file")
    flags = {"true": True, "false": False}
    return [(float(lo), float(hi), float(lhs), flags[v]) for lo, hi, lhs, v in rows[1:]]


def mdl_map_to_json(params, joint: bool, condition: bool) -> dict:
    doc = params.to_dict()
    doc["joint"] = joint
    doc["nonlocality_condition"] = condition
    return doc


def mdl_map_from_json(doc):
    from .schemes import MdlParams

    params = MdlParams(num_from_json(doc["l"]), num_from_json(doc["h"]), int(doc["n_inputs"]), doc["clamped"])
    return params, doc["joint"], doc["nonlocality_condition"]


def critical_to_json(value, eta_max, resolution: float) -> dict:
    return {"eta_min_critical": num_to_json(value), "eta_max": num_to_json(eta_max), "resolution": float(resolution)}


def critical_from_json(doc):
    return num_from_json(doc["eta_min_critical"]), num_from_json(doc["eta_max"]), float(doc["resolution"])


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _json_codec(to_doc, from_doc):
    return (lambda obj: dumps(to_doc(obj)), lambda text: from_doc(json.loads(text)))


# subcommand -> (format, parse); format(parse(text)) == text for every emitted file
CODECS = {
    "vertices": _json_codec(lambda vs: [vertex_to_json(v) for v in vs], lambda d: [vertex_from_json(e) for e in d]),
    "membership": _json_codec(membership_to_json, membership_from_json),
    "eq5": _json_codec(lambda r: r.to_dict(), eq5_result_from_json),
    "eq5-region": (region_csv, region_from_csv),
    "hardy": _json_codec(correlation_to_json, correlation_from_json),
    "born": _json_codec(correlation_to_json, correlation_from_json),
    "scheme": _json_codec(correlation_to_json, correlation_from_json),
    "mdl-map": _json_codec(lambda t: mdl_map_to_json(*t), mdl_map_from_json),
    "validate": _json_codec(lambda v: v.to_dict(), verdict_from_json),
    "critical-eta": _json_codec(lambda t: critical_to_json(*t), critical_from_json),
}


def format_output(command: str, obj) -> str:
    return CODECS[command][0](obj)


def parse_output(command: str, text: str):
    return CODECS[command][1](text)
