"""Versioned JSON report of an evaluation, in canonical form.

Canonical form: keys sorted, two-space indentation, floats written with 17
significant digits, UTF-8, trailing newline. An undefined factor is written
as ``null`` with ``pair_count`` 0. The layout is documented in
``docs/report-schema.md``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ordsurvey.dataset import OrdinalDataset
from ordsurvey.errors import OrdSurveyError
from ordsurvey.kano import DEFAULT_TAU, KanoLabel, ThresholdFinding, classify_profile, detect_thresholds
from ordsurvey.ordeval import DIRECTIONS, FactorCell, OrdEvalParams, ReinforcementProfile, reinforcement_profile
from ordsurvey.predict import CVReport, RankedPrediction
from ordsurvey.significance import (
    AGGREGATE,
    NullCell,
    NullDistribution,
    SignificanceParams,
    null_distribution,
    significance_flags,
)

SCHEMA_VERSION = "1.0"


class InconsistentProducts(OrdSurveyError, ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Evaluation:
    """Everything the OrdEval stage produces for one dataset and parameter set."""

    dataset: OrdinalDataset
    params: OrdEvalParams
    sig_params: SignificanceParams
    tau: float
    profile: ReinforcementProfile
    null: NullDistribution
    flags: dict
    labels: dict[str, KanoLabel]
    thresholds: list[ThresholdFinding]


def evaluate(ds: OrdinalDataset, params: OrdEvalParams = OrdEvalParams(),
             sig_params: SignificanceParams = SignificanceParams(),
             tau: float = DEFAULT_TAU) -> Evaluation:
    """Profile, null distribution, significance flags, Kano labels and thresholds."""
    profile = reinforcement_profile(ds, params)
    nd = null_distribution(ds, params, sig_params)
    flags = significance_flags(profile, nd)
    return Evaluation(ds, params, sig_params, tau, profile, nd, flags,
                      classify_profile(profile, tau), detect_thresholds(profile, flags, tau))


def _box(null: NullCell) -> dict | None:
    b = null.box
    if b is None:
        return None
    return {"q1": b.q1, "median": b.median, "q3": b.q3, "whisker_low": b.whisker_low,
            "whisker_high": b.whisker_high, "sample_count": b.sample_count}


def _cell(observed: FactorCell, null: NullCell, significant: bool) -> dict:
    return {
        "factor": observed.probability,
        "pair_count": observed.pair_count if observed.defined else 0,
        "box": _box(null),
        "assessable": null.assessable,
        "significant": bool(significant),
    }


def cv_section(reports: dict[str, CVReport], selected: str) -> dict:
    first = next(iter(reports.values()))
    return {
        "folds": first.folds,
        "seed": first.seed,
        "n": first.n,
        "majority_baseline": first.majority_baseline,
        "learners": {name: r.to_dict() for name, r in reports.items()},
        "selected": selected,
    }


def ranking_section(ranking: list[RankedPrediction], learner: str) -> dict:
    return {
        "learner": learner,
        "predictions": [
            {"rank": i + 1, "row_id": p.row_id, "predicted": p.predicted,
             "distribution": {str(c): v for c, v in p.distribution.items()}}
            for i, p in enumerate(ranking)
        ],
    }


def build_report(ev: Evaluation, cv: dict | None = None, ranking: dict | None = None) -> dict:
    """Assemble the report dictionary.

    ``cv`` and ``ranking`` are the sections built by :func:`cv_section` and
    :func:`ranking_section`, or None when prediction was not run.
    """
    ds, profile, nd = ev.dataset, ev.profile, ev.null
    if not (ds.attribute_names == profile.attribute_names == nd.attribute_names
            and ds.scales == profile.scales == nd.scales):
        raise InconsistentProducts("dataset, profile and null distribution disagree on attributes")
    if set(ev.labels) != set(ds.attribute_names):
        raise InconsistentProducts("Kano labels do not cover exactly the dataset attributes")
    if any(t.attribute not in ev.labels for t in ev.thresholds):
        raise InconsistentProducts("threshold refers to an unknown attribute")

    attributes = []
    for a, name in enumerate(ds.attribute_names):
        sc = ds.scales[a]
        values = []
        for v in sc.values:
            values.append({"value": v, **{
                d: _cell(profile.cell(a, v, d), nd.cell(name, v, d), ev.flags[(name, v, d)])
                for d in DIRECTIONS
            }})
        attributes.append({
            "name": name,
            "scale": sc.to_list(),
            "label": ev.labels[name].value,
            "aggregate": {
                d: _cell(profile.aggregate(a, d), nd.aggregate(name, d), ev.flags[(name, AGGREGATE, d)])
                for d in DIRECTIONS
            },
            "values": values,
            "thresholds": [
                {"value": t.value, "direction": t.direction, "factor": t.factor,
                 "significant": t.significant}
                for t in ev.thresholds if t.attribute == name
            ],
        })
    return {
        "schema_version": SCHEMA_VERSION,
        "dataset": {
            "n": ds.n,
            "attributes": list(ds.attribute_names),
            "scales": {name: sc.to_list() for name, sc in zip(ds.attribute_names, ds.scales)},
            "response": {"name": ds.response_name, "scale": ds.response_scale.to_list()},
        },
        "params": {
            "k": ev.params.k,
            "k_effective": profile.k,
            "B": ev.sig_params.B,
            "alpha": ev.sig_params.alpha,
            "tau": ev.tau,
            "seed": ev.sig_params.seed,
        },
        "attributes": attributes,
        "cv": cv,
        "ranking": ranking,
    }


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, KanoLabel):
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _encode(obj, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError("non-finite float in report")
        return format(obj, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + _encode(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if not obj:
        return "{}"
    items = sorted(obj.items())
    return "{\n" + ",\n".join(
        inner + json.dumps(k, ensure_ascii=False) + ": " + _encode(v, indent + 1) for k, v in items
    ) + "\n" + pad + "}"


def canonical_json(obj) -> str:
    return _encode(_plain(obj), 0) + "\n"


def write_report(report: dict) -> str:
    return canonical_json(report)


def read_report(text: str) -> dict:
    return json.loads(text)
