"""Report documents: per-method power reports, comparisons and plot data.

Reports are plain JSON-ready dicts validated against the bundled schema.
"""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from pathlib import Path
from typing import Sequence

import jsonschema
import numpy as np
from scipy import stats

from banzhaf.errors import ArgumentError
from banzhaf.exact import ExactResult
from banzhaf.sampling import RNG_ALGORITHM, EstimateResult

REPORT_VERSION = "1.0"
METHODS = (
    "exact",
    "generating_function",
    "monte_carlo",
    "weighted_mc",
    "empirical",
    "saliency",
    "l1_coefficients",
)
RUNTIME_KEYS = ("runtime_ms",)


def _schema() -> dict:
    return json.loads(resources.files("banzhaf").joinpath("resources/report_schema.json").read_text())


def validate(doc: dict) -> dict:
    """Validate a power or comparison report; returns it unchanged."""
    schema = _schema()
    kind = doc.get("kind")
    if kind not in schema["$defs"]:
        raise ArgumentError(f"unknown report kind {kind!r}")
    if doc.get("spec_version") != REPORT_VERSION:
        raise ArgumentError(f"unsupported report version {doc.get('spec_version')!r}, expected {REPORT_VERSION}")
    try:
        jsonschema.validate(doc, {"$ref": f"#/$defs/{kind}", "$defs": schema["$defs"]})
    except jsonschema.ValidationError as exc:
        raise ArgumentError(f"invalid {kind} report: {exc.message}") from None
    return doc


def model_info(path: str | None, game, digest: str | None) -> dict:
    kind = getattr(game, "label", None) or game.kind
    return {"path": path, "type": kind, "hash": digest}


def _names(names: Sequence[str] | None, n: int) -> list[str]:
    if names is None:
        return [f"f{j + 1}" for j in range(n)]
    if len(names) != n:
        raise ArgumentError(f"{len(names)} feature names given for {n} features")
    return list(names)


def power_report(
    method: str,
    values: Sequence[float],
    model: dict,
    names: Sequence[str] | None = None,
    params: dict | None = None,
    runtime_ms: float = 0.0,
    swing_counts: Sequence[int] | None = None,
    half_width: float | None = None,
    extra_entries: dict[str, Sequence] | None = None,
    **fields,
) -> dict:
    if method not in METHODS:
        raise ArgumentError(f"unknown method {method!r}")
    n = len(values)
    names = _names(names, n)
    entries = []
    for i, v in enumerate(values):
        if not math.isfinite(v):
            raise ArgumentError(f"non-finite value for feature {i}")
        entry = {"feature_index": i, "feature_name": names[i], "value": float(v)}
        if swing_counts is not None:
            entry["swing_count"] = int(swing_counts[i])
        if half_width is not None:
            entry["ci_half_width"] = float(half_width)
        for key, column in (extra_entries or {}).items():
            entry[key] = column[i]
        entries.append(entry)
    doc = {
        "kind": "power_report",
        "spec_version": REPORT_VERSION,
        "model": model,
        "method": method,
        "n_features": n,
        "entries": entries,
        "params": {k: v for k, v in (params or {}).items() if v is not None},
        "runtime_ms": float(runtime_ms),
    }
    doc.update(fields)
    return validate(doc)


def from_exact(result: ExactResult, model: dict, names=None) -> dict:
    return power_report(
        result.method,
        result.indices,
        model,
        names,
        params={"denominator": result.denominator, "evaluations": result.evaluations},
        runtime_ms=result.runtime_ms,
        swing_counts=result.swing_counts,
        dummies=sorted(result.dummies),
    )


def from_estimate(result: EstimateResult, model: dict, names=None, extra_params: dict | None = None) -> dict:
    params = {
        "epsilon": result.epsilon,
        "delta": result.delta,
        "k": result.k,
        "seed": result.seed,
        "rng": RNG_ALGORITHM,
        "confidence": "per-feature",
    }
    params.update(extra_params or {})
    return power_report(
        result.method,
        result.indices,
        model,
        names,
        params=params,
        runtime_ms=result.runtime_ms,
        half_width=result.half_width,
        extra_entries={"flip_count": result.flip_counts},
    )


# Comparison --------------------------------------------------------------


def _corr(fn, a: np.ndarray, b: np.ndarray) -> float | None:
    if np.all(a == a[0]) or np.all(b == b[0]):
        return None
    value = float(fn(a, b)[0])
    return None if math.isnan(value) else min(1.0, max(-1.0, value))


def top_k(values: Sequence[float], k: int) -> list[int]:
    """Indices of the ``k`` largest values; ties go to the lower feature index."""
    order = sorted(range(len(values)), key=lambda i: (-values[i], i))
    return order[:k]


def _label(report: dict, seen: dict) -> str:
    label = report["method"]
    seen[label] = seen.get(label, 0) + 1
    return label if seen[label] == 1 else f"{label}#{seen[label]}"


def _check_comparable(reports: Sequence[dict], allow_model_mismatch: bool) -> list[str]:
    if len(reports) < 2:
        raise ArgumentError("comparison needs at least two reports")
    names = [e["feature_name"] for e in reports[0]["entries"]]
    for r in reports[1:]:
        if [e["feature_name"] for e in r["entries"]] != names:
            raise ArgumentError("reports cover different feature sets")
    if not allow_model_mismatch:
        hashes = {r["model"].get("hash") for r in reports}
        if len(hashes) > 1:
            raise ArgumentError(
                "reports were computed on different models (hash mismatch); "
                "pass --allow-model-mismatch to compare across models"
            )
    return names


def compare(reports: Sequence[dict], k: int = 5, allow_model_mismatch: bool = False) -> dict:
    """Pairwise Spearman/Kendall (average ranks for ties) and top-k overlap."""
    names = _check_comparable(reports, allow_model_mismatch)
    n = len(names)
    if not 1 <= k <= n:
        raise ArgumentError(f"top-k must lie in [1, {n}], got {k}")
    seen: dict = {}
    labels = [_label(r, seen) for r in reports]
    values = [np.array([e["value"] for e in r["entries"]], dtype=np.float64) for r in reports]
    m = len(reports)
    spearman = [[1.0 if i == j else None for j in range(m)] for i in range(m)]
    kendall = [[1.0 if i == j else None for j in range(m)] for i in range(m)]
    overlap = [[1.0] * m for _ in range(m)]
    tops = [set(top_k(list(v), k)) for v in values]
    for i in range(m):
        for j in range(i + 1, m):
            spearman[i][j] = spearman[j][i] = _corr(stats.spearmanr, values[i], values[j])
            kendall[i][j] = kendall[j][i] = _corr(stats.kendalltau, values[i], values[j])
            overlap[i][j] = overlap[j][i] = len(tops[i] & tops[j]) / k
    table = [
        {"feature_index": f, "feature_name": names[f], "values": {labels[r]: float(values[r][f]) for r in range(m)}}
        for f in range(n)
    ]
    doc = {
        "kind": "comparison_report",
        "spec_version": REPORT_VERSION,
        "methods": labels,
        "models": [r["model"] for r in reports],
        "top_k": k,
        "spearman": spearman,
        "kendall": kendall,
        "top_k_overlap": overlap,
        "top_k_sets": {labels[r]: [names[i] for i in top_k(list(values[r]), k)] for r in range(m)},
        "per_feature_table": table,
        "tie_handling": "average ranks",
    }
    return validate(doc)


def plot_rows(reports: Sequence[dict], allow_model_mismatch: bool = True) -> list[tuple[str, str, float]]:
    """Long-format ``(feature, method, value)`` rows, feature-major."""
    if not reports:
        raise ArgumentError("plot data needs at least one report")
    names = _check_comparable(reports, allow_model_mismatch) if len(reports) > 1 else [
        e["feature_name"] for e in reports[0]["entries"]
    ]
    seen: dict = {}
    labels = [_label(r, seen) for r in reports]
    return [
        (names[f], labels[r], reports[r]["entries"][f]["value"]) for f in range(len(names)) for r in range(len(reports))
    ]


def plot_csv(reports: Sequence[dict], allow_model_mismatch: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["feature", "method", "value"])
    for feature, method, value in plot_rows(reports, allow_model_mismatch):
        writer.writerow([feature, method, repr(float(value))])
    return buf.getvalue()


def render_chart(reports: Sequence[dict], path: str | Path) -> None:
    """Grouped bar chart, one panel per method, each normalized to its maximum."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = plot_rows(reports)
    features = list(dict.fromkeys(r[0] for r in rows))
    methods = list(dict.fromkeys(r[1] for r in rows))
    fig, axes = plt.subplots(len(methods), 1, figsize=(10, 2.2 * len(methods)), sharex=True, squeeze=False)
    for ax, method in zip(axes[:, 0], methods):
        vals = np.array([v for f, m, v in rows if m == method])
        peak = np.max(np.abs(vals)) or 1.0
        ax.bar(range(len(features)), vals / peak)
        ax.set_ylabel(method, rotation=0, ha="right", fontsize=8)
        ax.set_yticks([])
    axes[-1, 0].set_xticks(range(len(features)), features, rotation=90, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def strip_runtime(doc):
    """Copy of a report without timing fields, for byte-level reproducibility checks."""
    if isinstance(doc, dict):
        return {k: strip_runtime(v) for k, v in doc.items() if k not in RUNTIME_KEYS}
    if isinstance(doc, list):
        return [strip_runtime(v) for v in doc]
    return doc


def from_saliency(result, model: dict, names=None, runtime_ms: float = 0.0) -> dict:
    return power_report(
        "saliency",
        result.scores,
        model,
        names,
        params={"normalization": result.normalization, "dataset_rows": result.dataset_rows},
        runtime_ms=runtime_ms,
    )


def from_coefficients(model_game, model: dict, names=None) -> dict:
    """L1 logistic-regression coefficients; ``value`` is the magnitude."""
    signed = [float(w) for w in model_game.weights]
    return power_report(
        "l1_coefficients",
        [abs(w) for w in signed],
        model,
        names,
        params={"normalization": "abs"},
        extra_entries={"signed_value": signed},
        pruned_by_l1=[j for j, w in enumerate(signed) if w == 0.0],
    )
