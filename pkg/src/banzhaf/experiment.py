"""End-to-end SPECT run: train both models, score features four ways, compare."""

from __future__ import annotations

import json
import time
from pathlib import Path

from banzhaf import report
from banzhaf.dataio import load_spect
from banzhaf.exact import exact_banzhaf
from banzhaf.modelio import model_hash, model_to_dict
from banzhaf.neural import TrainConfig, default_config, gradient_saliency, train
from banzhaf.pruning import prune_dummies
from banzhaf.sampling import empirical_banzhaf


def run_spect(
    data_dir: str | Path | None = None,
    out_dir: str | Path | None = None,
    mlp_config: TrainConfig | None = None,
    logreg_config: TrainConfig | None = None,
    top_k: int = 5,
    workers: int | None = None,
    log=lambda msg: None,
) -> dict:
    """Returns every artifact keyed by file name; writes them when ``out_dir`` is set."""
    data = load_spect(data_dir)
    names = list(data.feature_names)
    mlp_config = mlp_config or default_config("mlp")
    logreg_config = logreg_config or default_config("logreg")

    mlp_run = train(data, mlp_config)
    log(f"mlp: train {mlp_run.train_accuracy:.3f} test {mlp_run.test_accuracy:.3f}")
    lr_run = train(data, logreg_config)
    log(f"logreg: train {lr_run.train_accuracy:.3f} test {lr_run.test_accuracy:.3f}")

    mlp_doc = model_to_dict(mlp_run.model)
    lr_doc = model_to_dict(lr_run.model)
    mlp_info = report.model_info("mlp.json", mlp_run.model, model_hash(mlp_doc))
    lr_info = report.model_info("logreg.json", lr_run.model, model_hash(lr_doc))

    exact = report.from_exact(exact_banzhaf(mlp_run.model, workers=workers), mlp_info, names)
    log(f"exact: {exact['runtime_ms'] / 1000:.2f}s, dummies {exact['dummies']}")
    t0 = time.perf_counter()
    emp_values = empirical_banzhaf(mlp_run.model, data)
    empirical = report.power_report(
        "empirical",
        emp_values,
        mlp_info,
        names,
        params={"normalization": "1/|X|", "dataset_rows": len(data), "delta_rule": "flip"},
        runtime_ms=(time.perf_counter() - t0) * 1000.0,
    )
    t0 = time.perf_counter()
    sal = gradient_saliency(mlp_run.model, data, "mean")
    saliency = report.from_saliency(sal, mlp_info, names, (time.perf_counter() - t0) * 1000.0)
    coefficients = report.from_coefficients(lr_run.model, lr_info, names)

    families = [coefficients, saliency, exact, empirical]
    _, cert = prune_dummies(mlp_run.model, workers=workers)
    artifacts = {
        "mlp.json": mlp_doc,
        "logreg.json": lr_doc,
        "metrics.json": {
            "mlp": {**mlp_run.metrics, "config": mlp_config.to_dict()},
            "logreg": {**lr_run.metrics, "config": logreg_config.to_dict(), "pruned_by_l1": lr_run.pruned_by_l1},
            "rows": len(data),
        },
        "exact.json": exact,
        "empirical.json": empirical,
        "saliency.json": saliency,
        "l1_coefficients.json": coefficients,
        "compare_exact_saliency.json": report.compare([exact, saliency], k=top_k),
        "compare_all.json": report.compare(families, k=top_k, allow_model_mismatch=True),
        "prune_certificate.json": cert.to_dict(),
        "fig1.csv": report.plot_csv(families),
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, doc in artifacts.items():
            text = doc if isinstance(doc, str) else report.dumps(doc)
            (out / name).write_text(text, encoding="utf-8")
        log(f"wrote {len(artifacts)} files to {out}")
    return artifacts


def summary(artifacts: dict) -> str:
    m = artifacts["metrics.json"]
    cmp = artifacts["compare_exact_saliency.json"]
    return json.dumps(
        {
            "mlp_test_accuracy": m["mlp"]["test_accuracy"],
            "logreg_test_accuracy": m["logreg"]["test_accuracy"],
            "exact_vs_saliency_spearman": cmp["spearman"][0][1],
            "exact_vs_saliency_kendall": cmp["kendall"][0][1],
            "exact_vs_saliency_top_k_overlap": cmp["top_k_overlap"][0][1],
        },
        indent=2,
    )
