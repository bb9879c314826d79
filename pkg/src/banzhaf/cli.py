"""``banzhaf`` command line.

Exit codes: 0 success, 1 domain error (message on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from banzhaf import report
from banzhaf.dataio import default_data_dir, fetch_spect, load_csv, load_spect, write_csv
from banzhaf.errors import ArgumentError, BanzhafError
from banzhaf.exact import exact_banzhaf
from banzhaf.game import LinearThresholdGame, WeightedVotingGame, linear_to_voting
from banzhaf.modelio import load_model, model_hash, model_to_dict, save_model
from banzhaf.neural import TrainConfig, default_config, gradient_saliency, train, with_overrides
from banzhaf.pruning import EXHAUSTIVE, SAMPLED, prune_dummies, shrink
from banzhaf.sampling import (
    ProductDistribution,
    empirical_flip_counts,
    monte_carlo_banzhaf,
    weighted_banzhaf,
)
from banzhaf.voting import gf_banzhaf


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_json(doc, out: str) -> None:
    _emit(report.dumps(doc), out)


def _load(path: str):
    game = load_model(path)
    return game, report.model_info(path, game, model_hash(game))


def _names(args, n: int):
    if getattr(args, "feature_names", None):
        names = [s.strip() for s in args.feature_names.split(",")]
        if len(names) != n:
            raise ArgumentError(f"--feature-names lists {len(names)} names for {n} features")
        return names
    return None


def _data(args):
    return load_csv(args.data, args.label_column, args.header)


# Commands ----------------------------------------------------------------


def cmd_exact(args) -> None:
    game, info = _load(args.model)
    result = exact_banzhaf(game, cap=args.exact_cap, workers=args.workers)
    _emit_json(report.from_exact(result, info, _names(args, game.n_features)), args.out)


def cmd_gf(args) -> None:
    game, info = _load(args.model)
    if not isinstance(game, WeightedVotingGame):
        raise ArgumentError(
            f"the generating-function method requires a voting model, got {info['type']}; "
            "convert linear models first with `banzhaf convert`"
        )
    result = gf_banzhaf(game, cap=args.weight_cap)
    _emit_json(report.from_exact(result, info, _names(args, game.n_features)), args.out)


def cmd_mc(args) -> None:
    game, info = _load(args.model)
    result = monte_carlo_banzhaf(game, args.epsilon, args.delta, args.seed, samples=args.samples)
    _emit_json(report.from_estimate(result, info, _names(args, game.n_features)), args.out)


def cmd_weighted(args) -> None:
    game, info = _load(args.model)
    doc = json.loads(Path(args.dist).read_text(encoding="utf-8"))
    probs = doc["probs"] if isinstance(doc, dict) else doc
    dist = ProductDistribution(tuple(probs))
    result = weighted_banzhaf(game, dist, args.samples, args.seed)
    extra = {"distribution": list(dist.probs)}
    _emit_json(report.from_estimate(result, info, _names(args, game.n_features), extra), args.out)


def cmd_empirical(args) -> None:
    game, info = _load(args.model)
    data = _data(args)
    t0 = time.perf_counter()
    counts, rows = empirical_flip_counts(game, data, literal=args.literal_delta)
    doc = report.power_report(
        "empirical",
        [c / rows for c in counts],
        info,
        list(data.feature_names),
        params={
            "normalization": "1/|X|",
            "dataset_rows": rows,
            "delta_rule": "literal" if args.literal_delta else "flip",
        },
        runtime_ms=(time.perf_counter() - t0) * 1000.0,
        extra_entries={"flip_count": counts},
    )
    _emit_json(doc, args.out)


def cmd_prune(args) -> None:
    game, _ = _load(args.model)
    pruned, cert = prune_dummies(
        game, verify=args.verify, k=args.samples, seed=args.seed, cap=args.exact_cap, workers=args.workers
    )
    _emit_json(cert.to_dict(), args.out)
    if args.pruned_model:
        save_model(shrink(game, pruned.pruned), args.pruned_model)
    if not cert.valid:
        raise BanzhafError(f"verification found {cert.verification.mismatches} mismatches")


def cmd_convert(args) -> None:
    game, _ = _load(args.model)
    if not isinstance(game, LinearThresholdGame):
        raise ArgumentError(f"convert needs a linear or logreg model, got {game.kind}")
    conv = linear_to_voting(game, args.scale)
    if conv.constant_win:
        raise ArgumentError(
            f"shifted quota is {conv.quota} <= 0: every coalition wins and every feature is dummy"
        )
    doc = model_to_dict(conv.game)
    doc["polarity"] = list(conv.polarity)
    _emit_json(doc, args.out)


def cmd_train(args) -> None:
    config = TrainConfig.load(args.config) if args.config else default_config(args.kind)
    if config.model_kind != args.kind:
        raise ArgumentError(f"config is for {config.model_kind}, command asked for {args.kind}")
    config = with_overrides(config, seed=args.seed, split_seed=args.split_seed, epochs=args.epochs)
    data = load_csv(args.train_csv, args.label_column, args.header)
    test = load_csv(args.test_csv, args.label_column, args.header) if args.test_csv else None
    if test is None and sum(config.split) != len(data):
        raise ArgumentError(
            f"config split {config.split[0]}/{config.split[1]} does not match the {len(data)} rows "
            "of --train-csv; pass --test-csv or a config with a matching split"
        )
    result = train(data, config, test)
    save_model(result.model, args.out)
    metrics = {**result.metrics, "config": config.to_dict(), "pruned_by_l1": result.pruned_by_l1}
    if args.metrics_out:
        _emit_json(metrics, args.metrics_out)
    print(json.dumps(result.metrics), file=sys.stderr)


def cmd_saliency(args) -> None:
    game, info = _load(args.model)
    data = _data(args)
    t0 = time.perf_counter()
    result = gradient_saliency(game, data, args.norm)
    doc = report.from_saliency(result, info, list(data.feature_names), (time.perf_counter() - t0) * 1000.0)
    _emit_json(doc, args.out)


def cmd_coefficients(args) -> None:
    game, info = _load(args.model)
    if not isinstance(game, LinearThresholdGame):
        raise ArgumentError("coefficient reports need a linear or logreg model")
    _emit_json(report.from_coefficients(game, info, _names(args, game.n_features)), args.out)


def _read_reports(paths):
    docs = []
    for p in paths:
        try:
            docs.append(report.validate(json.loads(Path(p).read_text(encoding="utf-8"))))
        except (OSError, json.JSONDecodeError) as exc:
            raise ArgumentError(f"cannot read report {p}: {exc}") from None
    return docs


def cmd_compare(args) -> None:
    docs = _read_reports(args.reports)
    _emit_json(report.compare(docs, args.top_k, args.allow_model_mismatch), args.out)
    if args.plot_csv:
        _emit(report.plot_csv(docs), args.plot_csv)
    if args.chart:
        report.render_chart(docs, args.chart)


def cmd_plot(args) -> None:
    docs = _read_reports(args.reports)
    _emit(report.plot_csv(docs), args.out)
    if args.chart:
        report.render_chart(docs, args.chart)


def cmd_data_fetch(args) -> None:
    fetch_spect(args.dest, log=lambda m: print(m, file=sys.stderr))


def cmd_data_validate(args) -> None:
    data = load_csv(args.csv, args.label_column, args.header)
    summary = {"rows": len(data), "n_features": data.n, "positives": int(data.y.sum())}
    _emit_json(summary, args.out)


def cmd_data_export(args) -> None:
    write_csv(load_spect(args.data_dir, args.part), args.out, header=not args.no_header)


def cmd_experiment(args) -> None:
    from banzhaf.experiment import run_spect, summary

    arts = run_spect(args.data_dir, args.out_dir, workers=args.workers, top_k=args.top_k,
                     log=lambda m: print(m, file=sys.stderr))
    print(summary(arts))


# Parser ------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, model: bool = True) -> None:
    if model:
        p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--out", default="-", help="output path, '-' for stdout (default)")


def _exact_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--exact-cap", type=int, default=None, help="max features for exhaustive enumeration")
    p.add_argument("--workers", type=int, default=None)


def _csv_opts(p: argparse.ArgumentParser, flag: str = "--data") -> None:
    p.add_argument(flag, required=True, dest=flag.lstrip("-").replace("-", "_"))
    p.add_argument("--label-column", default="first", help="first, last, a column name or index")
    p.add_argument("--header", choices=["auto", "yes", "no"], default="auto")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="banzhaf", description="Banzhaf power indices of classifier features.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact indices by exhaustive enumeration")
    _common(p)
    _exact_opts(p)
    p.add_argument("--feature-names")
    p.set_defaults(fn=cmd_exact)

    p = sub.add_parser("gf", help="generating-function indices for voting models")
    _common(p)
    p.add_argument("--weight-cap", type=int, default=None)
    p.add_argument("--feature-names")
    p.set_defaults(fn=cmd_gf)

    p = sub.add_parser("mc", help="Monte Carlo estimate with (epsilon, delta) control")
    _common(p)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=None, help="explicit k, overrides epsilon/delta")
    p.add_argument("--feature-names")
    p.set_defaults(fn=cmd_mc)

    p = sub.add_parser("weighted", help="weighted index under a product distribution")
    _common(p)
    p.add_argument("--dist", required=True, help='JSON {"probs": [...]} or a bare list')
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--feature-names")
    p.set_defaults(fn=cmd_weighted)

    p = sub.add_parser("empirical", help="empirical index over dataset rows")
    _common(p)
    _csv_opts(p)
    p.add_argument("--literal-delta", action="store_true", help="use F(x|i) - F(x) as written (0 if i in x)")
    p.set_defaults(fn=cmd_empirical)

    p = sub.add_parser("prune", help="prune dummy features and certify losslessness")
    _common(p)
    _exact_opts(p)
    p.add_argument("--verify", choices=[EXHAUSTIVE, SAMPLED], default=EXHAUSTIVE)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pruned-model", help="write the weight-level shrunk model (voting/linear only)")
    p.set_defaults(fn=cmd_prune)

    p = sub.add_parser("convert", help="exact linear -> weighted voting conversion")
    _common(p)
    p.add_argument("--scale", type=int, required=True)
    p.set_defaults(fn=cmd_convert)

    p = sub.add_parser("train", help="train an MLP or L1 logistic regression")
    p.add_argument("kind", choices=["mlp", "logreg"])
    p.add_argument("--train-csv", required=True)
    p.add_argument("--test-csv")
    p.add_argument("--label-column", default="first")
    p.add_argument("--header", choices=["auto", "yes", "no"], default="auto")
    p.add_argument("--config", help="training config JSON (default: bundled config)")
    p.add_argument("--seed", type=int)
    p.add_argument("--split-seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--metrics-out")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("saliency", help="gradient saliency of an MLP or linear model")
    _common(p)
    _csv_opts(p)
    p.add_argument("--norm", choices=["mean", "sum"], default="mean")
    p.set_defaults(fn=cmd_saliency)

    p = sub.add_parser("coefficients", help="L1 logistic-regression coefficient report")
    _common(p)
    p.add_argument("--feature-names")
    p.set_defaults(fn=cmd_coefficients)

    p = sub.add_parser("compare", help="rank correlations and top-k overlap between reports")
    _common(p, model=False)
    p.add_argument("--reports", nargs="+", required=True)
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--allow-model-mismatch", action="store_true")
    p.add_argument("--plot-csv")
    p.add_argument("--chart", help="optional PNG chart path")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("plot", help="long-format feature,method,value CSV")
    _common(p, model=False)
    p.add_argument("--reports", nargs="+", required=True)
    p.add_argument("--chart", help="optional PNG chart path")
    p.set_defaults(fn=cmd_plot)

    data = sub.add_parser("data", help="dataset utilities")
    dsub = data.add_subparsers(dest="data_command", required=True)
    p = dsub.add_parser("fetch-spect", help="download SPECT and verify checksums")
    p.add_argument("--dest", default=None, help=f"target directory (default {default_data_dir()})")
    p.set_defaults(fn=cmd_data_fetch)
    p = dsub.add_parser("validate", help="parse a binary CSV and summarize it")
    _csv_opts(p, "--csv")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_data_validate)
    p = dsub.add_parser("export-spect", help="write SPECT as one CSV")
    p.add_argument("--data-dir", default=None)
    p.add_argument("--part", choices=["all", "train", "test"], default="all")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_data_export)

    p = sub.add_parser("experiment", help="full SPECT pipeline")
    p.add_argument("name", choices=["spect"])
    p.add_argument("--data-dir", default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(fn=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.fn(args)
    except BanzhafError as exc:
        print(f"banzhaf: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"banzhaf: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
