"""Command-line pipeline: preprocess -> train -> recommend -> evaluate.

Every command is rerunnable: identical inputs and seeds produce identical
on-disk outputs. The preprocessing config hash is recorded in the split
manifest and propagated into model bundles, so evaluating a bundle against
a differently-preprocessed split is refused.

Exit codes: 0 success, 1 usage, 2 data error, 3 internal.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import corpus, evaluate, figures, lda, models
from .errors import DataError, TagrecError, UnscorableTweetError, UntrainableDocumentError, UsageError
from .recommend import recommend_batch, write_recommendations_jsonl
from .skipgram import TrainConfig

MODEL_KINDS = (models.MODEL1, models.MODEL2)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="tagrec", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="TOML or JSON config file")
    parser.add_argument("--seed", type=int, help="global random seed")
    parser.add_argument("--workdir", help="directory for pipeline artifacts")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("preprocess", help="clean, filter, and split a raw corpus")
    p.add_argument("--input", required=True, help="raw tweets, JSON Lines")
    p.add_argument("--stopwords", help="stopword list, one token per line")
    p.add_argument("--slang", help="slang dictionary, TSV slang<TAB>expansion")
    p.add_argument("--min-hashtag-freq", type=int)
    p.add_argument("--max-hashtag-freq", type=int)
    p.add_argument("--ratios", help="train,validation,test fractions, e.g. 0.7,0.1,0.2")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", help="train a model bundle from the train split")
    p.add_argument("--splits", help="directory produced by preprocess (default: workdir)")
    p.add_argument("--model", choices=MODEL_KINDS)
    p.add_argument("--bundle", help="output bundle directory")
    _add_train_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("recommend", help="write top-k recommendations for a split")
    p.add_argument("--bundle", required=True)
    p.add_argument("--splits", help="directory produced by preprocess (default: workdir)")
    p.add_argument("--input", help="clean tweets JSONL (default: the test split)")
    p.add_argument("--k", type=int)
    p.add_argument("--rank-all", action="store_true", help="rank every scored hashtag, not just co-occurring ones")
    p.add_argument("--out", help="output JSONL path")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("evaluate", help="score a bundle (or check lift arithmetic)")
    p.add_argument("--bundle")
    p.add_argument("--splits")
    p.add_argument("--metric", choices=("aloc", "muc"), default="aloc")
    p.add_argument("--k-policy", choices=("aloc", "muc"), help="k=1 (aloc) or k=|truth| (muc); default: the metric")
    p.add_argument("--on", choices=("test", "validation"), default="test", help="split to evaluate")
    p.add_argument("--baseline", choices=("lda",), help="also train a baseline and report lift")
    p.add_argument("--rank-all", action="store_true")
    p.add_argument("--out", help="report directory (default: workdir/eval_<metric>)")
    p.add_argument("--score", type=float, help="skip evaluation; compute lift from this score")
    p.add_argument("--baseline-score", type=float, help="denominator for --score")
    _add_lda_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="train/evaluate across vector sizes on the validation split")
    p.add_argument("--splits")
    p.add_argument("--model", choices=MODEL_KINDS)
    p.add_argument("--dims", help="comma-separated vector sizes, e.g. 25,50,100")
    p.add_argument("--metric", choices=("aloc", "muc", "both"), default="both")
    p.add_argument("--out", help="output directory (default: workdir/sweep)")
    _add_train_args(p, include_dim=False)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("baseline", help="train and evaluate the LDA baseline")
    p.add_argument("--splits")
    p.add_argument("--out", help="output directory (default: workdir/baseline)")
    _add_lda_args(p)
    p.set_defaults(func=cmd_baseline)

    return parser


def _add_train_args(p, include_dim: bool = True):
    if include_dim:
        p.add_argument("--dim", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--min-count", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--negatives", type=int)
    p.add_argument("--lr-initial", type=float)
    p.add_argument("--lr-floor", type=float)
    p.add_argument("--workers", type=int)


def _add_lda_args(p):
    p.add_argument("--topics", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--iters", type=int)
    p.add_argument("--fold-in-iters", type=int)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    path = Path(path)
    if not path.exists():
        raise DataError(f"config file not found: {path}")
    if path.suffix == ".json":
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _pick(cli_value, cfg: dict, section: str, key: str, default):
    if cli_value is not None:
        return cli_value
    return cfg.get(section, {}).get(key, default)


def _workdir(args, cfg) -> Path:
    wd = args.workdir if args.workdir is not None else cfg.get("workdir", "tagrec_work")
    return Path(wd)


def _seed(args, cfg) -> int:
    return args.seed if args.seed is not None else int(cfg.get("seed", 0))


def _pipeline_config(args, cfg: dict) -> corpus.PipelineConfig:
    ratios_raw = _pick(getattr(args, "ratios", None), cfg, "pipeline", "ratios", (0.7, 0.1, 0.2))
    if isinstance(ratios_raw, str):
        try:
            ratios = tuple(float(x) for x in ratios_raw.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --ratios value: {ratios_raw!r}") from exc
    else:
        ratios = tuple(float(x) for x in ratios_raw)
    stopword_path = _pick(getattr(args, "stopwords", None), cfg, "pipeline", "stopwords", None)
    slang_path = _pick(getattr(args, "slang", None), cfg, "pipeline", "slang", None)
    return corpus.PipelineConfig(
        min_hashtag_freq=_pick(getattr(args, "min_hashtag_freq", None), cfg, "pipeline", "min_hashtag_freq", 200),
        max_hashtag_freq=_pick(getattr(args, "max_hashtag_freq", None), cfg, "pipeline", "max_hashtag_freq", 500),
        stopwords=corpus.load_stopwords(stopword_path) if stopword_path else corpus.default_stopwords(),
        slang=corpus.load_slang(slang_path) if slang_path else corpus.default_slang(),
        split_ratios=ratios,
        seed=_seed(args, cfg),
    )


def _train_config(args, cfg: dict, dim: int | None = None) -> TrainConfig:
    return TrainConfig(
        window=_pick(getattr(args, "window", None), cfg, "train", "window", 4),
        min_count=_pick(getattr(args, "min_count", None), cfg, "train", "min_count", 3),
        dim=dim if dim is not None else _pick(getattr(args, "dim", None), cfg, "train", "dim", 50),
        epochs=_pick(getattr(args, "epochs", None), cfg, "train", "epochs", 5),
        negatives=_pick(getattr(args, "negatives", None), cfg, "train", "negatives", 5),
        lr_initial=_pick(getattr(args, "lr_initial", None), cfg, "train", "lr_initial", 0.025),
        lr_floor=_pick(getattr(args, "lr_floor", None), cfg, "train", "lr_floor", 1e-4),
        seed=_seed(args, cfg),
        workers=_pick(getattr(args, "workers", None), cfg, "train", "workers", 1),
    )


def _lda_params(args, cfg: dict) -> dict:
    topics = _pick(getattr(args, "topics", None), cfg, "lda", "topics", lda.DEFAULT_TOPICS)
    return {
        "n_topics": topics,
        "alpha": _pick(getattr(args, "alpha", None), cfg, "lda", "alpha", None),
        "beta": _pick(getattr(args, "beta", None), cfg, "lda", "beta", lda.DEFAULT_BETA),
        "iters": _pick(getattr(args, "iters", None), cfg, "lda", "iters", lda.DEFAULT_ITERS),
        "fold_in_iters": _pick(
            getattr(args, "fold_in_iters", None), cfg, "lda", "fold_in_iters", lda.DEFAULT_FOLD_IN_ITERS
        ),
    }


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _read_split_manifest(splits_dir: Path) -> dict:
    manifest_path = splits_dir / "split_manifest.json"
    if not manifest_path.exists():
        raise DataError(f"{splits_dir}: no split_manifest.json; run preprocess first")
    with open(manifest_path, encoding="utf-8") as fh:
        return json.load(fh)


def _splits_dir(args, cfg) -> Path:
    explicit = getattr(args, "splits", None)
    return Path(explicit) if explicit else _workdir(args, cfg)


def cmd_preprocess(args, cfg: dict) -> int:
    pcfg = _pipeline_config(args, cfg)
    workdir = _workdir(args, cfg)
    workdir.mkdir(parents=True, exist_ok=True)

    input_path = Path(args.input)
    if not input_path.exists():
        raise DataError(f"input file not found: {input_path}")
    raws, n_errors = corpus.read_raw_jsonl(input_path)
    if not raws:
        raise DataError(f"{input_path}: no parseable tweets")

    split, funnel = corpus.run_pipeline(raws, pcfg, n_errors)

    corpus.write_clean_jsonl(workdir / "train.jsonl", split.train)
    corpus.write_clean_jsonl(workdir / "validation.jsonl", split.validation)
    corpus.write_clean_jsonl(workdir / "test.jsonl", split.test)

    assignments = {}
    for name, tweets in (("train", split.train), ("validation", split.validation), ("test", split.test)):
        for t in tweets:
            assignments[t.id] = name
    _write_json(
        workdir / "split_manifest.json",
        {
            "seed": pcfg.seed,
            "config_hash": pcfg.content_hash(),
            "counts": {k: funnel[k] for k in ("train", "validation", "test")},
            "assignments": assignments,
        },
    )
    _write_json(workdir / "funnel.json", funnel)
    figures.render_funnel(funnel, workdir / "funnel.png")

    for key in ("total_records", "malformed_records", "english", "original_content",
                "with_hashtag", "frequency_filtered", "train", "validation", "test"):
        print(f"{key}: {funnel[key]}")
    return 0


def _train_model(tweets, kind: str, tcfg: TrainConfig):
    if kind == models.MODEL1:
        try:
            return models.train_model1(tweets, tcfg)
        except UntrainableDocumentError as exc:
            raise DataError(f"model1: {exc}") from exc
    try:
        return models.train_model2(tweets, tcfg)
    except UntrainableDocumentError as exc:
        raise DataError(f"model2: the global document is untrainable ({exc})") from exc


def cmd_train(args, cfg: dict) -> int:
    splits_dir = _splits_dir(args, cfg)
    manifest = _read_split_manifest(splits_dir)
    kind = _pick(args.model, cfg, "train", "model", models.MODEL2)
    if kind not in MODEL_KINDS:
        raise UsageError(f"unknown model kind {kind!r}")
    tcfg = _train_config(args, cfg)

    train_tweets = corpus.read_clean_jsonl(splits_dir / "train.jsonl")
    if not train_tweets:
        raise DataError(f"{splits_dir}/train.jsonl is empty")

    model = _train_model(train_tweets, kind, tcfg)
    model.pipeline_hash = manifest["config_hash"]

    bundle_dir = Path(args.bundle) if args.bundle else _workdir(args, cfg) / f"bundle_{kind}"
    models.save_bundle(model, bundle_dir)
    n_absent = sum(1 for v in model.hashtag_vectors.values() if v is None)
    print(f"bundle: {bundle_dir}")
    print(f"hashtags: {len(model.hashtag_vectors)} ({n_absent} without vectors)")
    return 0


def cmd_recommend(args, cfg: dict) -> int:
    model = models.load_bundle(args.bundle)
    if args.input:
        tweets = corpus.read_clean_jsonl(args.input)
    else:
        tweets = corpus.read_clean_jsonl(_splits_dir(args, cfg) / "test.jsonl")
    k = _pick(args.k, cfg, "recommend", "k", 1)
    if k < 1:
        raise UsageError("--k must be >= 1")
    recs = recommend_batch(model, tweets, lambda t: k, rank_all=args.rank_all)
    out = Path(args.out) if args.out else _workdir(args, cfg) / "recommendations.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_recommendations_jsonl(out, recs)
    print(f"recommendations: {out} ({len(recs)} tweets)")
    return 0


def _check_pipeline_hash(model, manifest, where: str) -> None:
    if model.pipeline_hash and model.pipeline_hash != manifest["config_hash"]:
        raise DataError(
            f"{where}: bundle was trained under a different preprocessing config "
            f"({model.pipeline_hash[:12]} != {manifest['config_hash'][:12]}); refusing to evaluate"
        )


def cmd_evaluate(args, cfg: dict) -> int:
    if args.score is not None or args.baseline_score is not None:
        if args.score is None or args.baseline_score is None:
            raise UsageError("--score and --baseline-score must be given together")
        ratio = evaluate.lift(args.score, args.baseline_score)
        print(f"lift: {args.score} / {args.baseline_score} = {ratio:.2f}")
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            _write_json(out / "report.json", {
                "metric": args.metric.upper() if args.metric else None,
                "score": args.score,
                "baseline_score": args.baseline_score,
                "lift_vs_baseline": ratio,
            })
        return 0

    if not args.bundle:
        raise UsageError("--bundle is required (or use --score/--baseline-score)")
    metric = args.metric
    k_policy = args.k_policy or metric
    if metric == "muc" and k_policy == "aloc":
        raise UsageError("metric=muc needs k-policy=muc (top-K lists, K = ground-truth size)")

    splits_dir = _splits_dir(args, cfg)
    manifest = _read_split_manifest(splits_dir)
    model = models.load_bundle(args.bundle)
    _check_pipeline_hash(model, manifest, str(splits_dir))

    tweets = corpus.read_clean_jsonl(splits_dir / f"{args.on}.jsonl")
    if not tweets:
        raise DataError(f"{splits_dir}/{args.on}.jsonl is empty")
    truth = {t.id: set(t.hashtags) for t in tweets}
    k_for = (lambda t: 1) if k_policy == "aloc" else (lambda t: len(t.hashtags))

    recs = recommend_batch(model, tweets, k_for, rank_all=args.rank_all)
    report = evaluate.eval_aloc(recs, truth) if metric == "aloc" else evaluate.eval_muc(recs, truth)

    lift_value = None
    baseline_report = None
    if args.baseline == "lda":
        train_tweets = corpus.read_clean_jsonl(splits_dir / "train.jsonl")
        params = _lda_params(args, cfg)
        baseline_model = lda.lda_train(
            train_tweets,
            n_topics=params["n_topics"],
            alpha=params["alpha"],
            beta=params["beta"],
            iters=params["iters"],
            seed=_seed(args, cfg),
            fold_in_iters=params["fold_in_iters"],
        )
        baseline_recs = lda.lda_recommend_batch(baseline_model, train_tweets, tweets, k_for)
        baseline_report = (
            evaluate.eval_aloc(baseline_recs, truth) if metric == "aloc" else evaluate.eval_muc(baseline_recs, truth)
        )
        if baseline_report.score > 0:
            lift_value = evaluate.lift(report.score, baseline_report.score)

    out = Path(args.out) if args.out else _workdir(args, cfg) / f"eval_{metric}"
    out.mkdir(parents=True, exist_ok=True)
    report_dict = report.to_dict(lift_value)
    if baseline_report is not None:
        report_dict["baseline_score"] = baseline_report.score
    _write_json(out / "report.json", report_dict)
    evaluate.write_per_tweet_csv(out / "per_tweet.csv", report)
    shown = [report_dict]
    if baseline_report is not None:
        shown.append({**baseline_report.to_dict(), "metric": f"LDA {baseline_report.metric}"})
        _write_json(out / "baseline_report.json", baseline_report.to_dict())
    figures.render_scores(shown, out / "report.png", title=f"{report.metric} on {args.on}")

    print(f"{report.metric}: score={report.score:.4f} n={report.n_tweets} unscorable={report.n_unscorable}")
    if baseline_report is not None:
        print(f"baseline {baseline_report.metric}: score={baseline_report.score:.4f}")
    if lift_value is not None:
        print(f"lift: {lift_value:.2f}x")
    return 0


def cmd_sweep(args, cfg: dict) -> int:
    dims_raw = _pick(args.dims, cfg, "sweep", "dims", None)
    if not dims_raw:
        raise UsageError("--dims is required, e.g. --dims 25,50,100")
    if isinstance(dims_raw, str):
        try:
            dims = sorted({int(x) for x in dims_raw.split(",") if x.strip()})
        except ValueError as exc:
            raise UsageError(f"bad --dims value: {dims_raw!r}") from exc
    else:
        dims = sorted({int(x) for x in dims_raw})
    if not dims:
        raise UsageError("--dims must name at least one vector size")
    metrics = ("aloc", "muc") if args.metric == "both" else (args.metric,)

    splits_dir = _splits_dir(args, cfg)
    _read_split_manifest(splits_dir)
    kind = _pick(args.model, cfg, "train", "model", models.MODEL2)
    if kind not in MODEL_KINDS:
        raise UsageError(f"unknown model kind {kind!r}")
    train_tweets = corpus.read_clean_jsonl(splits_dir / "train.jsonl")
    val_tweets = corpus.read_clean_jsonl(splits_dir / "validation.jsonl")
    if not train_tweets or not val_tweets:
        raise DataError("sweep needs non-empty train and validation splits")
    truth = {t.id: set(t.hashtags) for t in val_tweets}

    rows = []
    for dim in dims:
        tcfg = _train_config(args, cfg, dim=dim)
        try:
            model = _train_model(train_tweets, kind, tcfg)
            for metric in metrics:
                k_for = (lambda t: 1) if metric == "aloc" else (lambda t: len(t.hashtags))
                recs = recommend_batch(model, val_tweets, k_for)
                report = evaluate.eval_aloc(recs, truth) if metric == "aloc" else evaluate.eval_muc(recs, truth)
                rows.append({"dim": dim, "metric": report.metric, "score": report.score})
        except TagrecError as exc:
            print(f"sweep: dim={dim} failed: {exc}", file=sys.stderr)

    out = Path(args.out) if args.out else _workdir(args, cfg) / "sweep"
    out.mkdir(parents=True, exist_ok=True)
    rows.sort(key=lambda r: (r["dim"], r["metric"]))
    with open(out / "sweep.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dim", "metric", "score"])
        for row in rows:
            writer.writerow([row["dim"], row["metric"], f"{row['score']:.6f}"])
    if rows:
        figures.render_sweep(rows, out / "sweep.png")
    for row in rows:
        print(f"dim={row['dim']} {row['metric']}: {row['score']:.4f}")
    return 0


def cmd_baseline(args, cfg: dict) -> int:
    splits_dir = _splits_dir(args, cfg)
    _read_split_manifest(splits_dir)
    train_tweets = corpus.read_clean_jsonl(splits_dir / "train.jsonl")
    test_tweets = corpus.read_clean_jsonl(splits_dir / "test.jsonl")
    if not train_tweets or not test_tweets:
        raise DataError("baseline needs non-empty train and test splits")
    truth = {t.id: set(t.hashtags) for t in test_tweets}

    params = _lda_params(args, cfg)
    model = lda.lda_train(
        train_tweets,
        n_topics=params["n_topics"],
        alpha=params["alpha"],
        beta=params["beta"],
        iters=params["iters"],
        seed=_seed(args, cfg),
        fold_in_iters=params["fold_in_iters"],
    )

    out = Path(args.out) if args.out else _workdir(args, cfg) / "baseline"
    out.mkdir(parents=True, exist_ok=True)
    reports = {}
    shown = []
    for metric in ("aloc", "muc"):
        k_for = (lambda t: 1) if metric == "aloc" else (lambda t: len(t.hashtags))
        recs = lda.lda_recommend_batch(model, train_tweets, test_tweets, k_for)
        report = evaluate.eval_aloc(recs, truth) if metric == "aloc" else evaluate.eval_muc(recs, truth)
        reports[metric] = report.to_dict()
        shown.append({**report.to_dict(), "metric": f"LDA {report.metric}"})
        evaluate.write_per_tweet_csv(out / f"per_tweet_{metric}.csv", report)
        print(f"LDA {report.metric}: score={report.score:.4f} n={report.n_tweets}")
    _write_json(out / "baseline.json", reports)
    figures.render_scores(shown, out / "baseline.png", title="LDA baseline")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"tagrec: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"tagrec: {exc}", file=sys.stderr)
        return 2
    except UnscorableTweetError as exc:
        print(f"tagrec: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"tagrec: internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
