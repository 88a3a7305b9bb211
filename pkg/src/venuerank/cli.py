"""Command-line driver: generate, run, sweep, eval-run.

Experiments are described by flat key-value config files; any flag given on
the command line overrides the matching config key before validation. Every
artifact (dataset files, run files, CSVs, figures) carries the sha256 hash
of the effective configuration in a '#' header comment, and reruns with an
identical configuration produce byte-identical artifacts.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
Set VENUERANK_LOG=INFO (or DEBUG) for progress logging.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Mapping

from .config import ConfigError, ExperimentConfig, config_hash, load_config
from .evaluate import (
    CVOutcome,
    MetricReport,
    SweepConfig,
    cross_validate,
    evaluate_ranked_lists,
    run_sweep,
)
from .features import BASELINE_SPEC, FEATURE_NAMES, FeatureSpec, VARIANTS, compute_score_tables
from .ingest import Collection, load_collection, read_qrels, read_run, write_collection, write_run
from .metrics import paired_ttest
from .synth import SyntheticSpec, generate_synthetic

LOG_ENV = "VENUERANK_LOG"
log = logging.getLogger("venuerank")


def _setup_logging() -> None:
    level_name = os.environ.get(LOG_ENV, "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _apply_overrides(mapping: dict[str, str], args: argparse.Namespace, keys: tuple[str, ...]) -> None:
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            mapping[key] = str(value)


_SPEC_INT_KEYS = (
    "n_users",
    "n_venues",
    "preference_dimensions",
    "n_keywords_vocab",
    "n_categories_vocab",
    "history_size",
    "candidates_per_user",
    "seed",
)
_SPEC_RANGE_KEYS = ("reviews_per_venue_range", "keywords_per_venue_range")


def _synthetic_spec(mapping: Mapping[str, str]) -> SyntheticSpec:
    known = set(_SPEC_INT_KEYS) | set(_SPEC_RANGE_KEYS) | {"outdir"}
    unknown = sorted(set(mapping) - known)
    if unknown:
        raise ConfigError(f"unknown generator keys: {', '.join(unknown)}")
    kwargs: dict[str, object] = {}
    for key in _SPEC_INT_KEYS:
        if key in mapping:
            try:
                kwargs[key] = int(mapping[key])
            except ValueError:
                raise ConfigError(f"key {key!r} must be an integer") from None
    for key in _SPEC_RANGE_KEYS:
        if key in mapping:
            parts = [p.strip() for p in mapping[key].split(",")]
            if len(parts) != 2:
                raise ConfigError(f"key {key!r} must be 'lo,hi'")
            try:
                kwargs[key] = (int(parts[0]), int(parts[1]))
            except ValueError:
                raise ConfigError(f"key {key!r} must be 'lo,hi' integers") from None
    try:
        return SyntheticSpec(**kwargs)  # type: ignore[arg-type]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_generate(args: argparse.Namespace) -> int:
    mapping = load_config(args.spec)
    _apply_overrides(mapping, args, ("outdir", "seed"))
    if "outdir" not in mapping:
        raise ConfigError("generate needs an output directory (outdir key or --outdir)")
    outdir = Path(mapping["outdir"])
    if not outdir.is_absolute() and getattr(args, "outdir", None) is None:
        # relative paths from the spec file are anchored there, same as run configs;
        # a --outdir flag stays relative to the working directory
        outdir = Path(args.spec).parent / outdir
    spec = _synthetic_spec(mapping)
    header = f"config_hash={config_hash(mapping)}"
    log.info("generating synthetic collection into %s", outdir)
    collection = generate_synthetic(spec)
    paths = write_collection(collection, outdir, header=header)
    for name in ("venues", "users", "requests", "qrels"):
        print(f"wrote {paths[name]}")
    return 0


def _variant_spec(name: str) -> FeatureSpec:
    return BASELINE_SPEC if name == "LinearCatRev" else VARIANTS[name]


def _variant_kind(name: str, configured: str) -> str:
    # the baseline is defined by its training rule, not the configured ranker
    return "linear-interpolation" if name == "LinearCatRev" else configured


def _load_experiment(args: argparse.Namespace, need_sweep: bool) -> tuple[ExperimentConfig, dict[str, str]]:
    mapping = load_config(args.config)
    _apply_overrides(
        mapping, args, ("outdir", "seed", "variants", "ranker", "reference", "criteria", "k_values")
    )
    cfg = ExperimentConfig.from_mapping(
        mapping, base_dir=Path(args.config).parent, need_sweep=need_sweep
    )
    return cfg, mapping


def _write_csv(path: Path, header_comment: str, columns: str, rows: list[str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {header_comment}\n")
        fh.write(columns + "\n")
        for row in rows:
            fh.write(row + "\n")


def _metric_rows(tag: str, report: MetricReport, fold_label: str) -> list[str]:
    return [
        f"{tag},{fold_label},precision_at_5,{float(report.mean_precision_at_5)}",
        f"{tag},{fold_label},ndcg_at_5,{float(report.mean_ndcg_at_5)}",
        f"{tag},{fold_label},mrr,{float(report.mean_reciprocal_rank)}",
    ]


def cmd_run(args: argparse.Namespace) -> int:
    cfg, _ = _load_experiment(args, need_sweep=False)
    header = f"config_hash={cfg.hash}"
    collection = load_collection(cfg.venues, cfg.users, cfg.requests, cfg.qrels)
    cfg.outdir.mkdir(parents=True, exist_ok=True)

    needed = tuple(
        f
        for f in FEATURE_NAMES
        if any(f in _variant_spec(v).features for v in cfg.variants)
    )
    log.info("computing score tables for features: %s", ", ".join(needed))
    tables = compute_score_tables(collection, needed, svm_seed=cfg.seed)

    outcomes: dict[str, CVOutcome] = {}
    for name in cfg.variants:
        kind = _variant_kind(name, cfg.ranker)
        seeds = cfg.hyper_seeds if kind in ("coordinate-ascent", "pairwise-neural") else (cfg.seed,)
        log.info("training %s with %s", name, kind)
        outcome = cross_validate(
            collection,
            [_variant_spec(name)],
            kind,
            seed=cfg.seed,
            hyper_seeds=seeds,
            tables=tables,
            n_folds=cfg.n_folds,
        )[_variant_spec(name).name]
        outcomes[name] = outcome

        run_path = cfg.outdir / f"run_{name}.txt"
        ranked = sorted(outcome.ranked_lists.items())
        write_run(ranked, tag=name, path=run_path, header=header)
        print(f"wrote {run_path}")

    metric_rows: list[str] = []
    for name in cfg.variants:
        for report in outcomes[name].fold_reports:
            metric_rows.extend(_metric_rows(name, report, str(report.fold_id)))
        metric_rows.extend(_metric_rows(name, outcomes[name].pooled, "all"))
    metrics_path = cfg.outdir / "metrics.csv"
    _write_csv(metrics_path, header, "model,fold,metric,value", metric_rows)
    print(f"wrote {metrics_path}")

    reference = outcomes[cfg.reference].pooled
    sig_rows: list[str] = []
    for name in cfg.variants:
        candidate = outcomes[name].pooled
        users = sorted(set(reference.user_ids) & set(candidate.user_ids))
        result = paired_ttest(
            [candidate.ndcg_at_5[u] for u in users],
            [reference.ndcg_at_5[u] for u in users],
        )
        sig_rows.append(
            f"{name},{cfg.reference},ndcg_at_5,{float(result.t)},{float(result.p_value)},"
            f"{str(result.significant).lower()}"
        )
    sig_path = cfg.outdir / "significance.csv"
    _write_csv(sig_path, header, "model,reference,metric,t,p,significant", sig_rows)
    print(f"wrote {sig_path}")

    from .plots import plot_metric_bars  # deferred: pulls in matplotlib

    figure_path = cfg.outdir / "metrics.png"
    plot_metric_bars({n: outcomes[n].pooled for n in cfg.variants}, figure_path, cfg.hash)
    print(f"wrote {figure_path}")

    for name in cfg.variants:
        pooled = outcomes[name].pooled
        print(
            f"{name}: P@5={pooled.mean_precision_at_5:.4f} "
            f"nDCG@5={pooled.mean_ndcg_at_5:.4f} MRR={pooled.mean_reciprocal_rank:.4f}"
        )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg, _ = _load_experiment(args, need_sweep=True)
    header = f"config_hash={cfg.hash}"
    collection = load_collection(cfg.venues, cfg.users, cfg.requests, cfg.qrels)
    cfg.outdir.mkdir(parents=True, exist_ok=True)

    results = []
    for criterion in cfg.sweep_criteria:
        sweep_config = SweepConfig(
            axis=cfg.sweep_axis or "",
            criterion=criterion,
            k_values=cfg.sweep_k_values,
            n_random_repeats=cfg.n_random_repeats,
        )
        log.info("sweeping %s / %s over k=%s", cfg.sweep_axis, criterion, cfg.sweep_k_values)
        result = run_sweep(
            collection, sweep_config, ranker_kind=cfg.ranker, seed=cfg.seed, n_folds=cfg.n_folds
        )
        results.append(result)
        rows = [
            f"{criterion},{point.k},{float(point.mean_ndcg_at_5)}" for point in result.points
        ]
        csv_path = cfg.outdir / f"sweep_{cfg.sweep_axis}_{criterion}.csv"
        _write_csv(csv_path, header, "criterion,k,ndcg_at_5", rows)
        print(f"wrote {csv_path}")

    from .plots import plot_sweep_curves  # deferred: pulls in matplotlib

    figure_path = cfg.outdir / f"sweep_{cfg.sweep_axis}.png"
    plot_sweep_curves(results, figure_path, cfg.hash)
    print(f"wrote {figure_path}")
    return 0


def cmd_eval_run(args: argparse.Namespace) -> int:
    run_path = Path(args.run)
    qrels_path = Path(args.qrels)
    for path in (run_path, qrels_path):
        if not path.is_file():
            raise ConfigError(f"file not found: {path}")
    runs = read_run(run_path)
    qrels = read_qrels(qrels_path)
    qrels_by_user: dict[str, dict[str, int]] = {}
    for (user_id, venue_id), rating in qrels.items():
        qrels_by_user.setdefault(user_id, {})[venue_id] = rating

    # judged users missing from the run count as empty rankings
    ranked_lists = {
        user_id: [venue_id for venue_id, _ in runs.get(user_id, [])]
        for user_id in sorted(qrels_by_user)
    }
    collection = Collection(venues={}, users={}, requests=[], qrels=qrels)
    report = evaluate_ranked_lists(ranked_lists, collection, tag=args.tag)

    if args.out:
        rows = [
            f"{user_id},precision_at_5,{float(report.precision_at_5[user_id])},"
            f"ndcg_at_5,{float(report.ndcg_at_5[user_id])},"
            f"reciprocal_rank,{float(report.reciprocal_rank[user_id])}"
            for user_id in report.user_ids
        ]
        _write_csv(Path(args.out), f"run={run_path.name}", "user,metrics", rows)
        print(f"wrote {args.out}")
    print(f"users: {len(report.user_ids)}")
    print(f"P@5: {report.mean_precision_at_5:.4f}")
    print(f"nDCG@5: {report.mean_ndcg_at_5:.4f}")
    print(f"MRR: {report.mean_reciprocal_rank:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="venuerank",
        description="Venue suggestion experiments: profile scores, review models, rank fusion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic dataset directory")
    gen.add_argument("--spec", required=True, help="key=value generator spec file")
    gen.add_argument("--outdir", help="output directory (overrides spec key)")
    gen.add_argument("--seed", type=int, help="override the spec seed")
    gen.set_defaults(func=cmd_generate)

    run = sub.add_parser("run", help="train variants, write run files and metrics")
    run.add_argument("--config", required=True, help="experiment config file")
    run.add_argument("--outdir")
    run.add_argument("--seed", type=int)
    run.add_argument("--variants", help="comma-separated variant names")
    run.add_argument("--ranker", help="ranker kind for the LTR variants")
    run.add_argument("--reference", help="variant the significance test compares against")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="ablation curves over review or keyword budgets")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--outdir")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--criteria", help="comma-separated criteria for the configured axis")
    sweep.add_argument("--k-values", dest="k_values", help="comma-separated k values")
    sweep.set_defaults(func=cmd_sweep)

    ev = sub.add_parser("eval-run", help="score an existing run file against qrels")
    ev.add_argument("--run", required=True)
    ev.add_argument("--qrels", required=True)
    ev.add_argument("--out", help="optional per-user CSV output path")
    ev.add_argument("--tag", default="external")
    ev.set_defaults(func=cmd_eval_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - boundary: report and set exit code
        print(f"error: {type(exc).__module__}.{type(exc).__qualname__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
