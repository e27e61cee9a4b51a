"""Command-line entry point: ``tmclean <command> ...``.

Exit codes: 0 success, 1 usage/configuration, 2 data, 3 provider, 4 internal.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from ._io import atomic_write
from .classifiers import ForestModel, fit_forest, load_model, save_model
from .config import RunConfig, build_context, load_config
from .core import INVALID, FeatureSchema, LabeledUnit, TaskKind, map_label
from .errors import ConfigError, DataError, TaskMismatch, TmcleanError
from .evaluation import cross_validate, select_features
from .features import (
    ALL_FEATURES,
    FeatureCache,
    check_context,
    extract_vectors,
    format_feature_dump,
    provider_fingerprint,
)
from .ingestion import (
    format_tsv_line,
    iter_tmx,
    iter_tsv,
    parse_tmx,
    read_tmx,
    read_tsv,
    require_labels,
    stats,
    write_tmx_elements,
    write_tsv,
)
from .scoring import EvaluationReport, score

log = logging.getLogger("tmclean")

LABEL_NAMES = {1: "correct", 2: "almost correct", 3: "incorrect"}


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit with 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise UsageError(message)


# -- helpers ---------------------------------------------------------------------


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _is_tmx(path: str) -> bool:
    return Path(path).suffix.lower() == ".tmx"


def _strict(cfg: RunConfig, default: bool) -> bool:
    return default if cfg.strict is None else cfg.strict


def _pair(cfg: RunConfig) -> tuple[str, str]:
    if not cfg.source_lang or not cfg.target_lang:
        raise ConfigError("TMX input needs --src-lang and --tgt-lang")
    return cfg.source_lang, cfg.target_lang


def _read_labeled(path: str, cfg: RunConfig) -> list[LabeledUnit]:
    if _is_tmx(path):
        raise DataError("this command needs labeled TSV input; TMX carries no labels")
    return require_labels(read_tsv(path, has_labels=True, strict=_strict(cfg, True)))


def _read_units(path: str, cfg: RunConfig, strict_default: bool) -> list:
    if _is_tmx(path):
        src, tgt = _pair(cfg)
        return read_tmx(path, src, tgt, strict=_strict(cfg, strict_default))
    return read_tsv(path, has_labels=False, strict=_strict(cfg, strict_default))


def _features_matrix(items, cfg: RunConfig, schema: FeatureSchema):
    ctx = build_context(cfg)
    check_context(schema.names, ctx)
    vectors = extract_vectors(items, ctx, schema, cfg.workers)
    return ctx, vectors, np.array([v.values for v in vectors], dtype=float).reshape(len(vectors), len(schema))


def _model_config(cfg: RunConfig, model: ForestModel) -> RunConfig:
    return cfg.model_copy(update={"features": list(model.schema.names), "task": model.task or cfg.task})


def format_report(report: EvaluationReport, title: str = "") -> str:
    lines = [title] if title else []
    lines.append(f"{'class':<8}{'P':>8}{'R':>8}{'F1':>8}{'support':>9}")
    for c, s in sorted(report.per_class.items()):
        lines.append(f"{c:<8}{s.precision:>8.3f}{s.recall:>8.3f}{s.f1:>8.3f}{s.support:>9}")
    lines.append(f"{'weighted':<8}{report.precision:>8.3f}{report.recall:>8.3f}{report.f1:>8.3f}{report.n:>9}")
    lines.append(f"correctly classified: {report.correctly_classified}/{report.n}")
    return "\n".join(lines)


# -- commands ----------------------------------------------------------------------


def cmd_stats(args, cfg: RunConfig) -> int:
    data = _read_labeled(args.input, cfg)
    st = stats(data)
    print(f"{'class':<20}{'count':>8}")
    for c, n in st.class_counts.items():
        print(f"{f'{c} {LABEL_NAMES[c]}':<20}{n:>8}")
    print(f"{'total':<20}{st.total:>8}")
    for pair, counts in sorted(st.by_pair.items()):
        print(f"{pair}: " + ", ".join(f"{c}={n}" for c, n in counts.items()) + f", total={sum(counts.values())}")
    if args.json:
        atomic_write(args.json, _dump_json(st.to_dict()))
    return 0


def cmd_extract(args, cfg: RunConfig) -> int:
    if args.unlabeled:
        items = _read_units(args.input, cfg, strict_default=True)
    else:
        items = _read_labeled(args.input, cfg)
    schema = cfg.schema()
    _, vectors, _ = _features_matrix(items, cfg, schema)
    atomic_write(args.out, format_feature_dump(items, vectors, schema))
    print(f"wrote {len(vectors)} vectors x {len(schema)} features to {args.out}")
    return 0


def cmd_train(args, cfg: RunConfig) -> int:
    data = _read_labeled(args.input, cfg)
    schema = cfg.schema()
    ctx, _, X = _features_matrix(data, cfg, schema)
    y = [map_label(lu.label, cfg.task) for lu in data]
    model = fit_forest(X, y, schema, cfg.forest_params(), cfg.task)
    save_model(model, args.model)
    counts = {c: y.count(c) for c in cfg.task.class_ids}
    print(f"trained {model.n_trees} trees on {len(data)} units ({cfg.task.value}), classes {counts}")
    print(f"features: {', '.join(schema.names)}")
    print(f"model written to {args.model}")
    return 0


def _predict_rows(model: ForestModel, X: np.ndarray):
    return model.predict_matrix(X) if len(X) else []


def cmd_predict(args, cfg: RunConfig) -> int:
    model = load_model(args.model)
    cfg = _model_config(cfg, model)
    items = _read_units(args.input, cfg, strict_default=True)
    _, _, X = _features_matrix(items, cfg, model.schema)
    header = ["id", "predicted"] + [f"p_{c}" for c in model.class_ids]
    lines = ["\t".join(header)]
    for unit, (cls, probs) in zip(items, _predict_rows(model, X)):
        lines.append("\t".join([unit.id, str(cls)] + [repr(probs[c]) for c in model.class_ids]))
    out = "\n".join(lines) + "\n"
    if args.out:
        atomic_write(args.out, out)
    else:
        sys.stdout.write(out)
    return 0


def cmd_evaluate(args, cfg: RunConfig) -> int:
    model = load_model(args.model)
    cfg = _model_config(cfg, model)
    task = model.task or cfg.task
    data = _read_labeled(args.input, cfg)
    ctx, _, X = _features_matrix(data, cfg, model.schema)
    truth = [map_label(lu.label, task) for lu in data]
    pred = [c for c, _ in _predict_rows(model, X)]
    meta = {
        "task": task.value,
        "schema": model.schema.to_dict(),
        "seed": model.params.rng_seed,
        "providers": {n: provider_fingerprint(n, ctx) for n in model.schema.names},
    }
    report = score(truth, pred, model.class_ids, meta)
    print(format_report(report))
    if args.out:
        atomic_write(args.out, _dump_json(report.to_dict()))
    return 0


def cmd_cv(args, cfg: RunConfig) -> int:
    data = _read_labeled(args.input, cfg)
    ctx = build_context(cfg)
    schema = cfg.schema()
    check_context(schema.names, ctx)
    result = cross_validate(
        data, cfg.task, schema, cfg.forest_params(), cfg.split_spec(), ctx, FeatureCache(), cfg.workers
    )
    for rep in result.repetitions:
        print(format_report(rep.report, f"repetition {rep.index}"))
    print(f"\naveraged over {len(result.repetitions)} repetitions: "
          f"P={result.precision:.3f} R={result.recall:.3f} F1={result.f1:.3f}")
    for name, m in result.baseline_means().items():
        print(f"baseline {name}: P={m['precision']:.3f} R={m['recall']:.3f} F1={m['f1']:.3f}")
    if args.out:
        atomic_write(args.out, _dump_json(result.to_dict()))
    return 0


def cmd_select_features(args, cfg: RunConfig) -> int:
    data = _read_labeled(args.input, cfg)
    ctx = build_context(cfg)
    if args.candidates:
        candidates = [c.strip() for c in args.candidates.split(",") if c.strip()]
    else:
        candidates = [n for n in ALL_FEATURES if all(ctx.provider(k) is not None for k in _needs(n))]
    check_context(candidates, ctx)
    result = select_features(
        data, cfg.task, candidates, cfg.split_spec(), ctx, cfg.forest_params(), FeatureCache(), workers=cfg.workers
    )
    for i, step in enumerate(result.steps, start=1):
        print(f"{i:>2}. +{step.added:<24} F1={step.f1:.4f}")
    print(f"selected: {', '.join(result.selected)} (F1={result.f1:.4f})")
    print(f"default nine-feature set: F1={result.reference['f1']:.4f}")
    if args.out:
        atomic_write(args.out, _dump_json(result.to_dict()))
    return 0


def _needs(name: str):
    from .features import FEATURES

    return FEATURES[name].needs


def _rejects(p_invalid: float, threshold: float) -> bool:
    # strictly above the cutoff; a unanimous vote always rejects
    return p_invalid > threshold or p_invalid >= 1.0


def cmd_clean(args, cfg: RunConfig) -> int:
    if not 0.0 <= args.threshold <= 1.0:
        raise UsageError("--threshold must lie in [0, 1]")
    model = load_model(args.model)
    if model.task is not TaskKind.BINARY_II:
        raise TaskMismatch("clean needs a binary-ii model (valid vs invalid)")
    cfg = _model_config(cfg, model)
    strict = _strict(cfg, False)
    ctx = build_context(cfg)
    check_context(model.schema.names, ctx)

    if _is_tmx(args.input):
        src, tgt = _pair(cfg)
        tree = parse_tmx(args.input)
        records = list(iter_tmx(tree, src, tgt))
        locate = lambda r: r.index  # noqa: E731
    else:
        records = list(iter_tsv(args.input, has_labels=False))
        locate = lambda r: r.line_no  # noqa: E731

    good = []
    for rec in records:
        if rec.error is not None and strict:
            raise rec.error
        if rec.error is None:
            good.append(rec)
    units = [rec.item for rec in good]
    vectors = extract_vectors(units, ctx, model.schema, cfg.workers)
    X = np.array([v.values for v in vectors], dtype=float).reshape(len(vectors), len(model.schema))
    p_invalid = {id(rec): probs[INVALID] for rec, (_, probs) in zip(good, _predict_rows(model, X))}

    kept, rejected, reasons = [], [], []
    for rec in records:
        if rec.error is not None:
            rejected.append(rec)
            reasons.append({"line": locate(rec), "id": None, "reason": f"unreadable: {rec.error}"})
            continue
        p = p_invalid[id(rec)]
        if _rejects(p, args.threshold):
            rejected.append(rec)
            reasons.append({"line": locate(rec), "id": rec.item.id, "reason": "classifier", "p_invalid": p})
        else:
            kept.append(rec)

    if _is_tmx(args.input):
        header = tree.getroot().find("header")
        srclang = header.get("srclang", src) if header is not None else src
        write_tmx_elements(args.kept, header, [r.element for r in kept], srclang)
        write_tmx_elements(args.rejected, header, [r.element for r in rejected], srclang)
    else:
        atomic_write(args.kept, "".join(r.line + "\n" for r in kept))
        atomic_write(args.rejected, "".join(r.line + "\n" for r in rejected))
    summary = {
        "input": len(records),
        "kept": len(kept),
        "rejected": len(rejected),
        "threshold": args.threshold,
        "rejections": reasons,
    }
    print(f"{len(records)} units: kept {len(kept)}, rejected {len(rejected)} (threshold {args.threshold})")
    if args.summary:
        atomic_write(args.summary, _dump_json(summary))
    return 0


def cmd_synth(args, cfg: RunConfig) -> int:
    from .synthetic import make_corpus

    corpus = make_corpus(args.n, args.corrupt, seed=cfg.seed)
    write_tsv(args.out, corpus.units)
    print(f"wrote {len(corpus.units)} units ({len(corpus.corrupted_ids())} corrupted) to {args.out}")
    return 0


# -- argument parsing ------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration (flags override --config)")
    g.add_argument("--config", help="JSON run configuration")
    g.add_argument("--seed", type=int)
    g.add_argument("--task", choices=[t.value for t in TaskKind])
    g.add_argument("--workers", type=int)
    g.add_argument("--features", help="comma-separated feature names (default: the nine-feature set)")
    g.add_argument("--trees", type=int, dest="n_trees")
    g.add_argument("--max-depth", type=int)
    g.add_argument("--min-leaf", type=int)
    g.add_argument("--n-best", type=int)
    g.add_argument("--glossary", help="glossary TSV, or bundled:en-de")
    g.add_argument("--mt-endpoint", help="remote MT base URL")
    g.add_argument("--mt-cache", help="n-best cache file")
    g.add_argument("--tagger", choices=["builtin", "external", "none"])
    g.add_argument("--profile-dir", help="directory of language profiles (<lang>.txt)")
    g.add_argument("--src-lang")
    g.add_argument("--tgt-lang")
    g.add_argument("--repetitions", type=int)
    g.add_argument("--train-fraction", type=float)
    mode = g.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_const", const=True)
    mode.add_argument("--lenient", dest="strict", action="store_const", const=False)
    p.add_argument("-v", "--verbose", action="store_true")


def _overrides(args) -> dict:
    o = {
        "seed": args.seed,
        "task": args.task,
        "workers": args.workers,
        "features": [f.strip() for f in args.features.split(",")] if args.features else None,
        "forest.n_trees": args.n_trees,
        "forest.max_depth": args.max_depth,
        "forest.min_leaf_size": args.min_leaf,
        "n_best": args.n_best,
        "mt.cache": args.mt_cache,
        "tagger.kind": args.tagger,
        "langid.profile_dir": args.profile_dir,
        "source_lang": args.src_lang,
        "target_lang": args.tgt_lang,
        "repetitions": args.repetitions,
        "train_fraction": args.train_fraction,
        "strict": args.strict,
    }
    if args.glossary:
        o.update({"mt.kind": "glossary", "mt.glossary": args.glossary})
    if args.mt_endpoint:
        o.update({"mt.kind": "remote", "mt.endpoint": args.mt_endpoint})
    return o


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tmclean", description="Translation-memory unit quality classification.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.set_defaults(func=fn)
        return p

    p = add("stats", cmd_stats, "per-class counts of a labeled TSV file")
    p.add_argument("input")
    p.add_argument("--json", help="also write the statistics as JSON")

    p = add("extract", cmd_extract, "write the feature matrix as TSV")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--unlabeled", action="store_true", help="input has no label column (or is TMX)")

    p = add("train", cmd_train, "train a random forest model")
    p.add_argument("input")
    p.add_argument("--model", required=True, help="output model file")

    p = add("predict", cmd_predict, "classify units with a trained model")
    p.add_argument("input")
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="output TSV (default: stdout)")

    p = add("evaluate", cmd_evaluate, "score a model on labeled data")
    p.add_argument("input")
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="JSON report")

    p = add("cv", cmd_cv, "repeated stratified cross-validation")
    p.add_argument("input")
    p.add_argument("--out", help="JSON report")

    p = add("select-features", cmd_select_features, "greedy forward feature selection")
    p.add_argument("input")
    p.add_argument("--candidates", help="comma-separated candidate features (default: all available)")
    p.add_argument("--out", help="JSON report")

    p = add("clean", cmd_clean, "split a TM into kept and rejected units")
    p.add_argument("input")
    p.add_argument("--model", required=True)
    p.add_argument("--kept", required=True)
    p.add_argument("--rejected", required=True)
    p.add_argument("--summary", help="JSON summary of the run")
    p.add_argument("--threshold", type=float, default=0.5, help="reject when P(invalid) exceeds this")

    p = add("synth", cmd_synth, "generate a synthetic labeled en-de corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=1400)
    p.add_argument("--corrupt", type=float, default=0.2)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"tmclean: error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, _overrides(args))
        return args.func(args, cfg)
    except TmcleanError as exc:
        print(f"tmclean: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return 4


if __name__ == "__main__":
    sys.exit(main())
