"""Command-line surface wiring the pipeline end to end.

Stages: ingest/validate/synth (corpora) -> graph/embed (network and token
vectors) -> train/classify (user typing, emotion transfer) -> series ->
granger -> report/plotdata.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import NoReturn, Optional, Sequence

import numpy as np

from causalmood import corpus as corpus_mod
from causalmood import embed as embed_mod
from causalmood import graph as graph_mod
from causalmood import granger as granger_mod
from causalmood import models as models_mod
from causalmood import series as series_mod
from causalmood import synth as synth_mod
from causalmood.config import ConfigError, PipelineConfig, activity_mode, load_config
from causalmood.corpus import Corpus, CorpusError
from causalmood.textproc import tokenize

USAGE_EXIT = 1
DATA_EXIT = 2
INTERNAL_EXIT = 3

_SAFE_ID = re.compile(r"[A-Za-z0-9._-]+\Z")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this surface reserves 2 for data."""

    def error(self, message: str):  # noqa: A003 - argparse API
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _fail(message: str) -> NoReturn:
    raise CorpusError(message)


# ---------------------------------------------------------------------------
# Shared helpers

def _config(args: argparse.Namespace) -> PipelineConfig:
    return load_config(getattr(args, "config", None))


def _load_corpus(path: str) -> Corpus:
    corpus = corpus_mod.load_jsonl(path)
    corpus.validate()
    return corpus


def _load_emotions(path: Optional[str]) -> Optional[dict[str, str]]:
    """Predictions JSONL -> post_id -> label; '-' means stored labels."""
    if path is None or path == "-":
        return None
    emotions: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                emotions[str(obj["post_id"])] = str(obj["label"])
            except (json.JSONDecodeError, KeyError) as exc:
                _fail(f"{path}: line {lineno}: bad prediction record ({exc})")
    return emotions


def _parse_lags(text: str) -> tuple[int, ...]:
    text = text.strip()
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo < 1 or hi < lo:
            _fail(f"bad lag range {text!r}")
        return tuple(range(lo, hi + 1))
    try:
        lags = tuple(int(p) for p in text.split(","))
    except ValueError:
        _fail(f"bad lag list {text!r}; expected '1..5' or '1,2,5'")
    if not lags or any(lag < 1 for lag in lags):
        _fail(f"lags must be positive, got {lags}")
    return lags


def _word_sequences(corpus: Corpus) -> list[list[str]]:
    sequences = []
    for user in corpus.users:
        for field in (user.description, user.location):
            tokens = tokenize(field)
            if tokens:
                sequences.append(tokens)
        for post in user.posts:
            tokens = tokenize(post.text)
            if tokens:
                sequences.append(tokens)
    return sequences


def _empty_table(dim: int) -> embed_mod.EmbeddingTable:
    return embed_mod.EmbeddingTable({}, np.zeros((0, dim)), dim)


def _split_pairs(pairs, spec):
    n = len(pairs)
    if n == 0:
        _fail("no labeled posts to train on")
    order = np.random.default_rng(spec.seed).permutation(n)
    n_valid = int(n * spec.valid_frac)
    n_test = int(n * spec.test_frac)
    n_train = n - n_valid - n_test
    shuffled = [pairs[i] for i in order]
    return (shuffled[:n_train], shuffled[n_train:n_train + n_valid],
            shuffled[n_train + n_valid:])


def _write_run_outputs(out_dir, results, totals, settings) -> None:
    os.makedirs(out_dir, exist_ok=True)
    granger_mod.write_results_csv(results, os.path.join(out_dir, "results.csv"))
    granger_mod.write_totals_csv(totals, os.path.join(out_dir, "totals.csv"))
    summary = granger_mod.summarize(
        results, totals, settings.headline_lag, settings.top_fraction
    )
    text = granger_mod.render_summary(summary)
    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(text)
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary.as_dict(), fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Commands

def cmd_ingest(args) -> int:
    corpus = corpus_mod.ingest_twitter_export(args.input, args.drop_retweets)
    corpus_mod.save_jsonl(corpus, args.output)
    n_posts = sum(len(u.posts) for u in corpus.users)
    print(f"ingested {len(corpus.users)} users / {n_posts} posts -> {args.output}")
    return 0


def cmd_validate(args) -> int:
    corpus = _load_corpus(args.corpus)
    n_posts = sum(len(u.posts) for u in corpus.users)
    print(f"ok: {len(corpus.users)} users, {n_posts} posts")
    return 0


def cmd_synth(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.synth.seed = args.seed
    corpus, manifest = synth_mod.generate(cfg.synth)
    corpus_mod.save_jsonl(corpus, args.out_corpus)
    synth_mod.save_manifest(manifest, args.out_manifest)
    n_causal = sum(1 for m in manifest.values() if m["causal"])
    print(f"generated {len(corpus.users)} users ({n_causal} causal) "
          f"-> {args.out_corpus}")
    return 0


def cmd_graph_build(args) -> int:
    cfg = _config(args)
    corpus = _load_corpus(args.corpus)
    g = graph_mod.build_mention_graph(
        corpus, cfg.graph.restrict_to_activity_posts, cfg.keywords
    )
    graph_mod.save_graph(g, args.output)
    if args.edge_list:
        graph_mod.export_edge_list(g, args.edge_list)
    print(f"graph: {g.n_nodes} nodes, {g.n_edges} edges -> {args.output}")
    return 0


def cmd_embed_nodes(args) -> int:
    cfg = _config(args)
    if args.seed is not None:
        cfg.walk.seed = args.seed
    g = graph_mod.load_graph(args.graph)
    losses: list[float] = []
    table = embed_mod.embed_nodes(g, cfg.walk, losses)
    embed_mod.save_embeddings(table, args.output)
    print(f"embedded {len(table)} of {g.n_nodes} nodes "
          f"(final loss {losses[-1]:.4f}) -> {args.output}")
    return 0


def cmd_embed_words(args) -> int:
    cfg = _config(args)
    if args.seed is not None:
        cfg.walk.seed = args.seed
    corpus = _load_corpus(args.corpus)
    sequences = _word_sequences(corpus)
    if not sequences:
        _fail(f"{args.corpus}: no text to embed")
    losses: list[float] = []
    table = embed_mod.train_skipgram(sequences, cfg.walk, losses)
    embed_mod.save_embeddings(table, args.output)
    print(f"embedded {len(table)} tokens (final loss {losses[-1]:.4f}) "
          f"-> {args.output}")
    return 0


def cmd_train_user_model(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.yun.seed = args.seed
    corpus = _load_corpus(args.corpus)
    word_path = args.word_vectors or cfg.paths.word_vectors
    if word_path is None:
        _fail("no word vectors: pass --word-vectors or set paths.word_vectors")
    word_table = embed_mod.load_embeddings(word_path)
    node_path = args.node_vectors or cfg.paths.node_vectors
    node_table = (embed_mod.load_embeddings(node_path) if node_path
                  else _empty_table(1))
    if word_table.dim != cfg.yun.word_dim:
        _fail(
            f"word vectors have dim {word_table.dim} but yun.word_dim is "
            f"{cfg.yun.word_dim}; align the config with the table"
        )
    train, valid, _ = corpus_mod.split(corpus, cfg.split)
    model, history = models_mod.train_yun(
        train, valid, cfg.yun, word_table, node_table, cfg.keywords
    )
    models_mod.save_checkpoint(model, args.checkpoint)
    if args.metrics:
        models_mod.write_metrics_csv(history, args.metrics)
    best = min((m.valid_loss for m in history), default=float("nan"))
    print(f"trained user model: {len(history)} epochs, "
          f"best valid loss {best:.4f} -> {args.checkpoint}")
    return 0


def cmd_classify_users(args) -> int:
    corpus = _load_corpus(args.corpus)
    model = models_mod.load_checkpoint(args.checkpoint)
    if not isinstance(model, models_mod.YunModel):
        _fail(f"{args.checkpoint}: not a user-type checkpoint")
    assignments = models_mod.classify_users(corpus, model)
    records = [
        {
            "user_id": uid,
            "label": models_mod.USER_TYPE_NAMES[info["type"]],
            "probs": info["probs"],
        }
        for uid, info in assignments.items()
    ]
    models_mod.write_predictions_jsonl(records, args.output)
    n_prac = sum(1 for r in records if r["label"] == "practitioner")
    print(f"classified {len(records)} users ({n_prac} practitioners) "
          f"-> {args.output}")
    return 0


def cmd_train_emotion(args) -> int:
    cfg = load_config(args.config)
    corpus = _load_corpus(args.corpus)
    pairs = corpus_mod.gather_labeled_posts(corpus)
    if not pairs:
        _fail(f"{args.corpus}: no posts with emotion labels")
    train_pairs, valid_pairs, _ = _split_pairs(pairs, cfg.split)
    if args.model == "gru":
        if args.seed is not None:
            cfg.gru.seed = args.seed
        model, history = models_mod.train_gru_baseline(
            train_pairs, valid_pairs, cfg.gru
        )
    else:
        if args.seed is not None:
            cfg.emotion.seed = args.seed
        word_path = args.word_vectors or cfg.paths.word_vectors
        if word_path:
            word_table = embed_mod.load_embeddings(word_path)
        else:
            walk_cfg = cfg.walk
            walk_cfg.dim = cfg.emotion.word_dim
            word_table = embed_mod.train_skipgram(
                [tokenize(text) for text, _ in train_pairs], walk_cfg
            )
        if word_table.dim != cfg.emotion.word_dim:
            _fail(
                f"word vectors have dim {word_table.dim} but emotion.word_dim "
                f"is {cfg.emotion.word_dim}; align the config with the table"
            )
        model, history = models_mod.train_emotion(
            train_pairs, valid_pairs, cfg.emotion, word_table
        )
    models_mod.save_checkpoint(model, args.checkpoint)
    if args.metrics:
        models_mod.write_metrics_csv(history, args.metrics)
    last = history[-1]
    print(f"trained {args.model} emotion model: {len(history)} epochs, "
          f"valid acc {last.valid_acc:.3f} -> {args.checkpoint}")
    return 0


def cmd_classify_emotion(args) -> int:
    corpus = _load_corpus(args.corpus)
    model = models_mod.load_checkpoint(args.checkpoint)
    if not isinstance(model, (models_mod.EmotionModel, models_mod.GruModel)):
        _fail(f"{args.checkpoint}: not an emotion checkpoint")
    posts = list(corpus_mod.iter_posts(corpus))
    records = models_mod.transfer_classify_emotion(posts, model, args.ne_threshold)
    models_mod.write_predictions_jsonl(records, args.output)
    print(f"labeled {len(records)} posts -> {args.output}")
    return 0


def cmd_series_build(args) -> int:
    cfg = _config(args)
    bin_width = args.bin or cfg.series.bin
    mode_name = args.mode or cfg.series.mode
    mode = activity_mode("any" if mode_name == "any" else "firsthand")
    corpus = _load_corpus(args.corpus)
    emotions = _load_emotions(args.emotions)
    os.makedirs(args.out_dir, exist_ok=True)
    written = 0
    skipped = 0
    for user in corpus.users:
        if not user.posts:
            skipped += 1
            continue
        if not _SAFE_ID.match(user.user_id):
            _fail(f"user id {user.user_id!r} is not filename-safe")
        pair = series_mod.build_series(
            user, emotions, mode, bin_width, cfg.keywords
        )
        if args.normalize or cfg.series.normalize:
            totals = series_mod.build_volume_series(user, emotions, bin_width)
            pair = series_mod.normalize_pair(pair, totals)
        series_mod.write_series_csv(
            pair, os.path.join(args.out_dir, f"{user.user_id}.csv")
        )
        written += 1
    note = f" ({skipped} empty users skipped)" if skipped else ""
    print(f"wrote {written} series{note} -> {args.out_dir}")
    return 0


def _granger_settings(args, cfg: PipelineConfig):
    settings = cfg.granger
    if args.lags is not None:
        settings.lags = _parse_lags(args.lags)
    if args.alpha is not None:
        settings.alpha_level = args.alpha
    if args.headline_lag is not None:
        settings.headline_lag = args.headline_lag
    if args.bonferroni:
        settings.bonferroni = True
    if settings.headline_lag not in settings.lags:
        _fail(
            f"headline lag {settings.headline_lag} not among lags {settings.lags}"
        )
    return settings


def cmd_granger_run(args) -> int:
    cfg = _config(args)
    settings = _granger_settings(args, cfg)
    names = sorted(n for n in os.listdir(args.series_dir) if n.endswith(".csv"))
    if not names:
        _fail(f"{args.series_dir}: no series files (*.csv)")
    pairs = [
        series_mod.read_series_csv(os.path.join(args.series_dir, name), name[:-4])
        for name in names
    ]
    results = granger_mod.batch_test(
        pairs, settings.lags, settings.alpha_level, settings.statistic,
        settings.bonferroni,
    )
    totals = {p.user_id: float(p.a.sum()) for p in pairs}
    _write_run_outputs(args.out_dir, results, totals, settings)
    return 0


def cmd_granger_control(args) -> int:
    cfg = _config(args)
    settings = _granger_settings(args, cfg)
    corpus = _load_corpus(args.corpus)
    emotions = _load_emotions(args.emotions)
    pairs = [
        series_mod.build_volume_series(user, emotions, cfg.series.bin)
        for user in corpus.users
        if user.posts
    ]
    if not pairs:
        _fail(f"{args.corpus}: no users with posts")
    results = granger_mod.batch_test(
        pairs, settings.lags, settings.alpha_level, settings.statistic,
        settings.bonferroni,
    )
    totals = {p.user_id: float(p.a.sum()) for p in pairs}
    _write_run_outputs(args.out_dir, results, totals, settings)
    return 0


def cmd_report(args) -> int:
    cfg = _config(args)
    results = granger_mod.read_results_csv(
        os.path.join(args.results_dir, "results.csv")
    )
    totals = granger_mod.read_totals_csv(
        os.path.join(args.results_dir, "totals.csv")
    )
    settings = cfg.granger
    if args.headline_lag is not None:
        settings.headline_lag = args.headline_lag
    summary = granger_mod.summarize(
        results, totals, settings.headline_lag, settings.top_fraction
    )
    if args.output.endswith(".json"):
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(summary.as_dict(), fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(granger_mod.render_summary(summary))
    sys.stdout.write(granger_mod.render_summary(summary))
    return 0


def cmd_plotdata(args) -> int:
    pair = series_mod.read_series_csv(args.series, "series")
    monthly: dict[str, list[float]] = {}
    for date, a, p in zip(pair.bin_dates(), pair.a, pair.p):
        key = date[:7]  # YYYY-MM
        acc = monthly.setdefault(key, [0.0, 0.0])
        acc[0] += float(a)
        acc[1] += float(p)
    def fmt(x: float) -> str:
        return str(int(x)) if x.is_integer() else repr(x)

    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("month,a,p\n")
        for key in sorted(monthly):
            a, p = monthly[key]
            fh.write(f"{key},{fmt(a)},{fmt(p)}\n")
    print(f"wrote {len(monthly)} monthly rows -> {args.output}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly

def _add_config(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="pipeline config JSON (default: built-ins)")


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="override the config seed")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="causalmood",
        description="Does activity posting Granger-cause posting happily? "
                    "Batch pipeline from raw timelines to causality reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("ingest", help="convert a raw status export to corpus JSONL")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--drop-retweets", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("validate", help="schema-check a corpus file")
    p.add_argument("corpus")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="generate a synthetic corpus + manifest")
    p.add_argument("config", help="pipeline config JSON ('-' for defaults)")
    p.add_argument("out_corpus")
    p.add_argument("out_manifest")
    _add_seed(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("graph", help="mention-network commands")
    gsub = p.add_subparsers(dest="graph_command", required=True,
                            parser_class=_Parser)
    g = gsub.add_parser("build", help="build the mention graph from a corpus")
    g.add_argument("corpus")
    g.add_argument("output")
    g.add_argument("--edge-list", help="also export a sorted edge list")
    _add_config(g)
    g.set_defaults(func=cmd_graph_build)

    p = sub.add_parser("embed", help="embedding commands")
    esub = p.add_subparsers(dest="embed_command", required=True,
                            parser_class=_Parser)
    e = esub.add_parser("nodes", help="walk the graph and train node vectors")
    e.add_argument("graph")
    e.add_argument("output")
    _add_config(e)
    _add_seed(e)
    e.set_defaults(func=cmd_embed_nodes)
    e = esub.add_parser("words", help="train token vectors on corpus text")
    e.add_argument("corpus")
    e.add_argument("output")
    _add_config(e)
    _add_seed(e)
    e.set_defaults(func=cmd_embed_words)

    p = sub.add_parser("train", help="model training")
    tsub = p.add_subparsers(dest="train_command", required=True,
                            parser_class=_Parser)
    t = tsub.add_parser("user-model", help="train the joint user-type model")
    t.add_argument("corpus")
    t.add_argument("config", help="pipeline config JSON ('-' for defaults)")
    t.add_argument("checkpoint")
    t.add_argument("--word-vectors")
    t.add_argument("--node-vectors")
    t.add_argument("--metrics", help="write per-epoch metrics CSV here")
    _add_seed(t)
    t.set_defaults(func=cmd_train_user_model)
    t = tsub.add_parser("emotion", help="train an emotion classifier")
    t.add_argument("corpus", help="labeled source corpus")
    t.add_argument("config", help="pipeline config JSON ('-' for defaults)")
    t.add_argument("checkpoint")
    t.add_argument("--model", choices=("bilstm", "gru"), default="bilstm")
    t.add_argument("--word-vectors",
                   help="frozen token vectors (bilstm; default: train on corpus)")
    t.add_argument("--metrics")
    _add_seed(t)
    t.set_defaults(func=cmd_train_emotion)

    p = sub.add_parser("classify", help="model inference")
    csub = p.add_subparsers(dest="classify_command", required=True,
                            parser_class=_Parser)
    c = csub.add_parser("users", help="assign user types with a checkpoint")
    c.add_argument("corpus")
    c.add_argument("checkpoint")
    c.add_argument("output")
    c.set_defaults(func=cmd_classify_users)
    c = csub.add_parser("emotion", help="zero-shot emotion labels for posts")
    c.add_argument("corpus")
    c.add_argument("checkpoint")
    c.add_argument("output")
    c.add_argument("--ne-threshold", type=float,
                   help="emit 'ne' when the top probability is below this")
    c.set_defaults(func=cmd_classify_emotion)

    p = sub.add_parser("series", help="time-series commands")
    ssub = p.add_subparsers(dest="series_command", required=True,
                            parser_class=_Parser)
    s = ssub.add_parser("build", help="per-user (activity, happiness) series")
    s.add_argument("corpus")
    s.add_argument("emotions",
                   help="predictions JSONL, or '-' to use stored labels")
    s.add_argument("out_dir")
    s.add_argument("--mode", choices=("any", "firsthand"))
    s.add_argument("--bin", choices=("day", "week", "month"))
    s.add_argument("--normalize", action="store_true",
                   help="divide both series by per-bin post totals")
    _add_config(s)
    s.set_defaults(func=cmd_series_build)

    p = sub.add_parser("granger", help="causality tests")
    grsub = p.add_subparsers(dest="granger_command", required=True,
                             parser_class=_Parser)
    for name, help_text, fn in (
        ("run", "test activity -> happiness over a series directory",
         cmd_granger_run),
        ("control", "test posting volume -> happiness (null control)",
         cmd_granger_control),
    ):
        g = grsub.add_parser(name, help=help_text)
        if name == "run":
            g.add_argument("series_dir")
        else:
            g.add_argument("corpus")
            g.add_argument("emotions",
                           help="predictions JSONL, or '-' for stored labels")
        g.add_argument("out_dir")
        g.add_argument("--lags", help="e.g. '1..5' or '1,3,5'")
        g.add_argument("--alpha", type=float)
        g.add_argument("--headline-lag", type=int)
        g.add_argument("--bonferroni", action="store_true")
        _add_config(g)
        g.set_defaults(func=fn)

    p = sub.add_parser("report", help="re-summarize a results directory")
    p.add_argument("results_dir")
    p.add_argument("output", help="summary path (.json for JSON, else text)")
    p.add_argument("--headline-lag", type=int)
    _add_config(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("plotdata", help="monthly totals from a series CSV")
    p.add_argument("series")
    p.add_argument("output")
    p.set_defaults(func=cmd_plotdata)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args) or 0)
    except (CorpusError, ConfigError, FileNotFoundError, NotADirectoryError,
            PermissionError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT
    except Exception as exc:  # anything else is a bug, not bad input
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL_EXIT


if __name__ == "__main__":
    sys.exit(main())
