"""User-type and emotion classifiers.

Three models share the autodiff core:

* ``YunModel``: joint user typing from description, location, activity
  tweets, and a network embedding (practitioner / promotional / other);
* ``EmotionModel``: attention Bi-LSTM over frozen token vectors, six
  emotion classes, applied zero-shot to unlabeled target posts;
* ``GruModel``: GRU baseline with trainable token embeddings.

Checkpoints are versioned JSON files embedding the config, the frozen
label order, and (for frozen-table models) the tables themselves, so a
reloaded model reproduces probabilities bit-exactly.
"""

from __future__ import annotations

import dataclasses
import json
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from causalmood.corpus import EMOTIONS, Corpus, PostRecord, UserRecord
from causalmood.embed import EmbeddingTable
from causalmood.neural.layers import (
    GRU,
    LSTM,
    BiLSTM,
    ContextAttention,
    Linear,
)
from causalmood.neural.optim import OptimizerConfig, make_optimizer, zero_grads
from causalmood.neural.tensor import (
    Tensor,
    cross_entropy_from_probs,
    concat_cols,
    embedding_rows,
    relu,
    scale,
    select_row,
    softmax_rows,
)
from causalmood.textproc import ActivityMode, KeywordSet, classify_activity, tokenize

CHECKPOINT_MAGIC = "causalmood-checkpoint"
CHECKPOINT_VERSION = 1

USER_TYPE_NAMES = ("practitioner", "promotional", "other")
NO_EMOTION = "ne"


# ---------------------------------------------------------------------------
# Configs

@dataclass
class YunConfig:
    lstm_unit: int = 150
    attn_dim: int = 300
    hidden: int = 200
    net_width: int = 150
    word_dim: int = 300
    max_tweet_tokens: int = 512
    lr: float = 0.01
    weight_decay: float = 1e-4
    epochs: int = 30
    batch_size: int = 16
    patience: int = 3
    seed: int = 0

    classes: int = field(default=3, init=False, repr=False)

    def validate(self) -> None:
        for name in ("lstm_unit", "attn_dim", "hidden", "net_width",
                     "word_dim", "max_tweet_tokens", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.classes != 3:
            raise ValueError("user typing is a fixed 3-class problem")


@dataclass
class EmotionConfig:
    lstm_unit: int = 150
    attn_dim: int = 300
    word_dim: int = 300
    lr: float = 0.01
    weight_decay: float = 1e-4
    epochs: int = 30
    batch_size: int = 64
    patience: int = 3
    ne_threshold: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        for name in ("lstm_unit", "attn_dim", "word_dim", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 <= self.ne_threshold <= 1.0:
            raise ValueError(f"ne_threshold must be in [0, 1], got {self.ne_threshold}")


@dataclass
class GruConfig:
    word_dim: int = 256
    unit: int = 64          # published setting is 1024; small default keeps runs fast
    lr: float = 0.001
    weight_decay: float = 0.0
    epochs: int = 30
    batch_size: int = 64
    patience: int = 3
    seed: int = 0

    def validate(self) -> None:
        for name in ("word_dim", "unit", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


# ---------------------------------------------------------------------------
# Metrics

@dataclass
class EpochMetrics:
    epoch: int
    train_loss: float
    valid_loss: float
    valid_acc: float
    valid_macro_f1: float


def accuracy(y_true: Sequence[int], y_pred: Sequence[int]) -> float:
    if len(y_true) == 0:
        return float("nan")
    return float(np.mean(np.asarray(y_true) == np.asarray(y_pred)))


def macro_f1(y_true: Sequence[int], y_pred: Sequence[int], n_classes: int) -> float:
    """Unweighted mean of per-class F1; a class with no TP scores 0."""
    yt = np.asarray(y_true)
    yp = np.asarray(y_pred)
    scores = []
    for c in range(n_classes):
        tp = int(np.sum((yt == c) & (yp == c)))
        fp = int(np.sum((yt != c) & (yp == c)))
        fn = int(np.sum((yt == c) & (yp != c)))
        if tp == 0:
            scores.append(0.0)
            continue
        precision = tp / (tp + fp)
        recall = tp / (tp + fn)
        scores.append(2 * precision * recall / (precision + recall))
    return float(np.mean(scores))


def write_metrics_csv(history: Sequence[EpochMetrics], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch,train_loss,valid_loss,valid_acc,valid_macro_f1\n")
        for m in history:
            fh.write(
                f"{m.epoch},{m.train_loss!r},{m.valid_loss!r},"
                f"{m.valid_acc!r},{m.valid_macro_f1!r}\n"
            )


def write_predictions_jsonl(records: Sequence[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Token encoding against a frozen table

def encode_tokens(tokens: Sequence[str], table: EmbeddingTable) -> Tensor:
    """(T x dim) constant tensor; empty input becomes one all-zero step."""
    if not tokens:
        return Tensor(np.zeros((1, table.dim)))
    return Tensor(np.stack([table.lookup(t) for t in tokens]))


# ---------------------------------------------------------------------------
# YUN user-type model

class YunModel:
    kind = "user_type"

    def __init__(
        self,
        cfg: YunConfig,
        word_table: EmbeddingTable,
        node_table: EmbeddingTable,
        ks: Optional[KeywordSet] = None,
    ):
        cfg.validate()
        if word_table.dim != cfg.word_dim:
            raise ValueError(
                f"word table dim {word_table.dim} != config word_dim {cfg.word_dim}"
            )
        self.cfg = cfg
        self.word_table = word_table
        self.node_table = node_table
        self.ks = ks if ks is not None else KeywordSet()
        d = cfg.lstm_unit
        rng = np.random.default_rng(cfg.seed)
        self.desc_bilstm = BiLSTM(cfg.word_dim, d, rng)
        self.desc_attn = ContextAttention(2 * d, cfg.attn_dim, rng)
        self.loc_lstm = LSTM(cfg.word_dim, d, rng)
        self.tweets_bilstm = BiLSTM(cfg.word_dim, d, rng)
        self.tweets_attn = ContextAttention(2 * d, cfg.attn_dim, rng)
        self.net_linear = Linear(node_table.dim, cfg.net_width, rng)
        concat_width = 2 * d + d + 2 * d + cfg.net_width
        self.hidden_linear = Linear(concat_width, cfg.hidden, rng)
        self.out_linear = Linear(cfg.hidden, cfg.classes, rng)

    def params(self) -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        out.update(self.desc_bilstm.params("desc_bilstm"))
        out.update(self.desc_attn.params("desc_attn"))
        out.update(self.loc_lstm.params("loc_lstm"))
        out.update(self.tweets_bilstm.params("tweets_bilstm"))
        out.update(self.tweets_attn.params("tweets_attn"))
        out.update(self.net_linear.params("net_linear"))
        out.update(self.hidden_linear.params("hidden_linear"))
        out.update(self.out_linear.params("out_linear"))
        return out

    def activity_tokens(self, user: UserRecord) -> list[str]:
        """Tokens of the user's keyword posts in timestamp order, truncated."""
        tokens: list[str] = []
        for post in sorted(user.posts, key=lambda p: (p.timestamp, p.post_id)):
            if not classify_activity(post, self.ks, ActivityMode.ANY_YOGA):
                continue
            tokens.extend(tokenize(post.text))
            if len(tokens) >= self.cfg.max_tweet_tokens:
                return tokens[: self.cfg.max_tweet_tokens]
        return tokens

    def _blocks(self, user: UserRecord) -> list[Tensor]:
        d = self.cfg.lstm_unit
        desc_tokens = tokenize(user.description)
        if desc_tokens:
            states = self.desc_bilstm(encode_tokens(desc_tokens, self.word_table))
            _, r_des = self.desc_attn(states)
        else:
            r_des = Tensor(np.zeros((1, 2 * d)))
        loc_tokens = tokenize(user.location)
        if loc_tokens:
            states = self.loc_lstm(encode_tokens(loc_tokens, self.word_table))
            r_loc = select_row(states, states.data.shape[0] - 1)
        else:
            r_loc = Tensor(np.zeros((1, d)))
        tweet_tokens = self.activity_tokens(user)
        if tweet_tokens:
            states = self.tweets_bilstm(encode_tokens(tweet_tokens, self.word_table))
            _, r_tweets = self.tweets_attn(states)
        else:
            r_tweets = Tensor(np.zeros((1, 2 * d)))
        if user.user_id in self.node_table:
            vec = Tensor(self.node_table.lookup(user.user_id)[None, :])
            r_network = relu(self.net_linear(vec))
        else:
            r_network = Tensor(np.zeros((1, self.cfg.net_width)))
        return [r_des, r_loc, r_tweets, r_network]

    def user_representation(self, user: UserRecord) -> np.ndarray:
        """The concatenated joint representation, as a plain vector."""
        return concat_cols(self._blocks(user)).data[0].copy()

    def forward_user(self, user: UserRecord) -> Tensor:
        """Class probabilities (1 x 3): practitioner, promotional, other."""
        r_user = concat_cols(self._blocks(user))
        u = relu(self.hidden_linear(r_user))
        return softmax_rows(self.out_linear(u))


# ---------------------------------------------------------------------------
# Attention Bi-LSTM emotion model

class EmotionModel:
    kind = "emotion_attention"

    def __init__(self, cfg: EmotionConfig, word_table: EmbeddingTable):
        cfg.validate()
        if word_table.dim != cfg.word_dim:
            raise ValueError(
                f"word table dim {word_table.dim} != config word_dim {cfg.word_dim}"
            )
        self.cfg = cfg
        self.word_table = word_table
        self.labels = EMOTIONS
        rng = np.random.default_rng(cfg.seed)
        d = cfg.lstm_unit
        self.bilstm = BiLSTM(cfg.word_dim, d, rng)
        self.attn = ContextAttention(2 * d, cfg.attn_dim, rng)
        self.head = Linear(2 * d, len(self.labels), rng)

    def params(self) -> dict[str, Tensor]:
        return {
            **self.bilstm.params("bilstm"),
            **self.attn.params("attn"),
            **self.head.params("head"),
        }

    def forward_text(self, text: str) -> Tensor:
        tokens = tokenize(text)
        states = self.bilstm(encode_tokens(tokens, self.word_table))
        _, pooled = self.attn(states)
        return softmax_rows(self.head(pooled))


# ---------------------------------------------------------------------------
# GRU baseline with trainable embeddings

UNK_TOKEN = "<unk>"


class GruModel:
    kind = "emotion_gru"

    def __init__(self, cfg: GruConfig, vocab: dict[str, int]):
        cfg.validate()
        if vocab.get(UNK_TOKEN) != 0:
            raise ValueError(f"vocab must map {UNK_TOKEN!r} to index 0")
        self.cfg = cfg
        self.vocab = vocab
        self.labels = EMOTIONS
        rng = np.random.default_rng(cfg.seed)
        self.embedding = Tensor(
            rng.uniform(-0.1, 0.1, (len(vocab), cfg.word_dim)), requires_grad=True
        )
        self.gru = GRU(cfg.word_dim, cfg.unit, rng)
        self.head = Linear(cfg.unit, len(self.labels), rng)

    @staticmethod
    def build_vocab(texts: Sequence[str], min_count: int = 1) -> dict[str, int]:
        from collections import Counter

        counts = Counter(t for text in texts for t in tokenize(text))
        kept = sorted((t for t, c in counts.items() if c >= min_count),
                      key=lambda t: (-counts[t], t))
        return {UNK_TOKEN: 0, **{t: i + 1 for i, t in enumerate(kept)}}

    def params(self) -> dict[str, Tensor]:
        return {
            "embedding": self.embedding,
            **self.gru.params("gru"),
            **self.head.params("head"),
        }

    def forward_text(self, text: str) -> Tensor:
        tokens = tokenize(text)
        indices = [self.vocab.get(t, 0) for t in tokens] or [0]
        states = self.gru(embedding_rows(self.embedding, indices))
        last = select_row(states, states.data.shape[0] - 1)
        return softmax_rows(self.head(last))


# ---------------------------------------------------------------------------
# Shared training loop

def _snapshot(params: dict[str, Tensor]) -> dict[str, np.ndarray]:
    return {k: p.data.copy() for k, p in params.items()}


def _restore(params: dict[str, Tensor], snap: dict[str, np.ndarray]) -> None:
    for k, p in params.items():
        p.data[:] = snap[k]


def _evaluate(
    forward: Callable[[object], Tensor],
    samples: Sequence[tuple[object, int]],
    n_classes: int,
) -> tuple[float, float, float]:
    if not samples:
        return float("nan"), float("nan"), float("nan")
    losses = []
    y_true, y_pred = [], []
    for x, label in samples:
        probs = forward(x)
        losses.append(cross_entropy_from_probs(probs, [label]).item())
        y_true.append(label)
        y_pred.append(int(np.argmax(probs.data[0])))
    return (float(np.mean(losses)), accuracy(y_true, y_pred),
            macro_f1(y_true, y_pred, n_classes))


def fit_classifier(
    params: dict[str, Tensor],
    forward: Callable[[object], Tensor],
    train_samples: Sequence[tuple[object, int]],
    valid_samples: Sequence[tuple[object, int]],
    n_classes: int,
    opt_cfg: OptimizerConfig,
    epochs: int,
    batch_size: int,
    patience: int,
    rng: np.random.Generator,
) -> list[EpochMetrics]:
    """Mini-batch training with early stopping on validation loss.

    Stops after `patience` consecutive epochs of rising validation loss and
    restores the best-validation parameters before returning the per-epoch
    history.
    """
    if not train_samples:
        raise ValueError("empty training split")
    optimizer = make_optimizer(params, opt_cfg)
    history: list[EpochMetrics] = []
    best_loss = np.inf
    best_snap = _snapshot(params)
    prev_valid = np.inf
    rise_streak = 0
    n = len(train_samples)
    for epoch in range(epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            zero_grads(params.values())
            for idx in batch:
                x, label = train_samples[int(idx)]
                loss = cross_entropy_from_probs(forward(x), [label])
                epoch_losses.append(loss.item())
                scale(loss, 1.0 / len(batch)).backward()
            optimizer.step()
        valid_loss, valid_acc, valid_f1 = _evaluate(forward, valid_samples, n_classes)
        history.append(EpochMetrics(
            epoch=epoch,
            train_loss=float(np.mean(epoch_losses)),
            valid_loss=valid_loss,
            valid_acc=valid_acc,
            valid_macro_f1=valid_f1,
        ))
        if valid_samples:
            if valid_loss < best_loss:
                best_loss = valid_loss
                best_snap = _snapshot(params)
            if valid_loss > prev_valid:
                rise_streak += 1
                if rise_streak >= patience:
                    break
            else:
                rise_streak = 0
            prev_valid = valid_loss
    if valid_samples:
        _restore(params, best_snap)
    return history


def _check_class_coverage(labels: Sequence[int], n_classes: int, split: str) -> None:
    present = set(labels)
    missing = [c for c in range(n_classes) if c not in present]
    if missing:
        warnings.warn(
            f"{split} split has no instances of class(es) {missing}; "
            "macro-F1 scores those classes 0",
            stacklevel=3,
        )


def _labeled_users(corpus: Corpus) -> list[tuple[UserRecord, int]]:
    return [
        (u, int(u.user_type_label))
        for u in corpus.users
        if u.user_type_label is not None
    ]


def train_yun(
    train: Corpus,
    valid: Corpus,
    cfg: YunConfig,
    word_table: EmbeddingTable,
    node_table: EmbeddingTable,
    ks: Optional[KeywordSet] = None,
) -> tuple[YunModel, list[EpochMetrics]]:
    model = YunModel(cfg, word_table, node_table, ks)
    train_s = _labeled_users(train)
    valid_s = _labeled_users(valid)
    if not train_s:
        raise ValueError("training corpus has no users with user_type_label")
    _check_class_coverage([y for _, y in train_s], 3, "train")
    if valid_s:
        _check_class_coverage([y for _, y in valid_s], 3, "valid")
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
    history = fit_classifier(
        model.params(), model.forward_user, train_s, valid_s, 3,
        OptimizerConfig(kind="adadelta", lr=cfg.lr, weight_decay=cfg.weight_decay),
        cfg.epochs, cfg.batch_size, cfg.patience, rng,
    )
    return model, history


def _label_to_index(label: str) -> int:
    try:
        return EMOTIONS.index(label)
    except ValueError:
        raise ValueError(
            f"unknown emotion label {label!r}; expected one of {EMOTIONS}"
        ) from None


def _text_samples(pairs: Sequence[tuple[str, str]]) -> list[tuple[str, int]]:
    return [(text, _label_to_index(label)) for text, label in pairs]


def train_emotion(
    train_pairs: Sequence[tuple[str, str]],
    valid_pairs: Sequence[tuple[str, str]],
    cfg: EmotionConfig,
    word_table: EmbeddingTable,
) -> tuple[EmotionModel, list[EpochMetrics]]:
    model = EmotionModel(cfg, word_table)
    train_s = _text_samples(train_pairs)
    valid_s = _text_samples(valid_pairs)
    _check_class_coverage([y for _, y in train_s], len(EMOTIONS), "train")
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
    history = fit_classifier(
        model.params(), model.forward_text, train_s, valid_s, len(EMOTIONS),
        OptimizerConfig(kind="adam", lr=cfg.lr, weight_decay=cfg.weight_decay),
        cfg.epochs, cfg.batch_size, cfg.patience, rng,
    )
    return model, history


def train_gru_baseline(
    train_pairs: Sequence[tuple[str, str]],
    valid_pairs: Sequence[tuple[str, str]],
    cfg: GruConfig,
) -> tuple[GruModel, list[EpochMetrics]]:
    vocab = GruModel.build_vocab([text for text, _ in train_pairs])
    model = GruModel(cfg, vocab)
    train_s = _text_samples(train_pairs)
    valid_s = _text_samples(valid_pairs)
    _check_class_coverage([y for _, y in train_s], len(EMOTIONS), "train")
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
    history = fit_classifier(
        model.params(), model.forward_text, train_s, valid_s, len(EMOTIONS),
        OptimizerConfig(kind="adam", lr=cfg.lr, weight_decay=cfg.weight_decay),
        cfg.epochs, cfg.batch_size, cfg.patience, rng,
    )
    return model, history


# ---------------------------------------------------------------------------
# Inference

def classify_users(corpus: Corpus, model: YunModel) -> dict[str, dict]:
    """user_id -> {"type": class index, "probs": [p0, p1, p2]}.

    Argmax ties resolve toward the lower class index.
    """
    out: dict[str, dict] = {}
    for user in corpus.users:
        probs = model.forward_user(user).data[0]
        out[user.user_id] = {
            "type": int(np.argmax(probs)),
            "probs": [float(p) for p in probs],
        }
    return out


def transfer_classify_emotion(
    posts: Sequence[PostRecord],
    model: "EmotionModel | GruModel",
    ne_threshold: Optional[float] = None,
) -> list[dict]:
    """Zero-shot labels for target posts.

    Each record: {"post_id", "user_id", "label", "probs"}. When the winning
    probability is below ``ne_threshold`` the label is "ne" (no emotion);
    threshold 0 disables that escape hatch.
    """
    if ne_threshold is None:
        ne_threshold = getattr(model.cfg, "ne_threshold", 0.0)
    if not 0.0 <= ne_threshold <= 1.0 + 1e-12:
        raise ValueError(f"ne_threshold must be in [0, 1], got {ne_threshold}")
    records = []
    for post in posts:
        probs = model.forward_text(post.text).data[0]
        top = int(np.argmax(probs))
        label = model.labels[top] if probs[top] >= ne_threshold else NO_EMOTION
        records.append({
            "post_id": post.post_id,
            "user_id": post.user_id,
            "label": label,
            "probs": [float(p) for p in probs],
        })
    return records


# ---------------------------------------------------------------------------
# Checkpoints

def _table_to_json(table: EmbeddingTable) -> dict:
    keys = list(table.key_index.keys())
    return {
        "keys": keys,
        "dim": table.dim,
        "matrix": [[float(x) for x in table.matrix[table.key_index[k]]]
                   for k in keys],
    }


def _table_from_json(obj: dict) -> EmbeddingTable:
    keys = [str(k) for k in obj["keys"]]
    matrix = np.asarray(obj["matrix"], dtype=np.float64)
    if matrix.size == 0:
        matrix = matrix.reshape(0, int(obj["dim"]))
    return EmbeddingTable({k: i for i, k in enumerate(keys)}, matrix, int(obj["dim"]))


def save_checkpoint(model: "YunModel | EmotionModel | GruModel", path: str) -> None:
    payload: dict = {
        "magic": CHECKPOINT_MAGIC,
        "version": CHECKPOINT_VERSION,
        "kind": model.kind,
        "config": dataclasses.asdict(model.cfg),
        "params": {k: p.data.tolist() for k, p in model.params().items()},
    }
    if isinstance(model, YunModel):
        payload["labels"] = list(USER_TYPE_NAMES)
        payload["word_table"] = _table_to_json(model.word_table)
        payload["node_table"] = _table_to_json(model.node_table)
        payload["keywords"] = {
            "activity_keywords": sorted(model.ks.activity_keywords),
            "core_keyword": model.ks.core_keyword,
        }
    elif isinstance(model, EmotionModel):
        payload["labels"] = list(model.labels)
        payload["word_table"] = _table_to_json(model.word_table)
    elif isinstance(model, GruModel):
        payload["labels"] = list(model.labels)
        payload["vocab"] = model.vocab
    else:
        raise TypeError(f"cannot checkpoint {type(model).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)
        fh.write("\n")


def _config_from(payload: dict, cls):
    fields = {f.name for f in dataclasses.fields(cls) if f.init}
    obj = dict(payload["config"])
    unknown = set(obj) - fields - {"classes"}
    if unknown:
        raise ValueError(f"checkpoint config has unknown keys {sorted(unknown)}")
    return cls(**{k: v for k, v in obj.items() if k in fields})


def load_checkpoint(path: str) -> "YunModel | EmotionModel | GruModel":
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("magic") != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a model checkpoint (bad magic)")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ValueError(
            f"{path}: unsupported checkpoint version {payload.get('version')}"
        )
    kind = payload.get("kind")
    if kind == "user_type":
        cfg = _config_from(payload, YunConfig)
        ksobj = payload["keywords"]
        ks = KeywordSet(frozenset(ksobj["activity_keywords"]), ksobj["core_keyword"])
        model: "YunModel | EmotionModel | GruModel" = YunModel(
            cfg, _table_from_json(payload["word_table"]),
            _table_from_json(payload["node_table"]), ks,
        )
        if list(payload["labels"]) != list(USER_TYPE_NAMES):
            raise ValueError(f"{path}: unexpected user-type label order")
    elif kind == "emotion_attention":
        cfg = _config_from(payload, EmotionConfig)
        model = EmotionModel(cfg, _table_from_json(payload["word_table"]))
    elif kind == "emotion_gru":
        cfg = _config_from(payload, GruConfig)
        vocab = {str(k): int(v) for k, v in payload["vocab"].items()}
        model = GruModel(cfg, vocab)
    else:
        raise ValueError(f"{path}: unknown checkpoint kind {kind!r}")
    if kind != "user_type" and list(payload["labels"]) != list(EMOTIONS):
        raise ValueError(
            f"{path}: checkpoint label order {payload['labels']} does not match "
            f"this build's {list(EMOTIONS)}"
        )
    params = model.params()
    stored = payload["params"]
    missing = set(params) - set(stored)
    extra = set(stored) - set(params)
    if missing or extra:
        raise ValueError(
            f"{path}: parameter set mismatch (missing {sorted(missing)}, "
            f"extra {sorted(extra)})"
        )
    for name, tensor in params.items():
        arr = np.asarray(stored[name], dtype=np.float64)
        if arr.shape != tensor.data.shape:
            raise ValueError(
                f"{path}: parameter {name} has shape {arr.shape}, "
                f"expected {tensor.data.shape}"
            )
        tensor.data[:] = arr
    return model
