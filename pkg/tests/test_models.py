"""Classifier models: configs, metrics, forward contracts, the shared
training loop, zero-shot inference, and checkpoint round-trips."""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np
import pytest

from causalmood.corpus import EMOTIONS
from causalmood.embed import EmbeddingTable
from causalmood.models import (
    EmotionConfig,
    EmotionModel,
    EpochMetrics,
    GruConfig,
    GruModel,
    NO_EMOTION,
    USER_TYPE_NAMES,
    YunConfig,
    YunModel,
    accuracy,
    classify_users,
    encode_tokens,
    fit_classifier,
    load_checkpoint,
    macro_f1,
    save_checkpoint,
    train_emotion,
    train_gru_baseline,
    train_yun,
    transfer_classify_emotion,
    write_metrics_csv,
    write_predictions_jsonl,
)
from causalmood.neural.optim import OptimizerConfig
from causalmood.neural.tensor import Tensor, matmul, softmax_rows
from causalmood.textproc import KeywordSet


def tiny_table(keys: Sequence[str], dim: int, seed: int = 0) -> EmbeddingTable:
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((len(keys), dim)) * 0.3
    return EmbeddingTable({k: i for i, k in enumerate(keys)}, matrix, dim)


EMOTION_POOLS: dict[str, list[str]] = {
    "joy": ["smile", "laugh", "grin", "cheer"],
    "love": ["adore", "darling", "heart", "dear"],
    "sadness": ["weep", "mourn", "tears", "gloom"],
    "anger": ["rage", "fury", "growl", "vex"],
    "fear": ["dread", "panic", "shiver", "fright"],
    "surprise": ["gasp", "sudden", "blink", "whoa"],
}


def emotion_pairs(per_class: int, seed: int) -> list[tuple[str, str]]:
    """Labeled texts where each class draws from its own token pool."""
    rng = np.random.default_rng(seed)
    pairs = []
    for label in EMOTIONS:
        pool = EMOTION_POOLS[label]
        for _ in range(per_class):
            k = int(rng.integers(2, 4))
            words = [pool[int(i)] for i in rng.integers(0, len(pool), k)]
            pairs.append((" ".join(words), label))
    return pairs


ALL_POOL_WORDS = [w for pool in EMOTION_POOLS.values() for w in pool]


def small_emotion_cfg(**overrides) -> EmotionConfig:
    base = dict(lstm_unit=3, attn_dim=4, word_dim=4, epochs=2,
                batch_size=8, seed=0)
    base.update(overrides)
    return EmotionConfig(**base)


def small_yun_cfg(**overrides) -> YunConfig:
    base = dict(lstm_unit=3, attn_dim=4, hidden=5, net_width=3, word_dim=4,
                max_tweet_tokens=8, epochs=2, batch_size=4, seed=0)
    base.update(overrides)
    return YunConfig(**base)


class TestMetrics:
    """Hand-checkable accuracy and macro-F1 values."""

    def test_accuracy(self):
        assert accuracy([0, 1, 2, 1], [0, 1, 1, 1]) == 0.75
        assert np.isnan(accuracy([], []))

    def test_macro_f1_hand_value(self):
        # class 0: P=1, R=1/2 -> 2/3; class 1: P=1/3, R=1 -> 1/2;
        # class 2 has no true positives -> 0.
        got = macro_f1([0, 0, 1, 2], [0, 1, 1, 1], 3)
        np.testing.assert_allclose(got, (2 / 3 + 1 / 2 + 0) / 3, rtol=1e-12)

    def test_macro_f1_perfect(self):
        assert macro_f1([0, 1, 2], [0, 1, 2], 3) == 1.0

    def test_macro_f1_counts_absent_classes(self):
        # Perfect on two classes, but the third never appears: mean over 3.
        got = macro_f1([0, 1], [0, 1], 3)
        np.testing.assert_allclose(got, 2 / 3, rtol=1e-12)

    def test_metrics_csv(self, tmp_path):
        history = [EpochMetrics(0, 1.5, 1.25, 0.5, 0.4375)]
        path = tmp_path / "metrics.csv"
        write_metrics_csv(history, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "epoch,train_loss,valid_loss,valid_acc,valid_macro_f1"
        assert lines[1] == "0,1.5,1.25,0.5,0.4375"

    def test_predictions_jsonl(self, tmp_path):
        path = tmp_path / "preds.jsonl"
        write_predictions_jsonl(
            [{"post_id": "p1", "label": "joy"}, {"post_id": "p2", "label": "🧘"}],
            str(path))
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 2
        assert json.loads(lines[1])["label"] == "🧘"
        assert "🧘" in lines[1]  # not escaped to \u sequences


class TestEncodeTokens:
    def test_empty_becomes_single_zero_step(self):
        table = tiny_table(["a"], 3)
        out = encode_tokens([], table)
        assert out.shape == (1, 3)
        np.testing.assert_array_equal(out.data, 0.0)

    def test_rows_follow_token_order(self):
        table = tiny_table(["a", "b"], 3)
        out = encode_tokens(["b", "a", "b"], table)
        np.testing.assert_array_equal(out.data[0], table.lookup("b"))
        np.testing.assert_array_equal(out.data[1], table.lookup("a"))
        np.testing.assert_array_equal(out.data[2], table.lookup("b"))

    def test_unknown_token_is_zero_vector(self):
        table = tiny_table(["a"], 3)
        out = encode_tokens(["zzzq"], table)
        np.testing.assert_array_equal(out.data, np.zeros((1, 3)))


class TestConfigs:
    def test_yun_rejects_bad_sizes(self):
        with pytest.raises(ValueError, match="lstm_unit"):
            small_yun_cfg(lstm_unit=0).validate()
        with pytest.raises(ValueError, match="batch_size"):
            small_yun_cfg(batch_size=0).validate()

    def test_yun_class_count_is_fixed(self):
        cfg = small_yun_cfg()
        cfg.classes = 4
        with pytest.raises(ValueError, match="3-class"):
            cfg.validate()

    def test_emotion_threshold_range(self):
        with pytest.raises(ValueError, match="ne_threshold"):
            small_emotion_cfg(ne_threshold=1.5).validate()
        small_emotion_cfg(ne_threshold=1.0).validate()

    def test_gru_rejects_bad_sizes(self):
        with pytest.raises(ValueError, match="unit"):
            GruConfig(unit=0).validate()


class TestYunModel:
    """The joint text + location + activity + network representation."""

    def _model(self, **cfg_overrides) -> YunModel:
        cfg = small_yun_cfg(**cfg_overrides)
        words = tiny_table(
            ALL_POOL_WORDS + ["yoga", "studio", "deals", "teacher", "in",
                              "london", "daily", "practice"],
            cfg.word_dim, seed=1)
        nodes = tiny_table(["u1", "u2"], 5, seed=2)
        return YunModel(cfg, words, nodes)

    def test_forward_is_distribution(self, make_user):
        model = self._model()
        user = make_user("u1", description="yoga teacher in london")
        probs = model.forward_user(user)
        assert probs.shape == (1, 3)
        np.testing.assert_allclose(probs.data.sum(), 1.0, atol=1e-12)
        assert (probs.data > 0).all()

    def test_empty_user_representation_is_zero(self, make_user, make_post):
        model = self._model()
        user = make_user("ghost", posts=[make_post("ghost", text="hello")])
        rep = model.user_representation(user)
        d, w = model.cfg.lstm_unit, model.cfg.net_width
        assert rep.shape == (2 * d + d + 2 * d + w,)
        np.testing.assert_array_equal(rep, 0.0)
        probs = model.forward_user(user)
        np.testing.assert_allclose(probs.data.sum(), 1.0, atol=1e-12)

    def test_blocks_fill_independently(self, make_user, make_post):
        model = self._model()
        d, w = model.cfg.lstm_unit, model.cfg.net_width
        with_desc = make_user("u9", description="daily practice",
                              posts=[make_post("u9")])
        rep = model.user_representation(with_desc)
        assert np.abs(rep[:2 * d]).sum() > 0, "description block stayed zero"
        np.testing.assert_array_equal(rep[2 * d:], 0.0)

        networked = make_user("u1", posts=[make_post("u1")])
        rep = model.user_representation(networked)
        np.testing.assert_array_equal(rep[:5 * d], 0.0)
        assert np.abs(rep[5 * d:]).sum() > 0, "network block stayed zero"
        assert (rep[5 * d:] >= 0).all(), "network block skips its relu"

    def test_location_uses_last_state(self, make_user, make_post):
        model = self._model()
        user = make_user("u7", location="in london", posts=[make_post("u7")])
        rep = model.user_representation(user)
        d = model.cfg.lstm_unit
        loc_block = rep[2 * d:3 * d]
        states = model.loc_lstm(
            encode_tokens(["in", "london"], model.word_table))
        np.testing.assert_array_equal(loc_block, states.data[-1])

    def test_activity_tokens_filter_sort_truncate(self, make_user, make_post):
        model = self._model(max_tweet_tokens=3)
        posts = [
            make_post("u1", text="yoga studio deals", timestamp=200),
            make_post("u1", text="hello world", timestamp=100),
            make_post("u1", text="daily yoga practice", timestamp=150),
        ]
        user = make_user("u1", posts=posts)
        # the non-keyword post is skipped; the rest go in time order and
        # the cap cuts mid-stream
        assert model.activity_tokens(user) == ["daily", "yoga", "practice"]

    def test_activity_tokens_unlimited_when_under_cap(self, make_user, make_post):
        model = self._model()
        posts = [make_post("u1", text="yoga studio", timestamp=100),
                 make_post("u1", text="yoga deals", timestamp=200)]
        user = make_user("u1", posts=posts)
        assert model.activity_tokens(user) == \
            ["yoga", "studio", "yoga", "deals"]

    def test_word_dim_mismatch_rejected(self):
        cfg = small_yun_cfg()
        with pytest.raises(ValueError, match="word_dim"):
            YunModel(cfg, tiny_table(["a"], cfg.word_dim + 1),
                     tiny_table(["u1"], 5))

    def test_param_names_unique_and_complete(self):
        model = self._model()
        params = model.params()
        # 2 BiLSTMs (3 tensors per direction), 1 LSTM, 2 attentions,
        # 3 linears: 6+6+3+3+3+2+2+2 = 27 tensors
        assert len(params) == 27
        assert all(p.requires_grad for p in params.values())


class TestEmotionModel:
    def _model(self, **overrides) -> EmotionModel:
        cfg = small_emotion_cfg(**overrides)
        return EmotionModel(cfg, tiny_table(ALL_POOL_WORDS, cfg.word_dim, 3))

    def test_forward_is_distribution(self):
        model = self._model()
        probs = model.forward_text("smile and laugh")
        assert probs.shape == (1, len(EMOTIONS))
        np.testing.assert_allclose(probs.data.sum(), 1.0, atol=1e-12)

    def test_labels_are_the_emotion_order(self):
        assert self._model().labels == EMOTIONS

    def test_empty_and_all_unknown_text_agree(self):
        # both encode to a single zero step, so the outputs are identical
        model = self._model()
        np.testing.assert_array_equal(model.forward_text("").data,
                                      model.forward_text("zzzq").data)

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValueError, match="word_dim"):
            EmotionModel(small_emotion_cfg(), tiny_table(["a"], 9))


class TestGruModel:
    def test_build_vocab_orders_by_count_then_alpha(self):
        vocab = GruModel.build_vocab(["b b b a a c", "a c"])
        assert vocab == {"<unk>": 0, "a": 1, "b": 2, "c": 3}

    def test_build_vocab_min_count(self):
        vocab = GruModel.build_vocab(["a a b"], min_count=2)
        assert vocab == {"<unk>": 0, "a": 1}

    def test_vocab_must_reserve_unk(self):
        with pytest.raises(ValueError, match="<unk>"):
            GruModel(GruConfig(word_dim=4, unit=3), {"a": 0})

    def test_forward_maps_oov_to_unk(self):
        cfg = GruConfig(word_dim=4, unit=3, seed=0)
        model = GruModel(cfg, {"<unk>": 0, "smile": 1})
        np.testing.assert_array_equal(model.forward_text("zzzq").data,
                                      model.forward_text("").data)
        probs = model.forward_text("smile")
        assert probs.shape == (1, len(EMOTIONS))
        np.testing.assert_allclose(probs.data.sum(), 1.0, atol=1e-12)

    def test_embedding_is_trainable(self):
        model = GruModel(GruConfig(word_dim=4, unit=3), {"<unk>": 0, "a": 1})
        params = model.params()
        assert "embedding" in params
        assert params["embedding"].requires_grad
        assert params["embedding"].shape == (2, 4)


def _toy_points(seed: int, n_per_class: int,
                flip: bool = False) -> list[tuple[np.ndarray, int]]:
    """Two gaussian blobs on the x-axis, optionally mislabeled."""
    rng = np.random.default_rng(seed)
    samples = []
    for label, center in ((0, 2.0), (1, -2.0)):
        for _ in range(n_per_class):
            x = np.array([center, 0.0]) + rng.normal(0, 0.3, 2)
            samples.append((x, 1 - label if flip else label))
    return samples


class TestFitClassifier:
    """The shared loop on a two-class logistic regression."""

    def _fit(self, train, valid, epochs: int = 40, patience: int = 3):
        w = Tensor(np.zeros((2, 2)), requires_grad=True)

        def forward(x) -> Tensor:
            return softmax_rows(matmul(Tensor(np.asarray(x)[None, :]), w))

        history = fit_classifier(
            {"w": w}, forward, train, valid, 2,
            OptimizerConfig(kind="sgd_momentum", lr=0.5, momentum=0.0),
            epochs, batch_size=4, patience=patience,
            rng=np.random.default_rng(0))
        return w, forward, history

    def test_loss_decreases_and_separates(self):
        train = _toy_points(0, 12)
        valid = _toy_points(1, 6)
        _, forward, history = self._fit(train, valid)
        assert history[-1].train_loss < 0.25 * history[0].train_loss, \
            f"train loss {history[0].train_loss:.3f} -> " \
            f"{history[-1].train_loss:.3f}"
        preds = [int(np.argmax(forward(x).data[0])) for x, _ in train]
        assert accuracy([y for _, y in train], preds) == 1.0
        assert history[-1].valid_acc == 1.0

    def test_early_stop_on_rising_validation(self):
        # mislabeled validation rises as training fits, tripping patience
        train = _toy_points(0, 12)
        valid = _toy_points(1, 6, flip=True)
        _, _, history = self._fit(train, valid, epochs=40, patience=3)
        assert len(history) < 40, "patience never triggered"

    def test_restores_best_validation_params(self):
        train = _toy_points(0, 12)
        valid = _toy_points(1, 6, flip=True)
        w, forward, history = self._fit(train, valid)
        best = min(h.valid_loss for h in history)
        losses = []
        for x, label in valid:
            probs = forward(x).data[0]
            losses.append(-np.log(max(probs[label], 1e-12)))
        np.testing.assert_allclose(np.mean(losses), best, rtol=1e-12,
                                   err_msg="parameters not from best epoch")

    def test_empty_training_split_rejected(self):
        with pytest.raises(ValueError, match="empty training"):
            self._fit([], [])

    def test_history_without_validation_runs_all_epochs(self):
        train = _toy_points(0, 4)
        _, _, history = self._fit(train, [], epochs=5)
        assert len(history) == 5
        assert all(np.isnan(h.valid_loss) for h in history)


class TestTrainers:
    def test_train_emotion_is_deterministic(self):
        train = emotion_pairs(2, seed=5)
        valid = emotion_pairs(1, seed=9)
        table = tiny_table(ALL_POOL_WORDS, 4, seed=6)
        cfg = small_emotion_cfg(epochs=2)
        model_a, hist_a = train_emotion(train, valid, cfg, table)
        model_b, hist_b = train_emotion(train, valid, cfg, table)
        assert [h.train_loss for h in hist_a] == [h.train_loss for h in hist_b]
        np.testing.assert_array_equal(model_a.forward_text("smile whoa").data,
                                      model_b.forward_text("smile whoa").data)

    def test_train_emotion_rejects_unknown_label(self):
        table = tiny_table(ALL_POOL_WORDS, 4)
        with pytest.raises(ValueError, match="unknown emotion"):
            train_emotion([("smile", "happiness")], [], small_emotion_cfg(),
                          table)

    def test_missing_class_warns(self):
        table = tiny_table(ALL_POOL_WORDS, 4)
        with pytest.warns(UserWarning, match="no instances"):
            train_emotion([("smile", "joy"), ("laugh", "joy")], [],
                          small_emotion_cfg(epochs=1), table)

    def test_train_gru_builds_vocab_from_train_only(self):
        pairs = emotion_pairs(2, seed=7)
        cfg = GruConfig(word_dim=4, unit=3, epochs=1, batch_size=8)
        with pytest.warns(UserWarning, match="no instances"):
            model, history = train_gru_baseline(pairs[:4], pairs[4:6], cfg)
        assert model.vocab["<unk>"] == 0
        train_tokens = {t for text, _ in pairs[:4] for t in text.split()}
        assert set(model.vocab) == {"<unk>"} | train_tokens
        assert len(history) == 1

    def test_train_yun_smoke(self, make_user, make_post):
        users = [
            make_user("u1", description="smile cheer",
                      posts=[make_post("u1")], user_type_label=0),
            make_user("u2", description="rage fury",
                      posts=[make_post("u2")], user_type_label=1),
            make_user("u3", description="gasp whoa",
                      posts=[make_post("u3")], user_type_label=2),
            make_user("u4", description="laugh grin",
                      posts=[make_post("u4")], user_type_label=0),
        ]
        from causalmood.corpus import Corpus
        train = Corpus(users=tuple(users), provenance="t")
        valid = Corpus(users=(make_user("u5", description="smile",
                                        posts=[make_post("u5")],
                                        user_type_label=0),), provenance="v")
        cfg = small_yun_cfg(epochs=2)
        words = tiny_table(ALL_POOL_WORDS, cfg.word_dim, seed=1)
        nodes = tiny_table(["u1", "u2"], 5, seed=2)
        with pytest.warns(UserWarning, match="no instances"):
            model, history = train_yun(train, valid, cfg, words, nodes)
        assert len(history) >= 1
        assert all(np.isfinite(h.train_loss) for h in history)

    def test_train_yun_needs_labels(self, make_corpus, make_user):
        corpus = make_corpus([make_user("u1")])
        cfg = small_yun_cfg()
        with pytest.raises(ValueError, match="user_type_label"):
            train_yun(corpus, corpus, cfg,
                      tiny_table(["a"], cfg.word_dim), tiny_table(["u1"], 5))


class TestInference:
    def test_classify_users_structure(self, make_corpus, make_user, make_post):
        cfg = small_yun_cfg()
        model = YunModel(cfg, tiny_table(ALL_POOL_WORDS, cfg.word_dim, 1),
                         tiny_table(["u1"], 5, 2))
        corpus = make_corpus([
            make_user("u1", description="smile", posts=[make_post("u1")]),
            make_user("u2", description="rage", posts=[make_post("u2")]),
        ])
        out = classify_users(corpus, model)
        assert set(out) == {"u1", "u2"}
        for rec in out.values():
            assert rec["type"] in (0, 1, 2)
            np.testing.assert_allclose(sum(rec["probs"]), 1.0, atol=1e-12)
            assert rec["type"] == int(np.argmax(rec["probs"]))

    def test_transfer_labels_and_passthrough(self, make_post):
        model = EmotionModel(small_emotion_cfg(),
                             tiny_table(ALL_POOL_WORDS, 4, 3))
        posts = [make_post("u1", text="smile laugh"),
                 make_post("u2", text="dread panic")]
        records = transfer_classify_emotion(posts, model)
        assert [r["post_id"] for r in records] == [p.post_id for p in posts]
        assert [r["user_id"] for r in records] == ["u1", "u2"]
        for rec in records:
            assert rec["label"] in EMOTIONS
            np.testing.assert_allclose(sum(rec["probs"]), 1.0, atol=1e-12)

    def test_transfer_ne_threshold(self, make_post):
        model = EmotionModel(small_emotion_cfg(),
                             tiny_table(ALL_POOL_WORDS, 4, 3))
        posts = [make_post("u1", text="smile")]
        # an untrained model sits near uniform, far below 0.99
        records = transfer_classify_emotion(posts, model, ne_threshold=0.99)
        assert records[0]["label"] == NO_EMOTION
        records = transfer_classify_emotion(posts, model, ne_threshold=0.0)
        assert records[0]["label"] in EMOTIONS

    def test_transfer_threshold_from_config(self, make_post):
        cfg = small_emotion_cfg(ne_threshold=0.99)
        model = EmotionModel(cfg, tiny_table(ALL_POOL_WORDS, 4, 3))
        records = transfer_classify_emotion([make_post("u1", text="smile")],
                                            model)
        assert records[0]["label"] == NO_EMOTION

    def test_transfer_rejects_bad_threshold(self, make_post):
        model = EmotionModel(small_emotion_cfg(),
                             tiny_table(ALL_POOL_WORDS, 4, 3))
        with pytest.raises(ValueError, match="ne_threshold"):
            transfer_classify_emotion([make_post("u1")], model,
                                      ne_threshold=1.5)


class TestCheckpoints:
    """Save/load must reproduce probabilities bit-exactly and reject
    tampered or foreign files."""

    def _emotion_model(self) -> EmotionModel:
        return EmotionModel(small_emotion_cfg(seed=4),
                            tiny_table(ALL_POOL_WORDS, 4, 5))

    def _yun_model(self) -> YunModel:
        cfg = small_yun_cfg(seed=4)
        ks = KeywordSet(frozenset({"yoga", "asana"}), "yoga")
        return YunModel(cfg, tiny_table(ALL_POOL_WORDS + ["yoga"],
                                        cfg.word_dim, 1),
                        tiny_table(["u1", "u2"], 5, 2), ks)

    def test_emotion_round_trip(self, tmp_path):
        model = self._emotion_model()
        path = str(tmp_path / "emo.json")
        save_checkpoint(model, path)
        loaded = load_checkpoint(path)
        assert isinstance(loaded, EmotionModel)
        assert loaded.cfg == model.cfg
        np.testing.assert_array_equal(loaded.forward_text("smile gasp").data,
                                      model.forward_text("smile gasp").data)

    def test_gru_round_trip(self, tmp_path):
        vocab = GruModel.build_vocab(["smile laugh", "rage fury"])
        model = GruModel(GruConfig(word_dim=4, unit=3, seed=4), vocab)
        path = str(tmp_path / "gru.json")
        save_checkpoint(model, path)
        loaded = load_checkpoint(path)
        assert isinstance(loaded, GruModel)
        assert loaded.vocab == vocab
        np.testing.assert_array_equal(loaded.forward_text("smile zzz").data,
                                      model.forward_text("smile zzz").data)

    def test_yun_round_trip(self, tmp_path, make_user, make_post):
        model = self._yun_model()
        path = str(tmp_path / "yun.json")
        save_checkpoint(model, path)
        loaded = load_checkpoint(path)
        assert isinstance(loaded, YunModel)
        assert loaded.ks == model.ks
        user = make_user("u1", description="smile cheer", location="dear",
                         posts=[make_post("u1", text="morning yoga")])
        np.testing.assert_array_equal(loaded.forward_user(user).data,
                                      model.forward_user(user).data)

    def _tamper(self, path: str, mutate) -> None:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        mutate(payload)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)

    def test_rejects_bad_magic(self, tmp_path):
        path = str(tmp_path / "m.json")
        save_checkpoint(self._emotion_model(), path)
        self._tamper(path, lambda p: p.update(magic="other"))
        with pytest.raises(ValueError, match="magic"):
            load_checkpoint(path)

    def test_rejects_bad_version(self, tmp_path):
        path = str(tmp_path / "m.json")
        save_checkpoint(self._emotion_model(), path)
        self._tamper(path, lambda p: p.update(version=99))
        with pytest.raises(ValueError, match="version"):
            load_checkpoint(path)

    def test_rejects_unknown_kind(self, tmp_path):
        path = str(tmp_path / "m.json")
        save_checkpoint(self._emotion_model(), path)
        self._tamper(path, lambda p: p.update(kind="mystery"))
        with pytest.raises(ValueError, match="kind"):
            load_checkpoint(path)

    def test_rejects_label_reorder(self, tmp_path):
        path = str(tmp_path / "m.json")
        save_checkpoint(self._emotion_model(), path)
        self._tamper(path, lambda p: p.update(labels=list(reversed(EMOTIONS))))
        with pytest.raises(ValueError, match="label order"):
            load_checkpoint(path)

    def test_rejects_unknown_config_key(self, tmp_path):
        path = str(tmp_path / "m.json")
        save_checkpoint(self._emotion_model(), path)
        self._tamper(path, lambda p: p["config"].update(dropout=0.5))
        with pytest.raises(ValueError, match="unknown keys"):
            load_checkpoint(path)

    def test_rejects_param_shape_change(self, tmp_path):
        path = str(tmp_path / "m.json")
        save_checkpoint(self._emotion_model(), path)

        def chop(p):
            name = sorted(p["params"])[0]
            p["params"][name] = [row[:-1] for row in p["params"][name]]

        self._tamper(path, chop)
        with pytest.raises(ValueError, match="shape"):
            load_checkpoint(path)

    def test_rejects_param_set_mismatch(self, tmp_path):
        path = str(tmp_path / "m.json")
        save_checkpoint(self._emotion_model(), path)
        self._tamper(path, lambda p: p["params"].pop(sorted(p["params"])[0]))
        with pytest.raises(ValueError, match="missing"):
            load_checkpoint(path)
        save_checkpoint(self._emotion_model(), path)
        self._tamper(path, lambda p: p["params"].update(ghost=[[1.0]]))
        with pytest.raises(ValueError, match="extra"):
            load_checkpoint(path)

    def test_user_type_label_names_are_frozen(self, tmp_path):
        path = str(tmp_path / "y.json")
        save_checkpoint(self._yun_model(), path)
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        assert payload["labels"] == list(USER_TYPE_NAMES)
        self._tamper(path, lambda p: p.update(labels=["a", "b", "c"]))
        with pytest.raises(ValueError, match="label order"):
            load_checkpoint(path)
