"""Corpus schema, JSONL round-trips, splitting, and raw-export ingestion."""

from __future__ import annotations

import json

import numpy as np
import pytest

from causalmood.corpus import (
    Corpus,
    CorpusError,
    EMOTIONS,
    PostRecord,
    SplitSpec,
    UserRecord,
    UserType,
    gather_labeled_posts,
    ingest_twitter_export,
    iter_posts,
    load_jsonl,
    save_jsonl,
    split,
)


class TestRecordValidation:
    """Field-level invariants raise CorpusError with the offending id."""

    def test_emotion_labels_are_the_six_classes(self):
        assert EMOTIONS == ("joy", "love", "sadness", "anger", "fear", "surprise")

    def test_user_type_codes(self):
        assert UserType.PRACTITIONER == 0
        assert UserType.PROMOTIONAL == 1
        assert UserType.OTHER == 2

    def test_bad_timestamp(self, make_post):
        post = make_post(timestamp=0)
        with pytest.raises(CorpusError, match="timestamp"):
            post.validate()

    def test_empty_text(self, make_post):
        post = make_post(text="   ")
        with pytest.raises(CorpusError, match="text"):
            post.validate()

    def test_unknown_emotion_label(self, make_post):
        post = make_post(emotion_label="bored")
        with pytest.raises(CorpusError, match="emotion_label"):
            post.validate()

    def test_pos_tags_must_align_with_tokens(self, make_post):
        post = make_post(text="hello world", pos_tags=("UH",))
        with pytest.raises(CorpusError, match="pos_tags"):
            post.validate()
        aligned = make_post(text="hello world", pos_tags=("UH", "NN"))
        aligned.validate()

    def test_foreign_post_rejected(self, make_post, make_user):
        stray = make_post(user_id="intruder")
        user = make_user(user_id="owner", posts=[stray])
        with pytest.raises(CorpusError, match="owner"):
            user.validate()

    def test_bad_user_type_label(self, make_user):
        user = make_user(user_type_label=5)
        with pytest.raises(CorpusError, match="user_type_label"):
            user.validate()

    def test_duplicate_user_ids(self, make_user, make_corpus):
        corpus = make_corpus([make_user("a"), make_user("a")])
        with pytest.raises(CorpusError, match="duplicate"):
            corpus.validate()


class TestJsonlRoundTrip:
    """save_jsonl then load_jsonl preserves every field."""

    def test_round_trip(self, tmp_path, make_post, make_user, make_corpus):
        posts = [
            make_post("u1", text="first post 🧘", emotion_label="joy",
                      mentions=("u2",)),
            make_post("u1", text="i did yoga", pos_tags=("PRP", "VBD", "NN")),
        ]
        corpus = make_corpus([
            make_user("u1", posts=posts, description="desc", location="loc"),
            make_user("u2", user_type_label=1),
        ])
        path = tmp_path / "c.jsonl"
        save_jsonl(corpus, str(path))
        loaded = load_jsonl(str(path))

        assert loaded.user_ids() == ["u1", "u2"]
        u1 = loaded.users[0]
        assert u1.description == "desc"
        assert u1.location == "loc"
        assert [p.text for p in u1.posts] == ["first post 🧘", "i did yoga"]
        assert u1.posts[0].emotion_label == "joy"
        assert list(u1.posts[0].mentions) == ["u2"]
        assert list(u1.posts[1].pos_tags) == ["PRP", "VBD", "NN"]
        assert loaded.users[1].user_type_label == 1

    def test_save_load_save_is_byte_stable(self, tmp_path, make_user, make_corpus):
        corpus = make_corpus([make_user("u1"), make_user("u2")])
        p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        save_jsonl(corpus, str(p1))
        save_jsonl(load_jsonl(str(p1)), str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_malformed_json_cites_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"user_id": "a", "posts": []}\n{broken\n')
        with pytest.raises(CorpusError, match="line 2"):
            load_jsonl(str(path))

    def test_duplicate_user_cites_both_lines(self, tmp_path):
        path = tmp_path / "dup.jsonl"
        path.write_text(
            '{"user_id": "a", "posts": []}\n'
            '{"user_id": "b", "posts": []}\n'
            '{"user_id": "a", "posts": []}\n'
        )
        with pytest.raises(CorpusError, match=r"line 3.*first seen on line 1"):
            load_jsonl(str(path))

    def test_missing_field_cites_line(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text('{"handle": "@x", "posts": []}\n')
        with pytest.raises(CorpusError, match="user_id"):
            load_jsonl(str(path))

    def test_unknown_fields_ignored(self, tmp_path):
        path = tmp_path / "extra.jsonl"
        path.write_text(
            '{"user_id": "a", "posts": [], "follower_count": 9000}\n'
        )
        assert load_jsonl(str(path)).user_ids() == ["a"]

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "blank.jsonl"
        path.write_text('\n{"user_id": "a", "posts": []}\n\n')
        assert len(load_jsonl(str(path))) == 1


class TestSplit:
    """Seeded shuffle into train/valid/test with floor-rounded tails."""

    def _corpus(self, make_user, make_corpus, n=10):
        return make_corpus([make_user(f"u{i:02d}") for i in range(n)])

    def test_sizes(self, make_user, make_corpus):
        corpus = self._corpus(make_user, make_corpus, 10)
        train, valid, test = split(corpus, SplitSpec())
        assert (len(train), len(valid), len(test)) == (6, 2, 2)

    def test_remainder_goes_to_train(self, make_user, make_corpus):
        corpus = self._corpus(make_user, make_corpus, 7)
        train, valid, test = split(corpus, SplitSpec())
        # floor(7*0.2) = 1 for each tail, train gets the rest
        assert (len(train), len(valid), len(test)) == (5, 1, 1)

    def test_partition_is_disjoint_and_complete(self, make_user, make_corpus):
        corpus = self._corpus(make_user, make_corpus, 23)
        train, valid, test = split(corpus, SplitSpec(seed=5))
        ids = train.user_ids() + valid.user_ids() + test.user_ids()
        assert sorted(ids) == sorted(corpus.user_ids())
        assert len(set(ids)) == len(ids)

    def test_same_seed_same_split(self, make_user, make_corpus):
        corpus = self._corpus(make_user, make_corpus, 12)
        a = split(corpus, SplitSpec(seed=3))
        b = split(corpus, SplitSpec(seed=3))
        assert [p.user_ids() for p in a] == [p.user_ids() for p in b]

    def test_different_seed_different_split(self, make_user, make_corpus):
        corpus = self._corpus(make_user, make_corpus, 30)
        a = split(corpus, SplitSpec(seed=0))
        b = split(corpus, SplitSpec(seed=1))
        assert a[0].user_ids() != b[0].user_ids()

    def test_provenance_suffixes(self, make_user, make_corpus):
        corpus = self._corpus(make_user, make_corpus, 5)
        train, valid, test = split(corpus, SplitSpec())
        assert train.provenance.endswith("[train]")
        assert valid.provenance.endswith("[valid]")
        assert test.provenance.endswith("[test]")

    def test_bad_fractions_rejected(self, make_user, make_corpus):
        corpus = self._corpus(make_user, make_corpus, 5)
        with pytest.raises(ValueError):
            split(corpus, SplitSpec(train_frac=0.5, valid_frac=0.2, test_frac=0.2))

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            split(Corpus(users=[]), SplitSpec())


def _status(uid: str, status_id: str, text: str, created: str,
            mentions=(), retweeted=False, **extra) -> dict:
    obj = {
        "id_str": status_id,
        "text": text,
        "created_at": created,
        "user": {"id_str": uid, "screen_name": f"s_{uid}",
                 "description": "d", "location": "l"},
        "entities": {"user_mentions": [{"id_str": m} for m in mentions]},
    }
    if retweeted:
        obj["retweeted_status"] = {"id_str": "orig"}
    obj.update(extra)
    return obj


class TestIngestTwitterExport:
    """Raw status JSONL to corpus, grouped by author."""

    def _write(self, tmp_path, statuses):
        path = tmp_path / "raw.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            for s in statuses:
                fh.write(json.dumps(s) + "\n")
        return str(path)

    def test_grouping_and_timestamp(self, tmp_path):
        path = self._write(tmp_path, [
            _status("7", "101", "hello", "Tue Jan 01 12:00:00 +0000 2019"),
            _status("7", "102", "again", "Tue Jan 01 13:00:00 +0000 2019"),
            _status("8", "103", "other", "Tue Jan 01 14:00:00 +0000 2019"),
        ])
        corpus = ingest_twitter_export(path)
        assert sorted(corpus.user_ids()) == ["7", "8"]
        u7 = next(u for u in corpus.users if u.user_id == "7")
        assert [p.post_id for p in u7.posts] == ["101", "102"]
        # Tue Jan 01 12:00:00 UTC 2019
        assert u7.posts[0].timestamp == 1546344000

    def test_posts_sorted_by_time(self, tmp_path):
        path = self._write(tmp_path, [
            _status("7", "2", "later", "Tue Jan 01 13:00:00 +0000 2019"),
            _status("7", "1", "earlier", "Tue Jan 01 12:00:00 +0000 2019"),
        ])
        corpus = ingest_twitter_export(path)
        assert [p.text for p in corpus.users[0].posts] == ["earlier", "later"]

    def test_full_text_preferred(self, tmp_path):
        s = _status("7", "1", "truncated...", "Tue Jan 01 12:00:00 +0000 2019",
                    full_text="the whole thing")
        corpus = ingest_twitter_export(self._write(tmp_path, [s]))
        assert corpus.users[0].posts[0].text == "the whole thing"

    def test_mentions_extracted(self, tmp_path):
        s = _status("7", "1", "hi @a", "Tue Jan 01 12:00:00 +0000 2019",
                    mentions=("55", "66"))
        corpus = ingest_twitter_export(self._write(tmp_path, [s]))
        assert list(corpus.users[0].posts[0].mentions) == ["55", "66"]

    def test_retweets_kept_by_default(self, tmp_path):
        path = self._write(tmp_path, [
            _status("7", "1", "mine", "Tue Jan 01 12:00:00 +0000 2019"),
            _status("7", "2", "RT @x: theirs", "Tue Jan 01 13:00:00 +0000 2019",
                    retweeted=True),
        ])
        assert len(ingest_twitter_export(path).users[0].posts) == 2

    def test_drop_retweets_flag(self, tmp_path):
        path = self._write(tmp_path, [
            _status("7", "1", "mine", "Tue Jan 01 12:00:00 +0000 2019"),
            _status("7", "2", "RT @x: theirs", "Tue Jan 01 13:00:00 +0000 2019",
                    retweeted=True),
            _status("7", "3", "RT @y: prefix only",
                    "Tue Jan 01 14:00:00 +0000 2019"),
        ])
        corpus = ingest_twitter_export(path, drop_retweets=True)
        assert [p.post_id for p in corpus.users[0].posts] == ["1"]

    def test_bad_created_at_cites_line(self, tmp_path):
        s = _status("7", "1", "x", "2019-01-01T12:00:00Z")
        with pytest.raises(CorpusError, match="line 1"):
            ingest_twitter_export(self._write(tmp_path, [s]))

    def test_profile_null_fields_become_empty(self, tmp_path):
        s = _status("7", "1", "x", "Tue Jan 01 12:00:00 +0000 2019")
        s["user"]["description"] = None
        s["user"]["location"] = None
        corpus = ingest_twitter_export(self._write(tmp_path, [s]))
        assert corpus.users[0].description == ""
        assert corpus.users[0].location == ""


class TestGatherAndIterate:
    """Flattened views over a corpus."""

    def test_gather_labeled_posts(self, make_post, make_user, make_corpus):
        corpus = make_corpus([
            make_user("a", posts=[
                make_post("a", text="so glad", emotion_label="joy"),
                make_post("a", text="no label"),
            ]),
            make_user("b", posts=[
                make_post("b", text="scary", emotion_label="fear"),
            ]),
        ])
        assert gather_labeled_posts(corpus) == [
            ("so glad", "joy"), ("scary", "fear"),
        ]

    def test_iter_posts_order(self, make_post, make_user, make_corpus):
        corpus = make_corpus([
            make_user("a", posts=[make_post("a"), make_post("a")]),
            make_user("b", posts=[make_post("b")]),
        ])
        assert [p.user_id for p in iter_posts(corpus)] == ["a", "a", "b"]
