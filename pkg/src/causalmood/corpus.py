"""User/post data model, JSONL ingestion, validation, and dataset splitting.

A corpus is a list of users; each user owns a timeline of posts. One user per
JSONL line:

    {"user_id": str, "handle": str, "description": str, "location": str,
     "user_type_label": 0|1|2|null,
     "posts": [{"post_id": str, "timestamp": int, "text": str,
                "mentions": [str], "pos_tags": [str]|null,
                "emotion_label": str|null}]}

Timestamps are UTC epoch seconds. Unknown JSON fields are ignored on load,
so side-channel metadata survives a foreign producer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from enum import IntEnum
from typing import Iterable, Optional

import numpy as np

EMOTIONS = ("joy", "love", "sadness", "anger", "fear", "surprise")


class UserType(IntEnum):
    PRACTITIONER = 0
    PROMOTIONAL = 1
    OTHER = 2


class CorpusError(ValueError):
    """Raised when an input file violates the corpus schema or invariants."""


@dataclass
class PostRecord:
    post_id: str
    user_id: str
    timestamp: int
    text: str
    mentions: list[str] = field(default_factory=list)
    pos_tags: Optional[list[str]] = None
    emotion_label: Optional[str] = None

    def validate(self) -> None:
        if not isinstance(self.timestamp, int) or self.timestamp <= 0:
            raise CorpusError(
                f"post {self.post_id!r}: field 'timestamp' must be a positive "
                f"integer, got {self.timestamp!r}"
            )
        if not self.text.strip():
            raise CorpusError(f"post {self.post_id!r}: field 'text' is empty")
        if self.emotion_label is not None and self.emotion_label not in EMOTIONS:
            raise CorpusError(
                f"post {self.post_id!r}: field 'emotion_label' must be one of "
                f"{EMOTIONS}, got {self.emotion_label!r}"
            )
        if self.pos_tags is not None:
            # Alignment with the pipeline tokenizer; lazy import avoids a cycle.
            from causalmood.textproc import tokenize

            n_tokens = len(tokenize(self.text))
            if len(self.pos_tags) != n_tokens:
                raise CorpusError(
                    f"post {self.post_id!r}: field 'pos_tags' has "
                    f"{len(self.pos_tags)} tags for {n_tokens} tokens"
                )


@dataclass
class UserRecord:
    user_id: str
    handle: str = ""
    description: str = ""
    location: str = ""
    posts: list[PostRecord] = field(default_factory=list)
    user_type_label: Optional[int] = None

    def validate(self) -> None:
        if not self.user_id:
            raise CorpusError("field 'user_id' is empty")
        if self.user_type_label is not None and self.user_type_label not in (0, 1, 2):
            raise CorpusError(
                f"user {self.user_id!r}: field 'user_type_label' must be "
                f"0, 1, 2 or null, got {self.user_type_label!r}"
            )
        for post in self.posts:
            if post.user_id != self.user_id:
                raise CorpusError(
                    f"post {post.post_id!r}: field 'user_id' is "
                    f"{post.user_id!r} but the owning user is {self.user_id!r}"
                )
            post.validate()


@dataclass
class Corpus:
    users: list[UserRecord] = field(default_factory=list)
    provenance: str = ""

    def validate(self) -> None:
        seen: set[str] = set()
        for user in self.users:
            if user.user_id in seen:
                raise CorpusError(f"duplicate user_id {user.user_id!r}")
            seen.add(user.user_id)
            user.validate()

    def user_ids(self) -> list[str]:
        return [u.user_id for u in self.users]

    def __len__(self) -> int:
        return len(self.users)


@dataclass
class SplitSpec:
    train_frac: float = 0.6
    valid_frac: float = 0.2
    test_frac: float = 0.2
    seed: int = 0

    def validate(self) -> None:
        fracs = (self.train_frac, self.valid_frac, self.test_frac)
        if any(f <= 0 for f in fracs):
            raise ValueError(f"split fractions must be positive, got {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise ValueError(f"split fractions must sum to 1, got {fracs}")


def _post_from_json(obj: dict, user_id: str) -> PostRecord:
    try:
        return PostRecord(
            post_id=str(obj["post_id"]),
            user_id=user_id,
            timestamp=obj["timestamp"],
            text=obj["text"],
            mentions=[str(m) for m in obj.get("mentions", [])],
            pos_tags=(None if obj.get("pos_tags") is None
                      else [str(t) for t in obj["pos_tags"]]),
            emotion_label=obj.get("emotion_label"),
        )
    except KeyError as exc:
        raise CorpusError(f"post object missing field {exc.args[0]!r}") from None


def _user_from_json(obj: dict) -> UserRecord:
    try:
        user_id = str(obj["user_id"])
        posts = [_post_from_json(p, user_id) for p in obj.get("posts", [])]
        return UserRecord(
            user_id=user_id,
            handle=str(obj.get("handle", "")),
            description=str(obj.get("description", "")),
            location=str(obj.get("location", "")),
            posts=posts,
            user_type_label=obj.get("user_type_label"),
        )
    except KeyError as exc:
        raise CorpusError(f"user object missing field {exc.args[0]!r}") from None


def load_jsonl(path: str) -> Corpus:
    """Load and validate a corpus from a JSONL file (one user per line).

    Raises CorpusError with a line number on malformed JSON, duplicate
    user ids, or schema violations. Order of users and posts is preserved.
    """
    users: list[UserRecord] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: malformed JSON ({exc.msg})") from None
            try:
                user = _user_from_json(obj)
                user.validate()
            except CorpusError as exc:
                raise CorpusError(f"line {lineno}: {exc}") from None
            if user.user_id in seen:
                raise CorpusError(
                    f"line {lineno}: duplicate user_id {user.user_id!r} "
                    f"(first seen on line {seen[user.user_id]})"
                )
            seen[user.user_id] = lineno
            users.append(user)
    return Corpus(users=users, provenance=str(path))


def _post_to_json(post: PostRecord) -> dict:
    return {
        "post_id": post.post_id,
        "timestamp": post.timestamp,
        "text": post.text,
        "mentions": post.mentions,
        "pos_tags": post.pos_tags,
        "emotion_label": post.emotion_label,
    }


def save_jsonl(corpus: Corpus, path: str) -> None:
    """Write a corpus as JSONL; ``load_jsonl(save_jsonl(c)) == c`` field-wise."""
    with open(path, "w", encoding="utf-8") as fh:
        for user in corpus.users:
            obj = {
                "user_id": user.user_id,
                "handle": user.handle,
                "description": user.description,
                "location": user.location,
                "user_type_label": user.user_type_label,
                "posts": [_post_to_json(p) for p in user.posts],
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def split(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus, Corpus]:
    """Shuffle users with the spec seed and partition into train/valid/test.

    Valid/test sizes are floor-rounded; the remainder goes to train. The
    result is a pure function of (corpus order, spec).
    """
    spec.validate()
    if not corpus.users:
        raise ValueError("cannot split an empty corpus")
    n = len(corpus.users)
    order = np.random.default_rng(spec.seed).permutation(n)
    n_valid = int(n * spec.valid_frac)
    n_test = int(n * spec.test_frac)
    n_train = n - n_valid - n_test
    shuffled = [corpus.users[i] for i in order]
    parts = (
        shuffled[:n_train],
        shuffled[n_train:n_train + n_valid],
        shuffled[n_train + n_valid:],
    )
    prov = corpus.provenance
    return tuple(
        Corpus(users=list(p), provenance=f"{prov} [{name}]")
        for p, name in zip(parts, ("train", "valid", "test"))
    )  # type: ignore[return-value]


_TWITTER_TIME_FORMAT = "%a %b %d %H:%M:%S %z %Y"


def ingest_twitter_export(path: str, drop_retweets: bool = False) -> Corpus:
    """Adapt a Twitter v1.1 status export (JSONL, one status per line).

    Maps ``full_text``/``text``, ``entities.user_mentions`` and the RFC-2822
    style ``created_at`` onto the corpus schema, grouping statuses by author.
    Retweets (``retweeted_status`` present or text starting "RT @") are
    dropped when ``drop_retweets`` is set.
    """
    users: dict[str, UserRecord] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: malformed JSON ({exc.msg})") from None
            try:
                text = obj.get("full_text") or obj["text"]
                if drop_retweets and (
                    "retweeted_status" in obj or text.startswith("RT @")
                ):
                    continue
                created = datetime.strptime(obj["created_at"], _TWITTER_TIME_FORMAT)
                author = obj["user"]
                uid = str(author["id_str"])
            except (KeyError, ValueError) as exc:
                raise CorpusError(f"line {lineno}: bad status object ({exc})") from None
            if uid not in users:
                users[uid] = UserRecord(
                    user_id=uid,
                    handle=str(author.get("screen_name", "")),
                    description=str(author.get("description") or ""),
                    location=str(author.get("location") or ""),
                )
            mentions = [
                str(m["id_str"])
                for m in obj.get("entities", {}).get("user_mentions", [])
                if "id_str" in m
            ]
            users[uid].posts.append(
                PostRecord(
                    post_id=str(obj.get("id_str", f"line{lineno}")),
                    user_id=uid,
                    timestamp=int(created.timestamp()),
                    text=text,
                    mentions=mentions,
                )
            )
    corpus = Corpus(users=list(users.values()), provenance=f"twitter-export:{path}")
    for user in corpus.users:
        user.posts.sort(key=lambda p: (p.timestamp, p.post_id))
    corpus.validate()
    return corpus


def gather_labeled_posts(corpus: Corpus) -> list[tuple[str, str]]:
    """All (text, emotion_label) pairs with a label, in corpus order."""
    pairs = []
    for user in corpus.users:
        for post in user.posts:
            if post.emotion_label is not None:
                pairs.append((post.text, post.emotion_label))
    return pairs


def iter_posts(corpus: Corpus) -> Iterable[PostRecord]:
    for user in corpus.users:
        yield from user.posts
