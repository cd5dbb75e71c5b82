"""Shared fixtures: record factories and small training corpora."""

from __future__ import annotations

from typing import Optional

import pytest

from causalmood.corpus import Corpus, PostRecord, UserRecord


DAY = 86_400
T0 = 1_546_300_800  # 2019-01-01 00:00:00 UTC


@pytest.fixture
def make_post():
    counter = [0]

    def _make(
        user_id: str = "u1",
        text: str = "hello world",
        timestamp: Optional[int] = None,
        mentions: tuple[str, ...] = (),
        emotion_label: Optional[str] = None,
        pos_tags: Optional[tuple[str, ...]] = None,
    ) -> PostRecord:
        counter[0] += 1
        ts = timestamp if timestamp is not None else T0 + counter[0] * 60
        return PostRecord(
            post_id=f"{user_id}-t{counter[0]:04d}",
            user_id=user_id,
            timestamp=ts,
            text=text,
            mentions=tuple(mentions),
            pos_tags=pos_tags,
            emotion_label=emotion_label,
        )

    return _make


@pytest.fixture
def make_user(make_post):
    def _make(
        user_id: str = "u1",
        posts: Optional[list[PostRecord]] = None,
        description: str = "",
        location: str = "",
        user_type_label: Optional[int] = None,
    ) -> UserRecord:
        if posts is None:
            posts = [make_post(user_id=user_id)]
        return UserRecord(
            user_id=user_id,
            handle=f"@{user_id}",
            description=description,
            location=location,
            posts=tuple(posts),
            user_type_label=user_type_label,
        )

    return _make


@pytest.fixture
def make_corpus(make_user):
    def _make(users=None, provenance: str = "test") -> Corpus:
        if users is None:
            users = [make_user()]
        return Corpus(users=tuple(users), provenance=provenance)

    return _make
