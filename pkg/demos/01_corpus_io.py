"""Corpus basics: build records by hand, round-trip them through JSONL,
and ingest a raw status export."""

import json
import tempfile
from pathlib import Path

from causalmood.corpus import (
    Corpus,
    PostRecord,
    UserRecord,
    ingest_twitter_export,
    load_jsonl,
    save_jsonl,
)

corpus = Corpus(
    users=[
        UserRecord(
            user_id="u1",
            handle="morning_flow",
            description="yoga teacher and mindfulness coach",
            location="berlin",
            posts=[
                PostRecord("u1-p1", "u1", 1_546_300_800, "i did yoga at sunrise",
                           emotion_label="joy"),
                PostRecord("u1-p2", "u1", 1_546_387_200, "quiet day",
                           mentions=["u2"]),
            ],
        ),
        UserRecord(user_id="u2", handle="bystander", description="",
                   location="", posts=[
                       PostRecord("u2-p1", "u2", 1_546_300_900, "hello world"),
                   ]),
    ],
    provenance="demo 01",
)
corpus.validate()
print(f"built a corpus with {len(corpus.users)} users")

with tempfile.TemporaryDirectory() as tmp:
    path = str(Path(tmp) / "corpus.jsonl")
    save_jsonl(corpus, path)
    again = load_jsonl(path)
    again.validate()
    print(f"round trip: {again.users[0].posts[0].text!r} "
          f"(label {again.users[0].posts[0].emotion_label})")
    assert again.users == corpus.users  # provenance now records the file path
    print(f"provenance after load: {again.provenance!r}")

    # the same schema can be filled from a raw export: one status per line
    raw = Path(tmp) / "export.jsonl"
    status = {
        "id_str": "900", "text": "i stretched for an hour",
        "created_at": "Tue Jan 01 08:00:00 +0000 2019",
        "user": {"id_str": "42", "screen_name": "newcomer",
                 "description": "here for the stretches", "location": "oslo"},
        "entities": {"user_mentions": [{"id_str": "43"}]},
    }
    raw.write_text(json.dumps(status) + "\n", encoding="utf-8")
    ingested = ingest_twitter_export(str(raw))
    user = ingested.users[0]
    print(f"ingested @{user.handle}: {user.posts[0].text!r}, "
          f"mentions {user.posts[0].mentions}")
