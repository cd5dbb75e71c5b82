"""The whole pipeline through the command-line surface, stage by stage,
inside a temporary directory."""

import json
import tempfile
from pathlib import Path

from causalmood.cli import main

with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    config = root / "config.json"
    config.write_text(json.dumps({
        "walk": {"dim": 6, "window": 2, "negatives": 2, "epochs": 2,
                 "walks_per_node": 2, "walk_length": 8},
        "yun": {"lstm_unit": 3, "attn_dim": 4, "hidden": 5, "net_width": 3,
                "word_dim": 6, "max_tweet_tokens": 12, "epochs": 2,
                "batch_size": 4},
        "emotion": {"lstm_unit": 3, "attn_dim": 4, "word_dim": 6,
                    "epochs": 2, "batch_size": 8},
        "granger": {"lags": [1, 2, 3], "headline_lag": 3},
        "synth": {"n_users": 10, "days": 40, "seed": 7},
    }), encoding="utf-8")

    steps = [
        ["synth", str(config), str(root / "corpus.jsonl"),
         str(root / "manifest.json")],
        ["validate", str(root / "corpus.jsonl")],
        ["graph", "build", str(root / "corpus.jsonl"), str(root / "graph.json"),
         "--config", str(config)],
        ["embed", "words", str(root / "corpus.jsonl"), str(root / "words.json"),
         "--config", str(config)],
        ["train", "emotion", str(root / "corpus.jsonl"), str(config),
         str(root / "emotion.ckpt.json"), "--word-vectors",
         str(root / "words.json")],
        ["classify", "emotion", str(root / "corpus.jsonl"),
         str(root / "emotion.ckpt.json"), str(root / "emotions.jsonl")],
        ["series", "build", str(root / "corpus.jsonl"),
         str(root / "emotions.jsonl"), str(root / "series"),
         "--config", str(config)],
        ["granger", "run", str(root / "series"), str(root / "run"),
         "--config", str(config)],
        ["report", str(root / "run"), str(root / "report.json"),
         "--config", str(config)],
    ]
    for argv in steps:
        print(f"$ causalmood {' '.join(argv)}")
        code = main(argv)
        assert code == 0, f"exit {code}"
        print()

    report = json.loads((root / "report.json").read_text(encoding="utf-8"))
    print("report.json:", json.dumps(report, indent=2))
