"""Does posting about an activity precede posting happily?

A batch pipeline from raw per-user timelines to per-user Granger verdicts:

- ``corpus``: JSONL corpus schema, ingestion, validation, splitting
- ``textproc``: tweet tokenizer, activity keywords, first-hand detection
- ``graph`` / ``embed``: mention network, random-walk node and token vectors
- ``neural``: minimal reverse-mode autodiff with LSTM/GRU/attention layers
- ``models``: joint user-type model, emotion classifiers, checkpoints
- ``series``: per-user (activity, happiness) binned time series
- ``granger``: bivariate lag regressions, F and LM tests, summaries
- ``synth``: synthetic corpora with planted causal structure
- ``cli``: the ``causalmood`` command-line surface
"""

from causalmood.corpus import (
    Corpus,
    CorpusError,
    EMOTIONS,
    PostRecord,
    SplitSpec,
    UserRecord,
    UserType,
    load_jsonl,
    save_jsonl,
    split,
)
from causalmood.granger import (
    GrangerResult,
    GrangerSummary,
    Verdict,
    batch_test,
    granger_test,
    summarize,
)
from causalmood.series import SeriesPair, build_series, build_volume_series
from causalmood.textproc import ActivityMode, KeywordSet, tokenize

__version__ = "0.1.0"

__all__ = [
    "ActivityMode",
    "Corpus",
    "CorpusError",
    "EMOTIONS",
    "GrangerResult",
    "GrangerSummary",
    "KeywordSet",
    "PostRecord",
    "SeriesPair",
    "SplitSpec",
    "UserRecord",
    "UserType",
    "Verdict",
    "batch_test",
    "build_series",
    "build_volume_series",
    "granger_test",
    "load_jsonl",
    "save_jsonl",
    "split",
    "summarize",
    "tokenize",
    "__version__",
]
