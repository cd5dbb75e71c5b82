"""Per-user aligned (activity, happiness) time series.

For a user's timeline, ``a[t]`` counts activity posts in bin ``t`` and
``p[t]`` counts posts labeled joy or love. Bins are uniform (day/week/month),
anchored at the UTC midnight of the first post's day, and contiguous from
the first to the last post; empty bins hold zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Mapping, Optional

import numpy as np

from causalmood.corpus import UserRecord
from causalmood.textproc import ActivityMode, KeywordSet, classify_activity

DAY_SECONDS = 86_400
BIN_SECONDS = {
    "day": DAY_SECONDS,
    "week": 7 * DAY_SECONDS,
    "month": 30 * DAY_SECONDS,  # uniform 30-day bins, not calendar months
}

HAPPY_LABELS = frozenset({"joy", "love"})


@dataclass
class SeriesPair:
    user_id: str
    bin_width: int          # seconds
    start: int              # epoch seconds of the first bin's left edge
    a: np.ndarray           # activity level per bin
    p: np.ndarray           # happiness level per bin

    @property
    def n_bins(self) -> int:
        return len(self.a)

    @property
    def end(self) -> int:
        """Left edge of the last bin."""
        return self.start + (self.n_bins - 1) * self.bin_width

    def bin_dates(self) -> list[str]:
        return [
            datetime.fromtimestamp(self.start + i * self.bin_width, timezone.utc)
            .date().isoformat()
            for i in range(self.n_bins)
        ]

    def validate(self) -> None:
        if len(self.a) != len(self.p):
            raise ValueError(
                f"series length mismatch: a has {len(self.a)}, p has {len(self.p)}"
            )
        if self.n_bins < 1:
            raise ValueError("series must have at least one bin")
        if (self.a < 0).any() or (self.p < 0).any():
            raise ValueError("series values must be non-negative")


def _resolve_width(bin_width: "int | str") -> int:
    if isinstance(bin_width, str):
        try:
            return BIN_SECONDS[bin_width]
        except KeyError:
            raise ValueError(
                f"unknown bin width {bin_width!r}; expected one of "
                f"{sorted(BIN_SECONDS)}"
            ) from None
    if bin_width < 1:
        raise ValueError(f"bin width must be positive, got {bin_width}")
    return int(bin_width)


def _emotion_of(post, emotions: Optional[Mapping[str, str]]) -> Optional[str]:
    if emotions is not None and post.post_id in emotions:
        return emotions[post.post_id]
    return post.emotion_label


def _binned(
    user: UserRecord,
    emotions: Optional[Mapping[str, str]],
    bin_width: "int | str",
    count_activity,
) -> SeriesPair:
    if not user.posts:
        raise ValueError(f"user {user.user_id!r} has no posts")
    width = _resolve_width(bin_width)
    stamps = [p.timestamp for p in user.posts]
    # Anchor at UTC midnight of the earliest post's day.
    start = (min(stamps) // DAY_SECONDS) * DAY_SECONDS
    n_bins = (max(stamps) - start) // width + 1
    a = np.zeros(n_bins)
    p = np.zeros(n_bins)
    for post in user.posts:
        t = (post.timestamp - start) // width
        a[t] += count_activity(post)
        if _emotion_of(post, emotions) in HAPPY_LABELS:
            p[t] += 1
    pair = SeriesPair(user.user_id, width, int(start), a, p)
    pair.validate()
    return pair


def build_series(
    user: UserRecord,
    emotions: Optional[Mapping[str, str]] = None,
    mode: ActivityMode = ActivityMode.FIRST_HAND_ONLY,
    bin_width: "int | str" = "day",
    ks: Optional[KeywordSet] = None,
) -> SeriesPair:
    """Activity = posts passing the requested activity rule.

    ``emotions`` maps post_id -> predicted label; posts not in the map fall
    back to their stored emotion_label, if any.
    """
    ks = ks if ks is not None else KeywordSet()
    return _binned(
        user, emotions, bin_width,
        lambda post: 1.0 if classify_activity(post, ks, mode) else 0.0,
    )


def build_volume_series(
    user: UserRecord,
    emotions: Optional[Mapping[str, str]] = None,
    bin_width: "int | str" = "day",
) -> SeriesPair:
    """Control-experiment variant: activity = total posts per bin."""
    return _binned(user, emotions, bin_width, lambda post: 1.0)


def normalize_pair(pair: SeriesPair, totals: SeriesPair) -> SeriesPair:
    """Divide both series by per-bin post totals (empty bins stay zero)."""
    if totals.n_bins != pair.n_bins or totals.start != pair.start:
        raise ValueError("totals series does not align with the pair")
    denom = np.where(totals.a > 0, totals.a, 1.0)
    return SeriesPair(pair.user_id, pair.bin_width, pair.start,
                      pair.a / denom, pair.p / denom)


def write_series_csv(pair: SeriesPair, path: str) -> None:
    """Plot-ready per-user export: ``date,a,p`` with ISO-8601 bin dates."""
    dates = pair.bin_dates()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("date,a,p\n")
        for date, a, p in zip(dates, pair.a, pair.p):
            fh.write(f"{date},{_fmt(a)},{_fmt(p)}\n")


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def read_series_csv(path: str, user_id: str) -> SeriesPair:
    """Inverse of write_series_csv; single-row files assume day bins."""
    import csv

    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["date", "a", "p"]:
            raise ValueError(f"{path}: unexpected header {header}")
        for row in reader:
            if len(row) != 3:
                raise ValueError(f"{path}: malformed row {row}")
            date = datetime.fromisoformat(row[0]).replace(tzinfo=timezone.utc)
            rows.append((int(date.timestamp()), float(row[1]), float(row[2])))
    if not rows:
        raise ValueError(f"{path}: empty series")
    starts = [r[0] for r in rows]
    width = starts[1] - starts[0] if len(rows) > 1 else DAY_SECONDS
    if width < 1 or any(b - a != width for a, b in zip(starts, starts[1:])):
        raise ValueError(f"{path}: bins are not uniform")
    pair = SeriesPair(
        user_id, width, starts[0],
        np.array([r[1] for r in rows]), np.array([r[2] for r in rows]),
    )
    pair.validate()
    return pair
