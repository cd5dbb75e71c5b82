"""Pipeline configuration: one JSON file mirroring every module's settings.

Unknown keys are rejected at every level so typos fail loudly instead of
silently falling back to defaults. An absent file or section means
defaults.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Optional

from causalmood.corpus import SplitSpec
from causalmood.embed import WalkConfig
from causalmood.models import EmotionConfig, GruConfig, YunConfig
from causalmood.synth import SynthConfig
from causalmood.textproc import ActivityMode, KeywordSet


class ConfigError(ValueError):
    """Raised on malformed or unknown configuration input."""


ACTIVITY_MODES = {
    "any": ActivityMode.ANY_YOGA,
    "firsthand": ActivityMode.FIRST_HAND_ONLY,
}


def activity_mode(name: str) -> ActivityMode:
    try:
        return ACTIVITY_MODES[name]
    except KeyError:
        raise ConfigError(
            f"unknown activity mode {name!r}; expected one of "
            f"{sorted(ACTIVITY_MODES)}"
        ) from None


@dataclass
class SeriesSettings:
    bin: str = "day"
    mode: str = "firsthand"
    normalize: bool = False

    def validate(self) -> None:
        if self.bin not in ("day", "week", "month"):
            raise ConfigError(f"series.bin must be day/week/month, got {self.bin!r}")
        activity_mode(self.mode)


@dataclass
class GrangerSettings:
    lags: tuple[int, ...] = (1, 2, 3, 4, 5)
    alpha_level: float = 0.05
    headline_lag: int = 5
    statistic: str = "f"
    bonferroni: bool = False
    top_fraction: float = 0.1

    def validate(self) -> None:
        if not self.lags or any(lag < 1 for lag in self.lags):
            raise ConfigError(f"granger.lags must be positive, got {self.lags}")
        if not 0.0 < self.alpha_level < 1.0:
            raise ConfigError(
                f"granger.alpha_level must be in (0, 1), got {self.alpha_level}"
            )
        if self.headline_lag not in self.lags:
            raise ConfigError(
                f"granger.headline_lag {self.headline_lag} not among lags {self.lags}"
            )
        if self.statistic not in ("f", "lm"):
            raise ConfigError(f"granger.statistic must be 'f' or 'lm'")
        if not 0.0 < self.top_fraction <= 1.0:
            raise ConfigError(
                f"granger.top_fraction must be in (0, 1], got {self.top_fraction}"
            )


@dataclass
class GraphSettings:
    restrict_to_activity_posts: bool = True


@dataclass
class PathSettings:
    """Optional default artifact locations commands fall back to."""

    word_vectors: Optional[str] = None
    node_vectors: Optional[str] = None


@dataclass
class PipelineConfig:
    keywords: KeywordSet = field(default_factory=KeywordSet)
    walk: WalkConfig = field(default_factory=WalkConfig)
    yun: YunConfig = field(default_factory=YunConfig)
    emotion: EmotionConfig = field(default_factory=EmotionConfig)
    gru: GruConfig = field(default_factory=GruConfig)
    series: SeriesSettings = field(default_factory=SeriesSettings)
    granger: GrangerSettings = field(default_factory=GrangerSettings)
    graph: GraphSettings = field(default_factory=GraphSettings)
    split: SplitSpec = field(default_factory=SplitSpec)
    synth: SynthConfig = field(default_factory=SynthConfig)
    paths: PathSettings = field(default_factory=PathSettings)

    def validate(self) -> None:
        self.walk.validate()
        self.yun.validate()
        self.emotion.validate()
        self.gru.validate()
        self.series.validate()
        self.granger.validate()
        self.split.validate()
        self.synth.validate()


def _from_dict(cls, obj: dict, context: str):
    if not isinstance(obj, dict):
        raise ConfigError(f"{context}: expected an object, got {type(obj).__name__}")
    names = {f.name for f in dataclasses.fields(cls) if f.init}
    unknown = sorted(set(obj) - names)
    if unknown:
        raise ConfigError(f"{context}: unknown keys {unknown}")
    try:
        return cls(**obj)
    except TypeError as exc:
        raise ConfigError(f"{context}: {exc}") from None


def _keywords_from(obj: dict) -> KeywordSet:
    if not isinstance(obj, dict):
        raise ConfigError("keywords: expected an object")
    unknown = sorted(set(obj) - {"activity_keywords", "core_keyword"})
    if unknown:
        raise ConfigError(f"keywords: unknown keys {unknown}")
    kwargs = {}
    if "activity_keywords" in obj:
        kwargs["activity_keywords"] = frozenset(
            str(k) for k in obj["activity_keywords"]
        )
    if "core_keyword" in obj:
        kwargs["core_keyword"] = str(obj["core_keyword"])
    try:
        return KeywordSet(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"keywords: {exc}") from None


_SECTIONS = {
    "walk": WalkConfig,
    "yun": YunConfig,
    "emotion": EmotionConfig,
    "gru": GruConfig,
    "series": SeriesSettings,
    "granger": GrangerSettings,
    "graph": GraphSettings,
    "split": SplitSpec,
    "synth": SynthConfig,
    "paths": PathSettings,
}


def config_from_dict(obj: dict) -> PipelineConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = sorted(set(obj) - set(_SECTIONS) - {"keywords"})
    if unknown:
        raise ConfigError(f"config: unknown sections {unknown}")
    kwargs: dict = {}
    if "keywords" in obj:
        kwargs["keywords"] = _keywords_from(obj["keywords"])
    for name, cls in _SECTIONS.items():
        if name in obj:
            section = dict(obj[name]) if isinstance(obj[name], dict) else obj[name]
            if name == "granger" and isinstance(section, dict) and "lags" in section:
                section["lags"] = tuple(int(x) for x in section["lags"])
            kwargs[name] = _from_dict(cls, section, name)
    cfg = PipelineConfig(**kwargs)
    try:
        cfg.validate()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path: Optional[str] = None) -> PipelineConfig:
    """Read a config file; ``None`` or "-" gives all defaults."""
    if path is None or path == "-":
        cfg = PipelineConfig()
        cfg.validate()
        return cfg
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: malformed JSON ({exc.msg})") from None
    return config_from_dict(obj)
