"""Tweet tokenization, a heuristic POS tagger, and activity-post detection.

The activity detector has two rules, tried in order:

* explicit: the post contains a first-person word ("i", "my", "we're", ...)
  together with an activity keyword;
* implicit: an activity keyword is present and no token is tagged with a
  second/third-person part of speech (VBZ, NNP, NNS, NNPS, PRP, PRP$).

Posts may carry externally produced POS tags; when they do not, a small
deterministic rule/lexicon tagger stands in.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from causalmood.corpus import PostRecord

# ---------------------------------------------------------------------------
# Tokenization

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")

_EMOJI_CORE = (
    "\U0001F300-\U0001F5FF"
    "\U0001F600-\U0001F64F"
    "\U0001F680-\U0001F6FF"
    "\U0001F900-\U0001F9FF"
    "\U0001FA70-\U0001FAFF"
    "\U0001F1E6-\U0001F1FF"
    "☀-➿"
    "⬀-⯿"
)
_EMOJI_TRAIL = "\U0001F3FB-\U0001F3FF️"
# One emoji plus skin-tone/variation selectors, extended by ZWJ sequences.
_EMOJI_RE = (
    f"[{_EMOJI_CORE}][{_EMOJI_TRAIL}]*"
    f"(?:‍[{_EMOJI_CORE}][{_EMOJI_TRAIL}]*)*"
)

_TOKEN_RE = re.compile(
    f"(?:{_EMOJI_RE})"
    r"|\w+(?:'\w+)+"   # contractions: i'm, we'll, yesterday's
    r"|\w+"
    r"|[^\w\s]",       # any other symbol, one token each ('#', '!', ...)
)


def tokenize(text: str) -> list[str]:
    """Lowercase, strip URLs, and split into word/emoji/symbol tokens.

    Hashtags become a '#' token followed by the bare word. Idempotent on
    its own output joined by spaces.
    """
    text = text.replace("’", "'").lower()
    text = _URL_RE.sub(" ", text)
    return _TOKEN_RE.findall(text)


# ---------------------------------------------------------------------------
# Keyword sets

_DEFAULT_KEYWORDS = frozenset({
    "yoga", "yogi", "yogalife", "yogalove", "yogainspiration",
    "yogachallenge", "yogaeverywhere", "yogaeveryday", "yogadaily",
    "yogaeverydamnday", "yogapractice", "yogapose", "yogalover",
    "yogajourney",
})


@dataclass(frozen=True)
class KeywordSet:
    """Topic keywords; a token matches when any keyword is a substring."""

    activity_keywords: frozenset[str] = _DEFAULT_KEYWORDS
    core_keyword: str = "yoga"

    def __post_init__(self) -> None:
        if not self.activity_keywords:
            raise ValueError("activity_keywords must be non-empty")
        bad = [k for k in sorted(self.activity_keywords) if k != k.lower()]
        if bad or self.core_keyword != self.core_keyword.lower():
            raise ValueError(f"keywords must be lowercase, got {bad}")

    def matches_token(self, token: str) -> bool:
        if self.core_keyword in token:
            return True
        return any(kw in token for kw in self.activity_keywords)

    def matches_any(self, tokens: Sequence[str]) -> bool:
        return any(self.matches_token(t) for t in tokens)


FIRST_PERSON_WORDS = frozenset({
    "i", "im", "i'm", "i've", "i'd", "i'll", "my", "me", "mine", "myself",
    "we", "we're", "we'd", "we'll", "we've", "our", "ours", "us", "ourselves",
})

# Tags that mark a post as being about someone else (second/third person).
EXCLUDED_TAGS = frozenset({"VBZ", "NNP", "NNS", "NNPS", "PRP", "PRP$"})


def detect_first_person_explicit(
    tokens: Sequence[str], ks: KeywordSet = KeywordSet()
) -> bool:
    """True iff a first-person word and an activity keyword both occur."""
    if not any(t in FIRST_PERSON_WORDS for t in tokens):
        return False
    return ks.matches_any(tokens)


def detect_first_person_implicit(
    tokens: Sequence[str], tags: Sequence[str], ks: KeywordSet = KeywordSet()
) -> bool:
    """True iff an activity keyword occurs and no token carries an excluded tag.

    Meant to run only after the explicit rule failed.
    """
    if len(tokens) != len(tags):
        raise ValueError(
            f"tags length {len(tags)} does not match tokens length {len(tokens)}"
        )
    if not ks.matches_any(tokens):
        return False
    return not any(t in EXCLUDED_TAGS for t in tags)


# ---------------------------------------------------------------------------
# Heuristic POS tagger (fallback when posts carry no tags)

_LEXICON: dict[str, str] = {}
_LEXICON.update({w: "PRP" for w in (
    "i", "me", "you", "he", "she", "it", "we", "they", "him", "her", "us",
    "them", "myself", "yourself", "himself", "herself", "itself",
    "ourselves", "yourselves", "themselves", "mine", "yours", "theirs",
)})
_LEXICON.update({w: "PRP$" for w in ("my", "your", "his", "its", "our", "their")})
_LEXICON.update({w: "DT" for w in (
    "the", "a", "an", "this", "that", "these", "those", "some", "any",
    "each", "every", "no", "all", "both",
)})
_LEXICON.update({w: "IN" for w in (
    "in", "on", "at", "of", "for", "with", "from", "by", "about", "after",
    "before", "during", "under", "over", "into", "through", "between",
    "without", "as", "like", "than",
)})
_LEXICON["to"] = "TO"
_LEXICON.update({w: "CC" for w in ("and", "or", "but", "nor", "yet")})
_LEXICON.update({w: "MD" for w in (
    "can", "could", "will", "would", "shall", "should", "may", "might", "must",
)})
_LEXICON.update({
    "is": "VBZ", "does": "VBZ", "has": "VBZ", "goes": "VBZ", "says": "VBZ",
    "am": "VBP", "are": "VBP", "do": "VBP", "have": "VBP", "feel": "VBP",
    "love": "VBP", "need": "VBP", "was": "VBD", "were": "VBD", "did": "VBD",
    "had": "VBD", "went": "VBD", "be": "VB", "been": "VBN", "done": "VBN",
    "gone": "VBN", "being": "VBG",
})
_LEXICON.update({w: "RB" for w in (
    "not", "very", "too", "so", "just", "really", "never", "always", "often",
    "again", "now", "then", "here", "there", "out", "up", "down",
)})
_LEXICON.update({w: "WRB" for w in ("when", "where", "why", "how")})
_LEXICON.update({w: "WP" for w in ("who", "what", "whom")})
_LEXICON["which"] = "WDT"
_LEXICON.update({w: "UH" for w in ("oh", "wow", "hey", "yay", "omg", "ok", "okay")})
_LEXICON.update({w: "JJ" for w in (
    "good", "great", "new", "happy", "best", "free", "peaceful", "calm",
    "strong", "hot", "open", "full",
)})

# Lowercased proper nouns we still recognize as such (case is lost upstream).
_PROPER_NOUNS = frozenset({
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday",
    "sunday", "january", "february", "march", "april", "june", "july",
    "august", "september", "october", "november", "december",
    "london", "paris", "india", "america", "instagram", "twitter",
    "facebook", "youtube", "google",
})

# Common -ing nouns the VBG suffix rule must not claim.
_ING_NOUNS = frozenset({
    "morning", "evening", "thing", "something", "nothing", "anything",
    "everything", "king", "ring", "spring", "wedding", "building", "clothing",
})

_PUNCT_TAGS = {".": ".", "!": ".", "?": ".", ",": ",", ":": ":", ";": ":"}
_NUMBER_RE = re.compile(r"\d+(?:[.,]\d+)*$")


def _tag_one(token: str) -> str:
    if token in _PUNCT_TAGS:
        return _PUNCT_TAGS[token]
    if not any(c.isalnum() for c in token):
        return "SYM"
    if token in _LEXICON:
        return _LEXICON[token]
    if token in _PROPER_NOUNS:
        return "NNP"
    if token in _ING_NOUNS:
        return "NN"
    if _NUMBER_RE.fullmatch(token):
        return "CD"
    if token.endswith("ing") and len(token) > 4:
        return "VBG"
    if token.endswith("ed") and len(token) > 3:
        return "VBD"
    if token.endswith("ly") and len(token) > 3:
        return "RB"
    if token.endswith(("ful", "ous", "ive", "able", "ible")):
        return "JJ"
    if (token.endswith("s") and not token.endswith(("ss", "us", "is"))
            and len(token) > 3):
        return "NNS"
    return "NN"


def heuristic_pos_tag(tokens: Sequence[str]) -> list[str]:
    """Deterministic lexicon + suffix-rule tagger over lowercased tokens."""
    return [_tag_one(t) for t in tokens]


# ---------------------------------------------------------------------------
# Post-level classification

class ActivityMode(Enum):
    ANY_YOGA = "any"
    FIRST_HAND_ONLY = "first_hand"


@dataclass
class TokenizedPost:
    tokens: list[str]
    is_yoga: bool
    first_person_explicit: bool
    first_person_implicit: bool


@dataclass
class TaggerStats:
    """Counts how often the fallback tagger substituted for missing tags."""

    fallback_count: int = 0
    post_count: int = 0


def analyze(
    text: str,
    ks: KeywordSet = KeywordSet(),
    pos_tags: Optional[Sequence[str]] = None,
) -> TokenizedPost:
    """Tokenize and evaluate both first-hand rules (implicit only if needed)."""
    tokens = tokenize(text)
    is_yoga = ks.matches_any(tokens)
    explicit = detect_first_person_explicit(tokens, ks)
    implicit = False
    if is_yoga and not explicit:
        tags = list(pos_tags) if pos_tags is not None else heuristic_pos_tag(tokens)
        implicit = detect_first_person_implicit(tokens, tags, ks)
    return TokenizedPost(tokens, is_yoga, explicit, implicit)


def classify_activity(
    post: PostRecord,
    ks: KeywordSet = KeywordSet(),
    mode: ActivityMode = ActivityMode.FIRST_HAND_ONLY,
    stats: Optional[TaggerStats] = None,
) -> bool:
    """Is this post an activity post under the requested rule?"""
    tokens = tokenize(post.text)
    if not ks.matches_any(tokens):
        return False
    if mode is ActivityMode.ANY_YOGA:
        return True
    if detect_first_person_explicit(tokens, ks):
        return True
    if post.pos_tags is not None:
        tags: Sequence[str] = post.pos_tags
    else:
        tags = heuristic_pos_tag(tokens)
        if stats is not None:
            stats.fallback_count += 1
    if stats is not None:
        stats.post_count += 1
    return detect_first_person_implicit(tokens, tags, ks)
