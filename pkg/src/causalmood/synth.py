"""Synthetic corpus generator with planted ground truth.

Every generated fact is known by construction: user types are coded into
lexically separable description/post templates, emotion posts come from
emotion-keyed template banks, and "causal" users' daily happy-post counts
follow a Poisson rate shifted by their own lagged activity counts:

    a_t ~ Poisson(activity_rate)
    p_t ~ Poisson(emotion_rate + causal_beta * a_{t - causal_lag})   (causal)
    p_t ~ Poisson(emotion_rate)                                      (null)

The manifest records the planted type and causal link per user so
downstream recovery can be scored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from causalmood.corpus import Corpus, PostRecord, UserRecord, UserType
from causalmood.textproc import detect_first_person_explicit, tokenize

BASE_TS = 1_546_300_800  # 2019-01-01T00:00:00Z
DAY = 86_400

ACTIVITY_TEMPLATES = {
    UserType.PRACTITIONER: (
        "i did my morning yoga flow today 🧘",
        "just finished my yoga practice and i feel amazing",
        "i'm at the park doing yoga with friends",
        "my yoga session this evening was so peaceful",
        "we love our sunrise yoga routine 🙏",
        "i tried a new yogapose and i'm sore but happy about it",
    ),
    UserType.PROMOTIONAL: (
        "new yoga class schedule posted. book spots for saturday",
        "hot yoga deals all week at the studio",
        "discounts on yoga mats and classes today only",
        "the yogalife studio opens new locations this month",
        "join the yogachallenge at the downtown studio. prizes every friday",
    ),
    UserType.OTHER: (
        "she does yoga every morning before work",
        "he is doing yoga at the gym again",
        "yoga studios are opening all over town",
        "celebrities swear by yoga these days",
        "the yoga trend keeps growing this year",
    ),
}

EMOTION_TEMPLATES = {
    "joy": (
        "feeling so happy and grateful today 😄",
        "what a wonderful day with friends",
        "this made me smile so much",
        "great news today and i can't stop smiling",
    ),
    "love": (
        "i love spending time with family ❤️",
        "so much love for this community",
        "loving every minute of this beautiful evening",
        "my heart is full of love tonight",
    ),
    "sadness": (
        "feeling so sad and lonely tonight 😢",
        "i miss the old days and it makes me sad",
        "crying over this sad movie again",
        "such a sad goodbye today",
    ),
    "anger": (
        "so angry about the traffic this morning 😠",
        "this rude service made me really angry",
        "i am furious and annoyed right now",
        "angry at the broken printer again",
    ),
    "fear": (
        "i am scared of the storm tonight 😨",
        "this dark street makes me afraid",
        "terrified of the spider in the kitchen",
        "so scared before the big exam",
    ),
    "surprise": (
        "wow i did not expect that at all 😮",
        "what a surprise ending to the game",
        "totally surprised by the sudden news",
        "an unexpected gift arrived today wow",
    ),
}

HAPPY_LABELS = ("joy", "love")
OTHER_LABELS = ("sadness", "anger", "fear", "surprise")

CHATTER_TEMPLATES = (
    "watching the game tonight with neighbors",
    "coffee first then emails",
    "the bus was late again this morning",
    "reading a long book about history",
    "new phone update changed all the settings",
)

DESCRIPTION_TEMPLATES = {
    UserType.PRACTITIONER: (
        "yoga teacher and mindfulness coach",
        "living the yogalife one breath at a time",
        "daily yoga practice and meditation",
        "certified yogi and wellness lover",
    ),
    UserType.PROMOTIONAL: (
        "official studio account. class schedules and offers",
        "the best hot yoga studio in town",
        "bookings, memberships and yoga gear deals",
        "studio news, events and discounts",
    ),
    UserType.OTHER: (
        "sports fan and movie lover",
        "news junkie and coffee addict",
        "photos, travel and random thoughts",
        "just here for the memes",
    ),
}

LOCATIONS = ("london", "paris", "austin texas", "sydney", "berlin", "")


@dataclass
class SynthConfig:
    n_users: int = 30
    frac_practitioner: float = 0.6
    frac_promotional: float = 0.2
    frac_other: float = 0.2
    frac_causal: float = 0.5       # fraction of practitioners given a link
    causal_lag: int = 2
    causal_beta: float = 0.8
    days: int = 90
    activity_rate: float = 1.0     # mean activity posts per day
    emotion_rate: float = 0.5      # baseline mean happy posts per day
    negative_rate: float = 0.3     # mean non-happy emotion posts per day
    noise_rate: float = 0.3        # mean unlabeled chatter posts per day
    mention_prob: float = 0.1      # per-day chance of mentioning a same-type user
    seed: int = 0

    def validate(self) -> None:
        fracs = (self.frac_practitioner, self.frac_promotional, self.frac_other,
                 self.frac_causal)
        if any(not 0.0 <= f <= 1.0 for f in fracs):
            raise ValueError(f"fractions must lie in [0, 1], got {fracs}")
        type_sum = self.frac_practitioner + self.frac_promotional + self.frac_other
        if abs(type_sum - 1.0) > 1e-9:
            raise ValueError(f"type fractions must sum to 1, got {type_sum}")
        if self.n_users < 1:
            raise ValueError("n_users must be >= 1")
        if self.causal_lag < 1:
            raise ValueError("causal_lag must be >= 1")
        if self.days < 1:
            raise ValueError("days must be >= 1")
        for name in ("activity_rate", "emotion_rate", "negative_rate",
                     "noise_rate", "causal_beta"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0.0 <= self.mention_prob <= 1.0:
            raise ValueError("mention_prob must lie in [0, 1]")


def _type_counts(cfg: SynthConfig) -> tuple[int, int, int]:
    n_prac = round(cfg.n_users * cfg.frac_practitioner)
    n_promo = round(cfg.n_users * cfg.frac_promotional)
    n_other = cfg.n_users - n_prac - n_promo
    if min(n_prac, n_promo, n_other) < 0:
        raise ValueError(
            f"infeasible type fractions for n_users={cfg.n_users}: "
            f"{n_prac}/{n_promo}/{n_other}"
        )
    return n_prac, n_promo, n_other


def _pick(rng: np.random.Generator, options) -> str:
    return options[rng.integers(len(options))]


def generate(cfg: SynthConfig) -> tuple[Corpus, dict]:
    """Build (corpus, manifest); identical seeds give byte-identical output."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n_prac, n_promo, n_other = _type_counts(cfg)
    types = ([UserType.PRACTITIONER] * n_prac + [UserType.PROMOTIONAL] * n_promo
             + [UserType.OTHER] * n_other)
    n_causal = round(n_prac * cfg.frac_causal)

    user_ids = [f"u{i:04d}" for i in range(cfg.n_users)]
    same_type: dict[UserType, list[str]] = {t: [] for t in UserType}
    for uid, t in zip(user_ids, types):
        same_type[t].append(uid)

    users: list[UserRecord] = []
    manifest: dict[str, dict] = {}
    for i, (uid, utype) in enumerate(zip(user_ids, types)):
        causal = utype is UserType.PRACTITIONER and i < n_causal
        activity = rng.poisson(cfg.activity_rate, size=cfg.days)
        happy_rate = np.full(cfg.days, cfg.emotion_rate)
        if causal:
            happy_rate[cfg.causal_lag:] += (
                cfg.causal_beta * activity[:cfg.days - cfg.causal_lag]
            )
        happy = rng.poisson(happy_rate)
        negative = rng.poisson(cfg.negative_rate, size=cfg.days)
        chatter = rng.poisson(cfg.noise_rate, size=cfg.days)

        posts: list[PostRecord] = []
        counter = 0

        def add_post(day: int, text: str, label: Optional[str]) -> PostRecord:
            nonlocal counter
            post = PostRecord(
                post_id=f"{uid}-p{counter:05d}",
                user_id=uid,
                timestamp=int(BASE_TS + day * DAY + rng.integers(DAY)),
                text=text,
                emotion_label=label,
            )
            counter += 1
            posts.append(post)
            return post

        peers = [p for p in same_type[utype] if p != uid]
        for day in range(cfg.days):
            day_activity: list[PostRecord] = []
            for _ in range(int(activity[day])):
                text = _pick(rng, ACTIVITY_TEMPLATES[utype])
                day_activity.append(add_post(day, text, None))
            for _ in range(int(happy[day])):
                label = _pick(rng, HAPPY_LABELS)
                add_post(day, _pick(rng, EMOTION_TEMPLATES[label]), label)
            for _ in range(int(negative[day])):
                label = _pick(rng, OTHER_LABELS)
                add_post(day, _pick(rng, EMOTION_TEMPLATES[label]), label)
            for _ in range(int(chatter[day])):
                add_post(day, _pick(rng, CHATTER_TEMPLATES), None)
            if day_activity and peers and rng.random() < cfg.mention_prob:
                target = _pick(rng, peers)
                day_activity[0].mentions.append(target)

        posts.sort(key=lambda p: (p.timestamp, p.post_id))
        users.append(UserRecord(
            user_id=uid,
            handle=f"user{i}",
            description=_pick(rng, DESCRIPTION_TEMPLATES[utype]),
            location=_pick(rng, LOCATIONS),
            posts=posts,
            user_type_label=int(utype),
        ))
        manifest[uid] = {
            "type": int(utype),
            "causal": bool(causal),
            "lag": cfg.causal_lag if causal else None,
            "beta": cfg.causal_beta if causal else None,
        }

    corpus = Corpus(users=users, provenance=f"synth(seed={cfg.seed})")
    corpus.validate()
    _check_planted_signal(corpus, manifest)
    return corpus, manifest


def _check_planted_signal(corpus: Corpus, manifest: dict) -> None:
    """Generated practitioners' activity posts must trip the explicit rule."""
    for user in corpus.users:
        if manifest[user.user_id]["type"] != int(UserType.PRACTITIONER):
            continue
        for post in user.posts:
            tokens = tokenize(post.text)
            if post.emotion_label is None and any("yoga" in t or "yogi" in t
                                                  for t in tokens):
                if not detect_first_person_explicit(tokens):
                    raise AssertionError(
                        f"practitioner template lost its first-person marker: "
                        f"{post.text!r}"
                    )


def save_manifest(manifest: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def load_manifest(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
