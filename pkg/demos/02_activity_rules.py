"""How a post becomes an "activity post": keyword matching plus two
first-hand rules, with a heuristic tagger backstopping the second."""

from causalmood.textproc import (
    KeywordSet,
    analyze,
    heuristic_pos_tag,
    tokenize,
)

SAMPLES = [
    "i did yoga at sunrise #blessed",
    "did yoga before breakfast",
    "she does yoga every single day",
    "great yoga mats, 20% off this week!",
    "check out https://example.com/yoga and RT",
    "no keywords here, just a tuesday",
]

ks = KeywordSet()
print(f"core keyword: {ks.core_keyword!r}; "
      f"{len(ks.activity_keywords)} activity keywords\n")

for text in SAMPLES:
    result = analyze(text, ks)
    verdict = (
        "first-hand (explicit)" if result.first_person_explicit
        else "first-hand (implicit)" if result.first_person_implicit
        else "on topic, not first-hand" if result.is_yoga
        else "off topic"
    )
    print(f"{text!r}\n  tokens: {result.tokens}\n  -> {verdict}\n")

# The implicit rule needs part-of-speech tags; when a post carries none,
# a small lexicon+suffix tagger fills in.
tokens = tokenize("she does yoga every single day")
print("fallback tags:", list(zip(tokens, heuristic_pos_tag(tokens))))
