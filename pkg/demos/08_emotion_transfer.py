"""Six-way emotion classification: an attention BiLSTM trained on labeled
text, a GRU baseline beside it, then zero-shot labels for unseen posts."""

import numpy as np

from causalmood.corpus import EMOTIONS, PostRecord
from causalmood.embed import EmbeddingTable
from causalmood.models import (
    EmotionConfig,
    GruConfig,
    train_emotion,
    train_gru_baseline,
    transfer_classify_emotion,
)

POOLS = {
    "joy": ["smile", "laugh", "grin", "cheer"],
    "love": ["adore", "darling", "heart", "dear"],
    "sadness": ["weep", "mourn", "tears", "gloom"],
    "anger": ["rage", "fury", "growl", "vex"],
    "fear": ["dread", "panic", "shiver", "fright"],
    "surprise": ["gasp", "sudden", "blink", "whoa"],
}


def make_pairs(per_class: int, seed: int) -> list[tuple[str, str]]:
    rng = np.random.default_rng(seed)
    pairs = []
    for label in EMOTIONS:
        for _ in range(per_class):
            pairs.append((" ".join(rng.choice(POOLS[label], size=3)), label))
    return [pairs[i] for i in rng.permutation(len(pairs))]


train_pairs = make_pairs(8, seed=3)
valid_pairs = make_pairs(2, seed=4)

vocab = sorted({w for pool in POOLS.values() for w in pool})
rng = np.random.default_rng(1)
table = EmbeddingTable({w: i for i, w in enumerate(vocab)},
                       rng.standard_normal((len(vocab), 8)) * 0.3, 8)

model, history = train_emotion(
    train_pairs, valid_pairs,
    EmotionConfig(lstm_unit=6, attn_dim=8, word_dim=8, epochs=15,
                  batch_size=8, patience=15, seed=0),
    table)
print(f"attention model: {len(history)} epochs, "
      f"valid acc {history[-1].valid_acc:.2f}, "
      f"macro F1 {history[-1].valid_macro_f1:.2f}")

baseline, ghistory = train_gru_baseline(
    train_pairs, valid_pairs,
    GruConfig(word_dim=8, unit=6, epochs=15, batch_size=8, patience=15, seed=0))
print(f"GRU baseline:    {len(ghistory)} epochs, "
      f"valid acc {ghistory[-1].valid_acc:.2f}")

# zero-shot transfer: the trained model labels posts it never saw
posts = [
    PostRecord("t1", "u9", 1_546_300_800, "grin and cheer and smile"),
    PostRecord("t2", "u9", 1_546_304_400, "tears and gloom again"),
    PostRecord("t3", "u9", 1_546_308_000, "sudden gasp, then a blink"),
]
print("\nzero-shot labels:")
for record in transfer_classify_emotion(posts, model):
    print(f"  {record['post_id']}: {record['label']:>9} "
          f"(p = {max(record['probs']):.2f})")
