"""Biased random walks and skip-gram/negative-sampling embedding training.

One trainer serves two uses: node embeddings (walk the mention graph, treat
walks as sentences) and token embeddings (treat tokenized posts as
sentences). Looking up a key absent from the table yields the zero vector,
which downstream models use for users with no network presence.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from causalmood.graph import MentionGraph


@dataclass
class WalkConfig:
    walks_per_node: int = 10
    walk_length: int = 80
    window: int = 10
    dim: int = 32          # published setting is 300; small default keeps tests fast
    min_count: int = 1
    p: float = 1.0
    q: float = 1.0
    negatives: int = 5
    epochs: int = 5
    lr: float = 0.025
    seed: int = 0

    def validate(self) -> None:
        counts = {
            "walks_per_node": self.walks_per_node,
            "walk_length": self.walk_length,
            "window": self.window,
            "dim": self.dim,
            "min_count": self.min_count,
            "epochs": self.epochs,
        }
        for name, value in counts.items():
            if value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")
        if self.p <= 0 or self.q <= 0:
            raise ValueError(f"p and q must be > 0, got p={self.p}, q={self.q}")
        if self.negatives < 0:
            raise ValueError(f"negatives must be >= 0, got {self.negatives}")
        if self.lr <= 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")


@dataclass
class EmbeddingTable:
    key_index: dict[str, int]
    matrix: np.ndarray  # (n_keys, dim) float64
    dim: int

    def lookup(self, key: str) -> np.ndarray:
        row = self.key_index.get(key)
        if row is None:
            return np.zeros(self.dim)
        return self.matrix[row]

    def __contains__(self, key: str) -> bool:
        return key in self.key_index

    def __len__(self) -> int:
        return len(self.key_index)


def save_embeddings(table: EmbeddingTable, path: str) -> None:
    """Text vector format: header ``count dim``, then ``key v1 v2 ...`` lines."""
    for key in table.key_index:
        if any(c.isspace() for c in key) or not key:
            raise ValueError(f"key {key!r} is empty or contains whitespace")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table.key_index)} {table.dim}\n")
        for key, row in table.key_index.items():
            vec = " ".join(repr(float(x)) for x in table.matrix[row])
            fh.write(f"{key} {vec}\n")


def load_embeddings(path: str) -> EmbeddingTable:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: bad header {header!r}, expected 'count dim'")
        count, dim = int(header[0]), int(header[1])
        key_index: dict[str, int] = {}
        rows = np.zeros((count, dim))
        for i in range(count):
            parts = fh.readline().split()
            if len(parts) != dim + 1:
                raise ValueError(
                    f"{path}: line {i + 2} has {len(parts) - 1} values, expected {dim}"
                )
            key = parts[0]
            if key in key_index:
                raise ValueError(f"{path}: duplicate key {key!r}")
            key_index[key] = i
            rows[i] = [float(x) for x in parts[1:]]
    if not np.isfinite(rows).all():
        raise ValueError(f"{path}: non-finite embedding values")
    return EmbeddingTable(key_index, rows, dim)


# ---------------------------------------------------------------------------
# Walks

def _walk_from(graph: MentionGraph, start: int, cfg: WalkConfig,
               rng: np.random.Generator) -> list[int]:
    walk = [start]
    nbrs = graph.neighbors(start)
    if len(nbrs) == 0:
        return walk
    walk.append(int(nbrs[rng.integers(len(nbrs))]))
    while len(walk) < cfg.walk_length:
        prev, cur = walk[-2], walk[-1]
        nbrs = graph.neighbors(cur)
        if len(nbrs) == 0:
            break
        # Second-order bias: return 1/p, stay at distance 1 for weight 1,
        # move outward for 1/q.
        weights = np.empty(len(nbrs))
        for i, x in enumerate(nbrs):
            xi = int(x)
            if xi == prev:
                weights[i] = 1.0 / cfg.p
            elif graph.has_edge(xi, prev):
                weights[i] = 1.0
            else:
                weights[i] = 1.0 / cfg.q
        weights /= weights.sum()
        walk.append(int(nbrs[rng.choice(len(nbrs), p=weights)]))
    return walk


def generate_walks(graph: MentionGraph, cfg: WalkConfig) -> list[list[int]]:
    """walks_per_node biased walks from every node; per-walk seeded RNG."""
    cfg.validate()
    if graph.n_nodes == 0:
        raise ValueError("graph has no nodes")
    walks = []
    for node in range(graph.n_nodes):
        for k in range(cfg.walks_per_node):
            rng = np.random.default_rng(
                np.random.SeedSequence([cfg.seed, node, k])
            )
            walks.append(_walk_from(graph, node, cfg, rng))
    return walks


# ---------------------------------------------------------------------------
# Skip-gram with negative sampling

_BATCH = 512  # pairs per accumulated update


def _apply_row_mean(weights: np.ndarray, rows: np.ndarray,
                    grads: np.ndarray, lr: float) -> None:
    """Per-row mean step: a key repeated within a block moves once, not
    once per occurrence, which keeps tiny vocabularies from diverging."""
    uniq, inverse = np.unique(rows, return_inverse=True)
    acc = np.zeros((len(uniq), grads.shape[1]))
    np.add.at(acc, inverse, grads)
    mult = np.bincount(inverse, minlength=len(uniq))
    weights[uniq] -= lr * acc / mult[:, None]


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _window_pairs(indexed: list[list[int]],
                  window: int) -> tuple[np.ndarray, np.ndarray]:
    centers: list[int] = []
    contexts: list[int] = []
    for seq in indexed:
        length = len(seq)
        for pos in range(length):
            lo = max(0, pos - window)
            hi = min(length, pos + window + 1)
            for ctx_pos in range(lo, hi):
                if ctx_pos != pos:
                    centers.append(seq[pos])
                    contexts.append(seq[ctx_pos])
    return (np.asarray(centers, dtype=np.int64),
            np.asarray(contexts, dtype=np.int64))


def train_skipgram(
    sequences: Sequence[Sequence[str]],
    cfg: WalkConfig,
    loss_history: Optional[list[float]] = None,
) -> EmbeddingTable:
    """Train embeddings over string sequences.

    Pairs are (center, context) within a fixed symmetric window. Each pair
    contributes one positive term and ``cfg.negatives`` sampled negatives
    from the unigram^0.75 distribution; gradients accumulate over fixed-size
    blocks of pairs and are applied as a per-row mean. Keys rarer than
    min_count are dropped; keys that never enter a pair (e.g. isolated
    nodes whose walks have length 1) are omitted from the final table so
    lookups return zeros.
    """
    cfg.validate()
    if not sequences:
        raise ValueError("no input sequences")
    counts = Counter(k for seq in sequences for k in seq)
    vocab = sorted(
        (k for k, c in counts.items() if c >= cfg.min_count),
        key=lambda k: (-counts[k], k),
    )
    if len(vocab) < 2:
        raise ValueError(
            f"vocabulary has {len(vocab)} keys after min_count={cfg.min_count}; "
            "need at least 2"
        )
    index = {k: i for i, k in enumerate(vocab)}
    n, dim = len(vocab), cfg.dim

    rng = np.random.default_rng(cfg.seed)
    w_in = (rng.random((n, dim)) - 0.5) / dim
    w_out = np.zeros((n, dim))

    neg_weights = np.array([counts[k] for k in vocab], dtype=float) ** 0.75
    neg_cdf = np.cumsum(neg_weights / neg_weights.sum())

    indexed = [
        [index[k] for k in seq if k in index]
        for seq in sequences
    ]
    centers, contexts = _window_pairs(indexed, cfg.window)
    n_pairs = len(centers)
    if n_pairs == 0:
        raise ValueError("no training pairs (all sequences shorter than 2)")
    trained = np.zeros(n, dtype=bool)
    trained[centers] = True
    trained[contexts] = True

    lr = cfg.lr
    for _ in range(cfg.epochs):
        total_loss = 0.0
        if cfg.negatives:
            draws = rng.random((n_pairs, cfg.negatives))
            negatives = np.minimum(
                np.searchsorted(neg_cdf, draws, side="right"), n - 1
            )
        else:
            negatives = np.zeros((n_pairs, 0), dtype=np.int64)
        for lo in range(0, n_pairs, _BATCH):
            c = centers[lo:lo + _BATCH]
            ctx = contexts[lo:lo + _BATCH]
            idx = np.concatenate((ctx[:, None], negatives[lo:lo + _BATCH]),
                                 axis=1)                       # (B, 1+K)
            # A negative that collides with its pair's positive is skipped.
            dup = np.zeros(idx.shape, dtype=bool)
            dup[:, 1:] = idx[:, 1:] == ctx[:, None]
            vin = w_in[c]                                      # (B, d)
            out = w_out[idx]                                   # (B, 1+K, d)
            sig = _sigmoid(np.einsum("bkd,bd->bk", out, vin))
            total_loss -= np.log(np.maximum(sig[:, 0], 1e-12)).sum()
            neg_loss = np.log(np.maximum(1.0 - sig[:, 1:], 1e-12))
            total_loss -= neg_loss[~dup[:, 1:]].sum()
            sig[:, 0] -= 1.0  # now the gradient of the loss wrt each score
            sig[dup] = 0.0
            grad_out = (sig[:, :, None] * vin[:, None, :]).reshape(-1, dim)
            _apply_row_mean(w_out, idx.reshape(-1), grad_out, lr)
            grad_in = np.einsum("bk,bkd->bd", sig, out)
            _apply_row_mean(w_in, c, grad_in, lr)
        if not np.isfinite(w_in).all() or not np.isfinite(w_out).all():
            raise FloatingPointError("embedding matrix became non-finite")
        if loss_history is not None:
            loss_history.append(total_loss / n_pairs)

    kept = [k for k in vocab if trained[index[k]]]
    key_index = {k: i for i, k in enumerate(kept)}
    matrix = np.stack([w_in[index[k]] for k in kept]) if kept else np.zeros((0, dim))
    return EmbeddingTable(key_index, matrix, dim)


def embed_nodes(
    graph: MentionGraph, cfg: WalkConfig,
    loss_history: Optional[list[float]] = None,
) -> EmbeddingTable:
    """Walks + skip-gram; keys are user-id strings."""
    walks = generate_walks(graph, cfg)
    sequences = [[graph.node_ids[i] for i in walk] for walk in walks]
    return train_skipgram(sequences, cfg, loss_history)
