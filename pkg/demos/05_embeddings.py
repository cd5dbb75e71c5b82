"""Node and word vectors from the same machinery: biased random walks
feed a from-scratch skip-gram with negative sampling."""

import numpy as np

from causalmood.corpus import Corpus, PostRecord, UserRecord
from causalmood.embed import WalkConfig, embed_nodes, generate_walks, train_skipgram
from causalmood.graph import build_mention_graph

T0 = 1_546_300_800


def clique_user(uid: str, peers: list[str]) -> UserRecord:
    posts = [
        PostRecord(f"{uid}-p{i}", uid, T0 + i * 3600,
                   "i did yoga with a friend", mentions=[peer])
        for i, peer in enumerate(peers)
    ]
    return UserRecord(user_id=uid, handle=uid, description="", location="",
                      posts=posts)


# two tight friend groups joined by a single bridge edge
aa = [f"a{i}" for i in range(5)]
bb = [f"b{i}" for i in range(5)]
users = [clique_user(u, [x for x in aa if x != u] + (["b0"] if u == "a0" else []))
         for u in aa]
users += [clique_user(u, [x for x in bb if x != u]) for u in bb]
graph = build_mention_graph(Corpus(users=users, provenance="demo 05"))

cfg = WalkConfig(dim=8, walks_per_node=10, walk_length=20, window=3,
                 negatives=3, epochs=5, lr=0.05, seed=0)
walks = generate_walks(graph, cfg)
print(f"{len(walks)} walks of length {cfg.walk_length} over "
      f"{graph.n_nodes} nodes; first walk: "
      f"{[graph.node_ids[i] for i in walks[0][:8]]}...")

losses: list[float] = []
table = embed_nodes(graph, cfg, losses)
print(f"trained {len(table)} node vectors of dim {table.dim}; "
      f"loss {losses[0]:.3f} -> {losses[-1]:.3f}")


def cosine(u: str, v: str) -> float:
    x, y = table.lookup(u), table.lookup(v)
    return float(x @ y / (np.linalg.norm(x) * np.linalg.norm(y)))


intra = np.mean([cosine(u, v) for grp in (aa, bb)
                 for i, u in enumerate(grp) for v in grp[i + 1:]])
inter = np.mean([cosine(u, v) for u in aa for v in bb])
print(f"mean cosine inside a clique {intra:+.3f}, across cliques {inter:+.3f}")

# the same trainer embeds tokens when fed text instead of walks
sentences = [["deep", "breath", "calm"], ["calm", "breath", "hold"],
             ["loud", "traffic", "noise"], ["noise", "traffic", "horns"]] * 25
words = train_skipgram(sentences, WalkConfig(dim=8, window=2, negatives=3,
                                             epochs=30, lr=0.1, seed=1))
print(f"word vectors: breath~calm {np.dot(words.lookup('breath'), words.lookup('calm')):+.3f}, "
      f"breath~traffic {np.dot(words.lookup('breath'), words.lookup('traffic')):+.3f}")
