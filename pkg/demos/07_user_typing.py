"""Training the joint user-type classifier: description and activity
tweets through BiLSTM+attention, location through an LSTM, node vectors
through a linear+ReLU branch, all concatenated into a 3-way softmax."""

import warnings

import numpy as np

from causalmood.corpus import SplitSpec, split
from causalmood.embed import EmbeddingTable, WalkConfig, embed_nodes, train_skipgram
from causalmood.graph import build_mention_graph
from causalmood.models import USER_TYPE_NAMES, YunConfig, classify_users, train_yun
from causalmood.synth import SynthConfig, generate
from causalmood.textproc import tokenize

corpus, _ = generate(SynthConfig(
    n_users=60, days=20, seed=0,
    frac_practitioner=0.34, frac_promotional=0.33, frac_other=0.33))

sequences = []
for user in corpus.users:
    for field in (user.description, user.location):
        if tokenize(field):
            sequences.append(tokenize(field))
    for post in user.posts:
        if tokenize(post.text):
            sequences.append(tokenize(post.text))
word_table = train_skipgram(sequences, WalkConfig(
    dim=8, window=3, negatives=3, epochs=3, lr=0.05, seed=0))
print(f"word vectors: {len(word_table)} tokens, dim {word_table.dim}")

graph = build_mention_graph(corpus)
node_table = (embed_nodes(graph, WalkConfig(dim=4, walks_per_node=4,
                                            walk_length=10, epochs=2, seed=0))
              if graph.n_edges else EmbeddingTable({}, np.zeros((0, 1)), 1))
print(f"node vectors: {len(node_table)} of {graph.n_nodes} nodes")

cfg = YunConfig(lstm_unit=6, attn_dim=8, hidden=10, net_width=4, word_dim=8,
                max_tweet_tokens=32, lr=1.0, epochs=15, batch_size=2,
                patience=15, seed=0)
train, valid, test = split(corpus, SplitSpec())
with warnings.catch_warnings():
    warnings.simplefilter("ignore")  # tiny splits may miss a class
    model, history = train_yun(train, valid, cfg, word_table, node_table)
print(f"\ntrained {len(history)} epochs; valid loss "
      f"{history[0].valid_loss:.3f} -> {min(m.valid_loss for m in history):.3f}")

assigned = classify_users(test, model)
print("\nheld-out users:")
for user in test.users:
    info = assigned[user.user_id]
    marker = "ok " if info["type"] == user.user_type_label else "MISS"
    print(f"  [{marker}] {user.user_id}: true {USER_TYPE_NAMES[user.user_type_label]:>12}, "
          f"predicted {USER_TYPE_NAMES[info['type']]:>12} "
          f"(p = {max(info['probs']):.2f})")
