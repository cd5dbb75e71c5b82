"""The mention network: who @-mentions whom inside activity posts, as an
undirected graph with dense integer node ids."""

import tempfile
from pathlib import Path

from causalmood.graph import build_mention_graph, export_edge_list, load_graph, save_graph
from causalmood.synth import SynthConfig, generate

corpus, _ = generate(SynthConfig(n_users=20, days=90, mention_prob=0.4, seed=3))
graph = build_mention_graph(corpus)
print(f"{graph.n_nodes} nodes, {graph.n_edges} edges")

degrees = sorted((graph.degree(i) for i in range(graph.n_nodes)), reverse=True)
print(f"degree sequence: {degrees}")
assert sum(degrees) == 2 * graph.n_edges  # handshake identity

hub = max(range(graph.n_nodes), key=graph.degree)
neighbors = [graph.node_ids[int(n)] for n in graph.neighbors(hub)]
print(f"best-connected user {graph.node_ids[hub]} mentions or is mentioned "
      f"by {neighbors}")

with tempfile.TemporaryDirectory() as tmp:
    gpath = str(Path(tmp) / "graph.json")
    epath = Path(tmp) / "edges.txt"
    save_graph(graph, gpath)
    export_edge_list(graph, str(epath))
    again = load_graph(gpath)
    assert again.edge_pairs() == graph.edge_pairs()
    print(f"\nedge list head:")
    for line in epath.read_text(encoding="utf-8").splitlines()[:5]:
        print(f"  {line}")
