"""Undirected, unweighted mention network over users.

Nodes are all corpus users plus every external user id they mention. Edges
collapse repeated mentions in either direction; self-mentions are dropped.
Dense integer node ids make neighbor sampling O(1) for random walks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from causalmood.corpus import Corpus
from causalmood.textproc import ActivityMode, KeywordSet, classify_activity


@dataclass
class MentionGraph:
    node_ids: list[str]            # dense id -> user id
    node_index: dict[str, int]     # user id -> dense id
    adjacency: list[np.ndarray]    # per-node sorted neighbor dense ids
    n_edges: int

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    def _check(self, node: int) -> None:
        if not 0 <= node < self.n_nodes:
            raise KeyError(f"unknown node id {node} (graph has {self.n_nodes} nodes)")

    def degree(self, node: int) -> int:
        self._check(node)
        return len(self.adjacency[node])

    def neighbors(self, node: int) -> np.ndarray:
        self._check(node)
        return self.adjacency[node]

    def has_edge(self, a: int, b: int) -> bool:
        self._check(a)
        self._check(b)
        nbrs = self.adjacency[a]
        pos = int(np.searchsorted(nbrs, b))
        return pos < len(nbrs) and nbrs[pos] == b

    def edge_pairs(self) -> list[tuple[str, str]]:
        """All edges as user-id pairs, sorted within pair and across pairs."""
        pairs = []
        for a in range(self.n_nodes):
            for b in self.adjacency[a]:
                if a < b:
                    ids = sorted((self.node_ids[a], self.node_ids[int(b)]))
                    pairs.append((ids[0], ids[1]))
        return sorted(pairs)


def _assemble(node_ids: list[str], node_index: dict[str, int],
              edges: set[tuple[int, int]]) -> MentionGraph:
    nbr_lists: list[list[int]] = [[] for _ in node_ids]
    for a, b in edges:
        nbr_lists[a].append(b)
        nbr_lists[b].append(a)
    adjacency = [np.array(sorted(ns), dtype=np.int64) for ns in nbr_lists]
    return MentionGraph(node_ids, node_index, adjacency, len(edges))


def build_mention_graph(
    corpus: Corpus,
    restrict_to_activity_posts: bool = True,
    ks: Optional[KeywordSet] = None,
) -> MentionGraph:
    """Build the mention network.

    When ``restrict_to_activity_posts`` is set, only mentions inside posts
    containing an activity keyword contribute edges. Corpus users get the
    first dense ids (in corpus order); external mentioned ids follow in
    first-mention order.
    """
    ks = ks if ks is not None else KeywordSet()
    node_ids = [u.user_id for u in corpus.users]
    node_index = {uid: i for i, uid in enumerate(node_ids)}
    if len(node_index) != len(node_ids):
        raise ValueError("corpus contains duplicate user ids")
    edges: set[tuple[int, int]] = set()
    for user in corpus.users:
        src = node_index[user.user_id]
        for post in user.posts:
            if restrict_to_activity_posts and not classify_activity(
                post, ks, ActivityMode.ANY_YOGA
            ):
                continue
            for mention in post.mentions:
                dst = node_index.get(mention)
                if dst is None:
                    dst = len(node_ids)
                    node_index[mention] = dst
                    node_ids.append(mention)
                if dst != src:
                    edges.add((min(src, dst), max(src, dst)))
    return _assemble(node_ids, node_index, edges)


def graph_from_edges(
    pairs: Iterable[tuple[str, str]], extra_nodes: Sequence[str] = ()
) -> MentionGraph:
    """Build a graph directly from user-id pairs (mainly for tests/tools)."""
    node_ids: list[str] = []
    node_index: dict[str, int] = {}

    def intern(uid: str) -> int:
        if uid not in node_index:
            node_index[uid] = len(node_ids)
            node_ids.append(uid)
        return node_index[uid]

    edges: set[tuple[int, int]] = set()
    for u, v in pairs:
        a, b = intern(u), intern(v)
        if a != b:
            edges.add((min(a, b), max(a, b)))
    for uid in extra_nodes:
        intern(uid)
    return _assemble(node_ids, node_index, edges)


def save_graph(graph: MentionGraph, path: str) -> None:
    """JSON dump preserving node order (and therefore isolated nodes)."""
    payload = {
        "nodes": graph.node_ids,
        "edges": [[a, int(b)] for a in range(graph.n_nodes)
                  for b in graph.adjacency[a] if a < b],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)
        fh.write("\n")


def load_graph(path: str) -> MentionGraph:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    node_ids = [str(n) for n in payload["nodes"]]
    node_index = {uid: i for i, uid in enumerate(node_ids)}
    if len(node_index) != len(node_ids):
        raise ValueError(f"{path}: duplicate node ids")
    edges = set()
    for a, b in payload["edges"]:
        if not (0 <= a < len(node_ids) and 0 <= b < len(node_ids)):
            raise ValueError(f"{path}: edge ({a},{b}) references unknown node")
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return _assemble(node_ids, node_index, edges)


def export_edge_list(graph: MentionGraph, path: str) -> None:
    """One ``id1<TAB>id2`` per line; ids sorted within line, lines sorted."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in graph.edge_pairs():
            fh.write(f"{u}\t{v}\n")
