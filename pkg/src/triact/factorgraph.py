"""Third-order factor graph over people and their pairwise relations.

For ``n`` participants the graph has one action node per person and one
relation node per unordered pair. Compatibility factors tie each pair of
action nodes to their relation node; transitivity factors tie the three
relation nodes of every participant triple. Every node ends up with degree
``n - 1``, and every factor touches exactly three nodes.

Node ids are global: action nodes occupy ``0..n-1``, relation nodes
``n..n+P-1`` where ``P = n*(n-1)/2``. Factors are ordered with all
compatibility factors first (pair order), then transitivity factors
(triple order). Edges are listed factor-major, three per factor, in member
order. Builders are cached; treat returned graphs as read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

__all__ = [
    "PairIndexMap",
    "InteractionGraph",
    "pair_index",
    "build_graph",
    "format_graph",
]


def pair_index(n: int, u: int, v: int) -> int:
    """Slot of ordered pair (u, v), u < v, in lexicographic order.

    Callers holding an unordered pair should sort first (or use
    :meth:`PairIndexMap.slot`, which does).
    """
    if not (0 <= u < v < n):
        raise ValueError(f"need 0 <= u < v < n={n}, got ({u}, {v})")
    return u * n - u * (u + 1) // 2 + (v - u - 1)


@dataclass(frozen=True, eq=False)
class PairIndexMap:
    """Bidirectional map between pair slots and participant pairs."""

    n: int
    pairs: np.ndarray  # (P, 2), rows sorted, lexicographic order

    @classmethod
    def build(cls, n: int) -> "PairIndexMap":
        if n < 2:
            raise ValueError(f"need at least 2 people, got {n}")
        pairs = np.array(list(combinations(range(n), 2)), dtype=np.intp)
        return cls(n=n, pairs=pairs)

    @property
    def size(self) -> int:
        return self.pairs.shape[0]

    def slot(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return pair_index(self.n, u, v)

    def people(self, slot: int) -> tuple[int, int]:
        u, v = self.pairs[slot]
        return int(u), int(v)


@dataclass(frozen=True, eq=False)
class InteractionGraph:
    """Index arrays for one scene's factor graph."""

    n: int
    pair_map: PairIndexMap
    triples: np.ndarray            # (T, 3) participant triples, r < s < t
    triple_pair_slots: np.ndarray  # (T, 3) relation slots (rs, st, rt)
    factor_members: np.ndarray     # (F, 3) global node ids per factor
    edge_factor: np.ndarray        # (E,) factor id per edge
    edge_node: np.ndarray          # (E,) global node id per edge
    node_edge_slots: np.ndarray    # (num_nodes, degree) incident edge rows

    @property
    def num_pairs(self) -> int:
        return self.pair_map.size

    @property
    def num_triples(self) -> int:
        return self.triples.shape[0]

    @property
    def num_nodes(self) -> int:
        return self.n + self.num_pairs

    @property
    def num_factors(self) -> int:
        return self.factor_members.shape[0]

    @property
    def num_edges(self) -> int:
        return self.edge_factor.shape[0]

    @property
    def degree(self) -> int:
        return self.n - 1

    @property
    def pairs(self) -> np.ndarray:
        return self.pair_map.pairs


@lru_cache(maxsize=None)
def build_graph(n: int) -> InteractionGraph:
    """Construct (and cache) the factor graph for ``n`` participants."""
    pair_map = PairIndexMap.build(n)
    pairs = pair_map.pairs
    num_pairs = pair_map.size

    trip_list = list(combinations(range(n), 3))
    triples = np.array(trip_list, dtype=np.intp).reshape(len(trip_list), 3)
    if len(trip_list):
        r, s, t = triples[:, 0], triples[:, 1], triples[:, 2]
        slot = np.vectorize(lambda a, b: pair_index(n, a, b))
        triple_pair_slots = np.stack([slot(r, s), slot(s, t), slot(r, t)], axis=1)
    else:
        triple_pair_slots = np.zeros((0, 3), dtype=np.intp)

    compat_members = np.stack(
        [pairs[:, 0], pairs[:, 1], n + np.arange(num_pairs)], axis=1)
    trans_members = n + triple_pair_slots
    factor_members = np.concatenate([compat_members, trans_members], axis=0)

    num_factors = factor_members.shape[0]
    edge_factor = np.repeat(np.arange(num_factors, dtype=np.intp), 3)
    edge_node = factor_members.reshape(-1)

    num_nodes = n + num_pairs
    degree = n - 1
    slots = [[] for _ in range(num_nodes)]
    for row, node in enumerate(edge_node):
        slots[node].append(row)
    if any(len(s) != degree for s in slots):
        raise AssertionError("every node should have degree n - 1")
    node_edge_slots = np.array(slots, dtype=np.intp)

    return InteractionGraph(
        n=n,
        pair_map=pair_map,
        triples=triples,
        triple_pair_slots=triple_pair_slots,
        factor_members=factor_members,
        edge_factor=edge_factor,
        edge_node=edge_node,
        node_edge_slots=node_edge_slots,
    )


def format_graph(graph: InteractionGraph) -> str:
    """Human-readable dump of nodes, factors, and edges."""
    lines = [
        f"people: {graph.n}",
        f"nodes: {graph.num_nodes} "
        f"({graph.n} action + {graph.num_pairs} relation)",
        f"factors: {graph.num_factors} "
        f"({graph.num_pairs} compatibility + {graph.num_triples} transitivity)",
        f"edges: {graph.num_edges}",
        f"degree: {graph.degree}",
    ]
    for slot in range(graph.num_pairs):
        u, v = graph.pair_map.people(slot)
        lines.append(f"relation node {graph.n + slot}: pair ({u}, {v})")
    for f in range(graph.num_factors):
        kind = "compat" if f < graph.num_pairs else "trans"
        members = ", ".join(str(m) for m in graph.factor_members[f])
        lines.append(f"factor {f} [{kind}]: nodes {members}")
    return "\n".join(lines)
