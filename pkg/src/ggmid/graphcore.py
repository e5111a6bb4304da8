"""Undirected simple graphs and brute-force certifiers for separability properties.

The certifiers here never look at a covariance matrix. They enumerate vertex
subsets directly and are the ground truth the identification algorithms are
tested against.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator

from .covlinalg import IndexSet, index_set
from .errors import InvalidConditioningSet, InvalidIndex

Edge = tuple[int, int]


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on a subset of the labels ``1..p``.

    ``nodes`` defaults to all of ``1..p``; induced subgraphs keep the original
    labels and shrink ``nodes`` instead of relabelling.
    """

    p: int
    edges: frozenset[Edge] = frozenset()
    nodes: frozenset[int] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        nodes = frozenset(range(1, self.p + 1)) if self.nodes is None else frozenset(self.nodes)
        if any(not 1 <= w <= self.p for w in nodes):
            raise InvalidIndex(f"node labels must lie in 1..{self.p}")
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self loop at node {u}")
            if u not in nodes or v not in nodes:
                raise InvalidIndex(f"edge ({u}, {v}) leaves the node set")
            norm.add(_edge(u, v))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, p: int, edges: Iterable[Iterable[int]]) -> "Graph":
        return cls(p, frozenset(tuple(e) for e in edges))  # type: ignore[arg-type]

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {w: set() for w in self.nodes}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {w: frozenset(n) for w, n in adj.items()}

    def neighbors(self, u: int) -> frozenset[int]:
        return self.adjacency[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def max_degree(self) -> int:
        return max((len(n) for n in self.adjacency.values()), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return _edge(u, v) in self.edges

    def sorted_nodes(self) -> IndexSet:
        return tuple(sorted(self.nodes))

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def induced(self, keep: Iterable[int]) -> "Graph":
        """Induced subgraph on ``keep`` (labels preserved)."""
        keep = frozenset(keep) & self.nodes
        edges = frozenset(e for e in self.edges if e[0] in keep and e[1] in keep)
        return Graph(self.p, edges, keep)

    def without_edge(self, u: int, v: int) -> "Graph":
        return Graph(self.p, self.edges - {_edge(u, v)}, self.nodes)


def _reachable(G: Graph, start: int, allowed: frozenset[int] | set[int], skip: Edge | None = None) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for b in G.adjacency[a]:
            if b in seen or b not in allowed:
                continue
            if skip is not None and _edge(a, b) == skip:
                continue
            seen.add(b)
            queue.append(b)
    return seen


def connected_components(G: Graph, active: Iterable[int] | None = None) -> list[frozenset[int]]:
    """Partition ``active`` (default: all nodes) by reachability inside ``G_active``.

    Components are returned ordered by their smallest label.
    """
    active_set = set(G.nodes if active is None else active)
    if not active_set <= G.nodes:
        raise InvalidIndex("active set contains labels outside the graph")
    comps = []
    left = set(active_set)
    for w in sorted(active_set):
        if w not in left:
            continue
        comp = _reachable(G, w, active_set)
        left -= comp
        comps.append(frozenset(comp))
    return comps


def _separated(G: Graph, S: Iterable[int], u: int, v: int, *, drop_edge: bool = False) -> bool:
    allowed = set(G.nodes) - set(S)
    skip = _edge(u, v) if drop_edge else None
    return v not in _reachable(G, u, allowed, skip)


def is_separator(G: Graph, S: Iterable[int], u: int, v: int) -> bool:
    """True iff removing ``S`` leaves ``u`` and ``v`` in different components."""
    S = index_set(S)
    if u == v:
        raise InvalidConditioningSet("u and v must differ")
    if u in S or v in S:
        raise InvalidConditioningSet(f"({u}, {v}) overlaps separator {S}")
    return _separated(G, S, u, v)


def is_degree_bounded(G: Graph, k: int) -> bool:
    return G.max_degree() <= k


def _subsets(pool: IndexSet, max_size: int) -> Iterator[IndexSet]:
    for size in range(min(max_size, len(pool)) + 1):
        yield from combinations(pool, size)


def strong_separator(G: Graph, u: int, v: int, k: int) -> IndexSet | None:
    """Lexicographically first ``S`` with ``|S| <= k - delta_uv`` that separates
    ``u`` and ``v`` once the edge ``(u, v)`` (if any) is removed; else ``None``.
    """
    budget = k - 1 if G.has_edge(u, v) else k
    if budget < 0:
        return None
    pool = tuple(w for w in G.sorted_nodes() if w not in (u, v))
    for S in _subsets(pool, budget):
        if _separated(G, S, u, v, drop_edge=True):
            return S
    return None


def is_strongly_k_separable_pair(G: Graph, u: int, v: int, k: int) -> bool:
    return strong_separator(G, u, v, k) is not None


def is_strongly_k_separable(G: Graph, k: int) -> bool:
    return not non_strongly_separable_pairs(G, k, first_only=True)


def non_strongly_separable_pairs(G: Graph, k: int, *, first_only: bool = False) -> list[Edge]:
    """Pairs ``(u, v)``, ``u > v``, that fail strong k-separability."""
    bad = []
    nodes = G.sorted_nodes()
    for v, u in combinations(nodes, 2):
        if not is_strongly_k_separable_pair(G, u, v, k):
            bad.append((u, v))
            if first_only:
                break
    return bad


def is_k_separable(G: Graph, k: int) -> bool:
    """Every non-adjacent pair has a vertex separator of size at most ``k``."""
    for v, u in combinations(G.sorted_nodes(), 2):
        if G.has_edge(u, v):
            continue
        if strong_separator(G, u, v, k) is None:
            return False
    return True


def is_generalized_fvs(G: Graph, F: Iterable[int], k: int) -> bool:
    """True iff the induced subgraph on the nodes outside ``F`` is strongly k-separable."""
    F = set(F)
    return is_strongly_k_separable(G.induced(G.nodes - F), k)


def generalized_fvs_sets(G: Graph, k: int, ell: int) -> list[IndexSet]:
    """Every size-``ell`` node set that is a k-generalized FVS of ``G``."""
    return [F for F in combinations(G.sorted_nodes(), ell) if is_generalized_fvs(G, F, k)]
