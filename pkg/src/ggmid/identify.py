"""Structure identification from conditional-independence queries.

Three procedures share one witness-search engine:

* :func:`identify_degree_bounded` decides whether every node has at most ``k``
  neighbours and, if so, reads each neighbourhood off as the intersection of
  the conditioning sets that isolate the node.
* :func:`identify_strongly_separable` classifies every pair as non-neighbours
  (a faithful separator of size <= k exists), neighbours (a set of size <= k-1
  separates them once their edge is discounted) or unresolved.
* :func:`identify_generalized_fvs` repeats the pair classification for every
  candidate node set ``F`` of size ``ell``, always conditioning on ``F``.

A conditional independence ``u _|_ v | S`` is *faithful* when ``u`` and ``v``
fall in different connected components of the dependence graph on ``V \\ S``
(edges = pairs declared dependent given ``S``).

Interpretation notes recorded in every report (see ``INTERPRETATION``):

* the "all h independent" sets condition on ``S + v`` (resp. ``S + u``);
* non-neighbour witnesses range over ``|S| <= k``;
* with a candidate set ``F`` the size bound applies to ``S \\ F``.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable, Iterator

from .cioracle import CiOracle
from .covlinalg import IndexSet, complement, index_set
from .graphcore import Edge, Graph

INTERPRETATION = {
    "psi_condition": "S+v",
    "s_sep_size_bound": "|S| <= k",
    "fvs_size_bound": "|S \\ F| <= k (non-neighbours), |S \\ F| <= k-1 (neighbours)",
    "separator_padding": "sets smaller than the bound are accepted",
}

SAMPLE_CAVEAT = (
    "sample mode: classifications are threshold decisions on sample conditional "
    "covariances; faithfulness is not guaranteed"
)


class PairStatus(str, Enum):
    NON_NEIGHBOR = "NonNeighbor"
    NEIGHBOR = "Neighbor"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class PairClassification:
    pair: tuple[int, int]
    status: PairStatus
    witness: IndexSet | None = None

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "status": self.status.value,
            "witness": None if self.witness is None else list(self.witness),
        }


@dataclass(frozen=True)
class DependenceGraph:
    active: IndexSet
    edges: frozenset[Edge]
    conditioning: IndexSet

    def as_graph(self, p: int) -> Graph:
        return Graph(p, self.edges, frozenset(self.active))


@dataclass
class IdentificationReport:
    algorithm: str
    verdict: bool
    k: int
    p: int
    ell: int | None = None
    recovered_edges: list[Edge] = field(default_factory=list)
    neighborhoods: dict[int, IndexSet] | None = None
    classifications: list[PairClassification] = field(default_factory=list)
    unresolved_nodes: list[int] = field(default_factory=list)
    oracle_stats: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def unresolved(self) -> list[tuple[int, int]]:
        return [c.pair for c in self.classifications if c.status is PairStatus.UNRESOLVED]

    def recovered_graph(self) -> Graph:
        return Graph(self.p, frozenset(self.recovered_edges))

    def to_dict(self) -> dict:
        out = {
            "algorithm": self.algorithm,
            "verdict": self.verdict,
            "p": self.p,
            "k": self.k,
            "ell": self.ell,
            "recovered_edges": [list(e) for e in self.recovered_edges] if self.verdict else [],
            "classifications": [c.to_dict() for c in self.classifications],
            "unresolved": [list(pr) for pr in self.unresolved],
            "oracle_stats": self.oracle_stats,
            "interpretation": INTERPRETATION,
            "notes": self.notes,
        }
        if self.neighborhoods is not None:
            out["neighborhoods"] = {str(u): list(n) for u, n in sorted(self.neighborhoods.items())}
            out["unresolved_nodes"] = self.unresolved_nodes
        return out


@dataclass
class FvsReport:
    k: int
    ell: int
    p: int
    qualifying: list[tuple[IndexSet, list[Edge]]] = field(default_factory=list)
    candidates_examined: int = 0
    oracle_stats: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def qualifying_sets(self) -> list[IndexSet]:
        return [F for F, _ in self.qualifying]

    def to_dict(self) -> dict:
        return {
            "algorithm": "generalized-fvs",
            "verdict": bool(self.qualifying),
            "p": self.p,
            "k": self.k,
            "ell": self.ell,
            "candidates_examined": self.candidates_examined,
            "qualifying": [
                {"F": list(F), "residual_edges": [list(e) for e in edges]}
                for F, edges in self.qualifying
            ],
            "oracle_stats": self.oracle_stats,
            "interpretation": INTERPRETATION,
            "notes": self.notes,
        }


def _subsets(pool: IndexSet, max_size: int) -> Iterator[IndexSet]:
    """Subsets of ``pool`` by increasing size, lexicographic within a size."""
    for size in range(min(max_size, len(pool)) + 1):
        yield from combinations(pool, size)


class _Search:
    """Witness searches over one oracle, with memoized dependence components."""

    def __init__(self, oracle: CiOracle, p: int | None = None):
        if p is not None and p != oracle.p:
            raise ValueError(f"oracle covers {oracle.p} variables, not {p}")
        self.o = oracle
        self.p = oracle.p
        self.nodes = tuple(range(1, self.p + 1))
        self._components: dict[IndexSet, dict[int, int]] = {}
        self._lock = threading.Lock()

    def indep(self, u: int, v: int, S: IndexSet) -> bool:
        return self.o.query(u, v, S).independent

    def components(self, S: IndexSet) -> dict[int, int]:
        """Component id of every node of the dependence graph on ``V \\ S``.

        Breadth-first search that only queries pairs whose second node is not
        yet discovered; the resulting components are those of the full
        dependence graph.
        """
        with self._lock:
            got = self._components.get(S)
        if got is not None:
            return got
        active = complement(S, self.p)
        label: dict[int, int] = {}
        undiscovered = list(active)
        cid = 0
        while undiscovered:
            seed = undiscovered.pop(0)
            label[seed] = cid
            frontier = [seed]
            while frontier:
                a = frontier.pop(0)
                keep = []
                for b in undiscovered:
                    if self.indep(a, b, S):
                        keep.append(b)
                    else:
                        label[b] = cid
                        frontier.append(b)
                undiscovered = keep
            cid += 1
        with self._lock:
            return self._components.setdefault(S, label)

    def faithful(self, u: int, v: int, S: IndexSet) -> bool:
        comp = self.components(S)
        return comp[u] != comp[v]

    def component_of(self, h: int, S: IndexSet) -> set[int]:
        comp = self.components(S)
        return {w for w, c in comp.items() if c == comp[h]}

    # -- degree-bounded witnesses -------------------------------------------------

    def isolates(self, u: int, S: IndexSet) -> bool:
        return all(self.indep(u, w, S) for w in self.nodes if w != u and w not in S)

    def iter_s_deg(self, u: int, k: int) -> Iterator[IndexSet]:
        pool = tuple(w for w in self.nodes if w != u)
        for S in _subsets(pool, k):
            if self.isolates(u, S):
                yield S

    # -- non-neighbour witnesses --------------------------------------------------

    def iter_s_sep(self, u: int, v: int, k: int, base: IndexSet = ()) -> Iterator[IndexSet]:
        pool = tuple(w for w in self.nodes if w not in (u, v) and w not in base)
        for T in _subsets(pool, k):
            S = index_set(base + T)
            if self.indep(u, v, S) and self.faithful(u, v, S):
                yield S

    # -- neighbour witnesses ------------------------------------------------------

    def _gamma(self, a: int, b: int, S: IndexSet) -> bool:
        """Some h outside S + {a, b} is faithfully independent of ``a`` given ``S + b``."""
        Sb = index_set(S + (b,))
        for h in self.nodes:
            if h in (a, b) or h in S:
                continue
            if self.indep(a, h, Sb) and self.faithful(a, h, Sb):
                return True
        return False

    def _psi(self, a: int, b: int, S: IndexSet) -> bool:
        """Every h outside S + {a, b} is independent of ``a`` given ``S + b``."""
        Sb = index_set(S + (b,))
        return all(self.indep(a, h, Sb) for h in self.nodes if h not in (a, b) and h not in S)

    def in_lambda(self, u: int, v: int, S: IndexSet) -> bool:
        if self._psi(v, u, S) or self._psi(u, v, S):
            return True
        if not (self._gamma(u, v, S) and self._gamma(v, u, S)):
            return False
        reach_v = self.component_of(v, index_set(S + (u,))) - {u, v}
        reach_u = self.component_of(u, index_set(S + (v,))) - {u, v}
        return not (reach_v & reach_u)

    def iter_lambda(self, u: int, v: int, k: int, base: IndexSet = ()) -> Iterator[IndexSet]:
        if k < 1:
            return
        pool = tuple(w for w in self.nodes if w not in (u, v) and w not in base)
        for T in _subsets(pool, k - 1):
            S = index_set(base + T)
            if self.in_lambda(u, v, S):
                yield S

    def classify(self, u: int, v: int, k: int, base: IndexSet = ()) -> PairClassification:
        S = next(self.iter_s_sep(u, v, k, base), None)
        if S is not None:
            return PairClassification((u, v), PairStatus.NON_NEIGHBOR, S)
        S = next(self.iter_lambda(u, v, k, base), None)
        if S is not None:
            return PairClassification((u, v), PairStatus.NEIGHBOR, S)
        return PairClassification((u, v), PairStatus.UNRESOLVED)


def _check_node(u: int, p: int) -> None:
    if not 1 <= u <= p:
        raise ValueError(f"node {u} outside 1..{p}")


def _stats(oracle: CiOracle, start: float) -> dict:
    stats = {"queries": oracle.query_count, "wall_ms": round((time.perf_counter() - start) * 1e3, 3)}
    inner = getattr(oracle, "inner", None)
    if inner is not None:
        stats["evaluations"] = inner.query_count
        stats["cache_hits"] = oracle.hits
    stats["oracle"] = oracle.describe()
    return stats


def _notes(oracle: CiOracle) -> list[str]:
    return [SAMPLE_CAVEAT] if oracle.kind == "sample" else []


def dependence_graph(oracle: CiOracle, S: Iterable[int] = (), exclude: Iterable[int] = ()) -> DependenceGraph:
    """Graph on ``V \\ (S + exclude)`` joining every pair declared dependent given ``S``."""
    S = index_set(S, oracle.p)
    active = complement(set(S) | set(exclude), oracle.p)
    edges = frozenset(
        (i, j) for i, j in combinations(active, 2) if not oracle.query(i, j, S).independent
    )
    return DependenceGraph(active, edges, S)


def is_faithful(oracle: CiOracle, u: int, v: int, S: Iterable[int] = ()) -> bool:
    """True iff ``u`` and ``v`` sit in different components of the dependence graph given ``S``."""
    S = index_set(S, oracle.p)
    if u in S or v in S:
        raise ValueError("u and v must lie outside S")
    return _Search(oracle).faithful(u, v, S)


def s_deg_witnesses(oracle: CiOracle, u: int, k: int) -> list[IndexSet]:
    """Sets ``S`` with ``|S| <= k`` given which ``u`` is independent of every other node."""
    _check_node(u, oracle.p)
    return list(_Search(oracle).iter_s_deg(u, k))


def s_sep_witnesses(oracle: CiOracle, u: int, v: int, k: int, base: Iterable[int] = ()) -> list[IndexSet]:
    """Faithful separators of a non-neighbour pair, ``|S \\ base| <= k``."""
    return list(_Search(oracle).iter_s_sep(u, v, k, index_set(base)))


def lambda_witnesses(oracle: CiOracle, u: int, v: int, k: int, base: Iterable[int] = ()) -> list[IndexSet]:
    """Sets certifying that ``u`` and ``v`` are separated once their edge is discounted."""
    return list(_Search(oracle).iter_lambda(u, v, k, index_set(base)))


def identify_degree_bounded(oracle: CiOracle, p: int, k: int) -> IdentificationReport:
    if k < 0:
        raise ValueError("k must be non-negative")
    start = time.perf_counter()
    search = _Search(oracle, p)
    neighborhoods: dict[int, IndexSet] = {}
    failed = []
    for u in search.nodes:
        common: set[int] | None = None
        for S in search.iter_s_deg(u, k):
            common = set(S) if common is None else common & set(S)
        if common is None:
            failed.append(u)
        else:
            neighborhoods[u] = index_set(common)
    verdict = not failed
    edges: set[Edge] = set()
    asymmetric = 0
    if verdict:
        for u, nbrs in neighborhoods.items():
            for w in nbrs:
                edges.add((min(u, w), max(u, w)))
                if u not in neighborhoods[w]:
                    asymmetric += 1
    report = IdentificationReport(
        algorithm="degree-bounded",
        verdict=verdict,
        k=k,
        p=p,
        recovered_edges=sorted(edges),
        neighborhoods=neighborhoods,
        unresolved_nodes=failed,
        notes=_notes(oracle),
    )
    report.oracle_stats = _stats(oracle, start)
    report.oracle_stats["asymmetric_claims"] = asymmetric
    return report


def _pairs(nodes: Iterable[int]) -> list[tuple[int, int]]:
    nodes = sorted(nodes)
    return [(u, v) for u in nodes for v in nodes if u > v]


def _classify_all(search: _Search, pairs, k: int, base: IndexSet, workers: int) -> list[PairClassification]:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda pr: search.classify(pr[0], pr[1], k, base), pairs))
    return [search.classify(u, v, k, base) for u, v in pairs]


def identify_strongly_separable(oracle: CiOracle, p: int, k: int, *, workers: int = 1) -> IdentificationReport:
    if k < 1:
        raise ValueError("k must be at least 1")
    start = time.perf_counter()
    search = _Search(oracle, p)
    classes = _classify_all(search, _pairs(search.nodes), k, (), workers)
    verdict = all(c.status is not PairStatus.UNRESOLVED for c in classes)
    edges = sorted((c.pair[1], c.pair[0]) for c in classes if c.status is PairStatus.NEIGHBOR)
    report = IdentificationReport(
        algorithm="strongly-separable",
        verdict=verdict,
        k=k,
        p=p,
        recovered_edges=edges,
        classifications=classes,
        notes=_notes(oracle),
    )
    report.oracle_stats = _stats(oracle, start)
    return report


def identify_generalized_fvs(oracle: CiOracle, p: int, k: int, ell: int, *, workers: int = 1) -> FvsReport:
    if k < 1:
        raise ValueError("k must be at least 1")
    if not 0 <= ell <= p - 2:
        raise ValueError(f"ell must lie in 0..{p - 2}")
    start = time.perf_counter()
    search = _Search(oracle, p)
    report = FvsReport(k=k, ell=ell, p=p, notes=_notes(oracle))

    def run(F: IndexSet):
        edges = []
        for u, v in _pairs(w for w in search.nodes if w not in F):
            c = search.classify(u, v, k, F)
            if c.status is PairStatus.UNRESOLVED:
                return None
            if c.status is PairStatus.NEIGHBOR:
                edges.append((v, u))
        return sorted(edges)

    candidates = list(combinations(search.nodes, ell))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, candidates))
    else:
        results = [run(F) for F in candidates]
    report.candidates_examined = len(candidates)
    report.qualifying = [(F, edges) for F, edges in zip(candidates, results) if edges is not None]
    report.oracle_stats = _stats(oracle, start)
    return report
