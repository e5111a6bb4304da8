"""Seeded synthetic Gaussian graphical models.

Graphs come from a small set of structured families. Precision matrices put a
random-sign weight on every edge and make the diagonal strictly dominant, so
the support of the precision matrix is exactly the edge set and positive
definiteness holds by construction.

All randomness flows through ``numpy.random.default_rng`` (PCG64) seeded with
integer sequences, which is reproducible across platforms.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .cioracle import ScatterData
from .covlinalg import (
    complement,
    default_zero_tolerance,
    invert_pd,
    schur_complement,
    spectral_extremes,
)
from .errors import InvalidSpec, NotPositiveDefinite
from .graphcore import Graph, connected_components

logger = logging.getLogger(__name__)

RNG_NAME = "numpy.random.PCG64"

FAMILIES = (
    "tree",
    "chain",
    "cycle",
    "star",
    "degree_bounded",
    "gnp",
    "example1",
    "example2",
    "base_plus_fvs",
)

DEFAULT_WEIGHT_RANGE = (0.2, 0.4)


@dataclass(frozen=True)
class ModelSpec:
    family: str
    p: int
    k: int | None = None
    ell: int | None = None
    weight_range: tuple[float, float] = DEFAULT_WEIGHT_RANGE
    seed: int = 0
    density: float = 0.3

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.p < 2:
            raise InvalidSpec("p must be at least 2")
        lo, hi = self.weight_range
        if not 0 < lo <= hi < 1:
            raise InvalidSpec(f"weight range must satisfy 0 < lo <= hi < 1, got {self.weight_range}")
        if self.family == "degree_bounded" and (self.k is None or self.k < 0):
            raise InvalidSpec("degree_bounded needs k >= 0")
        if self.family in ("example1", "example2", "cycle") and self.p < 3:
            raise InvalidSpec(f"{self.family} needs p >= 3")
        if self.family == "base_plus_fvs":
            if self.k is None or self.k < 1 or self.ell is None or self.ell < 0:
                raise InvalidSpec("base_plus_fvs needs k >= 1 and ell >= 0")
            if self.p - self.ell < 3:
                raise InvalidSpec("base_plus_fvs needs at least 3 base nodes (p - ell >= 3)")
        if self.family == "gnp" and not 0 <= self.density <= 1:
            raise InvalidSpec("gnp density must lie in [0, 1]")


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) % 2**64, stream])


def _relabel(edges, perm):
    return {(int(perm[u - 1]), int(perm[v - 1])) for u, v in edges}


def _random_tree(nodes: list[int], rng: np.random.Generator) -> set[tuple[int, int]]:
    edges = set()
    for i in range(1, len(nodes)):
        j = int(rng.integers(0, i))
        edges.add((nodes[j], nodes[i]))
    return edges


def _ring_of_trees(nodes: list[int], rng: np.random.Generator) -> set[tuple[int, int]]:
    m = len(nodes)
    c = int(rng.integers(3, m + 1))
    edges = {(nodes[i], nodes[(i + 1) % c]) for i in range(c)}
    for i in range(c, m):
        edges.add((nodes[int(rng.integers(0, i))], nodes[i]))
    return edges


def _degree_bounded(nodes: list[int], k: int, rng: np.random.Generator) -> set[tuple[int, int]]:
    pairs = list(combinations(nodes, 2))
    order = rng.permutation(len(pairs))
    target = int(rng.integers(0, len(nodes) * k // 2 + 1)) if k > 0 else 0
    deg = {w: 0 for w in nodes}
    edges = set()
    for idx in order:
        if len(edges) >= target:
            break
        u, v = pairs[idx]
        if deg[u] < k and deg[v] < k:
            edges.add((u, v))
            deg[u] += 1
            deg[v] += 1
    return edges


def generate_graph(spec: ModelSpec) -> Graph:
    """Deterministic graph for ``(family, p, seed)`` (plus ``k``/``ell`` where relevant)."""
    p = spec.p
    rng = _rng(spec.seed, 0)
    nodes = list(range(1, p + 1))
    fam = spec.family
    if fam == "tree":
        edges = _relabel(_random_tree(nodes, rng), rng.permutation(nodes))
    elif fam == "chain":
        edges = {(i, i + 1) for i in range(1, p)}
    elif fam == "cycle":
        edges = {(i, i + 1) for i in range(1, p)} | {(1, p)}
    elif fam == "star":
        edges = {(1, i) for i in range(2, p + 1)}
    elif fam == "degree_bounded":
        edges = _relabel(_degree_bounded(nodes, spec.k, rng), rng.permutation(nodes))
    elif fam == "gnp":
        edges = {(u, v) for u, v in combinations(nodes, 2) if rng.random() < spec.density}
    elif fam == "example1":
        edges = {(1, 2)} | {(1, u) for u in range(3, p + 1)} | {(2, u) for u in range(3, p + 1)}
    elif fam == "example2":
        m = p - 2
        edges = {(i, i + 1) for i in range(1, m)}
        edges |= {(i, h) for h in (p - 1, p) for i in range(1, m + 1)}
    elif fam == "base_plus_fvs":
        m = p - spec.ell
        base = nodes[:m]
        if spec.k == 1:
            edges = _random_tree(base, rng)
        elif spec.k == 2:
            edges = _ring_of_trees(base, rng)
        else:
            edges = _degree_bounded(base, spec.k, rng)
        hubs = nodes[m:]
        for h in hubs:
            size = int(rng.integers(min(3, m), m + 1))
            for w in rng.choice(base, size=size, replace=False):
                edges.add((int(w), h))
        for a, b in combinations(hubs, 2):
            if rng.random() < 0.5:
                edges.add((a, b))
    else:  # pragma: no cover - guarded by ModelSpec
        raise InvalidSpec(fam)
    return Graph(p, frozenset(edges))


def planted_hubs(spec: ModelSpec) -> tuple[int, ...]:
    """Labels of the hub nodes the generator planted (example2 / base_plus_fvs)."""
    if spec.family == "example2":
        return (spec.p - 1, spec.p)
    if spec.family == "base_plus_fvs":
        return tuple(range(spec.p - spec.ell + 1, spec.p + 1))
    return ()


def dependence_margins(sigma: np.ndarray, graph: Graph, cap: int) -> tuple[float, float]:
    """Smallest conditional covariances over conditioning sets with ``|S| <= cap``.

    Returns ``(edge_margin, all_margin)``. ``all_margin`` is the minimum of
    ``|sigma(u, v | S)|`` over every pair connected in ``G`` minus ``S``, i.e.
    every dependent query; ``edge_margin`` restricts the minimum to pairs
    joined by an edge. Either is ``inf`` when there is nothing to minimize.
    """
    p = graph.p
    adj = np.zeros((p, p), dtype=bool)
    for u, v in graph.edges:
        adj[u - 1, v - 1] = adj[v - 1, u - 1] = True
    edge_min = all_min = math.inf
    for size in range(min(cap, p - 2) + 1):
        for S in combinations(range(1, p + 1), size):
            rest = complement(S, p)
            cc = schur_complement(sigma, S)
            labels = np.empty(len(rest), dtype=int)
            for cid, comp in enumerate(connected_components(graph, rest)):
                for w in comp:
                    labels[rest.index(w)] = cid
            upper = np.triu(np.ones_like(cc, dtype=bool), 1)
            dep = upper & (labels[:, None] == labels[None, :])
            if dep.any():
                all_min = min(all_min, float(np.abs(cc[dep]).min()))
            idx = np.array(rest) - 1
            on_edge = upper & adj[np.ix_(idx, idx)]
            if on_edge.any():
                edge_min = min(edge_min, float(np.abs(cc[on_edge]).min()))
    return edge_min, all_min


@dataclass
class GroundTruthModel:
    """A graph with its precision and covariance matrices.

    ``beta`` is the edge margin (see :func:`dependence_margins`), the quantity
    that sets the sample-mode threshold ``alpha = beta / 2``; ``beta_all`` is
    the minimum over every dependent query and is reported for reference.
    """

    graph: Graph
    omega: np.ndarray
    sigma: np.ndarray
    beta: float
    beta_all: float
    beta_cap: int
    weight_range: tuple[float, float] = DEFAULT_WEIGHT_RANGE
    weight_seed: int = 0
    family: str = "custom"
    seed: int | None = None
    hubs: tuple[int, ...] = ()
    retries: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.graph.p

    def metadata(self) -> dict:
        lam_max, lam_min = spectral_extremes(self.sigma)

        def finite(x):
            return None if math.isinf(x) else x

        return {
            "family": self.family,
            "p": self.p,
            "seed": self.seed,
            "weight_seed": self.weight_seed,
            "weight_range": list(self.weight_range),
            "rng": RNG_NAME,
            "beta": finite(self.beta),
            "beta_all": finite(self.beta_all),
            "beta_cap": self.beta_cap,
            "lambda_max": lam_max,
            "lambda_min": lam_min,
            "hubs": list(self.hubs),
            "retries": self.retries,
            "num_edges": len(self.graph.edges),
            **self.extra,
        }


def precision_from_graph(
    graph: Graph,
    weight_range: tuple[float, float] = DEFAULT_WEIGHT_RANGE,
    seed: int = 0,
    beta_cap: int = 1,
) -> GroundTruthModel:
    """Diagonally dominant precision matrix supported exactly on ``graph``.

    Each edge gets a random sign and a magnitude uniform in ``weight_range``;
    ``omega_uu = 1 + sum_v |omega_uv|``.
    """
    lo, hi = weight_range
    if not 0 < lo <= hi < 1:
        raise InvalidSpec(f"weight range must satisfy 0 < lo <= hi < 1, got {weight_range}")
    rng = _rng(seed, 1)
    p = graph.p
    omega = np.zeros((p, p))
    for u, v in graph.sorted_edges():
        w = rng.uniform(lo, hi) * (1.0 if rng.random() < 0.5 else -1.0)
        omega[u - 1, v - 1] = omega[v - 1, u - 1] = w
    np.fill_diagonal(omega, 1.0 + np.abs(omega).sum(axis=1))
    try:
        sigma = invert_pd(omega)
    except NotPositiveDefinite as exc:  # pragma: no cover - excluded by dominance
        raise RuntimeError("dominant precision matrix failed to factor") from exc
    beta, beta_all = dependence_margins(sigma, graph, beta_cap)
    return GroundTruthModel(graph, omega, sigma, beta, beta_all, beta_cap, tuple(weight_range), seed)


def build_model(spec: ModelSpec, beta_cap: int | None = None, max_retries: int = 50) -> GroundTruthModel:
    """Generate the graph for ``spec`` and attach weights with a usable margin.

    If the edge margin falls below ten times the exact-oracle zero tolerance,
    the weights are redrawn from a new stream; the retry count is logged and
    stored on the model.
    """
    graph = generate_graph(spec)
    if beta_cap is None:
        beta_cap = (spec.k or 1) + (spec.ell or 0)
    for attempt in range(max_retries):
        weight_seed = spec.seed if attempt == 0 else int(
            np.random.SeedSequence([spec.seed, attempt]).generate_state(1)[0]
        )
        model = precision_from_graph(graph, spec.weight_range, weight_seed, beta_cap)
        if model.beta > 10 * default_zero_tolerance(model.sigma):
            break
        logger.info("margin %.3g too small for seed %d, redrawing weights", model.beta, weight_seed)
    else:
        raise RuntimeError(f"no usable weights after {max_retries} attempts")
    model.family = spec.family
    model.seed = spec.seed
    model.hubs = planted_hubs(spec)
    model.retries = attempt
    if attempt:
        logger.warning("model %s/p=%d/seed=%d needed %d weight redraws", spec.family, spec.p, spec.seed, attempt)
    return model


def draw_samples(sigma: np.ndarray, n: int, seed: int) -> np.ndarray:
    """``n`` zero-mean Gaussian rows with covariance ``sigma`` via its Cholesky factor."""
    if n < 1:
        raise ValueError("n must be at least 1")
    try:
        chol = np.linalg.cholesky(np.asarray(sigma, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    z = np.random.default_rng(int(seed)).standard_normal((n, chol.shape[0]))
    return z @ chol.T


def sample_gaussian(model: GroundTruthModel, n: int, seed: int) -> ScatterData:
    return ScatterData.from_samples(draw_samples(model.sigma, n, seed))
