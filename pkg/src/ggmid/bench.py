"""Success-rate sweeps over dimension and sample size.

Each trial draws a model from a family with its own seed, runs one
identification algorithm, and counts a success when the output agrees exactly
with the brute-force answer on the generating graph. Trial ``t`` uses the same
model for every ``n`` in a sweep, so rows for different ``n`` are paired.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import graphcore as gc
from .cioracle import cached, default_alpha_schedule, empirical_oracle, exact_oracle
from .errors import GgmIdError
from .identify import identify_degree_bounded, identify_generalized_fvs, identify_strongly_separable
from .synthmodel import ModelSpec, build_model, sample_gaussian

ALGORITHMS = ("degree", "strong-sep", "fvs")

COLUMNS = (
    "algorithm", "p", "k", "ell", "n", "trials", "successes",
    "success_rate", "mean_queries", "wall_ms", "alpha", "beta",
)


@dataclass(frozen=True)
class TrialConfig:
    algorithm: str
    family: str
    p: int
    k: int
    ell: int
    n: int | None  # None means exact mode
    seed: int
    trial: int
    alpha_rule: str = "beta"
    weight_range: tuple[float, float] = (0.2, 0.4)


def _seed(*parts: int) -> int:
    return int(np.random.SeedSequence([int(x) for x in parts]).generate_state(1)[0])


def model_for(cfg: TrialConfig):
    spec = ModelSpec(
        cfg.family, cfg.p,
        k=cfg.k, ell=cfg.ell if cfg.family == "base_plus_fvs" else None,
        weight_range=cfg.weight_range, seed=_seed(cfg.seed, cfg.p, cfg.trial),
    )
    cap = cfg.k + (cfg.ell if cfg.algorithm == "fvs" else 0)
    return build_model(spec, beta_cap=cap)


def _truth(algorithm, graph, k, ell):
    if algorithm == "degree":
        return gc.is_degree_bounded(graph, k)
    if algorithm == "strong-sep":
        return gc.is_strongly_k_separable(graph, k)
    return gc.generalized_fvs_sets(graph, k, ell)


def run_trial(cfg: TrialConfig) -> tuple[bool, int, float, float]:
    """Returns ``(success, queries, alpha, beta)`` for one trial."""
    model = model_for(cfg)
    graph = model.graph
    if cfg.n is None:
        oracle = cached(exact_oracle(model.sigma))
        alpha = float("nan")
    else:
        data = sample_gaussian(model, cfg.n, _seed(cfg.seed, cfg.p, cfg.trial, cfg.n))
        if cfg.alpha_rule == "beta":
            alpha = model.beta / 2
            oracle = cached(empirical_oracle(data, alpha, alpha_rule="beta/2"))
        else:
            alpha = float("nan")
            oracle = cached(empirical_oracle(data, default_alpha_schedule(cfg.p, cfg.n), alpha_rule="default"))
    truth = _truth(cfg.algorithm, graph, cfg.k, cfg.ell)
    try:
        if cfg.algorithm == "degree":
            rep = identify_degree_bounded(oracle, cfg.p, cfg.k)
            ok = rep.verdict == truth and (not truth or rep.recovered_edges == graph.sorted_edges())
        elif cfg.algorithm == "strong-sep":
            rep = identify_strongly_separable(oracle, cfg.p, cfg.k)
            ok = rep.verdict == truth and (not truth or rep.recovered_edges == graph.sorted_edges())
        else:
            rep = identify_generalized_fvs(oracle, cfg.p, cfg.k, cfg.ell)
            ok = rep.qualifying_sets == truth and all(
                edges == graph.induced(graph.nodes - set(F)).sorted_edges() for F, edges in rep.qualifying
            )
    except (GgmIdError, np.linalg.LinAlgError):
        # degenerate sample sizes make conditioning sets singular: a failed trial
        ok = False
    return bool(ok), oracle.query_count, alpha, model.beta


def bench_rows(
    algorithm: str,
    family: str,
    p_list: Iterable[int],
    n_list: Iterable[int] | None,
    trials: int,
    k: int,
    ell: int = 0,
    seed: int = 0,
    alpha_rule: str = "beta",
    workers: int = 1,
) -> Iterator[dict]:
    """Yield one CSV row per ``(p, n)`` in sorted order; ``n_list=None`` runs exact mode."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}")
    ns: list[int | None] = [None] if n_list is None else sorted(set(n_list))
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for p in sorted(set(p_list)):
            for n in ns:
                cfgs = [TrialConfig(algorithm, family, p, k, ell, n, seed, t, alpha_rule) for t in range(trials)]
                start = time.perf_counter()
                results = list(pool.map(run_trial, cfgs)) if pool else [run_trial(c) for c in cfgs]
                wall = (time.perf_counter() - start) * 1e3
                successes = sum(r[0] for r in results)
                alphas = [r[2] for r in results if not np.isnan(r[2])]
                yield {
                    "algorithm": algorithm,
                    "p": p,
                    "k": k,
                    "ell": ell,
                    "n": "" if n is None else n,
                    "trials": trials,
                    "successes": successes,
                    "success_rate": successes / trials if trials else 0.0,
                    "mean_queries": float(np.mean([r[1] for r in results])) if results else 0.0,
                    "wall_ms": round(wall, 1),
                    "alpha": float(np.mean(alphas)) if alphas else "",
                    "beta": float(np.mean([r[3] for r in results])) if results else "",
                }
    finally:
        if pool:
            pool.shutdown()


def write_csv(rows: Iterable[dict], fh) -> list[dict]:
    """Write rows as they complete (flushing each) and return them."""
    writer = csv.DictWriter(fh, fieldnames=COLUMNS)
    writer.writeheader()
    fh.flush()
    done = []
    for row in rows:
        writer.writerow(row)
        fh.flush()
        done.append(row)
    return done
