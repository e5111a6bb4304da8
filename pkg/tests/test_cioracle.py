import math
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations

import numpy as np
import pytest

from ggmid.cioracle import (
    ScatterData,
    cached,
    default_alpha,
    empirical_oracle,
    exact_oracle,
    sample_cond_cov,
)
from ggmid.covlinalg import cond_cov
from ggmid.errors import InsufficientSamples, SingularConditioningSet
from ggmid.graphcore import Graph, is_separator
from ggmid.identify import identify_strongly_separable
from ggmid.synthmodel import ModelSpec, build_model, draw_samples, sample_gaussian
from helpers import UNFAITHFUL_OMEGA, chain_sigma, path_graph, unfaithful_sigma


def all_queries(p, max_size):
    for u, v in combinations(range(1, p + 1), 2):
        rest = [w for w in range(1, p + 1) if w not in (u, v)]
        for r in range(min(max_size, len(rest)) + 1):
            for S in combinations(rest, r):
                yield u, v, S


def true_margin(sigma, graph, max_size):
    """min |sigma(u,v|S)| over queries that graph separation says are dependent."""
    vals = [
        abs(cond_cov(sigma, u, v, S))
        for u, v, S in all_queries(graph.p, max_size)
        if not is_separator(graph, S, u, v)
    ]
    return min(vals)


# -- exact oracle -----------------------------------------------------------------------


def test_exact_identity_all_independent():
    o = exact_oracle(np.eye(5))
    assert all(o.query(u, v, S).independent for u, v, S in all_queries(5, 3))


def test_exact_chain():
    o = exact_oracle(chain_sigma())
    assert o.query(1, 3, (2,)).independent
    assert not o.query(1, 2, ()).independent


def test_unfaithful_triple_zero_marginal():
    # cofactor oracle: sigma_13 is proportional to w12*w23 - w13*w22 = 0.09 - 0.09
    w = UNFAITHFUL_OMEGA
    assert w[0, 1] * w[1, 2] - w[0, 2] * w[1, 1] == pytest.approx(0.0, abs=1e-15)
    sigma = unfaithful_sigma()
    assert abs(sigma[0, 2]) < 1e-15
    assert exact_oracle(np.linalg.inv(UNFAITHFUL_OMEGA)).query(1, 3, ()).independent


def test_decision_invariant_and_symmetry():
    o = exact_oracle(chain_sigma())
    for u, v, S in all_queries(3, 1):
        d = o.query(u, v, S)
        assert d.independent == (abs(d.statistic) < d.threshold_used)
        assert o.query(v, u, S) == d
        assert o.query(u, v, S) == d


def test_exact_default_tolerance_scales_with_diagonal():
    sigma = 4.0 * chain_sigma()
    assert exact_oracle(sigma).epsilon_zero == pytest.approx(1e-8 * sigma.diagonal().max())


# -- sample conditional covariance --------------------------------------------------------


def test_sample_cond_cov_empty_set_exact():
    rng = np.random.default_rng(0)
    data = ScatterData.from_samples(rng.standard_normal((17, 4)))
    assert sample_cond_cov(data, 1, 3, ()) == data.s_mat[0, 2] / 17


def test_sample_cond_cov_two_samples():
    data = ScatterData.from_samples(np.array([[1.0, 1.0, 0.0], [1.0, -1.0, 0.0]]))
    assert data.s_mat[0, 1] == 0.0
    assert sample_cond_cov(data, 1, 2, ()) == 0.0


def test_degrees_of_freedom_hand_built():
    s = np.array([[4.0, 2.0, 1.0], [2.0, 3.0, 1.0], [1.0, 1.0, 2.0]])
    data = ScatterData(s, 5)
    assert sample_cond_cov(data, 1, 2, ()) == 2.0 / 5
    # (2 - 1*1/2) / (5 - 1)
    assert sample_cond_cov(data, 1, 2, (3,)) == 0.375


def test_insufficient_samples_and_singularity():
    data = ScatterData(np.eye(4), 2)
    with pytest.raises(InsufficientSamples):
        sample_cond_cov(data, 1, 2, (3, 4))
    degenerate = ScatterData.from_samples(np.array([[1.0, 2.0, 0.0, 1.0]]).repeat(3, axis=0))
    with pytest.raises(SingularConditioningSet):
        sample_cond_cov(degenerate, 1, 2, (3,))


def test_sample_cond_cov_consistent_on_chain():
    sigma = chain_sigma()
    x = draw_samples(sigma, 5000, seed=12)
    data = ScatterData.from_samples(x)
    assert abs(sample_cond_cov(data, 1, 3, (2,))) < 0.05
    assert abs(sample_cond_cov(data, 1, 2, ()) - sigma[0, 1]) < 0.05


def test_centering_flag():
    x = draw_samples(np.eye(3), 200, seed=1) + 5.0
    centered = ScatterData.from_samples(x, center=True)
    assert abs(centered.s_mat[0, 1] / 200) < 0.5
    assert ScatterData.from_samples(x).s_mat[0, 1] / 200 > 20


# -- empirical oracle -------------------------------------------------------------------------


def test_empirical_threshold_extremes():
    data = ScatterData.from_samples(draw_samples(chain_sigma(), 300, seed=2))
    loose = empirical_oracle(data, 1e12)
    tight = empirical_oracle(data, 1e-300)
    for u, v, S in all_queries(3, 1):
        assert loose.query(u, v, S).independent
        assert not tight.query(u, v, S).independent


def test_empirical_chain_beta_half_calibration():
    sigma = chain_sigma()
    graph = path_graph(3)
    beta = true_margin(sigma, graph, 1)
    exact = exact_oracle(sigma)
    queries = list(all_queries(3, 1))
    good = 0
    for trial in range(50):
        data = ScatterData.from_samples(draw_samples(sigma, 4000, seed=trial))
        o = empirical_oracle(data, beta / 2)
        good += all(o.query(*q).independent == exact.query(*q).independent for q in queries)
    assert good >= 45


def test_exact_empirical_agreement_large_n():
    model = build_model(ModelSpec("gnp", 6, seed=26, weight_range=(0.5, 0.9)), beta_cap=3)
    assert model.beta_all == pytest.approx(true_margin(model.sigma, model.graph, 3))
    data = sample_gaussian(model, 100_000, seed=9)
    emp = empirical_oracle(data, model.beta_all / 2)
    exact = exact_oracle(model.sigma)
    for q in all_queries(6, 3):
        assert emp.query(*q).independent == exact.query(*q).independent, q


def test_sample_error_shrinks_with_n():
    model = build_model(ModelSpec("tree", 6, seed=3), beta_cap=2)
    battery = list(all_queries(6, 2))[::7]
    medians = []
    for n in (500, 1000, 2000, 4000):
        errs = []
        for trial in range(50):
            data = sample_gaussian(model, n, seed=trial * 7919 + n)
            errs.extend(abs(sample_cond_cov(data, *q) - cond_cov(model.sigma, *q)) for q in battery)
        medians.append(float(np.median(errs)))
    assert all(b <= a for a, b in zip(medians, medians[1:])), medians


# -- default threshold ------------------------------------------------------------------------


def test_default_alpha_forms():
    p, n, s = 10, 1000, 2
    assert default_alpha(p, n, s, delta=1 / p) == pytest.approx(math.sqrt((s + 3) * math.log(p) / n))
    assert default_alpha(p, 2 * n, s) == pytest.approx(default_alpha(p, n, s) / math.sqrt(2))
    # independently evaluated: sqrt((4 ln 10 + ln 20) / 1000)
    assert default_alpha(10, 1000, 2, 0.05, 1.0) == pytest.approx(0.1104811, abs=1e-7)
    with pytest.raises(ValueError):
        default_alpha(1, 10, 0)


# -- caching ------------------------------------------------------------------------------------


def test_cache_memoizes_and_is_symmetric():
    inner = exact_oracle(chain_sigma())
    o = cached(inner)
    first = o.query(1, 3, (2,))
    assert o.query(1, 3, (2,)) == first
    assert inner.query_count == 1
    assert o.query(3, 1, [2]) == first
    assert inner.query_count == 1
    assert o.query_count == 3 and o.hits == 2


def test_cache_thread_safe_equivalence():
    model = build_model(ModelSpec("cycle", 7, seed=1), beta_cap=2)
    plain = exact_oracle(model.sigma)
    o = cached(exact_oracle(model.sigma))
    queries = list(all_queries(7, 2)) * 3
    with ThreadPoolExecutor(8) as pool:
        got = list(pool.map(lambda q: o.query(*q), queries))
    assert got == [plain.query(*q) for q in queries]


def test_cached_vs_uncached_strong_sep():
    model = build_model(ModelSpec("gnp", 8, seed=5, density=0.25), beta_cap=2)
    a = identify_strongly_separable(exact_oracle(model.sigma), 8, 2)
    b = identify_strongly_separable(cached(exact_oracle(model.sigma)), 8, 2)
    assert a.verdict == b.verdict
    assert a.recovered_edges == b.recovered_edges
    assert a.classifications == b.classifications


def test_scatter_validation():
    with pytest.raises(ValueError):
        ScatterData(np.eye(2), 0)
    with pytest.raises(ValueError):
        ScatterData(np.ones((2, 3)), 3)
    assert Graph(2).edges == frozenset()
