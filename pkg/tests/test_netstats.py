import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigspec.netstats import FIXED, FREE, ensemble_experiment, rank_degree_fit


@pytest.mark.parametrize("mode", [FIXED, FREE])
def test_inverse_rank_law(mode):
    d = 64.0 / np.arange(1, 51)
    fit = rank_degree_fit(np.random.default_rng(0).permutation(d), 50, mode)
    assert fit.exponent_q == pytest.approx(-1.0, abs=1e-12)
    assert fit.intercept == pytest.approx(np.log(64.0), abs=1e-12)
    assert fit.top_k == 50 and fit.mode == mode


@pytest.mark.parametrize("mode", [FIXED, FREE])
def test_constant_degrees(mode):
    assert rank_degree_fit([7.0] * 20, 10, mode).exponent_q == pytest.approx(0.0, abs=1e-12)


def test_fixed_uses_only_top_k():
    d = list(64.0 / np.arange(1, 11)) + [1e-3] * 40
    assert rank_degree_fit(d, 10).exponent_q == pytest.approx(-1.0, abs=1e-12)


def test_fixed_closed_form():
    d = np.array([9.0, 7, 7, 5, 4, 4, 2, 1])
    r = np.arange(1, 9)
    expect = (np.log(d / d[0]) * np.log(r)).sum() / (np.log(r) ** 2).sum()
    assert rank_degree_fit(d, 8).exponent_q == pytest.approx(expect, rel=1e-14)


def test_errors():
    with pytest.raises(ValueError):
        rank_degree_fit([3, 2, 1], 1)
    with pytest.raises(ValueError):
        rank_degree_fit([3, 0, 0, 0], 2)
    with pytest.raises(ValueError):
        rank_degree_fit([3, 2], 2, "mle")


@settings(max_examples=50, deadline=None)
@given(st.floats(-3.0, 0.0), st.floats(0.5, 500.0), st.integers(2, 60))
def test_exact_power_law_recovered(q, scale, k):
    d = scale * np.arange(1, k + 1, dtype=float) ** q
    fit = rank_degree_fit(d, k, FIXED)
    assert fit.exponent_q == pytest.approx(q, abs=1e-9)
    residual = np.log(d) - fit.intercept - fit.exponent_q * np.log(np.arange(1, k + 1))
    assert np.abs(residual).max() < 1e-9


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 300), min_size=5, max_size=40), st.floats(0.01, 100.0))
def test_scale_invariance(degs, c):
    d = np.array(degs, dtype=float)
    for mode in (FIXED, FREE):
        a = rank_degree_fit(d, 5, mode).exponent_q
        b = rank_degree_fit(d * c, 5, mode).exponent_q
        assert a == pytest.approx(b, abs=1e-9)


def test_ensemble_deterministic_and_parallel_safe():
    a = ensemble_experiment(150, 30, 0.06, sims=3, top_k=10, seed=4)
    b = ensemble_experiment(150, 30, 0.06, sims=3, top_k=10, seed=4)
    c = ensemble_experiment(150, 30, 0.06, sims=3, top_k=10, seed=4, workers=2)
    assert a.to_json() == b.to_json() == c.to_json()
    assert a.sims == 3 and len(a.log_degree_mean) == 10
    assert min(a.q_std, a.avg_dist_std, a.max_dist_std) >= 0
    qs = np.array([r.q for r in a.runs])
    assert a.q_mean == pytest.approx(qs.mean()) and a.q_std == pytest.approx(qs.std(ddof=0))


def test_ensemble_members_use_offset_seeds():
    a = ensemble_experiment(100, 20, 0.08, sims=2, top_k=5, seed=10)
    b = ensemble_experiment(100, 20, 0.08, sims=1, top_k=5, seed=11)
    assert a.runs[1] == b.runs[0]


def test_ensemble_without_edges_fails():
    with pytest.raises(ValueError, match="positive degrees"):
        ensemble_experiment(10, 3, 0.0, sims=2, top_k=5, seed=0)
    with pytest.raises(ValueError):
        ensemble_experiment(10, 3, 0.5, sims=0)


def test_outputs():
    stats = ensemble_experiment(120, 25, 0.07, sims=2, top_k=4, seed=1)
    rows = stats.rank_csv().splitlines()
    assert rows[0] == "rank,mean_log_degree,std_log_degree"
    assert [int(r.split(",")[0]) for r in rows[1:]] == [1, 2, 3, 4]
    block = json.loads(stats.to_json())
    for key in ("sims", "q_mean", "q_std", "avg_dist_mean", "avg_dist_std", "max_dist_mean",
                "max_dist_std", "component_size_mean", "log_degree_mean", "log_degree_std"):
        assert key in block
