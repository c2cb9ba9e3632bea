"""Triple-removal trajectories and the sparse-system tools."""

import math

import numpy as np
import pytest

from latinlab.core import TripleSystem, validate
from latinlab.counting import count_intercalates, girth
from latinlab.process import (
    ProcessConfig,
    collision_filter,
    log_density_target,
    predicted_available,
    run_process,
    sample_sparse_system,
)
from latinlab.rng import RandomStream

from reference import brute_intercalates


def test_run_records_are_consistent():
    res = run_process(10, RandomStream(1))
    assert res.steps == len(res.trace) == len(res.available_trace)
    assert res.order.shape == (res.steps, 3)
    assert len(res.placed.triples) == res.steps
    assert set(map(tuple, res.order.tolist())) == set(res.placed.triples)
    assert validate(res.placed)
    assert res.coverage == res.steps / 100


def test_unconstrained_run_is_deterministic():
    a = run_process(9, RandomStream(7))
    b = run_process(9, RandomStream(7))
    assert (a.order == b.order).all()
    assert (a.trace == b.trace).all()


def test_available_counts_start_full_and_decrease():
    res = run_process(8, RandomStream(3))
    assert res.available_trace[0] == 8**3
    assert (np.diff(res.available_trace) < 0).all()


def test_max_steps_cap():
    res = run_process(12, RandomStream(5), ProcessConfig(max_steps=20))
    assert res.steps == 20
    assert not res.stalled


def test_girth_constrained_run_avoids_intercalates():
    res = run_process(16, RandomStream(2), ProcessConfig(girth=6))
    assert count_intercalates(res.placed) == 0
    assert brute_intercalates(res.placed) == 0
    assert girth(res.placed, g_max=6) is None


def test_girth_constraint_costs_coverage_but_not_everything():
    free = run_process(20, RandomStream(4))
    tight = run_process(20, RandomStream(4), ProcessConfig(girth=6))
    assert tight.steps <= free.steps
    assert tight.coverage > 0.5


def test_safe_trace_equals_available_when_unconstrained():
    res = run_process(7, RandomStream(9))
    assert (res.trace == res.available_trace).all()


def test_predicted_available_at_zero_is_n_cubed():
    assert predicted_available(50, 0) == 50**3
    assert predicted_available(50, 0, girth=0) == 50**3


def test_predicted_available_girth_discount():
    n, t = 40, 800
    x = t / n**2
    free = predicted_available(n, t, girth=0)
    capped = predicted_available(n, t, girth=6)
    assert free == pytest.approx(n**3 * (1 - x) ** 3)
    assert capped == pytest.approx(free * math.exp(-(x**3)))


def test_log_density_target_value():
    assert log_density_target(100) == pytest.approx(3 * math.log(100) - 13 / 4)


def test_sparse_system_density():
    rng = RandomStream(12)
    n, alpha = 40, 0.3
    sizes = [len(sample_sparse_system(n, alpha, rng).triples)
             for _ in range(5)]
    expect = alpha * n**2  # n^3 triples kept with probability alpha/n
    assert 0.5 * expect < np.mean(sizes) < 1.5 * expect


def test_collision_filter_output_is_partial_latin():
    rng = RandomStream(13)
    ts = sample_sparse_system(30, 0.5, rng)
    filtered = collision_filter(ts)
    assert validate(filtered)
    assert set(filtered.triples) <= set(ts.triples)


def test_collision_filter_removes_all_of_each_collision():
    # simultaneous deletion: both sides of a pair collision go
    ts = TripleSystem(3, [(0, 0, 0), (0, 0, 1), (1, 1, 1), (2, 2, 2)])
    filtered = collision_filter(ts)
    assert filtered.triples == ((1, 1, 1), (2, 2, 2))
