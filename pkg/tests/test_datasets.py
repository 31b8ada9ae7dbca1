import math

import numpy as np
import pytest

from apfree.datasets import (
    RandomSetModel,
    count_aps,
    expected_ap_count,
    interval_ap_count,
    interval_set,
    random_bernoulli_set,
    squares_3ap_bruteforce,
    squares_3ap_parameterized,
    squares_set,
    squares_type_bound,
    triple_from_parameters,
)
from apfree.progression import count_types
from apfree.validation import DomainError


def test_basic_sets():
    assert interval_set(4) == (1, 2, 3, 4)
    assert squares_set(4) == (1, 4, 9, 16)
    with pytest.raises(DomainError):
        interval_set(0)


def test_squares_known_triples():
    assert squares_3ap_bruteforce(7) == [(1, 5, 7)]
    assert squares_3ap_bruteforce(17) == [(1, 5, 7), (2, 10, 14), (7, 13, 17)]
    assert squares_3ap_parameterized(17) == squares_3ap_bruteforce(17)


def test_parameterization_identity():
    for s in range(1, 8):
        for t in range(1, 8):
            a, b, c = triple_from_parameters(s, t, 1)
            assert a * a + c * c == 2 * b * b


def test_parameterization_needs_absolute_values():
    # (7, 17, 23) only appears with a negative first coordinate
    assert triple_from_parameters(1, 4, 1) == (23, 17, -7)
    assert (7, 17, 23) in squares_3ap_parameterized(23)


def test_parameterization_matches_bruteforce_to_100():
    for N in range(1, 101):
        assert squares_3ap_parameterized(N) == squares_3ap_bruteforce(N)


def test_squares_type_count_within_twice_the_cap():
    for N in (10, 50, 100):
        assert count_types(squares_set(N), 3, 1) <= 2 * squares_type_bound(N)


def test_random_model():
    model = RandomSetModel(n=10_000, c=1.0, seed=3)
    assert model.p == pytest.approx(0.01)
    A = random_bernoulli_set(model)
    assert abs(len(A) - model.expected_size) < 4 * math.sqrt(model.expected_size)
    assert A == random_bernoulli_set(model)
    assert A[0] >= 1 and A[-1] <= 10_000
    with pytest.raises(DomainError):
        RandomSetModel(n=4, c=5.0)
    with pytest.raises(DomainError):
        RandomSetModel(n=4, c=-1.0)


def test_interval_ap_count_oracle():
    for n in range(1, 30):
        for k in (3, 4):
            assert interval_ap_count(n, k) == count_aps(range(1, n + 1), k)


def test_random_ap_counts_against_expectation():
    n, c = 4000, 1.0
    main, bound = expected_ap_count(n, c, 3)
    assert main <= bound
    p = c / math.sqrt(n)
    exact = interval_ap_count(n, 3) * p**3
    counts = [count_aps(random_bernoulli_set(RandomSetModel(n, c, seed=s)), 3) for s in range(40)]
    assert max(counts) <= main
    mean = float(np.mean(counts))
    sd = float(np.std(counts, ddof=1)) / math.sqrt(len(counts))
    assert abs(mean - exact) <= 4 * sd + 1e-9
