"""Adjusted Rand index tests against a pair-counting oracle."""

import numpy as np
import pytest

from wellclust import adjusted_rand_index


def pair_count_ari(a, b):
    """ARI via the four pairwise agreement counts (independent route)."""
    n = len(a)
    ss = sd = ds = dd = 0
    for i in range(n):
        for j in range(i + 1, n):
            same_a = a[i] == a[j]
            same_b = b[i] == b[j]
            if same_a and same_b:
                ss += 1
            elif same_a:
                sd += 1
            elif same_b:
                ds += 1
            else:
                dd += 1
    numer = 2.0 * (ss * dd - sd * ds)
    denom = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd)
    return numer / denom if denom else 1.0


def test_identical_partitions():
    assert adjusted_rand_index([0, 0, 1, 1], [0, 0, 1, 1]) == 1.0
    assert adjusted_rand_index([0, 0, 0], [0, 0, 0]) == 1.0


def test_label_values_do_not_matter():
    assert adjusted_rand_index([0, 0, 1, 1], [7, 7, 2, 2]) == 1.0


def test_known_values():
    assert adjusted_rand_index([0, 0, 1, 2], [0, 0, 1, 1]) == \
        pytest.approx(4.0 / 7.0)
    assert adjusted_rand_index([0, 0, 1, 1], [0, 0, 0, 1]) == \
        pytest.approx(0.0)


def test_symmetry():
    a = [0, 0, 1, 2, 2, 1]
    b = [1, 1, 0, 0, 2, 2]
    assert adjusted_rand_index(a, b) == pytest.approx(
        adjusted_rand_index(b, a))


def test_permutation_of_label_names_invariant():
    rng = np.random.Generator(np.random.Philox(key=5))
    a = rng.integers(0, 4, size=60)
    b = rng.integers(0, 3, size=60)
    remap = np.array([2, 0, 3, 1])
    assert adjusted_rand_index(a, b) == pytest.approx(
        adjusted_rand_index(remap[a], b))


def test_independent_labelings_near_zero():
    rng = np.random.Generator(np.random.Philox(key=6))
    a = rng.integers(0, 5, size=2000)
    b = rng.integers(0, 5, size=2000)
    assert abs(adjusted_rand_index(a, b)) < 0.05


def test_matches_pair_count_oracle():
    rng = np.random.Generator(np.random.Philox(key=7))
    for _ in range(20):
        a = rng.integers(0, 4, size=30)
        b = rng.integers(0, 4, size=30)
        assert adjusted_rand_index(a, b) == pytest.approx(
            pair_count_ari(a, b), abs=1e-12)


def test_validation():
    with pytest.raises(ValueError):
        adjusted_rand_index([0, 1], [0, 1, 2])
    with pytest.raises(ValueError):
        adjusted_rand_index([], [])
