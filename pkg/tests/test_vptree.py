import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from accelseed import vptree
from accelseed.core import DistanceCounter, InvalidInputError, distances_to


def linear_scan(C, q, max_range=math.inf):
    """Nearest center within max_range (inclusive), lowest index on ties."""
    d = distances_to(C, q, DistanceCounter())
    best = -1
    for j in range(len(C)):
        if d[j] <= max_range and (best < 0 or d[j] < d[best]):
            best = j
    return (max_range, -1) if best < 0 else (d[best], best)


def build_count(m):
    if m <= 1:
        return 0
    return (m - 1) + build_count(math.ceil((m - 1) / 2)) + build_count((m - 1) // 2)


def test_single_center():
    c = DistanceCounter()
    tree = vptree.build(np.array([[1.0, 2.0]]), c)
    assert c.count == 0
    assert vptree.nearest(tree, [4.0, 6.0], c) == (5.0, 0)


def test_one_dimensional_split():
    C = np.arange(5, dtype=float)[:, None]
    first = [True]

    def pick(ids):
        if first[0]:
            first[0] = False
            return 2
        return ids[0]

    tree = vptree.build(C, DistanceCounter(), leaf_size=1, pick=pick)
    assert tree.vantage[0] == 2
    assert tree.bounds[0].tolist() == [1.0, 1.0, 2.0, 2.0]
    near = tree.left[0]
    members = {int(tree.vantage[near])} | {
        int(tree.leaf_items[tree.leaf_start[c]]) for c in (tree.left[near], tree.right[near])
        if c >= 0}
    assert members == {1, 3}
    assert vptree.check_bounds(tree)


@pytest.mark.parametrize("m", [1, 2, 3, 7, 64, 100, 1000])
def test_build_count_recurrence(m):
    rs = np.random.default_rng(m)
    c = DistanceCounter()
    vptree.build(rs.normal(size=(m, 3)), c, leaf_size=1, rng=rs)
    assert c.count == build_count(m)
    if m >= 64:
        assert c.count <= 2 * m * math.log2(m)


def test_build_count_with_leaves_is_smaller():
    rs = np.random.default_rng(0)
    C = rs.normal(size=(500, 4))
    a, b = DistanceCounter(), DistanceCounter()
    vptree.build(C, a, leaf_size=1, rng=np.random.default_rng(1))
    vptree.build(C, b, leaf_size=8, rng=np.random.default_rng(1))
    assert b.count < a.count


def test_nearest_matches_linear_scan():
    rs = np.random.default_rng(5)
    C = rs.normal(size=(1000, 8))
    Q = rs.normal(size=(1000, 8))
    tree = vptree.build(C, DistanceCounter(), rng=rs)
    assert vptree.check_bounds(tree)
    c = DistanceCounter()
    for q in Q:
        d, j = vptree.nearest(tree, q, c)
        assert (d, j) == linear_scan(C, q)
    assert c.count < 1000 * 1000


def test_in_range_examples():
    C = np.array([[0.0], [10.0]])
    tree = vptree.build(C, DistanceCounter())
    c = DistanceCounter()
    assert vptree.nearest_in_range(tree, [4.0], 3.0, c) == (3.0, -1)
    assert vptree.nearest_in_range(tree, [4.0], 5.0, c) == (4.0, 0)
    assert vptree.nearest_in_range(tree, [4.0], 4.0, c) == (4.0, 0)  # inclusive
    assert vptree.nearest_in_range(tree, [4.0], math.inf, c) == vptree.nearest(tree, [4.0], c)
    assert vptree.nearest_in_range(tree, [5.0], math.inf, c) == (5.0, 0)  # tie -> lower index


def test_negative_range_and_bad_input():
    tree = vptree.build(np.eye(3), DistanceCounter())
    with pytest.raises(InvalidInputError):
        vptree.nearest_in_range(tree, [0, 0, 0], -1.0, DistanceCounter())
    with pytest.raises(InvalidInputError):
        vptree.nearest(tree, [0, 0], DistanceCounter())
    with pytest.raises(InvalidInputError):
        vptree.build(np.zeros((0, 2)), DistanceCounter())


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 120), st.integers(1, 5), st.integers(1, 9), st.integers(0, 10**6),
       st.floats(0, 4))
def test_in_range_property(m, dim, leaf, seed, r):
    rs = np.random.default_rng(seed)
    # coarse grids -> many ties and boundary hits; the 0.1 grid makes tied
    # distances differ in the last ulp
    step = 0.1 if seed % 3 == 0 else 1.0
    C = rs.integers(-3, 4, size=(m, dim)) * step
    q = rs.integers(-3, 4, size=dim) * step
    if seed % 2:
        r = float(np.sqrt(np.sum((C[seed % m] - q) ** 2)))
    tree = vptree.build(C, DistanceCounter(), leaf_size=leaf, rng=rs)
    got = vptree.nearest_in_range(tree, q, r, DistanceCounter())
    exp = linear_scan(C, q, r)
    assert got == exp


def test_distance_count_monotone_in_range():
    rs = np.random.default_rng(8)
    C = rs.normal(size=(2000, 3))
    tree = vptree.build(C, DistanceCounter(), rng=rs)
    for q in rs.normal(size=(50, 3)):
        counts = []
        for r in (0.05, 0.2, 1.0, math.inf):
            c = DistanceCounter()
            vptree.nearest_in_range(tree, q, r, c)
            counts.append(c.count)
        assert counts[-1] >= max(counts[:-1])
        assert counts[0] <= counts[-1]


def test_update_in_range_moves_only_on_strict_improvement():
    C = np.array([[0.0], [4.0]])
    tree = vptree.build(C, DistanceCounter())
    X = np.array([[1.0], [2.0], [3.0], [10.0]])
    alpha = np.array([0.5, 2.0, 5.0, 6.0])
    owner = np.array([7, 7, 7, 7])
    vptree.update_in_range(tree, X, alpha, owner, 10, DistanceCounter())
    assert alpha.tolist() == [0.5, 2.0, 1.0, 6.0]
    assert owner.tolist() == [7, 7, 11, 7]  # 10 is exactly 6 from center 4: no move
