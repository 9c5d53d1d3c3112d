import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from accelseed.core import InvalidInputError
from accelseed.race_queue import EmptyQueueError, RaceQueue, race_priority


def test_build_examples():
    assert RaceQueue([1, 1, 1], [0.5, 0.2, 0.9]).peek() == 1
    assert RaceQueue([1, 4], [0.5, 0.8]).peek() == 1
    q = RaceQueue([0, 1], [0.01, 5])
    assert q.peek() == 1
    assert [i for _, i in q.heap] == [1]
    with pytest.raises(InvalidInputError):
        RaceQueue([0, 0], [1, 1])


def test_mark_dirty_is_lazy_and_idempotent():
    q = RaceQueue(np.ones(5), [0.5, 0.1, 0.3, 0.2, 0.4])
    before = list(q.heap)
    q.mark_dirty(3)
    q.mark_dirty(3)
    assert q.dirty[3] and q.n_dirty == 1
    assert q.heap == before
    first = q.pop_next(lambda i: 0.0)  # index 1 is clean and smallest
    assert first == 1
    q.mark_dirty(1)
    assert not q.dirty[1] and q.n_dirty == 1


def test_requeue_figure_scenario():
    # apparent order 3 < 4 < 2 < 1; items 3 and 4 dirty; 2 clean.
    # after fixing 3 and 4, item 4 is still below item 2.
    lam = [0.0, 4.0, 3.0, 1.0, 2.0]
    q = RaceQueue([0, 1, 1, 1, 1], lam)
    q.mark_dirty_many([1, 3, 4])
    true = {3: 3.5, 4: 2.5}
    got = q.pop_next(lambda i: true[i])
    assert got == 4
    assert q.requeued == 2  # item 1 (dirty, behind clean item 2) untouched
    assert q.dirty[1]
    assert q.examined_fraction() == pytest.approx(2 / 4)


def test_all_clean_pop_touches_nothing():
    q = RaceQueue(np.ones(4), [0.3, 0.1, 0.2, 0.4])
    assert q.pop_next(lambda i: pytest.fail("no re-prioritization expected")) == 1
    assert q.requeued == 0
    assert q.examined_fraction() == pytest.approx(1 / 4)


def test_stale_small_priority_is_fixed_before_selection():
    lam, w, alpha = [1, 1, 1], [1, 1, 1], [1, 1, 0.1]
    q = RaceQueue(w, [1.0, 1.0, 0.5])  # index 2 sits on top with apparent 0.5
    q.mark_dirty(2)
    got = q.pop_next(lambda i: race_priority(lam[i], w[i], alpha[i]))
    assert got in (0, 1)
    assert race_priority(1, 1, 0.1) == pytest.approx(100.0)


def test_all_dirty_gives_full_fraction():
    q = RaceQueue(np.ones(6), np.arange(1, 7, dtype=float))
    q.mark_dirty_many(np.arange(6))
    q.pop_next(lambda i: 10.0 - i)
    assert q.examined_fraction() == 1.0


def test_infinite_priority_goes_to_reserve():
    q = RaceQueue([1, 1, 2], [0.1, 0.2, 0.3])
    assert q.pop_next() == 0
    q.mark_dirty_many([1, 2])
    assert q.pop_next(lambda i: math.inf) == 2  # reserve orders by lam / w
    assert q.pop_next(lambda i: math.inf) == 1
    with pytest.raises(EmptyQueueError):
        q.pop_next(lambda i: math.inf)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 25), st.integers(0, 2**32 - 1), st.data())
def test_pop_matches_full_scan_oracle(n, seed, data):
    """Random alpha decreases between pops; every pop is the argmin."""
    rs = np.random.default_rng(seed)
    w = rs.uniform(0.1, 3, n)
    lam = rs.exponential(size=n)
    alpha = np.ones(n)  # so the initial lam / w is the true priority
    q = RaceQueue(w, lam)

    def true(i):
        return race_priority(lam[i], w[i], alpha[i])

    selected = set()
    for _ in range(n):
        live = [i for i in range(n) if i not in selected]
        if not live:
            break
        shrink = data.draw(st.lists(st.sampled_from(live), max_size=n))
        for i in shrink:
            new = rs.uniform(0.0, 1.0) * alpha[i]
            if new < alpha[i]:
                alpha[i] = new
                q.mark_dirty(i)
        finite = [i for i in live if not math.isinf(true(i))]
        expect = min(finite, key=lambda i: (true(i), i))
        got = q.pop_next(true)
        assert got == expect
        selected.add(got)
        # laziness never loses candidates
        assert len(q) == n - len(selected)
        for p, i in q.heap:
            assert p <= true(i)


def test_first_pop_distribution():
    w = np.array([1.0, 2.0, 3.0, 0.5, 3.5])
    counts = np.zeros(5)
    rs = np.random.default_rng(11)
    trials = 100_000
    lam = rs.exponential(size=(trials, 5))
    for t in range(trials):
        counts[RaceQueue(w, lam[t]).pop_next()] += 1
    res = stats.chisquare(counts, w / w.sum() * trials)
    assert res.pvalue > 1e-3
