"""Exponential-race sampling with a lazily re-prioritized binary heap.

Each point ``i`` holds a fixed draw ``lam_i ~ Exponential(1)`` and enters
with priority ``lam_i / w_i``; the smallest priority wins. The owner of the
queue supplies later priorities through ``pop_next(priority_of)``; they must
never decrease (true for K-means++ race keys, since ``alpha_i`` only
shrinks), which makes every stale heap entry optimistic. Stale entries are
flagged dirty and fixed only when they surface at the top of the heap.

Points whose priority is infinite (zero distance to a seed, or a squared
distance that underflows) leave the heap for a reserve ordered by
``lam_i / w_i``. The reserve is drawn from only once no finite priority is
left, which keeps duplicate-heavy data seedable up to the number of
positive-weight points.
"""
from __future__ import annotations

import heapq
import math
from typing import Callable

import numpy as np

from accelseed.core import InvalidInputError


class EmptyQueueError(LookupError):
    """More seeds were requested than there are selectable points."""


def race_priority(lam: float, w: float, alpha: float) -> float:
    """lam / (w * alpha**2), or +inf when the denominator is zero."""
    denom = w * alpha * alpha
    if denom == 0.0:
        return math.inf
    return lam / denom


class RaceQueue:
    """Min-heap of (priority, index) with per-index dirty flags."""

    def __init__(self, weights, lambdas):
        w = np.asarray(weights, dtype=np.float64)
        lam = np.asarray(lambdas, dtype=np.float64)
        if w.shape != lam.shape:
            raise InvalidInputError("weights and lambdas differ in length")
        if not np.any(w > 0):
            raise InvalidInputError("all weights are zero")
        self.n = w.shape[0]
        self._lam = lam.tolist()
        self._w = w.tolist()
        self.dirty = np.zeros(self.n, dtype=bool)
        self.resident = np.zeros(self.n, dtype=bool)  # has an entry in heap
        self.n_dirty = 0  # dirty resident entries
        self.popped: set[int] = set()
        self.heap: list[tuple[float, int]] = []
        self.reserve: list[tuple[float, int]] = []
        for i in np.flatnonzero(w > 0).tolist():
            p = self._lam[i] / self._w[i]
            if math.isinf(p):
                self.reserve.append((p, i))
            else:
                self.heap.append((p, i))
        heapq.heapify(self.heap)
        heapq.heapify(self.reserve)
        self.resident[[i for _, i in self.heap]] = True
        self.examined: list[float] = []
        self.requeued = 0

    def __len__(self) -> int:
        return len(self.heap) + len(self.reserve)

    def peek(self) -> int:
        return self.heap[0][1]

    def mark_dirty(self, i: int) -> None:
        if self.resident[i] and not self.dirty[i]:
            self.dirty[i] = True
            self.n_dirty += 1

    def mark_dirty_many(self, idx) -> None:
        idx = np.asarray(idx, dtype=np.int64)
        idx = idx[self.resident[idx] & ~self.dirty[idx]]
        self.dirty[idx] = True
        self.n_dirty += idx.shape[0]

    def _fallback(self, i: int) -> None:
        heapq.heappush(self.reserve, (self._lam[i] / self._w[i], i))

    def pop_next(self, priority_of: Callable[[int], float] | None = None) -> int:
        """Return the unselected index with the smallest true priority.

        ``priority_of(i)`` must give the current true priority of ``i``; it
        is called only for dirty entries that reach the top of the heap.
        """
        remaining = len(self)
        if remaining == 0:
            raise EmptyQueueError("no selectable points left")
        heap, dirty = self.heap, self.dirty
        if heap and self.n_dirty == len(heap):
            # every entry would be popped onto the stack anyway
            stack = [i for _, i in heap]
            heap.clear()
        else:
            stack = []
            while heap and dirty[heap[0][1]]:
                stack.append(heapq.heappop(heap)[1])
        self.n_dirty -= len(stack)
        fresh = []
        for i in stack:
            dirty[i] = False
            p = priority_of(i)
            if math.isinf(p):
                self.resident[i] = False
                self._fallback(i)
            else:
                fresh.append((p, i))
        if len(fresh) > len(heap):
            # keys are unique (priority, index) pairs, so rebuilding gives the
            # same pop order as pushing one by one
            heap.extend(fresh)
            heapq.heapify(heap)
        else:
            for item in fresh:
                heapq.heappush(heap, item)
        if heap:
            _, chosen = heapq.heappop(heap)
        else:
            _, chosen = heapq.heappop(self.reserve)
        self.requeued += len(stack)
        inspected = len(stack) + (0 if stack and chosen in set(stack) else 1)
        self.examined.append(min(1.0, inspected / remaining))
        self.popped.add(chosen)
        self.resident[chosen] = False
        return chosen

    def examined_fraction(self) -> float:
        """Fraction of remaining candidates inspected by the latest pop."""
        if not self.examined:
            raise LookupError("no pop has completed yet")
        return self.examined[-1]
