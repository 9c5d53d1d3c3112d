"""Vantage-point tree with plain and range-bounded nearest-neighbour search.

The tree is built in Python and flattened into arrays; the search itself is
a compiled depth-first traversal with an explicit stack that visits nodes in
the same order as the recursive formulation:

* at a node with vantage ``p`` compute ``r = d(q, p)`` and offer ``p`` as a
  candidate,
* descend first into the near child if ``r < (near_high + far_low) / 2``,
  else into the far child,
* enter a child with distance bounds ``[a, b]`` only if
  ``a - tau <= r <= b + tau``, with ``tau`` read at the moment of entry and
  both sides widened by a few ulps so rounding never drops a tied center.

``nearest_in_range`` starts the search at ``tau = max_range`` with no
incumbent, so whole subtrees are discarded as soon as they cannot hold a
center within the range. A candidate replaces the incumbent when it is
strictly closer, or equally close with a smaller center index, or when there
is no incumbent yet and it lies at exactly ``tau``. Ranges are thus inclusive
and ties resolve to the lowest index regardless of traversal order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numba
import numpy as np

from accelseed.core import DistanceCounter, InvalidInputError, _pair_dist, distances_to

LEAF_SIZE = 8

# bounds columns
NEAR_LOW, NEAR_HIGH, FAR_LOW, FAR_HIGH = range(4)


@dataclass
class VpTree:
    centers: np.ndarray  # (m, D)
    vantage: np.ndarray  # per node: center index, -1 for leaves
    left: np.ndarray
    right: np.ndarray
    bounds: np.ndarray  # (nodes, 4)
    leaf_start: np.ndarray
    leaf_count: np.ndarray
    leaf_items: np.ndarray
    leaf_size: int

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.vantage.shape[0]


class _Builder:
    def __init__(self, centers, counter, leaf_size, pick):
        self.centers = centers
        self.counter = counter
        self.leaf_size = leaf_size
        self.pick = pick
        self.vantage, self.left, self.right = [], [], []
        self.bounds, self.leaf_start, self.leaf_count = [], [], []
        self.leaf_items: list[int] = []

    def _new_node(self):
        self.vantage.append(-1)
        self.left.append(-1)
        self.right.append(-1)
        self.bounds.append([math.inf, -math.inf, math.inf, -math.inf])
        self.leaf_start.append(0)
        self.leaf_count.append(0)
        return len(self.vantage) - 1

    def build(self, ids: np.ndarray) -> int:
        node = self._new_node()
        if ids.shape[0] <= self.leaf_size:
            self.leaf_start[node] = len(self.leaf_items)
            self.leaf_count[node] = ids.shape[0]
            self.leaf_items.extend(ids.tolist())
            return node
        v = int(self.pick(ids))
        rest = ids[ids != v]
        d = distances_to(self.centers, self.centers[v], self.counter, rest)
        order = np.argsort(d, kind="stable")
        half = (rest.shape[0] + 1) // 2  # odd sizes: median goes near
        near, far = order[:half], order[half:]
        self.vantage[node] = v
        b = self.bounds[node]
        b[NEAR_LOW], b[NEAR_HIGH] = float(d[near[0]]), float(d[near[-1]])
        if far.shape[0]:
            b[FAR_LOW], b[FAR_HIGH] = float(d[far[0]]), float(d[far[-1]])
        self.left[node] = self.build(rest[near])
        if far.shape[0]:
            self.right[node] = self.build(rest[far])
        return node


def build(centers, counter: DistanceCounter, leaf_size: int = LEAF_SIZE,
          rng: np.random.Generator | None = None,
          pick: Callable[[np.ndarray], int] | None = None) -> VpTree:
    """Build a tree over ``centers``; construction distances are counted.

    The vantage point of each node is drawn uniformly from the node's points
    with ``rng`` unless ``pick`` (ids -> chosen id) is given.
    """
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    if centers.ndim != 2 or centers.shape[0] == 0:
        raise InvalidInputError("cannot build a tree over no centers")
    if leaf_size < 1:
        raise InvalidInputError("leaf_size must be at least 1")
    if pick is None:
        gen = rng if rng is not None else np.random.default_rng(0)
        pick = lambda ids: ids[gen.integers(ids.shape[0])]
    b = _Builder(centers, counter, leaf_size, pick)
    b.build(np.arange(centers.shape[0], dtype=np.int64))
    i64 = lambda xs: np.asarray(xs, dtype=np.int64)
    return VpTree(centers, i64(b.vantage), i64(b.left), i64(b.right),
                  np.asarray(b.bounds, dtype=np.float64), i64(b.leaf_start),
                  i64(b.leaf_count), i64(b.leaf_items), leaf_size)


@numba.njit(cache=True, inline="always")
def _better(d, c, tau, best):
    return d < tau or (d == tau and (best < 0 or c < best))


@numba.njit(cache=True)
def _search(q, tau, centers, vantage, left, right, bounds, leaf_start,
            leaf_count, leaf_items, st_node, st_parent, st_side, st_r):
    """Returns (tau, best, n_distances); best is -1 if nothing within tau."""
    # relative margin above the rounding error of the three distances that
    # enter a bound test, so a tie is never cut off by one ulp
    eps = (centers.shape[1] + 8) * 2.0 ** -51
    best = -1
    count = 0
    st_node[0] = 0
    st_side[0] = -1
    sp = 1
    while sp > 0:
        sp -= 1
        node = st_node[sp]
        side = st_side[sp]
        if side >= 0:
            par = st_parent[sp]
            r = st_r[sp]
            lo = bounds[par, 2 * side]
            hi = bounds[par, 2 * side + 1]
            if not (lo - tau <= r + eps * (lo + r + tau)
                    and r <= hi + tau + eps * (hi + r + tau)):
                continue
        p = vantage[node]
        if p < 0:
            s = leaf_start[node]
            for t in range(s, s + leaf_count[node]):
                c = leaf_items[t]
                d = _pair_dist(q, centers[c])
                count += 1
                if _better(d, c, tau, best):
                    tau = d
                    best = c
            continue
        r = _pair_dist(q, centers[p])
        count += 1
        if _better(r, p, tau, best):
            tau = r
            best = p
        mid = (bounds[node, 1] + bounds[node, 2]) / 2.0
        first = 0 if r < mid else 1
        # second child is pushed first so it is tested after the first returns
        for side in (1 - first, first):
            child = left[node] if side == 0 else right[node]
            if child >= 0:
                st_node[sp] = child
                st_parent[sp] = node
                st_side[sp] = side
                st_r[sp] = r
                sp += 1
    return tau, best, count


def _stacks(tree: VpTree):
    m = 2 * tree.n_nodes + 2
    return (np.empty(m, np.int64), np.empty(m, np.int64),
            np.empty(m, np.int64), np.empty(m, np.float64))


def _query(tree: VpTree, q, tau: float):
    q = np.ascontiguousarray(q, dtype=np.float64).reshape(-1)
    if q.shape[0] != tree.centers.shape[1]:
        raise InvalidInputError("query dimension does not match the tree")
    return _search(q, float(tau), tree.centers, tree.vantage, tree.left,
                   tree.right, tree.bounds, tree.leaf_start, tree.leaf_count,
                   tree.leaf_items, *_stacks(tree))


def nearest(tree: VpTree, q, counter: DistanceCounter) -> tuple[float, int]:
    tau, best, cnt = _query(tree, q, math.inf)
    counter.add(cnt)
    return float(tau), int(best)


def nearest_in_range(tree: VpTree, q, max_range: float,
                     counter: DistanceCounter) -> tuple[float, int]:
    """Nearest center within ``max_range`` (inclusive), else ``(max_range, -1)``."""
    if not max_range >= 0:
        raise InvalidInputError("max_range must be nonnegative")
    tau, best, cnt = _query(tree, q, max_range)
    counter.add(cnt)
    return float(tau), int(best)


@numba.njit(cache=True)
def _batch_in_range(X, alpha, owner, offset, centers, vantage, left, right,
                    bounds, leaf_start, leaf_count, leaf_items,
                    st_node, st_parent, st_side, st_r):
    total = 0
    for i in range(X.shape[0]):
        a = alpha[i]
        d, j, cnt = _search(X[i], a, centers, vantage, left, right, bounds,
                            leaf_start, leaf_count, leaf_items,
                            st_node, st_parent, st_side, st_r)
        total += cnt
        if j >= 0 and d < a:
            alpha[i] = d
            owner[i] = offset + j
    return total


def update_in_range(tree: VpTree, X: np.ndarray, alpha: np.ndarray,
                    owner: np.ndarray, offset: int,
                    counter: DistanceCounter) -> None:
    """For every row of X, move alpha/owner to a tree center that is strictly
    closer than the current alpha. Owners are ``offset + center index``."""
    cnt = _batch_in_range(X, alpha, owner, offset, tree.centers, tree.vantage,
                          tree.left, tree.right, tree.bounds, tree.leaf_start,
                          tree.leaf_count, tree.leaf_items, *_stacks(tree))
    counter.add(cnt)


def check_bounds(tree: VpTree) -> bool:
    """Recompute every node's child bounds from scratch (uncounted)."""

    def members(node):
        if node < 0:
            return []
        if tree.vantage[node] < 0:
            s = tree.leaf_start[node]
            return tree.leaf_items[s:s + tree.leaf_count[node]].tolist()
        return [int(tree.vantage[node])] + members(tree.left[node]) + members(tree.right[node])

    for node in range(tree.n_nodes):
        p = tree.vantage[node]
        if p < 0:
            continue
        for side, child in ((0, tree.left[node]), (1, tree.right[node])):
            ids = members(child)
            lo, hi = tree.bounds[node, 2 * side], tree.bounds[node, 2 * side + 1]
            if not ids:
                if child >= 0:
                    return False
                continue
            ds = [_pair_dist(tree.centers[c], tree.centers[p]) for c in ids]
            if min(ds) != lo or max(ds) != hi:
                return False
    return True
