"""K-means++ seeding: a full-scan baseline and the pruned, queue-driven variant.

Both variants draw seeds by the same exponential race, so for one RngStream
they select the same seed sequence; only the work done to get there differs.
The baseline rescans every point for every seed. The accelerated variant
skips a point whenever half the distance between its owning seed and the
newest seed is at least its current distance (triangle inequality), and
pulls the next seed from a ``RaceQueue`` instead of scanning priorities.

Race keys are exponential-clock firing times. Point i starts with key
``lam_i / w_i`` (rate ``w_i``). When its rate drops from ``v`` to
``v' = w_i * alpha_i**2`` at the clock time ``now`` of the latest winner, the
time it still has to wait stretches by ``v / v'``:
``key = now + (key - now) * v / v'``. By memorylessness every round's winner
is then drawn with probability exactly proportional to ``w_i * alpha_i**2``.
Keys only grow, so a stale heap entry is never too pessimistic.

``priority="fixed"`` instead uses ``lam_i / (w_i * alpha_i**2)`` with the
same ``lam_i`` every round. It is kept for comparison: reusing the draws of
points that already lost a race skews later rounds toward far points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from accelseed.core import (LAMBDA, Dataset, DistanceCounter, InvalidInputError,
                            RngStream, _pair_dist, distances_to)
from accelseed.race_queue import EmptyQueueError, RaceQueue


@dataclass
class SeedResult:
    """Seeds picked by one run plus the instrumentation it gathered."""

    seed_indices: list[int]
    seeds: np.ndarray
    distance_count: int
    examined_fractions: list[float] = field(default_factory=list)
    pruned: int = 0
    prune_violations: int = 0
    trace: object = None


def prune_admissible(alpha_i: float, gamma_owner: float) -> bool:
    """True when the newest seed provably cannot beat the current owner.

    If the owner is at distance alpha from x and the new seed is gamma away
    from the owner with gamma >= 2 * alpha, then the new seed is at least
    alpha away from x.
    """
    return 0.5 * gamma_owner >= alpha_i


def prune_slack(dim: int) -> float:
    """Factor applied to alpha in the compiled prune test.

    Computed distances carry a relative rounding error of about
    (dim / 2 + 2) ulp each, so at an exact tie (x halfway between its owner
    and the new seed) ``0.5 * gamma >= alpha`` can hold while the computed
    distance to the new seed is one ulp below alpha. Inflating alpha by more
    than the combined error keeps every skip sound for computed distances,
    which is what seed-for-seed equality with the full scan needs.
    """
    return 1.0 + (dim + 4) * 2.0 ** -51


PRIORITY_MODES = ("clock", "fixed")


@numba.njit(cache=True, inline="always")
def _rekey(i, d, now, key, rate, lam, w, clock):
    """New race key for point i whose distance just dropped to d at time now."""
    if w[i] <= 0.0:
        return
    new_rate = w[i] * d * d
    if new_rate == 0.0:
        key[i] = np.inf
    elif clock:
        key[i] = now + (key[i] - now) * (rate[i] / new_rate)
    else:
        key[i] = lam[i] / new_rate
    rate[i] = new_rate


@numba.njit(cache=True)
def _full_update(X, c, alpha, owner, k):
    for i in range(X.shape[0]):
        d = _pair_dist(X[i], c)
        if d < alpha[i]:
            alpha[i] = d
            owner[i] = k


@numba.njit(cache=True)
def _full_update_keyed(X, c, alpha, owner, k, now, key, rate, lam, w, clock):
    for i in range(X.shape[0]):
        d = _pair_dist(X[i], c)
        if d < alpha[i]:
            alpha[i] = d
            owner[i] = k
            _rekey(i, d, now, key, rate, lam, w, clock)


@numba.njit(cache=True)
def _race_argmin(key, lam, w, selected):
    best = -1
    best_p = np.inf
    for i in range(key.shape[0]):
        if selected[i] or w[i] <= 0.0:
            continue
        if key[i] < best_p:
            best_p = key[i]
            best = i
    if best >= 0:
        return best
    # No finite key left: fall back to lam / w order.
    for i in range(key.shape[0]):
        if selected[i] or w[i] <= 0.0:
            continue
        p = lam[i] / w[i]
        if best < 0 or p < best_p:
            best_p = p
            best = i
    return best


@numba.njit(cache=True)
def _pruned_update(X, c, alpha, owner, gamma, k, improved, check, slack,
                   now, key, rate, lam, w, clock):
    """Returns (n_improved, n_computed, n_pruned, n_violations)."""
    n_imp = 0
    n_comp = 0
    n_pruned = 0
    n_bad = 0
    for i in range(X.shape[0]):
        a = alpha[i]
        if 0.5 * gamma[owner[i]] >= a * slack:
            n_pruned += 1
            if check and _pair_dist(X[i], c) < a:
                n_bad += 1
            continue
        d = _pair_dist(X[i], c)
        n_comp += 1
        if d < a:
            alpha[i] = d
            owner[i] = k
            _rekey(i, d, now, key, rate, lam, w, clock)
            improved[n_imp] = i
            n_imp += 1
    return n_imp, n_comp, n_pruned, n_bad


def _check_k(dataset: Dataset, K: int) -> None:
    if K < 1:
        raise InvalidInputError("K must be at least 1")
    if K > dataset.selectable:
        raise InvalidInputError(
            f"K={K} exceeds the {dataset.selectable} points with positive weight")


def _race_state(dataset, rng, lam_key, priority):
    if priority not in PRIORITY_MODES:
        raise InvalidInputError(f"unknown priority mode {priority!r}")
    w = dataset.weights
    lam = rng.exponentials(dataset.n, *lam_key)
    rate = w.copy()
    with np.errstate(divide="ignore"):
        key = np.where(w > 0, lam / np.where(w > 0, w, 1.0), np.inf)
    return lam, key, rate, priority == "clock"


def kmeanspp_baseline(dataset: Dataset, K: int, rng: RngStream,
                      counter: DistanceCounter, lam_key=(LAMBDA,),
                      priority: str = "clock") -> SeedResult:
    """Full-scan K-means++: n distance evaluations per added seed."""
    _check_k(dataset, K)
    X, w = dataset.points, dataset.weights
    n = dataset.n
    lam, key, rate, clock = _race_state(dataset, rng, lam_key, priority)
    start = counter.count

    selected = np.zeros(n, dtype=np.bool_)
    seeds = [int(_race_argmin(key, lam, w, selected))]
    selected[seeds[0]] = True
    alpha = np.full(n, np.inf)
    owner = np.zeros(n, dtype=np.int64)
    while len(seeds) < K:
        k = len(seeds)
        now = float(key[seeds[-1]])
        _full_update_keyed(X, X[seeds[-1]], alpha, owner, k, now, key, rate, lam, w, clock)
        counter.add(n)
        nxt = int(_race_argmin(key, lam, w, selected))
        if nxt < 0:
            raise EmptyQueueError("no selectable points left")
        selected[nxt] = True
        seeds.append(nxt)
    return SeedResult(seeds, X[seeds].copy(), counter.count - start)


def kmeanspp_accelerated(dataset: Dataset, K: int, rng: RngStream,
                         counter: DistanceCounter, lam_key=(LAMBDA,),
                         debug_prune: bool = False,
                         priority: str = "clock", record: bool = False) -> SeedResult:
    """Same seeds as ``kmeanspp_baseline``, far fewer distance evaluations.

    With ``debug_prune`` every pruned pair is also evaluated (off the
    counter) and pairs that break the prune guarantee are tallied in
    ``prune_violations``. ``record`` keeps (alpha, owner) snapshots after
    every assignment pass in ``trace``; owners are 1-based seed positions.
    """
    _check_k(dataset, K)
    X, w = dataset.points, dataset.weights
    n = dataset.n
    lam, key, rate, clock = _race_state(dataset, rng, lam_key, priority)
    start = counter.count

    queue = RaceQueue(w, lam)
    alpha = np.full(n, np.inf)
    # owner 0 means unowned; gamma[0] stays 0 so unowned points never prune.
    owner = np.zeros(n, dtype=np.int64)
    gamma = np.zeros(K + 1)
    improved = np.empty(n, dtype=np.int64)
    key_of = key.item
    slack = prune_slack(dataset.dim)

    seeds = [queue.pop_next(key_of)]
    queue.examined.clear()
    pruned = bad = 0
    trace = [] if record else None
    while len(seeds) < K:
        k = len(seeds)
        newest = X[seeds[-1]]
        now = float(key[seeds[-1]])
        if k > 1:
            gamma[1:k] = distances_to(X, newest, counter, np.asarray(seeds[:-1]))
        n_imp, n_comp, n_pr, n_bad = _pruned_update(
            X, newest, alpha, owner, gamma, k, improved, debug_prune, slack,
            now, key, rate, lam, w, clock)
        counter.add(n_comp)
        pruned += n_pr
        bad += n_bad
        if record:
            trace.append((alpha.copy(), owner.copy()))
        queue.mark_dirty_many(improved[:n_imp])
        seeds.append(queue.pop_next(key_of))
    return SeedResult(seeds, X[seeds].copy(), counter.count - start,
                      examined_fractions=list(queue.examined),
                      pruned=pruned, prune_violations=bad, trace=trace)


def cdf_inversion_pick(weights: np.ndarray, alpha: np.ndarray | None,
                       gen: np.random.Generator) -> int:
    """One draw with probability proportional to w_i * alpha_i**2 (or w_i).

    Literal normalize-then-invert sampler, kept as a reference for
    distribution checks of the race-based samplers.
    """
    beta = np.asarray(weights, dtype=np.float64).copy()
    if alpha is not None:
        beta = beta * alpha * alpha
    z = beta.sum()
    if not z > 0 or not math.isfinite(z):
        raise InvalidInputError("sampling weights sum to zero")
    cdf = np.cumsum(beta / z)
    return int(min(np.searchsorted(cdf, gen.random(), side="right"), len(cdf) - 1))
