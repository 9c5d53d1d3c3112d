"""K-means|| (oversampled rounds, then a weighted K-means++ reduction).

Round structure per variant:

1. refresh ``alpha`` against the candidates added in the previous round
   (baseline: full scan over every new candidate; accelerated: a VP tree over
   the new candidates queried with ``nearest_in_range(x_i, alpha_i)``),
2. ``Z = sum w_i alpha_i**2``,
3. each point joins the candidates with probability
   ``min(1, ell * w_i * alpha_i**2 / Z)`` using the uniform keyed by
   (round, i); new candidates get ``alpha_i = 0`` and own themselves.

Owners are tracked as alpha improves, with ties kept by the earlier
candidate, and each point's weight goes to its single owner. The weighted
candidates are reduced to K seeds by the matching K-means++ variant.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from accelseed.core import (BERNOULLI, INDEX, INITIAL, REDUCTION, Dataset,
                            DistanceCounter, InvalidInputError, RngStream)
from accelseed.kmeanspp import (SeedResult, _full_update, kmeanspp_accelerated,
                                kmeanspp_baseline)
from accelseed import vptree


class InsufficientCandidatesError(RuntimeError):
    """The rounds produced fewer than K positive-weight candidates."""


@dataclass
class ScalableConfig:
    K: int
    R: int = 5
    ell: float | None = None  # defaults to 2K

    def __post_init__(self):
        if self.ell is None:
            self.ell = 2 * self.K
        if self.K < 1 or self.R < 1 or not self.ell >= 1:
            raise InvalidInputError("need K >= 1, R >= 1 and ell >= 1")


@dataclass
class CandidateSet:
    indices: list[int] = field(default_factory=list)
    round_sizes: list[int] = field(default_factory=list)
    reweights: np.ndarray | None = None

    @property
    def k(self) -> int:
        return len(self.indices)


@dataclass
class ScalableTrace:
    round_candidates: list[list[int]] = field(default_factory=list)
    alphas: list[np.ndarray] = field(default_factory=list)
    reweights: np.ndarray | None = None
    candidates: list[int] = field(default_factory=list)


@numba.njit(cache=True)
def _owned_weight(owner, w, k):
    out = np.zeros(k)
    for j in range(owner.shape[0]):
        out[owner[j]] += w[j]
    return out


def reweight(dataset: Dataset, candidates: CandidateSet, owner: np.ndarray) -> np.ndarray:
    """Candidate weights: each point's weight credited to its single owner.

    ``owner[j]`` is the position in ``candidates.indices`` of the candidate
    that achieved point j's alpha. Accumulated in point-index order.
    """
    owner = np.asarray(owner, dtype=np.int64)
    if owner.shape[0] != dataset.n or np.any(owner < 0) or np.any(owner >= candidates.k):
        raise InvalidInputError("every point needs an owner among the candidates")
    return _owned_weight(owner, dataset.weights, candidates.k)


def _initial_candidate(dataset: Dataset, rng: RngStream) -> int:
    w = dataset.weights
    u = rng.generator(INITIAL).random()
    cdf = np.cumsum(w / w.sum())
    i = int(np.searchsorted(cdf, u, side="right"))
    i = min(i, dataset.n - 1)
    while w[i] <= 0:  # float slack at the top of the cdf
        i -= 1
    return i


def _run_rounds(dataset, cfg, rng, counter, refresh, trace):
    X, w = dataset.points, dataset.weights
    n = dataset.n
    cands = CandidateSet()
    first = _initial_candidate(dataset, rng)
    cands.indices.append(first)
    cands.round_sizes.append(1)
    alpha = np.full(n, np.inf)
    owner = np.full(n, -1, dtype=np.int64)
    k_prev = 0
    for rnd in range(cfg.R):
        k = cands.k
        refresh(rnd, X, alpha, owner, cands.indices, k_prev, k, counter)
        k_prev = k
        wa2 = w * alpha * alpha
        z = float(wa2.sum())
        u = rng.uniforms(n, BERNOULLI, rnd)
        if z > 0:
            p = np.minimum(1.0, cfg.ell * wa2 / z)
            # u lies in (0, 1]: a clamped p of 1 always fires, p of 0 never does
            new = np.flatnonzero(u <= p)
        else:
            new = np.empty(0, dtype=np.int64)
        base = cands.k
        alpha[new] = 0.0
        owner[new] = base + np.arange(new.shape[0])
        cands.indices.extend(new.tolist())
        cands.round_sizes.append(int(new.shape[0]))
        if trace is not None:
            trace.round_candidates.append(new.tolist())
            trace.alphas.append(alpha.copy())
    return cands, alpha, owner


def _refresh_scan(rnd, X, alpha, owner, indices, k_prev, k, counter):
    n = X.shape[0]
    for j in range(k_prev, k):
        _full_update(X, X[indices[j]], alpha, owner, j)
        counter.add(n)


def _make_refresh_tree(rng: RngStream, leaf_size: int):
    def refresh(rnd, X, alpha, owner, indices, k_prev, k, counter):
        if k == k_prev:  # the previous round added nothing
            return
        centers = X[np.asarray(indices[k_prev:k], dtype=np.int64)]
        tree = vptree.build(centers, counter, leaf_size=leaf_size,
                            rng=rng.generator(INDEX, rnd))
        vptree.update_in_range(tree, X, alpha, owner, k_prev, counter)
    return refresh


def _reduce(dataset, cfg, rng, counter, cands, owner, reducer, trace):
    w_prime = reweight(dataset, cands, owner)
    cands.reweights = w_prime
    if trace is not None:
        trace.reweights = w_prime.copy()
        trace.candidates = list(cands.indices)
    positive = int(np.count_nonzero(w_prime > 0))
    if positive < cfg.K:
        raise InsufficientCandidatesError(
            f"{positive} weighted candidates after {cfg.R} rounds, need K={cfg.K}")
    reduced = Dataset(dataset.points[np.asarray(cands.indices)], w_prime)
    res = reducer(reduced, cfg.K, rng, counter, lam_key=(REDUCTION,))
    return [cands.indices[i] for i in res.seed_indices], res


def _kbb(dataset, cfg, rng, counter, refresh, reducer, record):
    if dataset.n == 0:
        raise InvalidInputError("empty dataset")
    start = counter.count
    trace = ScalableTrace() if record else None
    cands, alpha, owner = _run_rounds(dataset, cfg, rng, counter, refresh, trace)
    seeds, res = _reduce(dataset, cfg, rng, counter, cands, owner, reducer, trace)
    return SeedResult(seeds, dataset.points[seeds].copy(), counter.count - start,
                      examined_fractions=res.examined_fractions,
                      pruned=res.pruned, trace=trace)


def kmeansbb_baseline(dataset: Dataset, cfg: ScalableConfig, rng: RngStream,
                      counter: DistanceCounter, record: bool = False) -> SeedResult:
    return _kbb(dataset, cfg, rng, counter, _refresh_scan, kmeanspp_baseline, record)


def kmeansbb_accelerated(dataset: Dataset, cfg: ScalableConfig, rng: RngStream,
                         counter: DistanceCounter, record: bool = False,
                         leaf_size: int = vptree.LEAF_SIZE) -> SeedResult:
    return _kbb(dataset, cfg, rng, counter, _make_refresh_tree(rng, leaf_size),
                kmeanspp_accelerated, record)
