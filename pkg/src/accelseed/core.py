"""Datasets, the instrumented Euclidean distance, and keyed random streams.

Every distance in the package is computed by the same compiled kernel
(``_pair_dist``), summing squared coordinate differences left to right. The
baseline and accelerated algorithms therefore see bit-identical distances,
which is what lets the equivalence checks demand exact equality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np


class InvalidInputError(ValueError):
    pass


class NotInitializedError(RuntimeError):
    pass


# Purpose keys for RngStream substreams.
INITIAL = 0
LAMBDA = 1
BERNOULLI = 2
REDUCTION = 3
INDEX = 4


@numba.njit(cache=True, inline="always")
def _pair_dist(a, b):
    s = 0.0
    for t in range(a.shape[0]):
        diff = a[t] - b[t]
        s += diff * diff
    return math.sqrt(s)


@numba.njit(cache=True)
def _dist_all(X, c, out):
    for i in range(X.shape[0]):
        out[i] = _pair_dist(X[i], c)


@numba.njit(cache=True)
def _dist_subset(X, idx, c, out):
    for t in range(idx.shape[0]):
        out[t] = _pair_dist(X[idx[t]], c)


@numba.njit(cache=True)
def _nearest_dist(X, C, out):
    for i in range(X.shape[0]):
        best = np.inf
        for j in range(C.shape[0]):
            d = _pair_dist(X[i], C[j])
            if d < best:
                best = d
        out[i] = best


@dataclass
class DistanceCounter:
    """Tally of full distance evaluations for one run."""

    count: int = 0

    def add(self, m: int) -> None:
        if m < 0:
            raise ValueError("distance counts only grow")
        self.count += int(m)


@dataclass(frozen=True)
class Dataset:
    """Dense n x D points with nonnegative per-point weights.

    Arrays are copied to C-contiguous float64 and made read-only, so one
    instance can be shared by concurrent runs.
    """

    points: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, order="C", copy=True)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InvalidInputError("points must be a nonempty 2-D array")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("points contain NaN or Inf")
        if self.weights is None:
            w = np.ones(pts.shape[0])
        else:
            w = np.array(self.weights, dtype=np.float64, copy=True).reshape(-1)
        if w.shape[0] != pts.shape[0]:
            raise InvalidInputError(
                f"{w.shape[0]} weights for {pts.shape[0]} points")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidInputError("weights must be finite and nonnegative")
        if not np.any(w > 0):
            raise InvalidInputError("at least one weight must be positive")
        pts.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def selectable(self) -> int:
        """Number of points with positive weight."""
        return int(np.count_nonzero(self.weights > 0))

    def subset(self, idx, weights=None) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        w = self.weights[idx] if weights is None else weights
        return Dataset(self.points[idx], w)


def distance(a, b, counter: DistanceCounter) -> float:
    """Euclidean distance between two points; counts one evaluation."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise InvalidInputError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    counter.add(1)
    return float(_pair_dist(a, b))


def distances_to(X: np.ndarray, c: np.ndarray, counter: DistanceCounter,
                 idx: np.ndarray | None = None) -> np.ndarray:
    """Distances from ``c`` to every row of ``X`` (or rows ``idx``)."""
    c = np.ascontiguousarray(c, dtype=np.float64)
    if c.shape[0] != X.shape[1]:
        raise InvalidInputError(f"dimension mismatch: {c.shape[0]} vs {X.shape[1]}")
    if idx is None:
        out = np.empty(X.shape[0])
        _dist_all(X, c, out)
    else:
        idx = np.asarray(idx, dtype=np.int64)
        out = np.empty(idx.shape[0])
        _dist_subset(X, idx, c, out)
    counter.add(out.shape[0])
    return out


def nearest_distances(X: np.ndarray, C: np.ndarray,
                      counter: DistanceCounter | None = None) -> np.ndarray:
    """Distance from each row of X to its closest row of C (brute force)."""
    out = np.empty(X.shape[0])
    _nearest_dist(np.ascontiguousarray(X, dtype=np.float64),
                  np.ascontiguousarray(C, dtype=np.float64), out)
    if counter is not None:
        counter.add(X.shape[0] * C.shape[0])
    return out


def potential(dataset: Dataset, alpha) -> float:
    """Weighted squared-distance sum: sum_i w_i * alpha_i**2."""
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape[0] != dataset.n:
        raise InvalidInputError("assignment length does not match dataset")
    if not np.all(np.isfinite(alpha)):
        raise NotInitializedError("potential needs every alpha finite")
    return float(np.sum(dataset.weights * alpha * alpha))


def exponential_from_uniform(u: float) -> float:
    """Inverse-CDF map of u in (0, 1] to an Exponential(1) variate."""
    if not 0.0 < u <= 1.0:
        raise InvalidInputError("u must lie in (0, 1]")
    return -math.log(u)


@dataclass(frozen=True)
class RngStream:
    """Master seed plus purpose-keyed substreams.

    Each key tuple maps to an independent generator. Element ``i`` of a
    drawn vector depends only on (master_seed, key, i), never on the vector
    length, so the baseline and accelerated code paths consume randomness
    identically however they order their work.
    """

    master_seed: int

    def generator(self, *key: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.master_seed) & (2**64 - 1),
                                    spawn_key=tuple(int(k) for k in key))
        return np.random.default_rng(ss)

    def uniforms(self, n: int, *key: int) -> np.ndarray:
        """n uniforms on (0, 1]."""
        return 1.0 - self.generator(*key).random(n)

    def exponentials(self, n: int, *key: int) -> np.ndarray:
        if not key:
            key = (LAMBDA,)
        return -np.log(self.uniforms(n, *key))


def draw_exponential(stream: RngStream, i: int, *key: int) -> float:
    """The Exponential(1) draw lambda_i of ``stream`` for point ``i``."""
    return float(stream.exponentials(i + 1, *key)[i])
