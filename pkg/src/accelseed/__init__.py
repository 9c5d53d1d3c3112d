"""Exact, accelerated K-means++ and K-means|| seeding."""
from accelseed.core import (Dataset, DistanceCounter, InvalidInputError,
                            NotInitializedError, RngStream, distance,
                            draw_exponential, potential)
from accelseed.kmeanspp import (SeedResult, kmeanspp_accelerated,
                                kmeanspp_baseline, prune_admissible)
from accelseed.race_queue import EmptyQueueError, RaceQueue
from accelseed.scalable import (InsufficientCandidatesError, ScalableConfig,
                                kmeansbb_accelerated, kmeansbb_baseline)

__all__ = [
    "Dataset", "DistanceCounter", "RngStream", "distance", "draw_exponential",
    "potential", "InvalidInputError", "NotInitializedError", "EmptyQueueError",
    "InsufficientCandidatesError", "RaceQueue", "SeedResult", "ScalableConfig",
    "kmeanspp_baseline", "kmeanspp_accelerated", "prune_admissible",
    "kmeansbb_baseline", "kmeansbb_accelerated",
]
