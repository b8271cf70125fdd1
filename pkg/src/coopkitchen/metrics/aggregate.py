"""Run aggregation: inter-quartile mean with standard error, Borda counts."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Hashable, Sequence

from ..errors import ValidationError


@dataclass(frozen=True)
class Aggregate:
    iqm: float
    stderr: float
    retained: int
    degraded: bool = False  # too few values for quartile trimming

    def as_tuple(self) -> tuple[float, float]:
        return (self.iqm, self.stderr)


def iqm_stderr(values: Sequence[float]) -> Aggregate:
    """Mean of the middle 50% (floor-count trimming) and its standard error.

    Fewer than 4 values cannot be trimmed: the plain mean is returned with
    the degraded flag set.
    """
    if not values:
        raise ValidationError("iqm_stderr needs at least one value")
    data = sorted(values)
    n = len(data)
    if n < 4:
        mean = statistics.fmean(data)
        stderr = statistics.stdev(data) / math.sqrt(n) if n > 1 else 0.0
        return Aggregate(iqm=mean, stderr=stderr, retained=n, degraded=True)
    cut = n // 4
    middle = data[cut : n - cut]
    mean = statistics.fmean(middle)
    stderr = statistics.stdev(middle) / math.sqrt(len(middle)) if len(middle) > 1 else 0.0
    return Aggregate(iqm=mean, stderr=stderr, retained=len(middle))


def borda(rankings: Sequence[Sequence[Hashable]]) -> dict[Hashable, int]:
    """Rank aggregation: first of k earns k points, each rank one less.

    Every ranking must be a permutation of the same item set.
    """
    if not rankings:
        raise ValidationError("borda needs at least one ranking")
    items = set(rankings[0])
    k = len(items)
    if len(rankings[0]) != k:
        raise ValidationError("ranking contains duplicates")
    scores: dict[Hashable, int] = {item: 0 for item in items}
    for i, ranking in enumerate(rankings):
        if set(ranking) != items or len(ranking) != k:
            raise ValidationError(f"ranking {i} is not a permutation of the item set")
        for position, item in enumerate(ranking):
            scores[item] += k - position
    return scores
