"""ETS feedback: trace novelty and seed distance."""

from __future__ import annotations

import math
from fractions import Fraction


class EtsTrace:
    """ETS block ids hit during one execution, in order."""

    __slots__ = ("hits", "distinct", "overflow")

    def __init__(self, hits=(), distinct=None, overflow=False):
        self.hits = list(hits)
        self.distinct = list(dict.fromkeys(self.hits)) if distinct is None else list(distinct)
        self.overflow = bool(overflow)

    def __len__(self):
        return len(self.hits)

    def __eq__(self, other):
        return (isinstance(other, EtsTrace) and self.hits == other.hits
                and self.overflow == other.overflow)

    def __repr__(self):
        return f"EtsTrace({len(self.hits)} hits, {len(self.distinct)} distinct)"


def weight_fraction(w: float) -> Fraction:
    """The rational a stored weight was rounded from. Weights are 1/(1+d)
    with small denominators; two fractions with denominators below 2**24
    are further apart than a double's rounding error, so the pick is
    unambiguous."""
    return Fraction(w).limit_denominator(1 << 24)


class EtsIndex:
    """Weights and exact distances of the ETS blocks, by id."""

    def __init__(self, ets):
        self.weight = {b.block_id: b.weight for b in ets.blocks}
        self.distance = {b.block_id: 1 / weight_fraction(b.weight) - 1 for b in ets.blocks}
        self.max_id = max(self.weight, default=0)


class EtsHistory:
    def __init__(self):
        self.seen = set()
        self.best_weight = 0.0

    def copy(self):
        h = EtsHistory()
        h.seen = set(self.seen)
        h.best_weight = self.best_weight
        return h


def _index(ets):
    return ets if isinstance(ets, EtsIndex) else EtsIndex(ets)


def seed_distance(trace: EtsTrace, ets):
    """Mean block distance over the distinct ETS blocks of ``trace``."""
    if not trace.distinct:
        return math.inf
    idx = _index(ets)
    return sum(idx.distance[b] for b in trace.distinct) / len(trace.distinct)


def best_weight(trace: EtsTrace, ets) -> float:
    idx = _index(ets)
    return max((idx.weight[b] for b in trace.distinct), default=0.0)


def ets_is_novel(trace: EtsTrace, ets, history: EtsHistory, update: bool = True) -> bool:
    """True iff the trace reaches an unseen ETS block or a strictly higher
    weight than any seen before."""
    idx = _index(ets)
    new_blocks = [b for b in trace.distinct if b not in history.seen]
    top = max((idx.weight[b] for b in trace.distinct), default=0.0)
    novel = bool(new_blocks) or top > history.best_weight
    if novel and update:
        history.seen.update(new_blocks)
        history.best_weight = max(history.best_weight, top)
    return novel
