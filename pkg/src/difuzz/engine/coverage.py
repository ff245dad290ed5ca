"""Edge-coverage map with AFL-style hit-count buckets."""

from __future__ import annotations

from ..opcodes import MAP_MASK, MAP_SIZE


def edge_index(prev_guard: int, guard: int) -> int:
    return ((prev_guard >> 1) ^ guard) & MAP_MASK


def _bucket(count):
    if count == 0:
        return 0
    for limit, value in ((1, 1), (2, 2), (3, 4), (7, 8), (15, 16), (31, 32), (127, 64)):
        if count <= limit:
            return value
    return 128


BUCKET = bytes(_bucket(c) for c in range(256))


class CoverageMap:
    """Raw saturating hit counts of one execution, stored sparsely."""

    __slots__ = ("counts",)

    def __init__(self, counts=None):
        self.counts = dict(counts or {})   # cell -> raw count (1..255)

    @classmethod
    def from_guards(cls, guards):
        """Build from a guard-id sequence, as the VM would."""
        counts = {}
        prev = 0
        for g in guards:
            i = edge_index(prev, g)
            counts[i] = min(counts.get(i, 0) + 1, 255)
            prev = g
        return cls(counts)

    def cells(self) -> bytearray:
        """The full bucketed map."""
        out = bytearray(MAP_SIZE)
        for i, c in self.counts.items():
            out[i] = BUCKET[c]
        return out

    def bucketed(self) -> dict:
        return {i: BUCKET[c] for i, c in self.counts.items()}

    def nonzero(self) -> int:
        return len(self.counts)

    def __eq__(self, other):
        return isinstance(other, CoverageMap) and self.counts == other.counts

    def __repr__(self):
        return f"CoverageMap({len(self.counts)} cells)"


class CoverageHistory:
    """Per-cell maximum bucket seen so far."""

    def __init__(self):
        self.max_bucket = bytearray(MAP_SIZE)

    def copy(self):
        h = CoverageHistory()
        h.max_bucket[:] = self.max_bucket
        return h


def coverage_is_novel(cmap: CoverageMap, history: CoverageHistory, update: bool = True) -> bool:
    """True iff some cell's bucket exceeds its historical maximum; the
    history is raised to include ``cmap`` when the answer is true."""
    hist = history.max_bucket
    novel = False
    for i, c in cmap.counts.items():
        if BUCKET[c] > hist[i]:
            novel = True
            break
    if novel and update:
        for i, c in cmap.counts.items():
            b = BUCKET[c]
            if b > hist[i]:
                hist[i] = b
    return novel
