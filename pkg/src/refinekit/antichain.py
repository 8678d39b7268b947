"""Antichains of product pairs ``(U, s)`` ordered by ``(U,s) ≤ (V,t) iff s = t and U ⊆ V``."""
from __future__ import annotations

from dataclasses import dataclass

from .lts import from_mask
from .normalization import NormState


@dataclass(frozen=True)
class ProductPair:
    spec: NormState
    impl: int

    @property
    def key(self) -> tuple[int, int]:
        return self.spec.mask, self.impl


def leq(x: ProductPair, y: ProductPair) -> bool:
    return x.impl == y.impl and set(x.spec.states) <= set(y.spec.states)


class Antichain:
    """Buckets of spec bitsets keyed by implementation state.

    The hot-path methods (``member_mask``, ``insert_mask``) take a bitset and an
    implementation state; ``member`` and ``insert`` wrap them for
    ``ProductPair`` values.
    """

    def __init__(self):
        self.buckets: dict[int, list[int]] = {}
        self.size = 0

    def __len__(self):
        return self.size

    def member_mask(self, mask: int, s: int) -> bool:
        """True iff some stored ``(V, s)`` has ``V ⊆ mask``."""
        bucket = self.buckets.get(s)
        if bucket:
            for v in bucket:
                if v & mask == v:
                    return True
        return False

    def insert_mask(self, mask: int, s: int, check: bool = True) -> int:
        """Add ``(mask, s)`` and evict every stored pair above it.

        With ``check`` set, inserting a pair that is already covered is an
        algorithm bug and trips an assertion.  Returns the number of evictions.
        """
        bucket = self.buckets.get(s)
        if bucket is None:
            self.buckets[s] = [mask]
            self.size += 1
            return 0
        if check:
            assert not any(v & mask == v for v in bucket), "insert of a covered pair"
        kept = [v for v in bucket if mask & v != mask]
        evicted = len(bucket) - len(kept)
        kept.append(mask)
        self.buckets[s] = kept
        self.size += 1 - evicted
        return evicted

    def add_raw(self, mask: int, s: int):
        """Unconditional ``A ⋓ x`` as written, without the precondition check."""
        return self.insert_mask(mask, s, check=False)

    def member(self, x: ProductPair) -> bool:
        return self.member_mask(x.spec.mask, x.impl)

    def insert(self, x: ProductPair) -> "Antichain":
        self.insert_mask(x.spec.mask, x.impl)
        return self

    def masks(self):
        for s, bucket in self.buckets.items():
            for v in bucket:
                yield v, s

    def pairs(self) -> list[ProductPair]:
        return [ProductPair(NormState(from_mask(v)), s) for v, s in self.masks()]

    def is_proper(self) -> bool:
        for bucket in self.buckets.values():
            for i, v in enumerate(bucket):
                for j, w in enumerate(bucket):
                    if i != j and v & w == v:
                        return False
        return True

    def __contains__(self, x: ProductPair) -> bool:
        return x.spec.mask in self.buckets.get(x.impl, ())


def member(a: Antichain, x: ProductPair) -> bool:
    return a.member(x)


def insert(a: Antichain, x: ProductPair) -> Antichain:
    return a.insert(x)
