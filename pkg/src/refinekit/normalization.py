"""On-the-fly normal forms of a specification LTS.

Only the fragment of the normal form reached by an exploration is ever built.
A ``Normalizer`` owns a memo table of successors keyed by (state bitset,
action) and lives for the duration of one check.
"""
from __future__ import annotations

from dataclasses import dataclass

from .lts import TAU, Lts, StateSet, from_mask, iter_mask, mark_divergent, tau_closure_masks, to_mask


@dataclass(frozen=True)
class NormState:
    """A τ-closed set of specification states; the empty set is a valid state."""

    states: StateSet
    diverges: bool = False

    @property
    def mask(self) -> int:
        return to_mask(self.states)

    def __bool__(self):
        return bool(self.states)


class _Blocked:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BLOCKED"

    def __bool__(self):
        return False


BLOCKED = _Blocked()
"""Returned by the failures-divergences successor of a diverging state."""


class Normalizer:
    """Successor computation for ``norm(lts)`` and ``norm_fdr(lts)`` on bitsets."""

    def __init__(self, lts: Lts):
        self.lts = lts
        self.closure = tau_closure_masks(lts)
        self.divergence = mark_divergent(lts)
        self.div_mask = self.divergence.mask
        # post[s][a]: τ-closure of the a-successors of s
        post: list[dict[int, int]] = [{} for _ in range(lts.num_states)]
        for s, a, t in lts.transitions:
            if a != TAU:
                post[s][a] = post[s].get(a, 0) | self.closure[t]
        self.post = post
        self._memo: dict[tuple[int, int], int] = {}

    def initial(self) -> int:
        return self.closure[self.lts.initial]

    def closure_of(self, mask: int) -> int:
        """τ-closure of an arbitrary set of specification states."""
        out = 0
        for s in iter_mask(mask):
            out |= self.closure[s]
        return out

    def diverges(self, mask: int) -> bool:
        return bool(mask & self.div_mask)

    def successor(self, mask: int, a: int) -> int:
        """``norm`` successor of ``mask`` under visible action index ``a``."""
        key = (mask, a)
        result = self._memo.get(key)
        if result is None:
            result = 0
            post = self.post
            for s in iter_mask(mask):
                result |= post[s].get(a, 0)
            self._memo[key] = result
        return result

    def successor_fdr(self, mask: int, a: int) -> int | None:
        """``norm_fdr`` successor, or None when ``mask`` diverges."""
        if mask & self.div_mask:
            return None
        return self.successor(mask, a)

    def norm_state(self, mask: int) -> NormState:
        return NormState(from_mask(mask), self.diverges(mask))

    @property
    def memo_size(self) -> int:
        return len(self._memo)


def _action(lts: Lts, a: int | str) -> int | None:
    if isinstance(a, str):
        return lts.action_or_none(a)
    if a == TAU:
        raise ValueError("normal-form transitions are labelled by visible actions only")
    return a


def norm_initial(lts: Lts) -> NormState:
    nz = Normalizer(lts)
    return nz.norm_state(nz.initial())


def norm_successor(lts: Lts, state: NormState, a: int | str) -> NormState:
    """Successor in ``norm(lts)``; defined for every action (the normal form is universal)."""
    nz = Normalizer(lts)
    idx = _action(lts, a)
    if idx is None:
        return NormState(())
    return nz.norm_state(nz.successor(state.mask, idx))


def normfdr_successor(lts: Lts, state: NormState, a: int | str):
    """Successor in ``norm_fdr(lts)``: ``BLOCKED`` if ``state`` diverges."""
    nz = Normalizer(lts)
    mask = state.mask
    if nz.diverges(mask):
        return BLOCKED
    idx = _action(lts, a)
    if idx is None:
        return NormState(())
    return nz.norm_state(nz.successor(mask, idx))


def reachable_fragment(lts: Lts, fdr: bool = False) -> dict[NormState, dict[str, NormState]]:
    """Debug dump of the reachable part of ``norm(lts)`` (or ``norm_fdr``)."""
    nz = Normalizer(lts)
    visible = [a for a in range(1, len(lts.labels))]
    start = nz.initial()
    seen = {start}
    order = [start]
    edges: dict[int, dict[int, int]] = {}
    i = 0
    while i < len(order):
        m = order[i]
        i += 1
        edges[m] = {}
        if fdr and nz.diverges(m):
            continue
        for a in visible:
            n = nz.successor(m, a)
            edges[m][a] = n
            if n not in seen:
                seen.add(n)
                order.append(n)
    return {nz.norm_state(m): {lts.labels[a]: nz.norm_state(n) for a, n in out.items()}
            for m, out in edges.items()}
