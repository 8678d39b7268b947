"""Minimisation modulo divergence-preserving branching bisimulation.

Plain signature refinement: start from the split into diverging and
non-diverging states, then repeatedly split blocks by branching signatures
until nothing changes.  Quadratic per round, which is fine for inputs small
enough to be checked by the antichain engine in Python anyway.
"""
from __future__ import annotations

from dataclasses import dataclass

from .lts import TAU, Lts, mark_divergent

# pseudo-action marking an infinite τ-path that stays inside the state's block
_INERT_DIVERGENCE = -1


@dataclass(frozen=True)
class Partition:
    block_of: tuple[int, ...]
    num_blocks: int

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for s, b in enumerate(self.block_of):
            out[b].append(s)
        return out


def _renumber(keys) -> tuple[tuple[int, ...], int]:
    """Block ids in order of each block's smallest state."""
    ids: dict = {}
    block_of = []
    for k in keys:
        if k not in ids:
            ids[k] = len(ids)
        block_of.append(ids[k])
    return tuple(block_of), len(ids)


def _inert_divergent(lts: Lts, block_of) -> list[bool]:
    """States with an infinite τ-path inside their own block."""
    n = lts.num_states
    inert = [[t for a, t in lts.out[s] if a == TAU and block_of[t] == block_of[s]]
             for s in range(n)]
    alive = [True] * n
    changed = True
    # greatest fixpoint: keep states with an inert τ-successor that is kept
    while changed:
        changed = False
        for s in range(n):
            if alive[s] and not any(alive[t] for t in inert[s]):
                alive[s] = False
                changed = True
    return alive


def _signatures(lts: Lts, block_of) -> list[frozenset]:
    n = lts.num_states
    inert_div = _inert_divergent(lts, block_of)
    sigs = []
    for s in range(n):
        b = block_of[s]
        seen = {s}
        stack = [s]
        sig = set()
        while stack:
            x = stack.pop()
            for a, t in lts.out[x]:
                bt = block_of[t]
                if a == TAU and bt == b:
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
                else:
                    sig.add((a, bt))
        if inert_div[s]:
            sig.add((_INERT_DIVERGENCE, b))
        sigs.append(frozenset(sig))
    return sigs


def dpbb_partition(lts: Lts) -> Partition:
    div = mark_divergent(lts)
    block_of, count = _renumber(div.diverging)
    while True:
        sigs = _signatures(lts, block_of)
        new_block_of, new_count = _renumber(zip(block_of, sigs))
        if new_count == count:
            return Partition(new_block_of, new_count)
        block_of, count = new_block_of, new_count


def quotient(lts: Lts, p: Partition) -> Lts:
    """One state per block; τ-loops on a block survive only if it diverges."""
    div = mark_divergent(lts)
    diverging_block = [False] * p.num_blocks
    for s, b in enumerate(p.block_of):
        if div[s]:
            diverging_block[b] = True
    seen = set()
    trans = []
    for s, a, t in lts.transitions:
        edge = (p.block_of[s], a, p.block_of[t])
        if a == TAU and edge[0] == edge[2] and not diverging_block[edge[0]]:
            continue
        if edge not in seen:
            seen.add(edge)
            trans.append(edge)
    return Lts(p.num_blocks, p.block_of[lts.initial], lts.labels, trans)


def minimise(lts: Lts) -> Lts:
    return quotient(lts, dpbb_partition(lts))
