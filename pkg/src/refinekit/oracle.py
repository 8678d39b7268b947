"""A deliberately naive semantic oracle.

Everything here works directly from the definitions on explicit sets of
visible-action sequences (tuples of labels) and frozensets of states.  It
shares no code with the exploration engine beyond the ``Lts`` container, so
that the two can be cross-checked.  Only use it on small inputs.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from itertools import product as cartesian

from .lts import TAU, Lts

ORACLE_BUDGET = 100_000

RELATIONS = ("tr", "sfr", "fdr")


class OracleTooLarge(ValueError):
    """The instance exceeds the oracle's state budget."""


# -- naive building blocks -----------------------------------------------------

def _tau_succ(lts: Lts, s: int):
    return [t for a, t in lts.out[s] if a == TAU]


def _closure(lts: Lts, states) -> frozenset:
    seen = set(states)
    frontier = list(seen)
    while frontier:
        nxt = []
        for s in frontier:
            for t in _tau_succ(lts, s):
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return frozenset(seen)


def _after(lts: Lts, states: frozenset, label: str) -> frozenset:
    direct = {t for s in states for a, t in lts.out[s]
              if a != TAU and lts.labels[a] == label}
    return _closure(lts, direct)


def naive_divergent(lts: Lts) -> frozenset:
    """States with a τ-path of length ``num_states`` (hence an infinite one)."""
    alive = set(range(lts.num_states))
    for _ in range(lts.num_states):
        alive = {s for s in alive if any(t in alive for t in _tau_succ(lts, s))}
    return frozenset(alive)


def _stable(lts: Lts, s: int) -> bool:
    return not _tau_succ(lts, s)


def _enabled_visible(lts: Lts, s: int) -> frozenset:
    return frozenset(lts.labels[a] for a, _ in lts.out[s] if a != TAU)


def _max_refusals(lts: Lts, states, alphabet: frozenset) -> set:
    return {alphabet - _enabled_visible(lts, s) for s in states if _stable(lts, s)}


def _maximal(sets) -> frozenset:
    sets = set(sets)
    return frozenset(x for x in sets if not any(x < y for y in sets))


# -- observations ----------------------------------------------------------------

@dataclass(frozen=True)
class Observation:
    """Bounded observations of an LTS.

    Refusals are stored by their maximal elements only: ``failures`` holds
    ``(trace, X)`` where ``X`` is maximal among the refusals after ``trace``.
    ``divergences`` and ``failures_bottom`` are derived from the stored fields,
    so equality compares ``weaktraces``, ``min_divergences`` and ``failures``
    (plus the bound and alphabet they were computed for).
    """

    bound: int
    alphabet: frozenset
    weaktraces: frozenset
    min_divergences: frozenset
    failures: frozenset
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def divergences(self) -> frozenset:
        """Every extension, up to the bound, of a minimal divergence."""
        if "div" not in self._cache:
            letters = sorted(self.alphabet)
            out = set()
            for rho in self.min_divergences:
                for n in range(self.bound - len(rho) + 1):
                    for sigma in cartesian(letters, repeat=n):
                        out.add(rho + sigma)
            self._cache["div"] = frozenset(out)
        return self._cache["div"]

    @property
    def failures_bottom(self) -> frozenset:
        if "fbot" not in self._cache:
            full = self.alphabet
            out = {(rho, x) for rho, x in self.failures if not self.is_divergence(rho)}
            out |= {(rho, full) for rho in self.divergences}
            self._cache["fbot"] = frozenset(out)
        return self._cache["fbot"]

    def is_divergence(self, trace) -> bool:
        trace = tuple(trace)
        return any(trace[:n] in self.min_divergences for n in range(len(trace) + 1))

    def has_failure(self, trace, refusal) -> bool:
        """Downward-closed membership: is ``(trace, refusal)`` a stable failure?"""
        trace, refusal = tuple(trace), frozenset(refusal)
        return any(rho == trace and refusal <= x for rho, x in self.failures)

    def has_failure_bottom(self, trace, refusal) -> bool:
        trace = tuple(trace)
        if len(trace) <= self.bound and self.is_divergence(trace):
            return frozenset(refusal) <= self.alphabet
        return self.has_failure(trace, refusal)


def observe(lts: Lts, bound: int, alphabet=None) -> Observation:
    """Enumerate weak traces, minimal divergences and maximal failures up to ``bound``."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    alphabet = frozenset(lts.act if alphabet is None else alphabet)
    letters = sorted(alphabet)
    div = naive_divergent(lts)
    traces, min_div, failures = set(), set(), set()
    # per-set results are cached: many traces share a state set
    after_cache: dict = {}
    refusal_cache: dict = {}
    # one layer per trace length; each trace determines a unique τ-closed set
    layer = [((), _closure(lts, [lts.initial]), False)]
    for depth in range(bound + 1):
        nxt = []
        for rho, states, div_seen in layer:
            traces.add(rho)
            here = bool(states & div)
            if here and not div_seen:
                min_div.add(rho)
            if states not in refusal_cache:
                refusal_cache[states] = _maximal(_max_refusals(lts, states, alphabet))
            for x in refusal_cache[states]:
                failures.add((rho, x))
            if depth == bound:
                continue
            for a in letters:
                if (states, a) not in after_cache:
                    after_cache[states, a] = _after(lts, states, a)
                succ = after_cache[states, a]
                if succ:
                    nxt.append((rho + (a,), succ, div_seen or here))
        layer = nxt
    return Observation(bound, alphabet, frozenset(traces), frozenset(min_div), frozenset(failures))


# -- refinement --------------------------------------------------------------------

def _check_budget(spec: Lts, impl: Lts, budget: int) -> int:
    size = 2 ** spec.num_states * impl.num_states
    if size > budget:
        raise OracleTooLarge(f"oracle too large: 2^{spec.num_states} * {impl.num_states} = {size} "
                             f"exceeds budget {budget}")
    return size


def _class_ok(relation, spec, impl, alphabet, u, u_div, v, v_div) -> bool:
    """Inclusion checks for one trace ρ with spec set ``u`` and impl set ``v``.

    ``*_div`` records whether some prefix of ρ (ρ included) is a divergence.
    """
    if relation == "fdr":
        # a spec divergence admits everything; an impl divergence then needs one
        if u_div:
            return True
        if v_div:
            return False
        spec_refusals = _max_refusals(spec, u, alphabet)
        return all(any(x <= y for y in spec_refusals)
                   for x in _max_refusals(impl, v, alphabet))
    if v and not u:
        return False
    if relation == "sfr":
        spec_refusals = _max_refusals(spec, u, alphabet)
        return all(any(x <= y for y in spec_refusals)
                   for x in _max_refusals(impl, v, alphabet))
    return True


def oracle_refines(spec: Lts, impl: Lts, relation: str, budget: int = ORACLE_BUDGET) -> bool:
    """Decide ``spec ⊑ impl`` for ``relation`` by definitional set inclusion.

    All traces up to length B = 2^|S_spec|·|S_impl| + 1 are examined layer by
    layer.  Traces that lead to the same (spec set, spec divergence seen, impl
    set, impl divergence seen) have identical futures, so each such class is
    expanded once; the search may therefore stop before reaching B.
    """
    if relation not in RELATIONS:
        raise ValueError(f"unknown relation {relation!r}")
    bound = _check_budget(spec, impl, budget) + 1
    alphabet = spec.act | impl.act
    letters = sorted(alphabet)
    sdiv, idiv = naive_divergent(spec), naive_divergent(impl)

    u0 = _closure(spec, [spec.initial])
    v0 = _closure(impl, [impl.initial])
    start = (u0, bool(u0 & sdiv), v0, bool(v0 & idiv))
    seen = {start}
    layer = [start]
    for depth in range(bound + 1):
        if not layer:
            break
        nxt = []
        for u, u_div, v, v_div in layer:
            if not _class_ok(relation, spec, impl, alphabet, u, u_div, v, v_div):
                return False
            if depth == bound:
                continue
            if not v and not v_div:
                continue
            for a in letters:
                u2, v2 = _after(spec, u, a), _after(impl, v, a)
                if not v2 and not v_div:
                    continue
                key = (u2, u_div or bool(u2 & sdiv), v2, v_div or bool(v2 & idiv))
                if key not in seen:
                    seen.add(key)
                    nxt.append(key)
        layer = nxt
    return True


# -- witness distance ----------------------------------------------------------------

@dataclass(frozen=True)
class WitnessDistance:
    """Distance from the initial product pair to the nearest witness.

    ``value`` counts every product step, implementation τ-steps included;
    ``visible`` counts visible actions only (the length of the shortest
    counterexample trace).  Both are ``math.inf`` when no witness is reachable.
    """

    value: float
    visible: float = math.inf

    @property
    def finite(self) -> bool:
        return self.value != math.inf

    def __int__(self):
        return int(self.value)


def _is_witness(relation, spec, impl, alphabet, sdiv, idiv, u, s) -> bool:
    if relation == "fdr" and u & sdiv:
        return False
    if not u:
        return True
    if relation == "tr":
        return False
    if relation == "fdr" and s in idiv:
        return True
    if not _stable(impl, s):
        return False
    x = alphabet - _enabled_visible(impl, s)
    return not any(x <= y for y in _max_refusals(spec, u, alphabet))


def _product_moves(relation, spec, impl, sdiv, u, s):
    for a, t in impl.out[s]:
        if a == TAU:
            yield True, (u, t)
        elif not (relation == "fdr" and u & sdiv):
            yield False, (_after(spec, u, impl.labels[a]), t)


def shortest_witness_distance(spec: Lts, impl: Lts, relation: str,
                              budget: int = ORACLE_BUDGET) -> WitnessDistance:
    """Search the whole product of the (fdr) normal form with ``impl``.

    A plain BFS gives the step distance; a second 0-1 BFS, where τ-steps are
    free, gives the visible distance.
    """
    if relation not in RELATIONS:
        raise ValueError(f"unknown relation {relation!r}")
    _check_budget(spec, impl, budget)
    alphabet = spec.act | impl.act
    sdiv, idiv = naive_divergent(spec), naive_divergent(impl)
    start = (_closure(spec, [spec.initial]), impl.initial)

    def witness(node):
        return _is_witness(relation, spec, impl, alphabet, sdiv, idiv, *node)

    steps = math.inf
    dist = {start: 0}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if witness(node):
            steps = dist[node]
            break
        for _, nxt in _product_moves(relation, spec, impl, sdiv, *node):
            if nxt not in dist:
                dist[nxt] = dist[node] + 1
                queue.append(nxt)

    visible = math.inf
    best = {start: 0}
    queue = deque([(0, start)])
    while queue:
        d, node = queue.popleft()
        if d > best[node]:
            continue
        if witness(node):
            visible = d
            break
        for silent, nxt in _product_moves(relation, spec, impl, sdiv, *node):
            nd = d if silent else d + 1
            if nd < best.get(nxt, math.inf):
                best[nxt] = nd
                if silent:
                    queue.appendleft((nd, nxt))
                else:
                    queue.append((nd, nxt))
    return WitnessDistance(steps, visible)
