"""Antichain-based refinement checking on the product of a normal form and an implementation.

Two families of algorithms share one exploration loop:

* ``improved``: the initial pair is put in the antichain up front and every
  successor that is not yet covered is inserted and pushed in one step;
* ``legacy``: the antichain is updated when a pair is popped and successors
  are pushed whenever they are not covered, without deduplication.  The legacy
  failures-divergences check is known to be unsound and must be requested
  explicitly.
"""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

from .antichain import Antichain, ProductPair
from .lts import TAU, Lts, from_mask, iter_mask, mark_divergent
from .normalization import NormState, Normalizer

RELATION_ALIASES = {
    "tr": "tr", "trace": "tr", "traces": "tr",
    "sfr": "sfr", "stable-failures": "sfr", "failures": "sfr",
    "fdr": "fdr", "failures-divergences": "fdr",
}
STRATEGY_ALIASES = {"df": "df", "depth-first": "df", "bf": "bf", "breadth-first": "bf"}
VARIANTS = ("improved", "legacy")

EMPTY_SPEC = "empty-spec"
REFUSAL = "refusal"
DIVERGENCE = "divergence"


class UnsoundConfigError(ValueError):
    pass


@dataclass
class Metrics:
    working_max: int = 0
    antichain_hits: int = 0
    antichain_misses: int = 0
    antichain_max: int = 0
    pairs_done: int = 0

    @property
    def membership_tests(self) -> int:
        return self.antichain_hits + self.antichain_misses

    def as_dict(self) -> dict:
        return {
            "working_max": self.working_max,
            "antichain_hits": self.antichain_hits,
            "antichain_misses": self.antichain_misses,
            "antichain_max": self.antichain_max,
            "pairs_done": self.pairs_done,
        }


class BudgetExceeded(RuntimeError):
    """The exploration pushed more pairs than allowed, or ran out of time."""

    def __init__(self, message: str, metrics: Metrics):
        super().__init__(message)
        self.metrics = metrics


@dataclass(frozen=True)
class Verdict:
    refines: bool
    witness_kind: str | None = None
    counterexample: tuple[str, ...] | None = None
    metrics: Metrics = field(default_factory=Metrics, compare=False)
    # full product path to the witness, τ-steps included
    path: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.refines != (self.witness_kind is None and self.counterexample is None):
            raise ValueError("a verdict carries a witness exactly when refinement fails")


@dataclass(frozen=True)
class ExplorationConfig:
    relation: str = "tr"
    strategy: str = "df"
    variant: str = "improved"
    invariant_checks: bool = False
    allow_unsound: bool = False
    node_budget: int | None = None
    time_budget: float | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "relation", RELATION_ALIASES[self.relation])
        except KeyError:
            raise ValueError(f"unknown relation {self.relation!r}") from None
        try:
            object.__setattr__(self, "strategy", STRATEGY_ALIASES[self.strategy])
        except KeyError:
            raise ValueError(f"unknown strategy {self.strategy!r}") from None
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "legacy" and self.relation == "fdr" and not self.allow_unsound:
            raise UnsoundConfigError(
                "the legacy failures-divergences algorithm is unsound (it can report "
                "non-refinement for a diverging specification and checks divergence in "
                "the wrong order); pass allow_unsound=True to run it anyway")


def _stable_reach(lts: Lts, start: int) -> list[int]:
    """Stable states τ-reachable from ``start`` (depth-first)."""
    seen = {start}
    stack = [start]
    found = []
    while stack:
        s = stack.pop()
        taus = lts.successors(s, TAU)
        if not taus:
            found.append(s)
        for t in taus:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return found


def refusals_included(impl_state: int, spec_state: NormState, spec: Lts, impl: Lts) -> bool:
    """``refusals(impl_state) ⊆ refusals(U)`` for a stable ``impl_state``.

    Holds iff some stable ``t`` in ``U`` enables only actions that
    ``impl_state`` also enables (labels are compared by name).
    """
    en = impl.enabled_labels(impl_state)
    return any(TAU not in spec.enabled(t) and spec.enabled_labels(t) <= en
               for t in spec_state.states)


class _Session:
    """Mutable state of one check."""

    def __init__(self, spec: Lts, impl: Lts, config: ExplorationConfig, hook=None):
        self.spec, self.impl, self.config = spec, impl, config
        self.norm = Normalizer(spec)
        self.impl_div = mark_divergent(impl).diverging
        self.hook = hook

        bits: dict[str, int] = {}
        for label in sorted(spec.act | impl.act):
            bits[label] = 1 << len(bits)
        self.en_impl = [sum(bits[impl.labels[a]] for a in impl.enabled(s) if a != TAU)
                        for s in range(impl.num_states)]
        self.en_spec = [sum(bits[spec.labels[a]] for a in spec.enabled(t) if a != TAU)
                        for t in range(spec.num_states)]
        self.spec_stable = sum(1 << t for t in range(spec.num_states) if TAU not in spec.enabled(t))
        self.impl_stable = [TAU not in impl.enabled(s) for s in range(impl.num_states)]
        # impl action index -> spec action index (None if the spec lacks the label)
        self.amap = [None if a == TAU else spec.action_or_none(label)
                     for a, label in enumerate(impl.labels)]

        self.metrics = Metrics()
        self.antichain = Antichain()
        self.parents: dict[tuple[int, int], tuple | None] = {}
        self.pushes = 0

    # -- witness checks

    def refusal_ok(self, u: int, s: int) -> bool:
        allowed = self.en_impl[s]
        en_spec = self.en_spec
        for t in iter_mask(u & self.spec_stable):
            if en_spec[t] & ~allowed == 0:
                return True
        return False

    def legacy_refusal_ok(self, u: int, s: int) -> bool:
        """Refusal inclusion with refusals of unstable states taken from the
        stable states they reach, searched afresh on every call."""
        spec, impl = self.spec, self.impl
        spec_stables = set()
        for t in iter_mask(u):
            spec_stables.update(_stable_reach(spec, t))
        for s2 in _stable_reach(impl, s):
            allowed = self.en_impl[s2]
            if not any(self.en_spec[t] & ~allowed == 0 for t in spec_stables):
                return False
        return True

    def successor(self, u: int, a: int) -> int:
        if a == TAU:
            return u
        b = self.amap[a]
        return 0 if b is None else self.norm.successor(u, b)

    # -- bookkeeping

    def path_to(self, key, last=None) -> tuple[str, ...]:
        steps = []
        if last is not None:
            steps.append(last)
        node = self.parents.get(key)
        while node is not None:
            key, a = node
            steps.append(a)
            node = self.parents.get(key)
        labels = self.impl.labels
        return tuple(labels[a] for a in reversed(steps))

    def fail(self, kind: str, key, last=None) -> Verdict:
        path = self.path_to(key, last)
        visible = tuple(x for x in path if x != self.impl.labels[TAU])
        return Verdict(False, kind, visible, self.metrics, path)

    def push(self, working, key, parent):
        self.pushes += 1
        budget = self.config.node_budget
        if budget is not None and self.pushes > budget:
            raise BudgetExceeded(f"node budget of {budget} pairs exceeded", self.metrics)
        working.append(key)
        self.parents.setdefault(key, parent)
        if len(working) > self.metrics.working_max:
            self.metrics.working_max = len(working)

    def note_antichain(self):
        if self.antichain.size > self.metrics.antichain_max:
            self.metrics.antichain_max = self.antichain.size

    # -- main loops

    def run(self) -> Verdict:
        if self.config.variant == "improved":
            return self.run_improved()
        return self.run_legacy()

    def _deadline(self):
        tb = self.config.time_budget
        return None if tb is None else time.perf_counter() + tb

    def run_improved(self) -> Verdict:
        relation = self.config.relation
        bf = self.config.strategy == "bf"
        fdr, sfr = relation == "fdr", relation == "sfr"
        norm, impl, metrics, antichain = self.norm, self.impl, self.metrics, self.antichain
        impl_out, impl_div, impl_stable = impl.out, self.impl_div, self.impl_stable
        div_mask = norm.div_mask
        hook = self.hook
        deadline = self._deadline()

        working = deque() if bf else []
        pop = working.popleft if bf else working.pop
        root = (norm.initial(), impl.initial)
        antichain.insert_mask(*root)
        self.note_antichain()
        self.parents[root] = None
        self.push(working, root, None)
        done = set() if hook is not None else None

        while working:
            key = pop()
            u, s = key
            metrics.pairs_done += 1
            if deadline is not None and metrics.pairs_done & 1023 == 0 and time.perf_counter() > deadline:
                raise BudgetExceeded("time budget exceeded", metrics)
            if bf and u == 0:
                # checked on pop under BF so that the first witness found is a nearest one
                return self.fail(EMPTY_SPEC, key)
            if not (fdr and u & div_mask):
                if fdr and impl_div[s]:
                    return self.fail(DIVERGENCE, key)
                if (fdr or sfr) and impl_stable[s] and not self.refusal_ok(u, s):
                    return self.fail(REFUSAL, key)
                for a, t in impl_out[s]:
                    u2 = self.successor(u, a)
                    if u2 == 0 and not bf:
                        return self.fail(EMPTY_SPEC, key, a)
                    if antichain.member_mask(u2, t):
                        metrics.antichain_hits += 1
                    else:
                        metrics.antichain_misses += 1
                        antichain.insert_mask(u2, t)
                        self.note_antichain()
                        self.push(working, (u2, t), (key, a))
            if hook is not None:
                done.add(key)
                hook(self, working, done)
        return Verdict(True, metrics=metrics)

    def run_legacy(self) -> Verdict:
        relation = self.config.relation
        bf = self.config.strategy == "bf"
        fdr, sfr = relation == "fdr", relation == "sfr"
        norm, impl, metrics, antichain = self.norm, self.impl, self.metrics, self.antichain
        impl_out, impl_div = impl.out, self.impl_div
        div_mask = norm.div_mask
        hook = self.hook
        deadline = self._deadline()

        working = deque() if bf else []
        pop = working.popleft if bf else working.pop
        root = (norm.initial(), impl.initial)
        self.parents[root] = None
        self.push(working, root, None)
        done = set() if hook is not None else None

        while working:
            key = pop()
            u, s = key
            metrics.pairs_done += 1
            if deadline is not None and metrics.pairs_done & 1023 == 0 and time.perf_counter() > deadline:
                raise BudgetExceeded("time budget exceeded", metrics)
            antichain.add_raw(u, s)
            self.note_antichain()
            expand = True
            if fdr and impl_div[s]:
                if not u & div_mask:
                    return self.fail(DIVERGENCE, key)
                expand = False
            elif (fdr or sfr) and not self.legacy_refusal_ok(u, s):
                return self.fail(REFUSAL, key)
            if expand:
                for a, t in impl_out[s]:
                    u2 = self.successor(u, a)
                    if u2 == 0:
                        return self.fail(EMPTY_SPEC, key, a)
                    if antichain.member_mask(u2, t):
                        metrics.antichain_hits += 1
                    else:
                        metrics.antichain_misses += 1
                        self.push(working, (u2, t), (key, a))
            if hook is not None:
                done.add(key)
                hook(self, working, done)
        return Verdict(True, metrics=metrics)


def _config(config: ExplorationConfig | None, overrides) -> ExplorationConfig:
    if config is None:
        return ExplorationConfig(**overrides)
    if overrides:
        fields = {**config.__dict__, **overrides}
        return ExplorationConfig(**fields)
    return config


def refines(spec: Lts, impl: Lts, config: ExplorationConfig | None = None, **overrides) -> Verdict:
    """Check ``spec ⊑ impl``; keyword overrides build or adjust the config."""
    return _Session(spec, impl, _config(config, overrides)).run()


def refines_improved(spec: Lts, impl: Lts, config: ExplorationConfig | None = None,
                     **overrides) -> Verdict:
    cfg = _config(config, {**overrides, "variant": "improved"})
    return _Session(spec, impl, cfg).run()


def refines_legacy(spec: Lts, impl: Lts, config: ExplorationConfig | None = None,
                   **overrides) -> Verdict:
    cfg = _config(config, {**overrides, "variant": "legacy"})
    return _Session(spec, impl, cfg).run()


# -- instrumentation ----------------------------------------------------------------

@dataclass
class InstrumentationLog:
    entries: list[dict] = field(default_factory=list)
    final_antichain: list[ProductPair] = field(default_factory=list)

    @property
    def violations(self) -> list[tuple[int, str]]:
        return [(e["iteration"], v) for e in self.entries for v in e["violations"]]


def _check_invariants(session: _Session, working, done) -> list[str]:
    antichain = session.antichain
    out = []
    if not all(antichain.member_mask(u, s) for u, s in working):
        out.append("working not covered by antichain")
    if not all(antichain.member_mask(u, s) for u, s in done):
        out.append("done not covered by antichain")
    if len(set(working)) != len(working):
        out.append("duplicate pairs in working")
    if not done.isdisjoint(working):
        out.append("done and working overlap")
    if not antichain.is_proper():
        out.append("antichain not proper")
    return out


def run_with_instrumentation(spec: Lts, impl: Lts, config: ExplorationConfig | None = None,
                             strict: bool = False, **overrides) -> tuple[Verdict, InstrumentationLog]:
    """Run a check, evaluating the exploration invariants after every iteration.

    Violations are recorded rather than raised.  With ``strict`` set, an
    improved variant raises ``AssertionError`` on the first violation instead;
    legacy variants are never strict, since they are expected to break the
    invariants.
    """
    cfg = _config(config, {**overrides, "invariant_checks": True})
    log = InstrumentationLog()
    strict = strict and cfg.variant == "improved"

    def hook(session, working, done):
        violations = _check_invariants(session, working, done)
        log.entries.append({
            "iteration": len(log.entries) + 1,
            "working_size": len(working),
            "antichain_size": session.antichain.size,
            "violations": violations,
        })
        if strict and violations:
            raise AssertionError(f"invariant violated at iteration {len(log.entries)}: {violations}")

    session = _Session(spec, impl, cfg, hook)
    verdict = session.run()
    log.final_antichain = [ProductPair(NormState(from_mask(u), session.norm.diverges(u)), s)
                           for u, s in session.antichain.masks()]
    return verdict, log
