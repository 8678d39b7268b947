"""Labelled transition systems: representation, `.aut` I/O and basic queries.

States are integers ``0 .. num_states - 1``.  Actions are integers indexing
``Lts.labels``; index ``TAU`` (0) is always the internal action, every other
index is a visible action.  Sets of states are handled in two forms:

* the canonical public form, a sorted duplicate-free tuple (``StateSet``);
* a dense bitset (a Python ``int``) used on hot paths.  ``to_mask`` and
  ``from_mask`` convert between the two.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

TAU = 0
DEFAULT_TAU = "tau"
TAU_ALIASES = ("i",)

StateSet = tuple


class ParseError(ValueError):
    """Raised for malformed `.aut` input; carries the offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def to_mask(states: Iterable[int]) -> int:
    mask = 0
    for s in states:
        mask |= 1 << s
    return mask


def from_mask(mask: int) -> StateSet:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def iter_mask(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def canonical(states: Iterable[int]) -> StateSet:
    return tuple(sorted(set(states)))


class Lts:
    """An immutable, indexed finite LTS.

    ``transitions`` keeps declaration order, which fixes the order in which
    successors are generated during exploration.
    """

    __slots__ = ("num_states", "initial", "labels", "transitions", "out",
                 "_succ", "_label_index", "_enabled")

    def __init__(self, num_states: int, initial: int, labels: Sequence[str],
                 transitions: Iterable[tuple[int, int, int]]):
        if num_states < 1:
            raise ValueError("an LTS needs at least one state")
        if not 0 <= initial < num_states:
            raise ValueError(f"initial state {initial} out of range")
        labels = tuple(labels)
        if not labels:
            raise ValueError("label table must contain the internal action")
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate labels in label table")
        trans = tuple((int(s), int(a), int(t)) for s, a, t in transitions)
        out: list[list[tuple[int, int]]] = [[] for _ in range(num_states)]
        succ: dict[tuple[int, int], list[int]] = {}
        for s, a, t in trans:
            if not (0 <= s < num_states and 0 <= t < num_states):
                raise ValueError(f"transition ({s},{a},{t}) has an endpoint out of range")
            if not 0 <= a < len(labels):
                raise ValueError(f"transition ({s},{a},{t}) has an unknown action")
            out[s].append((a, t))
            succ.setdefault((s, a), []).append(t)
        self.num_states = num_states
        self.initial = initial
        self.labels = labels
        self.transitions = trans
        self.out = tuple(tuple(o) for o in out)
        self._succ = {k: tuple(v) for k, v in succ.items()}
        self._label_index = {name: i for i, name in enumerate(labels)}
        self._enabled = tuple(frozenset(a for a, _ in o) for o in self.out)

    @property
    def tau_label(self) -> str:
        return self.labels[TAU]

    @property
    def act(self) -> frozenset[str]:
        """The visible alphabet: every label except the internal one."""
        return frozenset(self.labels[1:])

    @property
    def num_transitions(self) -> int:
        return len(self.transitions)

    def action(self, label: str) -> int:
        """Index of ``label``; raises KeyError when absent."""
        return self._label_index[label]

    def action_or_none(self, label: str) -> int | None:
        return self._label_index.get(label)

    def successors(self, s: int, a: int) -> tuple[int, ...]:
        return self._succ.get((s, a), ())

    def enabled(self, s: int) -> frozenset[int]:
        return self._enabled[s]

    def enabled_labels(self, s: int) -> frozenset[str]:
        """Visible labels enabled in ``s`` (τ excluded)."""
        return frozenset(self.labels[a] for a in self._enabled[s] if a != TAU)

    def __eq__(self, other):
        if not isinstance(other, Lts):
            return NotImplemented
        return (self.num_states == other.num_states and self.initial == other.initial
                and self.labels == other.labels and self.transitions == other.transitions)

    def __hash__(self):
        return hash((self.num_states, self.initial, self.labels, self.transitions))

    def __repr__(self):
        return (f"Lts(num_states={self.num_states}, initial={self.initial}, "
                f"num_transitions={self.num_transitions}, act={sorted(self.act)})")


def build_lts(num_states: int, initial: int, transitions: Iterable[tuple[int, str, int]],
              tau: str = DEFAULT_TAU) -> Lts:
    """Build an Lts from ``(src, label, dst)`` triples; ``tau`` names the internal action."""
    labels = [tau]
    index = {tau: TAU}
    for alias in TAU_ALIASES:
        index.setdefault(alias, TAU)
    trans = []
    for s, label, t in transitions:
        a = index.get(label)
        if a is None:
            a = index[label] = len(labels)
            labels.append(label)
        trans.append((s, a, t))
    return Lts(num_states, initial, labels, trans)


# -- Aldebaran format ------------------------------------------------------

def _parse_int(text: str, line: int, what: str) -> int:
    text = text.strip()
    try:
        value = int(text)
    except ValueError:
        raise ParseError(line, f"expected an integer {what}, got {text!r}") from None
    if value < 0:
        raise ParseError(line, f"negative {what} {value}")
    return value


def _unquote(label: str) -> str:
    label = label.strip()
    if len(label) >= 2 and label[0] == '"' and label[-1] == '"':
        return label[1:-1].replace('\\"', '"').replace("\\\\", "\\")
    return label


def parse_aut(text: str, tau: str = DEFAULT_TAU) -> Lts:
    """Parse Aldebaran text.

    The header is ``des (initial, num_transitions, num_states)``; each further
    non-blank line is ``(from, "label", to)`` or ``(from, label, to)``.  Labels
    equal to ``tau`` or to one of ``TAU_ALIASES`` denote the internal action.
    """
    lines = text.splitlines()
    header_no = None
    for no, raw in enumerate(lines, start=1):
        if raw.strip():
            header_no = no
            break
    if header_no is None:
        raise ParseError(1, "empty input, expected 'des' header")
    header = lines[header_no - 1].strip()
    if not header.startswith("des"):
        raise ParseError(header_no, "expected header 'des (<initial>,<num_transitions>,<num_states>)'")
    body = header[3:].strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ParseError(header_no, "malformed 'des' header")
    parts = body[1:-1].split(",")
    if len(parts) != 3:
        raise ParseError(header_no, "'des' header needs exactly three fields")
    initial = _parse_int(parts[0], header_no, "initial state")
    num_trans = _parse_int(parts[1], header_no, "transition count")
    num_states = _parse_int(parts[2], header_no, "state count")
    if num_states < 1:
        raise ParseError(header_no, "state count must be positive")
    if initial >= num_states:
        raise ParseError(header_no, f"initial state {initial} out of range (num_states={num_states})")

    triples = []
    for no in range(header_no + 1, len(lines) + 1):
        raw = lines[no - 1].strip()
        if not raw:
            continue
        if not (raw.startswith("(") and raw.endswith(")")):
            raise ParseError(no, f"malformed transition {raw!r}")
        inner = raw[1:-1]
        first = inner.find(",")
        last = inner.rfind(",")
        if first < 0 or first == last:
            raise ParseError(no, f"malformed transition {raw!r}")
        src = _parse_int(inner[:first], no, "source state")
        dst = _parse_int(inner[last + 1:], no, "target state")
        label = _unquote(inner[first + 1:last])
        if not label:
            raise ParseError(no, "empty action label")
        for s in (src, dst):
            if s >= num_states:
                raise ParseError(no, f"state {s} out of range (num_states={num_states})")
        triples.append((src, label, dst))
    if len(triples) != num_trans:
        raise ParseError(header_no, f"header declares {num_trans} transitions, found {len(triples)}")
    return build_lts(num_states, initial, triples, tau=tau)


def read_aut(path, tau: str = DEFAULT_TAU) -> Lts:
    with open(path, encoding="utf-8") as fh:
        return parse_aut(fh.read(), tau=tau)


def write_aut(lts: Lts) -> str:
    rows = [f"des ({lts.initial},{lts.num_transitions},{lts.num_states})"]
    for s, a, t in lts.transitions:
        label = lts.labels[a].replace("\\", "\\\\").replace('"', '\\"')
        rows.append(f'({s},"{label}",{t})')
    return "\n".join(rows) + "\n"


# -- semantic queries ---------------------------------------------------------

def enabled(lts: Lts, s: int) -> frozenset[int]:
    """Action indices labelling an outgoing transition of ``s`` (τ included)."""
    return lts.enabled(s)


def is_stable(lts: Lts, s: int) -> bool:
    return TAU not in lts.enabled(s)


def tau_closure(lts: Lts, states: Iterable[int]) -> StateSet:
    """Every state reachable from ``states`` by zero or more τ-steps."""
    seen = set(states)
    stack = list(seen)
    while stack:
        s = stack.pop()
        for t in lts.successors(s, TAU):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return canonical(seen)


def weak_step(lts: Lts, states: Iterable[int], a: int | str) -> StateSet:
    """``{t | s ⇒a t for some s in states}``; ``states`` must be τ-closed.

    ``a`` may be a visible action index or label; an unknown label yields ``()``.
    """
    if isinstance(a, str):
        a = lts.action_or_none(a)
        if a is None:
            return ()
    if a == TAU:
        raise ValueError("weak_step is defined for visible actions only")
    direct = {t for s in states for t in lts.successors(s, a)}
    return tau_closure(lts, direct)


def tau_closure_masks(lts: Lts) -> tuple[int, ...]:
    """Per-state τ-closure as bitsets."""
    closures = []
    for s in range(lts.num_states):
        closures.append(to_mask(tau_closure(lts, (s,))))
    return tuple(closures)


@dataclass(frozen=True)
class DivergenceMarking:
    diverging: tuple[bool, ...]

    def __getitem__(self, s: int) -> bool:
        return self.diverging[s]

    @property
    def mask(self) -> int:
        return to_mask(s for s, d in enumerate(self.diverging) if d)


def tau_sccs(lts: Lts) -> list[list[int]]:
    """Strongly connected components of the τ-subgraph (iterative Tarjan)."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    components = []
    counter = 0
    for root in range(lts.num_states):
        if root in index:
            continue
        work = [(root, iter(lts.successors(root, TAU)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(lts.successors(w, TAU))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
    return components


def mark_divergent(lts: Lts) -> DivergenceMarking:
    """Mark states that can perform an infinite sequence of τ-steps.

    A state diverges iff it can reach, by τ-steps only, a τ-SCC that contains a
    cycle (a self-loop counts).
    """
    diverging = [False] * lts.num_states
    for comp in tau_sccs(lts):
        if len(comp) > 1 or comp[0] in lts.successors(comp[0], TAU):
            for s in comp:
                diverging[s] = True
    predecessors: list[list[int]] = [[] for _ in range(lts.num_states)]
    for s, a, t in lts.transitions:
        if a == TAU:
            predecessors[t].append(s)
    stack = [s for s, d in enumerate(diverging) if d]
    while stack:
        t = stack.pop()
        for s in predecessors[t]:
            if not diverging[s]:
                diverging[s] = True
                stack.append(s)
    return DivergenceMarking(tuple(diverging))


def reachable_states(lts: Lts) -> list[int]:
    """States reachable from the initial state, in BFS discovery order."""
    order = [lts.initial]
    seen = {lts.initial}
    i = 0
    while i < len(order):
        s = order[i]
        i += 1
        for _, t in lts.out[s]:
            if t not in seen:
                seen.add(t)
                order.append(t)
    return order


def restrict_to_reachable(lts: Lts) -> Lts:
    """Drop unreachable states, renumbering the rest in BFS order (initial becomes 0)."""
    order = reachable_states(lts)
    rename = {s: i for i, s in enumerate(order)}
    trans = [(rename[s], a, rename[t]) for s, a, t in lts.transitions if s in rename]
    used = sorted({a for _, a, _ in trans if a != TAU})
    relabel = {TAU: TAU}
    labels = [lts.labels[TAU]]
    for a in used:
        relabel[a] = len(labels)
        labels.append(lts.labels[a])
    return Lts(len(order), 0, labels, [(s, relabel[a], t) for s, a, t in trans])
