"""Benchmark and test-fixture generators."""
from __future__ import annotations

import random

from .lts import TAU, Lts, restrict_to_reachable


def gen_ladder(n: int, k: int) -> Lts:
    """The ladder family: states s_1..s_n, initial s_n, and k parallel
    transitions a_1..a_k from every s_i to s_{i-1}.

    State s_i is numbered ``n - i`` so the initial state is 0; actions are
    labelled ``a1`` .. ``ak``.
    """
    if n < 1 or k < 1:
        raise ValueError("gen_ladder needs n >= 1 and k >= 1")
    labels = ["tau"] + [f"a{j}" for j in range(1, k + 1)]
    trans = []
    for i in range(n, 1, -1):
        src, dst = n - i, n - i + 1
        for j in range(1, k + 1):
            trans.append((src, j, dst))
    return Lts(n, 0, labels, trans)


def gen_random(num_states: int, num_actions: int, transition_density: float,
               tau_density: float, seed: int) -> Lts:
    """A seeded random LTS with every state reachable from the initial one.

    Each candidate visible transition ``(s, a, t)`` is kept with probability
    ``transition_density``, each ``(s, τ, t)`` with ``tau_density``.  Visible
    actions are labelled ``a0, a1, ...``.
    """
    if not (0.0 <= transition_density <= 1.0 and 0.0 <= tau_density <= 1.0):
        raise ValueError("densities must lie in [0, 1]")
    rng = random.Random(seed)
    labels = ["tau"] + [f"a{j}" for j in range(num_actions)]
    trans = []
    for s in range(num_states):
        for t in range(num_states):
            if rng.random() < tau_density:
                trans.append((s, TAU, t))
            for a in range(1, num_actions + 1):
                if rng.random() < transition_density:
                    trans.append((s, a, t))
    return restrict_to_reachable(Lts(num_states, 0, labels, trans))


def random_pair(seed: int, max_states: int = 5, max_actions: int = 3,
                max_tau_density: float = 0.3) -> tuple[Lts, Lts]:
    """A (spec, impl) pair for oracle cross-checks.

    Odd seeds derive the implementation from the specification by dropping
    transitions, which makes refining pairs common; even seeds draw both
    independently.
    """
    rng = random.Random(seed)
    num_actions = rng.randint(1, max_actions)
    density = rng.uniform(0.3, 0.6)

    def draw() -> Lts:
        return gen_random(rng.randint(1, max_states), num_actions, density,
                          rng.uniform(0.0, max_tau_density), rng.randrange(2**32))

    spec = draw()
    if seed % 2:
        keep = [tr for tr in spec.transitions if rng.random() < 0.75]
        impl = restrict_to_reachable(Lts(spec.num_states, spec.initial, spec.labels, keep))
    else:
        impl = draw()
    return spec, impl
