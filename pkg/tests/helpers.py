"""Independent oracles shared by the test modules.

Everything here recomputes quantities through a different route than the
library (recursive enumeration instead of itertools, power iteration
instead of a linear solve) so agreement is meaningful.
"""

from __future__ import annotations

import numpy as np

from placement_opt import Instance


def direct_revenue(instance: Instance, ids) -> float:
    """Assortment revenue straight from per-product choice probabilities."""
    ids = sorted(set(i for i in ids if 0 <= i < instance.n))
    model = instance.choice_model
    return sum(instance.products[i].price * model.choose_prob(i, ids) for i in ids)


def twin_optimum(instance: Instance) -> float:
    """Optimal placement value by recursive slot-filling enumeration.

    Independent of the library's brute force: different traversal, different
    assortment assembly, no shared caches.
    """
    support = instance.browsing.support()
    n, m = instance.n, instance.m
    slots = [0] * m
    best = -1.0

    def recurse(depth: int):
        nonlocal best
        if depth == m:
            w = 0.0
            for visited, prob in support:
                w += prob * direct_revenue(instance, {slots[j] for j in visited})
            best = max(best, w)
            return
        for i in range(n):
            slots[depth] = i
            recurse(depth + 1)

    recurse(0)
    return best


def absorption_by_iteration(model, offered, steps: int = 5000) -> dict[int, float]:
    """Markov absorption probabilities by stepping the chain forward.

    Accumulates the probability of first hitting each offered product over
    path lengths 1, 2, ..., independent of the library's linear solve.
    """
    offered = sorted(set(offered))
    n = model.n
    absorbing = {0} | {i + 1 for i in offered}
    mass = np.array(model.arrival, dtype=float)
    hit = {i: 0.0 for i in offered}
    for i in offered:
        hit[i] += mass[i + 1]
    transient_mass = mass.copy()
    for s in absorbing:
        transient_mass[s] = 0.0
    for _ in range(steps):
        if transient_mass.sum() < 1e-16:
            break
        moved = transient_mass @ model.transitions
        for i in offered:
            hit[i] += moved[i + 1]
        transient_mass = moved
        for s in absorbing:
            transient_mass[s] = 0.0
    return hit
