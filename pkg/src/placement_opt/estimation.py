"""Monte-Carlo estimation of placement revenue from browsing samples.

Each sample is a visited location set; its value is the exact conditional
expected revenue of the products placed there (not a simulated purchase),
which keeps the estimator unbiased while shrinking variance. Sample counts
follow the Hoeffding bound m^2 ln(1/delta) / (2 eps^2), which pins the
estimate within eps * OPT of the truth with probability at least
1 - 2*delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .choice import expected_revenue
from .core import Instance, canon, products_at


def sample_size(m: int, epsilon: float, delta: float) -> int:
    """Samples needed for an (epsilon, delta) estimate over m locations."""
    if m < 1:
        raise ValueError("need at least one location")
    if not 0 < epsilon <= 1 or not 0 < delta <= 1:
        raise ValueError("epsilon and delta must lie in (0, 1]")
    return max(1, math.ceil(m * m * math.log(1.0 / delta) / (2.0 * epsilon * epsilon)))


@dataclass(frozen=True)
class EstimationPlan:
    """Sampling budget and normalization for one estimation context."""

    epsilon: float
    delta: float
    samples: int
    r_star_bound: float

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("need at least one sample")
        if not 0 < self.epsilon <= 1 or not 0 < self.delta <= 1:
            raise ValueError("epsilon and delta must lie in (0, 1]")

    @classmethod
    def for_instance(
        cls,
        instance: Instance,
        epsilon: float,
        delta: float,
        samples_override: int | None = None,
    ) -> "EstimationPlan":
        """Plan with the Hoeffding count (or an explicit override).

        The per-sample range is normalized by the max price, a computable
        upper bound on any assortment's revenue.
        """
        samples = (
            samples_override
            if samples_override is not None
            else sample_size(instance.m, epsilon, delta)
        )
        return cls(epsilon, delta, samples, float(instance.prices.max()))


def estimate_w(
    instance: Instance,
    slots: Sequence[int],
    plan: EstimationPlan,
    rng: np.random.Generator,
) -> tuple[float, int]:
    """Sample-average expected revenue of a placement.

    Draws ``plan.samples`` visited sets and averages the exact assortment
    revenue of the products at each. Returns (estimate, samples used).
    """
    if len(slots) != instance.m:
        raise ValueError(f"placement must fill {instance.m} slots")
    model, prices, n = instance.choice_model, instance.prices, instance.n
    cache: dict[tuple[int, ...], float] = {}
    total = 0.0
    for _ in range(plan.samples):
        visited = instance.browsing.sample(rng)
        key = canon(i for i in products_at(slots, visited) if 0 <= i < n)
        rev = cache.get(key)
        if rev is None:
            rev = expected_revenue(model, prices, key)
            cache[key] = rev
        total += rev
    return total / plan.samples, plan.samples


def select_best(
    instance: Instance,
    placements: Sequence[Sequence[int]],
    plan: EstimationPlan,
    rng: np.random.Generator,
    union_bound: bool = False,
) -> tuple[int, list[float]]:
    """Pick the placement with the largest estimated revenue.

    If the truly best candidate is within beta of optimal, the winner is
    within beta - 2*epsilon with probability >= 1 - 2*delta per estimate.
    With ``union_bound`` the per-candidate failure budget is split delta/t
    so the guarantee covers all t candidates jointly (this grows, never
    shrinks, the per-candidate sample count).
    """
    if not placements:
        raise ValueError("need at least one candidate placement")
    per_candidate = plan
    if union_bound and len(placements) > 1:
        shared_delta = plan.delta / len(placements)
        per_candidate = EstimationPlan(
            plan.epsilon,
            plan.delta,
            sample_size(instance.m, plan.epsilon, shared_delta),
            plan.r_star_bound,
        )
    values = [
        estimate_w(instance, slots, per_candidate, rng)[0] for slots in placements
    ]
    return int(np.argmax(values)), values
