"""Placement algorithms and exact expected-revenue evaluation.

The expected revenue of a placement is the browsing-weighted sum of
assortment revenues over visited location sets. Solvers either enumerate
that sum exactly (explicit / line browsing) or fall back to Monte-Carlo
estimation for sampler-only browsing.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import product as iter_product
from typing import Iterable, Sequence

import numpy as np

from .browsing import LineBrowsing
from .choice import MarkovModel, MnlModel, expected_revenue
from .core import EMPTY_SLOT, EnumerationUnsupportedError, Instance, SizeGuardError, canon
from .estimation import EstimationPlan, estimate_w
from .oracle import AssortmentOracle

PLACEMENT_BRUTE_GUARD = 2_000_000


@dataclass(frozen=True)
class WEstimate:
    """Monte-Carlo revenue estimate with the plan that produced it."""

    value: float
    epsilon: float
    delta: float
    samples: int


@dataclass
class SolveReport:
    """Outcome of one solver run: placement plus its (exact or estimated) value."""

    algorithm: str
    placement: tuple[int, ...]
    w_exact: float | None
    w_estimate: WEstimate | None
    k: int | None
    seed: int
    ms: int

    def __post_init__(self):
        if (self.w_exact is None) == (self.w_estimate is None):
            raise ValueError("exactly one of w_exact / w_estimate must be set")
        if any(s < 0 for s in self.placement):
            raise ValueError("reported placements may not contain empty slots")

    @property
    def w(self) -> float:
        return self.w_exact if self.w_exact is not None else self.w_estimate.value

    def to_dict(self) -> dict:
        est = self.w_estimate
        return {
            "algorithm": self.algorithm,
            "placement": list(self.placement),
            "w_exact": self.w_exact,
            "w_estimate": None
            if est is None
            else {
                "value": est.value,
                "epsilon": est.epsilon,
                "delta": est.delta,
                "samples": est.samples,
            },
            "k": self.k,
            "seed": self.seed,
            "ms": self.ms,
        }


class WEvaluator:
    """Exact expected-revenue evaluation with per-instance memoization.

    Assortment revenues are cached by canonical id tuple (supports repeat
    assortments heavily) and placement values by slot tuple. Empty-slot
    sentinels and padding ids contribute nothing to revenue.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        self._support = [(tuple(sorted(s)), p) for s, p in instance.browsing.support()]
        self._revenues: dict[tuple[int, ...], float] = {}
        self._values: dict[tuple[int, ...], float] = {}

    def revenue(self, ids: Iterable[int]) -> float:
        """Expected revenue of an assortment, ignoring sentinels and padding."""
        n = self.instance.n
        key = canon(i for i in ids if 0 <= i < n)
        rev = self._revenues.get(key)
        if rev is None:
            rev = expected_revenue(self.instance.choice_model, self.instance.prices, key)
            self._revenues[key] = rev
        return rev

    def value(self, slots: Sequence[int]) -> float:
        """Expected revenue of a (possibly partial) placement."""
        if len(slots) != self.instance.m:
            raise ValueError(f"placement must fill {self.instance.m} slots")
        key = tuple(slots)
        val = self._values.get(key)
        if val is None:
            val = self._value_uncached(key)
            self._values[key] = val
        return val

    def _value_uncached(self, slots: tuple[int, ...]) -> float:
        total = 0.0
        for locations, prob in self._support:
            total += prob * self.revenue(slots[j] for j in locations)
        return total


def evaluate_exact(instance: Instance, slots: Sequence[int]) -> float:
    """Exact expected revenue of a placement under enumerable browsing."""
    return WEvaluator(instance).value(slots)


def fill_empty(instance: Instance, slots: Sequence[int]) -> tuple[int, ...]:
    """Replace empty slots and padding ids with the highest-price product.

    Never decreases expected revenue: revenue can only gain from offering
    the priciest product, and padding ids were never chosen anyway.
    """
    star = instance.i_star
    n = instance.n
    return tuple(star if (s == EMPTY_SLOT or s >= n) else s for s in slots)


def _elapsed_ms(start: float) -> int:
    return int(round((time.perf_counter() - start) * 1000))


def brute_force_placement(
    instance: Instance, guard: int = PLACEMENT_BRUTE_GUARD, seed: int = 0
) -> SolveReport:
    """Globally optimal placement by enumerating every slot assignment.

    Test oracle for the optimum; guarded because the space has n^m points.
    """
    start = time.perf_counter()
    n, m = instance.n, instance.m
    if n**m > guard:
        raise SizeGuardError(f"brute force needs {n ** m} > {guard} placements")
    ev = WEvaluator(instance)
    support = ev._support
    revenue = ev.revenue
    best_w, best = -1.0, None
    for slots in iter_product(range(n), repeat=m):
        w = 0.0
        for locations, prob in support:
            w += prob * revenue(slots[j] for j in locations)
        if w > best_w:
            best_w, best = w, slots
    return SolveReport(
        algorithm="brute-force",
        placement=best,
        w_exact=best_w,
        w_estimate=None,
        k=None,
        seed=seed,
        ms=_elapsed_ms(start),
    )


def best_of_many_line(
    instance: Instance,
    oracle: AssortmentOracle,
    seed: int = 0,
    evaluator: WEvaluator | None = None,
) -> SolveReport:
    """Try the best size-k assortment in the first k slots for every k.

    Only valid when customers scan a line: visited sets are prefixes, so
    concentrating a good assortment at the top is meaningful. Keeps the k
    whose prefix placement earns the most.
    """
    if not isinstance(instance.browsing, LineBrowsing):
        raise ValueError("best_of_many_line requires line browsing")
    start = time.perf_counter()
    ev = evaluator or WEvaluator(instance)
    m = instance.m
    best = None
    for k in range(1, m + 1):
        members = sorted(oracle.best_assortment(k))
        slots = fill_empty(instance, tuple(members) + (EMPTY_SLOT,) * (m - k))
        w = ev.value(slots)
        if best is None or w > best[0]:
            best = (w, k, slots)
    w, k, slots = best
    return SolveReport(
        algorithm="best-of-many",
        placement=slots,
        w_exact=w,
        w_estimate=None,
        k=k,
        seed=seed,
        ms=_elapsed_ms(start),
    )


def randomized_placement(
    instance: Instance,
    oracle: AssortmentOracle,
    repetitions: int = 32,
    seed: int = 0,
    rng: np.random.Generator | None = None,
    plan: EstimationPlan | None = None,
    evaluator: WEvaluator | None = None,
) -> SolveReport:
    """Uniform random replication of the best size-k assortment, best of all k.

    For each k, every slot independently receives a uniform draw from the
    size-k oracle assortment (products may repeat); the best evaluated draw
    over all k and all repetitions wins. Randomizing the layout hedges
    against unknown browsing patterns. Values come from exact evaluation
    when the browsing support is enumerable, otherwise from Monte-Carlo
    estimation under ``plan``.
    """
    if repetitions < 1:
        raise ValueError("need at least one repetition")
    start = time.perf_counter()
    rng = np.random.default_rng(seed) if rng is None else rng
    m = instance.m

    exact = True
    ev = evaluator
    if ev is None:
        try:
            ev = WEvaluator(instance)
        except EnumerationUnsupportedError:
            exact = False
            if plan is None:
                raise ValueError(
                    "sampler-only browsing needs an estimation plan"
                ) from None
    estimates: dict[tuple[int, ...], float] = {}

    def value(slots: tuple[int, ...]) -> float:
        if exact:
            return ev.value(slots)
        if slots not in estimates:
            estimates[slots], _ = estimate_w(instance, slots, plan, rng)
        return estimates[slots]

    best = None
    for k in range(1, m + 1):
        members = np.array(sorted(oracle.best_assortment(k)))
        draws = rng.integers(0, len(members), size=(repetitions, m))
        for row in draws:
            slots = fill_empty(instance, tuple(int(i) for i in members[row]))
            w = value(slots)
            if best is None or w > best[0]:
                best = (w, k, slots)
    w, k, slots = best
    return SolveReport(
        algorithm="randomized",
        placement=slots,
        w_exact=w if exact else None,
        w_estimate=None
        if exact
        else WEstimate(w, plan.epsilon, plan.delta, plan.samples),
        k=k,
        seed=seed,
        ms=_elapsed_ms(start),
    )


def _partition_greedy(
    instance: Instance,
    candidates: Sequence[int],
    ev: WEvaluator,
) -> tuple[tuple[int, ...], float]:
    """Fill locations one product at a time, always taking the largest gain.

    One product per location (a partition constraint over product-location
    pairs); candidates may repeat across locations. Ties break toward the
    lower product id, then the lower location id.
    """
    m = instance.m
    slots = [EMPTY_SLOT] * m
    current = 0.0
    for _ in range(m):
        best_gain, best_pair = -np.inf, None
        for i in candidates:
            for j in range(m):
                if slots[j] != EMPTY_SLOT:
                    continue
                slots[j] = i
                w = ev.value(slots)
                slots[j] = EMPTY_SLOT
                gain = w - current
                if gain > best_gain + 1e-15:
                    best_gain, best_pair = gain, (i, j)
        i, j = best_pair
        slots[j] = i
        current += best_gain
    return tuple(slots), ev.value(slots)


def uniform_price_matroid_greedy(
    instance: Instance, seed: int = 0, evaluator: WEvaluator | None = None
) -> SolveReport:
    """Greedy placement for identically priced products.

    With one common price the placement objective is monotone submodular
    over product-location pairs, so greedy selection subject to the
    one-product-per-location constraint is at least 1/2 of optimal.
    """
    if np.ptp(instance.prices) != 0.0:
        raise ValueError("uniform_price_matroid_greedy requires identical prices")
    start = time.perf_counter()
    ev = evaluator or WEvaluator(instance)
    slots, w = _partition_greedy(instance, range(instance.n), ev)
    return SolveReport(
        algorithm="uniform-greedy",
        placement=slots,
        w_exact=w,
        w_estimate=None,
        k=None,
        seed=seed,
        ms=_elapsed_ms(start),
    )


def pair_objective_values(instance: Instance, guard: int = 18) -> np.ndarray:
    """Objective value for every subset of product-location pairs.

    Pair (i, j) has bit index i*m + j; entry ``mask`` holds the expected
    revenue when location j offers exactly the products paired with it in
    ``mask`` (multiple products per location are allowed here, which is what
    makes the subset lattice meaningful).
    """
    n, m = instance.n, instance.m
    if n * m > guard:
        raise SizeGuardError(f"pair lattice has 2^{n * m} subsets, guard is 2^{guard}")
    ev = WEvaluator(instance)
    support = ev._support
    values = np.empty(2 ** (n * m))
    for mask in range(values.size):
        per_location = [
            [i for i in range(n) if mask >> (i * m + j) & 1] for j in range(m)
        ]
        total = 0.0
        for locations, prob in support:
            offered = set()
            for j in locations:
                offered.update(per_location[j])
            total += prob * ev.revenue(offered)
        values[mask] = total
    return values


def check_pair_objective_properties(
    instance: Instance, tol: float = 1e-9, guard: int = 18
) -> list[str]:
    """Exhaustive monotonicity and submodularity check of the pair objective.

    Covers every chain U subset-of V and every pair outside V. Returns
    human-readable violation descriptions (empty means both properties hold).
    """
    n, m = instance.n, instance.m
    values = pair_objective_values(instance, guard=guard)
    size = n * m
    violations: list[str] = []
    for v_mask in range(values.size):
        outside = [e for e in range(size) if not v_mask >> e & 1]
        for e in outside:
            if values[v_mask | 1 << e] < values[v_mask] - tol:
                violations.append(f"monotonicity: mask {v_mask} + bit {e}")
        u_mask = v_mask
        while True:
            for e in outside:
                gain_small = values[u_mask | 1 << e] - values[u_mask]
                gain_large = values[v_mask | 1 << e] - values[v_mask]
                if gain_small < gain_large - tol:
                    violations.append(
                        f"submodularity: U {u_mask} within V {v_mask}, bit {e}"
                    )
            if u_mask == 0:
                break
            u_mask = (u_mask - 1) & v_mask
    return violations


def check_restricted_revenue_properties(
    instance: Instance, members: Iterable[int], tol: float = 1e-9
) -> list[str]:
    """Monotonicity and submodularity of assortment revenue on a ground subset.

    Exhausts every A within B within ``members`` and every member outside B.
    """
    ids = sorted(i for i in set(members) if 0 <= i < instance.n)
    if len(ids) > 16:
        raise SizeGuardError("restricted revenue check is capped at 16 members")
    model, prices = instance.choice_model, instance.prices
    values: dict[int, float] = {}
    for mask in range(2 ** len(ids)):
        subset = [ids[t] for t in range(len(ids)) if mask >> t & 1]
        values[mask] = expected_revenue(model, prices, subset)
    violations: list[str] = []
    for b_mask in values:
        outside = [t for t in range(len(ids)) if not b_mask >> t & 1]
        for t in outside:
            if values[b_mask | 1 << t] < values[b_mask] - tol:
                violations.append(f"monotonicity: mask {b_mask} + {ids[t]}")
        a_mask = b_mask
        while True:
            for t in outside:
                gain_small = values[a_mask | 1 << t] - values[a_mask]
                gain_large = values[b_mask | 1 << t] - values[b_mask]
                if gain_small < gain_large - tol:
                    violations.append(
                        f"submodularity: {a_mask} within {b_mask}, product {ids[t]}"
                    )
            if a_mask == 0:
                break
            a_mask = (a_mask - 1) & b_mask
    return violations


def markov_deterministic_placement(
    instance: Instance,
    oracle: AssortmentOracle,
    seed: int = 0,
    evaluator: WEvaluator | None = None,
) -> SolveReport:
    """Deterministic placement for Markov-style choice.

    For each k, the placement objective restricted to the best size-k
    assortment is monotone submodular, so a greedy one-product-per-location
    pass over just those products is provably good; the best k wins.
    """
    if not isinstance(instance.choice_model, (MnlModel, MarkovModel)):
        raise ValueError(
            "markov_deterministic_placement needs a Markov (or MNL) choice model"
        )
    start = time.perf_counter()
    ev = evaluator or WEvaluator(instance)
    n, m = instance.n, instance.m
    best = None
    for k in range(1, m + 1):
        members = sorted(i for i in oracle.best_assortment(k) if i < n)
        slots, w = _partition_greedy(instance, members, ev)
        slots = fill_empty(instance, slots)
        if best is None or w > best[0]:
            best = (w, k, slots)
    w, k, slots = best
    return SolveReport(
        algorithm="markov-greedy",
        placement=slots,
        w_exact=w,
        w_estimate=None,
        k=k,
        seed=seed,
        ms=_elapsed_ms(start),
    )
