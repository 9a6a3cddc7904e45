"""Cardinality-constrained assortment optimization behind one interface.

Each oracle returns, for a size budget k, an assortment whose expected
revenue is at least ``alpha`` times the best achievable with at most k
products. Returned sets always have exactly k members: short optima are
topped up first with the highest-price product and then with padding ids
``>= n`` that are never chosen and never hurt revenue.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .choice import ChoiceModel, MnlModel, expected_revenue
from .core import Instance, SizeGuardError

BRUTE_FORCE_MAX_N = 22
_MNL_BISECT_ITERS = 200


def _pad_to_size(ids: frozenset[int], k: int, instance: Instance) -> frozenset[int]:
    """Grow an assortment to exactly k members without losing revenue.

    Adds the highest-price product first (never decreases revenue under
    substitutability), then never-chosen padding ids n, n+1, ...
    """
    out = set(ids)
    if len(out) < k and instance.i_star not in out:
        out.add(instance.i_star)
    pad = instance.n
    while len(out) < k:
        out.add(pad)
        pad += 1
    if len(out) != k:
        raise ValueError(f"assortment has {len(out)} > {k} members")
    return frozenset(out)


class AssortmentOracle:
    """Interface: ``best_assortment(k)`` with guaranteed factor ``alpha``."""

    alpha: float

    def __init__(self, instance: Instance):
        self.instance = instance

    def best_assortment(self, k: int) -> frozenset[int]:
        """Size-k assortment with revenue >= alpha * optimum over <= k sets."""
        if not 1 <= k <= self.instance.m:
            raise ValueError(f"cardinality {k} outside [1, {self.instance.m}]")
        found = self._solve(min(k, self.instance.n))
        return _pad_to_size(found, k, self.instance)

    def _solve(self, k: int) -> frozenset[int]:
        raise NotImplementedError


class BruteForceOracle(AssortmentOracle):
    """Exact oracle by enumerating every subset of size at most k."""

    alpha = 1.0

    def __init__(self, instance: Instance, max_n: int = BRUTE_FORCE_MAX_N):
        super().__init__(instance)
        if instance.n > max_n:
            raise SizeGuardError(
                f"brute-force assortment search capped at n <= {max_n}, got {instance.n}"
            )

    def _solve(self, k):
        model = self.instance.choice_model
        prices = self.instance.prices
        best, best_rev = frozenset(), 0.0
        for size in range(1, k + 1):
            for subset in combinations(range(self.instance.n), size):
                rev = expected_revenue(model, prices, subset)
                if rev > best_rev + 1e-15:
                    best, best_rev = frozenset(subset), rev
        return best


class MnlExactOracle(AssortmentOracle):
    """Exact MNL oracle via bisection on the achievable-revenue threshold.

    A revenue of t is achievable with at most k products iff the k largest
    positive values of v_i (r_i - t) sum to at least t; that test is
    monotone in t, so bisection pins the optimum and the final threshold
    reconstructs the set. Ties in v_i (r_i - t) go to the lower id.
    """

    alpha = 1.0

    def __init__(self, instance: Instance):
        super().__init__(instance)
        if not isinstance(instance.choice_model, MnlModel):
            raise ValueError("MnlExactOracle requires an MNL choice model")

    def _top_scores(self, t: float, k: int) -> np.ndarray:
        v = self.instance.choice_model.weights
        scores = v * (self.instance.prices - t)
        order = np.lexsort((np.arange(scores.size), -scores))
        return order[:k], scores

    def _solve(self, k):
        lo, hi = 0.0, float(self.instance.prices.max())
        for _ in range(_MNL_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            top, scores = self._top_scores(mid, k)
            gain = float(np.maximum(scores[top], 0.0).sum())
            if gain >= mid:
                lo = mid
            else:
                hi = mid
        top, scores = self._top_scores(lo, k)
        chosen = frozenset(int(i) for i in top if scores[i] > 0.0)
        return chosen


class GreedyUniformOracle(AssortmentOracle):
    """Greedy oracle for identically priced products.

    With one common price the revenue function is monotone submodular, so
    iteratively adding the best marginal product is (1 - 1/e)-approximate.
    """

    alpha = 1.0 - 1.0 / np.e

    def __init__(self, instance: Instance):
        super().__init__(instance)
        prices = instance.prices
        if np.ptp(prices) != 0.0:
            raise ValueError("GreedyUniformOracle requires identical prices")

    def greedy_assortment(self, k: int) -> frozenset[int]:
        """Unpadded greedy set of exactly k real products (0 <= k <= n)."""
        if not 0 <= k <= self.instance.n:
            raise ValueError(f"cardinality {k} outside [0, {self.instance.n}]")
        return frozenset() if k == 0 else self._solve(k)

    def _solve(self, k):
        model = self.instance.choice_model
        prices = self.instance.prices
        chosen: set[int] = set()
        current = 0.0
        for _ in range(k):
            best_gain, best_i = -np.inf, None
            for i in range(self.instance.n):
                if i in chosen:
                    continue
                gain = expected_revenue(model, prices, chosen | {i}) - current
                if gain > best_gain + 1e-15:
                    best_gain, best_i = gain, i
            chosen.add(best_i)
            current += best_gain
        return frozenset(chosen)


def exact_oracle(instance: Instance) -> AssortmentOracle:
    """Best exact oracle available for the instance's model family."""
    if isinstance(instance.choice_model, MnlModel):
        return MnlExactOracle(instance)
    return BruteForceOracle(instance)
