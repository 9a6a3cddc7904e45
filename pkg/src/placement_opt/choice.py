"""Discrete choice models: purchase probabilities and expected revenue.

Every model maps (product, assortment) to a purchase probability. The
no-purchase option is always available and absorbs the residual mass
``1 - sum_i p(i, S)``. All models here satisfy substitutability: adding a
product to an assortment never increases the probability of choosing an
existing one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import canon

_PROB_TOL = 1e-9


class ChoiceModel:
    """Base class. Subclasses implement ``_probs`` over a sorted id tuple."""

    n: int

    def __init__(self):
        self._cache: dict[tuple[int, ...], dict[int, float]] = {}

    def choice_probs(self, assortment: Iterable[int]) -> dict[int, float]:
        """Purchase probability for every product in the assortment.

        Results are cached per canonical assortment; models are immutable so
        concurrent reads agree.
        """
        key = canon(assortment)
        if not key:
            return {}
        probs = self._cache.get(key)
        if probs is None:
            for i in key:
                if not 0 <= i < self.n:
                    raise ValueError(f"unknown product id {i}")
            probs = self._probs(key)
            self._cache[key] = probs
        return probs

    def choose_prob(self, i: int, assortment: Iterable[int]) -> float:
        """Probability of picking product ``i`` from the offered assortment."""
        probs = self.choice_probs(assortment)
        if i not in probs:
            raise ValueError(f"product {i} is not in the offered assortment")
        return probs[i]

    def _probs(self, key: tuple[int, ...]) -> dict[int, float]:
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError


class MnlModel(ChoiceModel):
    """Multinomial logit with an implicit unit no-purchase weight.

    p(i, S) = v_i / (1 + sum_{j in S} v_j). A zero weight encodes a product
    that is never chosen.
    """

    def __init__(self, weights: Sequence[float]):
        super().__init__()
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-d sequence")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        self.weights = w
        self.n = int(w.size)

    def _probs(self, key):
        denom = 1.0 + float(self.weights[list(key)].sum())
        return {i: float(self.weights[i]) / denom for i in key}

    def to_spec(self) -> dict:
        return {"type": "mnl", "weights": [float(v) for v in self.weights]}


class MmnlModel(ChoiceModel):
    """Mixture of MNL segments, each with its own arrival weight."""

    def __init__(self, segments: Sequence[tuple[float, Sequence[float]]]):
        super().__init__()
        if not segments:
            raise ValueError("need at least one segment")
        thetas = np.array([t for t, _ in segments], dtype=float)
        if np.any(thetas < 0):
            raise ValueError("segment probabilities must be nonnegative")
        if abs(thetas.sum() - 1.0) > _PROB_TOL:
            raise ValueError("segment probabilities must sum to 1")
        mats = [np.asarray(w, dtype=float) for _, w in segments]
        n = mats[0].size
        if any(w.ndim != 1 or w.size != n for w in mats):
            raise ValueError("all segments must weight the same product set")
        if any(np.any(w < 0) for w in mats):
            raise ValueError("segment weights must be nonnegative")
        self.thetas = thetas
        self.weight_matrix = np.vstack(mats)  # segment x product
        self.n = int(n)

    def _probs(self, key):
        cols = self.weight_matrix[:, list(key)]
        denom = 1.0 + cols.sum(axis=1)
        probs = (cols / denom[:, None]) * self.thetas[:, None]
        total = probs.sum(axis=0)
        return {i: float(total[pos]) for pos, i in enumerate(key)}

    def to_spec(self) -> dict:
        return {
            "type": "mmnl",
            "segments": [
                {"theta": float(t), "weights": [float(v) for v in row]}
                for t, row in zip(self.thetas, self.weight_matrix)
            ],
        }


class MarkovModel(ChoiceModel):
    """Markov chain choice: the customer walks between products until they
    either buy (hit an offered product) or give up.

    States 0..n index ``quit`` plus the products: state 0 is the absorbing
    no-purchase state and state ``i + 1`` is product ``i``. ``arrival`` is
    the distribution of the first state visited and ``transitions`` the
    row-stochastic matrix followed while the current product is not offered.
    """

    def __init__(self, arrival: Sequence[float], transitions: Sequence[Sequence[float]]):
        super().__init__()
        lam = np.asarray(arrival, dtype=float)
        rho = np.asarray(transitions, dtype=float)
        if lam.ndim != 1 or lam.size < 2:
            raise ValueError("arrival must cover the quit state plus >= 1 product")
        if rho.shape != (lam.size, lam.size):
            raise ValueError("transitions must be square over the same states")
        if np.any(lam < 0) or abs(lam.sum() - 1.0) > _PROB_TOL:
            raise ValueError("arrival must be a probability vector")
        if np.any(rho < 0) or np.any(np.abs(rho.sum(axis=1) - 1.0) > _PROB_TOL):
            raise ValueError("each transition row must be a probability vector")
        quit_row = np.zeros(lam.size)
        quit_row[0] = 1.0
        if not np.allclose(rho[0], quit_row, atol=_PROB_TOL):
            raise ValueError("the quit state must be absorbing")
        self.arrival = lam
        self.transitions = rho
        self.n = int(lam.size) - 1

    def _probs(self, key):
        # Absorption probabilities with states {quit} | offered made absorbing,
        # solved as a dense linear system over the transient (unoffered) states.
        absorbing = [0] + [i + 1 for i in key]
        offered = set(absorbing)
        transient = [s for s in range(self.n + 1) if s not in offered]
        if not transient:
            return {i: float(self.arrival[i + 1]) for i in key}
        q = self.transitions[np.ix_(transient, transient)]
        r = self.transitions[np.ix_(transient, absorbing)]
        hit = np.linalg.solve(np.eye(len(transient)) - q, r)
        absorbed = self.arrival[absorbing] + self.arrival[transient] @ hit
        # absorbed[0] is the quit state; entry pos+1 matches key[pos]
        return {i: float(absorbed[pos + 1]) for pos, i in enumerate(key)}

    def to_spec(self) -> dict:
        return {
            "type": "markov",
            "arrival": [float(v) for v in self.arrival],
            "transitions": [[float(v) for v in row] for row in self.transitions],
        }


class RankedListModel(ChoiceModel):
    """Distribution over preference orders; the customer buys the first
    listed product present in the assortment.

    Each order is a sequence of product ids ranked above the no-purchase
    option; unlisted products rank below it and are never chosen from that
    order.
    """

    def __init__(self, lists: Sequence[tuple[float, Sequence[int]]], n: int):
        super().__init__()
        if n < 1:
            raise ValueError("need at least one product")
        if not lists:
            raise ValueError("need at least one ranking")
        probs = np.array([p for p, _ in lists], dtype=float)
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > _PROB_TOL:
            raise ValueError("ranking probabilities must be nonnegative and sum to 1")
        orders = []
        for _, order in lists:
            order = tuple(int(i) for i in order)
            if len(set(order)) != len(order):
                raise ValueError("a ranking may not repeat a product")
            if any(not 0 <= i < n for i in order):
                raise ValueError("ranking contains an unknown product id")
            orders.append(order)
        self.lists = tuple(zip((float(p) for p in probs), orders))
        self.n = int(n)

    def _probs(self, key):
        offered = set(key)
        out = {i: 0.0 for i in key}
        for prob, order in self.lists:
            for i in order:
                if i in offered:
                    out[i] += prob
                    break
        return out

    def to_spec(self) -> dict:
        return {
            "type": "ranked",
            "n": self.n,
            "lists": [{"prob": p, "order": list(order)} for p, order in self.lists],
        }


def model_from_spec(spec: Mapping, n: int | None = None) -> ChoiceModel:
    """Build a choice model from its JSON-friendly description.

    Ranked-list payloads need a product count; it may come from their own
    ``n`` key or from the caller (the enclosing instance knows it).
    """
    kind = spec.get("type")
    if kind == "mnl":
        return MnlModel(spec["weights"])
    if kind == "mmnl":
        return MmnlModel([(s["theta"], s["weights"]) for s in spec["segments"]])
    if kind == "markov":
        return MarkovModel(spec["arrival"], spec["transitions"])
    if kind == "ranked":
        count = spec.get("n", n)
        if count is None:
            raise ValueError("ranked model spec needs a product count")
        return RankedListModel(
            [(entry["prob"], entry["order"]) for entry in spec["lists"]], n=count
        )
    raise ValueError(f"unknown choice model type {kind!r}")


def expected_revenue(model: ChoiceModel, prices: Sequence[float], assortment: Iterable[int]) -> float:
    """Expected revenue of an assortment: sum_i r_i * p(i, S)."""
    probs = model.choice_probs(assortment)
    return float(sum(prices[i] * p for i, p in probs.items()))


def no_purchase_prob(model: ChoiceModel, assortment: Iterable[int]) -> float:
    """Probability that the customer buys nothing from the assortment."""
    return 1.0 - sum(model.choice_probs(assortment).values())


def markov_from_mnl(mnl: MnlModel) -> MarkovModel:
    """Markov chain whose absorption probabilities reproduce an MNL model.

    Arrivals follow the full-assortment MNL shares; from product i the walk
    moves to each other option with its share renormalized to exclude i.
    """
    v = mnl.weights
    n = v.size
    total = 1.0 + v.sum()
    arrival = np.empty(n + 1)
    arrival[0] = 1.0 / total
    arrival[1:] = v / total
    rho = np.zeros((n + 1, n + 1))
    rho[0, 0] = 1.0
    for i in range(n):
        rest = total - v[i]
        rho[i + 1, 0] = 1.0 / rest
        for j in range(n):
            if j != i:
                rho[i + 1, j + 1] = v[j] / rest
    return MarkovModel(arrival, rho)


@dataclass(frozen=True)
class RationalityViolation:
    """One observed failure of substitutability."""

    product: int
    assortment: tuple[int, ...]
    added: int
    magnitude: float


def check_weak_rationality(
    model: ChoiceModel,
    n: int,
    trials: int | None = None,
    seed: int = 0,
    tol: float = 1e-9,
) -> list[RationalityViolation]:
    """Check that adding a product never raises another's choice probability.

    Exhaustive over all (S, i, j) triples when ``trials`` is None (requires
    n <= 12), otherwise over ``trials`` random triples. Violations are
    returned as data, not raised.
    """
    violations: list[RationalityViolation] = []
    if n < 2:
        return violations

    def check_triple(subset: tuple[int, ...], i: int, j: int):
        before = model.choose_prob(i, subset)
        after = model.choose_prob(i, subset + (j,))
        if after > before + tol:
            violations.append(RationalityViolation(i, subset, j, after - before))

    if trials is None:
        if n > 12:
            raise ValueError("exhaustive check is limited to n <= 12")
        for mask in range(1, 2**n):
            subset = tuple(i for i in range(n) if mask >> i & 1)
            rest = [j for j in range(n) if not mask >> j & 1]
            for i in subset:
                for j in rest:
                    check_triple(subset, i, j)
    else:
        rng = np.random.default_rng(seed)
        for _ in range(trials):
            size = int(rng.integers(1, n))
            subset = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
            rest = [j for j in range(n) if j not in subset]
            i = int(rng.choice(list(subset)))
            j = int(rng.choice(rest))
            check_triple(subset, i, j)
    return violations
