"""Browsing distributions over subsets of display locations.

A customer visits a random set of locations and then chooses from the
products placed there. Explicit and line-shaped distributions enumerate
their support exactly; sampler-backed ones only draw.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .core import EnumerationUnsupportedError

_PROB_TOL = 1e-9


def _categorical(rng: np.random.Generator, cum: np.ndarray) -> int:
    """Index drawn from a cumulative probability vector."""
    return int(np.searchsorted(cum, rng.random(), side="right"))


class BrowsingDistribution:
    """Base interface: i.i.d. sampling plus (optional) exact support."""

    def sample(self, rng: np.random.Generator) -> frozenset[int]:
        raise NotImplementedError

    def support(self) -> list[tuple[frozenset[int], float]]:
        """Visited-set support with probabilities (zero-mass sets omitted)."""
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError


class ExplicitBrowsing(BrowsingDistribution):
    """Distribution given by an explicit list of (location set, probability).

    Duplicate sets are merged; probabilities must be nonnegative and sum
    to 1 within 1e-9.
    """

    def __init__(self, support: Iterable[tuple[Iterable[int], float]]):
        merged: dict[frozenset[int], float] = {}
        for locations, prob in support:
            if prob < 0:
                raise ValueError("support probabilities must be nonnegative")
            key = frozenset(int(j) for j in locations)
            if any(j < 0 for j in key):
                raise ValueError("location indices must be nonnegative")
            merged[key] = merged.get(key, 0.0) + float(prob)
        total = sum(merged.values())
        if abs(total - 1.0) > _PROB_TOL:
            raise ValueError(f"support probabilities sum to {total}, expected 1")
        items = sorted(merged.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        self._sets = [s for s, p in items if p > 0.0]
        self._probs = np.array([p for _, p in items if p > 0.0])
        self._cum = np.cumsum(self._probs)
        self._cum[-1] = 1.0

    @property
    def max_location(self) -> int:
        return max((max(s) for s in self._sets if s), default=-1)

    def sample(self, rng):
        return self._sets[_categorical(rng, self._cum)]

    def support(self):
        return list(zip(self._sets, (float(p) for p in self._probs)))

    def to_spec(self) -> dict:
        return {
            "type": "explicit",
            "support": [
                {"locations": sorted(s), "prob": float(p)}
                for s, p in zip(self._sets, self._probs)
            ],
        }


class LineBrowsing(BrowsingDistribution):
    """Customers scan locations 0,1,2,... and stop; visited sets are prefixes.

    ``theta[j]`` is the probability of visiting exactly locations 0..j.
    Any residual mass (sum < 1) is the customer who visits nothing.
    """

    def __init__(self, theta: Sequence[float]):
        t = np.asarray(theta, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("theta must be a nonempty 1-d sequence")
        if np.any(t < 0):
            raise ValueError("prefix probabilities must be nonnegative")
        total = float(t.sum())
        if total > 1.0 + _PROB_TOL:
            raise ValueError(f"prefix probabilities sum to {total} > 1")
        self.theta = t
        self.m = int(t.size)
        self._residual = max(0.0, 1.0 - total)
        # category 0 = visit nothing, category j >= 1 = prefix 0..j-1
        self._cum = np.cumsum(np.concatenate(([self._residual], t)))
        self._cum[-1] = 1.0

    def sample(self, rng):
        j = _categorical(rng, self._cum)
        return frozenset(range(j))

    def support(self):
        out = [
            (frozenset(range(j + 1)), float(p))
            for j, p in enumerate(self.theta)
            if p > 0.0
        ]
        if self._residual > _PROB_TOL:
            out.insert(0, (frozenset(), self._residual))
        return out

    def to_spec(self) -> dict:
        return {"type": "line", "theta": [float(v) for v in self.theta]}


class SamplerBrowsing(BrowsingDistribution):
    """Opaque simulator: draws visited sets, cannot enumerate them.

    The draw callable must be deterministic given the generator state.
    """

    def __init__(self, draw: Callable[[np.random.Generator], Iterable[int]]):
        self._draw = draw

    def sample(self, rng):
        return frozenset(int(j) for j in self._draw(rng))

    def support(self):
        raise EnumerationUnsupportedError(
            "sampler-backed browsing has no enumerable support; use estimation"
        )

    def to_spec(self) -> dict:
        raise ValueError("sampler-backed browsing is not serializable")


def singleton_uniform(m: int) -> ExplicitBrowsing:
    """Each customer visits exactly one location, uniformly at random."""
    if m < 1:
        raise ValueError("need at least one location")
    return ExplicitBrowsing([([j], 1.0 / m) for j in range(m)])


def full_support(m: int) -> ExplicitBrowsing:
    """Every customer visits all locations (assortment-only special case)."""
    if m < 1:
        raise ValueError("need at least one location")
    return ExplicitBrowsing([(range(m), 1.0)])


def browsing_from_spec(spec: Mapping) -> BrowsingDistribution:
    """Build a browsing distribution from its JSON-friendly description."""
    kind = spec.get("type")
    if kind == "explicit":
        return ExplicitBrowsing(
            [(entry["locations"], entry["prob"]) for entry in spec["support"]]
        )
    if kind == "line":
        return LineBrowsing(spec["theta"])
    raise ValueError(f"unknown browsing type {kind!r}")
