"""Core domain types: products, assortments, placements, problem instances.

Products carry dense integer ids in [0, n) and fixed nonnegative prices.
A placement assigns one product id to each of m display locations (a product
may repeat across locations). An assortment is a duplicate-free set of
product ids; the always-available no-purchase option is implicit and never
stored.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Sentinel for an unfilled location. Allowed only inside solver
# intermediates, never in a returned placement.
EMPTY_SLOT = -1


class SizeGuardError(ValueError):
    """A brute-force routine would exceed its instance-size guard."""


class EnumerationUnsupportedError(ValueError):
    """The browsing distribution cannot enumerate its support exactly."""


def canon(ids: Iterable[int]) -> tuple[int, ...]:
    """Canonical sorted duplicate-free tuple for an assortment."""
    return tuple(sorted(set(ids)))


def products_at(slots: Sequence[int], locations: Iterable[int]) -> frozenset[int]:
    """Set of products placed at the given locations.

    Returns the duplicate-free union of slot contents; empty set for empty
    input. Raises IndexError for a location outside [0, len(slots)).
    """
    m = len(slots)
    out = set()
    for j in locations:
        if not 0 <= j < m:
            raise IndexError(f"location {j} out of range for {m} slots")
        out.add(slots[j])
    return frozenset(out)


@dataclass(frozen=True)
class Product:
    """A product with a dense integer id and a fixed nonnegative price."""

    id: int
    price: float

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"product id must be nonnegative, got {self.id}")
        if self.price < 0:
            raise ValueError(f"price must be nonnegative, got {self.price}")


@dataclass
class Instance:
    """A placement problem: catalog, choice model, locations, browsing.

    Product ids ``>= n`` act as padding that is never chosen and is priced
    at the catalog maximum; they may appear in oracle output but never in a
    returned placement.
    """

    products: list[Product]
    choice_model: "object"
    m: int
    browsing: "object"

    def __post_init__(self):
        if not self.products:
            raise ValueError("instance needs at least one product")
        if self.m < 1:
            raise ValueError("instance needs at least one location")
        for idx, p in enumerate(self.products):
            if p.id != idx:
                raise ValueError("product ids must be dense 0..n-1 in order")
        model_n = getattr(self.choice_model, "n", None)
        if model_n is not None and model_n != len(self.products):
            raise ValueError(
                f"choice model covers {model_n} products, catalog has {len(self.products)}"
            )
        line_m = getattr(self.browsing, "m", None)
        if line_m is not None and line_m != self.m:
            raise ValueError(f"browsing spans {line_m} locations, instance has {self.m}")
        max_loc = getattr(self.browsing, "max_location", None)
        if max_loc is not None and max_loc >= self.m:
            raise ValueError(f"browsing visits location {max_loc} >= m = {self.m}")
        self._prices = np.array([p.price for p in self.products], dtype=float)

    @property
    def n(self) -> int:
        return len(self.products)

    @property
    def prices(self) -> np.ndarray:
        return self._prices

    @property
    def i_star(self) -> int:
        """Highest-price product id (lowest id wins ties)."""
        return int(np.argmax(self._prices))

    def real_ids(self, ids: Iterable[int]) -> frozenset[int]:
        """Drop empty-slot sentinels and padding ids, keep catalog products."""
        n = self.n
        return frozenset(i for i in ids if 0 <= i < n)


def substream(seed: int, name: str) -> np.random.Generator:
    """Named random stream derived deterministically from one master seed."""
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    return np.random.default_rng([seed, zlib.crc32(name.encode("utf-8"))])
