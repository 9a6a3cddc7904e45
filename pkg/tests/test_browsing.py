import numpy as np
import pytest

from placement_opt import (
    EnumerationUnsupportedError,
    ExplicitBrowsing,
    LineBrowsing,
    SamplerBrowsing,
    browsing_from_spec,
    full_support,
    singleton_uniform,
)


def test_point_mass_always_returns_its_set():
    browsing = ExplicitBrowsing([({0, 1}, 1.0)])
    rng = np.random.default_rng(0)
    for _ in range(100):
        assert browsing.sample(rng) == frozenset({0, 1})


def test_line_sampling_frequency():
    browsing = LineBrowsing([0.5, 0.5])
    rng = np.random.default_rng(1)
    draws = [browsing.sample(rng) for _ in range(100_000)]
    freq = sum(1 for s in draws if s == frozenset({0})) / len(draws)
    assert 0.49 <= freq <= 0.51


def test_sampling_is_deterministic_given_seed():
    browsing = LineBrowsing([0.2, 0.3, 0.4])
    first = [browsing.sample(np.random.default_rng(7)) for _ in range(1)]
    a = np.random.default_rng(7)
    b = np.random.default_rng(7)
    assert [browsing.sample(a) for _ in range(50)] == [
        browsing.sample(b) for _ in range(50)
    ]
    assert first[0] == browsing.sample(np.random.default_rng(7))


def test_line_samples_are_prefixes():
    browsing = LineBrowsing([0.1, 0.2, 0.3, 0.2])
    rng = np.random.default_rng(2)
    for _ in range(500):
        drawn = browsing.sample(rng)
        assert drawn == frozenset(range(len(drawn)))


def test_line_support_enumeration():
    browsing = LineBrowsing([0.3, 0.7])
    assert browsing.support() == [
        (frozenset({0}), 0.3),
        (frozenset({0, 1}), 0.7),
    ]


def test_line_residual_mass_goes_to_empty_set():
    browsing = LineBrowsing([0.25, 0.25])
    support = dict(browsing.support())
    assert support[frozenset()] == pytest.approx(0.5)
    assert sum(support.values()) == pytest.approx(1.0, abs=1e-9)


def test_explicit_merges_duplicates():
    browsing = ExplicitBrowsing([([0], 0.25), ((0,), 0.25), ([1, 0], 0.5)])
    assert browsing.support() == [
        (frozenset({0}), 0.5),
        (frozenset({0, 1}), 0.5),
    ]


def test_sampler_browsing_cannot_enumerate():
    browsing = SamplerBrowsing(lambda rng: {int(rng.integers(0, 3))})
    with pytest.raises(EnumerationUnsupportedError):
        browsing.support()
    rng = np.random.default_rng(3)
    assert browsing.sample(rng) <= {0, 1, 2}
    a = [browsing.sample(np.random.default_rng(5)) for _ in range(20)]
    b = [browsing.sample(np.random.default_rng(5)) for _ in range(20)]
    assert a == b


def test_singleton_uniform():
    browsing = singleton_uniform(2)
    assert browsing.support() == [
        (frozenset({0}), 0.5),
        (frozenset({1}), 0.5),
    ]
    assert singleton_uniform(1).support() == [(frozenset({0}), 1.0)]
    probs = [p for _, p in singleton_uniform(4).support()]
    assert sum(probs) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        singleton_uniform(0)


def test_full_support_is_a_point_mass_on_all_locations():
    browsing = full_support(3)
    assert browsing.support() == [(frozenset({0, 1, 2}), 1.0)]


def test_support_probabilities_sum_to_one():
    rng = np.random.default_rng(4)
    for _ in range(20):
        size = int(rng.integers(1, 6))
        probs = rng.dirichlet(np.ones(size))
        sets = rng.choice(2**4, size=size, replace=False)
        browsing = ExplicitBrowsing(
            [([j for j in range(4) if mask >> j & 1], float(p)) for mask, p in zip(sets, probs)]
        )
        assert sum(p for _, p in browsing.support()) == pytest.approx(1.0, abs=1e-9)


def test_empirical_matches_support_in_total_variation():
    rng = np.random.default_rng(6)
    masks = rng.choice(2**6, size=8, replace=False)
    probs = rng.dirichlet(np.ones(8) * 2)
    browsing = ExplicitBrowsing(
        [([j for j in range(6) if mask >> j & 1], float(p)) for mask, p in zip(masks, probs)]
    )
    counts: dict[frozenset, int] = {}
    draws = 100_000
    sample_rng = np.random.default_rng(8)
    for _ in range(draws):
        s = browsing.sample(sample_rng)
        counts[s] = counts.get(s, 0) + 1
    tv = 0.5 * sum(
        abs(counts.get(s, 0) / draws - p) for s, p in browsing.support()
    )
    assert tv <= 0.01


def test_validation_errors():
    with pytest.raises(ValueError):
        ExplicitBrowsing([([0], 0.5)])  # does not sum to 1
    with pytest.raises(ValueError):
        ExplicitBrowsing([([0], -0.1), ([1], 1.1)])
    with pytest.raises(ValueError):
        LineBrowsing([0.8, 0.4])  # sums beyond 1
    with pytest.raises(ValueError):
        LineBrowsing([-0.1, 0.5])
    with pytest.raises(ValueError):
        LineBrowsing([])


def test_browsing_spec_round_trip():
    for browsing in [
        LineBrowsing([0.2, 0.5, 0.1]),
        ExplicitBrowsing([([0], 0.4), ([0, 2], 0.6)]),
        singleton_uniform(3),
    ]:
        spec = browsing.to_spec()
        assert browsing_from_spec(spec).to_spec() == spec
    with pytest.raises(ValueError):
        browsing_from_spec({"type": "mystery"})
    with pytest.raises(ValueError):
        SamplerBrowsing(lambda rng: set()).to_spec()
