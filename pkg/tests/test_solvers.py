from itertools import product as iter_product

import numpy as np
import pytest

from placement_opt import (
    EMPTY_SLOT,
    BruteForceOracle,
    EstimationPlan,
    Instance,
    LineBrowsing,
    MnlModel,
    Product,
    SamplerBrowsing,
    SizeGuardError,
    SolveReport,
    WEvaluator,
    best_of_many_line,
    brute_force_placement,
    check_pair_objective_properties,
    check_restricted_revenue_properties,
    evaluate_exact,
    expected_revenue,
    fill_empty,
    full_support,
    gen_first_slot_only,
    gen_random,
    gen_uniform_line,
    markov_deterministic_placement,
    randomized_placement,
    uniform_price_matroid_greedy,
)
from placement_opt.oracle import GreedyUniformOracle

from helpers import twin_optimum


# ---------------------------------------------------------------------------
# exact evaluation


def test_full_support_value_equals_assortment_revenue():
    inst = gen_random(4, 3, model="mnl", browsing="full", seed=0)
    slots = (2, 0, 2)
    expected = expected_revenue(inst.choice_model, inst.prices, {0, 2})
    assert evaluate_exact(inst, slots) == pytest.approx(expected, abs=1e-12)


def test_tradeoff_instance_known_values():
    inst = gen_first_slot_only(2)
    pricey_first = (0,) + (0,) * 1
    popular_first = (2,) + (0,) * 1
    assert evaluate_exact(inst, pricey_first) == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert evaluate_exact(inst, popular_first) == pytest.approx(0.5, abs=1e-12)


def test_line_value_is_prefix_weighted_sum():
    inst = gen_random(4, 3, model="mmnl", browsing="line", seed=3)
    slots = (1, 3, 1)
    theta = inst.browsing.theta
    manual = sum(
        theta[j]
        * expected_revenue(inst.choice_model, inst.prices, set(slots[: j + 1]))
        for j in range(3)
    )
    assert evaluate_exact(inst, slots) == pytest.approx(manual, abs=1e-12)


def test_evaluator_rejects_wrong_length():
    inst = gen_random(3, 2, model="mnl", seed=0)
    with pytest.raises(ValueError):
        evaluate_exact(inst, (0,))


# ---------------------------------------------------------------------------
# fill_empty


def test_fill_empty_all_and_none():
    inst = gen_random(4, 3, model="mnl", seed=1)
    star = inst.i_star
    assert fill_empty(inst, (EMPTY_SLOT,) * 3) == (star,) * 3
    assert fill_empty(inst, (1, 2, 0)) == (1, 2, 0)


def test_fill_empty_replaces_padding_ids():
    inst = gen_random(3, 2, model="mnl", seed=1)
    assert fill_empty(inst, (5, 1)) == (inst.i_star, 1)


def test_fill_empty_never_decreases_value():
    rng = np.random.default_rng(5)
    for seed in range(20):
        inst = gen_random(4, 3, model="markov", browsing="explicit", seed=seed)
        slots = [int(i) for i in rng.integers(0, 4, size=3)]
        for j in range(3):
            if rng.random() < 0.5:
                slots[j] = EMPTY_SLOT
        before = evaluate_exact(inst, tuple(slots))
        after = evaluate_exact(inst, fill_empty(inst, slots))
        assert after >= before - 1e-12


# ---------------------------------------------------------------------------
# brute force


def test_brute_force_single_slot_picks_best_solo_product():
    inst = gen_random(5, 1, model="mnl", browsing="full", seed=2)
    report = brute_force_placement(inst)
    solo = [
        expected_revenue(inst.choice_model, inst.prices, {i}) for i in range(5)
    ]
    assert report.w_exact == pytest.approx(max(solo), abs=1e-12)
    assert report.placement == (int(np.argmax(solo)),)


def test_brute_force_matches_recursive_twin():
    for seed in range(10):
        inst = gen_random(3, 2, model="mnl", browsing="explicit", seed=seed)
        assert brute_force_placement(inst).w_exact == pytest.approx(
            twin_optimum(inst), abs=1e-9
        )


def test_brute_force_guard():
    inst = gen_random(40, 4, model="mnl", seed=0)
    with pytest.raises(SizeGuardError):
        brute_force_placement(inst)


def test_singleton_uniform_optimum_repeats_best_solo_product():
    for seed in range(5):
        inst = gen_random(4, 3, model="mnl", browsing="singleton", seed=seed)
        report = brute_force_placement(inst)
        solo = [
            expected_revenue(inst.choice_model, inst.prices, {i}) for i in range(4)
        ]
        best = int(np.argmax(solo))
        assert report.placement == (best,) * 3
        assert report.w_exact == pytest.approx(max(solo), abs=1e-12)


# ---------------------------------------------------------------------------
# best of many (prefix placements on a line)


def test_best_of_many_single_slot_is_best_assortment_of_one():
    inst = gen_random(5, 1, model="mnl", browsing="line", seed=4)
    oracle = BruteForceOracle(inst)
    report = best_of_many_line(inst, oracle)
    assert report.placement == tuple(sorted(oracle.best_assortment(1)))
    assert report.k == 1


def test_best_of_many_on_uniform_line_reaches_quarter_bound():
    m = 16
    inst = gen_uniform_line(m)
    report = best_of_many_line(inst, BruteForceOracle(inst))
    assert report.w_exact >= (m + 1) / 4.0


def test_best_of_many_dominates_each_prefix_candidate():
    inst = gen_random(5, 4, model="mnl", browsing="line", seed=6)
    oracle = BruteForceOracle(inst)
    report = best_of_many_line(inst, oracle)
    for k in range(1, 5):
        members = sorted(oracle.best_assortment(k))
        slots = fill_empty(inst, tuple(members) + (EMPTY_SLOT,) * (4 - k))
        assert report.w_exact >= evaluate_exact(inst, slots) - 1e-12


def test_best_of_many_bound_against_brute_force():
    for seed in range(20):
        inst = gen_random(4, 4, model="mnl", browsing="line", seed=seed)
        opt = brute_force_placement(inst).w_exact
        report = best_of_many_line(inst, BruteForceOracle(inst))
        assert report.w_exact >= opt / max(1.0, np.log2(inst.m)) - 1e-9


def test_best_of_many_requires_line_browsing():
    inst = gen_random(3, 2, model="mnl", browsing="explicit", seed=0)
    with pytest.raises(ValueError):
        best_of_many_line(inst, BruteForceOracle(inst))


# ---------------------------------------------------------------------------
# randomized placement


def test_randomized_single_member_assortment_is_deterministic():
    inst = gen_random(3, 3, model="mnl", browsing="singleton", seed=7)
    oracle = BruteForceOracle(inst)
    only = next(iter(oracle.best_assortment(1)))
    report = randomized_placement(inst, oracle, repetitions=1, seed=0)
    if report.k == 1:
        assert report.placement == (only,) * 3


def test_randomized_close_to_optimum_with_many_repetitions():
    inst = gen_random(3, 3, model="mnl", browsing="singleton", seed=7)
    opt = brute_force_placement(inst).w_exact
    report = randomized_placement(
        inst, BruteForceOracle(inst), repetitions=200, seed=11
    )
    assert report.w_exact >= 0.95 * opt


def test_randomized_replication_lower_bound_exact_enumeration():
    # over all 27 equally likely triples drawn from a 3-member assortment,
    # the mean assortment revenue keeps at least 19/27 of the full revenue
    inst = gen_random(6, 3, model="mnl", seed=9)
    oracle = BruteForceOracle(inst)
    members = sorted(oracle.best_assortment(3))
    full = expected_revenue(
        inst.choice_model, inst.prices, [i for i in members if i < inst.n]
    )
    mean = np.mean(
        [
            expected_revenue(
                inst.choice_model,
                inst.prices,
                {i for i in triple if i < inst.n},
            )
            for triple in iter_product(members, repeat=3)
        ]
    )
    assert mean >= (1.0 - (2.0 / 3.0) ** 3) * full - 1e-12


def test_randomized_is_reproducible_bit_for_bit():
    inst = gen_random(4, 3, model="mmnl", browsing="explicit", seed=13)
    oracle = BruteForceOracle(inst)
    a = randomized_placement(inst, oracle, repetitions=16, seed=21)
    b = randomized_placement(inst, oracle, repetitions=16, seed=21)
    assert a.placement == b.placement
    assert a.w_exact == b.w_exact
    assert a.k == b.k


def test_randomized_estimation_path_with_sampler_browsing():
    base = gen_random(3, 2, model="mnl", browsing="line", seed=15)
    theta = base.browsing.theta
    cum = np.cumsum(np.concatenate(([1.0 - theta.sum()], theta)))

    def draw(rng):
        return frozenset(range(int(np.searchsorted(cum, rng.random(), side="right"))))

    hidden = Instance(base.products, base.choice_model, base.m, SamplerBrowsing(draw))
    plan = EstimationPlan.for_instance(hidden, 0.2, 0.2, samples_override=2000)
    report = randomized_placement(
        hidden, BruteForceOracle(base), repetitions=8, seed=3, plan=plan
    )
    assert report.w_exact is None and report.w_estimate is not None
    assert report.w_estimate.samples == 2000
    exact = evaluate_exact(base, report.placement)
    assert abs(report.w_estimate.value - exact) <= 0.2 * base.prices.max()


def test_randomized_requires_plan_for_sampler_browsing():
    base = gen_random(3, 2, model="mnl", browsing="line", seed=15)
    hidden = Instance(
        base.products, base.choice_model, base.m, SamplerBrowsing(lambda rng: {0})
    )
    with pytest.raises(ValueError):
        randomized_placement(hidden, BruteForceOracle(base), seed=0)


# ---------------------------------------------------------------------------
# uniform-price greedy


def test_uniform_greedy_single_slot_is_optimal():
    inst = gen_random(4, 1, model="ranked", price_range=(2.0, 2.0), browsing="full", seed=1)
    report = uniform_price_matroid_greedy(inst)
    assert report.w_exact == pytest.approx(
        brute_force_placement(inst).w_exact, abs=1e-12
    )


def test_uniform_greedy_full_support_reduces_to_greedy_assortment():
    inst = gen_random(5, 3, model="mnl", price_range=(1.0, 1.0), browsing="full", seed=2)
    report = uniform_price_matroid_greedy(inst)
    greedy_set = GreedyUniformOracle(inst).greedy_assortment(3)
    assert frozenset(report.placement) == greedy_set
    assert report.w_exact == pytest.approx(
        expected_revenue(inst.choice_model, inst.prices, greedy_set), abs=1e-12
    )


def test_uniform_greedy_half_bound_and_typical_quality():
    ratios = []
    for seed in range(20):
        family = ["mnl", "mmnl", "markov", "ranked"][seed % 4]
        inst = gen_random(
            4, 3, model=family, price_range=(1.0, 1.0), browsing="explicit", seed=seed
        )
        opt = brute_force_placement(inst).w_exact
        report = uniform_price_matroid_greedy(inst)
        assert report.w_exact >= 0.5 * opt - 1e-9
        if opt > 0:
            ratios.append(report.w_exact / opt)
    assert min(ratios) >= 1.0 - 1.0 / np.e  # observed, not guaranteed


def test_uniform_greedy_rejects_heterogeneous_prices():
    inst = gen_random(4, 2, model="mnl", price_range=(1.0, 9.0), seed=3)
    with pytest.raises(ValueError):
        uniform_price_matroid_greedy(inst)


# ---------------------------------------------------------------------------
# markov greedy


def test_markov_greedy_single_slot_is_optimal():
    inst = gen_random(4, 1, model="markov", browsing="full", seed=5)
    report = markov_deterministic_placement(inst, BruteForceOracle(inst))
    assert report.w_exact == pytest.approx(
        brute_force_placement(inst).w_exact, abs=1e-12
    )


def test_markov_greedy_is_deterministic():
    inst = gen_random(5, 3, model="markov", browsing="explicit", seed=6)
    oracle = BruteForceOracle(inst)
    a = markov_deterministic_placement(inst, oracle)
    b = markov_deterministic_placement(inst, oracle)
    assert a.placement == b.placement and a.w_exact == b.w_exact and a.k == b.k


def test_markov_greedy_bound_against_brute_force():
    for seed in range(12):
        model = "markov" if seed % 2 else "mnl"
        inst = gen_random(4, 3, model=model, browsing="explicit", seed=seed)
        opt = brute_force_placement(inst).w_exact
        report = markov_deterministic_placement(inst, BruteForceOracle(inst))
        bound = 0.5 * (1.0 - 1.0 / np.e) / max(1.0, np.log2(inst.m))
        assert report.w_exact >= bound * opt - 1e-9


def test_markov_greedy_rejects_other_models():
    inst = gen_random(4, 2, model="mmnl", seed=7)
    with pytest.raises(ValueError):
        markov_deterministic_placement(inst, BruteForceOracle(inst))


# ---------------------------------------------------------------------------
# structural properties


def test_adding_priciest_product_never_hurts():
    for idx, family in enumerate(["mnl", "mmnl", "markov", "ranked"]):
        inst = gen_random(6, 2, model=family, seed=30 + idx)
        star = inst.i_star
        others = [i for i in range(6) if i != star]
        for mask in range(2 ** len(others)):
            subset = [others[t] for t in range(len(others)) if mask >> t & 1]
            base = expected_revenue(inst.choice_model, inst.prices, subset)
            grown = expected_revenue(
                inst.choice_model, inst.prices, subset + [star]
            )
            assert grown >= base - 1e-9


def test_pair_objective_monotone_submodular_with_uniform_prices():
    inst = gen_random(3, 2, model="mnl", price_range=(1.0, 1.0), browsing="explicit", seed=8)
    assert check_pair_objective_properties(inst) == []


def test_pair_objective_checker_flags_nonuniform_counterexample():
    # a cheap very popular product makes revenue non-monotone, which the
    # lattice checker must report
    inst = Instance(
        [Product(0, 10.0), Product(1, 1.0)],
        MnlModel([1.0, 10.0]),
        1,
        full_support(1),
    )
    assert check_pair_objective_properties(inst) != []


def test_restricted_revenue_checker_flags_same_counterexample():
    inst = Instance(
        [Product(0, 10.0), Product(1, 1.0)],
        MnlModel([1.0, 10.0]),
        1,
        full_support(1),
    )
    assert check_restricted_revenue_properties(inst, [0, 1]) != []


def test_restricted_revenue_properties_hold_on_oracle_assortments():
    for seed in range(6):
        inst = gen_random(5, 3, model="markov", browsing="explicit", seed=40 + seed)
        oracle = BruteForceOracle(inst)
        for k in range(1, 4):
            members = oracle.best_assortment(k)
            assert check_restricted_revenue_properties(inst, members) == []


# ---------------------------------------------------------------------------
# reports


def test_solve_report_shape_and_serialization():
    inst = gen_random(3, 2, model="mnl", browsing="line", seed=50)
    report = best_of_many_line(inst, BruteForceOracle(inst), seed=9)
    data = report.to_dict()
    assert set(data) == {
        "algorithm",
        "placement",
        "w_exact",
        "w_estimate",
        "k",
        "seed",
        "ms",
    }
    assert data["seed"] == 9
    assert data["w_estimate"] is None
    assert all(0 <= i < inst.n for i in data["placement"])
    with pytest.raises(ValueError):
        SolveReport("x", (0,), None, None, None, 0, 0)


def test_more_locations_than_products():
    # padding ids fill out oracle assortments but never reach a placement
    inst = gen_random(2, 4, model="mnl", browsing="line", seed=99)
    oracle = BruteForceOracle(inst)
    assert sorted(i for i in oracle.best_assortment(4) if i >= inst.n) == [2, 3]
    for report in [
        best_of_many_line(inst, oracle),
        randomized_placement(inst, oracle, repetitions=16, seed=1),
        markov_deterministic_placement(inst, oracle),
        brute_force_placement(inst),
    ]:
        assert all(0 <= i < inst.n for i in report.placement)
        assert report.w_exact <= brute_force_placement(inst).w_exact + 1e-12


def test_evaluator_sharing_is_consistent():
    inst = gen_random(4, 3, model="mnl", browsing="line", seed=51)
    shared = WEvaluator(inst)
    oracle = BruteForceOracle(inst)
    direct = best_of_many_line(inst, oracle).w_exact
    via_shared = best_of_many_line(inst, oracle, evaluator=shared).w_exact
    assert direct == pytest.approx(via_shared, abs=0.0)
