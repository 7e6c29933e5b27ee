import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from noregret import (
    ConfigError,
    FairnessSpec,
    InfeasibleError,
    ObjectiveSpec,
    ParameterError,
    ThetaDomain,
    crossing_points,
    enumerate_optimal_set,
    fairest_optimal,
    quota_constrained_optimum,
    regret,
    sample_optimal_set,
    score_selection,
    top_k,
    utility_gap,
)
from noregret.discrete import OptimalSetEntry

from conftest import ids, random_population, random_theta
from oracles import brute_argmax

AZ, BZ, AI, BE = (frozenset(x) for x in ("AZ", "BZ", "AI", "BE"))


def test_top_k_examples(pop, obj):
    assert ids(top_k(pop, obj, "1/2", 2)) == {BZ}
    # at 3/8 Amy and Bob tie at 10 behind Zac at 10.25
    assert ids(top_k(pop, obj, Fraction(3, 8), 2)) == {AZ, BZ}
    assert ids(top_k(pop, obj, "0.7", 6)) == {frozenset("ABEIMZ")}


def test_top_k_matches_oracle_on_fixture(pop, obj):
    for t in [Fraction(i, 48) for i in range(49)]:
        for k in range(1, 7):
            assert ids(top_k(pop, obj, t, k)) == brute_argmax(pop, ("IQ", "grade"), (t, 1 - t), k)


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_top_k_matches_oracle_random(rng):
    pop = random_population(rng)
    obj = ObjectiveSpec.mixture(pop.schema, "a0", "a1")
    k = rng.randint(1, pop.n)
    t = random_theta(rng)
    assert ids(top_k(pop, obj, t, k)) == brute_argmax(pop, ("a0", "a1"), (t, 1 - t), k)


def test_top_k_bad_k(pop, obj):
    for k in (0, 7, -1):
        with pytest.raises(ConfigError):
            top_k(pop, obj, "1/2", k)


def test_quota_six_tied_solutions(pop, obj, quota30):
    sols = quota_constrained_optimum(pop, obj, "1/2", 2, quota30)
    assert ids(sols) == {frozenset({m, f}) for m in "BZ" for f in "AEI"}
    assert {score_selection(s, obj, "1/2") for s in sols} == {21}


def test_quota_vacuous_equals_top_k(pop, obj):
    fs = FairnessSpec(quota_label="f", quota=0)
    for t in ("0.2", "3/8", "0.5"):
        assert ids(quota_constrained_optimum(pop, obj, t, 2, fs)) == ids(top_k(pop, obj, t, 2))


def test_quota_all_women(pop, obj):
    fs = FairnessSpec(quota_label="f", quota=1)
    female = {it.id for it in pop if it.group == "f"}
    expected = brute_argmax(pop, ("IQ", "grade"), (Fraction(1, 2), Fraction(1, 2)), 2, keep=lambda s: s <= female)
    got = ids(quota_constrained_optimum(pop, obj, "1/2", 2, fs))
    assert got == expected
    # Amy, Eve and Isa all score 10 at theta = 1/2, so every female pair ties
    assert got == {frozenset("AE"), frozenset("AI"), frozenset("EI")}


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_quota_matches_oracle_random(rng):
    pop = random_population(rng)
    obj = ObjectiveSpec.mixture(pop.schema, "a0", "a1")
    k = rng.randint(1, pop.n)
    t = random_theta(rng)
    q = Fraction(rng.randint(0, 10), 10)
    fs = FairnessSpec(labels=("m", "f"), quota_label="f", quota=q)
    women = {it.id for it in pop if it.group == "f"}
    keep = lambda s: Fraction(len(s & women), len(s)) >= q
    expected = brute_argmax(pop, ("a0", "a1"), (t, 1 - t), k, keep=keep)
    if not expected:
        with pytest.raises(InfeasibleError):
            quota_constrained_optimum(pop, obj, t, k, fs)
        return
    got = quota_constrained_optimum(pop, obj, t, k, fs)
    assert ids(got) == expected
    rep = regret(pop, obj, t, k, fs)
    assert rep.regret >= 0
    assert (rep.regret == 0) == any(s in ids(top_k(pop, obj, t, k)) for s in expected)


def test_quota_infeasible(pop, obj):
    # only three women: a 4-of-4 female selection cannot exist
    with pytest.raises(InfeasibleError):
        quota_constrained_optimum(pop, obj, "1/2", 4, FairnessSpec(quota_label="f", quota=1))


def test_regret_examples(pop, obj, quota30):
    rep = regret(pop, obj, "1/2", 2, quota30)
    assert rep.utility == 22 and rep.fair_utility == 21 and rep.regret == 1
    assert regret(pop, obj, "1/2", 2, FairnessSpec(quota_label="f", quota=0)).regret == 0
    assert regret(pop, obj, "0.35", 2, quota30).regret == 0


def test_crossing_points_examples(pop, obj):
    full = crossing_points(pop, obj, ThetaDomain.interval(0, 1))
    assert {Fraction(1, 4), Fraction(3, 8), Fraction(3, 4)} <= set(full)
    assert full == sorted(full)
    assert crossing_points(pop, obj, ThetaDomain.interval("1/3", "2/3"), k=2) == [Fraction(3, 8)]


def test_crossing_points_oracle(pop, obj):
    # solve theta*IQ_i/10 + (1-theta)*g_i = theta*IQ_j/10 + (1-theta)*g_j pairwise
    rows = [(Fraction(it.value("IQ")) / 10, Fraction(it.value("grade"))) for it in pop]
    expected = set()
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            (a1, b1), (a2, b2) = rows[i], rows[j]
            denom = (a1 - b1) - (a2 - b2)
            if denom != 0:
                t = (b2 - b1) / denom
                if 0 <= t <= 1:
                    expected.add(t)
    assert crossing_points(pop, obj, ThetaDomain.interval(0, 1)) == sorted(expected)


def test_identical_items_do_not_cross():
    from noregret import ItemRecord, Population

    items = tuple(ItemRecord(str(i), (("x", 3), ("y", 5)), "m") for i in range(2))
    pop = Population(items)
    obj = ObjectiveSpec.mixture(pop.schema, "x", "y")
    assert crossing_points(pop, obj, ThetaDomain.interval(0, 1)) == []


def test_float_crossings_are_merged():
    from noregret import ItemRecord, Population

    # three lines meeting at theta = 0.3 up to rounding
    items = (
        ItemRecord("a", (("x", 1.0), ("y", 0.0)), "m"),
        ItemRecord("b", (("x", 0.0), ("y", 3.0 / 7.0)), "f"),
        ItemRecord("c", (("x", 0.3 / 0.3 * 0.6), ("y", 0.3 * 0.6 / 0.7 - 0.6 * 0.3 / 0.7 + 0.3 / 0.7 * 0.5)), "m"),
    )
    pop = Population(items)
    obj = ObjectiveSpec.mixture(pop.schema, "x", "y")
    pts = crossing_points(pop, obj, ThetaDomain.interval(0, 1))
    assert all(b - a > 1e-9 for a, b in zip(pts, pts[1:]))
    assert any(abs(p - 0.3) < 1e-12 for p in pts)


def test_enumerate_narrow(pop, obj, narrow):
    entries = enumerate_optimal_set(pop, obj, narrow, 2)
    assert [(frozenset(e.selection.ids), e.regions) for e in entries] == [
        (AZ, ((Fraction(1, 3), Fraction(3, 8)),)),
        (BZ, ((Fraction(3, 8), Fraction(2, 3)),)),
    ]


def test_enumerate_wide(pop, obj):
    entries = enumerate_optimal_set(pop, obj, ThetaDomain.interval("0.01", "0.99"), 2)
    assert [frozenset(e.selection.ids) for e in entries] == [AI, AZ, BZ, BE]
    assert entries[0].region == (Fraction(1, 100), Fraction(1, 4))
    assert entries[3].region == (Fraction(3, 4), Fraction(99, 100))


def test_enumerate_single_point(pop, obj):
    for t in ("3/8", "0.5", "0.2"):
        entries = enumerate_optimal_set(pop, obj, ThetaDomain.point(t), 2)
        assert ids(e.selection for e in entries) == ids(top_k(pop, obj, t, 2))
        assert all(e.regions == ((Fraction(t), Fraction(t)),) for e in entries)


def test_enumerate_rejects_multi_dim(pop):
    lin = ObjectiveSpec.linear(pop.schema, "IQ", "grade")
    with pytest.raises(ParameterError):
        enumerate_optimal_set(pop, lin, ThetaDomain.box([1, 1], [2, 2]), 2)


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False))
def test_enumerate_coverage_and_soundness(rng):
    pop = random_population(rng, n=rng.randint(2, 8))
    obj = ObjectiveSpec.mixture(pop.schema, "a0", "a1")
    k = rng.randint(1, pop.n)
    lo = Fraction(rng.randint(0, 10), 20)
    hi = lo + Fraction(rng.randint(0, 10), 20)
    entries = enumerate_optimal_set(pop, obj, ThetaDomain.interval(lo, hi), k)
    listed = ids(e.selection for e in entries)
    for _ in range(40):
        t = lo + (hi - lo) * Fraction(rng.randint(0, 1000), 1000)
        opt = brute_argmax(pop, ("a0", "a1"), (t, 1 - t), k)
        assert opt <= listed
        for e in entries:
            assert e.covers(t) == (frozenset(e.selection.ids) in opt)


def test_enumerate_coverage_fixture_1000(pop, obj, narrow):
    rng = random.Random(7)
    entries = enumerate_optimal_set(pop, obj, narrow, 2)
    listed = ids(e.selection for e in entries)
    for _ in range(1000):
        t = Fraction(1, 3) + Fraction(rng.randint(0, 10**6), 3 * 10**6)
        opt = ids(top_k(pop, obj, t, 2))
        assert opt <= listed
        for e in entries:
            if e.covers(t):
                assert frozenset(e.selection.ids) in opt


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False))
def test_monotone_growth(rng):
    pop = random_population(rng, n=rng.randint(2, 8))
    obj = ObjectiveSpec.mixture(pop.schema, "a0", "a1")
    fs = FairnessSpec.mismatch("m", "f")
    k = rng.randint(1, pop.n)
    a, b = sorted(Fraction(rng.randint(0, 40), 40) for _ in range(2))
    c, d = Fraction(rng.randint(0, a.numerator * 40 // a.denominator), 40), b + (1 - b) * Fraction(rng.randint(0, 4), 4)
    inner = enumerate_optimal_set(pop, obj, ThetaDomain.interval(a, b), k)
    outer = enumerate_optimal_set(pop, obj, ThetaDomain.interval(c, d), k)
    assert ids(e.selection for e in inner) <= ids(e.selection for e in outer)
    assert fairest_optimal(inner, fs).fairness <= fairest_optimal(outer, fs).fairness


def test_fairest_narrow(pop, obj, narrow, mismatch):
    res = fairest_optimal(enumerate_optimal_set(pop, obj, narrow, 2), mismatch)
    assert frozenset(res.selection.ids) == AZ
    assert res.fairness == 0
    assert res.region == (Fraction(1, 3), Fraction(3, 8))
    assert res.region[0] <= Fraction("0.35") <= res.region[1]
    assert res.theta == Fraction(17, 48)
    assert res.utility == score_selection(res.selection, obj, Fraction(17, 48))


def test_fairest_wide(pop, obj, mismatch):
    entries = enumerate_optimal_set(pop, obj, ThetaDomain.interval("0.01", "0.99"), 2)
    res = fairest_optimal(entries, mismatch)
    # Bob (m) + Eve (f) is balanced too, so it ties with Amy + Zac
    assert ids(e.selection for e in res.ties) == {AZ, BE}
    assert frozenset(res.selection.ids) == AZ  # earlier region start
    others = {frozenset(e.selection.ids): e for e in entries}
    from noregret import fairness_score

    assert {fairness_score(others[s].selection, mismatch) for s in (AI, BZ)} == {-2}


def test_fairest_single_and_empty(pop, obj, mismatch):
    entries = enumerate_optimal_set(pop, obj, ThetaDomain.point("1/2"), 2)
    res = fairest_optimal(entries, mismatch)
    assert res.winner is entries[0]
    with pytest.raises(ConfigError):
        fairest_optimal([], mismatch)


def test_fairest_prefer_tie_break(pop, obj):
    # all four wide-range entries tie under a vacuous score over one label pair
    fs = FairnessSpec.mismatch("f", "f")
    entries = enumerate_optimal_set(pop, obj, ThetaDomain.interval("0.01", "0.99"), 2)
    default = fairest_optimal(entries, fs)
    assert frozenset(default.selection.ids) == AI
    preferred = fairest_optimal(entries, fs, prefer=Fraction(1, 2), obj=obj)
    assert frozenset(preferred.selection.ids) == BZ
    assert preferred.theta == Fraction(1, 2)
    assert preferred.utility == 22
    with pytest.raises(ConfigError):
        fairest_optimal(entries, fs, prefer=Fraction(1, 2))


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False))
def test_no_regret_guarantee(rng):
    pop = random_population(rng)
    obj = ObjectiveSpec.mixture(pop.schema, "a0", "a1")
    k = rng.randint(1, pop.n)
    lo = Fraction(rng.randint(0, 10), 20)
    hi = lo + Fraction(rng.randint(0, 10), 20)
    res = fairest_optimal(enumerate_optimal_set(pop, obj, ThetaDomain.interval(lo, hi), k), FairnessSpec.mismatch("m", "f"))
    assert res.selection in top_k(pop, obj, res.theta, k)
    assert utility_gap(pop, obj, res.theta, res.selection) == 0


def test_sample_matches_exact_on_segment(pop, obj, narrow):
    lin = ObjectiveSpec.linear(pop.schema, "IQ", "grade")
    hull = ThetaDomain.hull([("1/3", "2/3"), ("2/3", "1/3")])
    sampled = sample_optimal_set(pop, lin, hull, 2, samples=200, seed=3)
    exact = enumerate_optimal_set(pop, obj, narrow, 2)
    assert ids(e.selection for e in sampled) == ids(e.selection for e in exact)
    for e in sampled:
        assert e.approximate
        for w in e.witnesses:
            assert e.selection in top_k(pop, lin, w, 2)


def test_sample_single_and_degenerate(pop):
    lin = ObjectiveSpec.linear(pop.schema, "IQ", "grade")
    box = ThetaDomain.box([1, 1], [2, 3])
    one = sample_optimal_set(pop, lin, box, 2, samples=1)
    assert ids(e.selection for e in one) == ids(top_k(pop, lin, (Fraction(3, 2), 2), 2))
    vertex = ThetaDomain.hull([("0.35", "0.65")])
    for n in (1, 5, 50):
        got = sample_optimal_set(pop, lin, vertex, 2, samples=n)
        assert ids(e.selection for e in got) == ids(top_k(pop, lin, ("0.35", "0.65"), 2))


def test_sample_box_is_subset_and_deterministic(pop):
    lin = ObjectiveSpec.linear(pop.schema, "IQ", "grade")
    box = ThetaDomain.box(["0.1", "0.1"], [1, 1])
    a = sample_optimal_set(pop, lin, box, 2, samples=300, seed=11)
    b = sample_optimal_set(pop, lin, box, 2, samples=300, seed=11)
    assert [(e.selection.key, e.witnesses) for e in a] == [(e.selection.key, e.witnesses) for e in b]
    for e in a:
        assert box.contains(e.theta)
        assert e.selection in top_k(pop, lin, e.theta, 2)


def test_sample_errors(pop, obj, narrow):
    with pytest.raises(ParameterError):
        sample_optimal_set(pop, obj, narrow, 2)
    lin = ObjectiveSpec.linear(pop.schema, "IQ", "grade")
    with pytest.raises(ConfigError):
        sample_optimal_set(pop, lin, ThetaDomain.box([1, 1], [2, 2]), 2, samples=0)


def test_entry_region_for_sampled_is_none(pop):
    lin = ObjectiveSpec.linear(pop.schema, "IQ", "grade")
    e = sample_optimal_set(pop, lin, ThetaDomain.box([1, 1], [2, 2]), 2, samples=3)[0]
    assert isinstance(e, OptimalSetEntry) and e.region is None
