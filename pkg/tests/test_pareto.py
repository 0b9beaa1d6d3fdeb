import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpdptw.evaluation import ObjectiveVector, Solution
from mpdptw.pareto import (
    InfeasibleEntryError,
    ParetoArchive,
    archive_insert,
    dominates,
    non_dominated_filter,
    nondominance_case,
    pareto_ranks,
    same_front,
)

S = Solution([[1]])  # placeholder routing for archive tests without an instance


def test_dominance_examples():
    assert dominates((1, 0, 100), (2, 0, 100))
    row1, row2 = (2, 0, 30803.5), (1, 31.75, 33543.9)
    assert not dominates(row1, row2) and not dominates(row2, row1)
    assert not dominates((1, 2, 3), (1, 2, 3))


def test_dominance_tolerance():
    assert not dominates((1, 1.0, 5.0), (1, 1.0 + 1e-12, 5.0))
    assert dominates((1, 1.0, 5.0), (1, 1.0 + 1e-6, 5.0))


def test_filter_dominance_figure():
    pts = [(1, 5), (2, 4.5), (2, 3), (4, 2.5), (4, 1)]
    lifted = [(1, a, b) for a, b in pts]
    assert non_dominated_filter(lifted) == [0, 2, 4]


def test_filter_identical_and_table2():
    assert non_dominated_filter([(1, 2, 3)] * 4) == [0, 1, 2, 3]
    table2 = [(2, 0, 30803.5), (1, 31.75, 33543.9), (1, 0, 51091.68)]
    assert non_dominated_filter(table2) == [0, 1, 2]
    assert non_dominated_filter([]) == []


def test_archive_examples():
    arc = ParetoArchive()
    assert arc.insert((1, 0, 10), S)
    assert not arc.insert((1, 5, 12), S)
    assert arc.objective_vectors() == [(1, 0, 10)]

    arc = ParetoArchive()
    arc.update([((1, 0, 10), S), ((2, 0, 4), S)])
    arc, accepted = archive_insert(arc, ((1, 0, 5), S))
    assert accepted
    assert arc.objective_vectors() == [(1, 0, 5), (2, 0, 4)]

    assert ParetoArchive().insert((3, 1.5, 2.5), S)


def test_archive_keeps_first_of_equal_vectors():
    arc = ParetoArchive()
    first, second = Solution([[1, 2]]), Solution([[3, 4]])
    assert arc.insert((1, 0, 10), first)
    assert not arc.insert((1, 0, 10 + 1e-12), second)
    assert arc.entries == [((1, 0, 10), first)]


def test_archive_rejects_infeasible(paper):
    arc = ParetoArchive(instance=paper)
    with pytest.raises(InfeasibleEntryError):
        arc.insert((1, 0, 0), Solution([[2, 8]]))


def test_archive_serialization():
    arc = ParetoArchive()
    arc.insert((2, 0.0, 397.25), Solution([[8, 2], [7, 9]]))
    arc.insert((1, 31.75, 350.0), Solution([[8, 2, 7, 9]]))
    assert arc.to_csv().splitlines() == [
        "f1,f2,f3,routes",
        "1,31.75,350.0,0 8 2 7 9 0",
        "2,0.0,397.25,0 8 2 0 | 0 7 9 0",
    ]
    records = json.loads(arc.to_json())
    assert records[1]["routes"] == [[8, 2], [7, 9]]
    assert records[1]["tours"] == "0 8 2 0 | 0 7 9 0"


def test_six_cases_enumerated():
    # each sign pattern once, with distinct components
    lo, hi = (1, 1.0, 1.0), (2, 2.0, 2.0)
    seen = {}
    for pick in itertools.product((0, 1), repeat=3):
        a = tuple(hi[k] if p else lo[k] for k, p in enumerate(pick))
        b = tuple(lo[k] if p else hi[k] for k, p in enumerate(pick))
        seen[pick] = nondominance_case(a, b)
    assert seen.pop((0, 0, 0)) is None
    assert seen.pop((1, 1, 1)) is None
    assert sorted(seen.values()) == [1, 2, 3, 4, 5, 6]


vectors = st.tuples(st.integers(0, 4), st.integers(0, 6), st.integers(0, 6))


@settings(max_examples=300, deadline=None)
@given(vectors, vectors, vectors)
def test_strict_partial_order(a, b, c):
    assert not dominates(a, a)
    assert not (dominates(a, b) and dominates(b, a))
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


@settings(max_examples=300, deadline=None)
@given(vectors, vectors)
def test_case_system_complements_dominance(a, b):
    if any(x == y for x, y in zip(a, b)):
        return
    mutual = not dominates(a, b) and not dominates(b, a)
    assert mutual == (nondominance_case(a, b) is not None)


@settings(max_examples=100, deadline=None)
@given(st.lists(vectors, max_size=25), st.randoms(use_true_random=False))
def test_archive_fixpoint_order_free_and_equals_filter(points, rnd):
    arc = ParetoArchive()
    for p in points:
        arc.insert(p, S)
    shuffled = list(points)
    rnd.shuffle(shuffled)
    other = ParetoArchive()
    for p in shuffled:
        other.insert(p, S)
    assert arc.objective_vectors() == other.objective_vectors()
    kept = {tuple(points[i]) for i in non_dominated_filter(points)}
    assert set(arc.objective_vectors()) == kept
    vecs = arc.objective_vectors()
    for u, v in itertools.permutations(vecs, 2):
        assert not dominates(u, v)


@settings(max_examples=100, deadline=None)
@given(st.lists(vectors, max_size=30))
def test_ranks_match_brute_force_peeling(points):
    ranks = pareto_ranks(points)
    remaining = list(range(len(points)))
    rank = 0
    while remaining:
        sub = [points[i] for i in remaining]
        front = [remaining[i] for i in non_dominated_filter(sub)]
        assert sorted(int(k) for k in (i for i in range(len(points)) if ranks[i] == rank)) == front
        remaining = [i for i in remaining if i not in front]
        rank += 1


def test_same_front_tolerance():
    a = [ObjectiveVector(1, 0.5, 3.0)]
    assert same_front(a, [(1, 0.5 + 1e-12, 3.0)])
    assert not same_front(a, [(1, 0.5 + 1e-6, 3.0)])
    assert not same_front(a, [])


def test_archive_monotone_under_random_inserts():
    rnd = random.Random(5)
    arc = ParetoArchive()
    probes = [(rnd.randint(0, 3), rnd.random() * 5, rnd.random() * 5) for _ in range(200)]
    covered_before = set()
    for _ in range(300):
        arc.insert((rnd.randint(0, 3), rnd.random() * 5, rnd.random() * 5), S)
        covered = {p for p in probes if arc.covers(p)}
        assert covered >= covered_before
        covered_before = covered
