import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from santafair import (
    Hyperedge,
    Stuck,
    allocation_value,
    bundle_value,
    extend_matching,
    find_addable_edge,
    minimize_edge,
    opt_star,
    signature,
    solve,
)
from santafair.search import SearchState, check_state_invariants, edge_is_minimal

from conftest import brute_minimal_subsets, make_instance, small_corpus


def F(a, b=1):
    return Fraction(a, b)


# ---------------------------------------------------------------------------
# minimize_edge
# ---------------------------------------------------------------------------


def test_minimize_three_units():
    inst = make_instance({"a": F(1), "b": F(1), "c": F(1)}, {"p": {"a", "b", "c"}})
    assert minimize_edge(inst, {"a", "b", "c"}, F(2)) == frozenset({"b", "c"})


def test_minimize_singleton_already_minimal():
    inst = make_instance({"a": F(3)}, {"p": {"a"}})
    assert minimize_edge(inst, {"a"}, F(2)) == frozenset({"a"})


def test_minimize_removes_cheap_elements_first():
    inst = make_instance(
        {"a": F(1), "b": F(1, 2), "c": F(1, 2), "d": F(1, 2)},
        {"p": {"a", "b", "c", "d"}},
    )
    got = minimize_edge(inst, {"a", "b", "c", "d"}, F(3, 2))
    assert got == frozenset({"a", "d"})
    # every proper subset of the result is below the threshold
    total = bundle_value(inst, got)
    for k in range(len(got)):
        for sub in itertools.combinations(got, k):
            assert bundle_value(inst, sub) < F(3, 2)
    assert total >= F(3, 2)


def test_minimize_rejects_short_bundle():
    inst = make_instance({"a": F(1)}, {"p": {"a"}})
    with pytest.raises(ValueError):
        minimize_edge(inst, {"a"}, F(2))


@settings(deadline=None, max_examples=60)
@given(data=st.data())
def test_minimize_edge_always_minimal_property(data):
    pool = [F(1, 3), F(1, 2), F(2, 3), F(1), F(2)]
    nres = data.draw(st.integers(1, 6), label="resources")
    values = {
        f"r{k}": data.draw(st.sampled_from(pool), label=f"v{k}")
        for k in range(nres)
    }
    inst = make_instance(values, {"p": set(values)})
    total = bundle_value(inst, values)
    tau = data.draw(st.sampled_from([F(1, 3), F(1, 2), F(1), F(3, 2)]), label="tau")
    if total < tau:
        with pytest.raises(ValueError):
            minimize_edge(inst, set(values), tau)
        return
    got = minimize_edge(inst, set(values), tau)
    assert edge_is_minimal(inst, got, tau)


def test_minimized_results_are_minimal_on_corpus():
    for inst in small_corpus(20, seed=2000):
        for p in inst.players:
            wanted = inst.desire_set(p)
            total = bundle_value(inst, wanted)
            for tau in (F(1, 2), F(1), F(2)):
                if total < tau:
                    continue
                got = minimize_edge(inst, wanted, tau)
                assert edge_is_minimal(inst, got, tau)
                assert got in brute_minimal_subsets(inst, p, tau)


# ---------------------------------------------------------------------------
# find_addable_edge
# ---------------------------------------------------------------------------


def empty_state(i0, t):
    return SearchState(i0=i0, threshold=t, matching={})


def test_fat_singleton_found_first():
    inst = make_instance(
        {"f": F(2), "x": F(1), "y": F(1)}, {"p": {"f", "x", "y"}}
    )
    got = find_addable_edge(inst, empty_state("p", F(2)))
    assert got == Hyperedge("p", frozenset({"f"}))


def test_cheapest_fat_resource_wins():
    inst = make_instance({"big": F(5), "fit": F(2)}, {"p": {"big", "fit"}})
    got = find_addable_edge(inst, empty_state("p", F(2)))
    assert got == Hyperedge("p", frozenset({"fit"}))


def test_insufficient_thin_resources_yield_none():
    inst = make_instance({"x": F(1, 4), "y": F(1, 4)}, {"p": {"x", "y"}})
    assert find_addable_edge(inst, empty_state("p", F(1))) is None


def brute_admissible_edges(instance, state):
    """All edges of the hypergraph not in M whose resources avoid the
    addable and blocking edges, for candidate players."""
    taken = state.forbidden_resources()
    candidates = state.blocked_players() | {state.i0}
    matched = set(state.matching.values())
    out = []
    for p in instance.sort_players(candidates):
        for resources in brute_minimal_subsets(instance, p, state.threshold):
            edge = Hyperedge(p, resources)
            if edge in matched:
                continue
            if resources & taken:
                continue
            out.append(edge)
    return out


def test_rich_player_fully_forbidden():
    # the target desires plenty, but every desired resource already sits
    # inside the open addable/blocking edges
    inst = make_instance(
        {"a": F(1), "b": F(1)}, {"p1": {"a", "b"}, "p2": {"a", "b"}}
    )
    blocked = Hyperedge("p1", frozenset({"a", "b"}))
    state = SearchState(
        i0="p2",
        threshold=F(2),
        matching={"p1": blocked},
        addable=[Hyperedge("p2", frozenset({"a", "b"}))],
        blockers=[frozenset({blocked})],
    )
    check_state_invariants(inst, state)
    assert find_addable_edge(inst, state) is None
    assert brute_admissible_edges(inst, state) == []


def test_found_edges_agree_with_brute_search_on_corpus():
    for inst in small_corpus(20, seed=2400):
        for p in inst.players:
            for tau in (F(1, 2), F(1)):
                state = empty_state(p, tau)
                got = find_addable_edge(inst, state)
                brute = brute_admissible_edges(inst, state)
                if got is None:
                    assert brute == []
                else:
                    assert got in brute


# ---------------------------------------------------------------------------
# extend_matching
# ---------------------------------------------------------------------------


def test_extend_empty_matching_single_iteration(t1):
    state = extend_matching(t1, {}, "p1", F(1))
    assert set(state.matching) == {"p1"}
    assert state.main_iterations == 1
    assert state.inner_iterations == 0


def test_extend_swap_trace():
    # f1 desired by both, f2 only by p1; matching p1 on f1 forces a swap
    t = F(2)
    inst = make_instance(
        {"f1": F(2), "f2": F(2)}, {"p1": {"f1", "f2"}, "p2": {"f1"}}
    )
    matching = {"p1": Hyperedge("p1", frozenset({"f1"}))}
    state = extend_matching(inst, matching, "p2", t)
    assert state.matching == {
        "p1": Hyperedge("p1", frozenset({"f2"})),
        "p2": Hyperedge("p2", frozenset({"f1"})),
    }
    assert state.main_iterations == 2
    assert state.inner_iterations == 1


def test_extend_stuck_surrenders_state(t2):
    matching = {"p1": Hyperedge("p1", frozenset({"f"}))}
    with pytest.raises(Stuck) as err:
        extend_matching(t2, matching, "p2", F(1))
    state = err.value.state
    assert state.addable == [Hyperedge("p2", frozenset({"f"}))]
    assert state.blockers == [frozenset({Hyperedge("p1", frozenset({"f"}))})]
    check_state_invariants(t2, state)


def test_extend_rejects_matched_target(t1):
    matching = {"p1": Hyperedge("p1", frozenset({"a"}))}
    with pytest.raises(ValueError, match="already matched"):
        extend_matching(t1, matching, "p1", F(1))


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def test_solve_t1_low_threshold(t1):
    result = solve(t1, F(1, 4))
    assert set(result.allocation.bundles) == {"p1", "p2"}
    for p, bundle in result.allocation.bundles.items():
        assert bundle_value(t1, bundle) >= F(1, 4)
    assert allocation_value(t1, result.allocation) >= F(1, 4)


def test_solve_single_player_full_value():
    inst = make_instance(
        {"a": F(1), "b": F(1, 2)}, {"p": {"a", "b"}}
    )
    t = F(3, 2)
    result = solve(inst, t)
    assert bundle_value(inst, result.allocation.bundles["p"]) >= t


def test_solve_t2_stuck(t2):
    with pytest.raises(Stuck):
        solve(t2, F(1))


def test_solve_rejects_nonpositive_threshold(t1):
    with pytest.raises(ValueError):
        solve(t1, F(0))


def test_solve_at_guaranteed_threshold_on_corpus():
    for inst in small_corpus(25, seed=2800):
        star = opt_star(inst)
        if star == 0:
            continue
        t = star * F(6, 23)
        result = solve(inst, t)
        for p in inst.players:
            assert bundle_value(inst, result.allocation.bundles[p]) >= t


# ---------------------------------------------------------------------------
# signature and termination instrumentation
# ---------------------------------------------------------------------------


def test_signature_empty_list():
    state = empty_state("p", F(1))
    assert signature(state) == (math.inf,)


def test_signature_orders_blocking_counts():
    e1 = Hyperedge("p1", frozenset({"a"}))
    e2 = Hyperedge("p2", frozenset({"b"}))
    m1 = Hyperedge("q1", frozenset({"a", "x"}))
    m2 = Hyperedge("q2", frozenset({"a", "y"}))
    m3 = Hyperedge("q3", frozenset({"b", "z"}))
    state = SearchState(
        i0="p0",
        threshold=F(1),
        matching={},
        addable=[e1, e2],
        blockers=[frozenset({m1, m2}), frozenset({m3})],
    )
    assert signature(state) == (2, 1, math.inf)


def test_signatures_strictly_decrease_and_bound_holds():
    events = []

    def tracer(kind, data):
        events.append((kind, data))

    total_calls = 0
    for inst in small_corpus(25, seed=3200):
        star = opt_star(inst)
        if star == 0:
            continue
        result = solve(inst, star * F(6, 23), trace=tracer)
        for call in result.calls:
            total_calls += 1
            sigs = call.signatures
            assert all(sigs[k] > sigs[k + 1] for k in range(len(sigs) - 1))
            # iteration bound relative to the matching size at call start
            # (call order: one new player per call, so size = index)
        for idx, call in enumerate(result.calls):
            assert call.main_iterations <= 2**idx
    assert total_calls > 0
    assert any(kind == "swap" for kind, _ in events)
