"""Local search that grows a matching of player-disjoint resource bundles.

Edges pair one player with a minimal bundle from its desire set worth at
least the working threshold ``t`` (minimal: dropping any single resource
falls below ``t``).  A matching assigns pairwise resource-disjoint edges,
at most one per player; a full matching is an allocation where everyone
gets at least ``t``.

:func:`extend_matching` adds one player to a partial matching.  It keeps an
ordered list of *addable* edges - candidates it hopes to insert - and, for
each addable edge, the set of matched *blocking* edges overlapping it.  New
addable edges must avoid the resources of all current addable and blocking
edges, which keeps addable edges pairwise disjoint and blocking sets
pairwise disjoint.  Whenever the newest addable edge is unblocked it either
replaces the matched edge of its player (freeing that edge's blocking
slot and forgetting every younger addable edge) or, if its player is the
target, enters the matching and the call returns.

If no admissible edge exists while the target is unmatched the search is
*stuck*: it raises :class:`Stuck` carrying the full state, from which the
certificate module can prove the threshold out of reach.

Termination is driven by the signature vector - the tuple of blocking-set
sizes with a sentinel infinity appended - which strictly decreases
lexicographically on every main-loop iteration; both the decrease and the
iteration bound ``2 ** |M|`` are asserted on every run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .model import Allocation, Instance, bundle_value

TraceSink = Callable[[str, dict], None]


@dataclass(frozen=True)
class Hyperedge:
    player: str
    resources: frozenset[str]


@dataclass
class SearchState:
    """Working state of one extension call; final state is returned.

    ``blockers[k]`` is exactly the set of matched edges overlapping
    ``addable[k]`` in resources.
    """

    i0: str
    threshold: Fraction
    matching: dict[str, Hyperedge]
    addable: list[Hyperedge] = field(default_factory=list)
    blockers: list[frozenset[Hyperedge]] = field(default_factory=list)
    main_iterations: int = 0
    inner_iterations: int = 0
    signatures: list[tuple] = field(default_factory=list)

    def blocked_players(self) -> set[str]:
        return {e.player for bset in self.blockers for e in bset}

    def forbidden_resources(self) -> set[str]:
        taken: set[str] = set()
        for e in self.addable:
            taken |= e.resources
        for bset in self.blockers:
            for e in bset:
                taken |= e.resources
        return taken


class Stuck(Exception):
    """No admissible edge left while the target player is unmatched."""

    def __init__(self, state: SearchState) -> None:
        super().__init__(
            f"no addable edge for target {state.i0!r} at threshold {state.threshold}"
        )
        self.state = state


def signature(state: SearchState) -> tuple:
    """Blocking-set sizes in addable order, with a trailing infinity."""
    return tuple(len(b) for b in state.blockers) + (math.inf,)


def minimize_edge(
    instance: Instance, resources: Iterable[str], threshold: Fraction
) -> frozenset[str]:
    """Shrink a bundle to an inclusion-minimal one still worth >= threshold.

    Scans elements cheapest first (ties in canonical order) and drops each
    whose removal keeps the bundle at or above the threshold.
    """
    current = set(resources)
    total = bundle_value(instance, current)
    if total < threshold:
        raise ValueError(
            f"bundle value {total} below threshold {threshold}; nothing to minimize"
        )
    order = sorted(
        current, key=lambda j: (instance.values[j], instance.resource_index[j])
    )
    for j in order:
        v = instance.values[j]
        if total - v >= threshold:
            current.remove(j)
            total -= v
    return frozenset(current)


def edge_is_minimal(
    instance: Instance, resources: frozenset[str], threshold: Fraction
) -> bool:
    total = bundle_value(instance, resources)
    if total < threshold:
        return False
    return all(total - instance.values[j] < threshold for j in resources)


def find_addable_edge(instance: Instance, state: SearchState) -> Hyperedge | None:
    """Deterministically construct an admissible edge, or report none exists.

    Candidate players are the blocked players plus the target, scanned in
    canonical order.  For each, resources inside current addable or
    blocking edges are off limits.  A fat admissible resource (value >= t)
    yields a singleton edge (cheapest fat one wins); otherwise admissible
    resources are collected in descending value order until they reach the
    threshold and the collection is minimized.  If even the full admissible
    set falls short no edge exists for that player: admissibility is a
    fixed filter and value is additive, so the greedy "none" is exhaustive.
    """
    t = state.threshold
    forbidden = state.forbidden_resources()
    candidates = instance.sort_players(state.blocked_players() | {state.i0})
    for p in candidates:
        admissible = [
            j
            for j in instance.sort_resources(instance.desire_set(p))
            if j not in forbidden
        ]
        if not admissible:
            continue
        fat = [j for j in admissible if instance.values[j] >= t]
        if fat:
            j = min(
                fat, key=lambda j: (instance.values[j], instance.resource_index[j])
            )
            return Hyperedge(p, frozenset([j]))
        total = sum((instance.values[j] for j in admissible), Fraction(0))
        if total < t:
            continue
        collected: list[str] = []
        acc = Fraction(0)
        for j in sorted(
            admissible,
            key=lambda j: (-instance.values[j], instance.resource_index[j]),
        ):
            collected.append(j)
            acc += instance.values[j]
            if acc >= t:
                break
        return Hyperedge(p, minimize_edge(instance, collected, t))
    return None


def _recompute_blockers(state: SearchState) -> None:
    matched = list(state.matching.values())
    state.blockers = [
        frozenset(e for e in matched if e.resources & a.resources)
        for a in state.addable
    ]


def check_state_invariants(instance: Instance, state: SearchState) -> None:
    """Aggressive structural validation; raises AssertionError on any breach."""
    t = state.threshold
    seen: set[str] = set()
    for p, e in state.matching.items():
        assert e.player == p, "matching keyed by wrong player"
        assert not (e.resources & seen), "matching edges overlap in resources"
        seen |= e.resources
    for e in list(state.matching.values()) + state.addable:
        assert e.resources <= instance.desire_set(e.player), "edge outside desire set"
        assert edge_is_minimal(instance, e.resources, t), "edge not minimal"
        if any(instance.values[j] >= t for j in e.resources):
            assert len(e.resources) == 1, "fat edge carrying extra resources"
    assert len(state.addable) == len(state.blockers)
    taken: set[str] = set()
    for a in state.addable:
        assert not (a.resources & taken), "addable edges overlap"
        taken |= a.resources
    matched = list(state.matching.values())
    for k, a in enumerate(state.addable):
        expect = frozenset(e for e in matched if e.resources & a.resources)
        assert state.blockers[k] == expect, "blocking set out of date"
    blocker_resources = [
        set().union(*(e.resources for e in bset)) if bset else set()
        for bset in state.blockers
    ]
    for k in range(len(state.addable)):
        for k2 in range(len(state.addable)):
            if k == k2:
                continue
            assert not (state.blockers[k] & state.blockers[k2]), (
                "blocking sets not disjoint"
            )
            assert not (state.addable[k].resources & blocker_resources[k2]), (
                "addable edge overlaps another edge's blockers"
            )
    for k in range(len(state.addable) - 1):
        assert state.blockers[k], "non-final addable edge left unblocked"


def extend_matching(
    instance: Instance,
    matching: Mapping[str, Hyperedge],
    i0: str,
    threshold: Fraction,
    trace: TraceSink | None = None,
) -> SearchState:
    """Add the target player to a partial matching; the core search loop.

    Returns the final state, whose ``matching`` covers the old players plus
    ``i0``.  Raises :class:`Stuck` with the state when no admissible edge
    remains.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    if i0 not in instance.player_index:
        raise ValueError(f"unknown player {i0!r}")
    if i0 in matching:
        raise ValueError(f"player {i0!r} is already matched")
    state = SearchState(i0=i0, threshold=threshold, matching=dict(matching))
    check_state_invariants(instance, state)
    start_size = len(state.matching)
    prev_sig = signature(state)

    def emit(kind: str, **data) -> None:
        if trace is not None:
            trace(kind, data)

    while True:
        edge = find_addable_edge(instance, state)
        if edge is None:
            emit("stuck", i0=i0, addable=len(state.addable))
            raise Stuck(state)
        state.main_iterations += 1
        assert state.main_iterations <= (1 << start_size), (
            "main loop exceeded its iteration bound"
        )
        state.addable.append(edge)
        _recompute_blockers(state)
        check_state_invariants(instance, state)
        emit(
            "add",
            edge=edge,
            blockers=len(state.blockers[-1]),
            signature=signature(state),
        )

        while not state.blockers[-1]:
            last = state.addable[-1]
            owner = state.matching.get(last.player)
            if owner is not None:
                hits = [
                    idx for idx, bset in enumerate(state.blockers) if owner in bset
                ]
                assert len(hits) == 1, "matched edge must block exactly one addable"
                k = hits[0]
                assert k < len(state.addable) - 1, "blocked edge ordering broken"
                state.inner_iterations += 1
                state.matching[last.player] = last
                del state.addable[k + 1 :]
                _recompute_blockers(state)
                check_state_invariants(instance, state)
                emit("swap", removed=owner, inserted=last, keep=k + 1)
            else:
                assert last.player == i0, "unblocked edge for a free non-target player"
                state.matching[i0] = last
                state.addable.pop()
                state.blockers.pop()
                _recompute_blockers(state)
                check_state_invariants(instance, state)
                emit("insert", edge=last, matched=len(state.matching))
                assert set(state.matching) == set(matching) | {i0}
                return state

        sig = signature(state)
        assert sig < prev_sig, "signature failed to decrease"
        state.signatures.append(sig)
        prev_sig = sig


@dataclass
class SolveResult:
    allocation: Allocation
    matching: dict[str, Hyperedge]
    calls: list[SearchState]

    @property
    def main_iterations(self) -> int:
        return sum(s.main_iterations for s in self.calls)

    @property
    def inner_iterations(self) -> int:
        return sum(s.inner_iterations for s in self.calls)


def solve(
    instance: Instance, threshold: Fraction, trace: TraceSink | None = None
) -> SolveResult:
    """Match every player at the threshold, one extension call per player.

    Raises :class:`Stuck` (carrying the partial matching) if any call runs
    out of addable edges.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    matching: dict[str, Hyperedge] = {}
    calls: list[SearchState] = []
    for p in instance.players:
        if trace is not None:
            trace("call", {"i0": p, "matched": len(matching)})
        state = extend_matching(instance, matching, p, threshold, trace)
        matching = state.matching
        calls.append(state)
    allocation = Allocation(
        bundles={p: matching[p].resources for p in instance.players}
    )
    return SolveResult(allocation=allocation, matching=matching, calls=calls)
