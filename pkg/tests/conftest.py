"""Shared fixtures and independent brute-force oracles for the test suite.

The oracles here deliberately re-derive expected values by exhaustive
enumeration (itertools over subsets, full assignment scans) so they share
no solving logic with the package paths they check.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from santafair import GeneratorSpec, Instance, generate_instance


def make_instance(values: dict[str, Fraction], desires: dict[str, set[str]]) -> Instance:
    return Instance(
        players=tuple(desires),
        resources=tuple(values),
        values={r: Fraction(v) for r, v in values.items()},
        desires={p: frozenset(s) for p, s in desires.items()},
    )


@pytest.fixture
def t1() -> Instance:
    """Two players, three unit resources, everyone desires everything."""
    return make_instance(
        {"a": Fraction(1), "b": Fraction(1), "c": Fraction(1)},
        {"p1": {"a", "b", "c"}, "p2": {"a", "b", "c"}},
    )


@pytest.fixture
def t2() -> Instance:
    """Two players both desiring a single resource of value 2."""
    return make_instance(
        {"f": Fraction(2)},
        {"p1": {"f"}, "p2": {"f"}},
    )


def small_corpus(count: int, *, seed: int = 0) -> list[Instance]:
    """Deterministic mix of tiny instances for cross-checking."""
    out = []
    for i in range(count):
        spec = GeneratorSpec(
            players=1 + i % 4,
            resources=2 + i % 5,
            density=0.4 + (i % 4) * 0.2,
            grid_denominator=1 + i % 5,
            seed=seed + i,
        )
        out.append(generate_instance(spec))
    return out


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------


def brute_subsets_at_least(
    instance: Instance, player: str, tau: Fraction
) -> list[frozenset[str]]:
    """Every subset of the desire set with value >= tau, by full scan."""
    ids = sorted(instance.desire_set(player))
    out = []
    for k in range(len(ids) + 1):
        for combo in itertools.combinations(ids, k):
            if sum(instance.values[j] for j in combo) >= tau:
                out.append(frozenset(combo))
    return out


def brute_minimal_subsets(
    instance: Instance, player: str, tau: Fraction
) -> set[frozenset[str]]:
    """Inclusion-minimal qualifying subsets via subset-of-subset filtering."""
    qualifying = [s for s in brute_subsets_at_least(instance, player, tau) if s]
    if tau <= 0:
        qualifying.append(frozenset())
    return {
        s
        for s in qualifying
        if not any(q < s for q in qualifying)
    }


def brute_all_assignments(instance: Instance):
    """Yield every assignment map resource -> player-or-None (desired only)."""
    choices = []
    for r in instance.resources:
        opts = [p for p in instance.players if r in instance.desires[p]]
        choices.append(opts + [None])
    for combo in itertools.product(*choices):
        yield dict(zip(instance.resources, combo))


def brute_max_min_value(instance: Instance) -> Fraction:
    """Exact max-min allocation value by scanning every assignment."""
    best = Fraction(0)
    if not instance.players:
        return best
    for assign in brute_all_assignments(instance):
        bundles = {p: Fraction(0) for p in instance.players}
        for r, p in assign.items():
            if p is not None:
                bundles[p] += instance.values[r]
        best = max(best, min(bundles.values()))
    return best
