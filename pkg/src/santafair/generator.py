"""Seeded random instance generation on an exact rational value grid."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .model import Instance


@dataclass(frozen=True)
class GeneratorSpec:
    """Deterministic recipe: same spec and seed give the same instance.

    Values are drawn uniformly from the grid {1/D, 2/D, ..., D/D}, so all
    downstream arithmetic stays exact.  Density is the independent
    probability that a player desires a given resource.
    """

    players: int
    resources: int
    density: float
    grid_denominator: int
    seed: int

    def __post_init__(self) -> None:
        if self.players < 0 or self.resources < 0:
            raise ValueError("player and resource counts must be nonnegative")
        if not 0 < self.density <= 1:
            raise ValueError(f"density must lie in (0, 1], got {self.density}")
        if self.grid_denominator < 1:
            raise ValueError("grid denominator must be at least 1")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 bits")


def generate_instance(spec: GeneratorSpec) -> Instance:
    """Draw values first (resource order), then desire flags player by player."""
    rng = random.Random(spec.seed)
    resources = tuple(f"r{k + 1}" for k in range(spec.resources))
    players = tuple(f"p{k + 1}" for k in range(spec.players))
    values = {
        r: Fraction(rng.randint(1, spec.grid_denominator), spec.grid_denominator)
        for r in resources
    }
    desires = {
        p: frozenset(r for r in resources if rng.random() < spec.density)
        for p in players
    }
    return Instance(
        players=players, resources=resources, values=values, desires=desires
    )
