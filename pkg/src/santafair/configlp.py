"""Configuration LP: threshold feasibility, exact optimum, pricing, witnesses.

For a player ``i`` and threshold ``tau > 0`` a configuration is a subset of
the desire set with total value at least ``tau``.  The relaxation asks for
fractional weights over configurations covering every player while using
each resource at most once; its optimum is the largest feasible ``tau``.

All solving here is restricted to inclusion-minimal configurations, which
is lossless: every configuration contains a minimal one and weight can be
pushed down to it, while nonnegative resource prices only decrease when a
configuration shrinks.

Infeasibility at a threshold is reported as a :class:`DualWitness` -
nonnegative per-player and per-resource vectors whose player total strictly
exceeds the resource total while every configuration of every player is
priced at or above the player's entry.  Scaling such a witness makes the
dual of the relaxation arbitrarily large, so the relaxation is infeasible.
:func:`verify_unbounded_dual` checks both conditions from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Mapping

from . import lp
from .model import GuardExceeded, Instance

DEFAULT_CONFIG_GUARD = 1 << 20
DEFAULT_CANDIDATE_GUARD = 1 << 20

Mode = Literal["enum", "colgen"]


@dataclass(frozen=True)
class Configuration:
    player: str
    resources: frozenset[str]


@dataclass(frozen=True)
class DualWitness:
    """Vectors (y, z) for a threshold; zero entries may be omitted."""

    tau: Fraction
    y: Mapping[str, Fraction]
    z: Mapping[str, Fraction]

    def y_of(self, player: str) -> Fraction:
        return self.y.get(player, Fraction(0))

    def z_of(self, resource: str) -> Fraction:
        return self.z.get(resource, Fraction(0))

    def sum_y(self) -> Fraction:
        return sum(self.y.values(), Fraction(0))

    def sum_z(self) -> Fraction:
        return sum(self.z.values(), Fraction(0))


@dataclass
class Counters:
    """Work counters threaded through solves for reporting."""

    lp_pivots: int = 0
    configs_enumerated: int = 0


class _Budget:
    """Mutable enumeration budget shared across one logical operation."""

    def __init__(self, cap: int) -> None:
        self.cap = cap
        self.used = 0

    def spend(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.cap:
            raise GuardExceeded(
                f"enumeration guard exceeded: over {self.cap} search nodes"
            )


def _require_positive_tau(tau: Fraction) -> None:
    if tau <= 0:
        raise ValueError(f"threshold must be positive, got {tau}")


def _minimal_config_sets(
    instance: Instance,
    player: str,
    tau: Fraction,
    budget: _Budget,
) -> list[frozenset[str]]:
    """Inclusion-minimal subsets of the desire set with value >= tau.

    Depth-first over resources in canonical order, including before
    excluding, so output is lexicographic in canonical index sequences.
    A branch stops as soon as the running value reaches tau: supersets of
    a qualifying set are never minimal.
    """
    ids = instance.sort_resources(instance.desire_set(player))
    vals = [instance.values[j] for j in ids]
    n = len(ids)
    suffix = [Fraction(0)] * (n + 1)
    for k in range(n - 1, -1, -1):
        suffix[k] = suffix[k + 1] + vals[k]
    out: list[frozenset[str]] = []
    chosen: list[int] = []

    def rec(k: int, total: Fraction) -> None:
        budget.spend()
        if k == n or total + suffix[k] < tau:
            return
        nv = total + vals[k]
        chosen.append(k)
        if nv >= tau:
            if all(nv - vals[c] < tau for c in chosen):
                out.append(frozenset(ids[c] for c in chosen))
        else:
            rec(k + 1, nv)
        chosen.pop()
        rec(k + 1, total)

    rec(0, Fraction(0))
    return out


def enumerate_minimal_configs(
    instance: Instance,
    player: str,
    tau: Fraction,
    *,
    guard: int = DEFAULT_CONFIG_GUARD,
    counters: Counters | None = None,
) -> list[Configuration]:
    """All inclusion-minimal configurations of a player, deterministic order."""
    _require_positive_tau(tau)
    sets = _minimal_config_sets(instance, player, tau, _Budget(guard))
    if counters is not None:
        counters.configs_enumerated += len(sets)
    return [Configuration(player, s) for s in sets]


def price_configuration(
    instance: Instance,
    player: str,
    tau: Fraction,
    z: Mapping[str, Fraction],
    y_i: Fraction,
    *,
    guard: int = DEFAULT_CONFIG_GUARD,
) -> Configuration | None:
    """Cheapest configuration under resource prices z, if it undercuts y_i.

    Returns a configuration C with z(C) < y_i when one exists, else None.
    The choice is deterministic: minimum z(C), ties broken by canonical
    order.  Since prices are nonnegative the minimum is attained on a
    minimal configuration, so the search walks the minimal-configuration
    tree in canonical order, pruning branches that cannot reach the
    threshold and branches already costing more than the best found.
    """
    _require_positive_tau(tau)
    if y_i <= 0:
        return None
    budget = _Budget(guard)
    ids = instance.sort_resources(instance.desire_set(player))
    vals = [instance.values[j] for j in ids]
    zs = [z.get(j, Fraction(0)) for j in ids]
    n = len(ids)
    suffix = [Fraction(0)] * (n + 1)
    for k in range(n - 1, -1, -1):
        suffix[k] = suffix[k + 1] + vals[k]
    best: list = [None, None]  # [z(C), resource set]
    chosen: list[int] = []

    def rec(k: int, total: Fraction, price: Fraction) -> None:
        budget.spend()
        if best[0] is not None and price > best[0]:
            return
        if k == n or total + suffix[k] < tau:
            return
        nv = total + vals[k]
        nz = price + zs[k]
        chosen.append(k)
        if best[0] is None or nz < best[0]:
            if nv >= tau:
                if all(nv - vals[c] < tau for c in chosen):
                    best[0] = nz
                    best[1] = frozenset(ids[c] for c in chosen)
            else:
                rec(k + 1, nv, nz)
        chosen.pop()
        rec(k + 1, total, price)

    rec(0, Fraction(0), Fraction(0))
    if best[0] is None or best[0] >= y_i:
        return None
    return Configuration(player, best[1])


@dataclass
class FeasibilityResult:
    feasible: bool
    primal: dict[tuple[str, frozenset[str]], Fraction] | None = None
    witness: DualWitness | None = None


def feasible_at(
    instance: Instance,
    tau: Fraction,
    *,
    mode: Mode = "enum",
    guard: int = DEFAULT_CONFIG_GUARD,
    counters: Counters | None = None,
) -> FeasibilityResult:
    """Decide feasibility of the relaxation at a threshold.

    Feasible: returns fractional weights over minimal configurations.
    Infeasible: returns a verified-shape dual witness for this tau.
    """
    _require_positive_tau(tau)
    if mode == "enum":
        return _feasible_by_enumeration(instance, tau, guard, counters)
    if mode == "colgen":
        return _feasible_by_column_generation(instance, tau, guard, counters)
    raise ValueError(f"unknown mode {mode!r}")


def _cover_problem(
    instance: Instance,
    columns: list[Configuration],
    slack_players: bool,
) -> lp.LpProblem:
    """Master LP over the given columns.

    Rows: per player, config weight (plus a unit slack when requested)
    at least 1; per resource, total weight touching it at most 1.
    Objective: zero, or the slack total when slacks are present.
    """
    nplayers = len(instance.players)
    ncols = len(columns) + (nplayers if slack_players else 0)
    pidx = instance.player_index
    ridx = instance.resource_index

    def col_of(k: int) -> int:
        return k + (nplayers if slack_players else 0)

    rows = []
    for i, p in enumerate(instance.players):
        coeffs = [Fraction(0)] * ncols
        if slack_players:
            coeffs[i] = Fraction(1)
        for k, c in enumerate(columns):
            if c.player == p:
                coeffs[col_of(k)] = Fraction(1)
        rows.append((coeffs, ">=", Fraction(1)))
    for j in instance.resources:
        coeffs = [Fraction(0)] * ncols
        for k, c in enumerate(columns):
            if j in c.resources:
                coeffs[col_of(k)] = Fraction(1)
        rows.append((coeffs, "<=", Fraction(1)))

    objective = [Fraction(0)] * ncols
    if slack_players:
        for i in range(nplayers):
            objective[i] = Fraction(1)
    return lp.minimize(objective, rows)


def _witness_from_certificate(
    instance: Instance, tau: Fraction, cert: tuple[Fraction, ...]
) -> DualWitness:
    nplayers = len(instance.players)
    y = {}
    for i, p in enumerate(instance.players):
        if cert[i] > 0:
            y[p] = cert[i]
    z = {}
    for j, r in enumerate(instance.resources):
        c = cert[nplayers + j]
        if c < 0:
            z[r] = -c
    return DualWitness(tau=tau, y=y, z=z)


def _feasible_by_enumeration(
    instance: Instance,
    tau: Fraction,
    guard: int,
    counters: Counters | None,
) -> FeasibilityResult:
    budget = _Budget(guard)
    columns: list[Configuration] = []
    for p in instance.players:
        sets = _minimal_config_sets(instance, p, tau, budget)
        columns.extend(Configuration(p, s) for s in sets)
    if counters is not None:
        counters.configs_enumerated += len(columns)

    outcome = lp.solve_lp(_cover_problem(instance, columns, slack_players=False))
    if counters is not None:
        counters.lp_pivots += outcome.pivots
    if outcome.status == "optimal":
        primal = {
            (c.player, c.resources): outcome.primal[k]
            for k, c in enumerate(columns)
            if outcome.primal[k] != 0
        }
        return FeasibilityResult(feasible=True, primal=primal)
    assert outcome.status == "infeasible"  # objective is constant zero
    witness = _witness_from_certificate(instance, tau, outcome.certificate)
    return FeasibilityResult(feasible=False, witness=witness)


def _feasible_by_column_generation(
    instance: Instance,
    tau: Fraction,
    guard: int,
    counters: Counters | None,
) -> FeasibilityResult:
    nplayers = len(instance.players)
    columns: list[Configuration] = []
    known: set[tuple[str, frozenset[str]]] = set()
    while True:
        outcome = lp.solve_lp(_cover_problem(instance, columns, slack_players=True))
        if counters is not None:
            counters.lp_pivots += outcome.pivots
        assert outcome.status == "optimal"  # slacks keep the master feasible
        if outcome.objective_value == 0:
            primal = {
                (c.player, c.resources): outcome.primal[nplayers + k]
                for k, c in enumerate(columns)
                if outcome.primal[nplayers + k] != 0
            }
            return FeasibilityResult(feasible=True, primal=primal)

        y = {p: outcome.dual[i] for i, p in enumerate(instance.players)}
        z = {
            r: -outcome.dual[nplayers + j]
            for j, r in enumerate(instance.resources)
        }
        added = 0
        for p in instance.players:
            found = price_configuration(instance, p, tau, z, y[p], guard=guard)
            if found is not None:
                key = (found.player, found.resources)
                assert key not in known, "pricing returned a master column"
                known.add(key)
                columns.append(found)
                if counters is not None:
                    counters.configs_enumerated += 1
                added += 1
        if added == 0:
            witness = DualWitness(
                tau=tau,
                y={p: v for p, v in y.items() if v != 0},
                z={r: v for r, v in z.items() if v != 0},
            )
            return FeasibilityResult(feasible=False, witness=witness)


def candidate_thresholds(
    instance: Instance, *, guard: int = DEFAULT_CANDIDATE_GUARD
) -> list[Fraction]:
    """Sorted positive subset sums of values within any single desire set.

    Feasibility of the relaxation is constant between consecutive such
    sums, because configuration sets only change there; the optimum is
    therefore always one of these values (or zero).
    """
    candidates: set[Fraction] = set()
    budget = _Budget(guard)
    for p in instance.players:
        sums = {Fraction(0)}
        for j in instance.sort_resources(instance.desire_set(p)):
            v = instance.values[j]
            budget.spend(len(sums))
            sums |= {s + v for s in sums}
        candidates |= sums
    candidates.discard(Fraction(0))
    return sorted(candidates)


def opt_star(
    instance: Instance,
    *,
    mode: Mode = "enum",
    guard: int = DEFAULT_CONFIG_GUARD,
    candidate_guard: int = DEFAULT_CANDIDATE_GUARD,
    counters: Counters | None = None,
) -> Fraction:
    """Exact optimum of the relaxation: the largest feasible threshold.

    Binary search over the candidate thresholds; zero when no positive
    threshold is feasible (for example, a player desiring nothing).
    """
    candidates = candidate_thresholds(instance, guard=candidate_guard)
    lo, hi = 0, len(candidates) - 1
    best = Fraction(0)
    while lo <= hi:
        mid = (lo + hi) // 2
        result = feasible_at(
            instance, candidates[mid], mode=mode, guard=guard, counters=counters
        )
        if result.feasible:
            best = candidates[mid]
            lo = mid + 1
        else:
            hi = mid - 1
    return best


@dataclass
class WitnessCheck:
    """Outcome of verifying a dual witness, with a printable breakdown."""

    ok: bool
    sum_y: Fraction
    sum_z: Fraction
    objective_ok: bool
    nonnegative_ok: bool
    players_checked: int
    violations: list[tuple[str, frozenset[str], Fraction, Fraction]] = field(
        default_factory=list
    )

    def __bool__(self) -> bool:
        return self.ok


def verify_unbounded_dual(
    instance: Instance,
    witness: DualWitness,
    *,
    guard: int = DEFAULT_CONFIG_GUARD,
) -> WitnessCheck:
    """Check both witness conditions from scratch.

    (a) player total strictly exceeds resource total, and (b) every
    configuration of every positively weighted player is priced at or
    above the player's entry - established by the pricing search finding
    no undercutting configuration.
    """
    nonneg = all(v >= 0 for v in witness.y.values()) and all(
        v >= 0 for v in witness.z.values()
    )
    sum_y = witness.sum_y()
    sum_z = witness.sum_z()
    objective_ok = sum_y > sum_z
    violations = []
    checked = 0
    for p in instance.players:
        y_i = witness.y_of(p)
        if y_i <= 0:
            continue
        checked += 1
        found = price_configuration(instance, p, witness.tau, witness.z, y_i, guard=guard)
        if found is not None:
            zc = sum(
                (witness.z_of(j) for j in found.resources), Fraction(0)
            )
            violations.append((p, found.resources, zc, y_i))
    ok = nonneg and objective_ok and not violations
    return WitnessCheck(
        ok=ok,
        sum_y=sum_y,
        sum_z=sum_z,
        objective_ok=objective_ok,
        nonnegative_ok=nonneg,
        players_checked=checked,
        violations=violations,
    )
