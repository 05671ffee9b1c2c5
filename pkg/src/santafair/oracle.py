"""Brute-force ground truth: exact integral and fractional optima.

Deliberately independent code paths from the production solvers - the
integral search enumerates per-resource assignments directly, and the
fractional optimum rebuilds a fresh LP over *all* qualifying resource
subsets (not just minimal ones) for every threshold it tests.  Only the
data model and the LP engine are shared, so equivalence tests against
:mod:`santafair.configlp` are meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .model import Allocation, GuardExceeded, Instance, fingerprint

DEFAULT_NODE_GUARD = 10_000_000
DEFAULT_SUBSET_GUARD = 1 << 20


class InternalInconsistency(RuntimeError):
    """A relationship that must hold between the optima was violated."""


def brute_force_opt(
    instance: Instance, *, node_guard: int = DEFAULT_NODE_GUARD
) -> tuple[Fraction, Allocation]:
    """Exact max-min value over all assignments of desired resources.

    Resources may stay unassigned (never helps, but is permitted).  Returns
    the lexicographically least optimal assignment under the per-resource
    choice order: desiring players in canonical order, then unassigned.
    Branch and bound on the minimum of each player's attainable total.
    """
    players = instance.players
    resources = instance.resources
    if not players:
        return Fraction(0), Allocation(bundles={})
    desiring = [
        [p for p in players if r in instance.desires[p]] for r in resources
    ]
    values = [instance.values[r] for r in resources]
    # rest[k][p]: total value of resources from index k on that p desires
    nres = len(resources)
    rest = [dict.fromkeys(players, Fraction(0)) for _ in range(nres + 1)]
    for k in range(nres - 1, -1, -1):
        for p in players:
            rest[k][p] = rest[k + 1][p] + (
                values[k] if resources[k] in instance.desires[p] else Fraction(0)
            )

    bundle = dict.fromkeys(players, Fraction(0))
    assign: list[str | None] = [None] * nres
    best_value: Fraction | None = None
    best_assign: list[str | None] | None = None
    nodes = 0

    def rec(k: int) -> None:
        nonlocal nodes, best_value, best_assign
        nodes += 1
        if nodes > node_guard:
            raise GuardExceeded(
                f"assignment search guard exceeded: over {node_guard} nodes"
            )
        if k == nres:
            value = min(bundle.values())
            if best_value is None or value > best_value:
                best_value = value
                best_assign = assign.copy()
            return
        if best_value is not None:
            reachable = min(bundle[p] + rest[k][p] for p in players)
            if reachable <= best_value:
                return
        for p in desiring[k]:
            assign[k] = p
            bundle[p] += values[k]
            rec(k + 1)
            bundle[p] -= values[k]
        assign[k] = None
        rec(k + 1)

    rec(0)
    assert best_value is not None and best_assign is not None
    bundles = {p: set() for p in players}
    for k, p in enumerate(best_assign):
        if p is not None:
            bundles[p].add(resources[k])
    allocation = Allocation(
        bundles={p: frozenset(s) for p, s in bundles.items()}
    )
    return best_value, allocation


def _all_config_sets(
    instance: Instance, player: str, tau: Fraction, budget_cap: int
) -> list[frozenset[str]]:
    """Every subset of the desire set worth at least tau, by bitmask scan."""
    ids = instance.sort_resources(instance.desire_set(player))
    n = len(ids)
    if 1 << n > budget_cap:
        raise GuardExceeded(
            f"subset enumeration guard exceeded: 2^{n} > {budget_cap}"
        )
    vals = [instance.values[j] for j in ids]
    out = []
    for mask in range(1, 1 << n):
        total = Fraction(0)
        for k in range(n):
            if mask >> k & 1:
                total += vals[k]
        if total >= tau:
            out.append(frozenset(ids[k] for k in range(n) if mask >> k & 1))
    return out


def _feasible_full_lp(
    instance: Instance, tau: Fraction, subset_guard: int
) -> bool:
    """Fresh covering LP over all qualifying subsets at this threshold."""
    columns: list[tuple[str, frozenset[str]]] = []
    for p in instance.players:
        sets = _all_config_sets(instance, p, tau, subset_guard)
        columns.extend((p, s) for s in sets)
    ncols = len(columns)
    rows = []
    for p in instance.players:
        coeffs = [
            Fraction(1) if c[0] == p else Fraction(0) for c in columns
        ]
        rows.append((coeffs, ">=", Fraction(1)))
    for r in instance.resources:
        coeffs = [
            Fraction(1) if r in c[1] else Fraction(0) for c in columns
        ]
        rows.append((coeffs, "<=", Fraction(1)))
    outcome = lp.solve_lp(lp.minimize([Fraction(0)] * ncols, rows))
    return outcome.status == "optimal"


def brute_force_opt_star(
    instance: Instance,
    *,
    subset_guard: int = DEFAULT_SUBSET_GUARD,
) -> Fraction:
    """Largest feasible threshold of the relaxation, from first principles.

    Candidates are the positive subset sums within single desire sets
    (feasibility can only change there); each tested candidate gets a
    fresh full-enumeration LP.
    """
    candidates: set[Fraction] = set()
    for p in instance.players:
        sums = {Fraction(0)}
        for j in instance.desire_set(p):
            if 2 * len(sums) > subset_guard:
                raise GuardExceeded(
                    f"candidate guard exceeded: over {subset_guard} subset sums"
                )
            v = instance.values[j]
            sums |= {s + v for s in sums}
        candidates |= sums
    candidates.discard(Fraction(0))
    ordered = sorted(candidates)

    lo, hi = 0, len(ordered) - 1
    best = Fraction(0)
    while lo <= hi:
        mid = (lo + hi) // 2
        if _feasible_full_lp(instance, ordered[mid], subset_guard):
            best = ordered[mid]
            lo = mid + 1
        else:
            hi = mid - 1
    return best


@dataclass(frozen=True)
class GapReport:
    """Fractional vs integral optimum for one instance."""

    opt_integral: Fraction
    opt_star: Fraction
    gap: Fraction
    witness: Allocation
    instance_fingerprint: str


def integrality_gap(
    instance: Instance,
    *,
    node_guard: int = DEFAULT_NODE_GUARD,
    subset_guard: int = DEFAULT_SUBSET_GUARD,
) -> GapReport:
    """Measure opt_star / opt_integral with exact conventions at zero.

    Both zero: gap 1.  A positive fractional optimum with a zero integral
    optimum cannot happen (a feasible relaxation fractionally covers every
    player, which contains a system-wide matching giving everyone a
    positive bundle); seeing it means a solver bug, reported loudly.
    """
    opt_int, witness = brute_force_opt(instance, node_guard=node_guard)
    opt_frac = brute_force_opt_star(instance, subset_guard=subset_guard)
    if opt_int == 0:
        if opt_frac != 0:
            raise InternalInconsistency(
                f"fractional optimum {opt_frac} positive with integral optimum zero"
            )
        gap = Fraction(1)
    else:
        gap = opt_frac / opt_int
    return GapReport(
        opt_integral=opt_int,
        opt_star=opt_frac,
        gap=gap,
        witness=witness,
        instance_fingerprint=fingerprint(instance),
    )
