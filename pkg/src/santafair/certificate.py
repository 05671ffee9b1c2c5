"""Dual witnesses from stuck search states, with a step-by-step audit.

A stuck state at threshold ``t`` proves that the relaxation is infeasible
at ``T = ALPHA * t``: equivalently, no threshold above ``t`` times the
guaranteed factor is attainable.  The witness sets ``y = 1`` on the target
player and every player of a blocking edge, prices covered fat resources
(value >= t) at 1 and covered thin resources at
``min(1/3, BETA * value / T)``, and leaves everything else at zero.

:func:`build_certificate` constructs the witness; the black-box validity
check lives in :mod:`santafair.configlp` (:func:`verify_unbounded_dual`).
:func:`audit_stuck_state` instead re-derives the witness's objective gap
one inequality at a time - fat resources against fat blocking edges, each
thin addable edge's priced neighborhood against its blocking count (three
cases by blocking count and smallest covered value) - so a failure names
the exact step that broke.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .configlp import (
    DEFAULT_CONFIG_GUARD,
    DualWitness,
    price_configuration,
)
from .model import Instance, bundle_value
from .search import Hyperedge, SearchState, find_addable_edge

ALPHA = Fraction(23, 6)  # 3 + 5/6, the guaranteed shrink factor
BETA = Fraction(23, 15)  # 1 + 8/15, the thin-resource price slope
THIN_PRICE_CAP = Fraction(1, 3)

CASE_MANY_BLOCKERS = "blockers>=2"
CASE_ONE_BLOCKER_SMALL_MIN = "blockers=1,min<=t/2"
CASE_ONE_BLOCKER_LARGE_MIN = "blockers=1,min>t/2"


class CertificateError(RuntimeError):
    """The supplied state cannot back a certificate (e.g. it is not stuck)."""


class AuditError(AssertionError):
    """An audited inequality failed; message names the step."""

    def __init__(self, step: str, detail: str) -> None:
        super().__init__(f"audit step {step!r} failed: {detail}")
        self.step = step


def thin_price(value: Fraction, big_tau: Fraction) -> Fraction:
    return min(THIN_PRICE_CAP, BETA * value / big_tau)


def build_certificate(instance: Instance, state: SearchState) -> DualWitness:
    """Witness (tau = ALPHA * t, y, z) proving the relaxation infeasible.

    The state must be genuinely stuck; this is re-verified here.
    """
    if find_addable_edge(instance, state) is not None:
        raise CertificateError(
            "state is not stuck: an addable edge still exists"
        )
    if state.i0 in state.matching:
        raise CertificateError("state has its target player already matched")
    t = state.threshold
    big_tau = ALPHA * t

    y = {p: Fraction(1) for p in state.blocked_players() | {state.i0}}
    covered: set[str] = set()
    for e in state.addable:
        covered |= e.resources
    for bset in state.blockers:
        for e in bset:
            covered |= e.resources
    z: dict[str, Fraction] = {}
    for j in instance.sort_resources(covered):
        v = instance.values[j]
        z[j] = Fraction(1) if v >= t else thin_price(v, big_tau)
    return DualWitness(tau=big_tau, y=y, z=z)


@dataclass
class ThinEdgeRecord:
    """Audit row for one thin addable edge and its blocking neighborhood."""

    edge: Hyperedge
    blockers: frozenset[Hyperedge]
    priced_total: Fraction  # z over the edge's and its blockers' resources
    blocking_count: int
    case: str
    min_value: Fraction | None  # smallest covered value, single-blocker cases


@dataclass
class StuckAudit:
    fat_blocking: int
    thin_blocking: int
    fat_price_total: Fraction
    sum_y: Fraction
    sum_z: Fraction
    thin_records: list[ThinEdgeRecord] = field(default_factory=list)

    def cases_seen(self) -> set[str]:
        return {r.case for r in self.thin_records}


def _edge_is_fat(instance: Instance, edge: Hyperedge, t: Fraction) -> bool:
    return any(instance.values[j] >= t for j in edge.resources)


def audit_stuck_state(
    instance: Instance, state: SearchState, witness: DualWitness
) -> StuckAudit:
    """Re-derive the witness's strict objective gap step by step.

    Checks, in order: the witness matches the construction rule; every
    addable edge is blocked; fat prices are covered by fat blocking edges;
    each thin addable edge's priced neighborhood stays within its blocking
    count (case split on blocking count and smallest covered value, with
    the structural value bounds each case leans on); and the player total
    strictly exceeds the resource total.  Raises :class:`AuditError` naming
    the first step that fails.
    """
    t = state.threshold
    big_tau = ALPHA * t
    if witness.tau != big_tau:
        raise CertificateError(
            f"witness tau {witness.tau} does not match ALPHA * t = {big_tau}"
        )
    rebuilt = build_certificate(instance, state)
    if dict(rebuilt.y) != dict(witness.y) or dict(rebuilt.z) != dict(witness.z):
        raise CertificateError("witness entries do not match the construction rule")

    all_blockers = [e for bset in state.blockers for e in bset]
    fat_blocking = [e for e in all_blockers if _edge_is_fat(instance, e, t)]
    thin_blocking = [e for e in all_blockers if not _edge_is_fat(instance, e, t)]

    # every addable edge must be blocked
    for k, edge in enumerate(state.addable):
        if not state.blockers[k]:
            raise AuditError(
                "addable-blocked",
                f"addable edge for {edge.player!r} has no blocking edge",
            )

    # fat prices against fat blocking edges
    fat_price_total = sum(
        (
            witness.z_of(j)
            for j in witness.z
            if instance.values[j] >= t
        ),
        Fraction(0),
    )
    if not fat_price_total <= len(fat_blocking):
        raise AuditError(
            "fat-vs-fat-blocking",
            f"fat price total {fat_price_total} > {len(fat_blocking)} fat blockers",
        )

    # per thin addable edge: priced neighborhood vs blocking count
    records: list[ThinEdgeRecord] = []
    for k, edge in enumerate(state.addable):
        if _edge_is_fat(instance, edge, t):
            continue
        bset = state.blockers[k]
        b = len(bset)
        edge_value = bundle_value(instance, edge.resources)
        if not edge_value <= 2 * t:
            raise AuditError(
                "thin-edge-value",
                f"thin edge worth {edge_value} exceeds twice the threshold {2 * t}",
            )
        union = set(edge.resources)
        for blocker in bset:
            extra = bundle_value(instance, blocker.resources - edge.resources)
            if not extra <= t:
                raise AuditError(
                    "blocker-extra-value",
                    f"blocker of {edge.player!r} adds {extra} > threshold {t}",
                )
            union |= blocker.resources
        priced = sum((witness.z_of(j) for j in union), Fraction(0))
        min_value: Fraction | None = None
        if b >= 2:
            case = CASE_MANY_BLOCKERS
        else:
            min_value = min(instance.values[j] for j in union)
            if min_value <= t / 2:
                case = CASE_ONE_BLOCKER_SMALL_MIN
            else:
                case = CASE_ONE_BLOCKER_LARGE_MIN
                if len(union) > 3:
                    raise AuditError(
                        "one-blocker-large-min",
                        f"neighborhood of {edge.player!r} has {len(union)} > 3 resources",
                    )
        if not priced <= b:
            raise AuditError(
                f"thin-neighborhood[{case}]",
                f"priced neighborhood {priced} > blocking count {b} "
                f"for addable edge of {edge.player!r}",
            )
        records.append(
            ThinEdgeRecord(
                edge=edge,
                blockers=bset,
                priced_total=priced,
                blocking_count=b,
                case=case,
                min_value=min_value,
            )
        )

    # the neighborhoods partition the thin priced resources
    thin_price_total = witness.sum_z() - fat_price_total
    recorded = sum((r.priced_total for r in records), Fraction(0))
    if thin_price_total != recorded:
        raise AuditError(
            "thin-partition",
            f"thin price total {thin_price_total} != sum over neighborhoods {recorded}",
        )

    sum_y = witness.sum_y()
    sum_z = witness.sum_z()
    expected_y = len(fat_blocking) + len(thin_blocking) + 1
    if sum_y != expected_y:
        raise AuditError(
            "player-total",
            f"player total {sum_y} != blocking edges plus target {expected_y}",
        )
    if not sum_z < sum_y:
        raise AuditError(
            "strict-gap", f"resource total {sum_z} not below player total {sum_y}"
        )

    return StuckAudit(
        fat_blocking=len(fat_blocking),
        thin_blocking=len(thin_blocking),
        fat_price_total=fat_price_total,
        sum_y=sum_y,
        sum_z=sum_z,
        thin_records=records,
    )


def check_claim_feasibility(
    instance: Instance,
    witness: DualWitness,
    *,
    guard: int = DEFAULT_CONFIG_GUARD,
) -> bool:
    """True iff no configuration of a weighted player undercuts its entry."""
    for p in instance.players:
        y_i = witness.y_of(p)
        if y_i <= 0:
            continue
        if (
            price_configuration(
                instance, p, witness.tau, witness.z, y_i, guard=guard
            )
            is not None
        ):
            return False
    return True


def check_claim_negativity(witness: DualWitness) -> bool:
    """True iff the resource total is strictly below the player total."""
    return witness.sum_z() < witness.sum_y()
