"""Problem instances, exact rational parsing, and bundle arithmetic.

Everything downstream (LP solving, local search, certificates) works on the
immutable :class:`Instance` defined here.  All scalar quantities are
``fractions.Fraction`` and every operation is exact; there is no floating
point anywhere in a correctness path.

The on-disk instance format is JSON with two sections::

    {
      "resources": [{"id": "r1", "value": "3/2"}, ...],
      "players":   [{"id": "p1", "desires": ["r1", ...]}, ...]
    }

Values are rational literals: either an integer string ("5") or "p/q" with
q > 0.  Declaration order of players and resources is preserved and is the
canonical tie-breaking order used by every solver in the package.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping


class ModelError(ValueError):
    """Malformed instance data: syntax, duplicate ids, bad values, bad refs."""


class GuardExceeded(RuntimeError):
    """An enumeration or search exceeded its configured work cap."""


_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def parse_rational(text: str) -> Fraction:
    """Parse an exact rational literal: "5", "-7", or "p/q" with q > 0."""
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise ModelError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ModelError(f"zero denominator in rational literal: {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    """Serialize a rational in lowest terms: "p" for integers, else "p/q"."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Instance:
    """An allocation problem: players, positively valued resources, desire sets.

    Immutable after construction; construction validates all invariants.
    ``players`` and ``resources`` keep declaration order, which fixes the
    canonical ordering used for deterministic tie-breaking everywhere.
    """

    players: tuple[str, ...]
    resources: tuple[str, ...]
    values: Mapping[str, Fraction]
    desires: Mapping[str, frozenset[str]]
    player_index: Mapping[str, int] = field(init=False, repr=False, compare=False)
    resource_index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.players)) != len(self.players):
            raise ModelError("duplicate player id")
        if len(set(self.resources)) != len(self.resources):
            raise ModelError("duplicate resource id")
        if set(self.values) != set(self.resources):
            raise ModelError("values must cover exactly the declared resources")
        if set(self.desires) != set(self.players):
            raise ModelError("desires must cover exactly the declared players")
        for j, v in self.values.items():
            if not isinstance(v, Fraction):
                raise ModelError(f"value of {j!r} is not a Fraction")
            if v <= 0:
                raise ModelError(f"nonpositive value for resource {j!r}")
        declared = set(self.resources)
        for i, wanted in self.desires.items():
            unknown = wanted - declared
            if unknown:
                raise ModelError(
                    f"player {i!r} desires unknown resource {sorted(unknown)[0]!r}"
                )
        object.__setattr__(
            self, "player_index", {p: k for k, p in enumerate(self.players)}
        )
        object.__setattr__(
            self, "resource_index", {r: k for k, r in enumerate(self.resources)}
        )

    def value(self, resource: str) -> Fraction:
        try:
            return self.values[resource]
        except KeyError:
            raise ModelError(f"unknown resource {resource!r}") from None

    def desire_set(self, player: str) -> frozenset[str]:
        try:
            return self.desires[player]
        except KeyError:
            raise ModelError(f"unknown player {player!r}") from None

    def sort_resources(self, ids: Iterable[str]) -> tuple[str, ...]:
        """Resource ids in canonical (declaration) order."""
        return tuple(sorted(ids, key=self.resource_index.__getitem__))

    def sort_players(self, ids: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(ids, key=self.player_index.__getitem__))


@dataclass(frozen=True)
class Allocation:
    """Assignment of pairwise-disjoint resource bundles to players."""

    bundles: Mapping[str, frozenset[str]]


def parse_instance(text: str) -> Instance:
    """Parse and validate an instance document (see module docstring)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(
            f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise ModelError("top level must be an object")
    extra = set(doc) - {"resources", "players"}
    if extra:
        raise ModelError(f"unknown section {sorted(extra)[0]!r}")
    for key in ("resources", "players"):
        if key not in doc or not isinstance(doc[key], list):
            raise ModelError(f"missing or malformed section {key!r}")

    resources: list[str] = []
    values: dict[str, Fraction] = {}
    for rec in doc["resources"]:
        if not isinstance(rec, dict) or set(rec) != {"id", "value"}:
            raise ModelError(f"malformed resource record: {rec!r}")
        rid = rec["id"]
        if not isinstance(rid, str):
            raise ModelError(f"resource id must be a string: {rid!r}")
        if rid in values:
            raise ModelError(f"duplicate resource id {rid!r}")
        if not isinstance(rec["value"], str):
            raise ModelError(f"value of {rid!r} must be a rational literal string")
        v = parse_rational(rec["value"])
        if v <= 0:
            raise ModelError(f"nonpositive value for resource {rid!r}")
        resources.append(rid)
        values[rid] = v

    players: list[str] = []
    desires: dict[str, frozenset[str]] = {}
    for rec in doc["players"]:
        if not isinstance(rec, dict) or set(rec) != {"id", "desires"}:
            raise ModelError(f"malformed player record: {rec!r}")
        pid = rec["id"]
        if not isinstance(pid, str):
            raise ModelError(f"player id must be a string: {pid!r}")
        if pid in desires:
            raise ModelError(f"duplicate player id {pid!r}")
        if not isinstance(rec["desires"], list):
            raise ModelError(f"desires of {pid!r} must be a list")
        for rid in rec["desires"]:
            if rid not in values:
                raise ModelError(f"player {pid!r} desires unknown resource {rid!r}")
        players.append(pid)
        desires[pid] = frozenset(rec["desires"])

    return Instance(
        players=tuple(players),
        resources=tuple(resources),
        values=values,
        desires=desires,
    )


def format_instance(instance: Instance) -> str:
    """Serialize an instance to its canonical document form.

    Rationals are written in lowest terms and desire lists in canonical
    order, so round-tripping through :func:`parse_instance` is bit-exact.
    """
    doc = {
        "resources": [
            {"id": r, "value": format_rational(instance.values[r])}
            for r in instance.resources
        ],
        "players": [
            {"id": p, "desires": list(instance.sort_resources(instance.desires[p]))}
            for p in instance.players
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def fingerprint(instance: Instance) -> str:
    """Content hash of the canonical serialization, for pairing files."""
    digest = hashlib.sha256(format_instance(instance).encode("utf-8")).hexdigest()
    return f"sha256:{digest}"


def bundle_value(instance: Instance, bundle: Iterable[str]) -> Fraction:
    """Exact sum of resource values over a set of resource ids."""
    total = Fraction(0)
    for j in bundle:
        total += instance.value(j)
    return total


def validate_allocation(instance: Instance, allocation: Allocation) -> None:
    """Check disjointness and desire membership; raise ModelError if violated."""
    seen: dict[str, str] = {}
    for p, bundle in allocation.bundles.items():
        if p not in instance.desires:
            raise ModelError(f"allocation names unknown player {p!r}")
        wanted = instance.desires[p]
        for j in bundle:
            if j not in instance.values:
                raise ModelError(f"allocation assigns unknown resource {j!r}")
            if j not in wanted:
                raise ModelError(f"resource {j!r} assigned to {p!r} who does not desire it")
            if j in seen:
                raise ModelError(f"resource {j!r} assigned to both {seen[j]!r} and {p!r}")
            seen[j] = p


def allocation_value(instance: Instance, allocation: Allocation) -> Fraction:
    """Minimum bundle value over all players of the instance.

    Every player must have an entry in the allocation (possibly empty).
    """
    validate_allocation(instance, allocation)
    missing = set(instance.players) - set(allocation.bundles)
    if missing:
        raise ModelError(f"allocation missing player {sorted(missing)[0]!r}")
    if not instance.players:
        return Fraction(0)
    return min(
        bundle_value(instance, allocation.bundles[p]) for p in instance.players
    )
