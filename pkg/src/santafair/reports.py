"""Report rendering, witness files, and the gap measurement campaign.

Reports are plain structured text with every rational serialized exactly
as ``p/q`` (integers as ``p``).  Witness files are JSON carrying the
instance fingerprint so a witness can never be verified against the wrong
instance.  Campaign output is a delimited CSV of per-instance rows plus a
text summary, a dumped worst instance, and a histogram figure.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import oracle
from .configlp import Counters, DualWitness, WitnessCheck
from .generator import GeneratorSpec, generate_instance
from .model import (
    GuardExceeded,
    Instance,
    ModelError,
    format_instance,
    format_rational,
    parse_rational,
)

ALPHA = Fraction(23, 6)


def write_witness_file(
    path: str | Path, witness: DualWitness, instance_fingerprint: str
) -> None:
    doc = {
        "instance_fingerprint": instance_fingerprint,
        "tau": format_rational(witness.tau),
        "y": {p: format_rational(v) for p, v in sorted(witness.y.items())},
        "z": {r: format_rational(v) for r, v in sorted(witness.z.items())},
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_witness_file(path: str | Path) -> tuple[str, DualWitness]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ModelError(f"witness syntax error at line {e.lineno}: {e.msg}") from None
    try:
        fp = doc["instance_fingerprint"]
        tau = parse_rational(doc["tau"])
        y = {p: parse_rational(v) for p, v in doc["y"].items()}
        z = {r: parse_rational(v) for r, v in doc["z"].items()}
    except (KeyError, TypeError, AttributeError) as e:
        raise ModelError(f"malformed witness file: {e!r}") from None
    return fp, DualWitness(tau=tau, y=y, z=z)


def render_witness(witness: DualWitness) -> list[str]:
    lines = [f"tau = {format_rational(witness.tau)}"]
    for p, v in sorted(witness.y.items()):
        lines.append(f"y[{p}] = {format_rational(v)}")
    for r, v in sorted(witness.z.items()):
        lines.append(f"z[{r}] = {format_rational(v)}")
    lines.append(f"sum_y = {format_rational(witness.sum_y())}")
    lines.append(f"sum_z = {format_rational(witness.sum_z())}")
    return lines


def render_witness_check(check: WitnessCheck) -> list[str]:
    lines = [
        f"objective condition: sum_y = {format_rational(check.sum_y)} "
        f"> sum_z = {format_rational(check.sum_z)}: "
        f"{'ok' if check.objective_ok else 'VIOLATED'}",
        f"nonnegative entries: {'ok' if check.nonnegative_ok else 'VIOLATED'}",
        f"pricing condition: checked {check.players_checked} weighted players, "
        f"{len(check.violations)} violation(s)",
    ]
    for player, resources, zc, yi in check.violations:
        rs = " ".join(sorted(resources))
        lines.append(
            f"  violated: player {player}, configuration {{{rs}}}, "
            f"z(C) = {format_rational(zc)} < y = {format_rational(yi)}"
        )
    lines.append(f"verdict: {'VALID' if check.ok else 'INVALID'}")
    return lines


def render_counters(counters: Counters, extra: dict[str, int] | None = None) -> list[str]:
    lines = [
        f"lp_pivots = {counters.lp_pivots}",
        f"configs_enumerated = {counters.configs_enumerated}",
    ]
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {value}")
    return lines


# ---------------------------------------------------------------------------
# gap campaign
# ---------------------------------------------------------------------------


@dataclass
class CampaignRow:
    index: int
    seed: int
    status: str  # "ok" or "guard-exceeded"
    report: oracle.GapReport | None = None


@dataclass
class CampaignSummary:
    spec: GeneratorSpec
    count: int
    rows: list[CampaignRow] = field(default_factory=list)
    skipped: int = 0
    max_gap: Fraction | None = None
    worst: CampaignRow | None = None

    @property
    def bound_ok(self) -> bool:
        return self.max_gap is None or self.max_gap <= ALPHA


def run_gap_campaign(
    spec: GeneratorSpec,
    count: int,
    *,
    node_guard: int = oracle.DEFAULT_NODE_GUARD,
    subset_guard: int = oracle.DEFAULT_SUBSET_GUARD,
) -> CampaignSummary:
    """Generate ``count`` instances (seed offset by index) and measure gaps.

    Guard exceedances are counted and skipped, never fatal.
    """
    summary = CampaignSummary(spec=spec, count=count)
    for idx in range(count):
        row_spec = GeneratorSpec(
            players=spec.players,
            resources=spec.resources,
            density=spec.density,
            grid_denominator=spec.grid_denominator,
            seed=(spec.seed + idx) % (1 << 64),
        )
        instance = generate_instance(row_spec)
        row = CampaignRow(index=idx, seed=row_spec.seed, status="ok")
        try:
            row.report = oracle.integrality_gap(
                instance, node_guard=node_guard, subset_guard=subset_guard
            )
        except GuardExceeded:
            row.status = "guard-exceeded"
            summary.skipped += 1
        summary.rows.append(row)
        if row.report is not None:
            if summary.max_gap is None or row.report.gap > summary.max_gap:
                summary.max_gap = row.report.gap
                summary.worst = row
    return summary


def campaign_instance(summary: CampaignSummary, row: CampaignRow) -> Instance:
    spec = summary.spec
    return generate_instance(
        GeneratorSpec(
            players=spec.players,
            resources=spec.resources,
            density=spec.density,
            grid_denominator=spec.grid_denominator,
            seed=row.seed,
        )
    )


def write_campaign_csv(summary: CampaignSummary, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "index",
                "seed",
                "status",
                "opt_integral",
                "opt_star",
                "gap",
                "fingerprint",
            ]
        )
        for row in summary.rows:
            if row.report is None:
                writer.writerow([row.index, row.seed, row.status, "", "", "", ""])
            else:
                writer.writerow(
                    [
                        row.index,
                        row.seed,
                        row.status,
                        format_rational(row.report.opt_integral),
                        format_rational(row.report.opt_star),
                        format_rational(row.report.gap),
                        row.report.instance_fingerprint,
                    ]
                )


def gap_histogram_counts(
    summary: CampaignSummary, bins: int = 12
) -> list[tuple[str, int]]:
    """Counts over equal float-width bins spanning [1, ALPHA] (display only)."""
    lo, hi = 1.0, float(ALPHA)
    width = (hi - lo) / bins
    counts = [0] * bins
    for row in summary.rows:
        if row.report is None:
            continue
        g = float(row.report.gap)
        k = min(bins - 1, max(0, int((g - lo) / width)))
        counts[k] += 1
    out = []
    for k in range(bins):
        label = f"[{lo + k * width:.3f}, {lo + (k + 1) * width:.3f})"
        out.append((label, counts[k]))
    return out


def render_campaign_summary(summary: CampaignSummary) -> list[str]:
    lines = [
        f"instances = {summary.count}",
        f"measured = {summary.count - summary.skipped}",
        f"guard_exceeded = {summary.skipped}",
    ]
    if summary.max_gap is not None:
        lines.append(f"max_gap = {format_rational(summary.max_gap)}")
        lines.append(f"max_gap_float = {float(summary.max_gap):.6f}")
        assert summary.worst is not None
        lines.append(f"worst_index = {summary.worst.index}")
        lines.append(f"worst_seed = {summary.worst.seed}")
    lines.append(f"gap_bound = {format_rational(ALPHA)}")
    lines.append(f"gap_bound_holds = {'yes' if summary.bound_ok else 'NO'}")
    lines.append("histogram:")
    for label, count in gap_histogram_counts(summary):
        bar = "#" * count if count <= 60 else "#" * 60 + "+"
        lines.append(f"  {label} {count:6d} {bar}")
    return lines


def write_gap_histogram_figure(summary: CampaignSummary, path: str | Path) -> None:
    """Render the gap distribution to an image file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    gaps = [
        float(row.report.gap) for row in summary.rows if row.report is not None
    ]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if gaps:
        ax.hist(gaps, bins=24, range=(1.0, float(ALPHA)), color="#4878d0", edgecolor="black")
    ax.axvline(float(ALPHA), color="red", linestyle="--", label="guaranteed bound 23/6")
    ax.axvline(2.0, color="gray", linestyle=":", label="worst known gap 2")
    ax.set_xlabel("fractional / integral optimum")
    ax.set_ylabel("instances")
    ax.set_title(
        f"gap distribution over {summary.count - summary.skipped} instances"
    )
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def write_campaign_outputs(summary: CampaignSummary, out_dir: str | Path) -> dict[str, Path]:
    """Write CSV, summary text, worst instance, and histogram figure."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": out / "gap_results.csv",
        "summary": out / "gap_summary.txt",
        "figure": out / "gap_histogram.png",
    }
    write_campaign_csv(summary, paths["csv"])
    paths["summary"].write_text("\n".join(render_campaign_summary(summary)) + "\n")
    write_gap_histogram_figure(summary, paths["figure"])
    if summary.worst is not None:
        paths["worst"] = out / "worst_instance.json"
        paths["worst"].write_text(
            format_instance(campaign_instance(summary, summary.worst))
        )
    return paths
