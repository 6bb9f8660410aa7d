"""Rendering of summary reports: text, JSON, CSV and chart files.

The delimited formats carry the same figures as the text form so they
can land in spreadsheets or downstream scripts unchanged. Chart
rendering is optional and imports matplotlib lazily; everything else
stays importable without it.
"""

from __future__ import annotations

import json
from pathlib import Path

from hazlab.generate import StrategyComparison
from hazlab.review import SummaryReport

TARGET_KIND_LABELS = {
    "other_traffic_participant": "other traffic participants",
    "passengers": "passengers",
    "infrastructure_law": "infrastructure/law",
    "other": "other",
}


def comparison_lines(name: str, comparison: StrategyComparison) -> list[str]:
    lines = [
        f"strategy comparison for catalog {name!r}:",
        f"  {comparison.malfunction_route_total} malfunction-route vs "
        f"{comparison.deviation_route_total} deviation-route "
        f"({float(comparison.reduction_ratio):.1f}x)",
        f"  distinct behaviors: {comparison.distinct_behaviors}; "
        f"applicable malfunction rows: "
        f"{comparison.malfunction_route_applicable}; "
        f"coverage gaps: {len(comparison.coverage_gaps)}",
    ]
    if comparison.unmapped_malfunctions:
        lines.append("  unmapped malfunctions: "
                     + ", ".join(comparison.unmapped_malfunctions))
    if comparison.deviations_without_malfunction:
        lines.append("  deviation classes without a malfunction: "
                     + ", ".join(comparison.deviations_without_malfunction))
    return lines


def render_text(report: SummaryReport) -> str:
    lines = [
        f"project: {report.project} (store version {report.store_version})",
        "rows: {total} total; generated {generated}, "
        "not_hazardous {not_hazardous}, hazardous {hazardous}".format(
            total=report.total_phs, **report.status_counts),
    ]
    named = [
        f"{TARGET_KIND_LABELS[kind]} {count}"
        for kind, count in report.hazards_by_target.items()
        if count
    ]
    lines.append("hazards: " + (", ".join(named) if named else "none"))
    if report.total_traces:
        lines.append(f"trace links: {report.total_traces}")
    if report.orphaned:
        lines.append("orphaned rows: " + ", ".join(report.orphaned))
    for scenario_id, labels in report.scenario_deviations.items():
        if labels:
            lines.append(f"deviations in {scenario_id} ({len(labels)}):")
            for label in labels:
                lines.append(f"  - {label}")
    for name, comparison in report.comparisons.items():
        lines.extend(comparison_lines(name, comparison))
    lines.append(f"decisions recorded: {report.decisions_recorded}")
    return "\n".join(lines) + "\n"


def render_json(report: SummaryReport) -> str:
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def _csv_field(value: str) -> str:
    if any(ch in value for ch in ',"\n\r'):
        return '"' + value.replace('"', '""') + '"'
    return value


def render_csv(report: SummaryReport) -> str:
    """Flat section,key,value rows; lists join with ';'."""
    rows: list[tuple[str, str, str]] = [
        ("project", "name", report.project),
        ("project", "store_version", str(report.store_version)),
        ("project", "total_phs", str(report.total_phs)),
        ("project", "total_hazards", str(report.total_hazards)),
        ("project", "total_traces", str(report.total_traces)),
        ("project", "decisions_recorded", str(report.decisions_recorded)),
    ]
    for status, count in report.status_counts.items():
        rows.append(("status", status, str(count)))
    for kind, count in report.hazards_by_target.items():
        rows.append(("hazards_by_target", kind, str(count)))
    for scenario_id, labels in report.scenario_deviations.items():
        rows.append(("scenario_deviations", scenario_id, ";".join(labels)))
    if report.orphaned:
        rows.append(("project", "orphaned", ";".join(report.orphaned)))
    for name, comparison in report.comparisons.items():
        section = f"comparison:{name}"
        for key, value in comparison.to_dict().items():
            if isinstance(value, list):
                joined = ";".join(
                    ",".join(item) if isinstance(item, list) else str(item)
                    for item in value)
                rows.append((section, key, joined))
            else:
                rows.append((section, key, str(value)))
    lines = ["section,key,value"]
    for section, key, value in rows:
        lines.append(",".join(_csv_field(part)
                              for part in (section, key, value)))
    return "\n".join(lines) + "\n"


def render_figures(report: SummaryReport, out_dir: str | Path) -> list[Path]:
    """Write PNG charts next to the delimited output; returns the paths."""
    import matplotlib

    matplotlib.use("Agg")
    from matplotlib import pyplot

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def bar_chart(path: Path, title: str, labels: list[str],
                  values: list[int], color: str) -> None:
        figure, axes = pyplot.subplots(figsize=(6.0, 3.6))
        axes.bar(range(len(values)), values, color=color)
        axes.set_xticks(range(len(labels)))
        axes.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
        axes.set_title(title)
        axes.set_ylabel("count")
        for index, value in enumerate(values):
            axes.annotate(str(value), (index, value), ha="center",
                          va="bottom", fontsize=8)
        figure.tight_layout()
        figure.savefig(path, dpi=120)
        pyplot.close(figure)
        written.append(path)

    bar_chart(out / "status_counts.png", "Review status",
              list(report.status_counts.keys()),
              list(report.status_counts.values()), "#4878a8")
    bar_chart(out / "hazards_by_target.png", "Hazards by target kind",
              [TARGET_KIND_LABELS[k] for k in report.hazards_by_target],
              list(report.hazards_by_target.values()), "#a84848")

    if report.comparisons:
        figure, axes = pyplot.subplots(figsize=(6.4, 3.6))
        names = list(report.comparisons.keys())
        series = [
            ("malfunction route", "#a84848",
             [c.malfunction_route_total
              for c in report.comparisons.values()]),
            ("deviation route", "#4878a8",
             [c.deviation_route_total for c in report.comparisons.values()]),
            ("distinct behaviors", "#48a878",
             [c.distinct_behaviors for c in report.comparisons.values()]),
        ]
        width = 0.25
        for offset, (label, color, values) in enumerate(series):
            positions = [i + (offset - 1) * width for i in range(len(names))]
            axes.bar(positions, values, width=width, label=label,
                     color=color)
            for position, value in zip(positions, values):
                axes.annotate(str(value), (position, value), ha="center",
                              va="bottom", fontsize=8)
        axes.set_xticks(range(len(names)))
        axes.set_xticklabels(names, fontsize=8)
        axes.set_title("Rows to review per strategy")
        axes.set_ylabel("count")
        axes.legend(fontsize=8)
        figure.tight_layout()
        figure.savefig(out / "strategy_comparison.png", dpi=120)
        pyplot.close(figure)
        written.append(out / "strategy_comparison.png")

    return written
