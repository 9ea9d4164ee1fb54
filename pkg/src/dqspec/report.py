"""Summary reports over evaluation results, rendered as a per-field table
(markdown), RFC 4180 CSV, or JSON with full numeric precision."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .engine import (
    CollectionOutcome,
    EvaluationResult,
    FieldReport,
    affected_columns,
    error_rate,
    format_rate_value,
)
from .model import Call, DataObjectClass, FieldSpec, SetLiteral, walk_expr


@dataclass(frozen=True)
class SummaryReport:
    object_name: str
    records_total: int
    field_reports: list[FieldReport]
    collection_outcomes: list[CollectionOutcome]
    affected: tuple[int, float]  # (count, percent of fields)
    anomalies: tuple[tuple[str, str, int], ...]


def summarize(obj: DataObjectClass, result: EvaluationResult, records_total: int) -> SummaryReport:
    return SummaryReport(
        object_name=obj.name,
        records_total=records_total,
        field_reports=result.field_reports,
        collection_outcomes=result.collection_outcomes,
        affected=affected_columns(result.field_reports),
        anomalies=result.anomalies,
    )


# --------------------------------------------------------------------------
# Requirement and comment phrasing

def requirement_summary(spec: FieldSpec) -> str:
    """Compact single-line rendering of a field's requirements,
    e.g. ``integer, 4 digits, NOT NULL``."""
    if spec.ftype.kind == "date":
        parts = [f"date {spec.ftype.date_format}"]
    else:
        parts = [spec.ftype.kind]
    for check in spec.checks:
        for node in walk_expr(check.expr):
            if isinstance(node, Call):
                if node.func == "digits":
                    parts.append(f"{node.args[1].value} digits")
                elif node.func == "matches":
                    parts.append(f"pattern {node.args[1].value!r}")
                elif node.func == "in_set" and isinstance(node.args[1], SetLiteral):
                    parts.append(f"{len(set(node.args[1].members))} allowed values")
                elif node.func == "starts_with":
                    parts.append(f"starts with {node.args[1].value!r}")
    parts.append("NULL" if spec.nullable else "NOT NULL")
    return ", ".join(parts)


_COMMENT_LABELS = {
    "not_null": "NULL values",
    "type": "invalid type",
    "placeholder": "placeholder values",
}


def _comment(report: FieldReport) -> str:
    parts = []
    for rule, entry in report.per_rule_breakdown.items():
        label = _COMMENT_LABELS.get(rule, f"failed {rule}")
        parts.append(f"{entry.count} {label} ({entry.rate_display}%)")
    return "; ".join(parts) if parts else "-"


# --------------------------------------------------------------------------
# Renderers

def render_markdown(report: SummaryReport, obj: DataObjectClass) -> str:
    by_name = {f.name: f for f in obj.fields}
    lines = [
        f"# Data quality report: {report.object_name}",
        "",
        f"Records processed: {report.records_total}",
        "",
        "| Field | Requirement | Errors | Error rate | Comment |",
        "| --- | --- | ---: | ---: | --- |",
    ]
    for fr in report.field_reports:
        req = requirement_summary(by_name[fr.field_name])
        rate = "0%" if fr.records_with_error == 0 else f"{fr.error_rate_display}%"
        lines.append(
            f"| {fr.field_name} | {req} | {fr.records_with_error} | {rate} "
            f"| {_comment(fr)} |"
        )
    count, pct = report.affected
    lines.append("")
    lines.append(
        f"{count} of {len(report.field_reports)} columns ({pct}%) have at least "
        "one defective record."
    )
    if report.collection_outcomes:
        lines.append("")
        lines.append("Collection expectations:")
        for oc in report.collection_outcomes:
            if oc.metric_value is None:
                observed = "n/a"
            elif oc.metric == "frequency_min":
                observed = str(oc.metric_value)
            else:
                observed = f"{format_rate_value(oc.metric_value)}%"
            threshold = (
                f"{oc.threshold}%" if oc.threshold_is_percent else str(int(oc.threshold))
            )
            status = "PASS" if oc.passed else "FAIL"
            lines.append(
                f"- {oc.rule_name}: {oc.metric}({oc.target}) = {observed} "
                f"{oc.comparator} {threshold} -> {status}"
            )
    if report.anomalies:
        lines.append("")
        lines.append("Anomalies (check with the data supplier):")
        for field_name, value, count_ in report.anomalies:
            lines.append(f"- {field_name}: {value!r} occurs {count_} time(s)")
    return "\n".join(lines) + "\n"


def render_json(report: SummaryReport) -> str:
    """Stable key order; raw (unrounded) rates alongside display strings."""
    total = report.records_total
    fields = []
    for fr in report.field_reports:
        fields.append(
            {
                "field": fr.field_name,
                "records_total": total,
                "records_with_error": fr.records_with_error,
                "error_rate_raw": error_rate(fr.records_with_error, total),
                "error_rate_display": fr.error_rate_display,
                "null_count": fr.null_count,
                "placeholder_count": fr.placeholder_count,
                "placeholder_values": [[v, c] for v, c in fr.placeholder_values],
                "breakdown": {
                    rule: {
                        "count": entry.count,
                        "rate_raw": error_rate(entry.count, total),
                        "rate_display": entry.rate_display,
                    }
                    for rule, entry in fr.per_rule_breakdown.items()
                },
            }
        )
    payload = {
        "object": report.object_name,
        "records_total": total,
        "affected_columns": {
            "count": report.affected[0],
            "of": len(report.field_reports),
            "pct": report.affected[1],
        },
        "fields": fields,
        "collection_expectations": [
            {
                "name": oc.rule_name,
                "metric": oc.metric,
                "target": oc.target,
                "comparator": oc.comparator,
                "threshold": oc.threshold,
                "threshold_is_percent": oc.threshold_is_percent,
                "value": oc.metric_value,
                "passed": oc.passed,
            }
            for oc in report.collection_outcomes
        ],
        "anomalies": [
            {"field": f, "value": v, "count": c} for f, v, c in report.anomalies
        ],
    }
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def render_csv(report: SummaryReport, obj: DataObjectClass) -> str:
    """Fixed header; quoting per RFC 4180 so the output re-parses cleanly."""
    by_name = {f.name: f for f in obj.fields}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(
        [
            "field",
            "requirement",
            "error_count",
            "error_rate_pct",
            "null_count",
            "placeholder_count",
            "breakdown",
        ]
    )
    for fr in report.field_reports:
        breakdown = "; ".join(
            f"{rule}={entry.count}" for rule, entry in fr.per_rule_breakdown.items()
        )
        writer.writerow(
            [
                fr.field_name,
                requirement_summary(by_name[fr.field_name]),
                fr.records_with_error,
                fr.error_rate_display,
                fr.null_count,
                fr.placeholder_count,
                breakdown,
            ]
        )
    return buf.getvalue()
