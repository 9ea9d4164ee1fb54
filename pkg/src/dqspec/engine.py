"""Quality-measuring engine.

Evaluates every record of a dataset against its object's field requirements
and record rules, accumulates the error protocol, computes per-field error
rates, evaluates collection expectations, and flags rare-value anomalies.

Record rules use three-valued (Kleene) logic: comparisons and predicates
over NULL operands are UNKNOWN (represented as ``None``), ``present()`` is
always definite, and only a definitively false expression produces a
violation. NULL cells are reported by ``not_null`` alone, never double
counted by value checks. Cells matching a field's placeholder tokens are
classified as placeholders and skip the field's type and value checks.

Record evaluation is embarrassingly parallel: workers take disjoint record
ranges and the merged protocol is canonically sorted, so output is
byte-identical for any worker count.
"""

from __future__ import annotations

import csv
import io
import json
import operator
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from decimal import Decimal, ROUND_HALF_UP

from .checks import (
    DateCheck,
    DateFormat,
    LikePattern,
    check_date,
    check_digits,
    is_decimal_text,
    is_integer_text,
    match_like,
    parse_date,
)
from .dataset import Dataset, Record
from .model import (
    BinaryLogic,
    Call,
    CollectionRule,
    Comparison,
    DataObjectClass,
    Expr,
    FieldRef,
    FieldSpec,
    FieldType,
    Literal,
    Not,
    SetLiteral,
    expr_field_names,
)


class BindingError(ValueError):
    """Spec field cannot be bound to a dataset column."""


# --------------------------------------------------------------------------
# Results

@dataclass(frozen=True, slots=True)
class Violation:
    object_name: str
    row_index: int
    field_name: str  # empty for record rules
    rule_name: str
    severity: str
    observed: str
    message: str


@dataclass(frozen=True)
class ErrorProtocol:
    violations: tuple[Violation, ...]  # sorted by (row, field, rule)

    def __len__(self) -> int:
        return len(self.violations)


@dataclass(frozen=True)
class BreakdownEntry:
    count: int
    rate_pct: float
    rate_display: str


@dataclass(frozen=True)
class FieldReport:
    field_name: str
    records_total: int
    records_with_error: int
    error_rate_pct: float  # rounded per the reporting rule
    error_rate_display: str
    per_rule_breakdown: dict[str, BreakdownEntry]
    null_count: int
    placeholder_count: int
    placeholder_values: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class CollectionOutcome:
    rule_name: str
    metric: str
    target: str
    comparator: str
    threshold: float
    threshold_is_percent: bool
    metric_value: float | int | None  # None when vacuous (no data)
    passed: bool


@dataclass(frozen=True)
class EvaluationResult:
    protocol: ErrorProtocol
    field_reports: list[FieldReport]
    collection_outcomes: list[CollectionOutcome]
    anomalies: tuple[tuple[str, str, int], ...] = ()  # (field, value, count)

    def __iter__(self):
        return iter((self.protocol, self.field_reports, self.collection_outcomes))


# --------------------------------------------------------------------------
# Rates

def error_rate(error_count: int, total: int) -> float:
    """Detected errors related to processed records, in percent."""
    if total == 0:
        return 0.0
    return error_count * 100.0 / total


def format_rate(error_count: int, total: int) -> str:
    """Display form: half-up to 2 decimals, 4 decimals below 0.01%."""
    if total == 0 or error_count == 0:
        return "0"
    q = Decimal(error_count) * 100 / Decimal(total)
    quantum = Decimal("0.0001") if q < Decimal("0.01") else Decimal("0.01")
    return str(q.quantize(quantum, rounding=ROUND_HALF_UP))


def format_rate_value(pct: float) -> str:
    """Display form for an already-computed percentage."""
    if pct == 0:
        return "0"
    q = Decimal(str(pct))
    quantum = Decimal("0.0001") if 0 < q < Decimal("0.01") else Decimal("0.01")
    return str(q.quantize(quantum, rounding=ROUND_HALF_UP))


def affected_columns(reports: list[FieldReport]) -> tuple[int, float]:
    """Count of fields with at least one defective record, and the share of
    all fields that represents (percent, one decimal)."""
    if not reports:
        raise ValueError("affected_columns requires at least one field report")
    count = sum(1 for r in reports if r.records_with_error >= 1)
    pct = Decimal(count) * 100 / Decimal(len(reports))
    return count, float(pct.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


# --------------------------------------------------------------------------
# Expression compilation (three-valued)

_CMP_FUNCS = {
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


def _coercer_for(ftype: FieldType):
    kind = ftype.kind
    if kind == "text":
        return lambda s: s
    if kind == "integer":
        return lambda s: int(s) if is_integer_text(s) else None
    if kind == "decimal":
        return lambda s: Decimal(s) if is_decimal_text(s) else None
    fmt = DateFormat.parse(ftype.date_format)

    def coerce_date(s):
        d = parse_date(s, fmt)
        return None if isinstance(d, DateCheck) else d

    return coerce_date


def compile_expr(expr: Expr, colmap: dict[str, int], types: dict[str, FieldType]):
    """Compile an expression to ``fn(trimmed_row, cache) -> True|False|None``
    where ``None`` is the Kleene UNKNOWN."""
    if isinstance(expr, Call):
        return _compile_call(expr, colmap, types)
    if isinstance(expr, Not):
        inner = compile_expr(expr.operand, colmap, types)

        def f_not(t, c):
            v = inner(t, c)
            return None if v is None else not v

        return f_not
    if isinstance(expr, BinaryLogic):
        left = compile_expr(expr.left, colmap, types)
        right = compile_expr(expr.right, colmap, types)
        if expr.op == "and":

            def f_and(t, c):
                l = left(t, c)
                if l is False:
                    return False
                r = right(t, c)
                if r is False:
                    return False
                if l is None or r is None:
                    return None
                return True

            return f_and
        if expr.op == "or":

            def f_or(t, c):
                l = left(t, c)
                if l is True:
                    return True
                r = right(t, c)
                if r is True:
                    return True
                if l is None or r is None:
                    return None
                return False

            return f_or

        def f_implies(t, c):
            l = left(t, c)
            if l is False:
                return True
            r = right(t, c)
            if r is True:
                return True
            if l is None or r is None:
                return None
            return False

        return f_implies
    if isinstance(expr, Comparison):
        left = _compile_operand(expr.left, colmap, types)
        right = _compile_operand(expr.right, colmap, types)
        cmp = _CMP_FUNCS[expr.op]

        def f_cmp(t, c):
            l = left(t, c)
            if l is None:
                return None
            r = right(t, c)
            if r is None:
                return None
            return cmp(l, r)

        return f_cmp
    raise TypeError(f"cannot compile {type(expr).__name__} as a condition")


def _compile_operand(expr: Expr, colmap, types):
    """Value-producing side of a comparison; None means UNKNOWN."""
    if isinstance(expr, Literal):
        value = expr.value
        return lambda t, c: value
    if isinstance(expr, FieldRef):
        idx = colmap[expr.name]
        coerce = _coercer_for(types[expr.name])

        def f_value(t, c, idx=idx, coerce=coerce):
            v = c.get(idx, _UNSET)
            if v is _UNSET:
                s = t[idx]
                v = None if s == "" else coerce(s)
                c[idx] = v
            return v

        return f_value
    if isinstance(expr, (Call, Comparison, Not, BinaryLogic)):
        return compile_expr(expr, colmap, types)
    raise TypeError(f"{type(expr).__name__} cannot be used as a comparison operand")


_UNSET = object()


def _compile_call(call: Call, colmap, types):
    fref = call.args[0]
    if not isinstance(fref, FieldRef):
        raise TypeError(f"{call.func}: first argument must be a field reference")
    idx = colmap[fref.name]
    func = call.func

    if func == "present":
        return lambda t, c: t[idx] != ""

    if func == "year_between":
        lo = call.args[1].value
        hi = call.args[2].value
        getter = _compile_operand(fref, colmap, types)

        def f_year(t, c):
            d = getter(t, c)
            return None if d is None else lo <= d.year <= hi

        return f_year

    # Remaining predicates operate on the raw trimmed string and are
    # UNKNOWN on null cells.
    if func == "matches":
        pattern = LikePattern.compile(
            call.args[1].value, case_insensitive="nocase" in call.modifiers
        )
        return lambda t, c: match_like(t[idx], pattern) if t[idx] else None
    if func == "digits":
        n = call.args[1].value
        return lambda t, c: check_digits(t[idx], n) if t[idx] else None
    if func == "length":
        n = call.args[1].value
        return lambda t, c: len(t[idx]) == n if t[idx] else None
    if func == "starts_with":
        prefix = call.args[1].value
        return lambda t, c: t[idx].startswith(prefix) if t[idx] else None
    if func == "in_set":
        allowed = frozenset(call.args[1].members)
        return lambda t, c: t[idx] in allowed if t[idx] else None
    if func == "date_valid":
        fmt = DateFormat.parse(call.args[1].value)
        return (
            lambda t, c: check_date(t[idx], fmt) is DateCheck.VALID if t[idx] else None
        )
    if func == "is_integer":
        return lambda t, c: is_integer_text(t[idx]) if t[idx] else None
    if func == "is_decimal":
        return lambda t, c: is_decimal_text(t[idx]) if t[idx] else None
    raise TypeError(f"unknown predicate {func!r}")


# --------------------------------------------------------------------------
# Field plans

_MSG_MISSING = "value is missing"

_TYPE_MESSAGES = {
    "not_integer": "not a valid integer",
    "not_decimal": "not a valid decimal number",
}


def _type_validator(ftype: FieldType):
    kind = ftype.kind
    if kind == "text":
        return None
    if kind == "integer":
        return lambda s: None if is_integer_text(s) else _TYPE_MESSAGES["not_integer"]
    if kind == "decimal":
        return lambda s: None if is_decimal_text(s) else _TYPE_MESSAGES["not_decimal"]
    fmt = DateFormat.parse(ftype.date_format)
    wrong = f"wrong date format (expected {ftype.date_format})"
    invalid = "invalid calendar date"

    def validate(s):
        status = check_date(s, fmt)
        if status is DateCheck.VALID:
            return None
        return wrong if status is DateCheck.WRONG_FORMAT else invalid

    return validate


class _FieldPlan:
    __slots__ = (
        "i", "idx", "name", "not_null", "severity", "is_error",
        "placeholders", "type_check", "checks",
    )

    def __init__(self, i, idx, spec: FieldSpec, colmap, types):
        self.i = i
        self.idx = idx
        self.name = spec.name
        self.not_null = not spec.nullable
        self.severity = spec.severity
        self.is_error = spec.severity == "error"
        if spec.placeholder_tokens is not None:
            self.placeholders = frozenset(t.casefold() for t in spec.placeholder_tokens)
        else:
            self.placeholders = None
        self.type_check = _type_validator(spec.ftype)
        self.checks = [
            (check.name, compile_expr(check.expr, colmap, types))
            for check in spec.checks
        ]


class _ChunkResult:
    __slots__ = (
        "violations", "nulls", "placeholder_counts", "rule_counts",
        "error_records", "record_rule_counts", "freq_counters",
    )

    def __init__(self, nfields, freq_targets):
        self.violations: list[Violation] = []
        self.nulls = [0] * nfields
        self.placeholder_counts = [Counter() for _ in range(nfields)]
        self.rule_counts = [Counter() for _ in range(nfields)]
        self.error_records = [0] * nfields
        self.record_rule_counts = Counter()
        self.freq_counters = {t: Counter() for t in freq_targets}


class ObjectEvaluator:
    """Binds one data-object class to a dataset header and evaluates records."""

    def __init__(self, obj: DataObjectClass, header: tuple[str, ...]):
        colmap: dict[str, int] = {}
        missing = []
        for f in obj.fields:
            try:
                colmap[f.name] = header.index(f.name)
            except ValueError:
                missing.append(f.name)
        if missing:
            raise BindingError(
                f"object {obj.name!r}: dataset has no column(s) "
                + ", ".join(repr(m) for m in missing)
            )
        types = {f.name: f.ftype for f in obj.fields}
        self.object_name = obj.name
        self.obj = obj
        self.colmap = colmap
        self.types = types
        self.fields = [
            _FieldPlan(i, colmap[f.name], f, colmap, types)
            for i, f in enumerate(obj.fields)
        ]
        self.rules = []
        for rule in obj.record_rules:
            fn = compile_expr(rule.expr, colmap, types)
            involved = sorted(expr_field_names(rule.expr), key=lambda n: colmap[n])
            pairs = [(n, colmap[n]) for n in involved]
            self.rules.append((rule.name, rule.severity, fn, pairs))
        self.freq_rules = [
            cr for cr in obj.collection_rules if cr.metric == "frequency_min"
        ]
        self.freq_targets = sorted({cr.target for cr in self.freq_rules})

    # -- per-record (public, used for spot checks and small data) ----------

    def evaluate_record(self, record: Record) -> list[Violation]:
        res = _ChunkResult(len(self.fields), self.freq_targets)
        self._eval_one(record.row_index, [c.raw for c in record.cells], res)
        res.violations.sort(key=_violation_key)
        return res.violations

    # -- full dataset -------------------------------------------------------

    def evaluate(
        self, dataset: Dataset, workers: int = 1, anomaly_k: int | None = None
    ) -> EvaluationResult:
        n = dataset.record_count
        workers = max(1, int(workers))
        if workers == 1 or n < 2 * workers:
            merged = self._evaluate_range(1, dataset.rows)
        else:
            chunk = -(-n // workers)  # ceil
            spans = [
                (start + 1, dataset.rows[start : start + chunk])
                for start in range(0, n, chunk)
            ]
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(lambda sp: self._evaluate_range(*sp), spans))
            merged = parts[0]
            for part in parts[1:]:
                _merge(merged, part)
        anomalies = self._apply_frequency_rules(dataset, merged, anomaly_k)
        merged.violations.sort(key=_violation_key)
        protocol = ErrorProtocol(violations=tuple(merged.violations))
        reports = self._field_reports(merged, n)
        outcomes = self._collection_outcomes(merged, reports, n)
        return EvaluationResult(
            protocol=protocol,
            field_reports=reports,
            collection_outcomes=outcomes,
            anomalies=anomalies,
        )

    def _evaluate_range(self, start: int, rows) -> _ChunkResult:
        res = _ChunkResult(len(self.fields), self.freq_targets)
        eval_one = self._eval_one
        for off, raw in enumerate(rows):
            eval_one(start + off, raw, res)
        return res

    def _eval_one(self, ridx: int, raw, res: _ChunkResult):
        obj_name = self.object_name
        violations = res.violations
        trimmed = [c.strip() for c in raw]
        cache: dict = {}
        for p in self.fields:
            s = trimmed[p.idx]
            hit = False
            if s == "":
                res.nulls[p.i] += 1
                if p.not_null:
                    violations.append(
                        Violation(
                            obj_name, ridx, p.name, "not_null", p.severity,
                            raw[p.idx], _MSG_MISSING,
                        )
                    )
                    res.rule_counts[p.i]["not_null"] += 1
                    hit = True
            elif p.placeholders is not None and s.casefold() in p.placeholders:
                res.placeholder_counts[p.i][s] += 1
                violations.append(
                    Violation(
                        obj_name, ridx, p.name, "placeholder", p.severity,
                        raw[p.idx], f"placeholder value {s!r}",
                    )
                )
                res.rule_counts[p.i]["placeholder"] += 1
                hit = True
            else:
                if p.type_check is not None:
                    msg = p.type_check(s)
                    if msg is not None:
                        violations.append(
                            Violation(
                                obj_name, ridx, p.name, "type", p.severity,
                                raw[p.idx], msg,
                            )
                        )
                        res.rule_counts[p.i]["type"] += 1
                        hit = True
                for cname, fn in p.checks:
                    if fn(trimmed, cache) is False:
                        violations.append(
                            Violation(
                                obj_name, ridx, p.name, cname, p.severity,
                                raw[p.idx], f"check {cname!r} failed",
                            )
                        )
                        res.rule_counts[p.i][cname] += 1
                        hit = True
            if hit and p.is_error:
                res.error_records[p.i] += 1
        for rname, sev, fn, pairs in self.rules:
            if fn(trimmed, cache) is False:
                observed = ", ".join(f"{n}={trimmed[i]!r}" for n, i in pairs)
                violations.append(
                    Violation(
                        obj_name, ridx, "", rname, sev, observed,
                        f"rule {rname!r} violated",
                    )
                )
                res.record_rule_counts[rname] += 1
        for target, counter in res.freq_counters.items():
            v = trimmed[self.colmap[target]]
            if v:
                counter[v] += 1

    # -- aggregation ---------------------------------------------------------

    def _apply_frequency_rules(
        self, dataset: Dataset, merged: _ChunkResult, anomaly_k: int | None
    ) -> tuple[tuple[str, str, int], ...]:
        anomalies: list[tuple[str, str, int]] = []
        flagged_per_target: dict[str, dict[str, int]] = {}
        for cr in self.freq_rules:
            counts = merged.freq_counters[cr.target]
            if anomaly_k is not None:
                flagged = {v: c for v, c in counts.items() if c <= anomaly_k}
            elif cr.comparator in (">=", ">"):
                cmp = _CMP_FUNCS[cr.comparator]
                flagged = {
                    v: c for v, c in counts.items() if not cmp(c, cr.threshold)
                }
            else:
                flagged = {}
            target_flags = flagged_per_target.setdefault(cr.target, {})
            for v, c in flagged.items():
                if v not in target_flags:
                    target_flags[v] = c
                    anomalies.append((cr.target, v, c))
        for target, flags in flagged_per_target.items():
            if not flags:
                continue
            idx = self.colmap[target]
            for ridx, raw in enumerate(dataset.rows, 1):
                v = raw[idx].strip()
                if v in flags:
                    merged.violations.append(
                        Violation(
                            self.object_name, ridx, target, "frequency", "anomaly",
                            raw[idx],
                            f"value occurs only {flags[v]} time(s)",
                        )
                    )
        anomalies.sort(key=lambda a: (a[0], a[2], a[1]))
        return tuple(anomalies)

    def _field_reports(self, merged: _ChunkResult, total: int) -> list[FieldReport]:
        reports = []
        for p, spec in zip(self.fields, self.obj.fields):
            breakdown: dict[str, BreakdownEntry] = {}
            order = ["not_null", "type", "placeholder"] + [c.name for c in spec.checks]
            counts = merged.rule_counts[p.i]
            for key in order:
                c = counts.get(key, 0)
                if c:
                    breakdown[key] = BreakdownEntry(
                        count=c,
                        rate_pct=float(format_rate(c, total)),
                        rate_display=format_rate(c, total),
                    )
            errors = merged.error_records[p.i]
            ph = merged.placeholder_counts[p.i]
            reports.append(
                FieldReport(
                    field_name=p.name,
                    records_total=total,
                    records_with_error=errors,
                    error_rate_pct=float(format_rate(errors, total)),
                    error_rate_display=format_rate(errors, total),
                    per_rule_breakdown=breakdown,
                    null_count=merged.nulls[p.i],
                    placeholder_count=sum(ph.values()),
                    placeholder_values=tuple(
                        sorted(ph.items(), key=lambda kv: (-kv[1], kv[0]))
                    ),
                )
            )
        return reports

    def _collection_outcomes(
        self, merged: _ChunkResult, reports: list[FieldReport], total: int
    ) -> list[CollectionOutcome]:
        by_field = {r.field_name: r for r in reports}
        outcomes = []
        for cr in self.obj.collection_rules:
            threshold = (
                float(cr.threshold) if cr.threshold_is_percent else int(cr.threshold)
            )
            cmp = _CMP_FUNCS[cr.comparator]
            metric_value: float | int | None
            if cr.metric == "error_rate":
                if cr.target in by_field:
                    count = by_field[cr.target].records_with_error
                else:
                    count = merged.record_rule_counts.get(cr.target, 0)
                metric_value = error_rate(count, total)
                passed = cmp(metric_value, threshold) if total else True
            elif cr.metric == "null_rate":
                metric_value = error_rate(by_field[cr.target].null_count, total)
                passed = cmp(metric_value, threshold) if total else True
            else:  # frequency_min
                counts = merged.freq_counters[cr.target]
                metric_value = min(counts.values()) if counts else None
                passed = True if metric_value is None else cmp(metric_value, threshold)
            outcomes.append(
                CollectionOutcome(
                    rule_name=cr.name,
                    metric=cr.metric,
                    target=cr.target,
                    comparator=cr.comparator,
                    threshold=threshold,
                    threshold_is_percent=cr.threshold_is_percent,
                    metric_value=metric_value,
                    passed=passed,
                )
            )
        return outcomes


def _violation_key(v: Violation):
    return (v.row_index, v.field_name, v.rule_name)


def _merge(into: _ChunkResult, part: _ChunkResult):
    into.violations.extend(part.violations)
    for i in range(len(into.nulls)):
        into.nulls[i] += part.nulls[i]
        into.error_records[i] += part.error_records[i]
        into.placeholder_counts[i].update(part.placeholder_counts[i])
        into.rule_counts[i].update(part.rule_counts[i])
    into.record_rule_counts.update(part.record_rule_counts)
    for target, counter in part.freq_counters.items():
        into.freq_counters[target].update(counter)


# --------------------------------------------------------------------------
# Convenience entry points (spec-level operations)

def evaluate_record(
    record: Record, obj: DataObjectClass, header: tuple[str, ...]
) -> list[Violation]:
    return ObjectEvaluator(obj, header).evaluate_record(record)


def evaluate_dataset(
    dataset: Dataset,
    obj: DataObjectClass,
    workers: int = 1,
    anomaly_k: int | None = None,
) -> EvaluationResult:
    return ObjectEvaluator(obj, dataset.header).evaluate(
        dataset, workers=workers, anomaly_k=anomaly_k
    )


def frequency_anomalies(
    dataset: Dataset, field_name: str, k: int = 3
) -> list[tuple[str, int]]:
    """Distinct non-null values occurring at most k times, ordered by
    (count ascending, value)."""
    counter = Counter(v.strip() for v in dataset.column(field_name) if v.strip())
    rare = [(v, c) for v, c in counter.items() if c <= k]
    rare.sort(key=lambda vc: (vc[1], vc[0]))
    return rare


# --------------------------------------------------------------------------
# Protocol export

_PROTOCOL_FIELDS = ("object", "row", "field", "rule", "severity", "value", "message")


def protocol_to_jsonl(protocol: ErrorProtocol) -> str:
    """One violation per line, rows ascending, stable key order."""
    lines = []
    for v in protocol.violations:
        lines.append(
            json.dumps(
                {
                    "object": v.object_name,
                    "row": v.row_index,
                    "field": v.field_name,
                    "rule": v.rule_name,
                    "severity": v.severity,
                    "value": v.observed,
                    "message": v.message,
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")


def protocol_to_csv(protocol: ErrorProtocol) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(_PROTOCOL_FIELDS)
    for v in protocol.violations:
        writer.writerow(
            [
                v.object_name,
                v.row_index,
                v.field_name,
                v.rule_name,
                v.severity,
                v.observed,
                v.message,
            ]
        )
    return buf.getvalue()
