"""Canonical text form for quality specs.

The emitted form is deterministic: two-space indentation, one statement per
line, explicit nullability, explicit check and expectation names, minimal
parentheses. ``parse_spec(serialize_spec(s))`` is structurally equal to
``s`` for any valid spec.
"""

from __future__ import annotations

from decimal import Decimal

from .model import (
    BinaryLogic,
    Call,
    CollectionRule,
    Comparison,
    DataObjectClass,
    Expr,
    FieldRef,
    FieldSpec,
    Literal,
    Not,
    QualitySpec,
    RecordRule,
    SetLiteral,
)

_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_NOT = 4
_PREC_CMP = 5
_PREC_PRIMARY = 6

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def quote_string(value: str) -> str:
    return '"' + "".join(_ESCAPES.get(ch, ch) for ch in value) + '"'


def _number(value: int | Decimal) -> str:
    return str(value)


def serialize_expr(expr: Expr, min_prec: int = _PREC_IMPLIES) -> str:
    text, prec = _render(expr)
    if prec < min_prec:
        return f"({text})"
    return text


def _render(expr: Expr) -> tuple[str, int]:
    if isinstance(expr, FieldRef):
        return expr.name, _PREC_PRIMARY
    if isinstance(expr, Literal):
        if isinstance(expr.value, str):
            return quote_string(expr.value), _PREC_PRIMARY
        return _number(expr.value), _PREC_PRIMARY
    if isinstance(expr, SetLiteral):
        inner = ", ".join(quote_string(m) for m in expr.members)
        return "{" + inner + "}", _PREC_PRIMARY
    if isinstance(expr, Call):
        parts = [serialize_expr(a) for a in expr.args]
        parts.extend(expr.modifiers)
        return f"{expr.func}({', '.join(parts)})", _PREC_PRIMARY
    if isinstance(expr, Not):
        return f"not {serialize_expr(expr.operand, _PREC_NOT)}", _PREC_NOT
    if isinstance(expr, Comparison):
        left = serialize_expr(expr.left, _PREC_PRIMARY)
        right = serialize_expr(expr.right, _PREC_PRIMARY)
        return f"{left} {expr.op} {right}", _PREC_CMP
    if isinstance(expr, BinaryLogic):
        if expr.op == "implies":
            left = serialize_expr(expr.left, _PREC_OR)
            right = serialize_expr(expr.right, _PREC_IMPLIES)
            return f"{left} implies {right}", _PREC_IMPLIES
        if expr.op == "or":
            left = serialize_expr(expr.left, _PREC_OR)
            right = serialize_expr(expr.right, _PREC_AND)
            return f"{left} or {right}", _PREC_OR
        left = serialize_expr(expr.left, _PREC_AND)
        right = serialize_expr(expr.right, _PREC_NOT)
        return f"{left} and {right}", _PREC_AND
    raise TypeError(f"cannot serialize {type(expr).__name__}")


def _field_lines(f: FieldSpec) -> list[str]:
    if f.ftype.kind == "date":
        type_text = f"date({quote_string(f.ftype.date_format)})"
    else:
        type_text = f.ftype.kind
    nullability = "nullable" if f.nullable else "not_null"
    head = f"  field {f.name}: {type_text} {nullability}"
    body: list[str] = []
    for check in f.checks:
        body.append(f"    check {check.name}: {serialize_expr(check.expr)};")
    if f.placeholder_tokens is not None:
        toks = ", ".join(quote_string(t) for t in f.placeholder_tokens)
        body.append(f"    placeholders {{{toks}}};")
    if f.severity != "error":
        body.append(f"    severity {f.severity};")
    if not body:
        return [head + ";"]
    return [head + " {", *body, "  }"]


def _rule_line(rule: RecordRule) -> str:
    sev = f" {rule.severity}" if rule.severity != "error" else ""
    return f"  rule {rule.name}{sev}: {serialize_expr(rule.expr)};"


def _expect_line(cr: CollectionRule) -> str:
    threshold = _number(cr.threshold) + ("%" if cr.threshold_is_percent else "")
    return (
        f"  expect {cr.name}: {cr.metric}({cr.target}) {cr.comparator} {threshold};"
    )


def _object_lines(obj: DataObjectClass) -> list[str]:
    source = f" from {quote_string(obj.source_hint)}" if obj.source_hint else ""
    lines = [f"object {obj.name}{source} {{"]
    for f in obj.fields:
        lines.extend(_field_lines(f))
    for rule in obj.record_rules:
        lines.append(_rule_line(rule))
    for cr in obj.collection_rules:
        lines.append(_expect_line(cr))
    lines.append("}")
    return lines


def serialize_spec(spec: QualitySpec) -> str:
    """Render the canonical ``.dq`` text for a spec."""
    lines = [f"version {spec.version};", ""]
    for i, obj in enumerate(spec.objects):
        if i:
            lines.append("")
        lines.extend(_object_lines(obj))
    return "\n".join(lines) + "\n"
