"""Semantic validation of parsed (or hand-built) quality specifications.

Produces a list of diagnostics; error-level entries make a spec invalid
(``parse_spec`` raises on the first one), warnings flag suspicious but
legal constructs.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .checks import DateFormat, LikePattern, PatternError
from .errors import SpecSemanticError
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
    METRICS,
    Not,
    Pos,
    PREDICATE_SIGNATURES,
    QualitySpec,
    SetLiteral,
    SEVERITIES,
    walk_expr,
)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # error | warning
    message: str
    line: int | None = None
    col: int | None = None

    def __str__(self) -> str:
        where = f"line {self.line}, col {self.col}: " if self.line is not None else ""
        return f"{where}{self.severity}: {self.message}"


def check_spec_semantics(spec: QualitySpec) -> list[Diagnostic]:
    """Validate names, references, types and thresholds across the spec."""
    checker = _Checker()
    checker.run(spec)
    return checker.diags


class _Checker:
    def __init__(self):
        self.diags: list[Diagnostic] = []

    def error(self, msg: str, pos: Pos | None):
        self.diags.append(
            Diagnostic("error", msg, pos.line if pos else None, pos.col if pos else None)
        )

    def warn(self, msg: str, pos: Pos | None):
        self.diags.append(
            Diagnostic("warning", msg, pos.line if pos else None, pos.col if pos else None)
        )

    def run(self, spec: QualitySpec):
        if spec.version < 1:
            self.error(f"spec version must be >= 1, got {spec.version}", None)
        if not spec.objects:
            self.error("spec declares no objects", None)
        seen_objects: set[str] = set()
        for obj in spec.objects:
            if obj.name in seen_objects:
                self.error(f"duplicate object name {obj.name!r}", obj.pos)
            seen_objects.add(obj.name)
            self.check_object(obj)

    def check_object(self, obj: DataObjectClass):
        field_names: set[str] = set()
        for f in obj.fields:
            if f.name in field_names:
                self.error(f"duplicate field name {f.name!r}", f.pos)
            field_names.add(f.name)
        types = {f.name: f.ftype for f in obj.fields}

        for f in obj.fields:
            self.check_field(f, obj, types)

        rule_names: set[str] = set()
        for rule in obj.record_rules:
            if rule.name in rule_names:
                self.error(f"duplicate rule name {rule.name!r}", rule.pos)
            rule_names.add(rule.name)
            if rule.name in field_names:
                self.error(
                    f"rule name {rule.name!r} collides with a field name", rule.pos
                )
            if rule.severity not in SEVERITIES:
                self.error(f"invalid severity {rule.severity!r}", rule.pos)
            refs = self.check_expr(rule.expr, types, expect_bool=True)
            if not refs:
                self.error(f"rule {rule.name!r} references no fields", rule.pos)

        expect_names: set[str] = set()
        for cr in obj.collection_rules:
            if cr.name in expect_names:
                self.error(f"duplicate expectation name {cr.name!r}", cr.pos)
            expect_names.add(cr.name)
            self.check_collection_rule(cr, field_names, rule_names)

    def check_field(self, f: FieldSpec, obj: DataObjectClass, types: dict):
        self.check_field_type(f.ftype, f.pos)
        if f.severity not in SEVERITIES:
            self.error(f"invalid severity {f.severity!r}", f.pos)
        if f.placeholder_tokens is not None:
            if not f.placeholder_tokens:
                self.error(f"field {f.name!r}: empty placeholder token set", f.pos)
            for tok in f.placeholder_tokens:
                if not isinstance(tok, str) or tok.strip() == "":
                    self.error(f"field {f.name!r}: blank placeholder token", f.pos)
        check_names: set[str] = set()
        for check in f.checks:
            if check.name in check_names:
                self.error(
                    f"field {f.name!r}: duplicate check name {check.name!r}", check.pos
                )
            check_names.add(check.name)
            self.check_expr(check.expr, types, expect_bool=True)
            if f.nullable and not _uses_present(check.expr):
                self.warn(
                    f"field {f.name!r} is nullable but check {check.name!r} never "
                    "uses present(); null cells skip the check implicitly",
                    check.pos,
                )

    def check_field_type(self, ftype: FieldType, pos: Pos | None):
        if ftype.kind not in ("text", "integer", "decimal", "date"):
            self.error(f"unknown field type {ftype.kind!r}", pos)
            return
        if ftype.kind == "date":
            if not ftype.date_format:
                self.error("date type requires a format string", pos)
                return
            try:
                DateFormat.parse(ftype.date_format)
            except PatternError as exc:
                self.error(str(exc), pos)
        elif ftype.date_format is not None:
            self.error(f"{ftype.kind} type does not take a date format", pos)

    def check_collection_rule(self, cr: CollectionRule, field_names, rule_names):
        if cr.metric not in METRICS:
            self.error(f"unknown metric {cr.metric!r}", cr.pos)
            return
        if cr.metric == "error_rate":
            if cr.target not in field_names and cr.target not in rule_names:
                self.error(
                    f"expectation {cr.name!r} targets unknown field or rule "
                    f"{cr.target!r}",
                    cr.pos,
                )
        else:
            if cr.target not in field_names:
                self.error(
                    f"expectation {cr.name!r} targets unknown field {cr.target!r}",
                    cr.pos,
                )
        if cr.metric in ("error_rate", "null_rate"):
            if not cr.threshold_is_percent:
                self.error(
                    f"expectation {cr.name!r}: {cr.metric} threshold must be a "
                    "percentage (append %)",
                    cr.pos,
                )
            elif not Decimal(0) <= Decimal(cr.threshold) <= Decimal(100):
                self.error(
                    f"expectation {cr.name!r}: threshold {cr.threshold}% outside "
                    "[0, 100]",
                    cr.pos,
                )
        else:  # frequency_min
            if cr.threshold_is_percent:
                self.error(
                    f"expectation {cr.name!r}: frequency_min threshold is a count, "
                    "not a percentage",
                    cr.pos,
                )
            elif not isinstance(cr.threshold, int) or cr.threshold < 0:
                self.error(
                    f"expectation {cr.name!r}: frequency_min threshold must be a "
                    "non-negative integer",
                    cr.pos,
                )
            if cr.comparator not in (">=", ">"):
                self.warn(
                    f"expectation {cr.name!r}: frequency_min with {cr.comparator!r} "
                    "does not flag rare-value anomalies",
                    cr.pos,
                )

    # -- expression checking -------------------------------------------------

    def check_expr(self, expr: Expr, types: dict, expect_bool: bool) -> set[str]:
        """Type-check an expression; returns referenced field names."""
        refs: set[str] = set()
        kind = self.infer(expr, types, refs)
        if expect_bool and kind not in ("bool", "invalid"):
            self.error("expression is not boolean-valued", getattr(expr, "pos", None))
        return refs

    def infer(self, expr: Expr, types: dict, refs: set[str]) -> str:
        """Kinds: bool, text, number, date, set, invalid."""
        if isinstance(expr, FieldRef):
            refs.add(expr.name)
            ftype = types.get(expr.name)
            if ftype is None:
                self.error(f"unknown field {expr.name!r}", expr.pos)
                return "invalid"
            return {"text": "text", "integer": "number", "decimal": "number", "date": "date"}[
                ftype.kind
            ]
        if isinstance(expr, Literal):
            return "text" if isinstance(expr.value, str) else "number"
        if isinstance(expr, SetLiteral):
            seen = set()
            for m in expr.members:
                if m in seen:
                    self.warn(f"duplicate value {m!r} in set", expr.pos)
                seen.add(m)
            return "set"
        if isinstance(expr, Not):
            inner = self.infer(expr.operand, types, refs)
            if inner not in ("bool", "invalid"):
                self.error("'not' requires a boolean operand", expr.pos)
            return "bool"
        if isinstance(expr, BinaryLogic):
            for side in (expr.left, expr.right):
                kind = self.infer(side, types, refs)
                if kind not in ("bool", "invalid"):
                    self.error(f"'{expr.op}' requires boolean operands", expr.pos)
            return "bool"
        if isinstance(expr, Comparison):
            lk = self.infer(expr.left, types, refs)
            rk = self.infer(expr.right, types, refs)
            if "invalid" in (lk, rk):
                return "bool"
            if "set" in (lk, rk):
                self.error("set literals may only appear in in_set(...)", expr.pos)
                return "bool"
            if lk == "bool" or rk == "bool":
                if lk != rk:
                    self.error("cannot compare a condition to a value", expr.pos)
                elif expr.op not in ("==", "!="):
                    self.error("conditions only compare with == or !=", expr.pos)
            elif lk != rk:
                self.error(f"cannot compare {lk} to {rk}", expr.pos)
            if isinstance(expr.left, Literal) and isinstance(expr.right, Literal):
                self.warn("comparison of two constants", expr.pos)
            return "bool"
        if isinstance(expr, Call):
            self.check_call(expr, types, refs)
            return "bool"
        self.error(f"unsupported expression node {type(expr).__name__}", None)
        return "invalid"

    def check_call(self, call: Call, types: dict, refs: set[str]):
        sig = PREDICATE_SIGNATURES.get(call.func)
        if sig is None:
            self.error(f"unknown predicate {call.func!r}", call.pos)
            return
        if call.modifiers:
            if call.func != "matches":
                self.error(f"{call.func} does not accept 'nocase'", call.pos)
            elif call.modifiers != ("nocase",):
                self.error("only a single 'nocase' modifier is allowed", call.pos)
        if len(call.args) != len(sig):
            self.error(
                f"{call.func} expects {len(sig)} argument(s), got {len(call.args)}",
                call.pos,
            )
            return
        field_type: FieldType | None = None
        for arg, kind in zip(call.args, sig):
            if kind == "field":
                if not isinstance(arg, FieldRef):
                    self.error(
                        f"{call.func}: first argument must be a field name", call.pos
                    )
                    continue
                refs.add(arg.name)
                field_type = types.get(arg.name)
                if field_type is None:
                    self.error(f"unknown field {arg.name!r}", arg.pos)
            elif kind == "str":
                if not (isinstance(arg, Literal) and isinstance(arg.value, str)):
                    self.error(f"{call.func}: expected a string argument", call.pos)
                elif call.func == "matches":
                    try:
                        LikePattern.compile(arg.value)
                    except PatternError as exc:
                        self.error(str(exc), arg.pos)
            elif kind == "int":
                if not (isinstance(arg, Literal) and isinstance(arg.value, int)):
                    self.error(f"{call.func}: expected an integer argument", call.pos)
            elif kind == "set":
                if not isinstance(arg, SetLiteral):
                    self.error(f"{call.func}: expected a {{...}} set of strings", call.pos)
                else:
                    self.infer(arg, types, refs)  # duplicate-member warning
            elif kind == "fmt":
                if not (isinstance(arg, Literal) and isinstance(arg.value, str)):
                    self.error(f"{call.func}: expected a date format string", call.pos)
                else:
                    try:
                        DateFormat.parse(arg.value)
                    except PatternError as exc:
                        self.error(str(exc), arg.pos)
        if call.func == "digits":
            n = call.args[1]
            if isinstance(n, Literal) and isinstance(n.value, int) and n.value <= 0:
                self.error("digits: length must be positive", call.pos)
        if call.func == "length":
            n = call.args[1]
            if isinstance(n, Literal) and isinstance(n.value, int) and n.value < 0:
                self.error("length: value must be non-negative", call.pos)
        if call.func == "year_between":
            lo, hi = call.args[1], call.args[2]
            if (
                isinstance(lo, Literal)
                and isinstance(hi, Literal)
                and isinstance(lo.value, int)
                and isinstance(hi.value, int)
                and lo.value > hi.value
            ):
                self.error("year_between: lower bound exceeds upper bound", call.pos)
            if field_type is not None and field_type.kind != "date":
                self.error(
                    "year_between requires a date-typed field", call.pos
                )


def _uses_present(expr: Expr) -> bool:
    return any(isinstance(n, Call) and n.func == "present" for n in walk_expr(expr))


def require_valid(spec: QualitySpec) -> None:
    """Raise SpecSemanticError on the first error-level diagnostic."""
    for diag in check_spec_semantics(spec):
        if diag.severity == "error":
            raise SpecSemanticError(diag.message, diag.line, diag.col)
