"""AST model for the ``.dq`` quality-specification language.

A quality spec is organised in three layers: data-object classes (what is
being checked), per-field requirements (type, nullability, named checks),
and rules over whole records plus expectations over the whole collection.
All nodes are immutable dataclasses; source positions are carried for
diagnostics but excluded from structural equality so that round-tripping
through the canonical serialisation compares equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from decimal import Decimal

SEVERITIES = ("error", "warning", "anomaly")
FIELD_TYPE_KINDS = ("text", "integer", "decimal", "date")
METRICS = ("error_rate", "null_rate", "frequency_min")
COMPARATORS = ("==", "!=", "<", "<=", ">", ">=")
LOGIC_OPS = ("and", "or", "implies")

# Tokens treated as "value absent" markers unless a field overrides them.
DEFAULT_PLACEHOLDER_TOKENS = ("-", "nav")

# Predicate name -> (arity including the field argument, argument kinds).
# Kinds: "field", "str", "int", "set", "fmt" (date-format string).
PREDICATE_SIGNATURES = {
    "present": ("field",),
    "matches": ("field", "str"),
    "digits": ("field", "int"),
    "length": ("field", "int"),
    "starts_with": ("field", "str"),
    "in_set": ("field", "set"),
    "date_valid": ("field", "fmt"),
    "year_between": ("field", "int", "int"),
    "is_integer": ("field",),
    "is_decimal": ("field",),
}


@dataclass(frozen=True, slots=True)
class Pos:
    """1-based line/column of a construct in the source text."""

    line: int
    col: int


def _pos():
    return dc_field(default=None, compare=False, repr=False)


# --------------------------------------------------------------------------
# Expressions

@dataclass(frozen=True, slots=True)
class FieldRef:
    name: str
    pos: Pos | None = _pos()


@dataclass(frozen=True, slots=True)
class Literal:
    value: str | int | Decimal
    pos: Pos | None = _pos()


@dataclass(frozen=True, slots=True)
class SetLiteral:
    """Set of string members, kept in written order (duplicates preserved
    so the semantic checker can warn about them)."""

    members: tuple[str, ...]
    pos: Pos | None = _pos()


@dataclass(frozen=True, slots=True)
class Call:
    """Predicate call; the first argument is always a FieldRef after the
    parser has injected the owning field for abbreviated in-field checks."""

    func: str
    args: tuple["Expr", ...]
    modifiers: tuple[str, ...] = ()
    pos: Pos | None = _pos()


@dataclass(frozen=True, slots=True)
class Not:
    operand: "Expr"
    pos: Pos | None = _pos()


@dataclass(frozen=True, slots=True)
class BinaryLogic:
    op: str  # and | or | implies
    left: "Expr"
    right: "Expr"
    pos: Pos | None = _pos()


@dataclass(frozen=True, slots=True)
class Comparison:
    op: str  # == != < <= > >=
    left: "Expr"
    right: "Expr"
    pos: Pos | None = _pos()


Expr = FieldRef | Literal | SetLiteral | Call | Not | BinaryLogic | Comparison


# --------------------------------------------------------------------------
# Declarations

@dataclass(frozen=True, slots=True)
class FieldType:
    kind: str  # text | integer | decimal | date
    date_format: str | None = None  # set iff kind == "date"


@dataclass(frozen=True, slots=True)
class NamedCheck:
    name: str
    expr: Expr
    pos: Pos | None = _pos()


@dataclass(frozen=True, slots=True)
class FieldSpec:
    name: str
    ftype: FieldType
    nullable: bool
    checks: tuple[NamedCheck, ...] = ()
    placeholder_tokens: tuple[str, ...] | None = None
    severity: str = "error"
    pos: Pos | None = _pos()


@dataclass(frozen=True, slots=True)
class RecordRule:
    name: str
    expr: Expr
    severity: str = "error"
    pos: Pos | None = _pos()


@dataclass(frozen=True, slots=True)
class CollectionRule:
    """Expectation over the whole collection, e.g. an error rate that must
    not exceed a percentage, or a minimum value frequency."""

    name: str
    metric: str  # error_rate | null_rate | frequency_min
    target: str  # field name (any metric) or record-rule name (error_rate)
    comparator: str
    threshold: int | Decimal
    threshold_is_percent: bool
    pos: Pos | None = _pos()


@dataclass(frozen=True, slots=True)
class DataObjectClass:
    name: str
    fields: tuple[FieldSpec, ...]
    record_rules: tuple[RecordRule, ...] = ()
    collection_rules: tuple[CollectionRule, ...] = ()
    source_hint: str | None = None
    pos: Pos | None = _pos()

    def field_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.fields)

    def get_field(self, name: str) -> FieldSpec | None:
        for f in self.fields:
            if f.name == name:
                return f
        return None


@dataclass(frozen=True, slots=True)
class QualitySpec:
    version: int
    objects: tuple[DataObjectClass, ...]

    def get_object(self, name: str) -> DataObjectClass | None:
        for obj in self.objects:
            if obj.name == name:
                return obj
        return None


def walk_expr(expr: Expr):
    """Yield every node of an expression tree, preorder."""
    yield expr
    if isinstance(expr, Not):
        yield from walk_expr(expr.operand)
    elif isinstance(expr, (BinaryLogic, Comparison)):
        yield from walk_expr(expr.left)
        yield from walk_expr(expr.right)
    elif isinstance(expr, Call):
        for arg in expr.args:
            yield from walk_expr(arg)


def expr_field_names(expr: Expr) -> set[str]:
    """Names of all fields referenced anywhere in the expression."""
    return {n.name for n in walk_expr(expr) if isinstance(n, FieldRef)}
