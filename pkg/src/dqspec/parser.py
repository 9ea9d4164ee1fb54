"""Lexer and parser for the textual ``.dq`` specification language.

Grammar (informally)::

    spec         ::= version_decl? object_decl+
    version_decl ::= "version" INT ";"
    object_decl  ::= "object" IDENT ("from" STRING)? "{" member* "}"
    member       ::= field_decl | rule_decl | expect_decl
    field_decl   ::= "field" IDENT ":" type nullability? (";" | "{" field_stmt* "}")
    type         ::= "text" | "integer" | "decimal" | "date" "(" STRING ")"
    nullability  ::= "not_null" | "nullable"
    field_stmt   ::= "check" IDENT ":" expr ";"
                   | "placeholders" set_lit? ";"
                   | "severity" SEVERITY ";"
                   | expr ";"                      -- auto-named check
    rule_decl    ::= "rule" IDENT SEVERITY? ":" expr ";"
    expect_decl  ::= "expect" (IDENT ":")? METRIC "(" IDENT ")" CMP threshold ";"
    threshold    ::= NUMBER "%"?
    expr         ::= or_expr ("implies" expr)?     -- right-associative
    or_expr      ::= and_expr ("or" and_expr)*
    and_expr     ::= unary ("and" unary)*
    unary        ::= "not" unary | comparison
    comparison   ::= primary (CMP primary)?
    primary      ::= IDENT "(" args ")" | IDENT | STRING | NUMBER
                   | set_lit | "(" expr ")"
    set_lit      ::= "{" STRING ("," STRING)* "}"

Comments run from ``#`` to end of line. Strings are double-quoted with
backslash escapes. Inside a field body a predicate call may omit its field
argument, which the parser injects (``digits(4)`` becomes
``digits(this_field, 4)``). The final semicolon before a closing brace may
be omitted.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from decimal import Decimal

from .checks import DateFormat, PatternError
from .errors import SpecSyntaxError, SpecSemanticError
from .model import (
    BinaryLogic,
    Call,
    CollectionRule,
    Comparison,
    DataObjectClass,
    DEFAULT_PLACEHOLDER_TOKENS,
    Expr,
    FieldRef,
    FieldSpec,
    FieldType,
    Literal,
    METRICS,
    NamedCheck,
    Not,
    Pos,
    PREDICATE_SIGNATURES,
    QualitySpec,
    RecordRule,
    SetLiteral,
    SEVERITIES,
)

RESERVED = frozenset(
    {
        "version", "object", "from", "field", "rule", "expect", "check",
        "placeholders", "severity", "not_null", "nullable",
        "and", "or", "not", "implies", "nocase",
    }
)

_CMP_OPS = ("==", "!=", "<=", ">=", "<", ">")
_PUNCT = "{}():;,%"


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | string | op | eof
    value: object
    line: int
    col: int


class Lexer:
    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.line = 1
        self.col = 1

    def error(self, msg: str) -> SpecSyntaxError:
        return SpecSyntaxError(msg, self.line, self.col)

    def _advance(self, n: int = 1):
        for _ in range(n):
            if self.i < len(self.text) and self.text[self.i] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.i += 1

    def tokens(self) -> list[Token]:
        out = []
        text = self.text
        while self.i < len(text):
            ch = text[self.i]
            if ch in " \t\r\n":
                self._advance()
                continue
            if ch == "#":
                while self.i < len(text) and text[self.i] != "\n":
                    self._advance()
                continue
            line, col = self.line, self.col
            two = text[self.i : self.i + 2]
            if two in ("==", "!=", "<=", ">="):
                out.append(Token("op", two, line, col))
                self._advance(2)
                continue
            if ch in "<>":
                out.append(Token("op", ch, line, col))
                self._advance()
                continue
            if ch in _PUNCT:
                out.append(Token("op", ch, line, col))
                self._advance()
                continue
            if ch == '"':
                out.append(Token("string", self._string(), line, col))
                continue
            if ch.isdigit() or (
                ch == "-" and self.i + 1 < len(text) and text[self.i + 1].isdigit()
            ):
                out.append(Token("number", self._number(), line, col))
                continue
            if ch.isalpha() or ch == "_":
                start = self.i
                while self.i < len(text) and (text[self.i].isalnum() or text[self.i] == "_"):
                    self._advance()
                out.append(Token("ident", text[start : self.i], line, col))
                continue
            raise self.error(f"unexpected character {ch!r}")
        out.append(Token("eof", None, self.line, self.col))
        return out

    def _string(self) -> str:
        text = self.text
        self._advance()  # opening quote
        chunks = []
        while True:
            if self.i >= len(text):
                raise self.error("unterminated string literal")
            ch = text[self.i]
            if ch == "\n":
                raise self.error("unterminated string literal")
            if ch == '"':
                self._advance()
                return "".join(chunks)
            if ch == "\\":
                if self.i + 1 >= len(text):
                    raise self.error("unterminated string escape")
                esc = text[self.i + 1]
                mapped = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}.get(esc)
                if mapped is None:
                    raise self.error(f"unknown string escape \\{esc}")
                chunks.append(mapped)
                self._advance(2)
            else:
                chunks.append(ch)
                self._advance()

    def _number(self):
        text = self.text
        start = self.i
        if text[self.i] == "-":
            self._advance()
        while self.i < len(text) and text[self.i].isdigit():
            self._advance()
        if self.i < len(text) and text[self.i] == ".":
            self._advance()
            if self.i >= len(text) or not text[self.i].isdigit():
                raise self.error("digits required after decimal point")
            while self.i < len(text) and text[self.i].isdigit():
                self._advance()
            return Decimal(text[start : self.i])
        return int(text[start : self.i])


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def at_op(self, value: str) -> bool:
        return self.tok.kind == "op" and self.tok.value == value

    def at_keyword(self, word: str) -> bool:
        return self.tok.kind == "ident" and self.tok.value == word

    def expect_op(self, value: str) -> Token:
        if not self.at_op(value):
            raise self.syntax(f"expected {value!r}")
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            raise self.syntax(f"expected keyword {word!r}")
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> Token:
        t = self.tok
        if t.kind != "ident":
            raise self.syntax(f"expected {what}")
        if t.value in RESERVED:
            raise self.syntax(f"keyword {t.value!r} cannot be used as {what}")
        return self.advance()

    def expect_statement_end(self):
        """Semicolon terminator; omissible immediately before '}'."""
        if self.at_op(";"):
            self.advance()
        elif not self.at_op("}"):
            raise self.syntax("expected ';'")

    def syntax(self, msg: str) -> SpecSyntaxError:
        t = self.tok
        shown = "end of input" if t.kind == "eof" else repr(t.value)
        return SpecSyntaxError(f"{msg} (found {shown})", t.line, t.col)

    def semantic(self, msg: str, tok: Token) -> SpecSemanticError:
        return SpecSemanticError(msg, tok.line, tok.col)

    # -- grammar -----------------------------------------------------------

    def parse_spec(self) -> QualitySpec:
        version = 1
        if self.at_keyword("version"):
            self.advance()
            t = self.tok
            if t.kind != "number" or not isinstance(t.value, int):
                raise self.syntax("expected integer version")
            version = t.value
            self.advance()
            self.expect_op(";")
        objects = []
        while not self.tok.kind == "eof":
            objects.append(self.parse_object())
        if not objects:
            raise self.syntax("expected at least one object declaration")
        return QualitySpec(version=version, objects=tuple(objects))

    def parse_object(self) -> DataObjectClass:
        start = self.expect_keyword("object")
        name = self.expect_ident("object name")
        source_hint = None
        if self.at_keyword("from"):
            self.advance()
            t = self.tok
            if t.kind != "string":
                raise self.syntax("expected source file string after 'from'")
            source_hint = t.value
            self.advance()
        self.expect_op("{")
        fields: list[FieldSpec] = []
        rules: list[RecordRule] = []
        expects: list[CollectionRule] = []
        taken_expect_names: set[str] = set()
        while not self.at_op("}"):
            if self.at_keyword("field"):
                fields.append(self.parse_field())
            elif self.at_keyword("rule"):
                rules.append(self.parse_rule())
            elif self.at_keyword("expect"):
                expects.append(self.parse_expect(taken_expect_names))
            else:
                raise self.syntax("expected 'field', 'rule', 'expect' or '}'")
        self.expect_op("}")
        return DataObjectClass(
            name=name.value,
            fields=tuple(fields),
            record_rules=tuple(rules),
            collection_rules=tuple(expects),
            source_hint=source_hint,
            pos=Pos(start.line, start.col),
        )

    def parse_field(self) -> FieldSpec:
        start = self.expect_keyword("field")
        name_tok = self.expect_ident("field name")
        self.expect_op(":")
        ftype = self.parse_type()
        nullable = True
        if self.at_keyword("not_null"):
            nullable = False
            self.advance()
        elif self.at_keyword("nullable"):
            self.advance()
        checks: list[NamedCheck] = []
        placeholders: tuple[str, ...] | None = None
        severity = "error"
        if self.at_op("{"):
            self.advance()
            taken: set[str] = set()
            while not self.at_op("}"):
                if self.at_keyword("check"):
                    pos_tok = self.advance()
                    cname = self.expect_ident("check name")
                    if cname.value in taken:
                        raise self.semantic(
                            f"duplicate check name {cname.value!r}", cname
                        )
                    taken.add(cname.value)
                    self.expect_op(":")
                    expr = self.parse_expr()
                    self.expect_statement_end()
                    checks.append(
                        NamedCheck(
                            name=cname.value,
                            expr=_inject_field(expr, name_tok.value),
                            pos=Pos(pos_tok.line, pos_tok.col),
                        )
                    )
                elif self.at_keyword("placeholders"):
                    self.advance()
                    if self.at_op("{"):
                        placeholders = tuple(self.parse_set_literal().members)
                    else:
                        placeholders = DEFAULT_PLACEHOLDER_TOKENS
                    self.expect_statement_end()
                elif self.at_keyword("severity"):
                    self.advance()
                    t = self.tok
                    if t.kind != "ident" or t.value not in SEVERITIES:
                        raise self.syntax("expected severity (error, warning, anomaly)")
                    severity = t.value
                    self.advance()
                    self.expect_statement_end()
                else:
                    pos_tok = self.tok
                    expr = self.parse_expr()
                    self.expect_statement_end()
                    expr = _inject_field(expr, name_tok.value)
                    auto = expr.func if isinstance(expr, Call) else "check"
                    cname_value = auto
                    n = 2
                    while cname_value in taken:
                        cname_value = f"{auto}_{n}"
                        n += 1
                    taken.add(cname_value)
                    checks.append(
                        NamedCheck(
                            name=cname_value,
                            expr=expr,
                            pos=Pos(pos_tok.line, pos_tok.col),
                        )
                    )
            self.expect_op("}")
        else:
            self.expect_op(";")
        return FieldSpec(
            name=name_tok.value,
            ftype=ftype,
            nullable=nullable,
            checks=tuple(checks),
            placeholder_tokens=placeholders,
            severity=severity,
            pos=Pos(start.line, start.col),
        )

    def parse_type(self) -> FieldType:
        t = self.tok
        if t.kind != "ident":
            raise self.syntax("expected field type")
        if t.value in ("text", "integer", "decimal"):
            self.advance()
            return FieldType(kind=t.value)
        if t.value == "date":
            self.advance()
            self.expect_op("(")
            fmt_tok = self.tok
            if fmt_tok.kind != "string":
                raise self.syntax("expected date format string")
            self.advance()
            self.expect_op(")")
            try:
                DateFormat.parse(fmt_tok.value)
            except PatternError as exc:
                raise self.semantic(str(exc), fmt_tok) from exc
            return FieldType(kind="date", date_format=fmt_tok.value)
        raise self.syntax("expected field type (text, integer, decimal, date)")

    def parse_rule(self) -> RecordRule:
        start = self.expect_keyword("rule")
        name = self.expect_ident("rule name")
        severity = "error"
        if self.tok.kind == "ident" and self.tok.value in SEVERITIES:
            severity = self.advance().value
        self.expect_op(":")
        expr = self.parse_expr()
        self.expect_statement_end()
        return RecordRule(
            name=name.value,
            expr=expr,
            severity=severity,
            pos=Pos(start.line, start.col),
        )

    def parse_expect(self, taken: set[str]) -> CollectionRule:
        start = self.expect_keyword("expect")
        first = self.expect_ident("metric or expectation name")
        if self.at_op(":"):
            self.advance()
            name = first.value
            metric_tok = self.expect_ident("metric")
        else:
            name = None
            metric_tok = first
        metric = metric_tok.value
        if metric not in METRICS:
            raise self.semantic(
                f"unknown metric {metric!r} (expected one of {', '.join(METRICS)})",
                metric_tok,
            )
        self.expect_op("(")
        target = self.expect_ident("target field or rule name")
        self.expect_op(")")
        t = self.tok
        if t.kind != "op" or t.value not in _CMP_OPS:
            raise self.syntax("expected comparator")
        comparator = self.advance().value
        num_tok = self.tok
        if num_tok.kind != "number":
            raise self.syntax("expected threshold number")
        self.advance()
        is_percent = False
        if self.at_op("%"):
            is_percent = True
            self.advance()
        self.expect_statement_end()
        if name is None:
            base = f"{metric}_{target.value}"
            name = base
            n = 2
            while name in taken:
                name = f"{base}_{n}"
                n += 1
        elif name in taken:
            raise self.semantic(f"duplicate expectation name {name!r}", first)
        taken.add(name)
        return CollectionRule(
            name=name,
            metric=metric,
            target=target.value,
            comparator=comparator,
            threshold=num_tok.value,
            threshold_is_percent=is_percent,
            pos=Pos(start.line, start.col),
        )

    # -- expressions ---------------------------------------------------------

    def parse_expr(self) -> Expr:
        left = self.parse_or()
        if self.at_keyword("implies"):
            t = self.advance()
            right = self.parse_expr()  # right-associative
            return BinaryLogic(op="implies", left=left, right=right, pos=Pos(t.line, t.col))
        return left

    def parse_or(self) -> Expr:
        left = self.parse_and()
        while self.at_keyword("or"):
            t = self.advance()
            right = self.parse_and()
            left = BinaryLogic(op="or", left=left, right=right, pos=Pos(t.line, t.col))
        return left

    def parse_and(self) -> Expr:
        left = self.parse_unary()
        while self.at_keyword("and"):
            t = self.advance()
            right = self.parse_unary()
            left = BinaryLogic(op="and", left=left, right=right, pos=Pos(t.line, t.col))
        return left

    def parse_unary(self) -> Expr:
        if self.at_keyword("not"):
            t = self.advance()
            return Not(operand=self.parse_unary(), pos=Pos(t.line, t.col))
        return self.parse_comparison()

    def parse_comparison(self) -> Expr:
        left = self.parse_primary()
        if self.tok.kind == "op" and self.tok.value in _CMP_OPS:
            t = self.advance()
            right = self.parse_primary()
            if self.tok.kind == "op" and self.tok.value in _CMP_OPS:
                raise self.syntax("chained comparisons are not supported")
            return Comparison(op=t.value, left=left, right=right, pos=Pos(t.line, t.col))
        return left

    def parse_primary(self) -> Expr:
        t = self.tok
        if t.kind == "op" and t.value == "(":
            self.advance()
            expr = self.parse_expr()
            self.expect_op(")")
            return expr
        if t.kind == "op" and t.value == "{":
            return self.parse_set_literal()
        if t.kind == "string":
            self.advance()
            return Literal(value=t.value, pos=Pos(t.line, t.col))
        if t.kind == "number":
            self.advance()
            return Literal(value=t.value, pos=Pos(t.line, t.col))
        if t.kind == "ident":
            if t.value in RESERVED:
                raise self.syntax(f"keyword {t.value!r} cannot start an expression")
            self.advance()
            if self.at_op("("):
                return self.parse_call(t)
            return FieldRef(name=t.value, pos=Pos(t.line, t.col))
        raise self.syntax("expected expression")

    def parse_call(self, func_tok: Token) -> Call:
        self.expect_op("(")
        args: list[Expr] = []
        modifiers: list[str] = []
        if not self.at_op(")"):
            while True:
                if self.at_keyword("nocase"):
                    self.advance()
                    modifiers.append("nocase")
                else:
                    args.append(self.parse_expr())
                if self.at_op(","):
                    self.advance()
                    continue
                break
        self.expect_op(")")
        return Call(
            func=func_tok.value,
            args=tuple(args),
            modifiers=tuple(modifiers),
            pos=Pos(func_tok.line, func_tok.col),
        )


def _inject_field(expr: Expr, field_name: str) -> Expr:
    """Insert the owning field as the first argument of abbreviated
    predicate calls inside a field body."""
    if isinstance(expr, Call):
        args = tuple(_inject_field(a, field_name) for a in expr.args)
        sig = PREDICATE_SIGNATURES.get(expr.func)
        if sig is not None and len(args) == len(sig) - 1:
            args = (FieldRef(name=field_name, pos=expr.pos),) + args
        return replace(expr, args=args)
    if isinstance(expr, Not):
        return replace(expr, operand=_inject_field(expr.operand, field_name))
    if isinstance(expr, (BinaryLogic, Comparison)):
        return replace(
            expr,
            left=_inject_field(expr.left, field_name),
            right=_inject_field(expr.right, field_name),
        )
    return expr


def parse_spec(source_text: str) -> QualitySpec:
    """Parse and semantically validate a ``.dq`` specification.

    Raises SpecSyntaxError or SpecSemanticError, each carrying the 1-based
    line and column of the offending construct.
    """
    from .semantics import check_spec_semantics

    tokens = Lexer(source_text).tokens()
    spec = Parser(tokens).parse_spec()
    for diag in check_spec_semantics(spec):
        if diag.severity == "error":
            raise SpecSemanticError(diag.message, diag.line, diag.col)
    return spec
