"""Primitive value predicates used by check expressions.

Covers the six check families: presence, type relevance, value format
(digit/length), pattern conformity (SQL-LIKE wildcards), enumerable
values, and value validity (calendar dates, year ranges), plus detection
of placeholder tokens that stand in for missing data.

All predicates are pure; compiled patterns and date formats are immutable
and safe to share between threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import date as _date

_WILDCARD_ANY = 0  # % : any sequence, including empty
_WILDCARD_ONE = 1  # _ : exactly one character


class PatternError(ValueError):
    """Raised for malformed LIKE patterns or date format strings."""


class DateCheck(enum.Enum):
    VALID = "valid"
    WRONG_FORMAT = "wrong_format"
    INVALID_DATE = "invalid_date"


# --------------------------------------------------------------------------
# LIKE patterns

@dataclass(frozen=True)
class LikePattern:
    """Anchored wildcard pattern: ``%`` matches any sequence, ``_`` exactly
    one character; ``\\%``, ``\\_`` and ``\\\\`` match literally."""

    source: str
    atoms: tuple  # ints for wildcards, str for literal characters
    case_insensitive: bool = False

    @classmethod
    def compile(cls, source: str, case_insensitive: bool = False) -> "LikePattern":
        atoms: list = []
        i = 0
        while i < len(source):
            ch = source[i]
            if ch == "\\":
                if i + 1 >= len(source):
                    raise PatternError("pattern ends with a lone backslash")
                nxt = source[i + 1]
                if nxt not in ("%", "_", "\\"):
                    raise PatternError(
                        f"backslash may only escape %, _ or \\ (found {nxt!r})"
                    )
                atoms.append(nxt)
                i += 2
            elif ch == "%":
                atoms.append(_WILDCARD_ANY)
                i += 1
            elif ch == "_":
                atoms.append(_WILDCARD_ONE)
                i += 1
            else:
                atoms.append(ch)
                i += 1
        return cls(source=source, atoms=tuple(atoms), case_insensitive=case_insensitive)

    def decompile(self) -> str:
        out = []
        for atom in self.atoms:
            if atom == _WILDCARD_ANY:
                out.append("%")
            elif atom == _WILDCARD_ONE:
                out.append("_")
            elif atom in ("%", "_", "\\"):
                out.append("\\" + atom)
            else:
                out.append(atom)
        return "".join(out)


def match_like(value: str, pattern: LikePattern) -> bool:
    """Full-string match of value against the compiled pattern.

    Iterative two-pointer matcher with backtracking over the last ``%``;
    deliberately not implemented via the ``re`` module, which serves as the
    independent oracle in the test-suite.
    """
    atoms = pattern.atoms
    fold = pattern.case_insensitive
    n, m = len(value), len(atoms)
    s = p = 0
    star_p = -1
    star_s = 0
    while s < n:
        if p < m:
            atom = atoms[p]
            if atom == _WILDCARD_ONE:
                s += 1
                p += 1
                continue
            if atom != _WILDCARD_ANY:
                ch = value[s]
                if ch == atom or (fold and ch.casefold() == atom.casefold()):
                    s += 1
                    p += 1
                    continue
            else:
                star_p = p
                star_s = s
                p += 1
                continue
        if star_p >= 0:
            star_s += 1
            s = star_s
            p = star_p + 1
        else:
            return False
    while p < m and atoms[p] == _WILDCARD_ANY:
        p += 1
    return p == m


# --------------------------------------------------------------------------
# Date formats

_DATE_TOKENS = ("YYYY", "DD", "MM")
_SEPARATOR_CHARS = "./-: "


@dataclass(frozen=True)
class DateFormat:
    """Date layout built from DD, MM and YYYY tokens plus literal
    separators, e.g. ``DD.MM.YYYY`` or ``YYYY-MM-DD``."""

    source: str
    tokens: tuple[str, ...]

    @classmethod
    def parse(cls, source: str) -> "DateFormat":
        tokens: list[str] = []
        i = 0
        while i < len(source):
            for tok in _DATE_TOKENS:
                if source.startswith(tok, i):
                    tokens.append(tok)
                    i += len(tok)
                    break
            else:
                ch = source[i]
                if ch not in _SEPARATOR_CHARS:
                    raise PatternError(
                        f"invalid date format {source!r}: unexpected character {ch!r}"
                    )
                tokens.append(ch)
                i += 1
        for tok in _DATE_TOKENS:
            if tokens.count(tok) != 1:
                raise PatternError(
                    f"invalid date format {source!r}: must contain {tok} exactly once"
                )
        return cls(source=source, tokens=tuple(tokens))


def is_leap_year(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


_DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


def days_in_month(year: int, month: int) -> int:
    if month == 2 and is_leap_year(year):
        return 29
    return _DAYS_IN_MONTH[month - 1]


def check_date(value: str, fmt: DateFormat) -> DateCheck:
    """Structural match against the format, then calendar validity.

    Calendar validity is checked with an explicit days-in-month table and
    leap-year rule (proleptic Gregorian) rather than deferring to the
    datetime module, which the test-suite uses as the independent oracle.
    """
    parsed = parse_date(value, fmt)
    if isinstance(parsed, DateCheck):
        return parsed
    return DateCheck.VALID


def parse_date(value: str, fmt: DateFormat) -> "_date | DateCheck":
    """Return a date for a valid value, else the failing DateCheck status."""
    i = 0
    parts = {}
    for tok in fmt.tokens:
        if tok in _DATE_TOKENS:
            width = len(tok)
            chunk = value[i : i + width]
            if len(chunk) != width or not (chunk.isascii() and chunk.isdigit()):
                return DateCheck.WRONG_FORMAT
            parts[tok] = int(chunk)
            i += width
        else:
            if i >= len(value) or value[i] != tok:
                return DateCheck.WRONG_FORMAT
            i += 1
    if i != len(value):
        return DateCheck.WRONG_FORMAT
    year, month, day = parts["YYYY"], parts["MM"], parts["DD"]
    if year < 1 or not 1 <= month <= 12 or not 1 <= day <= days_in_month(year, month):
        return DateCheck.INVALID_DATE
    return _date(year, month, day)


# --------------------------------------------------------------------------
# Scalar predicates

def check_present(is_null: bool) -> bool:
    return not is_null


def check_digits(value: str, n: int) -> bool:
    """Exactly n ASCII decimal digits (leading zeros count)."""
    return len(value) == n and value.isascii() and value.isdigit()


def check_length(value: str, n: int) -> bool:
    return len(value) == n


def check_starts_with(value: str, prefix: str) -> bool:
    return value.startswith(prefix)


def check_in_set(value: str, allowed) -> bool:
    return value in allowed


def check_year_between(value: _date, lo: int, hi: int) -> bool:
    return lo <= value.year <= hi


def check_placeholder(value: str, tokens) -> bool:
    """Whole-value, case-insensitive match against placeholder tokens."""
    folded = value.strip().casefold()
    return any(folded == t.casefold() for t in tokens)


def is_integer_text(value: str) -> bool:
    """Optional leading minus followed by ASCII digits only."""
    body = value[1:] if value.startswith("-") else value
    return bool(body) and body.isascii() and body.isdigit()


def is_decimal_text(value: str) -> bool:
    """Like an integer but permitting a single dot; at least one digit."""
    body = value[1:] if value.startswith("-") else value
    if not body:
        return False
    head, dot, tail = body.partition(".")
    digits = head + tail
    if not digits or not (digits.isascii() and digits.isdigit()):
        return False
    return "." not in tail
