"""Data exploration: infer draft types, nullability, enumerations and
anomaly candidates from raw data, and emit a draft spec for human review.

Every suggestion the draft spec makes is annotated with the evidence it was
derived from (null rates, distinct counts, value support); the output is
an interpretation of the observed data, not ground truth.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, replace
from decimal import Decimal, ROUND_HALF_UP

from .checks import DateCheck, DateFormat, is_decimal_text, is_integer_text, parse_date
from .dataset import Dataset
from .model import DEFAULT_PLACEHOLDER_TOKENS, FieldType
from .serializer import quote_string

DEFAULT_DATE_FORMATS = ("DD.MM.YYYY", "MM/DD/YYYY", "YYYY-MM-DD")

# Full value-count maps are retained on a profile only up to this many
# distinct values; beyond it only top_values survive.
COUNTS_CAP = 64


@dataclass(frozen=True)
class EnumSuggestion:
    members: frozenset[str]
    rare_values: tuple[tuple[str, int], ...]  # below min_support, (value, count)


@dataclass(frozen=True)
class FieldProfile:
    field_name: str
    records_total: int
    non_null_count: int
    null_count: int
    null_rate_pct: float
    inferred_type: FieldType
    distinct_count: int
    top_values: tuple[tuple[str, int], ...]
    placeholder_hits: int
    value_counts: dict[str, int] | None = None
    enum_candidate: EnumSuggestion | None = None


def profile_dataset(
    dataset: Dataset,
    date_formats: tuple[str, ...] = DEFAULT_DATE_FORMATS,
    placeholder_tokens: tuple[str, ...] = DEFAULT_PLACEHOLDER_TOKENS,
    top_n: int = 10,
) -> list[FieldProfile]:
    """One profile per column; type inference tries integer, then decimal,
    then each configured date format, else text. Distinct counts are exact."""
    formats = [DateFormat.parse(f) for f in date_formats]
    folded_tokens = tuple(t.casefold() for t in placeholder_tokens)
    profiles = []
    total = dataset.record_count
    for col, name in enumerate(dataset.header):
        counter: Counter[str] = Counter()
        nulls = 0
        all_int = all_dec = True
        date_ok = [True] * len(formats)
        placeholder_hits = 0
        for row in dataset.rows:
            s = row[col].strip()
            if not s:
                nulls += 1
                continue
            counter[s] += 1
            if s.casefold() in folded_tokens:
                placeholder_hits += 1
            if all_int and not is_integer_text(s):
                all_int = False
            if all_dec and not is_decimal_text(s):
                all_dec = False
            for k, fmt in enumerate(formats):
                if date_ok[k] and isinstance(parse_date(s, fmt), DateCheck):
                    date_ok[k] = False
        non_null = total - nulls
        if non_null == 0:
            inferred = FieldType(kind="text")
        elif all_int:
            inferred = FieldType(kind="integer")
        elif all_dec:
            inferred = FieldType(kind="decimal")
        else:
            inferred = FieldType(kind="text")
            for k, ok in enumerate(date_ok):
                if ok:
                    inferred = FieldType(kind="date", date_format=date_formats[k])
                    break
        top = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
        profile = FieldProfile(
            field_name=name,
            records_total=total,
            non_null_count=non_null,
            null_count=nulls,
            null_rate_pct=0.0 if total == 0 else nulls * 100.0 / total,
            inferred_type=inferred,
            distinct_count=len(counter),
            top_values=tuple(top),
            placeholder_hits=placeholder_hits,
            value_counts=dict(counter) if len(counter) <= COUNTS_CAP else None,
        )
        profile = _with_enum(profile)
        profiles.append(profile)
    return profiles


def _with_enum(profile: FieldProfile) -> FieldProfile:
    suggestion = suggest_enum(profile)
    if suggestion is None:
        return profile
    return replace(profile, enum_candidate=suggestion)


def suggest_nullability(profile: FieldProfile, threshold_pct: float = 3.0) -> str:
    """NOT NULL only when the observed null rate is strictly lower than the
    threshold; a column with no data at all stays nullable."""
    if profile.records_total == 0:
        return "nullable"
    return "not_null" if profile.null_rate_pct < threshold_pct else "nullable"


def suggest_enum(
    profile: FieldProfile, max_distinct: int = 12, min_support: int = 4
) -> EnumSuggestion | None:
    """Enumerable-value candidate: the distinct values of a low-cardinality
    column, with values seen fewer than min_support times set aside as
    anomaly candidates instead of enum members."""
    if profile.distinct_count == 0 or profile.distinct_count > max_distinct:
        return None
    counts = profile.value_counts
    if counts is None:
        return None
    members = frozenset(v for v, c in counts.items() if c >= min_support)
    rare = sorted(
        ((v, c) for v, c in counts.items() if c < min_support),
        key=lambda vc: (vc[1], vc[0]),
    )
    if not members:
        return None
    return EnumSuggestion(members=members, rare_values=tuple(rare))


def _fmt_pct(value: float) -> str:
    return str(Decimal(str(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def generate_draft_spec(
    profiles: list[FieldProfile],
    object_name: str,
    source_hint: str | None = None,
    nullability_threshold_pct: float = 3.0,
) -> str:
    """Emit a parseable draft ``.dq`` spec from column profiles."""
    lines = [
        "# Draft quality spec generated from a data profile.",
        "# Suggestions reflect observed data only; review before use.",
        "version 1;",
        "",
    ]
    source = f" from {quote_string(source_hint)}" if source_hint else ""
    lines.append(f"object {object_name}{source} {{")
    for p in profiles:
        nullability = suggest_nullability(p, nullability_threshold_pct)
        lines.append(
            f"  # nulls {p.null_count}/{p.records_total}"
            f" ({_fmt_pct(p.null_rate_pct)}%), distinct {p.distinct_count}"
        )
        if p.inferred_type.kind == "date":
            type_text = f"date({quote_string(p.inferred_type.date_format)})"
        else:
            type_text = p.inferred_type.kind
        body: list[str] = []
        if p.enum_candidate is not None:
            members = ", ".join(quote_string(m) for m in sorted(p.enum_candidate.members))
            support = min(
                c for v, c in p.value_counts.items()
                if v in p.enum_candidate.members
            )
            body.append(f"    # observed values with support >= {support}")
            if p.enum_candidate.rare_values:
                rare = ", ".join(
                    f"{v!r} x{c}" for v, c in p.enum_candidate.rare_values
                )
                body.append(f"    # rare values left out (check with supplier): {rare}")
            body.append(f"    check allowed_values: in_set({{{members}}});")
        if p.inferred_type.kind == "date":
            body.append(
                f"    check valid_date: date_valid({quote_string(p.inferred_type.date_format)});"
            )
        if p.placeholder_hits > 0:
            hit_tokens = _placeholder_tokens_present(p)
            toks = ", ".join(quote_string(t) for t in hit_tokens)
            body.append(f"    # {p.placeholder_hits} placeholder-like value(s) observed")
            body.append(f"    placeholders {{{toks}}};")
        head = f"  field {p.field_name}: {type_text} {nullability}"
        if body:
            lines.append(head + " {")
            lines.extend(body)
            lines.append("  }")
        else:
            lines.append(head + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _placeholder_tokens_present(profile: FieldProfile) -> list[str]:
    source = profile.value_counts or dict(profile.top_values)
    folded_defaults = {t.casefold(): t for t in DEFAULT_PLACEHOLDER_TOKENS}
    hits = {}
    for v in source:
        tok = folded_defaults.get(v.casefold())
        if tok is not None:
            hits[tok] = True
    return sorted(hits) or list(DEFAULT_PLACEHOLDER_TOKENS)


def profiles_payload(profiles: list[FieldProfile]) -> list[dict]:
    """JSON-ready profile summary; stable key order."""
    out = []
    for p in profiles:
        entry = {
            "field": p.field_name,
            "records_total": p.records_total,
            "non_null_count": p.non_null_count,
            "null_count": p.null_count,
            "null_rate_pct": p.null_rate_pct,
            "inferred_type": p.inferred_type.kind,
            "date_format": p.inferred_type.date_format,
            "distinct_count": p.distinct_count,
            "top_values": [[v, c] for v, c in p.top_values],
            "placeholder_hits": p.placeholder_hits,
            "suggested_nullability": suggest_nullability(p),
            "enum_candidate": (
                sorted(p.enum_candidate.members) if p.enum_candidate else None
            ),
            "rare_values": (
                [[v, c] for v, c in p.enum_candidate.rare_values]
                if p.enum_candidate
                else []
            ),
        }
        out.append(entry)
    return out


def profiles_to_json(profiles: list[FieldProfile]) -> str:
    return json.dumps(profiles_payload(profiles), ensure_ascii=False, indent=2) + "\n"
