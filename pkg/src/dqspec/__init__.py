"""dqspec: declarative data-quality specs and a validation engine for
delimited open-data files."""

from .checks import (
    DateCheck,
    DateFormat,
    LikePattern,
    check_date,
    check_digits,
    check_in_set,
    check_placeholder,
    check_starts_with,
    check_year_between,
    match_like,
)
from .dataset import CellValue, Dataset, DatasetError, Record, coerce_cell, read_csv, to_csv
from .engine import (
    BindingError,
    CollectionOutcome,
    ErrorProtocol,
    EvaluationResult,
    FieldReport,
    ObjectEvaluator,
    Violation,
    affected_columns,
    error_rate,
    evaluate_dataset,
    evaluate_record,
    format_rate,
    frequency_anomalies,
    protocol_to_csv,
    protocol_to_jsonl,
)
from .errors import SpecError, SpecSemanticError, SpecSyntaxError
from .model import DataObjectClass, FieldSpec, QualitySpec, RecordRule
from .parser import parse_spec
from .profiler import (
    FieldProfile,
    generate_draft_spec,
    profile_dataset,
    profiles_to_json,
    suggest_enum,
    suggest_nullability,
)
from .report import SummaryReport, render_csv, render_json, render_markdown, summarize
from .semantics import Diagnostic, check_spec_semantics
from .serializer import serialize_spec

__version__ = "0.1.0"
