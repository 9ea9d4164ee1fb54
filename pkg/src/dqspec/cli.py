"""Command-line entry point: validate data against specs, profile raw data
into draft specs, or lint spec files.

Exit codes: 0 clean, 1 quality violations (at or above --fail-on) or failed
collection expectations, 2 spec/usage errors, 3 I/O errors. Reports go to
--out-report or stdout; diagnostics always go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dataset import Dataset, DatasetError, read_csv
from .engine import (
    BindingError,
    evaluate_dataset,
    protocol_to_csv,
    protocol_to_jsonl,
)
from .errors import SpecError
from .model import DataObjectClass, QualitySpec
from .parser import parse_spec
from .profiler import generate_draft_spec, profile_dataset, profiles_payload
from .report import render_csv, render_json, render_markdown, summarize
from .semantics import check_spec_semantics

_SEVERITY_RANK = {"anomaly": 1, "warning": 2, "error": 3}


def _err(msg: str) -> None:
    print(f"dqspec: {msg}", file=sys.stderr)


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="dqspec", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    val = sub.add_parser("validate", help="evaluate data files against quality specs")
    val.add_argument("--spec", action="append", default=[], help="spec file (.dq); repeatable")
    val.add_argument("--data", action="append", default=[], help="data file (CSV); repeatable")
    val.add_argument(
        "--bind", action="append", default=[],
        help="OBJECT=PATH explicit binding of a spec object to a data file",
    )
    val.add_argument("--delimiter", default=",", help="field delimiter (default ,)")
    val.add_argument("--out-protocol", help="write the error protocol here (.jsonl or .csv)")
    val.add_argument("--out-report", help="write the summary report here (default stdout)")
    val.add_argument(
        "--format", choices=["markdown", "csv", "json"], default="markdown",
        help="summary report format",
    )
    val.add_argument("--workers", type=int, default=1, help="evaluation worker count")
    val.add_argument(
        "--anomaly-k", type=int, default=None,
        help="override the rare-value threshold for frequency expectations",
    )
    val.add_argument(
        "--fail-on", choices=["error", "warning", "anomaly", "never"], default="error",
        help="minimum violation severity that fails the run (default error)",
    )

    prof = sub.add_parser("profile", help="profile data files and draft a spec")
    prof.add_argument("--data", action="append", default=[], help="data file (CSV); repeatable")
    prof.add_argument("--delimiter", default=",")
    prof.add_argument("--out-spec", help="write the draft spec here (default stdout)")
    prof.add_argument("--out-profile", help="write the JSON profile summary here")
    prof.add_argument("--object-name", help="object name for a single data file")

    chk = sub.add_parser("check-spec", help="parse and lint spec files without data")
    chk.add_argument("--spec", action="append", default=[], help="spec file (.dq); repeatable")
    return top


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    if args.command == "validate":
        return run_validate(args)
    if args.command == "profile":
        return run_profile(args)
    return run_check_spec(args)


# --------------------------------------------------------------------------
# validate

def _load_specs(paths: list[str]) -> list[tuple[str, QualitySpec]] | None:
    loaded = []
    seen_objects: dict[str, str] = {}
    ok = True
    for p in paths:
        try:
            text = Path(p).read_text(encoding="utf-8")
        except OSError as exc:
            _err(f"cannot read spec {p}: {exc}")
            return None
        try:
            spec = parse_spec(text)
        except SpecError as exc:
            _err(f"{p}: {exc}")
            ok = False
            continue
        for obj in spec.objects:
            if obj.name in seen_objects:
                _err(
                    f"{p}: object {obj.name!r} already declared in "
                    f"{seen_objects[obj.name]}"
                )
                ok = False
            seen_objects[obj.name] = p
        loaded.append((p, spec))
    return loaded if ok else None


def _bind_objects(
    objects: list[DataObjectClass],
    datasets: dict[str, Dataset],
    bind_flags: list[str],
) -> dict[str, str] | None:
    explicit: dict[str, str] = {}
    for flag in bind_flags:
        name, sep, path = flag.partition("=")
        if not sep:
            _err(f"--bind expects OBJECT=PATH, got {flag!r}")
            return None
        explicit[name] = path
    by_name = {o.name for o in objects}
    for name in explicit:
        if name not in by_name:
            _err(f"--bind names unknown object {name!r}")
            return None
    basenames: dict[str, list[str]] = {}
    for path in datasets:
        basenames.setdefault(Path(path).name, []).append(path)
    binding: dict[str, str] = {}
    for obj in objects:
        if obj.name in explicit:
            path = explicit[obj.name]
            if path not in datasets:
                matches = basenames.get(Path(path).name, [])
                if len(matches) != 1:
                    _err(f"--bind {obj.name}={path}: no such --data file")
                    return None
                path = matches[0]
            binding[obj.name] = path
        elif obj.source_hint and obj.source_hint in basenames:
            matches = basenames[obj.source_hint]
            if len(matches) > 1:
                _err(f"object {obj.name!r}: several files match {obj.source_hint!r}")
                return None
            binding[obj.name] = matches[0]
        elif len(objects) == 1 and len(datasets) == 1:
            binding[obj.name] = next(iter(datasets))
        else:
            _err(
                f"object {obj.name!r} has no data file: use --bind "
                f"{obj.name}=PATH or a matching 'from' hint"
            )
            return None
    return binding


def run_validate(args) -> int:
    if not args.spec or not args.data:
        _err("validate requires at least one --spec and one --data")
        return 2
    loaded = _load_specs(args.spec)
    if loaded is None:
        return 2
    objects = [obj for _, spec in loaded for obj in spec.objects]
    try:
        datasets = {
            p: read_csv(p, delimiter=args.delimiter) for p in dict.fromkeys(args.data)
        }
    except DatasetError as exc:
        _err(str(exc))
        return 3

    binding = _bind_objects(objects, datasets, args.bind)
    if binding is None:
        return 2

    protocol_chunks: list[str] = []
    report_chunks: list[str] = []
    worst_rank = 0
    expectations_failed = False
    protocol_csv = bool(args.out_protocol and args.out_protocol.endswith(".csv"))
    for obj in objects:
        dataset = datasets[binding[obj.name]]
        try:
            result = evaluate_dataset(
                dataset, obj, workers=args.workers, anomaly_k=args.anomaly_k
            )
        except BindingError as exc:
            _err(str(exc))
            return 2
        for v in result.protocol.violations:
            rank = _SEVERITY_RANK[v.severity]
            if rank > worst_rank:
                worst_rank = rank
        if any(not oc.passed for oc in result.collection_outcomes):
            expectations_failed = True
        summary = summarize(obj, result, dataset.record_count)
        if args.format == "markdown":
            report_chunks.append(render_markdown(summary, obj))
        elif args.format == "csv":
            report_chunks.append(render_csv(summary, obj))
        else:
            report_chunks.append(render_json(summary))
        protocol_chunks.append(
            protocol_to_csv(result.protocol) if protocol_csv
            else protocol_to_jsonl(result.protocol)
        )

    try:
        if args.out_protocol:
            Path(args.out_protocol).write_text(
                "".join(protocol_chunks), encoding="utf-8"
            )
        report_text = "\n".join(report_chunks)
        if args.out_report:
            Path(args.out_report).write_text(report_text, encoding="utf-8")
        else:
            sys.stdout.write(report_text)
    except OSError as exc:
        _err(f"cannot write output: {exc}")
        return 3

    if args.fail_on == "never":
        return 0
    if expectations_failed or worst_rank >= _SEVERITY_RANK[args.fail_on]:
        return 1
    return 0


# --------------------------------------------------------------------------
# profile

def _safe_object_name(stem: str) -> str:
    cleaned = "".join(ch if (ch.isalnum() or ch == "_") else "_" for ch in stem)
    if not cleaned or cleaned[0].isdigit():
        cleaned = f"data_{cleaned}" if cleaned else "data"
    return cleaned


def run_profile(args) -> int:
    if not args.data:
        _err("profile requires at least one --data")
        return 2
    if args.object_name and len(args.data) > 1:
        _err("--object-name only applies to a single --data file")
        return 2
    drafts: list[str] = []
    payload: dict[str, list] = {}
    for i, path in enumerate(args.data):
        try:
            dataset = read_csv(path, delimiter=args.delimiter)
        except DatasetError as exc:
            _err(str(exc))
            return 3
        if dataset.record_count == 0:
            _err(f"warning: {path} has a header but no data rows")
        profiles = profile_dataset(dataset)
        name = args.object_name or _safe_object_name(Path(path).stem)
        drafts.append(
            generate_draft_spec(profiles, name, source_hint=Path(path).name)
        )
        payload[name] = profiles_payload(profiles)
    draft_text = "\n".join(drafts) if len(drafts) == 1 else _merge_drafts(drafts)
    try:
        if args.out_spec:
            Path(args.out_spec).write_text(draft_text, encoding="utf-8")
        else:
            sys.stdout.write(draft_text)
        if args.out_profile:
            import json

            Path(args.out_profile).write_text(
                json.dumps(payload, ensure_ascii=False, indent=2) + "\n",
                encoding="utf-8",
            )
    except OSError as exc:
        _err(f"cannot write output: {exc}")
        return 3
    return 0


def _merge_drafts(drafts: list[str]) -> str:
    """Combine per-file drafts into one multi-object spec text."""
    merged: list[str] = [
        "# Draft quality spec generated from a data profile.",
        "# Suggestions reflect observed data only; review before use.",
        "version 1;",
    ]
    for draft in drafts:
        body = [
            ln
            for ln in draft.splitlines()
            if not ln.startswith("version ") and not ln.startswith("# Draft")
            and not ln.startswith("# Suggestions")
        ]
        while body and not body[0]:
            body.pop(0)
        merged.append("")
        merged.extend(body)
    return "\n".join(merged).rstrip("\n") + "\n"


# --------------------------------------------------------------------------
# check-spec

def run_check_spec(args) -> int:
    if not args.spec:
        _err("check-spec requires at least one --spec")
        return 2
    failed = False
    seen_objects: dict[str, str] = {}
    for p in args.spec:
        try:
            text = Path(p).read_text(encoding="utf-8")
        except OSError as exc:
            _err(f"cannot read spec {p}: {exc}")
            return 3
        try:
            spec = parse_spec(text)
        except SpecError as exc:
            _err(f"{p}: {exc}")
            failed = True
            continue
        for diag in check_spec_semantics(spec):
            print(f"{p}: {diag}", file=sys.stderr)
        for obj in spec.objects:
            if obj.name in seen_objects:
                _err(
                    f"{p}: object {obj.name!r} already declared in "
                    f"{seen_objects[obj.name]}"
                )
                failed = True
            seen_objects[obj.name] = p
    return 2 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
