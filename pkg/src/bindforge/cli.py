"""Command-line entry point wiring parse, classify, scaffold, emit, lint,
prompt, and report over a manifest-configured workspace.

Exit codes: 0 clean, 1 lint errors found, 2 usage or manifest errors.
Commands are thin compositions of the module operations; there is no hidden
state, so every command is deterministic given (manifest, tree).
"""

from __future__ import annotations

import dataclasses
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import click

from . import __version__
from .classify import ClassificationReport, ManifestUnknownClass, build_report
from .emit import EmitReportEntry, MissingClassification, emit_header_unit
from .header_parser import UnbalancedBraces, parse_header
from .ir import DeclarationUnit, units_from_json_dict, units_to_json_dict
from .lint import LintReport, lint_text_with_notes, lint_tree
from .manifest import DEFAULT_MANIFEST_NAME, Manifest, ManifestError, load_manifest
from .prompts import (
    ExampleLibrary,
    MissingTrampolineExample,
    build_packages,
    ingest_response,
    load_package_dir,
    pending_review_files,
    write_package_dir,
)
from .scaffold import DuplicateStub, ScaffoldPlan, apply_scaffold, plan_scaffold, render_stub

_HEADER_SUFFIXES = (".h", ".hh", ".hpp")


@dataclass
class CliState:
    manifest_path: Path | None
    fmt: str
    jobs: int
    _manifest: Manifest | None = None

    def manifest(self) -> Manifest:
        if self._manifest is None:
            path = self.manifest_path or Path(DEFAULT_MANIFEST_NAME)
            try:
                self._manifest = load_manifest(path)
            except ManifestError as exc:
                raise click.ClickException(str(exc)) from exc
        return self._manifest


def _fail_usage(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _echo_json(data: dict | list) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def discover_headers(manifest: Manifest) -> list[str]:
    """Header paths relative to library_root (including the library-name
    segment), sorted for determinism."""
    base = manifest.library_root / manifest.library_name
    if not base.is_dir():
        return []
    found = []
    for path in base.rglob("*"):
        if path.suffix in _HEADER_SUFFIXES and path.is_file():
            found.append(path.relative_to(manifest.library_root).as_posix())
    return sorted(found)


def parse_tree(manifest: Manifest, jobs: int = 1) -> list[DeclarationUnit]:
    headers = discover_headers(manifest)

    def one(rel: str) -> DeclarationUnit:
        text = (manifest.library_root / rel).read_text(encoding="utf-8")
        return parse_header(text, rel, handle_suffix=manifest.handle_alias_suffix)

    try:
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                return list(pool.map(one, headers))
        return [one(rel) for rel in headers]
    except UnbalancedBraces as exc:
        _fail_usage(f"header outside the supported subset ({exc}); exclude it via the manifest")
        raise AssertionError  # unreachable


def _units_by_path(units: list[DeclarationUnit]) -> dict[str, DeclarationUnit]:
    return {u.source_path: u for u in units}


@click.group()
@click.version_option(version=__version__, prog_name="bindforge")
@click.option("--manifest", "manifest_path", type=click.Path(path_type=Path), default=None,
              help=f"Workspace manifest (default: ./{DEFAULT_MANIFEST_NAME}).")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text",
              help="Output format for command results.")
@click.option("--jobs", type=click.IntRange(min=1), default=1,
              help="Parallel workers for per-file work.")
@click.pass_context
def main(ctx: click.Context, manifest_path: Path | None, fmt: str, jobs: int) -> None:
    """Batch toolchain for generating and checking nanobind bindings."""
    ctx.obj = CliState(manifest_path=manifest_path, fmt=fmt, jobs=jobs)


@main.command()
@click.argument("headers", nargs=-1, type=click.Path(path_type=Path))
@click.pass_obj
def parse(state: CliState, headers: tuple[Path, ...]) -> None:
    """Parse headers into the declaration IR (whole tree when none given)."""
    manifest = state.manifest()
    if headers:
        units = []
        for h in headers:
            path = h if h.is_file() else manifest.library_root / h
            if not path.is_file():
                _fail_usage(f"no such header: {h}")
            try:
                rel = path.resolve().relative_to(manifest.library_root.resolve()).as_posix()
            except ValueError:
                rel = h.as_posix()
            try:
                units.append(
                    parse_header(
                        path.read_text(encoding="utf-8"),
                        rel,
                        handle_suffix=manifest.handle_alias_suffix,
                    )
                )
            except UnbalancedBraces as exc:
                _fail_usage(f"header outside the supported subset ({exc}); exclude it via the manifest")
    else:
        units = parse_tree(manifest, state.jobs)

    if state.fmt == "json":
        _echo_json(units_to_json_dict(units))
        return
    for unit in units:
        click.echo(
            f"{unit.source_path}: {len(unit.classes)} classes, "
            f"{len(unit.free_functions)} free functions, {len(unit.enums)} enums, "
            f"{len(unit.diagnostics)} diagnostics"
        )
        for d in unit.diagnostics:
            click.echo(f"  line {d.line}: {d.reason}")


def _build_report_or_fail(units: list[DeclarationUnit], manifest: Manifest) -> ClassificationReport:
    try:
        return build_report(units, manifest)
    except ManifestUnknownClass as exc:
        _fail_usage(str(exc))
        raise AssertionError  # unreachable


@main.command()
@click.option("--unsupported-only", is_flag=True, help="Print only the do-not-bind filter list.")
@click.pass_obj
def classify(state: CliState, unsupported_only: bool) -> None:
    """Classify every declaration by binding pattern."""
    manifest = state.manifest()
    units = parse_tree(manifest, state.jobs)
    report = _build_report_or_fail(units, manifest)

    if unsupported_only:
        if state.fmt == "json":
            _echo_json([{"declaration": d, "reason": r} for d, r in report.unsupported])
        else:
            for decl, reason in report.unsupported:
                click.echo(f"{decl}: {reason}")
        return

    if state.fmt == "json":
        _echo_json(report.to_dict())
        return
    for name, pattern in sorted(report.per_class.items()):
        click.echo(f"class {name}: {pattern.kind}")
    counts: dict[str, int] = {}
    for pattern in report.per_method.values():
        counts[pattern.kind] = counts.get(pattern.kind, 0) + 1
    for kind in sorted(counts):
        click.echo(f"{kind}: {counts[kind]} methods")
    click.echo(f"Unsupported: {len(report.unsupported)} declarations")


@main.command()
@click.option("--root", "root", type=click.Path(path_type=Path), default=None,
              help="Library include root (overrides manifest library_root).")
@click.option("--out", "out", type=click.Path(path_type=Path), default=None,
              help="Bindings output root (overrides manifest bindings_root).")
@click.option("--force", is_flag=True, help="Overwrite stubs that already contain work.")
@click.option("--dry-run", is_flag=True, help="Print the plan without writing files.")
@click.pass_obj
def scaffold(state: CliState, root: Path | None, out: Path | None, force: bool, dry_run: bool) -> None:
    """Mirror the header tree as empty binding stubs plus registries."""
    manifest = state.manifest()
    if root is not None:
        manifest = dataclasses.replace(manifest, library_root=root)
    bindings_root = out if out is not None else manifest.bindings_root

    headers = discover_headers(manifest)
    try:
        plan = plan_scaffold(headers, manifest)
    except DuplicateStub as exc:
        _fail_usage(str(exc))
        raise AssertionError

    if dry_run:
        _echo_json(plan.to_dict())
        return

    result = apply_scaffold(plan, Path(bindings_root), force=force)
    if state.fmt == "json":
        _echo_json(
            {
                "created": result.created,
                "updated": result.updated,
                "unchanged": result.unchanged,
                "skipped": result.skipped,
                "changes": result.change_count,
            }
        )
        return
    if result.change_count == 0:
        click.echo("0 changes")
    else:
        click.echo(f"{result.change_count} changes "
                   f"({len(result.created)} created, {len(result.updated)} updated)")
    for skipped in result.skipped:
        click.echo(f"skipped (has work, use --force to overwrite): {skipped}")


def _plan_for(manifest: Manifest) -> ScaffoldPlan:
    try:
        return plan_scaffold(discover_headers(manifest), manifest)
    except DuplicateStub as exc:
        _fail_usage(str(exc))
        raise AssertionError


@main.command()
@click.option("--unit", "unit_path", default=None,
              help="Emit one header (path relative to the library root).")
@click.option("--all", "emit_all", is_flag=True, help="Emit every planned header.")
@click.option("--check", is_flag=True, help="Render and self-lint in memory; write nothing.")
@click.pass_obj
def emit(state: CliState, unit_path: str | None, emit_all: bool, check: bool) -> None:
    """Render binding source for supported patterns into the stub files."""
    if bool(unit_path) == emit_all:
        _fail_usage("pass exactly one of --unit <header> or --all")
    manifest = state.manifest()
    units = parse_tree(manifest, state.jobs)
    report = _build_report_or_fail(units, manifest)
    plan = _plan_for(manifest)
    by_path = _units_by_path(units)

    entries = plan.entries
    if unit_path:
        entries = tuple(e for e in entries if e.header_path == unit_path)
        if not entries:
            _fail_usage(f"--unit {unit_path} is not part of the scaffold plan")

    report_entries: list[EmitReportEntry] = []
    lint_errors = 0
    for entry in entries:
        unit = by_path.get(entry.header_path)
        if unit is None:
            continue
        try:
            emit_unit, entry_report = emit_header_unit(unit, entry, report, manifest)
        except MissingClassification as exc:
            _fail_usage(str(exc))
            raise AssertionError
        report_entries.append(entry_report)
        if check:
            diags, _ = lint_text_with_notes(
                emit_unit.body, units, file=entry.stub_path,
                severity_overrides=manifest.lint_severity,
            )
            lint_errors += sum(1 for d in diags if d.severity == "error")
            for d in diags:
                click.echo(f"{d.file}:{d.line}: {d.severity} {d.rule_id}: {d.message}", err=True)
        else:
            target = manifest.bindings_root / entry.stub_path
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(emit_unit.body, encoding="utf-8")

    if state.fmt == "json":
        _echo_json([e.to_dict() for e in report_entries])
    else:
        for e in report_entries:
            click.echo(f"{e.stub_path}: {len(e.registered_names)} names, "
                       f"{len(e.omitted)} omitted, {len(e.dropped_defaults)} defaults dropped")
    if check and lint_errors:
        sys.exit(1)


@main.command()
@click.argument("paths", nargs=-1, type=click.Path(path_type=Path))
@click.option("--context", "context_path", type=click.Path(path_type=Path), default=None,
              help="IR JSON (from `parse --format json`) for context-dependent rules.")
@click.option("--deny", type=click.Choice(["warnings"]), default=None,
              help="Treat warnings as failures for the exit status.")
@click.pass_obj
def lint(state: CliState, paths: tuple[Path, ...], context_path: Path | None, deny: str | None) -> None:
    """Check binding sources against the documented failure modes."""
    manifest: Manifest | None = None
    try:
        manifest = state.manifest()
    except click.ClickException:
        manifest = None  # lint works without a workspace

    ir: list[DeclarationUnit] | None = None
    if context_path is not None:
        try:
            ir = units_from_json_dict(json.loads(context_path.read_text(encoding="utf-8")))
        except (OSError, ValueError, KeyError) as exc:
            _fail_usage(f"cannot load IR context: {exc}")
    elif manifest is not None:
        ir = parse_tree(manifest, state.jobs)

    overrides = manifest.lint_severity if manifest is not None else {}
    if not paths:
        if manifest is None:
            _fail_usage("no paths given and no manifest available")
        paths = (manifest.bindings_root,)

    reports: list[LintReport] = []
    for p in paths:
        if p.is_dir():
            reports.append(lint_tree(p, ir, severity_overrides=overrides))
        elif p.is_file():
            diags, notes = lint_text_with_notes(
                p.read_text(encoding="utf-8"), ir, file=str(p), severity_overrides=overrides
            )
            reports.append(LintReport(diagnostics=diags, files_scanned=1, notes=notes))
        else:
            _fail_usage(f"no such path: {p}")

    diagnostics = [d for r in reports for d in r.diagnostics]
    notes = [n for r in reports for n in r.notes]
    errors = sum(1 for d in diagnostics if d.severity == "error")
    warnings = sum(1 for d in diagnostics if d.severity == "warning")

    if state.fmt == "json":
        _echo_json([d.to_dict() for d in diagnostics])
    else:
        for d in diagnostics:
            click.echo(f"{d.file}:{d.line}: {d.severity} {d.rule_id}: {d.message}")
            if d.fix_hint:
                click.echo(f"  hint: {d.fix_hint}")
        for note in dict.fromkeys(notes):
            click.echo(f"note: {note}")
        click.echo(f"{errors} errors, {warnings} warnings")
    if errors or (deny == "warnings" and warnings):
        sys.exit(1)


@main.group()
def prompt() -> None:
    """Build prompt packages and ingest response files."""


@prompt.command("build")
@click.argument("header")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None,
              help="Directory for package output (default: <bindings_root>/_prompts).")
@click.pass_obj
def prompt_build(state: CliState, header: str, out_dir: Path | None) -> None:
    """Build one prompt package per class declared in HEADER."""
    manifest = state.manifest()
    units = parse_tree(manifest, state.jobs)
    report = _build_report_or_fail(units, manifest)
    plan = _plan_for(manifest)

    unit = _units_by_path(units).get(header)
    entry = next((e for e in plan.entries if e.header_path == header), None)
    if unit is None or entry is None:
        _fail_usage(f"header not in the workspace plan: {header}")

    stub_file = manifest.bindings_root / entry.stub_path
    stub_text = stub_file.read_text(encoding="utf-8") if stub_file.is_file() else render_stub(entry)
    library = ExampleLibrary.load(manifest.examples_dir)

    try:
        packages = build_packages(
            unit, report, stub_text, library,
            output_path=str(manifest.bindings_root / entry.stub_path),
        )
    except MissingTrampolineExample as exc:
        raise click.ClickException(str(exc)) from exc

    base = out_dir if out_dir is not None else manifest.bindings_root / "_prompts"
    written = []
    for pkg in packages:
        name = pkg.target_class.rsplit("::", 1)[-1]
        dest = write_package_dir(pkg, Path(base) / name, templates_dir=manifest.templates_dir)
        written.append(str(dest))
    if state.fmt == "json":
        _echo_json({"packages": written})
    else:
        for w in written:
            click.echo(w)


@prompt.command("ingest")
@click.argument("package_dir", type=click.Path(path_type=Path, exists=True, file_okay=False))
@click.argument("response_file", type=click.Path(path_type=Path, exists=True, dir_okay=False))
@click.pass_obj
def prompt_ingest(state: CliState, package_dir: Path, response_file: Path) -> None:
    """Lint-gate a response file; write it to the tree when clean."""
    manifest = state.manifest()
    units = parse_tree(manifest, state.jobs)
    pkg = load_package_dir(package_dir)
    outcome = ingest_response(
        pkg,
        response_file.read_text(encoding="utf-8"),
        units,
        severity_overrides=manifest.lint_severity,
    )
    if state.fmt == "json":
        _echo_json(outcome.to_dict())
    else:
        if outcome.accepted:
            click.echo(f"accepted: {outcome.written_path}")
        else:
            click.echo("rejected:")
        for d in outcome.diagnostics:
            click.echo(f"  {d.file}:{d.line}: {d.severity} {d.rule_id}: {d.message}")
    if not outcome.accepted:
        sys.exit(1)


@main.command()
@click.pass_obj
def report(state: CliState) -> None:
    """Coverage summary: pattern counts, unbound entities, pending reviews."""
    manifest = state.manifest()
    units = parse_tree(manifest, state.jobs)
    classification = _build_report_or_fail(units, manifest)

    method_counts: dict[str, int] = {}
    for pattern in classification.per_method.values():
        method_counts[pattern.kind] = method_counts.get(pattern.kind, 0) + 1
    class_counts: dict[str, int] = {}
    for pattern in classification.per_class.values():
        class_counts[pattern.kind] = class_counts.get(pattern.kind, 0) + 1

    coverage = {
        "per_pattern_method_counts": dict(sorted(method_counts.items())),
        "per_pattern_class_counts": dict(sorted(class_counts.items())),
        "unbound": [
            {"declaration": decl, "reason": reason} for decl, reason in classification.unsupported
        ],
        "pending_review": pending_review_files(manifest.bindings_root),
    }
    if state.fmt == "json":
        _echo_json(coverage)
    else:
        click.echo("methods: " + ", ".join(f"{k}={v}" for k, v in sorted(method_counts.items())))
        click.echo("classes: " + ", ".join(f"{k}={v}" for k, v in sorted(class_counts.items())))
        click.echo(f"unbound: {len(classification.unsupported)}")
        for decl, reason in classification.unsupported:
            click.echo(f"  {decl}: {reason}")
        click.echo(f"pending review: {len(coverage['pending_review'])}")
        for f in coverage["pending_review"]:
            click.echo(f"  {f}")


if __name__ == "__main__":
    main()
