"""Static checks for binding source text against documented failure modes.

The linter runs token-pattern matching with optional IR cross-reference,
never a full C++ parse: the input may be imperfect generated code, and rules
R1/R2/R5/R6 must still fire on it.  Rules that need to know what the library
actually declares (R3, R4, R7, R8) are skipped with an informational note
when no IR context is given.

Rules:
  R1  unknown binding-framework header (e.g. <nanobind/make_shared.h>)
  R2  pybind11-style holder type inside nb::class_ template arguments
  R3  overload_cast on a method with no overloads (context)
  R4  missing overload_cast on an overloaded method (context)
  R5  shared-pointer types used without <nanobind/stl/shared_ptr.h>
  R6  std::function used without <nanobind/stl/function.h>
  R7  trampoline override count differs from the class's virtual count (context)
  R8  binding a signature the classifier marks unsupported (context)
  R0  pseudo-rule: input is empty or not scannable

R1, R2, R4, R7, R8 are errors; R3, R5, R6 default to warnings because the
flagged include may legitimately live in a shared header, and a spurious
cast is ugly but compiles.  The manifest can promote severities.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .classify import unsupported_reasons
from .header_parser import _strip_comments
from .ir import ClassDecl, DeclarationUnit, MethodDecl

RULE_SEVERITY = {
    "R0": "error",
    "R1": "error",
    "R2": "error",
    "R3": "warning",
    "R4": "error",
    "R5": "warning",
    "R6": "warning",
    "R7": "error",
    "R8": "error",
}

CONTEXT_RULES = ("R3", "R4", "R7", "R8")

FIX_HINTS = {
    "R1": 'shared-pointer support is enabled via #include <nanobind/stl/shared_ptr.h>; '
          "there is no make_shared.h",
    "R2": 'do not specify a holder type: nb::class_<ob::RealVectorStateSpace>(m, "RealVectorStateSpace")',
    "R3": 'bind non-overloaded methods by plain reference: .def("setup", &ob::RealVectorStateSpace::setup)',
    "R4": 'select the overload: nb::overload_cast<const ob::RealVectorBounds &>(&ob::RealVectorStateSpace::setBounds), '
          "adding nb::const_ for const overloads",
    "R5": "add #include <nanobind/stl/shared_ptr.h>",
    "R6": "add #include <nanobind/stl/function.h>",
    "R7": "the trampoline macro count must equal the number of virtual functions to override",
    "R8": "filter unsupported signatures out and list them as do-not-bind instead",
}


@dataclass(frozen=True)
class LintDiagnostic:
    rule_id: str
    severity: str
    file: str
    line: int
    message: str
    fix_hint: str

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "severity": self.severity,
            "location": {"file": self.file, "line": self.line},
            "message": self.message,
            "fix_hint": self.fix_hint,
        }


_KNOWN_FRAMEWORK_HEADERS = {
    "nanobind/nanobind.h",
    "nanobind/trampoline.h",
    "nanobind/operators.h",
    "nanobind/ndarray.h",
    "nanobind/eval.h",
    "nanobind/typing.h",
    "nanobind/nb_defs.h",
}

_KNOWN_STL_HEADERS = {
    "array", "bind_map", "bind_vector", "chrono", "complex", "filesystem",
    "function", "list", "map", "optional", "pair", "set", "shared_ptr",
    "string", "string_view", "tuple", "unique_ptr", "unordered_map",
    "unordered_set", "variant", "vector", "wstring",
}

_KNOWN_PREFIXES = ("nanobind/intrusive/", "nanobind/stl/detail/", "nanobind/eigen/")

_INCLUDE_RE = re.compile(r"#\s*include\s*[<\"]([^>\"]+)[>\"]")
_CLASS_TEMPLATE_RE = re.compile(r"nb\s*::\s*class_\s*<")
_HOLDER_RE = re.compile(r"\b(?:std\s*::\s*)?(shared_ptr|unique_ptr|intrusive_ptr)\s*<")
_OVERLOAD_CAST_RE = re.compile(r"\boverload_cast\s*<")
_MEMBER_REF_RE = re.compile(r"&\s*((?:\w+\s*::\s*)+)(\w+)")
_TRAMPOLINE_RE = re.compile(r"\bNB_TRAMPOLINE\s*\(\s*([\w:\s]+?)\s*,\s*(\d+)\s*\)")
_SHARED_PTR_USE_RE = re.compile(r"\bstd\s*::\s*shared_ptr\b")
_FUNCTION_USE_RE = re.compile(r"\bstd\s*::\s*function\b")


class _Resolver:
    """Looks up classes and overload sets in the IR by short name, ignoring
    whatever namespace alias the binding text uses."""

    def __init__(self, units: list[DeclarationUnit]) -> None:
        self.classes: dict[str, ClassDecl] = {}
        self.free_functions: dict[str, list[MethodDecl]] = {}
        self.handle_names: set[str] = set()
        for unit in units:
            for c in unit.classes:
                self.classes.setdefault(c.name, c)
            for fn in unit.free_functions:
                self.free_functions.setdefault(fn.name, []).append(fn)
            self.handle_names.update(unit.handle_aliases)

    def overload_set(self, qualifier_segments: list[str], name: str) -> list[MethodDecl] | None:
        """Methods named ``name`` on the class the qualifier points at, or
        the free-function set; None when the reference cannot be resolved."""
        for segment in reversed(qualifier_segments):
            cls = self.classes.get(segment)
            if cls is not None:
                members = [m for m in cls.methods if m.name == name]
                return members if members else None
        if name in self.free_functions:
            return self.free_functions[name]
        return None

    def class_by_segment(self, spelling: str) -> ClassDecl | None:
        last = spelling.replace(" ", "").rsplit("::", 1)[-1]
        return self.classes.get(last)


def lint_text(
    binding: str,
    context: DeclarationUnit | list[DeclarationUnit] | None = None,
    *,
    file: str = "<text>",
    severity_overrides: dict[str, str] | None = None,
) -> list[LintDiagnostic]:
    diags, _ = lint_text_with_notes(
        binding, context, file=file, severity_overrides=severity_overrides
    )
    return diags


def lint_text_with_notes(
    binding: str,
    context: DeclarationUnit | list[DeclarationUnit] | None = None,
    *,
    file: str = "<text>",
    severity_overrides: dict[str, str] | None = None,
) -> tuple[list[LintDiagnostic], list[str]]:
    """All fired rules plus informational notes (context-rule skips)."""
    overrides = severity_overrides or {}
    notes: list[str] = []

    def diag(rule: str, line: int, message: str) -> LintDiagnostic:
        return LintDiagnostic(
            rule_id=rule,
            severity=overrides.get(rule, RULE_SEVERITY[rule]),
            file=file,
            line=line,
            message=message,
            fix_hint=FIX_HINTS.get(rule, ""),
        )

    if not binding or not binding.strip():
        return [diag("R0", 1, "input is empty or not scannable as binding source")], notes

    text = _strip_comments(binding)
    units = [] if context is None else ([context] if isinstance(context, DeclarationUnit) else list(context))
    resolver = _Resolver(units) if units else None
    if resolver is None:
        notes = [f"{rule} skipped: no IR context provided" for rule in CONTEXT_RULES]

    out: list[LintDiagnostic] = []
    out += _check_r1(text, diag)
    out += _check_r2(text, diag)
    out += _check_r5_r6(text, diag, resolver)
    if resolver is not None:
        out += _check_r3_r4(text, diag, resolver)
        out += _check_r7(text, diag, resolver)
        out += _check_r8(text, diag, resolver)

    out.sort(key=lambda d: (d.file, d.line, d.rule_id))
    return out, notes


def _line_of(text: str, pos: int) -> int:
    return text.count("\n", 0, pos) + 1


def _check_r1(text: str, diag) -> list[LintDiagnostic]:
    out = []
    for m in _INCLUDE_RE.finditer(text):
        path = m.group(1).strip()
        if not path.startswith("nanobind/"):
            continue
        if path in _KNOWN_FRAMEWORK_HEADERS:
            continue
        if path.startswith("nanobind/stl/") and path.removeprefix("nanobind/stl/").removesuffix(".h") in _KNOWN_STL_HEADERS:
            continue
        if path.startswith(_KNOWN_PREFIXES):
            continue
        out.append(diag("R1", _line_of(text, m.start()), f"unknown binding-framework header <{path}>"))
    return out


def _class_template_args(text: str, start: int) -> tuple[list[str], int] | None:
    """Top-level template arguments of the ``nb::class_<...>`` starting at
    ``start`` (index of '<'), or None when unbalanced."""
    depth = 0
    i = start
    arg: list[str] = []
    args: list[str] = []
    while i < len(text):
        ch = text[i]
        if ch == "<":
            depth += 1
            if depth > 1:
                arg.append(ch)
        elif ch == ">":
            depth -= 1
            if depth == 0:
                args.append("".join(arg).strip())
                return [a for a in args if a], i
            arg.append(ch)
        elif ch == "," and depth == 1:
            args.append("".join(arg).strip())
            arg = []
        else:
            arg.append(ch)
        i += 1
    return None


def _check_r2(text: str, diag) -> list[LintDiagnostic]:
    out = []
    for m in _CLASS_TEMPLATE_RE.finditer(text):
        parsed = _class_template_args(text, m.end() - 1)
        if parsed is None:
            continue
        args, _ = parsed
        for a in args:
            if _HOLDER_RE.search(a):
                out.append(
                    diag(
                        "R2",
                        _line_of(text, m.start()),
                        f"holder type in nb::class_ template arguments: {' '.join(a.split())}",
                    )
                )
                break
    return out


def _check_r5_r6(text: str, diag, resolver: _Resolver | None) -> list[LintDiagnostic]:
    includes = {m.group(1).strip() for m in _INCLUDE_RE.finditer(text)}
    include_spans = [m.span() for m in _INCLUDE_RE.finditer(text)]

    def outside_includes(m: re.Match) -> bool:
        return not any(a <= m.start() < b for a, b in include_spans)

    out = []
    if "nanobind/stl/shared_ptr.h" not in includes:
        uses = [m for m in _SHARED_PTR_USE_RE.finditer(text) if outside_includes(m)]
        if not uses and resolver is not None and resolver.handle_names:
            alias_re = re.compile(r"\b(" + "|".join(map(re.escape, sorted(resolver.handle_names))) + r")\b")
            uses = [m for m in alias_re.finditer(text) if outside_includes(m)]
        if uses:
            out.append(
                diag(
                    "R5",
                    _line_of(text, uses[0].start()),
                    "shared-pointer types are used but <nanobind/stl/shared_ptr.h> is not included",
                )
            )
    if "nanobind/stl/function.h" not in includes:
        uses = [m for m in _FUNCTION_USE_RE.finditer(text) if outside_includes(m)]
        if uses:
            out.append(
                diag(
                    "R6",
                    _line_of(text, uses[0].start()),
                    "std::function is used but <nanobind/stl/function.h> is not included",
                )
            )
    return out


def _member_refs(text: str):
    """Yield (match, qualifier segments, member name, wrapped-in-cast flag)."""
    for m in _MEMBER_REF_RE.finditer(text):
        segments = [s for s in re.split(r"\s*::\s*", m.group(1)) if s]
        name = m.group(2)
        line_start = text.rfind("\n", 0, m.start()) + 1
        before = text[line_start : m.start()]
        wrapped = bool(_OVERLOAD_CAST_RE.search(before))
        yield m, segments, name, wrapped


def _check_r3_r4(text: str, diag, resolver: _Resolver) -> list[LintDiagnostic]:
    out = []
    for m, segments, name, wrapped in _member_refs(text):
        overloads = resolver.overload_set(segments, name)
        if overloads is None:
            continue
        line = _line_of(text, m.start())
        if wrapped and len(overloads) == 1:
            out.append(
                diag("R3", line, f"overload_cast on {segments[-1]}::{name}, which has no overloads")
            )
        elif not wrapped and len(overloads) >= 2:
            out.append(
                diag(
                    "R4",
                    line,
                    f"{segments[-1]}::{name} has {len(overloads)} overloads but is bound without overload_cast",
                )
            )
    return out


def _check_r7(text: str, diag, resolver: _Resolver) -> list[LintDiagnostic]:
    out = []
    for m in _TRAMPOLINE_RE.finditer(text):
        cls = resolver.class_by_segment(m.group(1))
        if cls is None:
            continue
        declared = int(m.group(2))
        expected = len(cls.virtual_methods)
        if declared != expected:
            out.append(
                diag(
                    "R7",
                    _line_of(text, m.start()),
                    f"trampoline for {cls.name} declares {declared} overrides "
                    f"but the class has {expected} virtual methods",
                )
            )
    return out


def _check_r8(text: str, diag, resolver: _Resolver) -> list[LintDiagnostic]:
    out = []
    for m, segments, name, _wrapped in _member_refs(text):
        overloads = resolver.overload_set(segments, name)
        if not overloads:
            continue
        if all(unsupported_reasons(om) for om in overloads):
            reasons = sorted({r for om in overloads for r in unsupported_reasons(om)})
            out.append(
                diag(
                    "R8",
                    _line_of(text, m.start()),
                    f"{segments[-1]}::{name} is bound but its signature is unsupported "
                    f"({'; '.join(reasons)})",
                )
            )
    return out


@dataclass
class LintReport:
    diagnostics: list[LintDiagnostic]
    files_scanned: int
    notes: list[str]

    @property
    def error_count(self) -> int:
        return sum(1 for d in self.diagnostics if d.severity == "error")

    @property
    def warning_count(self) -> int:
        return sum(1 for d in self.diagnostics if d.severity == "warning")

    def to_dict(self) -> dict:
        return {
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "files_scanned": self.files_scanned,
            "errors": self.error_count,
            "warnings": self.warning_count,
            "notes": list(self.notes),
        }


def lint_tree(
    bindings_dir: str | Path,
    ir: list[DeclarationUnit] | None = None,
    *,
    severity_overrides: dict[str, str] | None = None,
) -> LintReport:
    """Lint every binding source under ``bindings_dir``.  Diagnostics are
    sorted by (file, line, rule id); the report is deterministic."""
    root = Path(bindings_dir)
    diagnostics: list[LintDiagnostic] = []
    notes: list[str] = []
    files = sorted(root.rglob("*.cpp"))
    for path in files:
        rel = path.relative_to(root).as_posix()
        try:
            text = path.read_text(encoding="utf-8")
        except (UnicodeDecodeError, OSError):
            diagnostics.append(
                LintDiagnostic(
                    rule_id="R0",
                    severity="error",
                    file=rel,
                    line=1,
                    message="file cannot be read as UTF-8 source",
                    fix_hint="",
                )
            )
            continue
        file_diags, file_notes = lint_text_with_notes(
            text, ir, file=rel, severity_overrides=severity_overrides
        )
        diagnostics += file_diags
        for note in file_notes:
            if note not in notes:
                notes.append(note)
    diagnostics.sort(key=lambda d: (d.file, d.line, d.rule_id))
    return LintReport(diagnostics=diagnostics, files_scanned=len(files), notes=notes)
