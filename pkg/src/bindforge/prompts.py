"""Assemble per-class prompt packages and gate response ingestion.

A package carries everything one binding request needs: the target class's
header excerpt (that class only, rendered with its namespace context), the
scaffold stub to fill in, a versioned prompt template id, and in-context
examples matching the binding pattern.  Polymorphic targets hard-require a
trampoline example: documentation-only prompting is known not to work for
trampolines, so building such a package without one is an error, not a
degraded prompt.

Responses come back as files and pass through the linter with full IR
context before touching the tree.  Accepted responses are written with a
pending-review marker line; acceptance is a pre-review gate, not a substitute
for human review.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from string import Template

from .classify import KIND_CALLBACK, KIND_POLYMORPHIC, KIND_UNSUPPORTED, ClassificationReport
from .header_parser import render_unit
from .ir import ClassDecl, DeclarationUnit
from .lint import LintDiagnostic, lint_text
from .manifest import Manifest

DEFAULT_TEMPLATE_ID = "binding-request-v1"

PENDING_REVIEW_MARKER = "// PENDING-REVIEW: accepted by the lint gate; awaiting human review"


class MissingTrampolineExample(Exception):
    """A Polymorphic target has no trampoline example in the library."""


class UnknownTemplate(Exception):
    """The package names a template id with no corresponding template file."""


@dataclass(frozen=True)
class ExampleRef:
    pattern: str  # direct | callback | polymorphic
    name: str
    header_path: str
    binding_path: str

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern,
            "name": self.name,
            "header_path": self.header_path,
            "binding_path": self.binding_path,
        }

    @classmethod
    def from_dict(cls, data: dict) -> ExampleRef:
        return cls(data["pattern"], data["name"], data["header_path"], data["binding_path"])


@dataclass(frozen=True)
class ExampleLibrary:
    """``<root>/<pattern>/<name>.h`` + ``<name>.cpp`` pairs of worked
    (header excerpt, binding) examples."""

    examples: dict[str, tuple[ExampleRef, ...]] = field(default_factory=dict)

    @classmethod
    def load(cls, root: str | Path | None) -> ExampleLibrary:
        if root is None:
            return cls()
        rootp = Path(root)
        if not rootp.is_dir():
            return cls()
        examples: dict[str, tuple[ExampleRef, ...]] = {}
        for pattern_dir in sorted(p for p in rootp.iterdir() if p.is_dir()):
            refs = []
            for header in sorted(pattern_dir.glob("*.h")):
                binding = header.with_suffix(".cpp")
                if binding.is_file():
                    refs.append(
                        ExampleRef(
                            pattern=pattern_dir.name,
                            name=header.stem,
                            header_path=str(header),
                            binding_path=str(binding),
                        )
                    )
            if refs:
                examples[pattern_dir.name] = tuple(refs)
        return cls(examples)

    def for_pattern(self, pattern: str) -> tuple[ExampleRef, ...]:
        return self.examples.get(pattern, ())


@dataclass(frozen=True)
class PromptPackage:
    target_class: str  # qualified name
    header_excerpt: str
    scaffold_text: str
    template_id: str
    in_context_examples: tuple[ExampleRef, ...]
    output_path: str
    pattern_kind: str
    do_not_bind: tuple[tuple[str, str], ...] = ()  # (signature, reason)

    def to_dict(self) -> dict:
        return {
            "target_class": self.target_class,
            "header_excerpt": self.header_excerpt,
            "scaffold_text": self.scaffold_text,
            "template_id": self.template_id,
            "in_context_examples": [e.to_dict() for e in self.in_context_examples],
            "output_path": self.output_path,
            "pattern_kind": self.pattern_kind,
            "do_not_bind": [{"signature": s, "reason": r} for s, r in self.do_not_bind],
        }

    @classmethod
    def from_dict(cls, data: dict) -> PromptPackage:
        return cls(
            target_class=data["target_class"],
            header_excerpt=data["header_excerpt"],
            scaffold_text=data["scaffold_text"],
            template_id=data["template_id"],
            in_context_examples=tuple(
                ExampleRef.from_dict(e) for e in data.get("in_context_examples", [])
            ),
            output_path=data["output_path"],
            pattern_kind=data["pattern_kind"],
            do_not_bind=tuple(
                (d["signature"], d["reason"]) for d in data.get("do_not_bind", [])
            ),
        )


def class_excerpt(unit: DeclarationUnit, c: ClassDecl) -> str:
    """Render just the target class (plus namespace context and handle
    aliases) from the IR.  Rendering from IR rather than slicing source text
    guarantees the excerpt holds exactly one class."""
    enum_prefix = f"{c.name}::"
    sub_unit = DeclarationUnit(
        source_path=unit.source_path,
        namespace_stack=unit.namespace_stack,
        classes=(c,),
        free_functions=(),
        enums=tuple(e for e in unit.enums if e.name.startswith(enum_prefix)),
        diagnostics=(),
        handle_aliases=dict(unit.handle_aliases),
    )
    return render_unit(sub_unit)


def _class_pattern_kind(c: ClassDecl, report: ClassificationReport) -> str:
    class_pattern = report.class_pattern(c)
    if class_pattern is not None and class_pattern.kind == KIND_POLYMORPHIC:
        return "polymorphic"
    for m in c.methods:
        p = report.method_pattern(c.qualified_name, m)
        if p is not None and p.kind == KIND_CALLBACK:
            return "callback"
    return "direct"


def build_packages(
    unit: DeclarationUnit,
    report: ClassificationReport,
    stub: str,
    library: ExampleLibrary,
    *,
    output_path: str = "",
    template_id: str = DEFAULT_TEMPLATE_ID,
) -> list[PromptPackage]:
    """One package per non-Unsupported class in the unit.  Raises
    MissingTrampolineExample when a polymorphic target has no example."""
    packages: list[PromptPackage] = []
    for c in unit.classes:
        class_pattern = report.class_pattern(c)
        if class_pattern is not None and class_pattern.kind == KIND_UNSUPPORTED:
            continue
        pattern = _class_pattern_kind(c, report)
        examples = library.for_pattern(pattern)
        if pattern == "polymorphic" and not examples:
            raise MissingTrampolineExample(
                f"{c.qualified_name} is polymorphic but the example library has "
                "no trampoline example; prompting without one is known to fail"
            )
        prefix = f"{c.qualified_name}::"
        do_not_bind = tuple(
            (decl.removeprefix(prefix), reason)
            for decl, reason in report.unsupported
            if decl.startswith(prefix)
        )
        packages.append(
            PromptPackage(
                target_class=c.qualified_name,
                header_excerpt=class_excerpt(unit, c),
                scaffold_text=stub,
                template_id=template_id,
                in_context_examples=examples,
                output_path=output_path,
                pattern_kind=pattern,
                do_not_bind=do_not_bind,
            )
        )
    return packages


def _template_text(template_id: str, templates_dir: Path | None) -> str:
    if templates_dir is not None:
        path = templates_dir / f"{template_id}.txt"
        if path.is_file():
            return path.read_text(encoding="utf-8")
        raise UnknownTemplate(f"no template file for id {template_id!r} in {templates_dir}")
    ref = resources.files("bindforge").joinpath(f"templates/{template_id}.txt")
    if not ref.is_file():
        raise UnknownTemplate(f"no packaged template for id {template_id!r}")
    return ref.read_text(encoding="utf-8")


def render_prompt(pkg: PromptPackage, *, templates_dir: Path | None = None) -> str:
    """Deterministic template expansion; embeds the example file contents."""
    template = Template(_template_text(pkg.template_id, templates_dir))

    if pkg.do_not_bind:
        do_not_bind = "\n".join(f"- {sig}: {reason}" for sig, reason in pkg.do_not_bind)
    else:
        do_not_bind = "(nothing; all declarations are bindable)"

    sections = []
    for ex in pkg.in_context_examples:
        header = Path(ex.header_path).read_text(encoding="utf-8")
        binding = Path(ex.binding_path).read_text(encoding="utf-8")
        sections.append(
            f"Worked example ({ex.pattern}): {ex.name}\n"
            f"Example header:\n{header}\n"
            f"Example binding:\n{binding}"
        )
    examples_section = "\n" + "\n".join(sections) if sections else ""

    try:
        return template.substitute(
            target_class=pkg.target_class,
            pattern_kind=pkg.pattern_kind,
            do_not_bind=do_not_bind,
            header_excerpt=pkg.header_excerpt.rstrip("\n"),
            scaffold_text=pkg.scaffold_text.rstrip("\n"),
            examples_section=examples_section,
        )
    except KeyError as exc:
        raise UnknownTemplate(f"template {pkg.template_id!r} uses unknown placeholder {exc}") from exc


@dataclass
class IngestOutcome:
    accepted: bool
    diagnostics: list[LintDiagnostic]
    written_path: str | None = None

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "written_path": self.written_path,
        }


def ingest_response(
    pkg: PromptPackage,
    response: str,
    ir: DeclarationUnit | list[DeclarationUnit],
    *,
    severity_overrides: dict[str, str] | None = None,
) -> IngestOutcome:
    """Lint-gate a response.  Accepted responses (zero error-severity
    diagnostics) are written to the package's output path behind a
    pending-review marker; rejections carry the diagnostics for re-prompting."""
    diagnostics = lint_text(
        response, ir, file=pkg.output_path or "<response>", severity_overrides=severity_overrides
    )
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        return IngestOutcome(accepted=False, diagnostics=diagnostics)

    out = Path(pkg.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    text = response if response.endswith("\n") else response + "\n"
    out.write_text(f"{PENDING_REVIEW_MARKER}\n{text}", encoding="utf-8")
    return IngestOutcome(accepted=True, diagnostics=diagnostics, written_path=str(out))


def pending_review_files(bindings_root: str | Path) -> list[str]:
    """Binding sources still carrying the pending-review marker."""
    root = Path(bindings_root)
    if not root.is_dir():
        return []
    out = []
    for path in sorted(root.rglob("*.cpp")):
        try:
            first = path.read_text(encoding="utf-8").splitlines()[:1]
        except (OSError, UnicodeDecodeError):
            continue
        if first and first[0].strip() == PENDING_REVIEW_MARKER:
            out.append(path.relative_to(root).as_posix())
    return out


def write_package_dir(pkg: PromptPackage, dest: str | Path, *, templates_dir: Path | None = None) -> Path:
    """Materialize one package as a directory: prompt.txt plus metadata."""
    d = Path(dest)
    d.mkdir(parents=True, exist_ok=True)
    (d / "prompt.txt").write_text(render_prompt(pkg, templates_dir=templates_dir), encoding="utf-8")
    (d / "package.json").write_text(
        json.dumps(pkg.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return d


def load_package_dir(src: str | Path) -> PromptPackage:
    data = json.loads((Path(src) / "package.json").read_text(encoding="utf-8"))
    return PromptPackage.from_dict(data)


def manifest_severity_overrides(manifest: Manifest | None) -> dict[str, str]:
    return dict(manifest.lint_severity) if manifest is not None else {}
