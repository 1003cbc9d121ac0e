"""Assign binding patterns to parsed declarations.

Method rule, in order: any parameter that is a mutable reference to a
composite (template-argument-bearing) type, or of unknown category, makes
the method Unsupported; otherwise any callable parameter makes it Callback;
otherwise it is Direct.  Stream parameters never disqualify a method; they
set a wrapper marker the emitter consumes.

Class rule: a class is Polymorphic exactly when it declares at least one
virtual method AND the manifest designates it extensible.  Extensibility is
curated, never inferred: trampolining every class with virtuals would bloat
the bindings.  Destructors never count toward the override count.
Overloaded virtuals inside an extensible class are Unsupported for now:
the macro interaction is untested territory and flagging is safer than
guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ir import (
    CATEGORY_CALLABLE,
    CATEGORY_MUTABLE_REF,
    CATEGORY_STREAM,
    CATEGORY_UNKNOWN,
    ClassDecl,
    DeclarationUnit,
    MethodDecl,
)
from .manifest import Manifest

KIND_DIRECT = "Direct"
KIND_CALLBACK = "Callback"
KIND_POLYMORPHIC = "Polymorphic"
KIND_UNSUPPORTED = "Unsupported"

REASON_MUTABLE_COMPOSITE = "mutable reference to composite type"
REASON_UNKNOWN_TYPE = "parameter type outside the supported subset"
REASON_OVERLOADED_VIRTUAL = "overloaded virtual methods in extensible class"


class ManifestUnknownClass(Exception):
    """The manifest designates an extensible class absent from the IR."""


@dataclass(frozen=True)
class TrampolineSpec:
    """What the emitter needs to render one trampoline helper."""

    overrides: tuple[tuple[MethodDecl, bool], ...]  # (virtual method, pure flag)

    @property
    def override_count(self) -> int:
        return len(self.overrides)


@dataclass(frozen=True)
class BindingPattern:
    kind: str
    reason: str = ""
    trampoline_spec: TrampolineSpec | None = None
    needs_stream_wrapper: bool = False

    def __post_init__(self) -> None:
        if (self.kind == KIND_UNSUPPORTED) != bool(self.reason):
            raise ValueError("reason is required exactly when kind is Unsupported")
        if (self.kind == KIND_POLYMORPHIC) != (self.trampoline_spec is not None):
            raise ValueError("trampoline_spec is required exactly when kind is Polymorphic")

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.reason:
            d["reason"] = self.reason
        if self.trampoline_spec is not None:
            d["trampoline_spec"] = {
                "override_count": self.trampoline_spec.override_count,
                "overrides": [
                    {"signature": m.signature, "pure": pure}
                    for m, pure in self.trampoline_spec.overrides
                ],
            }
        if self.needs_stream_wrapper:
            d["needs_stream_wrapper"] = True
        return d


def classify_method(m: MethodDecl, c: ClassDecl | None = None) -> BindingPattern:
    """Pattern for one method (or free function when ``c`` is None)."""
    reasons = unsupported_reasons(m)
    if reasons:
        return BindingPattern(KIND_UNSUPPORTED, reason="; ".join(reasons))
    has_callable = any(p.type.category == CATEGORY_CALLABLE for p in m.params)
    has_stream = any(p.type.category == CATEGORY_STREAM for p in m.params)
    kind = KIND_CALLBACK if has_callable else KIND_DIRECT
    return BindingPattern(kind, needs_stream_wrapper=has_stream)


def unsupported_reasons(m: MethodDecl) -> list[str]:
    """Why a method cannot be bound; empty when it can."""
    reasons: list[str] = []
    for p in m.params:
        if p.type.category == CATEGORY_MUTABLE_REF and p.type.inner:
            reasons.append(REASON_MUTABLE_COMPOSITE)
        elif p.type.category == CATEGORY_UNKNOWN:
            reasons.append(REASON_UNKNOWN_TYPE)
    return sorted(set(reasons))


def classify_class(c: ClassDecl, manifest: Manifest) -> BindingPattern:
    """Class-level pattern: Polymorphic only for manifest-designated
    extensible classes with virtuals; Direct otherwise."""
    extensible = c.qualified_name in manifest.extensible_classes or c.name in manifest.extensible_classes
    virtuals = c.virtual_methods
    if not (extensible and virtuals):
        return BindingPattern(KIND_DIRECT)
    names = [m.name for m in virtuals]
    if len(names) != len(set(names)):
        return BindingPattern(KIND_UNSUPPORTED, reason=REASON_OVERLOADED_VIRTUAL)
    spec = TrampolineSpec(tuple((m, m.is_pure) for m in virtuals))
    return BindingPattern(KIND_POLYMORPHIC, trampoline_spec=spec)


def method_key(owner: str, m: MethodDecl) -> str:
    """Stable report key: ``<qualified owner>::<signature>``."""
    return f"{owner}::{m.signature}" if owner else m.signature


def free_function_owner(unit: DeclarationUnit) -> str:
    return "::".join(unit.namespace_stack)


@dataclass
class ClassificationReport:
    """Exhaustive partition of the parsed surface: every method (including
    constructors and free functions) lands in exactly one of ``per_method``
    or ``unsupported``."""

    per_class: dict[str, BindingPattern] = field(default_factory=dict)
    per_method: dict[str, BindingPattern] = field(default_factory=dict)
    unsupported: list[tuple[str, str]] = field(default_factory=list)

    def method_pattern(self, owner: str, m: MethodDecl) -> BindingPattern | None:
        """Pattern for a supported method; None when it is unsupported."""
        return self.per_method.get(method_key(owner, m))

    def class_pattern(self, c: ClassDecl) -> BindingPattern | None:
        return self.per_class.get(c.qualified_name)

    def is_unsupported(self, owner: str, m: MethodDecl) -> bool:
        key = method_key(owner, m)
        return any(k == key for k, _ in self.unsupported)

    def to_dict(self) -> dict:
        return {
            "per_class": {k: v.to_dict() for k, v in sorted(self.per_class.items())},
            "per_method": {k: v.to_dict() for k, v in sorted(self.per_method.items())},
            "unsupported": [
                {"declaration": decl, "reason": reason} for decl, reason in self.unsupported
            ],
        }


def build_report(units: list[DeclarationUnit], manifest: Manifest) -> ClassificationReport:
    """Classify every declaration in every unit.  Deterministic: iteration
    follows unit order, then declaration order within each unit."""
    report = ClassificationReport()
    known_classes: set[str] = set()
    for unit in units:
        for cls in unit.classes:
            known_classes.update({cls.qualified_name, cls.name})
            report.per_class[cls.qualified_name] = classify_class(cls, manifest)
            for m in (*cls.constructors, *cls.methods):
                _add_method(report, cls.qualified_name, m, cls)
        owner = free_function_owner(unit)
        for fn in unit.free_functions:
            _add_method(report, owner, fn, None)

    missing = [name for name in manifest.extensible_classes if name not in known_classes]
    if missing:
        raise ManifestUnknownClass(
            "manifest designates extensible classes absent from the parsed headers: "
            + ", ".join(sorted(missing))
        )
    return report


def _add_method(
    report: ClassificationReport, owner: str, m: MethodDecl, c: ClassDecl | None
) -> None:
    pattern = classify_method(m, c)
    key = method_key(owner, m)
    if pattern.kind == KIND_UNSUPPORTED:
        report.unsupported.append((key, pattern.reason))
    else:
        report.per_method[key] = pattern
