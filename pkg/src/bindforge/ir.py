"""Declaration IR shared by every stage of the toolchain.

A parsed header becomes a :class:`DeclarationUnit`; everything downstream
(classification, emission, linting, prompt packing) consumes these types and
never raw header text.  All types serialize to plain dicts with stable field
names so IR can be written to JSON once and reloaded later (e.g. as lint
context).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

# Type categories, ordered roughly from "plain" to "needs special handling".
CATEGORY_VALUE = "value"
CATEGORY_POINTER = "pointer"
CATEGORY_CONST_REF = "const-ref"
CATEGORY_MUTABLE_REF = "mutable-ref"
CATEGORY_SHARED_HANDLE = "shared-handle"
CATEGORY_CALLABLE = "callable"
CATEGORY_STREAM = "stream"
CATEGORY_TEMPLATED = "templated"
CATEGORY_UNKNOWN = "unknown"

ALL_CATEGORIES = (
    CATEGORY_VALUE,
    CATEGORY_POINTER,
    CATEGORY_CONST_REF,
    CATEGORY_MUTABLE_REF,
    CATEGORY_SHARED_HANDLE,
    CATEGORY_CALLABLE,
    CATEGORY_STREAM,
    CATEGORY_TEMPLATED,
    CATEGORY_UNKNOWN,
)


@dataclass(frozen=True)
class TypeRef:
    """A categorized parameter or return type.

    ``spelling`` is the canonical source text (normalized whitespace).
    ``inner`` holds the classified template arguments of recognized
    templates; for reference/pointer wrappers around a templated core it
    holds the core's arguments, which is what lets the classifier see
    "mutable reference to composite" without re-parsing the spelling.
    """

    spelling: str
    category: str
    inner: tuple[TypeRef, ...] = ()

    def __post_init__(self) -> None:
        if self.category not in ALL_CATEGORIES:
            raise ValueError(f"unknown type category: {self.category!r}")

    def mentions_category(self, category: str) -> bool:
        """True if this type or any nested template argument has ``category``."""
        if self.category == category:
            return True
        return any(t.mentions_category(category) for t in self.inner)

    def to_dict(self) -> dict[str, Any]:
        return {
            "spelling": self.spelling,
            "category": self.category,
            "inner": [t.to_dict() for t in self.inner],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TypeRef:
        return cls(
            spelling=data["spelling"],
            category=data["category"],
            inner=tuple(cls.from_dict(t) for t in data.get("inner", [])),
        )


@dataclass(frozen=True)
class ParamDecl:
    name: str = ""
    type: TypeRef = field(default_factory=lambda: TypeRef("void", CATEGORY_VALUE))
    has_default: bool = False
    default_text: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "type": self.type.to_dict(),
            "has_default": self.has_default,
            "default_text": self.default_text,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ParamDecl:
        return cls(
            name=data.get("name", ""),
            type=TypeRef.from_dict(data["type"]),
            has_default=data.get("has_default", False),
            default_text=data.get("default_text", ""),
        )


QUAL_CONST = "const"
QUAL_VIRTUAL = "virtual"
QUAL_PURE = "pure"
QUAL_STATIC = "static"


@dataclass(frozen=True)
class MethodDecl:
    """A constructor, member function, or free function."""

    name: str
    params: tuple[ParamDecl, ...] = ()
    return_type: TypeRef = field(default_factory=lambda: TypeRef("void", CATEGORY_VALUE))
    qualifiers: frozenset[str] = frozenset()
    overload_group: str = ""

    @property
    def is_virtual(self) -> bool:
        return QUAL_VIRTUAL in self.qualifiers

    @property
    def is_pure(self) -> bool:
        return QUAL_PURE in self.qualifiers

    @property
    def is_const(self) -> bool:
        return QUAL_CONST in self.qualifiers

    @property
    def is_static(self) -> bool:
        return QUAL_STATIC in self.qualifiers

    @property
    def signature(self) -> str:
        """Stable key that distinguishes overloads within one class."""
        args = ", ".join(p.type.spelling for p in self.params)
        suffix = " const" if self.is_const else ""
        return f"{self.name}({args}){suffix}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "params": [p.to_dict() for p in self.params],
            "return_type": self.return_type.to_dict(),
            "qualifiers": sorted(self.qualifiers),
            "overload_group": self.overload_group,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MethodDecl:
        return cls(
            name=data["name"],
            params=tuple(ParamDecl.from_dict(p) for p in data.get("params", [])),
            return_type=TypeRef.from_dict(data["return_type"]),
            qualifiers=frozenset(data.get("qualifiers", [])),
            overload_group=data.get("overload_group", ""),
        )


@dataclass(frozen=True)
class EnumDecl:
    """An enum's name plus its enumerator names (values are not evaluated).

    Enums declared inside a class carry the owning class as a ``Class::Name``
    prefix.
    """

    name: str
    enumerators: tuple[str, ...] = ()
    is_scoped: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "enumerators": list(self.enumerators),
            "is_scoped": self.is_scoped,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EnumDecl:
        return cls(
            name=data["name"],
            enumerators=tuple(data.get("enumerators", [])),
            is_scoped=data.get("is_scoped", False),
        )


@dataclass(frozen=True)
class ClassDecl:
    name: str
    qualified_name: str
    bases: tuple[str, ...] = ()
    constructors: tuple[MethodDecl, ...] = ()
    methods: tuple[MethodDecl, ...] = ()

    @property
    def virtual_methods(self) -> tuple[MethodDecl, ...]:
        """Methods flagged virtual, in declaration order (destructors are
        never parsed into the IR, so they can't appear here)."""
        return tuple(m for m in self.methods if m.is_virtual)

    @property
    def is_abstract(self) -> bool:
        return any(m.is_pure for m in self.virtual_methods)

    def overload_groups(self) -> dict[str, list[MethodDecl]]:
        """Methods grouped by overload_group, preserving declaration order."""
        groups: dict[str, list[MethodDecl]] = {}
        for m in self.methods:
            groups.setdefault(m.overload_group, []).append(m)
        return groups

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "qualified_name": self.qualified_name,
            "bases": list(self.bases),
            "constructors": [m.to_dict() for m in self.constructors],
            "methods": [m.to_dict() for m in self.methods],
            "virtual_methods": [m.to_dict() for m in self.virtual_methods],
            "is_abstract": self.is_abstract,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ClassDecl:
        # virtual_methods and is_abstract are derived; recomputed on load.
        return cls(
            name=data["name"],
            qualified_name=data["qualified_name"],
            bases=tuple(data.get("bases", [])),
            constructors=tuple(MethodDecl.from_dict(m) for m in data.get("constructors", [])),
            methods=tuple(MethodDecl.from_dict(m) for m in data.get("methods", [])),
        )


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    reason: str

    def to_dict(self) -> dict[str, Any]:
        return {"line": self.line, "reason": self.reason}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ParseDiagnostic:
        return cls(line=data["line"], reason=data["reason"])


@dataclass(frozen=True)
class DeclarationUnit:
    """Parsed contents of one header."""

    source_path: str
    namespace_stack: tuple[str, ...] = ()
    classes: tuple[ClassDecl, ...] = ()
    free_functions: tuple[MethodDecl, ...] = ()
    enums: tuple[EnumDecl, ...] = ()
    diagnostics: tuple[ParseDiagnostic, ...] = ()
    # Names aliased to the shared-pointer template (e.g. XPtr -> X), recorded
    # so parameters spelled with the alias classify as shared-handle.
    handle_aliases: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        names = [c.name for c in self.classes]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate class name in unit {self.source_path!r}")

    def all_methods(self) -> Iterable[tuple[ClassDecl | None, MethodDecl]]:
        """Every classifiable declaration: constructors, methods, and free
        functions, paired with the owning class (None for free functions)."""
        for c in self.classes:
            for m in c.constructors:
                yield c, m
            for m in c.methods:
                yield c, m
        for f in self.free_functions:
            yield None, f

    def to_dict(self) -> dict[str, Any]:
        return {
            "source_path": self.source_path,
            "namespace_stack": list(self.namespace_stack),
            "classes": [c.to_dict() for c in self.classes],
            "free_functions": [f.to_dict() for f in self.free_functions],
            "enums": [e.to_dict() for e in self.enums],
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "handle_aliases": dict(sorted(self.handle_aliases.items())),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DeclarationUnit:
        return cls(
            source_path=data["source_path"],
            namespace_stack=tuple(data.get("namespace_stack", [])),
            classes=tuple(ClassDecl.from_dict(c) for c in data.get("classes", [])),
            free_functions=tuple(MethodDecl.from_dict(f) for f in data.get("free_functions", [])),
            enums=tuple(EnumDecl.from_dict(e) for e in data.get("enums", [])),
            diagnostics=tuple(ParseDiagnostic.from_dict(d) for d in data.get("diagnostics", [])),
            handle_aliases=dict(data.get("handle_aliases", {})),
        )


def units_to_json_dict(units: Iterable[DeclarationUnit]) -> dict[str, Any]:
    return {"units": [u.to_dict() for u in units]}


def units_from_json_dict(data: Any) -> list[DeclarationUnit]:
    """Load units from the ``parse`` command's JSON, a bare list, or one unit."""
    if isinstance(data, dict) and "units" in data:
        items = data["units"]
    elif isinstance(data, list):
        items = data
    elif isinstance(data, dict):
        items = [data]
    else:
        raise ValueError("unrecognized IR JSON shape")
    return [DeclarationUnit.from_dict(item) for item in items]
