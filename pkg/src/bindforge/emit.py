"""Render nanobind binding source for Direct, Callback, and Polymorphic
patterns.

Emission is deterministic: identical (IR, classification, aliases) input
yields byte-identical output.  Shapes follow the reference idioms: a
``nb::class_`` line naming all IR bases (never a holder type), ``nb::init``
constructors, ``nb::overload_cast`` only for genuine overload sets, lambdas
wrapping stream-parameter methods, and ``NB_TRAMPOLINE``/``NB_OVERRIDE``
helper structs for extensible classes.

Unsupported methods are omitted from the bindings and listed in a trailing
comment block so reviewers can see what was filtered.  Default arguments on
non-stream parameters are dropped (callers pass all arguments); each drop is
recorded in the emit report rather than silently ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .classify import (
    KIND_POLYMORPHIC,
    BindingPattern,
    ClassificationReport,
    TrampolineSpec,
    free_function_owner,
    method_key,
)
from .header_parser import canonical_spelling, tokenize
from .ir import (
    CATEGORY_CALLABLE,
    CATEGORY_POINTER,
    CATEGORY_SHARED_HANDLE,
    CATEGORY_STREAM,
    ClassDecl,
    DeclarationUnit,
    MethodDecl,
)
from .manifest import AliasEntry, AliasMap, Manifest
from .scaffold import ScaffoldEntry

INCLUDE_NANOBIND = "<nanobind/nanobind.h>"
INCLUDE_TRAMPOLINE = "<nanobind/trampoline.h>"
INCLUDE_SHARED_PTR = "<nanobind/stl/shared_ptr.h>"
INCLUDE_FUNCTION = "<nanobind/stl/function.h>"
INCLUDE_STRING = "<nanobind/stl/string.h>"
INCLUDE_IOSTREAM = "<iostream>"
INCLUDE_SSTREAM = "<sstream>"

_SYSTEM_INCLUDE_ORDER = (
    INCLUDE_NANOBIND,
    INCLUDE_TRAMPOLINE,
    INCLUDE_SHARED_PTR,
    INCLUDE_FUNCTION,
    INCLUDE_STRING,
    INCLUDE_IOSTREAM,
    INCLUDE_SSTREAM,
)

_FACTORY_NAME_PREFIXES = ("alloc", "create", "make", "clone")


class MissingClassification(Exception):
    """A method of the class being emitted is absent from the report."""


class MultipleStreamParams(Exception):
    """More than one stream parameter on one method is out of subset."""


class OverloadedVirtual(Exception):
    """Defensive mirror of the classifier's overloaded-virtual rejection."""


@dataclass(frozen=True)
class EmitUnit:
    stub_path: str
    body: str
    required_includes: tuple[str, ...]
    registered_names: tuple[str, ...]


@dataclass
class EmitReportEntry:
    stub_path: str
    registered_names: list[str] = field(default_factory=list)
    omitted: list[dict] = field(default_factory=list)  # {declaration, reason}
    dropped_defaults: list[str] = field(default_factory=list)
    factory_review: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "stub_path": self.stub_path,
            "registered_names": list(self.registered_names),
            "omitted": list(self.omitted),
            "dropped_defaults": list(self.dropped_defaults),
            "factory_review": list(self.factory_review),
        }


def namespace_alias(namespace_stack: tuple[str, ...]) -> str | None:
    """Short alias from namespace initials (``ompl::base`` -> ``ob``).  The
    framework alias ``nb`` is reserved, so a collision falls back to ``lib``."""
    if not namespace_stack:
        return None
    alias = "".join(seg[0] for seg in namespace_stack if seg).lower()
    if not alias.isidentifier() or alias == "nb":
        return "lib"
    return alias


class _Qualifier:
    """Rewrite type spellings for use outside their home namespace: the full
    namespace prefix becomes the alias, and bare UpperCamelCase identifiers
    (the library's type-naming convention) get the alias prefixed.

    ``absolute=True`` additionally expands namespace-relative references
    (``base::State`` seen from ``ompl::geometric``) to start from the root
    namespace.  Code placed at file scope (trampolines) needs this; code
    inside a namespace-qualified function definition does not, because
    unqualified lookup there still searches the enclosing namespaces."""

    def __init__(self, namespace_stack: tuple[str, ...]) -> None:
        self.ns_prefix = "::".join(namespace_stack)
        self.alias = namespace_alias(namespace_stack)
        self.root = namespace_stack[0] if namespace_stack else ""

    def type_spelling(self, spelling: str, *, absolute: bool = False) -> str:
        if not self.alias:
            return spelling
        s = spelling
        if self.ns_prefix:
            s = s.replace(f"{self.ns_prefix}::", f"{self.alias}::")
        toks = tokenize(s)
        out: list[str] = []
        for j, t in enumerate(toks):
            prev = toks[j - 1].text if j else ""
            nxt = toks[j + 1].text if j + 1 < len(toks) else ""
            if t.kind == "ident" and t.text[:1].isupper() and prev != "::":
                out += [self.alias, "::", t.text]
            elif (
                absolute
                and t.kind == "ident"
                and nxt == "::"
                and prev != "::"
                and t.text[:1].islower()
                and t.text not in ("std", "nb", self.alias, self.root)
                and self.root
            ):
                out += [self.root, "::", t.text]
            else:
                out.append(t.text)
        return canonical_spelling(out)

    def member_ref(self, qualified_class: str, member: str) -> str:
        return f"&{self.type_spelling(qualified_class)}::{member}"


def _param_decl(q: _Qualifier, m: MethodDecl, index: int, *, absolute: bool = False) -> str:
    p = m.params[index]
    spelling = q.type_spelling(p.type.spelling, absolute=absolute)
    name = p.name or f"arg{index}"
    sep = "" if spelling.endswith(("*", "&")) else " "
    return f"{spelling}{sep}{name}"


def _param_name(m: MethodDecl, index: int) -> str:
    return m.params[index].name or f"arg{index}"


# ---------------------------------------------------------------------------
# Fragment emitters


def emit_overload_def(
    group: list[MethodDecl],
    *,
    qualified_class: str | None,
    q: _Qualifier,
    py_name: str | None = None,
) -> list[str]:
    """Defs for one overload group.  A singleton group binds the plain member
    reference with NO overload cast; sets of two or more get one cast per
    overload, with the const disambiguator on const overloads."""
    if not group:
        raise ValueError("empty overload group")
    name = group[0].name
    exposed = py_name or name
    use_cast = len(group) >= 2
    lines: list[str] = []
    for m in group:
        target = (
            q.member_ref(qualified_class, name)
            if qualified_class
            else f"&{q.alias}::{name}" if q.alias else f"&{name}"
        )
        if use_cast:
            args = ", ".join(q.type_spelling(p.type.spelling) for p in m.params)
            suffix = ", nb::const_" if m.is_const and not m.is_static else ""
            expr = f"nb::overload_cast<{args}>({target}{suffix})"
        else:
            expr = target
        def_kind = "def_static" if m.is_static else "def"
        lines.append(f'.{def_kind}("{exposed}", {expr})')
    return lines


def emit_callback_def(
    m: MethodDecl,
    group: list[MethodDecl],
    *,
    qualified_class: str | None,
    q: _Qualifier,
) -> list[str]:
    """Callback methods bind like any other member; when overloaded, the cast
    selects the function-object overload.  The function-object include is
    added at unit level."""
    return emit_overload_def([m] if len(group) < 2 else group, qualified_class=qualified_class, q=q)


def stream_variant_for(m: MethodDecl, entry: AliasEntry | None) -> str:
    """Defaulted stream parameters get the dual-def treatment unless the
    alias map narrows it; bare stream parameters print to the console."""
    if entry is not None and entry.stream_variant:
        return entry.stream_variant
    stream_params = [p for p in m.params if p.type.category == CATEGORY_STREAM]
    return "both" if stream_params and stream_params[0].has_default else "to-console"


def string_alias_for(m: MethodDecl, entry: AliasEntry | None) -> str:
    """Exposed name for the string-returning twin of a stream method:
    ``printSettings`` -> ``settings`` by convention, else ``<name>String``."""
    if entry is not None and entry.aliases:
        return entry.aliases[0]
    if m.name.startswith("print") and len(m.name) > len("print"):
        stem = m.name[len("print"):]
        return stem[0].lower() + stem[1:]
    return f"{m.name}String"


def emit_stream_wrapper(
    m: MethodDecl,
    variant: str,
    *,
    qualified_class: str,
    q: _Qualifier,
    alias_entry: AliasEntry | None = None,
) -> list[str]:
    """Lambda defs for a method with exactly one stream parameter.  The
    console variant forwards to std::cout at the stream position; the string
    variant captures into a string stream and returns the text."""
    stream_indexes = [i for i, p in enumerate(m.params) if p.type.category == CATEGORY_STREAM]
    if len(stream_indexes) != 1:
        raise MultipleStreamParams(f"{m.name} has {len(stream_indexes)} stream parameters")
    stream_at = stream_indexes[0]

    cls = q.type_spelling(qualified_class)
    self_decl = f"{'const ' if m.is_const else ''}{cls} &self"
    other_indexes = [i for i in range(len(m.params)) if i != stream_at]
    lambda_params = ", ".join([self_decl, *(_param_decl(q, m, i) for i in other_indexes)])

    def call_args(stream_name: str) -> str:
        return ", ".join(
            stream_name if i == stream_at else _param_name(m, i) for i in range(len(m.params))
        )

    console = (
        f'.def("{m.name}", []({lambda_params}) {{ self.{m.name}({call_args("std::cout")}); }})'
    )
    text_name = string_alias_for(m, alias_entry)
    to_string = (
        f'.def("{text_name}", []({lambda_params}) '
        f"{{ std::ostringstream stream; self.{m.name}({call_args('stream')}); return stream.str(); }})"
    )
    if variant == "to-console":
        return [console]
    if variant == "to-string":
        return [to_string]
    if variant == "both":
        return [console, to_string]
    raise ValueError(f"unknown stream variant: {variant}")


def emit_trampoline(c: ClassDecl, spec: TrampolineSpec, *, q: _Qualifier) -> list[str]:
    """Helper struct forwarding virtual calls across the language boundary.
    The macro argument equals the override count; pure virtuals use the
    pure-override macro."""
    names = [m.name for m, _ in spec.overrides]
    if len(names) != len(set(names)):
        raise OverloadedVirtual(f"{c.name} has overloaded virtual methods")
    cls = q.type_spelling(c.qualified_name)
    count = spec.override_count
    lines = [
        f"struct Py{c.name} : {cls} {{",
        f"    NB_TRAMPOLINE({cls}, {count}); "
        f"// {count} indicates the number of virtual functions to override",
    ]
    for m, pure in spec.overrides:
        params = ", ".join(_param_decl(q, m, i, absolute=True) for i in range(len(m.params)))
        const = " const" if m.is_const else ""
        ret = q.type_spelling(m.return_type.spelling, absolute=True)
        macro = "NB_OVERRIDE_PURE" if pure else "NB_OVERRIDE"
        macro_args = ", ".join([m.name, *(_param_name(m, i) for i in range(len(m.params)))])
        ret_join = "" if ret.endswith(("*", "&")) else " "
        lines += [
            f"    {ret}{ret_join}{m.name}({params}){const} override {{",
            f"        {macro}({macro_args});",
            "    }",
        ]
    lines.append("};")
    return lines


def emit_class_binding(
    c: ClassDecl,
    report: ClassificationReport,
    aliases: AliasMap,
    *,
    q: _Qualifier,
    entry_report: EmitReportEntry,
) -> list[str]:
    """Statement lines (4-space indented) binding one class.  Raises
    MissingClassification when the report does not cover a method."""
    class_pattern = report.class_pattern(c)
    if class_pattern is None:
        raise MissingClassification(f"class {c.qualified_name} absent from report")
    polymorphic = class_pattern.kind == KIND_POLYMORPHIC

    template_args = [q.type_spelling(c.qualified_name)]
    template_args += [q.type_spelling(b) for b in c.bases]
    if polymorphic:
        template_args.append(f"Py{c.name}")
    head = f'nb::class_<{", ".join(template_args)}>(m, "{c.name}")'
    entry_report.registered_names.append(c.name)

    defs: list[str] = []
    omitted: list[tuple[str, str]] = []
    notes: list[str] = []

    bind_ctors = polymorphic or not c.is_abstract
    if not bind_ctors and c.constructors:
        notes.append(f"// abstract class: constructors of {c.name} not bound")
    for ctor in c.constructors:
        pattern = _lookup(report, c.qualified_name, ctor, omitted)
        if pattern is None or not bind_ctors:
            continue
        args = ", ".join(q.type_spelling(p.type.spelling) for p in ctor.params)
        defs.append(f".def(nb::init<{args}>())")
        entry_report.registered_names.append(f"{c.name}.__init__")
        _note_defaults(c.qualified_name, ctor, entry_report)

    for group in c.overload_groups().values():
        alias_entry = aliases.lookup(c.qualified_name, group[0].name)
        for m in group:
            pattern = _lookup(report, c.qualified_name, m, omitted)
            if pattern is None:
                continue
            if pattern.needs_stream_wrapper and not m.is_static:
                variant = stream_variant_for(m, alias_entry)
                frags = emit_stream_wrapper(
                    m, variant, qualified_class=c.qualified_name, q=q, alias_entry=alias_entry
                )
                defs += frags
                entry_report.registered_names.append(f"{c.name}.{m.name}")
                if variant == "both":
                    entry_report.registered_names.append(
                        f"{c.name}.{string_alias_for(m, alias_entry)}"
                    )
                _note_defaults(c.qualified_name, m, entry_report, ignore_stream=True)
            else:
                defs += _member_defs(m, group, c, q, alias_entry, entry_report)
            _flag_factory(f"{c.name}.{m.name}", m, entry_report)

    lines = ["    " + head]
    body_defs = defs
    if body_defs:
        lines += [f"        {d}" for d in body_defs[:-1]]
        lines.append(f"        {body_defs[-1]};")
    else:
        lines[-1] += ";"
    for note in notes:
        lines.append(f"    {note}")
    for decl, reason in omitted:
        lines.append(f"    // not bound: {decl} ({reason})")
        entry_report.omitted.append({"declaration": decl, "reason": reason})
    return lines


def _member_defs(
    m: MethodDecl,
    group: list[MethodDecl],
    c: ClassDecl,
    q: _Qualifier,
    alias_entry: AliasEntry | None,
    entry_report: EmitReportEntry,
) -> list[str]:
    """Defs for one supported method occurrence, overload-aware.  The cast is
    keyed to the IR group size: even if sibling overloads are filtered out,
    the C++ overload set is still ambiguous without the cast."""
    use_cast = len(group) >= 2
    name = m.name
    target = q.member_ref(c.qualified_name, name)
    if use_cast:
        args = ", ".join(q.type_spelling(p.type.spelling) for p in m.params)
        suffix = ", nb::const_" if m.is_const and not m.is_static else ""
        expr = f"nb::overload_cast<{args}>({target}{suffix})"
    else:
        expr = target
    def_kind = "def_static" if m.is_static else "def"
    out = [f'.{def_kind}("{name}", {expr})']
    entry_report.registered_names.append(f"{c.name}.{name}")
    _note_defaults(c.qualified_name, m, entry_report)
    if alias_entry is not None:
        for extra in alias_entry.aliases:
            out.append(f'.{def_kind}("{extra}", {expr})')
            entry_report.registered_names.append(f"{c.name}.{extra}")
    return out


def _lookup(
    report: ClassificationReport,
    owner: str,
    m: MethodDecl,
    omitted: list[tuple[str, str]],
) -> BindingPattern | None:
    pattern = report.method_pattern(owner, m)
    if pattern is not None:
        return pattern
    key = method_key(owner, m)
    for decl, reason in report.unsupported:
        if decl == key:
            omitted.append((m.signature, reason))
            return None
    raise MissingClassification(f"{key} absent from report")


def _note_defaults(
    owner: str, m: MethodDecl, entry_report: EmitReportEntry, ignore_stream: bool = False
) -> None:
    for p in m.params:
        if not p.has_default:
            continue
        if ignore_stream and p.type.category == CATEGORY_STREAM:
            continue  # the wrapper consumes the stream default
        entry_report.dropped_defaults.append(method_key(owner, m))
        return


def _flag_factory(label: str, m: MethodDecl, entry_report: EmitReportEntry) -> None:
    """Factory-shaped callables (allocating name, pointer or handle return)
    get flagged for an ownership review; the binding itself is unchanged."""
    if m.name.lower().startswith(_FACTORY_NAME_PREFIXES) and m.return_type.category in (
        CATEGORY_POINTER,
        CATEGORY_SHARED_HANDLE,
    ):
        entry_report.factory_review.append(label)


# ---------------------------------------------------------------------------
# Unit-level assembly


def emit_header_unit(
    unit: DeclarationUnit,
    entry: ScaffoldEntry,
    report: ClassificationReport,
    manifest: Manifest,
) -> tuple[EmitUnit, EmitReportEntry]:
    """Render the complete binding source for one header's stub."""
    q = _Qualifier(unit.namespace_stack)
    entry_report = EmitReportEntry(stub_path=entry.stub_path)

    trampoline_blocks: list[list[str]] = []
    body_blocks: list[list[str]] = []
    mentions: list[MethodDecl] = []
    has_console_wrapper = False
    has_string_wrapper = False

    for c in unit.classes:
        class_pattern = report.class_pattern(c)
        if class_pattern is None:
            raise MissingClassification(f"class {c.qualified_name} absent from report")
        if class_pattern.kind == KIND_POLYMORPHIC:
            assert class_pattern.trampoline_spec is not None
            trampoline_blocks.append(emit_trampoline(c, class_pattern.trampoline_spec, q=q))
            mentions += [m for m, _ in class_pattern.trampoline_spec.overrides]
        body_blocks.append(
            emit_class_binding(c, report, manifest.alias_map, q=q, entry_report=entry_report)
        )
        for m in (*c.constructors, *c.methods):
            pattern = report.method_pattern(c.qualified_name, m)
            if pattern is None:
                continue
            mentions.append(m)
            if pattern.needs_stream_wrapper and not m.is_static:
                alias_entry = manifest.alias_map.lookup(c.qualified_name, m.name)
                variant = stream_variant_for(m, alias_entry)
                has_console_wrapper |= variant in ("to-console", "both")
                has_string_wrapper |= variant in ("to-string", "both")

    free_lines: list[str] = []
    owner = free_function_owner(unit)
    free_omitted: list[tuple[str, str]] = []
    free_groups: dict[str, list[MethodDecl]] = {}
    for fn in unit.free_functions:
        free_groups.setdefault(fn.name, []).append(fn)
    for fn in unit.free_functions:
        pattern = _lookup(report, owner, fn, free_omitted)
        if pattern is None:
            continue
        mentions.append(fn)
        group = free_groups[fn.name]
        use_cast = len(group) >= 2
        target = f"&{_free_target(q, owner, fn.name)}"
        if use_cast:
            args = ", ".join(q.type_spelling(p.type.spelling) for p in fn.params)
            expr = f"nb::overload_cast<{args}>({target})"
        else:
            expr = target
        free_lines.append(f'    m.def("{fn.name}", {expr});')
        entry_report.registered_names.append(fn.name)
        _note_defaults(owner, fn, entry_report)
        _flag_factory(fn.name, fn, entry_report)
    for decl, reason in free_omitted:
        free_lines.append(f"    // not bound: {decl} ({reason})")
        entry_report.omitted.append({"declaration": decl, "reason": reason})
    if free_lines:
        body_blocks.append(free_lines)

    includes = _collect_includes(
        entry,
        has_trampoline=bool(trampoline_blocks),
        mentions=mentions,
        console=has_console_wrapper,
        string=has_string_wrapper,
    )

    lines: list[str] = [f"#include {inc}" for inc in includes]
    lines.append("")
    lines.append("namespace nb = nanobind;")
    if q.alias and q.ns_prefix:
        lines.append(f"namespace {q.alias} = {q.ns_prefix};")
    lines.append("")
    for block in trampoline_blocks:
        lines += block
        lines.append("")
    lines.append(f"void {entry.qualified_init_symbol}(nb::module_ &m)")
    lines.append("{")
    for i, block in enumerate(body_blocks):
        if i:
            lines.append("")
        lines += block
    lines.append("}")
    body = "\n".join(lines) + "\n"

    emit_unit = EmitUnit(
        stub_path=entry.stub_path,
        body=body,
        required_includes=tuple(includes),
        registered_names=tuple(entry_report.registered_names),
    )
    return emit_unit, entry_report


def _free_target(q: _Qualifier, owner: str, name: str) -> str:
    if q.alias and owner:
        return f"{q.alias}::{name}"
    if owner:
        return f"{owner}::{name}"
    return name


def _collect_includes(
    entry: ScaffoldEntry,
    *,
    has_trampoline: bool,
    mentions: list[MethodDecl],
    console: bool,
    string: bool,
) -> list[str]:
    """Include set per the trigger rules: shared-pointer support iff a bound
    signature mentions a shared handle, function-object support iff one
    mentions a callable, trampoline support iff a trampoline was emitted,
    string support iff a bound signature mentions std::string or a to-string
    wrapper was emitted."""
    wanted: set[str] = {INCLUDE_NANOBIND}
    if has_trampoline:
        wanted.add(INCLUDE_TRAMPOLINE)
    for m in mentions:
        refs = [m.return_type, *(p.type for p in m.params)]
        if any(r.mentions_category(CATEGORY_SHARED_HANDLE) for r in refs):
            wanted.add(INCLUDE_SHARED_PTR)
        if any(r.mentions_category(CATEGORY_CALLABLE) for r in refs):
            wanted.add(INCLUDE_FUNCTION)
        if any("std::string" in r.spelling for r in refs):
            wanted.add(INCLUDE_STRING)
    if console:
        wanted.add(INCLUDE_IOSTREAM)
    if string:
        wanted.add(INCLUDE_STRING)
        wanted.add(INCLUDE_SSTREAM)
    ordered = [inc for inc in _SYSTEM_INCLUDE_ORDER if inc in wanted]
    ordered.append(f'"{entry.header_path}"')
    ordered.append(f'"{entry.registry_include}"')
    return ordered
