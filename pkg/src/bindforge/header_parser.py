"""Parse a restricted subset of C++ header text into the declaration IR.

Supported grammar subset: namespaces, classes/structs with single-level
public inheritance lists, public constructors and methods, enums, free
functions, and shared-pointer aliases of the form
``using XPtr = std::shared_ptr<X>`` (``typedef`` spelling accepted too).

Anything outside the subset is skipped, and every skipped construct that
could have contributed declarations produces exactly one diagnostic:
templates, non-guard preprocessor directives, nested classes, non-public
members, operators, data members, destructors, deleted members, unions,
and unrecognized statements.  Pure references produce none: ``#include``
lines, forward declarations, ``using namespace`` directives, access labels,
and stray semicolons declare nothing and are ignored silently.  Comments
and ``[[...]]`` attributes are stripped before tokenization.

Full-fidelity C++ parsing is explicitly a non-goal; headers outside the
subset should be excluded via the manifest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ir import (
    CATEGORY_CALLABLE,
    CATEGORY_CONST_REF,
    CATEGORY_MUTABLE_REF,
    CATEGORY_POINTER,
    CATEGORY_SHARED_HANDLE,
    CATEGORY_STREAM,
    CATEGORY_TEMPLATED,
    CATEGORY_UNKNOWN,
    CATEGORY_VALUE,
    QUAL_CONST,
    QUAL_PURE,
    QUAL_STATIC,
    QUAL_VIRTUAL,
    ClassDecl,
    DeclarationUnit,
    EnumDecl,
    MethodDecl,
    ParamDecl,
    ParseDiagnostic,
    TypeRef,
)

DEFAULT_HANDLE_SUFFIX = "Ptr"

SHARED_PTR_TEMPLATE = "std::shared_ptr"
FUNCTION_TEMPLATE = "std::function"
OSTREAM_SPELLING = "std::ostream"

_TYPE_KEYWORDS = {
    "void", "bool", "char", "wchar_t", "char16_t", "char32_t",
    "short", "int", "long", "signed", "unsigned", "float", "double", "auto",
}

_NON_NAME_KEYWORDS = _TYPE_KEYWORDS | {
    "const", "volatile", "class", "struct", "enum", "typename", "constexpr",
    "static", "virtual", "inline", "explicit", "override", "final", "noexcept",
    "true", "false", "nullptr", "default", "delete", "operator", "using",
}


class ParseError(Exception):
    pass


class UnbalancedBraces(ParseError):
    """The token stream cannot be bracket-matched; the file is outside the
    supported subset and should be excluded via the manifest."""

    def __init__(self, line: int, message: str = "unbalanced braces") -> None:
        super().__init__(f"{message} (line {line})")
        self.line = line


@dataclass(frozen=True)
class _Tok:
    kind: str  # ident | number | string | char | punct
    text: str
    line: int


_TOKEN_RE = re.compile(
    r"""
      (?P<string>"(?:[^"\\\n]|\\.)*")
    | (?P<char>'(?:[^'\\\n]|\\.)*')
    | (?P<number>\.?\d[\w.']*(?:[eE][+-]?[\w.]*)?)
    | (?P<ident>[A-Za-z_]\w*)
    | (?P<punct>\[\[|\]\]|::|&&|->|\.\.\.|[{}()\[\];:,<>*&=~.+\-/|!%^?#@])
    """,
    re.VERBOSE,
)

_COMMENT_RE = re.compile(r"//[^\n]*|/\*.*?\*/|/\*.*\Z", re.DOTALL)


def _strip_comments(text: str) -> str:
    def blank(m: re.Match[str]) -> str:
        return "".join(ch if ch == "\n" else " " for ch in m.group(0))

    return _COMMENT_RE.sub(blank, text)


def tokenize(text: str) -> list[_Tok]:
    """Tokenize comment-free text, dropping ``[[...]]`` attribute spans."""
    toks: list[_Tok] = []
    line = 1
    pos = 0
    attr_depth = 0
    for m in _TOKEN_RE.finditer(text):
        line += text.count("\n", pos, m.start())
        pos = m.start()
        kind = m.lastgroup or "punct"
        t = m.group(0)
        if t == "[[":
            attr_depth += 1
            continue
        if t == "]]":
            attr_depth = max(0, attr_depth - 1)
            continue
        if attr_depth:
            continue
        toks.append(_Tok(kind, t, line))
    return toks


# ---------------------------------------------------------------------------
# Preprocessor handling (line-based, prior to tokenization)

_DIRECTIVE_RE = re.compile(r"^\s*#\s*(\w+)\s*(.*)$")

_GUARD_KINDS = {"ifndef", "define", "endif"}


def _scan_directives(lines: list[str]) -> tuple[list[str], list[ParseDiagnostic]]:
    """Blank out preprocessor lines, returning diagnostics for the non-trivial
    ones.  Include guards and ``#include`` lines are silent; any other
    conditional block is skipped wholesale (one diagnostic per block)."""
    diags: list[ParseDiagnostic] = []
    out = list(lines)

    directives: list[tuple[int, str, str]] = []  # (line index, kind, argument)
    i = 0
    while i < len(lines):
        m = _DIRECTIVE_RE.match(lines[i])
        if m:
            start = i
            # Fold backslash continuations into the directive.
            while lines[i].rstrip().endswith("\\") and i + 1 < len(lines):
                i += 1
                out[i] = ""
            directives.append((start, m.group(1), m.group(2).strip()))
            out[start] = ""
        i += 1

    # Identify the classic include guard: first directive #ifndef NAME,
    # second #define NAME, plus the #endif that closes the first.
    guard_indices: set[int] = set()
    if len(directives) >= 2:
        (i0, k0, a0), (_, k1, a1) = directives[0], directives[1]
        name0 = a0.split()[0] if a0 else ""
        name1 = a1.split()[0] if a1 else ""
        if k0 == "ifndef" and k1 == "define" and name0 and name0 == name1:
            guard_indices.update({0, 1})
            depth = 0
            for di, (_, kind, _) in enumerate(directives):
                if kind in ("if", "ifdef", "ifndef"):
                    depth += 1
                elif kind == "endif":
                    depth -= 1
                    if depth == 0:
                        guard_indices.add(di)
                        break

    skip_until_depth: int | None = None
    depth = 0
    for di, (li, kind, _arg) in enumerate(directives):
        is_guard = di in guard_indices
        if kind in ("if", "ifdef", "ifndef"):
            depth += 1
            if skip_until_depth is None and not is_guard:
                skip_until_depth = depth
                diags.append(ParseDiagnostic(li + 1, "preprocessor conditional skipped"))
                _blank_region(out, li, directives, di)
        elif kind == "endif":
            if skip_until_depth is not None and depth == skip_until_depth:
                skip_until_depth = None
            depth -= 1
        elif skip_until_depth is not None:
            continue  # directive inside a skipped region
        elif kind == "pragma":
            if _arg.strip() != "once":
                diags.append(ParseDiagnostic(li + 1, "pragma directive skipped"))
        elif kind == "define":
            if not is_guard:
                diags.append(ParseDiagnostic(li + 1, "macro definition skipped"))
        elif kind in ("include", "else", "elif"):
            if kind in ("else", "elif"):
                diags.append(ParseDiagnostic(li + 1, "preprocessor directive skipped"))
        else:
            diags.append(ParseDiagnostic(li + 1, "preprocessor directive skipped"))
    return out, diags


def _blank_region(out: list[str], start_line: int, directives: list[tuple[int, str, str]], di: int) -> None:
    """Blank every line of the conditional block opened at ``directives[di]``."""
    depth = 0
    end_line = len(out) - 1
    for li, kind, _ in directives[di:]:
        if kind in ("if", "ifdef", "ifndef"):
            depth += 1
        elif kind == "endif":
            depth -= 1
            if depth == 0:
                end_line = li
                break
    for i in range(start_line, end_line + 1):
        out[i] = ""


# ---------------------------------------------------------------------------
# Canonical type spelling

_NO_SPACE_BEFORE = {",", ")", "]", ">", "<", ";", "::", "("}
_NO_SPACE_AFTER = {"(", "[", "<", "::", "~", "!"}


def canonical_spelling(tokens: list[str]) -> str:
    """Join type tokens with one normalized spacing rule (e.g.
    ``const std::pair<State *, double> &``)."""
    parts: list[str] = []
    for i, t in enumerate(tokens):
        if i == 0:
            parts.append(t)
            continue
        prev = tokens[i - 1]
        if t in ("*", "&", "&&"):
            sep = "" if prev in ("(", "<", "*", "&") else " "
        elif prev in _NO_SPACE_AFTER or t in _NO_SPACE_BEFORE:
            sep = ""
        else:
            sep = " "
        parts.append(sep + t)
    return "".join(parts)


def _split_top_level(tokens: list[str], sep: str) -> list[list[str]]:
    """Split on ``sep`` at zero bracket depth (tracks ``<> () [] {}``)."""
    parts: list[list[str]] = [[]]
    depth_angle = depth_round = depth_square = depth_brace = 0
    for t in tokens:
        if t == "<":
            depth_angle += 1
        elif t == ">":
            depth_angle = max(0, depth_angle - 1)
        elif t == "(":
            depth_round += 1
        elif t == ")":
            depth_round -= 1
        elif t == "[":
            depth_square += 1
        elif t == "]":
            depth_square -= 1
        elif t == "{":
            depth_brace += 1
        elif t == "}":
            depth_brace -= 1
        if t == sep and not (depth_angle or depth_round or depth_square or depth_brace):
            parts.append([])
        else:
            parts[-1].append(t)
    return parts


def _retokenize(spelling: str) -> list[str]:
    return [t.text for t in tokenize(_strip_comments(spelling))]


def classify_type(
    spelling: str,
    *,
    handle_suffix: str = DEFAULT_HANDLE_SUFFIX,
    handle_aliases: dict[str, str] | None = None,
) -> TypeRef:
    """Categorize one type spelling.  Total: unknown spellings classify as
    ``unknown``, never an error."""
    tokens = _retokenize(spelling)
    if not tokens:
        return TypeRef(spelling.strip(), CATEGORY_UNKNOWN)
    canon = canonical_spelling(tokens)

    def unknown() -> TypeRef:
        return TypeRef(canon, CATEGORY_UNKNOWN)

    # Peel one trailing declarator sigil (plus optional trailing cv).
    work = list(tokens)
    while work and work[-1] in ("const", "volatile") and len(work) > 1 and work[-2] in ("*", "&"):
        work.pop()
    wrapper = ""
    if work and work[-1] in ("&", "&&", "*"):
        wrapper = work.pop()
    if wrapper == "&&":
        return unknown()  # rvalue references are out of subset
    if work and work[-1] in ("&", "*"):
        return unknown()  # multi-level indirection is out of subset

    is_const = False
    core = list(work)
    while core and core[0] in ("const", "volatile"):
        is_const = is_const or core[0] == "const"
        core.pop(0)
    while core and core[-1] == "const":
        is_const = True
        core.pop()
    if not core:
        return unknown()
    if any(t in ("[", "]", "...", "=") for t in core):
        return unknown()

    core_spelling = canonical_spelling(core)

    # Special templates and the stream reference take precedence over
    # reference/pointer wrapping: they drive include and wrapper decisions.
    template_head, template_args = _split_template(core)
    if template_head == FUNCTION_TEMPLATE:
        return TypeRef(canon, CATEGORY_CALLABLE)
    if template_head == SHARED_PTR_TEMPLATE:
        inner = tuple(
            classify_type(canonical_spelling(arg), handle_suffix=handle_suffix, handle_aliases=handle_aliases)
            for arg in template_args
        )
        return TypeRef(canon, CATEGORY_SHARED_HANDLE, inner)

    if template_head is None and _is_plain_name(core):
        target = _handle_alias_target(core_spelling, handle_suffix, handle_aliases)
        if target is not None:
            inner = (classify_type(target, handle_suffix=handle_suffix, handle_aliases=handle_aliases),)
            return TypeRef(canon, CATEGORY_SHARED_HANDLE, inner)

    if core_spelling == OSTREAM_SPELLING and wrapper == "&" and not is_const:
        return TypeRef(canon, CATEGORY_STREAM)

    if template_head is not None:
        inner = tuple(
            classify_type(canonical_spelling(arg), handle_suffix=handle_suffix, handle_aliases=handle_aliases)
            for arg in template_args
        )
        if wrapper == "*":
            return TypeRef(canon, CATEGORY_POINTER, inner)
        if wrapper == "&":
            return TypeRef(canon, CATEGORY_CONST_REF if is_const else CATEGORY_MUTABLE_REF, inner)
        return TypeRef(canon, CATEGORY_TEMPLATED, inner)

    if not (_is_plain_name(core) or _is_builtin(core)):
        return unknown()
    if wrapper == "*":
        return TypeRef(canon, CATEGORY_POINTER)
    if wrapper == "&":
        return TypeRef(canon, CATEGORY_CONST_REF if is_const else CATEGORY_MUTABLE_REF)
    return TypeRef(canon, CATEGORY_VALUE)


def _split_template(core: list[str]) -> tuple[str | None, list[list[str]]]:
    """For ``head<args>`` cores, return (head spelling, top-level args)."""
    if "<" not in core or core[-1] != ">":
        return None, []
    idx = core.index("<")
    head = core[:idx]
    if not head or not _is_plain_name(head):
        return None, []
    args = _split_top_level(core[idx + 1 : -1], ",")
    return canonical_spelling(head), [a for a in args if a]


def _is_plain_name(tokens: list[str]) -> bool:
    """A possibly ``::``-qualified identifier with no other punctuation."""
    if not tokens:
        return False
    expect_ident = True
    for t in tokens:
        if expect_ident:
            if not re.fullmatch(r"[A-Za-z_]\w*", t) or t in _NON_NAME_KEYWORDS:
                return False
        elif t != "::":
            return False
        expect_ident = not expect_ident
    return not expect_ident


def _is_builtin(tokens: list[str]) -> bool:
    return bool(tokens) and all(t in _TYPE_KEYWORDS for t in tokens)


def _handle_alias_target(name: str, suffix: str, aliases: dict[str, str] | None) -> str | None:
    """Resolve a shared-handle alias name to its pointee spelling, by the
    recorded alias table first, then by the naming convention."""
    last = name.rsplit("::", 1)[-1]
    if aliases:
        if name in aliases:
            return aliases[name]
        if last in aliases:
            return aliases[last]
    if suffix and last.endswith(suffix) and len(last) > len(suffix):
        stem = last[: -len(suffix)]
        prefix = name[: len(name) - len(last)]
        return prefix + stem
    return None


# ---------------------------------------------------------------------------
# Header parsing


def parse_header(
    text: str,
    path: str,
    *,
    handle_suffix: str = DEFAULT_HANDLE_SUFFIX,
) -> DeclarationUnit:
    """Parse one header into a :class:`DeclarationUnit`.

    Raises :class:`UnbalancedBraces` when the token stream cannot be
    bracket-matched; callers should exclude such files via the manifest.
    """
    lines, pre_diags = _scan_directives(text.split("\n"))
    clean = _strip_comments("\n".join(lines))
    tokens = tokenize(clean)
    _check_balance(tokens)

    parser = _Parser(tokens, handle_suffix)
    parser.diagnostics.extend(pre_diags)
    parser.parse()
    parser.diagnostics.sort(key=lambda d: d.line)

    return DeclarationUnit(
        source_path=path,
        namespace_stack=tuple(parser.unit_namespace if parser.unit_namespace is not None else parser._fallback_ns),
        classes=tuple(parser.classes),
        free_functions=tuple(parser.free_functions),
        enums=tuple(parser.enums),
        diagnostics=tuple(parser.diagnostics),
        handle_aliases=parser.handle_aliases,
    )


def _check_balance(tokens: list[_Tok]) -> None:
    stack: list[_Tok] = []
    pairs = {")": "(", "}": "{", "]": "["}
    for t in tokens:
        if t.text in ("(", "{", "["):
            stack.append(t)
        elif t.text in pairs:
            if not stack or stack[-1].text != pairs[t.text]:
                raise UnbalancedBraces(t.line)
            stack.pop()
    if stack:
        raise UnbalancedBraces(stack[-1].line)


_SPECIFIERS = {"virtual", "static", "inline", "constexpr", "explicit"}


class _Parser:
    def __init__(self, tokens: list[_Tok], handle_suffix: str) -> None:
        self.toks = tokens
        self.i = 0
        self.handle_suffix = handle_suffix
        self.ns: list[str] = []
        self.ns_frames: list[int] = []  # segment count per namespace block
        self.unit_namespace: list[str] | None = None
        self._fallback_ns: list[str] = []
        self.classes: list[ClassDecl] = []
        self.free_functions: list[MethodDecl] = []
        self.enums: list[EnumDecl] = []
        self.diagnostics: list[ParseDiagnostic] = []
        self.handle_aliases: dict[str, str] = {}
        self._collect_aliases()

    # -- token helpers ------------------------------------------------------

    def _peek(self, offset: int = 0) -> _Tok | None:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def _at(self, text: str, offset: int = 0) -> bool:
        t = self._peek(offset)
        return t is not None and t.text == text

    def _advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def _line(self) -> int:
        t = self._peek()
        return t.line if t else (self.toks[-1].line if self.toks else 1)

    def _skip_balanced(self, open_text: str, close_text: str) -> None:
        depth = 0
        while self.i < len(self.toks):
            t = self._advance()
            if t.text == open_text:
                depth += 1
            elif t.text == close_text:
                depth -= 1
                if depth == 0:
                    return

    def _consume_statement(self) -> None:
        """Skip to the end of the current declaration: past a ``;`` or a
        balanced ``{...}`` body (with optional trailing ``;``)."""
        while self.i < len(self.toks):
            t = self._advance()
            if t.text == ";":
                return
            if t.text == "{":
                self.i -= 1
                self._skip_balanced("{", "}")
                if self._at(";"):
                    self._advance()
                return
            if t.text == "}":  # stray closer belongs to the enclosing scope
                self.i -= 1
                return

    def _diag(self, line: int, reason: str) -> None:
        self.diagnostics.append(ParseDiagnostic(line, reason))

    # -- alias prepass ------------------------------------------------------

    def _collect_aliases(self) -> None:
        """Record ``using XPtr = std::shared_ptr<X>`` / typedef equivalents
        anywhere in the stream so types can be classified in one pass."""
        ts = self.toks
        for j in range(len(ts)):
            if ts[j].text == "using" and j + 2 < len(ts) and ts[j + 1].kind == "ident" and ts[j + 2].text == "=":
                target = self._shared_ptr_target(j + 3)
                if target:
                    self.handle_aliases[ts[j + 1].text] = target
            elif ts[j].text == "typedef":
                target = self._shared_ptr_target(j + 1)
                if target:
                    k = j + 1
                    depth = 0
                    while k < len(ts) and not (ts[k].text == ";" and depth == 0):
                        if ts[k].text == "<":
                            depth += 1
                        elif ts[k].text == ">":
                            depth -= 1
                        k += 1
                    if k - 1 >= 0 and ts[k - 1].kind == "ident":
                        self.handle_aliases[ts[k - 1].text] = target

    def _shared_ptr_target(self, j: int) -> str | None:
        ts = self.toks
        spelled: list[str] = []
        depth = 0
        while j < len(ts) and ts[j].text != ";":
            spelled.append(ts[j].text)
            if ts[j].text == "<":
                depth += 1
            elif ts[j].text == ">":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        text = canonical_spelling(spelled)
        m = re.fullmatch(r"(?:std::)?shared_ptr<(.+)>", text)
        return m.group(1) if m else None

    # -- type classification with unit context ------------------------------

    def _classify(self, tokens: list[str]) -> TypeRef:
        return classify_type(
            canonical_spelling(tokens),
            handle_suffix=self.handle_suffix,
            handle_aliases=self.handle_aliases,
        )

    # -- grammar ------------------------------------------------------------

    def parse(self) -> None:
        while self.i < len(self.toks):
            if not self._parse_namespace_item():
                break

    def _parse_namespace_item(self) -> bool:
        t = self._peek()
        if t is None:
            return False
        text = t.text

        if text == "}":
            self._advance()
            if self.ns_frames:
                count = self.ns_frames.pop()
                del self.ns[len(self.ns) - count :]
            return True
        if text == ";":
            self._advance()
            return True
        if text == "namespace":
            self._parse_namespace()
            return True
        if text == "using":
            self._parse_using(at_class_scope=False)
            return True
        if text == "typedef":
            self._parse_typedef()
            return True
        if text == "template":
            self._skip_template(t.line)
            return True
        if text in ("class", "struct"):
            self._parse_class_or_forward(t.line)
            return True
        if text == "union":
            self._diag(t.line, "union skipped")
            self._advance()
            self._consume_statement()
            return True
        if text == "enum":
            self._parse_enum(owner=None)
            return True
        if text == "extern":
            self._parse_extern(t.line)
            return True
        # Otherwise: try a free function, falling back to a diagnostic.
        self._parse_function_or_skip(t.line)
        return True

    def _parse_namespace(self) -> None:
        self._advance()  # namespace
        segments: list[str] = []
        while self._peek() and self._peek().kind == "ident":  # type: ignore[union-attr]
            segments.append(self._advance().text)
            if self._at("::"):
                self._advance()
            else:
                break
        if self._at("{"):
            self._advance()
            self.ns.extend(segments)
            self.ns_frames.append(len(segments))
            # Fallback for declaration-free units: first maximal chain.
            if self.ns[: len(self._fallback_ns)] == self._fallback_ns:
                self._fallback_ns = list(self.ns)
        else:
            self._consume_statement()  # namespace alias etc.

    def _parse_using(self, at_class_scope: bool) -> None:
        line = self._line()
        self._advance()  # using
        if self._at("namespace"):
            self._consume_statement()  # name-resolution only; declares nothing
            return
        nxt = self._peek()
        if nxt is not None and nxt.kind == "ident" and self._at("=", 1):
            alias_name = nxt.text
            target = self._shared_ptr_target(self.i + 2)
            self._consume_statement()
            if target:
                self.handle_aliases[alias_name] = target
                self._note_unit_namespace()
            else:
                self._diag(line, "type alias skipped")
            return
        self._diag(line, "using declaration skipped")
        self._consume_statement()

    def _parse_typedef(self) -> None:
        line = self._line()
        target = self._shared_ptr_target(self.i + 1)
        self._consume_statement()
        if not target:
            self._diag(line, "type alias skipped")

    def _skip_template(self, line: int) -> None:
        self._advance()  # template
        if self._at("<"):
            self._skip_angle()
        self._consume_statement()
        self._diag(line, "template declaration skipped")

    def _skip_angle(self) -> None:
        depth = 0
        while self.i < len(self.toks):
            t = self._advance()
            if t.text == "<":
                depth += 1
            elif t.text == ">":
                depth -= 1
                if depth == 0:
                    return

    def _parse_extern(self, line: int) -> None:
        self._advance()
        if self._peek() and self._peek().kind == "string":  # type: ignore[union-attr]
            self._advance()
            if self._at("{"):
                self._diag(line, "extern linkage block skipped")
                self._skip_balanced("{", "}")
                return
            self._diag(line, "extern declaration skipped")
            self._consume_statement()
            return
        self._diag(line, "extern declaration skipped")
        self._consume_statement()

    # -- classes ------------------------------------------------------------

    def _parse_class_or_forward(self, line: int, nested_in: str | None = None) -> None:
        keyword = self._advance().text  # class | struct
        if self._peek() is None or self._peek().kind != "ident":  # type: ignore[union-attr]
            self._diag(line, "unrecognized declaration skipped")
            self._consume_statement()
            return
        name = self._advance().text
        if self._at("final"):
            self._advance()
        if self._at(";"):
            self._advance()  # forward declaration: declares nothing
            return
        if nested_in is not None:
            self._diag(line, "nested class skipped")
            self._consume_statement()
            return

        bases: list[str] = []
        if self._at(":"):
            self._advance()
            bases = self._parse_base_list(line)
        if not self._at("{"):
            self._diag(line, "unrecognized declaration skipped")
            self._consume_statement()
            return
        self._advance()  # {

        access_public = keyword == "struct"
        ctors: list[MethodDecl] = []
        methods: list[MethodDecl] = []
        qualified = "::".join([*self.ns, name])
        self._note_unit_namespace()

        while self.i < len(self.toks) and not self._at("}"):
            access_public = self._parse_member_step(name, qualified, ctors, methods, access_public)
        if self._at("}"):
            self._advance()
        if self._at(";"):
            self._advance()

        self.classes.append(
            ClassDecl(
                name=name,
                qualified_name=qualified,
                bases=tuple(bases),
                constructors=tuple(ctors),
                methods=tuple(methods),
            )
        )

    def _parse_base_list(self, line: int) -> list[str]:
        bases: list[str] = []
        current: list[str] = []
        access = "public"
        saw_access = False
        depth = 0
        while self.i < len(self.toks) and not (self._at("{") and depth == 0):
            t = self._advance()
            if t.text in ("public", "protected", "private"):
                access = t.text
                saw_access = True
                continue
            if t.text == "virtual":
                continue
            if t.text == "<":
                depth += 1
            elif t.text == ">":
                depth -= 1
            if t.text == "," and depth == 0:
                self._finish_base(bases, current, access, saw_access, line)
                current, access, saw_access = [], "public", False
                continue
            current.append(t.text)
        self._finish_base(bases, current, access, saw_access, line)
        return bases

    def _finish_base(
        self, bases: list[str], tokens: list[str], access: str, saw_access: bool, line: int
    ) -> None:
        if not tokens:
            return
        if access != "public":
            self._diag(line, "non-public base skipped")
            return
        spelling = canonical_spelling(tokens)
        if "::" not in spelling:
            spelling = "::".join([*self.ns, spelling]) if self.ns else spelling
        bases.append(spelling)

    def _parse_member_step(
        self,
        class_name: str,
        qualified: str,
        ctors: list[MethodDecl],
        methods: list[MethodDecl],
        access_public: bool,
    ) -> bool:
        t = self._peek()
        assert t is not None
        text = t.text

        if text in ("public", "protected", "private") and self._at(":", 1):
            self._advance()
            self._advance()
            return text == "public"
        if text == ";":
            self._advance()
            return access_public

        if not access_public:
            self._diag(t.line, "non-public member skipped")
            self._consume_statement()
            return access_public

        if text == "using":
            self._parse_using(at_class_scope=True)
            return access_public
        if text == "typedef":
            self._parse_typedef()
            return access_public
        if text == "friend":
            self._diag(t.line, "friend declaration skipped")
            self._consume_statement()
            return access_public
        if text == "template":
            self._skip_template(t.line)
            return access_public
        if text in ("class", "struct"):
            # Forward declarations inside a class are silent, like elsewhere.
            if self._peek(1) is not None and self._peek(1).kind == "ident" and self._at(";", 2):  # type: ignore[union-attr]
                self._advance()
                self._advance()
                self._advance()
                return access_public
            self._advance()
            self._diag(t.line, "nested class skipped")
            self._consume_statement()
            return access_public
        if text == "union":
            self._diag(t.line, "union skipped")
            self._advance()
            self._consume_statement()
            return access_public
        if text == "enum":
            self._parse_enum(owner=class_name)
            return access_public
        if text == "~" or (text == "virtual" and self._at("~", 1)):
            self._diag(t.line, "destructor skipped")
            self._consume_statement()
            return access_public

        decl = self._parse_callable(class_name=class_name, group_prefix=qualified)
        if decl is None:
            return access_public
        kind, method = decl
        if kind == "ctor":
            ctors.append(method)
        else:
            methods.append(method)
        return access_public

    # -- enums ---------------------------------------------------------------

    def _parse_enum(self, owner: str | None) -> None:
        line = self._line()
        self._advance()  # enum
        scoped = False
        if self._at("class") or self._at("struct"):
            scoped = True
            self._advance()
        if self._peek() is None or self._peek().kind != "ident":  # type: ignore[union-attr]
            self._diag(line, "anonymous enum skipped")
            self._consume_statement()
            return
        name = self._advance().text
        if self._at(":"):  # underlying type
            while self.i < len(self.toks) and not (self._at("{") or self._at(";")):
                self._advance()
        if self._at(";"):
            self._advance()  # forward declaration
            return
        if not self._at("{"):
            self._diag(line, "unrecognized declaration skipped")
            self._consume_statement()
            return
        self._advance()
        enumerators: list[str] = []
        expecting_name = True
        depth = 0
        while self.i < len(self.toks) and not (self._at("}") and depth == 0):
            t = self._advance()
            if t.text in ("(", "{", "["):
                depth += 1
            elif t.text in (")", "}", "]"):
                depth -= 1
            elif t.text == "," and depth == 0:
                expecting_name = True
            elif expecting_name and t.kind == "ident":
                enumerators.append(t.text)
                expecting_name = False
        if self._at("}"):
            self._advance()
        if self._at(";"):
            self._advance()
        full_name = f"{owner}::{name}" if owner else name
        self.enums.append(EnumDecl(name=full_name, enumerators=tuple(enumerators), is_scoped=scoped))
        self._note_unit_namespace()

    # -- functions and methods ------------------------------------------------

    def _parse_function_or_skip(self, line: int) -> None:
        decl = self._parse_callable(class_name=None, group_prefix="::".join(self.ns))
        if decl is not None:
            _, method = decl
            self.free_functions.append(method)

    def _parse_callable(
        self, class_name: str | None, group_prefix: str
    ) -> tuple[str, MethodDecl] | None:
        """Parse one method/constructor/free-function declaration.  Returns
        None after recording a diagnostic when the statement is outside the
        subset."""
        start_line = self._line()
        quals: set[str] = set()
        while self._peek() is not None and self._peek().text in _SPECIFIERS:  # type: ignore[union-attr]
            spec = self._advance().text
            if spec == "virtual":
                quals.add(QUAL_VIRTUAL)
            elif spec == "static":
                quals.add(QUAL_STATIC)

        # Scan the declarator head up to the parameter list's '(' at
        # template depth 0; the identifier right before it is the name.
        head: list[str] = []
        angle = 0
        name: str | None = None
        while self.i < len(self.toks):
            t = self._peek()
            assert t is not None
            if t.text == "<":
                angle += 1
            elif t.text == ">":
                angle -= 1
            elif t.text == "(" and angle == 0:
                if head and re.fullmatch(r"[A-Za-z_]\w*", head[-1]) and head[-1] not in _NON_NAME_KEYWORDS:
                    name = head.pop()
                break
            elif t.text in (";", "{", "}"):
                break
            if t.text == "operator":
                self._diag(start_line, "operator overload skipped")
                self._consume_statement()
                return None
            head.append(self._advance().text)

        if name is None:
            if self._at("(") and head:
                self._diag(start_line, "unrecognized declaration skipped")
            else:
                reason = "data member skipped" if class_name is not None else "unrecognized declaration skipped"
                self._diag(start_line, reason)
            self._consume_statement()
            return None
        if not self._at("("):
            reason = "data member skipped" if class_name is not None else "unrecognized declaration skipped"
            self._diag(start_line, reason)
            self._consume_statement()
            return None

        is_ctor = class_name is not None and name == class_name and not head
        if head and head[-1] == "~":
            self._diag(start_line, "destructor skipped")
            self._consume_statement()
            return None
        if not head and not is_ctor:
            self._diag(start_line, "unrecognized declaration skipped")
            self._consume_statement()
            return None

        params_tokens = self._collect_paren_group()
        if params_tokens is None:
            self._diag(start_line, "unrecognized declaration skipped")
            self._consume_statement()
            return None

        # Postfix qualifiers and terminator.
        is_pure = False
        deleted = False
        return_override: list[str] | None = None
        while self.i < len(self.toks):
            t = self._peek()
            assert t is not None
            if t.text == "const":
                quals.add(QUAL_CONST)
                self._advance()
            elif t.text in ("noexcept",):
                self._advance()
                if self._at("("):
                    self._skip_balanced("(", ")")
            elif t.text in ("override", "final"):
                quals.add(QUAL_VIRTUAL)
                self._advance()
            elif t.text in ("&", "&&"):
                self._advance()  # ref-qualifiers don't affect the subset IR
            elif t.text == "->":
                self._advance()
                return_override = []
                while self.i < len(self.toks) and self._peek().text not in (";", "{", "="):  # type: ignore[union-attr]
                    return_override.append(self._advance().text)
            elif t.text == "=":
                self._advance()
                v = self._peek()
                if v is not None and v.text == "0":
                    is_pure = True
                    self._advance()
                elif v is not None and v.text == "delete":
                    deleted = True
                    self._advance()
                elif v is not None and v.text == "default":
                    self._advance()
            elif t.text == ":" and is_ctor:
                self._skip_ctor_initializers()
            elif t.text == ";":
                self._advance()
                break
            elif t.text == "{":
                self._skip_balanced("{", "}")
                if self._at(";"):
                    self._advance()
                break
            else:
                self._diag(start_line, "unrecognized declaration skipped")
                self._consume_statement()
                return None

        if deleted:
            self._diag(start_line, "deleted member skipped")
            return None
        if is_pure:
            quals.add(QUAL_PURE)
            quals.add(QUAL_VIRTUAL)

        if return_override is not None:
            return_tokens = return_override
        else:
            return_tokens = [t for t in head]
        if is_ctor:
            return_type = TypeRef("void", CATEGORY_VALUE)
        else:
            if not return_tokens:
                self._diag(start_line, "unrecognized declaration skipped")
                return None
            return_type = self._classify(return_tokens)

        params = self._parse_params(params_tokens)
        group = f"{group_prefix}::{name}" if group_prefix else name
        method = MethodDecl(
            name=name,
            params=tuple(params),
            return_type=return_type,
            qualifiers=frozenset(quals),
            overload_group=group,
        )
        self._note_unit_namespace()
        return ("ctor" if is_ctor else "method", method)

    def _collect_paren_group(self) -> list[str] | None:
        if not self._at("("):
            return None
        depth = 0
        collected: list[str] = []
        while self.i < len(self.toks):
            t = self._advance()
            if t.text == "(":
                depth += 1
                if depth == 1:
                    continue
            elif t.text == ")":
                depth -= 1
                if depth == 0:
                    return collected
            collected.append(t.text)
        return None

    def _skip_ctor_initializers(self) -> None:
        """Consume ``: member(expr), member{expr}, ...`` up to the body '{'.
        A '{' directly after an identifier is a brace initializer; any other
        '{' is the constructor body and is left unconsumed."""
        self._advance()  # :
        prev_was_ident = False
        while self.i < len(self.toks):
            t = self._peek()
            assert t is not None
            if t.text == "(":
                self._skip_balanced("(", ")")
                prev_was_ident = False
                continue
            if t.text == "{":
                if not prev_was_ident:
                    return
                self._skip_balanced("{", "}")
                prev_was_ident = False
                continue
            if t.text == ";":
                return
            prev_was_ident = t.kind == "ident"
            self._advance()

    def _parse_params(self, tokens: list[str]) -> list[ParamDecl]:
        if not tokens or tokens == ["void"]:
            return []
        params: list[ParamDecl] = []
        for part in _split_top_level(tokens, ","):
            if not part:
                continue
            default_split = _split_top_level(part, "=")
            decl_tokens = default_split[0]
            has_default = len(default_split) > 1
            default_text = canonical_spelling(
                [t for chunk in default_split[1:] for t in chunk]
            ) if has_default else ""
            name = ""
            type_tokens = decl_tokens
            if (
                len(decl_tokens) >= 2
                and re.fullmatch(r"[A-Za-z_]\w*", decl_tokens[-1])
                and decl_tokens[-1] not in _NON_NAME_KEYWORDS
                and decl_tokens[-2] != "::"
            ):
                name = decl_tokens[-1]
                type_tokens = decl_tokens[:-1]
            params.append(
                ParamDecl(
                    name=name,
                    type=self._classify(type_tokens),
                    has_default=has_default,
                    default_text=default_text,
                )
            )
        return params

    def _note_unit_namespace(self) -> None:
        if self.unit_namespace is None:
            self.unit_namespace = list(self.ns)


# ---------------------------------------------------------------------------
# Canonical rendering (the IR's pretty-printer; parse(render(ir)) is a fixed
# point on the supported subset)


def render_unit(unit: DeclarationUnit) -> str:
    out: list[str] = []
    indent = ""
    for seg in unit.namespace_stack:
        out.append(f"{indent}namespace {seg} {{")
    if unit.namespace_stack:
        out.append("")

    for alias, target in sorted(unit.handle_aliases.items()):
        out.append(f"using {alias} = std::shared_ptr<{target}>;")
    if unit.handle_aliases:
        out.append("")

    for cls in unit.classes:
        out.extend(_render_class(cls, unit))
        out.append("")

    for enum in unit.enums:
        if "::" in enum.name:
            continue  # nested enums render inside their class
        out.extend(_render_enum(enum, indent=""))
        out.append("")

    for fn in unit.free_functions:
        out.append(_render_method(fn, as_member=False))
        out.append("")

    while out and out[-1] == "":
        out.pop()
    closers = [f"}}  // namespace {seg}" for seg in reversed(unit.namespace_stack)]
    if closers:
        out.append("")
        out.extend(closers)
    return "\n".join(out) + "\n"


def _render_class(cls: ClassDecl, unit: DeclarationUnit) -> list[str]:
    head = f"class {cls.name}"
    if cls.bases:
        head += " : " + ", ".join(f"public {b}" for b in cls.bases)
    lines = [head + " {", "public:"]
    prefix = f"{cls.name}::"
    for enum in unit.enums:
        if enum.name.startswith(prefix):
            short = EnumDecl(enum.name[len(prefix):], enum.enumerators, enum.is_scoped)
            lines.extend(_render_enum(short, indent="    "))
    for ctor in cls.constructors:
        lines.append("    " + _render_method(ctor, as_member=True, ctor=True))
    for m in cls.methods:
        lines.append("    " + _render_method(m, as_member=True))
    lines.append("};")
    return lines


def _render_enum(enum: EnumDecl, indent: str) -> list[str]:
    kw = "enum class" if enum.is_scoped else "enum"
    lines = [f"{indent}{kw} {enum.name} {{"]
    for i, e in enumerate(enum.enumerators):
        comma = "," if i + 1 < len(enum.enumerators) else ""
        lines.append(f"{indent}    {e}{comma}")
    lines.append(f"{indent}}};")
    return lines


def _render_method(m: MethodDecl, as_member: bool, ctor: bool = False) -> str:
    parts: list[str] = []
    if m.is_static:
        parts.append("static")
    if m.is_virtual:
        parts.append("virtual")
    if not ctor:
        parts.append(m.return_type.spelling)
    params = []
    for p in m.params:
        s = p.type.spelling
        if p.name:
            s += p.name if s.endswith(("*", "&")) else f" {p.name}"
        if p.has_default:
            s += f" = {p.default_text}"
        params.append(s)
    sig = f"{m.name}({', '.join(params)})"
    if parts and parts[-1].endswith(("*", "&")):
        decl = " ".join(parts[:-1] + [parts[-1] + sig]) if len(parts) > 1 else parts[0] + sig
    else:
        decl = " ".join(parts + [sig]) if parts else sig
    if m.is_const:
        decl += " const"
    if m.is_pure:
        decl += " = 0"
    return decl + ";"
