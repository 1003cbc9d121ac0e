"""Mirror the library header tree under the bindings directory.

Each header gets one stub file defining exactly one registration function
``<lib>::binding::<module>::init<CamelJoinedDirs>_<FileStem>(nb::module_& m)``,
each module gets a registry header declaring its module's init functions,
and one aggregator source creates the extension module, the submodules, and
the init calls.  A plain newline-separated file list is emitted for build
integration; no build scripts are generated.
"""

from __future__ import annotations

import fnmatch
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath

from .manifest import Manifest


class DuplicateStub(Exception):
    """Two headers map to the same stub path; resolve via manifest exclusion."""


@dataclass(frozen=True)
class ScaffoldEntry:
    header_path: str  # posix path relative to library root, e.g. ompl/base/SpaceInformation.h
    stub_path: str  # posix path relative to bindings root, e.g. base/SpaceInformation.cpp
    module_name: str
    init_symbol: str
    binding_namespace: str
    registry_include: str  # include spelling from the stub to its module registry

    @property
    def qualified_init_symbol(self) -> str:
        return f"{self.binding_namespace}::{self.init_symbol}"


@dataclass(frozen=True)
class ScaffoldPlan:
    entries: tuple[ScaffoldEntry, ...]
    modules: tuple[str, ...]
    aggregator_path: str
    registry_paths: dict[str, str]
    module_namespaces: dict[str, str]
    extension_module: str
    file_list_path: str = "sources.txt"

    def module_entries(self, module: str) -> list[ScaffoldEntry]:
        return [e for e in self.entries if e.module_name == module]

    def to_dict(self) -> dict:
        return {
            "entries": [
                {
                    "header_path": e.header_path,
                    "stub_path": e.stub_path,
                    "module_name": e.module_name,
                    "init_symbol": e.init_symbol,
                    "binding_namespace": e.binding_namespace,
                }
                for e in self.entries
            ],
            "modules": list(self.modules),
            "aggregator_path": self.aggregator_path,
            "registry_paths": dict(sorted(self.registry_paths.items())),
            "extension_module": self.extension_module,
            "file_list_path": self.file_list_path,
        }


def init_symbol_for(header_path: str, library_name: str) -> str:
    """``ompl/base/SpaceInformation.h`` -> ``init_SpaceInformation``;
    ``ompl/base/spaces/RealVectorStateSpace.h`` ->
    ``initSpaces_RealVectorStateSpace``.  Intermediate directory segments are
    capitalized and joined directly after ``init``."""
    parts = PurePosixPath(header_path).parts
    if len(parts) < 3 or parts[0] != library_name:
        raise ValueError(f"header path not of the form {library_name}/<module>/...: {header_path}")
    intermediates = parts[2:-1]
    stem = PurePosixPath(parts[-1]).stem
    camel = "".join(seg[:1].upper() + seg[1:] for seg in intermediates)
    return f"init{camel}_{stem}"


def plan_scaffold(tree: list[str], manifest: Manifest) -> ScaffoldPlan:
    """Build the deterministic header-to-stub plan.  Headers outside the
    manifest's module set and headers matching exclusion globs yield no
    entries.  Raises DuplicateStub on stub-path collisions."""
    entries: list[ScaffoldEntry] = []
    seen_stubs: dict[str, str] = {}
    module_order = {m: i for i, m in enumerate(manifest.modules)}

    for raw in tree:
        rel = PurePosixPath(raw).as_posix()
        parts = PurePosixPath(rel).parts
        if len(parts) < 3 or parts[0] != manifest.library_name:
            continue
        module = parts[1]
        if module not in module_order:
            continue
        if any(fnmatch.fnmatch(rel, pat) for pat in manifest.exclusions):
            continue
        stem = PurePosixPath(parts[-1]).stem
        stub_rel = PurePosixPath(module, *parts[2:-1], stem + manifest.stub_extension).as_posix()
        if stub_rel in seen_stubs:
            raise DuplicateStub(
                f"{rel} and {seen_stubs[stub_rel]} both map to stub {stub_rel}"
            )
        seen_stubs[stub_rel] = rel
        depth = len(parts) - 3  # directories between the module dir and the file
        registry_include = "../" * depth + manifest.registry_filename
        entries.append(
            ScaffoldEntry(
                header_path=rel,
                stub_path=stub_rel,
                module_name=module,
                init_symbol=init_symbol_for(rel, manifest.library_name),
                binding_namespace=manifest.module_namespace(module),
                registry_include=registry_include,
            )
        )

    entries.sort(key=lambda e: (module_order[e.module_name], e.stub_path))
    return ScaffoldPlan(
        entries=tuple(entries),
        modules=tuple(manifest.modules),
        aggregator_path=manifest.aggregator_filename,
        registry_paths={m: f"{m}/{manifest.registry_filename}" for m in manifest.modules},
        module_namespaces={m: manifest.module_namespace(m) for m in manifest.modules},
        extension_module=manifest.extension_module,
    )


def render_stub(entry: ScaffoldEntry) -> str:
    """The empty backbone: framework include, original header, registry
    header, namespace alias, and one empty init function."""
    return (
        "#include <nanobind/nanobind.h>\n"
        f'#include "{entry.header_path}"\n'
        f'#include "{entry.registry_include}"\n'
        "\n"
        "namespace nb = nanobind;\n"
        "\n"
        f"void {entry.qualified_init_symbol}(nb::module_& m)\n"
        "{\n"
        "}\n"
    )


def render_registry(module: str, plan: ScaffoldPlan) -> str:
    """Registry header declaring the module's init functions in stub-path
    order."""
    decls = [
        f"    void {e.init_symbol}(nb::module_& m);"
        for e in plan.module_entries(module)
    ]
    ns = plan.module_namespaces[module]
    lines = [
        "#pragma once",
        "",
        "#include <nanobind/nanobind.h>",
        "",
        "namespace nb = nanobind;",
        "",
        f"namespace {ns}",
        "{",
        *decls,
        "}",
    ]
    return "\n".join(lines) + "\n"


def render_aggregator(plan: ScaffoldPlan) -> str:
    """Extension-module source: creates one submodule per manifest module and
    invokes every init function (module order, then stub-path order)."""
    lines = ["#include <nanobind/nanobind.h>", ""]
    for module in plan.modules:
        lines.append(f'#include "{plan.registry_paths[module]}"')
    lines += ["", "namespace nb = nanobind;", "", f"NB_MODULE({plan.extension_module}, m)", "{"]
    for module in plan.modules:
        lines.append(f'    nb::module_ {module} = m.def_submodule("{module}");')
    if plan.entries:
        lines.append("")
    for entry in plan.entries:
        lines.append(f"    {entry.qualified_init_symbol}({entry.module_name});")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_file_list(plan: ScaffoldPlan) -> str:
    """Newline-separated list of generated sources, for build integration."""
    paths = [e.stub_path for e in plan.entries] + [plan.aggregator_path]
    return "\n".join(paths) + "\n"


@dataclass
class ScaffoldResult:
    created: list[str] = field(default_factory=list)
    updated: list[str] = field(default_factory=list)
    unchanged: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)  # existing non-empty stubs, no --force

    @property
    def change_count(self) -> int:
        return len(self.created) + len(self.updated)


def apply_scaffold(plan: ScaffoldPlan, bindings_root: Path, force: bool = False) -> ScaffoldResult:
    """Write the planned tree.  Idempotent: a second run over an unchanged
    tree changes nothing.  Stubs that already contain work (any content
    other than the empty backbone) are never overwritten without force."""
    result = ScaffoldResult()

    for entry in plan.entries:
        _write_stub(bindings_root / entry.stub_path, render_stub(entry), force, result)

    generated = [
        *((plan.registry_paths[m], render_registry(m, plan)) for m in plan.modules),
        (plan.aggregator_path, render_aggregator(plan)),
        (plan.file_list_path, render_file_list(plan)),
    ]
    for rel, text in generated:
        _write_generated(bindings_root / rel, text, result)
    return result


def _write_stub(path: Path, text: str, force: bool, result: ScaffoldResult) -> None:
    rel = str(path)
    if path.exists():
        existing = path.read_text(encoding="utf-8")
        if existing == text:
            result.unchanged.append(rel)
            return
        if not force:
            result.skipped.append(rel)
            return
        path.write_text(text, encoding="utf-8")
        result.updated.append(rel)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    result.created.append(rel)


def _write_generated(path: Path, text: str, result: ScaffoldResult) -> None:
    """Registry/aggregator/file-list are generator-owned: rewritten whenever
    the rendered content differs."""
    rel = str(path)
    if path.exists():
        if path.read_text(encoding="utf-8") == text:
            result.unchanged.append(rel)
            return
        path.write_text(text, encoding="utf-8")
        result.updated.append(rel)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    result.created.append(rel)
