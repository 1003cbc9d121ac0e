"""Workspace manifest: the one human-editable document encoding maintainer
preferences (tree layout, module set, extensible classes, naming aliases,
lint severity overrides).  Everything configurable lives here; nothing is
inferred from the library itself."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

DEFAULT_MANIFEST_NAME = "bindforge.yaml"


class ManifestError(Exception):
    """The manifest is missing, malformed, or fails validation."""


@dataclass(frozen=True)
class AliasEntry:
    """Extra exposed names for one method, plus the stream-method variant."""

    aliases: tuple[str, ...] = ()
    stream_variant: str | None = None  # to-console | to-string | both

    def __post_init__(self) -> None:
        if self.stream_variant not in (None, "to-console", "to-string", "both"):
            raise ManifestError(f"unknown stream variant: {self.stream_variant!r}")
        if len(set(self.aliases)) != len(self.aliases):
            raise ManifestError(f"duplicate alias names: {self.aliases}")


@dataclass(frozen=True)
class AliasMap:
    """(qualified class name, method name) -> AliasEntry."""

    entries: dict[tuple[str, str], AliasEntry] = field(default_factory=dict)

    def lookup(self, qualified_class: str, method_name: str) -> AliasEntry | None:
        return self.entries.get((qualified_class, method_name))


@dataclass(frozen=True)
class Manifest:
    library_name: str = "lib"
    library_root: Path = Path(".")
    bindings_root: Path = Path("bindings")
    modules: tuple[str, ...] = ()
    exclusions: tuple[str, ...] = ()
    extensible_classes: tuple[str, ...] = ()
    handle_alias_suffix: str = "Ptr"
    extension_module: str = ""
    aggregator_filename: str = "python.cpp"
    registry_filename: str = "init.hh"
    stub_extension: str = ".cpp"
    alias_map: AliasMap = field(default_factory=AliasMap)
    templates_dir: Path | None = None
    examples_dir: Path | None = None
    external_command: str | None = None
    lint_severity: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.modules:
            raise ManifestError("manifest must name at least one module")
        if not self.extension_module:
            object.__setattr__(self, "extension_module", f"_{self.library_name}")

    @property
    def binding_namespace_root(self) -> str:
        return f"{self.library_name}::binding"

    def module_namespace(self, module: str) -> str:
        return f"{self.binding_namespace_root}::{module}"


_PATH_KEYS = {"library_root", "bindings_root", "templates_dir", "examples_dir"}

_KNOWN_KEYS = {
    "library_name", "library_root", "bindings_root", "modules", "exclusions",
    "extensible_classes", "handle_alias_suffix", "extension_module",
    "aggregator_filename", "registry_filename", "stub_extension", "alias_map",
    "templates_dir", "examples_dir", "external_command", "lint_severity",
}


def load_manifest(path: str | Path) -> Manifest:
    """Load and validate a YAML manifest.  Relative paths resolve against the
    manifest file's own directory."""
    p = Path(path)
    if not p.is_file():
        raise ManifestError(f"manifest not found: {p}")
    try:
        raw = yaml.safe_load(p.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ManifestError(f"manifest is not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ManifestError("manifest root must be a mapping")
    unknown = sorted(set(raw) - _KNOWN_KEYS)
    if unknown:
        raise ManifestError(f"unknown manifest keys: {', '.join(unknown)}")

    base = p.parent
    kwargs: dict = {}
    for key, value in raw.items():
        if key in _PATH_KEYS:
            if value is None:
                continue
            resolved = (base / value).resolve() if not Path(value).is_absolute() else Path(value)
            kwargs[key] = resolved
        elif key == "alias_map":
            kwargs[key] = _parse_alias_map(value)
        elif key in ("modules", "exclusions", "extensible_classes"):
            kwargs[key] = _parse_str_list(key, value)
        elif key == "lint_severity":
            kwargs[key] = _parse_lint_severity(value)
        else:
            kwargs[key] = value

    try:
        manifest = Manifest(**kwargs)
    except TypeError as exc:
        raise ManifestError(f"bad manifest value: {exc}") from exc

    if not manifest.library_root.is_dir():
        raise ManifestError(f"library_root does not resolve to a directory: {manifest.library_root}")
    for key in ("templates_dir", "examples_dir"):
        value = getattr(manifest, key)
        if value is not None and not value.is_dir():
            raise ManifestError(f"{key} does not resolve to a directory: {value}")
    return manifest


def _parse_str_list(key: str, value: object) -> tuple[str, ...]:
    if value is None:
        return ()
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ManifestError(f"{key} must be a list of strings")
    return tuple(value)


def _parse_lint_severity(value: object) -> dict[str, str]:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ManifestError("lint_severity must map rule ids to severities")
    out: dict[str, str] = {}
    for rule, sev in value.items():
        if sev not in ("error", "warning"):
            raise ManifestError(f"lint_severity[{rule}] must be 'error' or 'warning'")
        out[str(rule)] = sev
    return out


def _parse_alias_map(value: object) -> AliasMap:
    """Manifest shape::

        alias_map:
          "ompl::base::SpaceInformation":
            printSettings: {aliases: [settings], stream: both}
    """
    if value is None:
        return AliasMap()
    if not isinstance(value, dict):
        raise ManifestError("alias_map must be a mapping of class names")
    entries: dict[tuple[str, str], AliasEntry] = {}
    for cls, methods in value.items():
        if not isinstance(methods, dict):
            raise ManifestError(f"alias_map[{cls}] must map method names to entries")
        for method, spec in methods.items():
            if spec is None:
                spec = {}
            if isinstance(spec, list):
                spec = {"aliases": spec}
            if not isinstance(spec, dict):
                raise ManifestError(f"alias_map[{cls}][{method}] must be a mapping or list")
            aliases = _parse_str_list("aliases", spec.get("aliases"))
            entries[(str(cls), str(method))] = AliasEntry(
                aliases=aliases,
                stream_variant=spec.get("stream"),
            )
    return AliasMap(entries)
