import shutil
from pathlib import Path

import pytest

from bindforge.classify import build_report
from bindforge.header_parser import parse_header
from bindforge.manifest import load_manifest
from bindforge.scaffold import plan_scaffold

FIXTURES = Path(__file__).parent / "fixtures"
GOLDENS = Path(__file__).parent / "goldens"
WORKSPACE_SRC = FIXTURES / "workspace"
LINT_FIXTURES = FIXTURES / "lint"


@pytest.fixture()
def workspace(tmp_path):
    """A writable copy of the fixture workspace; returns its root."""
    dest = tmp_path / "workspace"
    shutil.copytree(WORKSPACE_SRC, dest)
    return dest


@pytest.fixture(scope="session")
def goldens_dir():
    return GOLDENS


@pytest.fixture(scope="session")
def manifest():
    """Read-only manifest over the in-repo fixture tree.  Tests that write
    must use the `workspace` copy instead."""
    return load_manifest(WORKSPACE_SRC / "bindforge.yaml")


def _discover(manifest):
    base = manifest.library_root / manifest.library_name
    found = [
        p.relative_to(manifest.library_root).as_posix()
        for p in base.rglob("*")
        if p.suffix in (".h", ".hh", ".hpp") and p.is_file()
    ]
    return sorted(found)


@pytest.fixture(scope="session")
def headers(manifest):
    return _discover(manifest)


@pytest.fixture(scope="session")
def units(manifest, headers):
    return [
        parse_header(
            (manifest.library_root / rel).read_text(),
            rel,
            handle_suffix=manifest.handle_alias_suffix,
        )
        for rel in headers
    ]


@pytest.fixture(scope="session")
def report(units, manifest):
    return build_report(units, manifest)


@pytest.fixture(scope="session")
def plan(headers, manifest):
    return plan_scaffold(headers, manifest)


def parse_snippet(text, path="ompl/base/Snippet.h", suffix="Ptr"):
    """Parse a bare declaration snippet wrapped in the standard namespaces."""
    wrapped = "namespace ompl\n{\n    namespace base\n    {\n"
    for line in text.strip().splitlines():
        wrapped += f"        {line}\n"
    wrapped += "    }\n}\n"
    return parse_header(wrapped, path, handle_suffix=suffix)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion (tests named test_A<n>_*)."""
    outcomes: dict[str, tuple[str, bool]] = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_A" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            parts = name.split("_")
            cid, desc = parts[1], " ".join(parts[2:])
            ok = key == "passed" and outcomes.get(cid, (desc, True))[1]
            outcomes[cid] = (desc, ok)
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for cid in sorted(outcomes):
        desc, ok = outcomes[cid]
        terminalreporter.write_line(f"[{cid}] {desc}: {'PASS' if ok else 'FAIL'}")
