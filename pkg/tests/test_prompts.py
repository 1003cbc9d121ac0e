import json

import pytest

from bindforge.classify import build_report
from bindforge.manifest import Manifest
from bindforge.prompts import (
    PENDING_REVIEW_MARKER,
    ExampleLibrary,
    MissingTrampolineExample,
    PromptPackage,
    UnknownTemplate,
    build_packages,
    class_excerpt,
    ingest_response,
    load_package_dir,
    pending_review_files,
    render_prompt,
    write_package_dir,
)
from bindforge.scaffold import plan_scaffold, render_stub

from conftest import parse_snippet


def _report_for(unit, extensible=()):
    manifest = Manifest(
        library_name="ompl", modules=("base",), extensible_classes=tuple(extensible)
    )
    return build_report([unit], manifest)


# --- example library -----------------------------------------------------------


def test_example_library_loads_pairs(manifest):
    lib = ExampleLibrary.load(manifest.examples_dir)
    refs = lib.for_pattern("polymorphic")
    assert [r.name for r in refs] == ["StateValidityChecker"]
    (ref,) = refs
    assert ref.header_path.endswith("StateValidityChecker.h")
    assert ref.binding_path.endswith("StateValidityChecker.cpp")


def test_example_library_requires_both_files(tmp_path):
    d = tmp_path / "direct"
    d.mkdir()
    (d / "Lonely.h").write_text("class Lonely {};\n", encoding="utf-8")
    lib = ExampleLibrary.load(tmp_path)
    assert lib.for_pattern("direct") == ()


def test_example_library_tolerates_missing_root(tmp_path):
    assert ExampleLibrary.load(None).examples == {}
    assert ExampleLibrary.load(tmp_path / "absent").examples == {}


# --- excerpts ------------------------------------------------------------------


def test_class_excerpt_contains_only_target_class():
    unit = parse_snippet(
        """
        class First
        {
        public:
            void alpha();
        };

        class Second
        {
        public:
            void beta();
        };

        typedef std::shared_ptr<First> FirstPtr;
        """
    )
    text = class_excerpt(unit, unit.classes[0])
    assert "class First" in text
    assert "alpha" in text
    assert "class Second" not in text
    assert "beta" not in text
    assert "namespace ompl" in text and "namespace base" in text
    assert "FirstPtr" in text  # handle aliases travel with the excerpt


def test_class_excerpt_keeps_own_enums_only():
    unit = parse_snippet(
        """
        class A
        {
        public:
            enum Kind
            {
                ONE,
            };
        };

        class B
        {
        public:
            enum Sort
            {
                TWO,
            };
        };
        """
    )
    text = class_excerpt(unit, unit.classes[0])
    assert "Kind" in text and "ONE" in text
    assert "Sort" not in text and "TWO" not in text


# --- package building -----------------------------------------------------------


DIRECT_CLASS = """
class Widget
{
public:
    void run();

    void fill(std::vector<double> &out) const;
};
"""


def _stub_for(path="ompl/base/Snippet.h"):
    plan = plan_scaffold([path], Manifest(library_name="ompl", modules=("base",)))
    return render_stub(plan.entries[0])


def test_build_direct_package():
    unit = parse_snippet(DIRECT_CLASS)
    report = _report_for(unit)
    (pkg,) = build_packages(unit, report, _stub_for(), ExampleLibrary(), output_path="base/Snippet.cpp")
    assert pkg.target_class == "ompl::base::Widget"
    assert pkg.pattern_kind == "direct"
    assert pkg.template_id == "binding-request-v1"
    assert pkg.scaffold_text.startswith("#include <nanobind/nanobind.h>")
    assert pkg.do_not_bind == (
        ("fill(std::vector<double> &) const", "mutable reference to composite type"),
    )
    assert pkg.in_context_examples == ()


def test_build_callback_package_kind():
    unit = parse_snippet(
        "class W\n{\npublic:\n    void onEvent(const std::function<void()> &cb);\n};"
    )
    (pkg,) = build_packages(unit, _report_for(unit), "stub", ExampleLibrary())
    assert pkg.pattern_kind == "callback"


def test_polymorphic_package_requires_trampoline_example():
    unit = parse_snippet("class P\n{\npublic:\n    virtual void go();\n};")
    report = _report_for(unit, extensible=["ompl::base::P"])
    with pytest.raises(MissingTrampolineExample, match="ompl::base::P"):
        build_packages(unit, report, "stub", ExampleLibrary())


def test_polymorphic_package_embeds_example(manifest):
    unit = parse_snippet("class P\n{\npublic:\n    virtual void go();\n};")
    report = _report_for(unit, extensible=["ompl::base::P"])
    lib = ExampleLibrary.load(manifest.examples_dir)
    (pkg,) = build_packages(unit, report, "stub", lib)
    assert pkg.pattern_kind == "polymorphic"
    assert [e.name for e in pkg.in_context_examples] == ["StateValidityChecker"]


def test_unsupported_class_skipped():
    # Overloaded virtuals in an extensible class make the class Unsupported.
    unit = parse_snippet(
        "class V\n{\npublic:\n    virtual void go();\n    virtual void go(double s);\n};"
    )
    report = _report_for(unit, extensible=["ompl::base::V"])
    assert build_packages(unit, report, "stub", ExampleLibrary()) == []


# --- rendering -------------------------------------------------------------------


def test_render_prompt_fills_placeholders(manifest):
    unit = parse_snippet("class P\n{\npublic:\n    virtual void go();\n};")
    report = _report_for(unit, extensible=["ompl::base::P"])
    lib = ExampleLibrary.load(manifest.examples_dir)
    (pkg,) = build_packages(unit, report, _stub_for(), lib, output_path="base/Snippet.cpp")
    text = render_prompt(pkg)
    assert "ompl::base::P" in text
    assert "polymorphic" in text
    assert "class P" in text  # header excerpt
    assert "init_Snippet" in text  # scaffold stub
    assert "NB_TRAMPOLINE" in text  # embedded example binding
    assert "$" not in text  # every placeholder substituted


def test_render_prompt_lists_do_not_bind():
    unit = parse_snippet(DIRECT_CLASS)
    (pkg,) = build_packages(unit, _report_for(unit), "stub", ExampleLibrary())
    text = render_prompt(pkg)
    assert "- fill(std::vector<double> &) const: mutable reference to composite type" in text


def test_render_prompt_without_omissions_says_so():
    unit = parse_snippet("class C\n{\npublic:\n    void go();\n};")
    (pkg,) = build_packages(unit, _report_for(unit), "stub", ExampleLibrary())
    assert "(nothing; all declarations are bindable)" in render_prompt(pkg)


def test_render_prompt_deterministic(manifest):
    unit = parse_snippet("class P\n{\npublic:\n    virtual void go();\n};")
    report = _report_for(unit, extensible=["ompl::base::P"])
    lib = ExampleLibrary.load(manifest.examples_dir)
    (pkg,) = build_packages(unit, report, "stub", lib)
    assert render_prompt(pkg) == render_prompt(pkg)


def test_unknown_template_id():
    unit = parse_snippet("class C\n{\npublic:\n    void go();\n};")
    (pkg,) = build_packages(
        unit, _report_for(unit), "stub", ExampleLibrary(), template_id="no-such-template"
    )
    with pytest.raises(UnknownTemplate):
        render_prompt(pkg)


def test_custom_templates_dir(tmp_path):
    (tmp_path / "binding-request-v1.txt").write_text(
        "Target: $target_class ($pattern_kind)\n$do_not_bind\n$header_excerpt\n"
        "$scaffold_text\n$examples_section\n",
        encoding="utf-8",
    )
    unit = parse_snippet("class C\n{\npublic:\n    void go();\n};")
    (pkg,) = build_packages(unit, _report_for(unit), "stub", ExampleLibrary())
    text = render_prompt(pkg, templates_dir=tmp_path)
    assert text.startswith("Target: ompl::base::C (direct)")
    with pytest.raises(UnknownTemplate):
        render_prompt(pkg, templates_dir=tmp_path / "empty")


# --- package round trip --------------------------------------------------------------


def test_write_and_load_package_dir(tmp_path):
    unit = parse_snippet(DIRECT_CLASS)
    (pkg,) = build_packages(
        unit, _report_for(unit), _stub_for(), ExampleLibrary(), output_path="base/Snippet.cpp"
    )
    d = write_package_dir(pkg, tmp_path / "Widget")
    assert (d / "prompt.txt").is_file()
    assert (d / "package.json").is_file()
    assert load_package_dir(d) == pkg
    # metadata is valid sorted JSON
    data = json.loads((d / "package.json").read_text(encoding="utf-8"))
    assert list(data) == sorted(data)


# --- ingestion gate --------------------------------------------------------------------


CLEAN_RESPONSE = """\
#include <nanobind/nanobind.h>
#include "ompl/base/Snippet.h"
#include "init.hh"

namespace nb = nanobind;

void ompl::binding::base::init_Snippet(nb::module_ &m)
{
    nb::class_<ob::Widget>(m, "Widget")
        .def("run", &ob::Widget::run);
}
"""

BAD_RESPONSE = """\
#include <nanobind/make_shared.h>

void init(nb::module_ &m)
{
    nb::class_<ob::Widget, std::shared_ptr<ob::Widget>>(m, "Widget")
        .def("fill", &ob::Widget::fill);
}
"""


def _package(tmp_path):
    unit = parse_snippet(DIRECT_CLASS)
    (pkg,) = build_packages(
        unit,
        _report_for(unit),
        "stub",
        ExampleLibrary(),
        output_path=str(tmp_path / "bindings/base/Snippet.cpp"),
    )
    return pkg, unit


def test_ingest_accepts_clean_response(tmp_path):
    pkg, unit = _package(tmp_path)
    outcome = ingest_response(pkg, CLEAN_RESPONSE, unit)
    assert outcome.accepted
    assert outcome.diagnostics == []
    written = tmp_path / "bindings/base/Snippet.cpp"
    assert outcome.written_path == str(written)
    lines = written.read_text(encoding="utf-8").splitlines()
    assert lines[0] == PENDING_REVIEW_MARKER
    assert lines[1] == "#include <nanobind/nanobind.h>"


def test_ingest_rejects_and_reports_all_rules(tmp_path):
    pkg, unit = _package(tmp_path)
    outcome = ingest_response(pkg, BAD_RESPONSE, unit)
    assert not outcome.accepted
    assert outcome.written_path is None
    rules = {d.rule_id for d in outcome.diagnostics}
    assert {"R1", "R2", "R8"} <= rules
    assert not (tmp_path / "bindings/base/Snippet.cpp").exists()


def test_ingest_accepts_with_warnings(tmp_path):
    # Warning-severity diagnostics do not block the gate.
    pkg, unit = _package(tmp_path)
    warned = CLEAN_RESPONSE.replace(
        '.def("run", &ob::Widget::run);',
        '.def("run", nb::overload_cast<>(&ob::Widget::run));',
    )
    outcome = ingest_response(pkg, warned, unit)
    assert outcome.accepted
    assert [d.rule_id for d in outcome.diagnostics] == ["R3"]


def test_ingest_severity_override_blocks(tmp_path):
    pkg, unit = _package(tmp_path)
    warned = CLEAN_RESPONSE.replace(
        '.def("run", &ob::Widget::run);',
        '.def("run", nb::overload_cast<>(&ob::Widget::run));',
    )
    outcome = ingest_response(pkg, warned, unit, severity_overrides={"R3": "error"})
    assert not outcome.accepted


def test_ingest_appends_trailing_newline(tmp_path):
    pkg, unit = _package(tmp_path)
    outcome = ingest_response(pkg, CLEAN_RESPONSE.rstrip("\n"), unit)
    assert outcome.accepted
    text = (tmp_path / "bindings/base/Snippet.cpp").read_text(encoding="utf-8")
    assert text.endswith("}\n")


# --- pending review tracking --------------------------------------------------------------


def test_pending_review_files(tmp_path):
    root = tmp_path / "bindings"
    (root / "base").mkdir(parents=True)
    (root / "base/A.cpp").write_text(
        f"{PENDING_REVIEW_MARKER}\n// body\n", encoding="utf-8"
    )
    (root / "base/B.cpp").write_text("// reviewed already\n", encoding="utf-8")
    (root / "base/C.cpp").write_text("", encoding="utf-8")
    assert pending_review_files(root) == ["base/A.cpp"]
    assert pending_review_files(tmp_path / "absent") == []


def test_marker_survives_ingest_then_clears_on_review(tmp_path):
    pkg, unit = _package(tmp_path)
    ingest_response(pkg, CLEAN_RESPONSE, unit)
    root = tmp_path / "bindings"
    assert pending_review_files(root) == ["base/Snippet.cpp"]
    # Human review = deleting the marker line.
    f = root / "base/Snippet.cpp"
    f.write_text("\n".join(f.read_text(encoding="utf-8").splitlines()[1:]) + "\n", encoding="utf-8")
    assert pending_review_files(root) == []
