import json

import pytest

from bindforge.ir import (
    CATEGORY_VALUE,
    DeclarationUnit,
    MethodDecl,
    ParamDecl,
    TypeRef,
    units_from_json_dict,
    units_to_json_dict,
)
from bindforge.header_parser import classify_type

from conftest import parse_snippet


def test_type_ref_rejects_unknown_category():
    with pytest.raises(ValueError, match="unknown type category"):
        TypeRef("double", "number")


def test_mentions_category_recurses_into_template_args():
    ref = classify_type("const std::vector<StateSpacePtr> &")
    assert ref.mentions_category("shared-handle")
    assert not ref.mentions_category("callable")


def test_method_signature_distinguishes_const_overloads():
    p = ParamDecl(name="x", type=TypeRef("double", CATEGORY_VALUE))
    plain = MethodDecl(name="at", params=(p,))
    const = MethodDecl(name="at", params=(p,), qualifiers=frozenset({"const"}))
    assert plain.signature == "at(double)"
    assert const.signature == "at(double) const"
    assert plain.signature != const.signature


def test_unit_rejects_duplicate_class_names():
    c = parse_snippet("class A\n{\n};").classes[0]
    with pytest.raises(ValueError, match="duplicate class name"):
        DeclarationUnit(source_path="x.h", classes=(c, c))


def test_all_methods_covers_every_declaration():
    unit = parse_snippet(
        """
        class A
        {
        public:
            A();

            void go();
        };

        void helper();
        """
    )
    entries = list(unit.all_methods())
    assert [(c.name if c else None, m.name) for c, m in entries] == [
        ("A", "A"),
        ("A", "go"),
        (None, "helper"),
    ]


def test_json_round_trip_preserves_units(units):
    data = units_to_json_dict(units)
    # through an actual serialization boundary
    loaded = units_from_json_dict(json.loads(json.dumps(data)))
    assert loaded == list(units)


def test_units_from_json_accepts_all_shapes(units):
    unit_dicts = [u.to_dict() for u in units]
    as_wrapper = units_from_json_dict({"units": unit_dicts})
    as_list = units_from_json_dict(unit_dicts)
    as_single = units_from_json_dict(unit_dicts[0])
    assert as_wrapper == list(units)
    assert as_list == list(units)
    assert as_single == [units[0]]
    with pytest.raises(ValueError, match="unrecognized IR JSON shape"):
        units_from_json_dict(42)


def test_derived_fields_recomputed_on_load():
    unit = parse_snippet(
        "class P\n{\npublic:\n    virtual void go() = 0;\n    void stop();\n};"
    )
    (loaded,) = units_from_json_dict(unit.to_dict())
    (c,) = loaded.classes
    assert [m.name for m in c.virtual_methods] == ["go"]
    assert c.is_abstract
