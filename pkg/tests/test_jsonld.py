import json
import logging
import random

import pytest
from pyld import jsonld as pyld

from conftest import DA_URL, GC_URL, GOLDEN
from dtforge.errors import ContextCollision, CyclicInstance, IoError
from dtforge.identifier import parse_schema_identifier
from dtforge.instance import Instance, Uri, table_from_rows
from dtforge.jsonld import JsonLdDocument, build_document, read_document, serialize_table, to_jsonld, write_document
from dtforge.schema_model import FieldDescriptor, SchemaBundle, SchemaDef, Target
from treegen import count_edges, count_nodes, field_names, random_instance


def expand(doc):
    return pyld.expand(json.loads(doc) if isinstance(doc, str) else doc)


def count_expanded_nodes(x):
    n = 0
    if isinstance(x, dict):
        if not {"@value", "@list", "@set"} & set(x) and set(x) != {"@id"}:
            n += 1
        for v in x.values():
            n += count_expanded_nodes(v)
    elif isinstance(x, list):
        for v in x:
            n += count_expanded_nodes(v)
    return n


def iter_nodes(x):
    if isinstance(x, dict):
        if "@type" in x:
            yield x
        for v in x.values():
            yield from iter_nodes(v)
    elif isinstance(x, list):
        for v in x:
            yield from iter_nodes(v)


def body_keys(x, acc=None):
    acc = set() if acc is None else acc
    if isinstance(x, dict):
        for k, v in x.items():
            if k == "@context":
                continue
            if not k.startswith("@"):
                acc.add(k)
            body_keys(v, acc)
    elif isinstance(x, list):
        for v in x:
            body_keys(v, acc)
    return acc


def test_empty_instance(gc_bundle):
    assert json.loads(to_jsonld(gc_bundle.group_comparison())) == {"@context": {}, "@type": GC_URL}
    assert to_jsonld(gc_bundle.group_comparison()) == f'{{\n  "@context": {{}},\n  "@type": "{GC_URL}"\n}}\n'


def test_use_case_types(iris_analysis):
    doc = json.loads(to_jsonld(iris_analysis))
    assert doc["@type"] == DA_URL
    assert [p["@type"] for p in doc["has_part"]] == [GC_URL]


def test_matches_golden(iris_analysis):
    assert to_jsonld(iris_analysis) == GOLDEN.read_text(encoding="utf-8")


def test_key_order(iris_analysis):
    doc = json.loads(to_jsonld(iris_analysis))
    for node in iter_nodes(doc):
        keys = list(node)
        if keys[0] == "@context":
            keys = keys[1:]
        assert keys[0] == "@type"
        assert keys[1:] == sorted(keys[1:])
    assert list(doc["@context"]) == sorted(doc["@context"])


def test_context_closure(iris_analysis):
    doc = json.loads(to_jsonld(iris_analysis))
    assert body_keys(doc) == set(doc["@context"])


def test_expansion_oracle_use_case(iris_analysis):
    expanded = expand(to_jsonld(iris_analysis))
    # 8 instances + 1 table + 3 columns + 3 cells
    assert count_expanded_nodes(expanded) == 15
    quads = [q for q in pyld.to_rdf(json.loads(to_jsonld(iris_analysis)), {"format": "application/n-quads"}).splitlines() if q]
    # 37 property edges + 15 rdf:type
    assert len(quads) == 52


def test_serialize_table_shapes(gc_bundle):
    table_schema = gc_bundle["table"]
    node = serialize_table(table_from_rows(["t", "df", "p"], [[1.0, 2, 0.5]]), table_schema, gc_bundle)
    assert node["@type"] == table_schema.id.canonical_url
    assert [c["name"] for c in node["columns"]] == ["t", "df", "p"]
    assert [c["index"] for c in node["columns"]] == [0, 1, 2]
    assert len(node["rows"]) == 1 and len(node["rows"][0]) == 3
    assert [c["column"] for c in node["rows"][0]] == ["t", "df", "p"]

    empty = serialize_table(table_from_rows([], []), table_schema, gc_bundle)
    assert empty["columns"] == [] and empty["rows"] == []


def test_null_cell_keeps_its_node(gc_bundle):
    item = gc_bundle.data_item(source_table=table_from_rows(["a", "b"], [[1, None], [None, "x"]]))
    doc = json.loads(to_jsonld(item))
    cells = [c for row in doc["source_table"]["rows"] for c in row]
    assert len(cells) == 4
    assert [c["value"] for c in cells] == [1, None, None, "x"]
    # data_item + table + 2 columns + 4 cells; nulls must not drop cell nodes
    assert count_expanded_nodes(expand(doc)) == 8


def test_uri_values(gc_bundle):
    doc = json.loads(to_jsonld(gc_bundle.data_item(source_url=Uri("https://example.org/iris.csv"))))
    assert doc["source_url"] == {"@id": "https://example.org/iris.csv"}
    expanded = expand(doc)
    prop = doc["@context"]["source_url"]
    assert expanded[0][prop] == [{"@id": "https://example.org/iris.csv"}]


def test_non_finite_numbers(gc_bundle):
    t = table_from_rows(["x", "y", "z"], [[float("nan"), float("inf"), float("-inf")]])
    doc = json.loads(to_jsonld(gc_bundle.data_item(label=float("inf"), source_table=t)))
    assert doc["label"] == "Inf"
    assert [c["value"] for c in doc["source_table"]["rows"][0]] == ["NaN", "Inf", "-Inf"]


def test_type_fidelity(gc_bundle):
    doc = json.loads(to_jsonld(gc_bundle.software(label="R", version_info=4.3, has_support_url=True)))
    assert doc["label"] == "R" and doc["version_info"] == 4.3 and doc["has_support_url"] is True
    assert type(json.loads(to_jsonld(gc_bundle.software(version_info=4)))["version_info"]) is int


def _bundle_with(*defs):
    return SchemaBundle(defs[0].id, {d.constructor_name: d for d in defs})


def test_context_collision():
    a_id = parse_schema_identifier("https://doi.org/21.T1/a")
    b_id = parse_schema_identifier("https://doi.org/21.T1/b")
    b = SchemaDef(b_id, "b", "b", (FieldDescriptor("label", Target.scalar(), "urn:other:label"),))
    a = SchemaDef(a_id, "a", "a", (
        FieldDescriptor("label", Target.scalar(), "http://www.w3.org/2000/01/rdf-schema#label"),
        FieldDescriptor("child", Target.nested(b_id), "urn:x:child"),
    ))
    bundle = _bundle_with(a, b)
    inst = Instance(bundle, a, {"label": "x", "child": Instance(bundle, b, {"label": "y"})})
    with pytest.raises(ContextCollision) as info:
        to_jsonld(inst)
    assert set(info.value.uris) == {"urn:other:label", "http://www.w3.org/2000/01/rdf-schema#label"}


def test_missing_property_uri_is_synthesized(caplog):
    a_id = parse_schema_identifier("https://doi.org/21.T1/a")
    a = SchemaDef(a_id, "a", "a", (FieldDescriptor("note", Target.scalar()),))
    inst = Instance(_bundle_with(a), a, {"note": "x"})
    with caplog.at_level(logging.WARNING, logger="dtforge.jsonld"):
        doc = json.loads(to_jsonld(inst))
    assert doc["@context"] == {"note": "https://doi.org/21.T1/a#note"}
    assert "no property_uri" in caplog.text


def test_cycle_detected():
    a_id = parse_schema_identifier("https://doi.org/21.T1/a")
    a = SchemaDef(a_id, "a", "a", (FieldDescriptor("next", Target.nested(a_id), "urn:x:next"),))
    bundle = _bundle_with(a)
    inst = Instance(bundle, a)
    inst.next = inst
    with pytest.raises(CyclicInstance):
        to_jsonld(inst)


def test_shared_subtree_is_embedded_twice(gc_bundle):
    item = gc_bundle.data_item(label="shared")
    doc = json.loads(to_jsonld(gc_bundle.group_comparison(has_input=item, has_output=item)))
    assert doc["has_input"] == doc["has_output"]


def test_write_read_write_identical(tmp_path, iris_analysis):
    first, second = tmp_path / "a.jsonld", tmp_path / "b.jsonld"
    write_document(build_document(iris_analysis), first)
    write_document(read_document(first), second)
    assert first.read_bytes() == second.read_bytes()
    raw = first.read_bytes()
    assert raw.endswith(b"\n") and b"\r\n" not in raw
    assert raw.splitlines()[1].startswith(b'  "@context"')


def test_write_utf8(tmp_path, gc_bundle):
    path = tmp_path / "u.jsonld"
    write_document(build_document(gc_bundle.component(label="größe ✓")), path)
    assert "größe ✓".encode() in path.read_bytes()


def test_unwritable_path(tmp_path, gc_bundle):
    with pytest.raises(IoError):
        write_document(build_document(gc_bundle.component()), tmp_path / "missing" / "x.jsonld")
    with pytest.raises(IoError):
        read_document(tmp_path / "absent.jsonld")


def test_document_round_trip_dict():
    doc = JsonLdDocument.from_dict({"@context": {"b": "urn:b", "a": "urn:a"}, "@type": "urn:t", "a": 1})
    assert list(doc.as_dict()["@context"]) == ["a", "b"]
    assert str(doc) == doc.text()


@pytest.mark.parametrize("seed", range(40))
def test_random_trees_structure(da_bundle, seed):
    inst = random_instance(random.Random(seed), da_bundle, "data_analysis")
    text = to_jsonld(inst)
    doc = json.loads(text)
    assert body_keys(doc) == set(doc["@context"]) == field_names(inst)
    assert sum(1 for _ in iter_nodes(doc)) == count_nodes(inst)
    expanded = expand(doc)
    assert count_expanded_nodes(expanded) == count_nodes(inst)


def count_expanded_edges(x):
    n = 0
    if isinstance(x, dict):
        for k, v in x.items():
            if k.startswith("@"):
                continue
            n += len(v)
            n += count_expanded_edges(v)
    elif isinstance(x, list):
        for v in x:
            n += count_expanded_edges(v)
    return n


@pytest.mark.parametrize("seed", range(40))
def test_random_trees_expand_without_loss(da_bundle, seed):
    inst = random_instance(random.Random(1000 + seed), da_bundle, "data_analysis")
    assert count_expanded_edges(expand(to_jsonld(inst))) == count_edges(inst)


@pytest.mark.parametrize("columns, rows", [([], []), (["a"], []), ([], [[], []]), (["a", "b"], [[1, None]])])
def test_small_tables_expand_without_loss(gc_bundle, columns, rows):
    item = gc_bundle.data_item(source_table=table_from_rows(columns, rows))
    doc = json.loads(to_jsonld(item))
    assert body_keys(doc) == set(doc["@context"])
    assert count_expanded_edges(expand(doc)) == count_edges(item)
