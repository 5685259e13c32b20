import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from embedmatch import (
    Attribute,
    DataKind,
    GoldAlignment,
    ParseError,
    Schema,
    Table,
    ValidationError,
    classify_data_kind,
    load_alignment,
    load_instances,
    load_schema,
    save_schema,
)


def write_schema(tmp_path, doc, name="schema.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def two_table_doc():
    return {
        "schema": {
            "name": "geo",
            "tables": [
                {"name": "country", "attributes": [{"name": "name"}, {"name": "capital"}]},
                {"name": "city", "attributes": [{"name": "name"}, {"name": "population"}]},
            ],
        }
    }


class TestClassifyDataKind:
    def test_all_numeric(self):
        assert classify_data_kind(["12", "7.5", "300"]) is DataKind.NUMERIC

    def test_all_textual(self):
        assert classify_data_kind(["Paris", "Lima"]) is DataKind.TEXTUAL

    def test_half_numeric_is_mixed(self):
        # counting oracle: 2 of 4 non-empty values parse as numbers -> 50%
        values = ["12", "Paris", "7", "Lima"]
        numeric = sum(v.replace(".", "").isdigit() for v in values)
        assert numeric / len(values) == 0.5
        assert classify_data_kind(values) is DataKind.MIXED

    def test_empty_variants(self):
        assert classify_data_kind([]) is DataKind.EMPTY
        assert classify_data_kind(["", "  ", ""]) is DataKind.EMPTY

    def test_signs_and_decimal_points(self):
        assert classify_data_kind(["-3", "+4.25", ".5"]) is DataKind.NUMERIC

    def test_thousands_separator_rejected(self):
        assert classify_data_kind(["1,000", "2,000"]) is DataKind.TEXTUAL

    def test_boundary_ratios(self):
        nine_numbers = [str(i) for i in range(9)]
        assert classify_data_kind(nine_numbers + ["x"]) is DataKind.NUMERIC  # exactly 90%
        assert classify_data_kind(["1"] + ["x"] * 9) is DataKind.TEXTUAL  # exactly 10%

    def test_empty_cells_excluded_from_denominator(self):
        assert classify_data_kind(["12", "", "", "8"]) is DataKind.NUMERIC

    @given(st.lists(st.text(max_size=8), max_size=30), st.randoms())
    def test_permutation_invariant(self, values, rng):
        shuffled = list(values)
        rng.shuffle(shuffled)
        assert classify_data_kind(values) == classify_data_kind(shuffled)


class TestLoadSchema:
    def test_structural_echo(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, two_table_doc()))
        assert schema.name == "geo"
        assert schema.table_names == ["country", "city"]
        assert schema.table("country").attribute_names == ["name", "capital"]
        assert all(a.instances == () for t in schema.tables for a in t.attributes)
        assert all(a.data_kind is DataKind.EMPTY for t in schema.tables for a in t.attributes)

    def test_duplicate_table_name_rejected(self, tmp_path):
        doc = two_table_doc()
        doc["schema"]["tables"][1]["name"] = "country"
        with pytest.raises(ValidationError, match="duplicate table"):
            load_schema(write_schema(tmp_path, doc))

    def test_duplicate_attribute_name_rejected(self, tmp_path):
        doc = two_table_doc()
        doc["schema"]["tables"][0]["attributes"].append({"name": "name"})
        with pytest.raises(ValidationError, match="duplicate attribute"):
            load_schema(write_schema(tmp_path, doc))

    def test_empty_table_list_is_valid(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, {"schema": {"name": "bare", "tables": []}}))
        assert schema.tables == ()

    def test_malformed_json_names_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"schema": {\n  "name": zzz\n}}', encoding="utf-8")
        with pytest.raises(ParseError, match="line 2"):
            load_schema(path)

    def test_missing_field_named(self, tmp_path):
        with pytest.raises(ParseError, match="'name'"):
            load_schema(write_schema(tmp_path, {"schema": {"tables": []}}))

    def test_comments_preserved(self, tmp_path):
        doc = two_table_doc()
        doc["schema"]["tables"][0]["comment"] = "states of the world"
        doc["schema"]["tables"][0]["attributes"][0]["comment"] = "official name"
        schema = load_schema(write_schema(tmp_path, doc))
        assert schema.table("country").comment == "states of the world"
        assert schema.table("country").attribute("name").comment == "official name"

    def test_round_trip(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, two_table_doc()))
        save_schema(schema, tmp_path / "copy.json")
        assert load_schema(tmp_path / "copy.json") == schema


class TestLoadInstances:
    def test_column_read(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, two_table_doc()))
        (tmp_path / "country.csv").write_text(
            "name,capital\nFrance,Paris\nPeru,Lima\n", encoding="utf-8"
        )
        filled = load_instances(schema, {"country": tmp_path / "country.csv"})
        country = filled.table("country")
        assert country.attribute("name").instances == ("France", "Peru")
        assert country.attribute("capital").instances == ("Paris", "Lima")
        assert country.attribute("name").data_kind is DataKind.TEXTUAL

    def test_unknown_attribute_in_header(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, two_table_doc()))
        (tmp_path / "country.csv").write_text("name,area\nFrance,640000\n", encoding="utf-8")
        with pytest.raises(ValidationError, match="area"):
            load_instances(schema, {"country": tmp_path / "country.csv"})

    def test_row_arity_mismatch_names_row(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, two_table_doc()))
        (tmp_path / "country.csv").write_text(
            "name,capital\nFrance,Paris\nPeru\n", encoding="utf-8"
        )
        with pytest.raises(ParseError, match="row 3"):
            load_instances(schema, {"country": tmp_path / "country.csv"})

    def test_header_only_gives_empty_kind(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, two_table_doc()))
        (tmp_path / "country.csv").write_text("name,capital\n", encoding="utf-8")
        filled = load_instances(schema, {"country": tmp_path / "country.csv"})
        attr = filled.table("country").attribute("name")
        assert attr.instances == ()
        assert attr.data_kind is DataKind.EMPTY

    def test_empty_cells_kept_as_empty_strings(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, two_table_doc()))
        (tmp_path / "country.csv").write_text(
            "name,capital\nFrance,\nPeru,Lima\n", encoding="utf-8"
        )
        filled = load_instances(schema, {"country": tmp_path / "country.csv"})
        assert filled.table("country").attribute("capital").instances == ("", "Lima")

    def test_unknown_table_in_mapping(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, two_table_doc()))
        with pytest.raises(ValidationError, match="unknown table"):
            load_instances(schema, {"nope": tmp_path / "x.csv"})

    def test_structure_untouched(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, two_table_doc()))
        (tmp_path / "country.csv").write_text("name\nFrance\n", encoding="utf-8")
        filled = load_instances(schema, {"country": tmp_path / "country.csv"})
        assert filled.name == schema.name
        assert filled.table_names == schema.table_names
        for before, after in zip(schema.tables, filled.tables):
            assert before.attribute_names == after.attribute_names
            assert before.comment == after.comment

    def test_quoted_fields_rfc4180(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, two_table_doc()))
        (tmp_path / "country.csv").write_text(
            'name,capital\n"Bosnia, Herzegovina",Sarajevo\n', encoding="utf-8"
        )
        filled = load_instances(schema, {"country": tmp_path / "country.csv"})
        assert filled.table("country").attribute("name").instances == ("Bosnia, Herzegovina",)


class TestGoldAlignment:
    def test_load_table_pair(self, tmp_path):
        path = tmp_path / "gold.json"
        path.write_text(json.dumps({"table_pairs": [["country", "land"]]}), encoding="utf-8")
        gold = load_alignment(path)
        assert gold.table_pairs == {("country", "land")}
        assert gold.attribute_pairs == frozenset()

    def test_duplicates_collapse(self, tmp_path):
        path = tmp_path / "gold.json"
        path.write_text(
            json.dumps({"table_pairs": [["a", "b"], ["a", "b"]]}), encoding="utf-8"
        )
        assert len(load_alignment(path).table_pairs) == 1

    def test_validation_against_schemas(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, two_table_doc()))
        gold = GoldAlignment(
            attribute_pairs=frozenset({(("ghost", "name"), ("country", "name"))})
        )
        with pytest.raises(ValidationError, match="ghost"):
            gold.validate_against(schema, schema)

    def test_malformed_pair(self, tmp_path):
        path = tmp_path / "gold.json"
        path.write_text(json.dumps({"table_pairs": [["only-one"]]}), encoding="utf-8")
        with pytest.raises(ParseError):
            load_alignment(path)


class TestInvariants:
    def test_attribute_kind_consistency_enforced(self):
        with pytest.raises(ValidationError, match="data_kind"):
            Attribute(name="x", instances=("a", "b"), data_kind=DataKind.NUMERIC)

    def test_schema_types_hashable_structures(self):
        table = Table(name="t", attributes=(Attribute(name="a"),))
        schema = Schema(name="s", tables=(table,))
        assert schema.table("t").attribute("a").name == "a"
