import csv
import dataclasses
import io
import json

import pytest

from testrisk.errors import ParseError, SchemaError, InvariantViolationError
from testrisk.matrix import default_scope_matrix, extend_scope_matrix
from testrisk.persistence import (
    load_history_csv,
    load_plan,
    parse_scope_csv,
    plan_to_jsonable,
    render_matrix,
    render_scope,
    save_plan,
)
from testrisk.planning import default_plan


class TestLoadPlan:
    def test_minimal_document_gets_standard_defaults(self):
        plan = load_plan(b'{"schema_version": 1, "prediction": {"method": "direct", "nominal": 800}}')
        assert [p.dre for p in plan.levels] == [0.10, 0.30, 0.60, 0.85, 0.95]
        assert plan.scope == default_scope_matrix()
        assert plan.prediction.nominal == 800
        assert plan.prediction.low == 650 and plan.prediction.high == 1400

    def test_empty_input_is_parse_error(self):
        with pytest.raises(ParseError):
            load_plan(b"")

    def test_broken_json_reports_position(self):
        with pytest.raises(ParseError) as exc:
            load_plan(b'{"schema_version": 1,\n  "prediction": }')
        assert "line" in exc.value.location

    def test_dre_one_is_invariant_violation(self):
        doc = plan_to_jsonable(default_plan())
        doc["levels"][3]["dre"] = 1.0
        with pytest.raises(InvariantViolationError, match="dre < 1"):
            load_plan(json.dumps(doc))

    def test_unknown_schema_version(self):
        with pytest.raises(SchemaError) as exc:
            load_plan(b'{"schema_version": 99, "prediction": {"nominal": 1}}')
        assert exc.value.location == "schema_version"

    def test_missing_prediction_names_field(self):
        with pytest.raises(SchemaError):
            load_plan(b'{"schema_version": 1}')

    def test_fp_method_from_loc(self):
        plan = load_plan(
            b'{"schema_version": 1, "prediction": {"method": "fp", "loc": 100000,'
            b' "loc_per_fp": 125, "defects_per_fp": 1.0}}'
        )
        assert plan.prediction.nominal == pytest.approx(800)

    def test_loc_density_method(self):
        plan = load_plan(
            b'{"schema_version": 1, "prediction": {"method": "loc_density",'
            b' "loc": 100000, "defects_per_kloc": 8.0}}'
        )
        assert plan.prediction.nominal == pytest.approx(800)


class TestSavePlan:
    def test_round_trip(self):
        plan = load_plan(save_plan(default_plan()))
        saved = save_plan(plan)
        assert load_plan(saved) == plan

    def test_two_saves_byte_identical(self):
        plan = default_plan()
        assert save_plan(plan) == save_plan(plan)

    def test_save_load_idempotent(self):
        plan = default_plan()
        once = save_plan(load_plan(save_plan(plan)))
        twice = save_plan(load_plan(once))
        assert once == twice

    def test_extended_scope_round_trips(self):
        plan = default_plan()
        scope = extend_scope_matrix(
            plan.scope,
            new_activity=("Security", ["No", "No", "Minimal", "Good", "Complete"]),
        )
        plan = dataclasses.replace(plan, scope=scope)
        reloaded = load_plan(save_plan(plan))
        assert reloaded.scope == scope

    def test_canonical_shape(self):
        text = save_plan(default_plan()).decode("utf-8")
        assert text.endswith("\n")
        assert list(json.loads(text)) == [
            "schema_version",
            "prediction",
            "levels",
            "scope_matrix",
            "selected_level",
            "options",
        ]


class TestHistoryCsv:
    def test_basic_parse(self):
        data = "release,phase,order,defects\nR1,system,1,60\nR1,field,2,40\n"
        histories = load_history_csv(data)
        assert len(histories) == 1
        assert [p.defects_found for p in histories[0].phases] == [60, 40]

    def test_header_only(self):
        assert load_history_csv("release,phase,order,defects\n") == []

    def test_duplicate_order_names_row(self):
        data = "release,phase,order,defects\nR1,a,1,5\nR1,b,1,6\n"
        with pytest.raises(ParseError) as exc:
            load_history_csv(data)
        assert "row 3" in exc.value.location

    def test_negative_count_rejected(self):
        with pytest.raises(ParseError):
            load_history_csv("release,phase,order,defects\nR1,a,1,-5\n")

    def test_bad_header(self):
        with pytest.raises(ParseError):
            load_history_csv("nope,phase,order,defects\n")

    def test_sizes_attached(self):
        histories = load_history_csv(
            "release,phase,order,defects\nR1,all,1,800\n",
            sizes="release,loc,loc_per_fp\nR1,100000,125\n",
        )
        assert histories[0].size.loc == 100000


class TestRendering:
    def test_markdown_delivered_row(self):
        md = render_matrix(default_plan().build(), "markdown")
        assert "| DELIVERED DEFECTS | 720 | 560 | 320 | 120 | 40 |" in md
        assert "| DRE | 10% | 30% | 60% | 85% | 95% |" in md

    def test_zero_matrix_renders(self):
        import testrisk.matrix as mx
        from testrisk.estimation import direct_prediction

        plan = mx.LevelPlan(mx.TestLevel("ONLY", 0), "A", "LIGHT", "Existing", 0, 0.0, 0.0)
        matrix = mx.build_risk_matrix([plan], direct_prediction(0.0))
        md = render_matrix(matrix, "markdown")
        assert "| DELIVERED DEFECTS | 0 |" in md

    def test_json_has_exact_and_display(self):
        body = json.loads(render_matrix(default_plan().build(), "json"))
        first = body["rows"][0]
        assert first["delivered_defects_exact"] == pytest.approx(720.0)
        assert first["delivered_defects_display"] == 720

    def test_csv_reparse_reproduces_cells(self):
        text = render_matrix(default_plan().build(), "csv")
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["TEST LEVEL", "MINIMAL", "LOW", "MEDIUM", "HIGH", "EXTENSIVE"]
        as_dict = {r[0]: r[1:] for r in rows[1:]}
        assert as_dict["STAFF WEEKS"] == ["6", "12", "32", "60", "80"]
        assert as_dict["DELIVERED DEFECTS"] == ["720", "560", "320", "120", "40"]
        assert as_dict["DRE"] == ["10%", "30%", "60%", "85%", "95%"]

    def test_scope_csv_round_trip(self):
        scope = default_scope_matrix()
        assert parse_scope_csv(render_scope(scope, "csv")) == scope

    def test_scope_markdown_rows(self):
        md = render_scope(default_scope_matrix(), "md")
        assert "| Sanity | Yes | Yes | Yes | Yes | Yes |" in md
        assert "| Features | Subset | Changed/New | Most | All | All |" in md
