import dataclasses

import pytest

from testrisk.errors import (
    BadOverridePathError,
    InvalidProfileError,
    InvariantViolationError,
    MismatchedLaddersError,
    ZeroConstraintError,
    ZeroRateError,
)
from testrisk.matrix import TestLevel, default_levels
from testrisk.planning import (
    CaseLoad,
    PlanOptions,
    Scenario,
    apply_override,
    apply_scenario,
    compare_scenarios,
    composed_dre,
    default_plan,
    estimate_staffing,
    worst_case_scaling,
)


MEDIUM = TestLevel("MEDIUM", 2)


class TestEstimateStaffing:
    def test_staff_constraint_matches_worked_example(self):
        load = CaseLoad({"MEDIUM": 320}, execution_rate=10)
        est = estimate_staffing(load, MEDIUM, staff=4)
        assert est.staff == 4
        assert est.staff_weeks == pytest.approx(32)
        assert est.calendar_weeks == pytest.approx(8)

    def test_zero_cases(self):
        est = estimate_staffing(CaseLoad({"MEDIUM": 0}, 10), MEDIUM, staff=4)
        assert (est.staff, est.staff_weeks, est.calendar_weeks) == (0, 0.0, 0.0)

    def test_calendar_constraint_ceils_staff(self):
        est = estimate_staffing(CaseLoad({"MEDIUM": 100}, 10), MEDIUM, calendar_weeks=3)
        assert est.staff == 4
        assert est.staff_weeks == pytest.approx(10)
        assert est.calendar_weeks == pytest.approx(2.5)

    def test_product_identity_after_reconciliation(self):
        for cases in (1, 7, 100, 319):
            est = estimate_staffing(
                CaseLoad({"MEDIUM": cases}, 7), MEDIUM, calendar_weeks=4
            )
            assert est.staff * est.calendar_weeks == pytest.approx(est.staff_weeks)
            assert est.calendar_weeks <= 4

    def test_zero_rate_rejected(self):
        with pytest.raises(ZeroRateError):
            CaseLoad({"MEDIUM": 10}, 0)

    def test_zero_constraint_rejected(self):
        with pytest.raises(ZeroConstraintError):
            estimate_staffing(CaseLoad({"MEDIUM": 10}, 10), MEDIUM, staff=0)


class TestWorstCaseScaling:
    def test_reproduces_worked_example_staff_weeks(self):
        worst = default_plan().levels[-1]  # EXTENSIVE: 5 staff x 16 weeks
        plans = worst_case_scaling(worst, staff_per_level=[2, 2, 4, 5, 5])
        assert [p.staff_weeks for p in plans] == [6, 12, 32, 60, 80]
        assert [p.calendar_weeks for p in plans] == [3, 6, 8, 12, 16]

    def test_scaling_arbitrary_worst(self):
        worst = dataclasses.replace(
            default_plan().levels[-1], staff=5, calendar_weeks=8.0
        )  # 40 staff-weeks
        plans = worst_case_scaling(worst)
        assert [p.staff_weeks for p in plans] == pytest.approx([3, 6, 16, 30, 40])

    def test_identity_profile(self):
        worst = default_plan().levels[-1]
        plans = worst_case_scaling(worst, profile=[1.0] * 5)
        assert all(p.staff_weeks == worst.staff_weeks for p in plans)

    def test_decreasing_profile_rejected(self):
        with pytest.raises(InvalidProfileError):
            worst_case_scaling(default_plan().levels[-1], profile=[0.5, 0.4, 0.6, 0.8, 1.0])

    def test_top_fraction_must_be_one(self):
        with pytest.raises(InvalidProfileError):
            worst_case_scaling(default_plan().levels[-1], profile=[0.1, 0.2, 0.3, 0.4, 0.9])


class TestOverrides:
    def test_level_field_override(self):
        plan = apply_override(default_plan(), "levels.HIGH.dre", 0.8)
        assert plan.level_plan("HIGH").dre == 0.8
        # other levels untouched
        assert plan.level_plan("MEDIUM").dre == 0.60

    def test_string_values_coerced(self):
        plan = apply_override(default_plan(), "levels.MEDIUM.staff", "7")
        assert plan.level_plan("MEDIUM").staff == 7

    def test_predicted_nominal_widens_range(self):
        plan = apply_override(default_plan(), "predicted.nominal", 1400)
        assert plan.prediction.nominal == 1400
        assert plan.prediction.high == 1400

    def test_scope_cell_override(self):
        plan = apply_override(default_plan(), "scope.Regression.C", "Good")
        assert plan.scope.grade("Regression", "C") == "Good"

    def test_selected_level_accepts_scope_label(self):
        plan = apply_override(default_plan(), "selected_level", "D")
        assert plan.selected_level == "HIGH"

    def test_dre_one_rejected(self):
        with pytest.raises(InvariantViolationError, match="dre < 1"):
            apply_override(default_plan(), "levels.HIGH.dre", 1.0)

    def test_bad_path(self):
        with pytest.raises(BadOverridePathError):
            apply_override(default_plan(), "levels.HIGH.nope", 1)
        with pytest.raises(BadOverridePathError):
            apply_override(default_plan(), "bogus", 1)


class TestScenarios:
    def test_identity_scenario(self):
        base = default_plan()
        result = apply_scenario(Scenario("noop", base, {}))
        assert all(
            d.delivered_defects == 0 and d.staff_weeks == 0 and d.calendar_weeks == 0
            for d in result.deltas.values()
        )
        assert result.matrix == base.build()

    def test_level_selection_change(self):
        base = dataclasses.replace(default_plan(), selected_level="MEDIUM")
        result = apply_scenario(Scenario("pick-D", base, {"selected_level": "D"}))
        assert result.selected_level == "HIGH"
        assert result.selection_delta == 120 - 320

    def test_prediction_override_moves_delivered(self):
        result = apply_scenario(
            Scenario("worst", default_plan(), {"predicted.nominal": 1400})
        )
        assert result.matrix.row_for("HIGH").delivered_display == 210

    def test_override_locality(self):
        result = apply_scenario(
            Scenario("staff-up", default_plan(), {"levels.MEDIUM.staff": 9})
        )
        for name, delta in result.deltas.items():
            if name == "MEDIUM":
                assert delta.staff_weeks != 0
            else:
                assert delta.staff_weeks == 0
            assert delta.delivered_defects == 0

    def test_compare_round_trip(self):
        base = default_plan()
        c = apply_scenario(Scenario("c", base, {"selected_level": "C"}))
        d = apply_scenario(Scenario("d", base, {"selected_level": "D"}))
        comparison = compare_scenarios([c, d])
        assert [col.name for col in comparison.columns] == ["c", "d"]
        assert comparison.columns[0].delivered_defects["MEDIUM"] == 320
        assert comparison.columns[1].delivered_defects["HIGH"] == 120

    def test_compare_consistency_with_dre_overrides(self):
        base = default_plan()
        results = []
        for name, dre in (("a", 0.5), ("b", 0.7), ("c", 0.9)):
            results.append(
                apply_scenario(Scenario(name, base, {"levels.HIGH.dre": dre}))
            )
        comparison = compare_scenarios(results)
        for col, dre in zip(comparison.columns, (0.5, 0.7, 0.9)):
            assert col.delivered_defects["HIGH"] == round(800 * (1 - dre))

    def test_mismatched_ladders(self):
        base = default_plan()
        r1 = apply_scenario(Scenario("a", base, {}))
        short = dataclasses.replace(
            base,
            levels=tuple(
                dataclasses.replace(p, level=TestLevel(p.level.name, i))
                for i, p in enumerate(base.levels[:3])
            ),
        )
        r2 = apply_scenario(Scenario("b", short, {}))
        with pytest.raises(MismatchedLaddersError):
            compare_scenarios([r1, r2])


class TestCompositionMode:
    def test_composed_dre_monotone_in_scope(self):
        plan = default_plan()
        eff = plan.options.activity_effectiveness
        dres = [composed_dre(plan.scope, lbl, eff) for lbl in plan.scope.levels]
        assert dres == sorted(dres)
        assert all(0 <= d < 1 for d in dres)

    def test_composition_replaces_ladder(self):
        plan = default_plan()
        enabled = dataclasses.replace(
            plan, options=dataclasses.replace(plan.options, composition_enabled=True)
        )
        matrix = enabled.build()
        eff = plan.options.activity_effectiveness
        for row in matrix.rows:
            expected = composed_dre(plan.scope, row.plan.scope_label, eff)
            assert row.plan.dre == pytest.approx(expected)

    def test_effectiveness_must_stay_below_one(self):
        with pytest.raises(Exception):
            PlanOptions(activity_effectiveness={"Sanity": 1.0})


class TestDefaultPlan:
    def test_matches_worked_example(self):
        matrix = default_plan().build()
        assert [r.delivered_display for r in matrix.rows] == [720, 560, 320, 120, 40]
        assert matrix.findings == ()

    def test_levels_are_contiguous(self):
        names = [p.level.ordinal for p in default_plan().levels]
        assert names == [0, 1, 2, 3, 4]
