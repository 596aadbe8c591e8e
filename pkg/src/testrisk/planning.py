"""Staffing estimation and the what-if scenario engine.

A :class:`Plan` bundles everything needed to build a risk matrix: the level
plans, the scope matrix, the defect prediction, and options.  Scenarios are
named override sets on a base plan, addressed with dotted paths
(``levels.HIGH.dre``, ``predicted.nominal``, ``scope.Regression.C``,
``selected_level``) shared by the CLI, the HTTP API, and the UI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .errors import (
    BadOverridePathError,
    InvalidParamsError,
    InvalidProfileError,
    InvariantViolationError,
    MismatchedLaddersError,
    TestRiskError,
    ZeroConstraintError,
    ZeroRateError,
)
from .estimation import DefectPrediction
from .matrix import (
    ALL_GRADES,
    DEFAULT_DRE_VALUES,
    DEFAULT_ENVIRONMENTS,
    DEFAULT_INTENSITIES,
    DEFAULT_SCOPE_LABELS,
    LevelPlan,
    RiskMatrix,
    ScopeMatrix,
    TestLevel,
    build_risk_matrix,
    default_levels,
)

# Fractions of the worst-case staff-weeks assigned to each level, derived
# from the bundled worked example (6, 12, 32, 60, 80 staff-weeks).
DEFAULT_SCALING_PROFILE = (6 / 80, 12 / 80, 32 / 80, 60 / 80, 1.0)

# --- activity-composition DRE mode ------------------------------------
# Invented model, OFF by default: it exists so scope-cell toggles can move
# DRE in the UI.  It is NOT the published per-level ladder and is always
# labeled as a model.  dre = 1 - prod_a (1 - e_a * c_a), where e_a is a
# configured per-activity maximum effectiveness and c_a maps the inclusion
# grade to a coverage weight.
GRADE_COVERAGE_WEIGHTS: Mapping[str, float] = {
    "No": 0.0,
    "Minimal": 0.25,
    "Good": 0.75,
    "Complete": 1.0,
    "Subset": 0.25,
    "Changed/New": 0.5,
    "Most": 0.75,
    "All": 1.0,
    "Yes": 1.0,
}

DEFAULT_ACTIVITY_EFFECTIVENESS: Mapping[str, float] = {
    "Sanity": 0.30,
    "Features": 0.50,
    "Regression": 0.40,
    "Stress": 0.20,
    "Load": 0.20,
}


@dataclass(frozen=True)
class CaseLoad:
    """Test-case counts per level and the historical execution rate."""

    cases_per_level: Mapping[str, int]
    execution_rate: float  # test cases per staff-week

    def __post_init__(self):
        if self.execution_rate <= 0:
            raise ZeroRateError(
                f"execution_rate must be > 0, got {self.execution_rate}",
                "execution_rate",
            )
        for name, count in self.cases_per_level.items():
            if count < 0:
                raise InvalidParamsError(
                    f"case count must be >= 0, got {count}", f"cases.{name}"
                )


@dataclass(frozen=True)
class StaffingEstimate:
    staff: int
    staff_weeks: float
    calendar_weeks: float


def estimate_staffing(
    load: CaseLoad,
    level: TestLevel,
    staff: int | None = None,
    calendar_weeks: float | None = None,
) -> StaffingEstimate:
    """Derive staffing for one level from execution rates.

    Exactly one constraint is given.  Staff-weeks come straight from
    cases / rate; with a staff head count the calendar follows, with a
    calendar limit the head count is the ceiling and the calendar is
    recomputed so staff x calendar_weeks = staff_weeks holds exactly
    (the requested calendar becomes an upper bound).
    """
    if (staff is None) == (calendar_weeks is None):
        raise InvalidParamsError("give exactly one of staff or calendar_weeks")
    if level.name not in load.cases_per_level:
        raise InvalidParamsError(
            f"no case count for level {level.name!r}", f"cases.{level.name}"
        )
    cases = load.cases_per_level[level.name]
    if cases == 0:
        return StaffingEstimate(staff=0, staff_weeks=0.0, calendar_weeks=0.0)
    staff_weeks = cases / load.execution_rate
    if staff is not None:
        if staff <= 0:
            raise ZeroConstraintError(f"staff must be > 0, got {staff}", "staff")
        return StaffingEstimate(
            staff=staff, staff_weeks=staff_weeks, calendar_weeks=staff_weeks / staff
        )
    if calendar_weeks <= 0:
        raise ZeroConstraintError(
            f"calendar_weeks must be > 0, got {calendar_weeks}", "calendar_weeks"
        )
    head = math.ceil(staff_weeks / calendar_weeks)
    return StaffingEstimate(
        staff=head, staff_weeks=staff_weeks, calendar_weeks=staff_weeks / head
    )


def worst_case_scaling(
    worst: LevelPlan,
    profile: Sequence[float] = DEFAULT_SCALING_PROFILE,
    staff_per_level: Sequence[int] | None = None,
    levels: Sequence[TestLevel] | None = None,
    dre_ladder: Sequence[float] = DEFAULT_DRE_VALUES,
    scope_labels: Sequence[str] = DEFAULT_SCOPE_LABELS,
    intensities: Sequence[str] = DEFAULT_INTENSITIES,
    environments: Sequence[str] = DEFAULT_ENVIRONMENTS,
) -> list[LevelPlan]:
    """Scale a worst-case (top level) plan down into a full ladder.

    Each level gets ``worst.staff_weeks x profile[i]`` staff-weeks.  Head
    counts default to the worst case's unless ``staff_per_level`` is given;
    the calendar always follows from the product identity.
    """
    if levels is None:
        levels = default_levels()
    n = len(levels)
    if len(profile) != n:
        raise InvalidProfileError(
            f"profile length {len(profile)} != level count {n}", "profile"
        )
    if any(profile[i] > profile[i + 1] for i in range(n - 1)):
        raise InvalidProfileError("profile fractions must be nondecreasing", "profile")
    if profile[-1] != 1.0:
        raise InvalidProfileError(
            f"top profile fraction must be 1, got {profile[-1]}", "profile"
        )
    if staff_per_level is not None and len(staff_per_level) != n:
        raise InvalidProfileError("staff_per_level length mismatch", "profile")

    worst_sw = worst.staff_weeks
    plans = []
    for i, level in enumerate(levels):
        sw = worst_sw * profile[i]
        head = staff_per_level[i] if staff_per_level is not None else worst.staff
        calendar = sw / head if head > 0 else 0.0
        plans.append(
            LevelPlan(
                level=level,
                scope_label=scope_labels[i],
                intensity=intensities[i],
                environment=environments[i],
                staff=head,
                calendar_weeks=calendar,
                dre=dre_ladder[i],
            )
        )
    return plans


@dataclass(frozen=True)
class PlanOptions:
    strict_validation: bool = False
    rounding: str = "half-away-from-zero"
    never_zero_clamp: bool = True
    composition_enabled: bool = False
    activity_effectiveness: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_ACTIVITY_EFFECTIVENESS)
    )

    def __post_init__(self):
        if self.rounding != "half-away-from-zero":
            raise InvalidParamsError(
                f"unsupported rounding mode {self.rounding!r}", "options.rounding"
            )
        for a, e in self.activity_effectiveness.items():
            if not (0 <= e < 1):
                raise InvalidParamsError(
                    f"activity effectiveness must be in [0, 1), got {e}",
                    f"options.composition.effectiveness.{a}",
                )


def composed_dre(
    scope: ScopeMatrix, scope_label: str, effectiveness: Mapping[str, float]
) -> float:
    """Composition-mode DRE for one scope column (see module note)."""
    if scope_label not in scope.levels:
        raise InvalidParamsError(
            f"scope label {scope_label!r} not in scope matrix", "scope_label"
        )
    escape = 1.0
    for a in scope.activities:
        e = effectiveness.get(a, 0.0)
        c = GRADE_COVERAGE_WEIGHTS[scope.grade(a, scope_label)]
        escape *= 1.0 - e * c
    return 1.0 - escape


@dataclass(frozen=True)
class Plan:
    """A full plan: prediction, level ladder, scope grid, and options."""

    prediction: DefectPrediction
    levels: tuple[LevelPlan, ...]
    scope: ScopeMatrix
    selected_level: str | None = None
    options: PlanOptions = field(default_factory=PlanOptions)
    # Canonical prediction parameters as loaded from a plan document;
    # kept so saving a loaded plan round-trips the inputs.
    prediction_params: Mapping[str, object] | None = None

    def level_names(self) -> tuple[str, ...]:
        return tuple(p.level.name for p in self.levels)

    def level_plan(self, name: str) -> LevelPlan:
        for p in self.levels:
            if p.level.name == name:
                return p
        raise BadOverridePathError(f"unknown level {name!r}", f"levels.{name}")

    def effective_levels(self) -> tuple[LevelPlan, ...]:
        """Level plans with composition-mode DRE substituted when enabled."""
        if not self.options.composition_enabled:
            return self.levels
        return tuple(
            replace(
                p,
                dre=composed_dre(
                    self.scope, p.scope_label, self.options.activity_effectiveness
                ),
            )
            for p in self.levels
        )

    def build(self) -> RiskMatrix:
        return build_risk_matrix(
            self.effective_levels(),
            self.prediction,
            scope=self.scope,
            strict=self.options.strict_validation,
            clamp=self.options.never_zero_clamp,
        )


def default_plan() -> Plan:
    """The bundled worked example: 800 predicted defects over the default
    five-level ladder (staff 2,2,4,5,5; calendar 3,6,8,12,16)."""
    from .estimation import direct_prediction
    from .matrix import default_scope_matrix

    staff = (2, 2, 4, 5, 5)
    calendar = (3.0, 6.0, 8.0, 12.0, 16.0)
    plans = tuple(
        LevelPlan(
            level=level,
            scope_label=DEFAULT_SCOPE_LABELS[i],
            intensity=DEFAULT_INTENSITIES[i],
            environment=DEFAULT_ENVIRONMENTS[i],
            staff=staff[i],
            calendar_weeks=calendar[i],
            dre=DEFAULT_DRE_VALUES[i],
        )
        for i, level in enumerate(default_levels())
    )
    return Plan(
        prediction=direct_prediction(800.0),
        levels=plans,
        scope=default_scope_matrix(),
        selected_level=None,
    )


# --- overrides ---------------------------------------------------------

_LEVEL_FIELDS = {
    "dre": float,
    "staff": int,
    "calendar_weeks": float,
    "intensity": str,
    "environment": str,
    "scope_label": str,
}


def _coerce(value, target, path: str):
    if target is str:
        return str(value)
    try:
        if target is int:
            as_float = float(value)
            if as_float != int(as_float):
                raise ValueError(value)
            return int(as_float)
        return float(value)
    except (TypeError, ValueError):
        raise InvariantViolationError(
            f"cannot interpret {value!r} as {target.__name__}", path
        ) from None


def apply_override(plan: Plan, path: str, value) -> Plan:
    """Apply one dotted-path override, returning a new plan."""
    parts = path.split(".")
    try:
        if parts[0] == "levels" and len(parts) == 3:
            name, fld = parts[1], parts[2]
            if fld not in _LEVEL_FIELDS:
                raise BadOverridePathError(f"unknown level field {fld!r}", path)
            target = plan.level_plan(name)
            coerced = _coerce(value, _LEVEL_FIELDS[fld], path)
            new_level = replace(target, **{fld: coerced})
            levels = tuple(
                new_level if p.level.name == name else p for p in plan.levels
            )
            return replace(plan, levels=levels)
        if parts[0] == "predicted" and len(parts) == 2:
            fld = parts[1]
            if fld not in ("nominal", "low", "high"):
                raise BadOverridePathError(f"unknown prediction field {fld!r}", path)
            v = _coerce(value, float, path)
            pred = plan.prediction
            nominal, low, high = pred.nominal, pred.low, pred.high
            if fld == "nominal":
                # Keep low <= nominal <= high by widening the range.
                nominal = v
                low = min(low, v)
                high = max(high, v)
            elif fld == "low":
                low = v
            else:
                high = v
            new_pred = DefectPrediction(
                nominal=nominal, low=low, high=high, method=pred.method
            )
            return replace(plan, prediction=new_pred, prediction_params=None)
        if parts[0] == "scope" and len(parts) == 3:
            activity, level = parts[1], parts[2]
            if value not in ALL_GRADES:
                raise InvariantViolationError(f"unknown grade {value!r}", path)
            try:
                new_scope = plan.scope.with_cell(activity, level, value)
            except TestRiskError as exc:
                raise BadOverridePathError(exc.message, path) from exc
            return replace(plan, scope=new_scope)
        if parts[0] == "selected_level" and len(parts) == 1:
            name = str(value)
            names = plan.level_names()
            if name not in names:
                # Accept a scope label as an alias for its level.
                by_scope = {p.scope_label: p.level.name for p in plan.levels}
                if name in by_scope:
                    name = by_scope[name]
                else:
                    raise InvariantViolationError(
                        f"unknown level or scope label {name!r}", path
                    )
            return replace(plan, selected_level=name)
    except InvariantViolationError:
        raise
    except BadOverridePathError:
        raise
    except TestRiskError as exc:
        raise InvariantViolationError(exc.message, path) from exc
    raise BadOverridePathError(f"cannot resolve override path {path!r}", path)


@dataclass(frozen=True)
class Scenario:
    name: str
    base: Plan
    overrides: Mapping[str, object]


@dataclass(frozen=True)
class LevelDelta:
    delivered_defects: int  # display-value change
    staff_weeks: float
    calendar_weeks: float

    def to_jsonable(self) -> dict:
        return {
            "delivered_defects": self.delivered_defects,
            "staff_weeks": self.staff_weeks,
            "calendar_weeks": self.calendar_weeks,
        }


@dataclass(frozen=True)
class ScenarioResult:
    name: str
    plan: Plan
    matrix: RiskMatrix
    deltas: Mapping[str, LevelDelta]
    selected_level: str | None
    base_selected_level: str | None
    selection_delta: int | None  # delivered change at the selected level(s)


def apply_scenario(scenario: Scenario) -> ScenarioResult:
    """Rebuild the matrix with overrides applied and diff it against base."""
    base_matrix = scenario.base.build()
    plan = scenario.base
    for path, value in scenario.overrides.items():
        plan = apply_override(plan, path, value)
    matrix = plan.build()

    deltas = {}
    for row in matrix.rows:
        name = row.plan.level.name
        base_row = base_matrix.row_for(name)
        deltas[name] = LevelDelta(
            delivered_defects=row.delivered_display - base_row.delivered_display,
            staff_weeks=row.staff_weeks - base_row.staff_weeks,
            calendar_weeks=row.plan.calendar_weeks - base_row.plan.calendar_weeks,
        )

    selection_delta = None
    if plan.selected_level is not None:
        base_level = scenario.base.selected_level or plan.selected_level
        selection_delta = (
            matrix.row_for(plan.selected_level).delivered_display
            - base_matrix.row_for(base_level).delivered_display
        )
    return ScenarioResult(
        name=scenario.name,
        plan=plan,
        matrix=matrix,
        deltas=deltas,
        selected_level=plan.selected_level,
        base_selected_level=scenario.base.selected_level,
        selection_delta=selection_delta,
    )


@dataclass(frozen=True)
class ComparisonColumn:
    name: str
    delivered_defects: Mapping[str, int]
    staff_weeks: Mapping[str, float]
    calendar_weeks: Mapping[str, float]


@dataclass(frozen=True)
class Comparison:
    levels: tuple[str, ...]
    columns: tuple[ComparisonColumn, ...]


def compare_scenarios(results: Sequence[ScenarioResult]) -> Comparison:
    """Side-by-side per-level outcomes; input order preserved."""
    if not results:
        raise InvalidParamsError("no scenario results to compare", "results")
    levels = results[0].matrix.level_names
    columns = []
    for r in results:
        if r.matrix.level_names != levels:
            raise MismatchedLaddersError(
                f"scenario {r.name!r} has a different level ladder", r.name
            )
        columns.append(
            ComparisonColumn(
                name=r.name,
                delivered_defects={
                    n: r.matrix.row_for(n).delivered_display for n in levels
                },
                staff_weeks={n: r.matrix.row_for(n).staff_weeks for n in levels},
                calendar_weeks={
                    n: r.matrix.row_for(n).plan.calendar_weeks for n in levels
                },
            )
        )
    return Comparison(levels=levels, columns=tuple(columns))
