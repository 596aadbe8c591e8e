"""Risk-matrix and scope-matrix models.

The risk matrix is a decision table: one column per test level
(MINIMAL..EXTENSIVE by default), rows for scope, intensity, environment,
staffing, predicted defects, removal efficiency, and the bottom line --
defects delivered to the field.  The scope matrix decomposes the scope row
into an activity x scope-level inclusion grid with ordered grades.

Levels are alternatives, not phases: each column's numbers depend only on
its own plan plus the shared defect prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .errors import (
    DreOutOfRangeError,
    DuplicateNameError,
    InvalidPlanError,
    MonotonicityError,
)
from .estimation import DefectPrediction

DEFAULT_LEVEL_NAMES = ("MINIMAL", "LOW", "MEDIUM", "HIGH", "EXTENSIVE")
DEFAULT_SCOPE_LABELS = ("A", "B", "C", "D", "E")
DEFAULT_INTENSITIES = ("LIGHT", "LIGHT", "MEDIUM", "STRONG", "STRONG")
DEFAULT_ENVIRONMENTS = ("Existing", "Existing", "Existing", "Enhanced", "Enhanced")
DEFAULT_DRE_VALUES = (0.10, 0.30, 0.60, 0.85, 0.95)

INTENSITY_LABELS = ("LIGHT", "MEDIUM", "STRONG")
ENVIRONMENT_LABELS = ("Existing", "Enhanced")

# Ordered grade scales for scope-matrix cells.  "No" is the shared bottom;
# a row must fit entirely within one scale.
GRADE_SCALES: Mapping[str, tuple[str, ...]] = {
    "binary": ("No", "Yes"),
    "coverage": ("No", "Minimal", "Good", "Complete"),
    "feature": ("No", "Subset", "Changed/New", "Most", "All"),
}

ALL_GRADES = frozenset(g for scale in GRADE_SCALES.values() for g in scale)


@dataclass(frozen=True)
class TestLevel:
    name: str
    ordinal: int


def default_levels() -> tuple[TestLevel, ...]:
    return tuple(TestLevel(n, i) for i, n in enumerate(DEFAULT_LEVEL_NAMES))


def default_dre_ladder() -> list[tuple[TestLevel, float]]:
    """The published five-level removal-efficiency ladder."""
    return list(zip(default_levels(), DEFAULT_DRE_VALUES))


@dataclass(frozen=True)
class ScopeMatrix:
    """Activity x scope-level grid of inclusion grades."""

    activities: tuple[str, ...]
    levels: tuple[str, ...]
    grid: Mapping[tuple[str, str], str]

    def __post_init__(self):
        if len(set(self.activities)) != len(self.activities):
            raise DuplicateNameError("duplicate activity name", "scope.activities")
        if len(set(self.levels)) != len(self.levels):
            raise DuplicateNameError("duplicate scope level label", "scope.levels")
        for a in self.activities:
            for lv in self.levels:
                grade = self.grid.get((a, lv))
                if grade is None:
                    raise InvalidPlanError(
                        f"missing scope grade for ({a}, {lv})", f"scope.{a}.{lv}"
                    )
                if grade not in ALL_GRADES:
                    raise InvalidPlanError(
                        f"unknown grade {grade!r}", f"scope.{a}.{lv}"
                    )

    def grade(self, activity: str, level: str) -> str:
        return self.grid[(activity, level)]

    def row(self, activity: str) -> list[str]:
        return [self.grid[(activity, lv)] for lv in self.levels]

    def with_cell(self, activity: str, level: str, grade: str) -> "ScopeMatrix":
        """Copy with one cell replaced (no monotonicity check here)."""
        if (activity, level) not in self.grid:
            raise InvalidPlanError(
                f"no scope cell ({activity}, {level})", f"scope.{activity}.{level}"
            )
        grid = dict(self.grid)
        grid[(activity, level)] = grade
        return ScopeMatrix(self.activities, self.levels, grid)


def default_scope_matrix() -> ScopeMatrix:
    """The published 5-activity x 5-level scope grid."""
    rows = {
        "Sanity": ("Yes", "Yes", "Yes", "Yes", "Yes"),
        "Features": ("Subset", "Changed/New", "Most", "All", "All"),
        "Regression": ("No", "No", "Minimal", "Good", "Complete"),
        "Stress": ("No", "No", "No", "Good", "Complete"),
        "Load": ("No", "No", "Minimal", "Good", "Complete"),
    }
    grid = {
        (a, lv): rows[a][i]
        for a in rows
        for i, lv in enumerate(DEFAULT_SCOPE_LABELS)
    }
    return ScopeMatrix(tuple(rows), DEFAULT_SCOPE_LABELS, grid)


def _fitting_scales(labels: Iterable[str]) -> list[str]:
    labels = list(labels)
    return [
        name
        for name, scale in GRADE_SCALES.items()
        if all(lbl in scale for lbl in labels)
    ]


def _row_inversions(labels: Sequence[str], scale: Sequence[str]) -> list[int]:
    """Indices i where labels[i] ranks below labels[i-1]."""
    ranks = [scale.index(lbl) for lbl in labels]
    return [i for i in range(1, len(ranks)) if ranks[i] < ranks[i - 1]]


def check_scope_monotone(scope: ScopeMatrix) -> list["Finding"]:
    """Per-activity grade monotonicity findings (empty when valid)."""
    findings = []
    for a in scope.activities:
        row = scope.row(a)
        scales = _fitting_scales(row)
        if not scales:
            findings.append(
                Finding("error", f"scope.{a}", "grades do not fit a single scale")
            )
            continue
        best = min((_row_inversions(row, GRADE_SCALES[s]) for s in scales), key=len)
        for i in best:
            findings.append(
                Finding(
                    "error",
                    f"scope.{a}.{scope.levels[i]}",
                    f"grade regression: {row[i]!r} after {row[i - 1]!r}",
                )
            )
    return findings


def extend_scope_matrix(
    scope: ScopeMatrix,
    new_activity: tuple[str, Sequence[str]] | None = None,
    new_level: tuple[str, int, Sequence[str]] | None = None,
) -> ScopeMatrix:
    """Grow the grid by an activity row and/or a scope-level column.

    ``new_activity`` is (name, grades ordered by existing levels).
    ``new_level`` is (label, insert position, grades ordered by activities) --
    the "gray scale" case.  The original matrix is left untouched.
    """
    activities = list(scope.activities)
    levels = list(scope.levels)
    grid = dict(scope.grid)

    if new_activity is not None:
        name, grades = new_activity
        if name in activities:
            raise DuplicateNameError(f"activity {name!r} already exists", f"scope.{name}")
        if len(grades) != len(levels):
            raise InvalidPlanError(
                f"expected {len(levels)} grades for {name!r}, got {len(grades)}",
                f"scope.{name}",
            )
        activities.append(name)
        for lv, g in zip(levels, grades):
            grid[(name, lv)] = g

    if new_level is not None:
        label, position, grades = new_level
        if label in levels:
            raise DuplicateNameError(f"scope level {label!r} already exists", f"scope.{label}")
        if len(grades) != len(activities):
            raise InvalidPlanError(
                f"expected {len(activities)} grades for level {label!r}, got {len(grades)}",
                f"scope.{label}",
            )
        levels.insert(position, label)
        for a, g in zip(activities, grades):
            grid[(a, label)] = g

    extended = ScopeMatrix(tuple(activities), tuple(levels), grid)
    findings = check_scope_monotone(extended)
    if findings:
        first = findings[0]
        raise MonotonicityError(first.message, first.location)
    return extended


@dataclass(frozen=True)
class LevelPlan:
    """One column of the risk matrix: scope choice plus staffing and DRE."""

    level: TestLevel
    scope_label: str
    intensity: str
    environment: str
    staff: int
    calendar_weeks: float
    dre: float

    def __post_init__(self):
        loc = f"levels.{self.level.name}"
        if not (0 <= self.dre < 1):
            raise InvalidPlanError(
                f"dre < 1 violated: dre must be in [0, 1), got {self.dre}",
                f"{loc}.dre",
            )
        if self.staff < 0 or self.staff != int(self.staff):
            raise InvalidPlanError(
                f"staff must be a nonnegative integer, got {self.staff}",
                f"{loc}.staff",
            )
        if self.calendar_weeks < 0:
            raise InvalidPlanError(
                f"calendar_weeks must be >= 0, got {self.calendar_weeks}",
                f"{loc}.calendar_weeks",
            )

    @property
    def staff_weeks(self) -> float:
        return self.staff * self.calendar_weeks


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    location: str
    message: str

    def to_jsonable(self) -> dict:
        return {
            "severity": self.severity,
            "location": self.location,
            "message": self.message,
        }


@dataclass(frozen=True)
class LevelRow:
    """Computed column of a built matrix."""

    plan: LevelPlan
    staff_weeks: float
    delivered_exact: float
    delivered_display: int


@dataclass(frozen=True)
class RiskMatrix:
    rows: tuple[LevelRow, ...]
    predicted: DefectPrediction
    findings: tuple[Finding, ...] = field(default=())

    @property
    def level_names(self) -> tuple[str, ...]:
        return tuple(r.plan.level.name for r in self.rows)

    def row_for(self, level_name: str) -> LevelRow:
        for r in self.rows:
            if r.plan.level.name == level_name:
                return r
        raise KeyError(level_name)

    def has_errors(self) -> bool:
        return any(f.severity == "error" for f in self.findings)


def round_half_away_from_zero(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def delivered_defects(
    predicted: float, dre: float, clamp: bool = True
) -> tuple[float, int]:
    """Defects reaching the field: exact value and display integer.

    The display value is rounded half away from zero and, because a test
    phase never removes everything, clamped up to 1 whenever at least one
    defect is predicted.  The exact value is left untouched.
    """
    if not (0 <= dre < 1):
        raise DreOutOfRangeError(f"dre must be in [0, 1), got {dre}", "dre")
    if predicted < 0:
        raise InvalidPlanError(f"predicted must be >= 0, got {predicted}", "predicted")
    exact = predicted * (1.0 - dre)
    display = round_half_away_from_zero(exact)
    if clamp and predicted >= 1 and display < 1:
        display = 1
    return exact, display


def build_risk_matrix(
    plans: Sequence[LevelPlan],
    predicted: DefectPrediction,
    scope: ScopeMatrix | None = None,
    strict: bool = False,
    clamp: bool = True,
) -> RiskMatrix:
    """Compute staff-weeks and delivered defects per level and validate."""
    if not plans:
        raise InvalidPlanError("at least one level plan is required", "levels")
    ordered = sorted(plans, key=lambda p: p.level.ordinal)
    ordinals = [p.level.ordinal for p in ordered]
    if ordinals != list(range(len(ordered))):
        raise InvalidPlanError(
            f"level ordinals must form 0..n-1, got {ordinals}", "levels"
        )
    names = [p.level.name for p in ordered]
    if len(set(names)) != len(names):
        raise InvalidPlanError("level names must be unique", "levels")

    rows = []
    for plan in ordered:
        exact, display = delivered_defects(predicted.nominal, plan.dre, clamp=clamp)
        rows.append(
            LevelRow(
                plan=plan,
                staff_weeks=plan.staff_weeks,
                delivered_exact=exact,
                delivered_display=display,
            )
        )
    matrix = RiskMatrix(rows=tuple(rows), predicted=predicted)
    findings = validate_matrix(matrix, scope, strict=strict)
    return replace(matrix, findings=tuple(findings))


def validate_matrix(
    matrix: RiskMatrix,
    scope: ScopeMatrix | None = None,
    strict: bool = False,
    intensity_labels: Sequence[str] = INTENSITY_LABELS,
    environment_labels: Sequence[str] = ENVIRONMENT_LABELS,
) -> list[Finding]:
    """Ordering and consistency checks; an empty report means valid.

    DRE monotonicity across the ladder is a warning unless ``strict``;
    scope-grade monotonicity and staff-week mismatches are always errors.
    """
    findings: list[Finding] = []

    prev_dre = None
    for row in matrix.rows:
        plan = row.plan
        name = plan.level.name
        if prev_dre is not None and plan.dre < prev_dre:
            findings.append(
                Finding(
                    "error" if strict else "warning",
                    f"levels.{name}.dre",
                    f"DRE non-monotone at level {name}: "
                    f"{plan.dre} after {prev_dre}",
                )
            )
        prev_dre = plan.dre

        if abs(row.staff_weeks - plan.staff * plan.calendar_weeks) > 1e-9:
            findings.append(
                Finding(
                    "error",
                    f"levels.{name}.staff_weeks",
                    f"staff_weeks {row.staff_weeks} != staff x calendar_weeks "
                    f"({plan.staff} x {plan.calendar_weeks})",
                )
            )
        if plan.dre == 0 and plan.level.ordinal > 0:
            findings.append(
                Finding(
                    "warning",
                    f"levels.{name}.dre",
                    f"dre is 0 at non-minimal level {name}",
                )
            )
        if plan.intensity not in intensity_labels:
            findings.append(
                Finding(
                    "warning",
                    f"levels.{name}.intensity",
                    f"unknown intensity label {plan.intensity!r}",
                )
            )
        if plan.environment not in environment_labels:
            findings.append(
                Finding(
                    "warning",
                    f"levels.{name}.environment",
                    f"unknown environment label {plan.environment!r}",
                )
            )
        if scope is not None and plan.scope_label not in scope.levels:
            findings.append(
                Finding(
                    "error",
                    f"levels.{name}.scope_label",
                    f"scope label {plan.scope_label!r} not in scope matrix",
                )
            )

    if scope is not None:
        findings.extend(check_scope_monotone(scope))
    return findings
