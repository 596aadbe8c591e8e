"""Plan file format, history CSV ingestion, and table rendering.

Plan documents are UTF-8 JSON (``schema_version: 1``).  Saving is canonical:
fixed key order, 2-space indentation, trailing newline, so two saves of the
same plan are byte-identical and golden-file tests stay exact.  Rendering
produces Markdown pipe tables, RFC-4180 CSV, or JSON with both exact and
display values.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Mapping, Sequence

from .calibration import PhaseRecord, ReleaseHistory
from .errors import InvariantViolationError, ParseError, SchemaError, TestRiskError
from .estimation import (
    DEFAULT_RANGE_FACTORS,
    DefectPrediction,
    DensityParams,
    SizeEstimate,
    backfire_function_points,
    direct_prediction,
    predict_defects_from_fp,
    predict_defects_from_loc,
)
from .matrix import (
    Finding,
    LevelPlan,
    RiskMatrix,
    ScopeMatrix,
    TestLevel,
    default_scope_matrix,
)
from .planning import (
    Comparison,
    Plan,
    PlanOptions,
    ScenarioResult,
    default_plan,
)

SCHEMA_VERSION = 1

MATRIX_ROW_LABELS = (
    "TEST SCOPE",
    "INTENSITY",
    "ENVIRONMENT",
    "STAFF",
    "STAFF WEEKS",
    "CALENDAR WEEKS",
    "PREDICTED DEFECTS",
    "DRE",
    "DELIVERED DEFECTS",
)


def canonical_json(obj) -> bytes:
    """Shared canonical JSON encoding: insertion order, 2-space indent,
    newline-terminated.  Every API body and ``--json`` output uses this."""
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# --- number / percent formatting ---------------------------------------


def format_number(x) -> str:
    if isinstance(x, int):
        return str(x)
    if float(x).is_integer():
        return str(int(x))
    return format(x, "g")


def format_percent(fraction: float) -> str:
    pct = round(fraction * 100.0, 10)
    return f"{format(pct, 'g')}%"


# --- plan documents ----------------------------------------------------


def _require(obj: Mapping, key: str, location: str):
    if key not in obj:
        raise SchemaError(f"missing required field {key!r}", location)
    return obj[key]


def _number(obj: Mapping, key: str, location: str, default=None):
    if key not in obj:
        if default is None:
            raise SchemaError(f"missing required field {key!r}", location)
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"field {key!r} must be a number", f"{location}.{key}")
    return float(v)


def prediction_from_spec(
    spec: Mapping, location: str = "prediction"
) -> tuple[DefectPrediction, dict]:
    """Build a prediction from document/request parameters.

    Returns the prediction plus its canonical parameter dict (what
    ``save_plan`` writes back).  ``method`` may be omitted and is then
    inferred from the fields present.
    """
    if not isinstance(spec, Mapping):
        raise SchemaError("prediction must be an object", location)
    method = spec.get("method")
    if method is None:
        if "nominal" in spec:
            method = "direct"
        elif "defects_per_kloc" in spec:
            method = "loc_density"
        elif "fp" in spec or "loc" in spec:
            method = "fp"
        else:
            raise SchemaError("cannot infer prediction method", location)
    if method not in ("fp", "loc_density", "direct"):
        raise SchemaError(f"unknown prediction method {method!r}", f"{location}.method")

    rf = spec.get("range_factors", list(DEFAULT_RANGE_FACTORS))
    if (
        not isinstance(rf, Sequence)
        or isinstance(rf, (str, bytes))
        or len(rf) != 2
    ):
        raise SchemaError(
            "range_factors must be a [low, high] pair", f"{location}.range_factors"
        )
    range_factors = (float(rf[0]), float(rf[1]))

    try:
        if method == "direct":
            nominal = _number(spec, "nominal", location)
            low = spec.get("low")
            high = spec.get("high")
            pred = direct_prediction(
                nominal,
                low=None if low is None else float(low),
                high=None if high is None else float(high),
                range_factors=range_factors,
            )
            params = {
                "method": "direct",
                "nominal": pred.nominal,
                "low": pred.low,
                "high": pred.high,
            }
            return pred, params
        if method == "loc_density":
            loc = _number(spec, "loc", location)
            density = DensityParams(
                defects_per_kloc=_number(spec, "defects_per_kloc", location, 8.0),
                adjustment=_number(spec, "adjustment", location, 1.0),
            )
            pred = predict_defects_from_loc(loc, density, range_factors)
            params = {
                "method": "loc_density",
                "loc": loc,
                "defects_per_kloc": density.defects_per_kloc,
                "adjustment": density.adjustment,
                "range_factors": list(range_factors),
            }
            return pred, params
        # method == "fp": either a direct FP count or LOC to backfire.
        density = DensityParams(
            defects_per_fp=_number(spec, "defects_per_fp", location, 1.0),
            adjustment=_number(spec, "adjustment", location, 1.0),
        )
        params = {"method": "fp"}
        if "fp" in spec:
            fp = _number(spec, "fp", location)
            params["fp"] = fp
        else:
            size = SizeEstimate(
                loc=_number(spec, "loc", location),
                loc_per_fp=_number(spec, "loc_per_fp", location, 125.0),
                complexity_adjustment=_number(
                    spec, "complexity_adjustment", location, 1.0
                ),
            )
            fp = backfire_function_points(size)
            params["loc"] = size.loc
            params["loc_per_fp"] = size.loc_per_fp
            params["complexity_adjustment"] = size.complexity_adjustment
        pred = predict_defects_from_fp(fp, density, range_factors)
        params["defects_per_fp"] = density.defects_per_fp
        params["adjustment"] = density.adjustment
        params["range_factors"] = list(range_factors)
        return pred, params
    except SchemaError:
        raise
    except TestRiskError as exc:
        raise InvariantViolationError(exc.message, exc.location or location) from exc


def _levels_from_doc(doc_levels, location: str = "levels") -> tuple[LevelPlan, ...]:
    defaults = {p.level.name: p for p in default_plan().levels}
    if not isinstance(doc_levels, list) or not doc_levels:
        raise SchemaError("levels must be a nonempty array", location)
    plans = []
    for i, entry in enumerate(doc_levels):
        loc = f"{location}[{i}]"
        if not isinstance(entry, Mapping):
            raise SchemaError("level entry must be an object", loc)
        name = _require(entry, "name", loc)
        base = defaults.get(name)

        def get(key, conv, default):
            if key in entry:
                return conv(entry[key])
            if default is not None:
                return default
            raise SchemaError(f"missing required field {key!r}", f"{loc}.{key}")

        try:
            plans.append(
                LevelPlan(
                    level=TestLevel(name, i),
                    scope_label=get("scope_label", str, base.scope_label if base else None),
                    intensity=get("intensity", str, base.intensity if base else None),
                    environment=get(
                        "environment", str, base.environment if base else None
                    ),
                    staff=get("staff", int, base.staff if base else None),
                    calendar_weeks=get(
                        "calendar_weeks", float, base.calendar_weeks if base else None
                    ),
                    dre=get("dre", float, base.dre if base else None),
                )
            )
        except SchemaError:
            raise
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc), loc) from exc
        except TestRiskError as exc:
            raise InvariantViolationError(exc.message, exc.location or loc) from exc
    return tuple(plans)


def _scope_from_doc(doc_scope, location: str = "scope_matrix") -> ScopeMatrix:
    if not isinstance(doc_scope, Mapping):
        raise SchemaError("scope_matrix must be an object", location)
    activities = _require(doc_scope, "activities", location)
    levels = _require(doc_scope, "levels", location)
    grid_doc = _require(doc_scope, "grid", location)
    grid = {}
    for a in activities:
        row = grid_doc.get(a)
        if not isinstance(row, Mapping):
            raise SchemaError(f"missing grid row for activity {a!r}", f"{location}.grid.{a}")
        for lv in levels:
            if lv not in row:
                raise SchemaError(
                    f"missing grade for ({a}, {lv})", f"{location}.grid.{a}.{lv}"
                )
            grid[(a, lv)] = row[lv]
    try:
        return ScopeMatrix(tuple(activities), tuple(levels), grid)
    except TestRiskError as exc:
        raise InvariantViolationError(exc.message, exc.location or location) from exc


def _options_from_doc(doc_options) -> PlanOptions:
    if doc_options is None:
        return PlanOptions()
    if not isinstance(doc_options, Mapping):
        raise SchemaError("options must be an object", "options")
    comp = doc_options.get("composition", {})
    try:
        return PlanOptions(
            strict_validation=bool(doc_options.get("strict_validation", False)),
            rounding=doc_options.get("rounding", "half-away-from-zero"),
            never_zero_clamp=bool(doc_options.get("never_zero_clamp", True)),
            composition_enabled=bool(comp.get("enabled", False)),
            activity_effectiveness=dict(
                comp.get(
                    "effectiveness",
                    PlanOptions().activity_effectiveness,
                )
            ),
        )
    except TestRiskError as exc:
        raise InvariantViolationError(exc.message, exc.location or "options") from exc


def load_plan(data: bytes | str) -> Plan:
    """Parse and validate a plan document, filling defaults for omitted
    standard elements (the published ladder and scope grid)."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not valid UTF-8: {exc}", "document") from exc
    if not data.strip():
        raise ParseError("empty input", "line 1, column 1")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}"
        ) from exc
    if not isinstance(doc, Mapping):
        raise SchemaError("document root must be an object", "document")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(
            f"unsupported schema_version {version!r}", "schema_version"
        )
    prediction, params = prediction_from_spec(_require(doc, "prediction", "document"))

    if "levels" in doc:
        levels = _levels_from_doc(doc["levels"])
    else:
        levels = default_plan().levels
    scope = (
        _scope_from_doc(doc["scope_matrix"])
        if "scope_matrix" in doc
        else default_scope_matrix()
    )
    options = _options_from_doc(doc.get("options"))

    selected = doc.get("selected_level")
    names = tuple(p.level.name for p in levels)
    if selected is not None and selected not in names:
        by_scope = {p.scope_label: p.level.name for p in levels}
        if selected in by_scope:
            selected = by_scope[selected]
        else:
            raise SchemaError(
                f"selected_level {selected!r} is not a level name", "selected_level"
            )
    return Plan(
        prediction=prediction,
        levels=levels,
        scope=scope,
        selected_level=selected,
        options=options,
        prediction_params=params,
    )


def plan_to_jsonable(plan: Plan) -> dict:
    if plan.prediction_params is not None:
        pred_params = dict(plan.prediction_params)
    else:
        pred_params = {
            "method": "direct",
            "nominal": plan.prediction.nominal,
            "low": plan.prediction.low,
            "high": plan.prediction.high,
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "prediction": pred_params,
        "levels": [
            {
                "name": p.level.name,
                "scope_label": p.scope_label,
                "intensity": p.intensity,
                "environment": p.environment,
                "staff": p.staff,
                "calendar_weeks": p.calendar_weeks,
                "dre": p.dre,
            }
            for p in plan.levels
        ],
        "scope_matrix": {
            "activities": list(plan.scope.activities),
            "levels": list(plan.scope.levels),
            "grid": {
                a: {lv: plan.scope.grade(a, lv) for lv in plan.scope.levels}
                for a in plan.scope.activities
            },
        },
        "selected_level": plan.selected_level,
        "options": {
            "strict_validation": plan.options.strict_validation,
            "rounding": plan.options.rounding,
            "never_zero_clamp": plan.options.never_zero_clamp,
            "composition": {
                "enabled": plan.options.composition_enabled,
                "effectiveness": dict(plan.options.activity_effectiveness),
            },
        },
    }


def save_plan(plan: Plan) -> bytes:
    """Canonical serialization; ``load_plan(save_plan(p))`` equals ``p``."""
    return canonical_json(plan_to_jsonable(plan))


# --- history CSV -------------------------------------------------------

HISTORY_HEADER = ["release", "phase", "order", "defects"]
SIZES_HEADER = ["release", "loc", "loc_per_fp"]


def _read_csv(data: bytes | str, expected_header: list[str], what: str):
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    reader = csv.reader(io.StringIO(data))
    rows = list(reader)
    if not rows or [c.strip() for c in rows[0]] != expected_header:
        raise ParseError(
            f"{what} header must be {','.join(expected_header)!r}", "row 1"
        )
    return rows[1:]


def load_history_csv(
    data: bytes | str, sizes: bytes | str | None = None
) -> list[ReleaseHistory]:
    """Parse phase records (and optional sizes) grouped by release."""
    rows = _read_csv(data, HISTORY_HEADER, "history")
    sizes_by_release: dict[str, SizeEstimate] = {}
    if sizes is not None:
        for idx, row in enumerate(_read_csv(sizes, SIZES_HEADER, "sizes"), start=2):
            if len(row) != 3:
                raise ParseError("expected 3 columns", f"sizes row {idx}")
            release, loc, loc_per_fp = row
            try:
                sizes_by_release[release] = SizeEstimate(
                    loc=float(loc), loc_per_fp=float(loc_per_fp)
                )
            except (ValueError, TestRiskError) as exc:
                raise ParseError(str(exc), f"sizes row {idx}") from exc

    phases: dict[str, list[PhaseRecord]] = {}
    seen_orders: set[tuple[str, int]] = set()
    release_order: list[str] = []
    for idx, row in enumerate(rows, start=2):
        if len(row) != 4:
            raise ParseError("expected 4 columns", f"row {idx}")
        release, phase, order, defects = row
        try:
            order_i = int(order)
            defects_i = int(defects)
        except ValueError as exc:
            raise ParseError(f"bad integer: {exc}", f"row {idx}") from exc
        if defects_i < 0:
            raise ParseError(f"negative defect count {defects_i}", f"row {idx}")
        if (release, order_i) in seen_orders:
            raise ParseError(
                f"duplicate order {order_i} for release {release!r}", f"row {idx}"
            )
        seen_orders.add((release, order_i))
        if release not in phases:
            phases[release] = []
            release_order.append(release)
        phases[release].append(PhaseRecord(phase, order_i, defects_i))
    return [
        ReleaseHistory(
            release_name=r,
            phases=tuple(phases[r]),
            size=sizes_by_release.get(r),
        )
        for r in release_order
    ]


# --- rendering ---------------------------------------------------------


def _matrix_cells(matrix: RiskMatrix) -> list[list[str]]:
    header = ["TEST LEVEL"] + list(matrix.level_names)
    rows = {label: [label] for label in MATRIX_ROW_LABELS}
    for row in matrix.rows:
        p = row.plan
        rows["TEST SCOPE"].append(p.scope_label)
        rows["INTENSITY"].append(p.intensity)
        rows["ENVIRONMENT"].append(p.environment)
        rows["STAFF"].append(format_number(p.staff))
        rows["STAFF WEEKS"].append(format_number(row.staff_weeks))
        rows["CALENDAR WEEKS"].append(format_number(p.calendar_weeks))
        rows["PREDICTED DEFECTS"].append(
            format_number(round(matrix.predicted.nominal, 10))
        )
        rows["DRE"].append(format_percent(p.dre))
        rows["DELIVERED DEFECTS"].append(format_number(row.delivered_display))
    return [header] + [rows[label] for label in MATRIX_ROW_LABELS]


def _markdown_table(cells: list[list[str]]) -> str:
    lines = ["| " + " | ".join(cells[0]) + " |"]
    lines.append("| " + " | ".join("---" for _ in cells[0]) + " |")
    for row in cells[1:]:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def _csv_table(cells: list[list[str]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerows(cells)
    return out.getvalue()


def matrix_to_jsonable(matrix: RiskMatrix) -> dict:
    return {
        "levels": list(matrix.level_names),
        "predicted": matrix.predicted.to_jsonable(),
        "rows": [
            {
                "level": r.plan.level.name,
                "scope_label": r.plan.scope_label,
                "intensity": r.plan.intensity,
                "environment": r.plan.environment,
                "staff": r.plan.staff,
                "staff_weeks": r.staff_weeks,
                "calendar_weeks": r.plan.calendar_weeks,
                "dre": r.plan.dre,
                "delivered_defects_exact": r.delivered_exact,
                "delivered_defects_display": r.delivered_display,
            }
            for r in matrix.rows
        ],
        "findings": [f.to_jsonable() for f in matrix.findings],
    }


def render_matrix(matrix: RiskMatrix, fmt: str = "markdown") -> str:
    """Render the risk matrix in the published row order."""
    if fmt in ("markdown", "md"):
        return _markdown_table(_matrix_cells(matrix))
    if fmt == "csv":
        return _csv_table(_matrix_cells(matrix))
    if fmt == "json":
        return canonical_json(matrix_to_jsonable(matrix)).decode("utf-8")
    raise SchemaError(f"unknown format {fmt!r}", "format")


def _scope_cells(scope: ScopeMatrix) -> list[list[str]]:
    header = ["SCOPE"] + list(scope.levels)
    return [header] + [[a] + scope.row(a) for a in scope.activities]


def scope_to_jsonable(scope: ScopeMatrix) -> dict:
    return {
        "activities": list(scope.activities),
        "levels": list(scope.levels),
        "grid": {a: {lv: scope.grade(a, lv) for lv in scope.levels} for a in scope.activities},
    }


def render_scope(scope: ScopeMatrix, fmt: str = "markdown") -> str:
    if fmt in ("markdown", "md"):
        return _markdown_table(_scope_cells(scope))
    if fmt == "csv":
        return _csv_table(_scope_cells(scope))
    if fmt == "json":
        return canonical_json(scope_to_jsonable(scope)).decode("utf-8")
    raise SchemaError(f"unknown format {fmt!r}", "format")


def parse_scope_csv(text: str) -> ScopeMatrix:
    """Inverse of ``render_scope(..., 'csv')`` for round-trip checks."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][0] != "SCOPE":
        raise ParseError("scope CSV must start with a SCOPE header row", "row 1")
    levels = tuple(rows[0][1:])
    activities = tuple(r[0] for r in rows[1:])
    grid = {
        (r[0], lv): r[1 + i]
        for r in rows[1:]
        for i, lv in enumerate(levels)
    }
    return ScopeMatrix(activities, levels, grid)


# --- scenario / comparison JSON ----------------------------------------


def scenario_result_to_jsonable(result: ScenarioResult) -> dict:
    body = {
        "name": result.name,
        "selected_level": result.selected_level,
        "base_selected_level": result.base_selected_level,
        "matrix": matrix_to_jsonable(result.matrix),
        "deltas": {
            name: delta.to_jsonable() for name, delta in result.deltas.items()
        },
    }
    body["selection_delta"] = result.selection_delta
    return body


def comparison_to_jsonable(comparison: Comparison) -> dict:
    return {
        "levels": list(comparison.levels),
        "scenarios": [
            {
                "name": c.name,
                "delivered_defects": {n: c.delivered_defects[n] for n in comparison.levels},
                "staff_weeks": {n: c.staff_weeks[n] for n in comparison.levels},
                "calendar_weeks": {n: c.calendar_weeks[n] for n in comparison.levels},
            }
            for c in comparison.columns
        ],
    }
