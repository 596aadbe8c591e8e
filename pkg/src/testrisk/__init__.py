"""Test-effort risk planning toolkit.

Defect prediction (FP backfiring and LOC density), the test risk and scope
matrices, removal-efficiency calibration, staffing estimation, and a
what-if scenario engine -- exposed as a library, CLI, and HTTP service.
"""

__version__ = "0.1.0"

from .estimation import (
    DefectPrediction,
    DensityParams,
    SizeEstimate,
    backfire_function_points,
    predict_defects_from_fp,
    predict_defects_from_loc,
)
from .matrix import (
    LevelPlan,
    RiskMatrix,
    ScopeMatrix,
    TestLevel,
    build_risk_matrix,
    default_dre_ladder,
    default_scope_matrix,
    delivered_defects,
    extend_scope_matrix,
    validate_matrix,
)
from .calibration import (
    DreResult,
    PhaseRecord,
    ReleaseHistory,
    calibrate_density,
    dre_of_phase,
    dre_profile,
)
from .planning import (
    CaseLoad,
    Plan,
    Scenario,
    ScenarioResult,
    apply_scenario,
    compare_scenarios,
    default_plan,
    estimate_staffing,
    worst_case_scaling,
)
from .persistence import (
    load_history_csv,
    load_plan,
    render_matrix,
    render_scope,
    save_plan,
)

__all__ = [
    "DefectPrediction",
    "DensityParams",
    "SizeEstimate",
    "backfire_function_points",
    "predict_defects_from_fp",
    "predict_defects_from_loc",
    "LevelPlan",
    "RiskMatrix",
    "ScopeMatrix",
    "TestLevel",
    "build_risk_matrix",
    "default_dre_ladder",
    "default_scope_matrix",
    "delivered_defects",
    "extend_scope_matrix",
    "validate_matrix",
    "DreResult",
    "PhaseRecord",
    "ReleaseHistory",
    "calibrate_density",
    "dre_of_phase",
    "dre_profile",
    "CaseLoad",
    "Plan",
    "Scenario",
    "ScenarioResult",
    "apply_scenario",
    "compare_scenarios",
    "default_plan",
    "estimate_staffing",
    "worst_case_scaling",
    "load_history_csv",
    "load_plan",
    "render_matrix",
    "render_scope",
    "save_plan",
]
