"""Defect and size prediction.

Two defect-prediction routes are supported:

* function-point backfiring: system size in LOC is converted to function
  points through a gearing factor (source statements per FP) and multiplied
  by a defects-per-FP rate;
* LOC density: defects per KLOC applied directly to the line count.

Both produce a :class:`DefectPrediction` with a nominal count plus an
optimistic/pessimistic range obtained from configurable range factors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParamsError, InvalidSizeError

# Gearing factor back-derived from the bundled worked example
# (100,000 LOC ~ 800 FP).  Not an industry-published value; override it
# with the figure for your language/environment.
DEFAULT_LOC_PER_FP = 125.0

# Example defaults consistent with the bundled worked example; they are
# placeholders, not authoritative industry rates.
DEFAULT_DEFECTS_PER_FP = 1.0
DEFAULT_DEFECTS_PER_KLOC = 8.0

# Optimistic/pessimistic multipliers on the nominal prediction,
# back-derived from the worked example's 650..1400 range around 800.
DEFAULT_RANGE_FACTORS = (0.8125, 1.75)


@dataclass(frozen=True)
class SizeEstimate:
    """System size in LOC with the knobs needed for FP backfiring."""

    loc: float
    loc_per_fp: float = DEFAULT_LOC_PER_FP
    complexity_adjustment: float = 1.0

    def __post_init__(self):
        if self.loc < 0:
            raise InvalidSizeError(f"loc must be >= 0, got {self.loc}", "loc")
        if self.loc_per_fp <= 0:
            raise InvalidSizeError(
                f"loc_per_fp must be > 0, got {self.loc_per_fp}", "loc_per_fp"
            )
        if self.complexity_adjustment <= 0:
            raise InvalidSizeError(
                f"complexity_adjustment must be > 0, got {self.complexity_adjustment}",
                "complexity_adjustment",
            )


@dataclass(frozen=True)
class DensityParams:
    """Defect density rates plus a free adjustment multiplier."""

    defects_per_fp: float = DEFAULT_DEFECTS_PER_FP
    defects_per_kloc: float = DEFAULT_DEFECTS_PER_KLOC
    adjustment: float = 1.0

    def __post_init__(self):
        if self.defects_per_fp < 0:
            raise InvalidParamsError(
                f"defects_per_fp must be >= 0, got {self.defects_per_fp}",
                "defects_per_fp",
            )
        if self.defects_per_kloc < 0:
            raise InvalidParamsError(
                f"defects_per_kloc must be >= 0, got {self.defects_per_kloc}",
                "defects_per_kloc",
            )
        if self.adjustment <= 0:
            raise InvalidParamsError(
                f"adjustment must be > 0, got {self.adjustment}", "adjustment"
            )


@dataclass(frozen=True)
class DefectPrediction:
    """Predicted defect count at system-test entry, with a range."""

    nominal: float
    low: float
    high: float
    method: str  # "fp" | "loc_density" | "direct"

    def __post_init__(self):
        if self.nominal < 0 or self.low < 0 or self.high < 0:
            raise InvalidParamsError("prediction values must be >= 0")
        if not (self.low <= self.nominal <= self.high):
            raise InvalidParamsError(
                f"prediction range must satisfy low <= nominal <= high, "
                f"got {self.low} / {self.nominal} / {self.high}"
            )

    def to_jsonable(self) -> dict:
        return {
            "method": self.method,
            "nominal": self.nominal,
            "low": self.low,
            "high": self.high,
        }


def _check_range_factors(range_factors: tuple[float, float]) -> tuple[float, float]:
    low_f, high_f = range_factors
    if not (0 <= low_f <= 1 <= high_f):
        raise InvalidParamsError(
            f"range factors must satisfy 0 <= low <= 1 <= high, got {range_factors}",
            "range_factors",
        )
    return low_f, high_f


def backfire_function_points(size: SizeEstimate) -> float:
    """Estimate function points from LOC: (loc / gearing) x complexity."""
    return (size.loc / size.loc_per_fp) * size.complexity_adjustment


def predict_defects_from_fp(
    fp: float,
    params: DensityParams,
    range_factors: tuple[float, float] = DEFAULT_RANGE_FACTORS,
) -> DefectPrediction:
    """Predict defects at system-test entry from a function-point count."""
    if fp < 0:
        raise InvalidParamsError(f"fp must be >= 0, got {fp}", "fp")
    low_f, high_f = _check_range_factors(range_factors)
    nominal = fp * params.defects_per_fp * params.adjustment
    return DefectPrediction(
        nominal=nominal, low=nominal * low_f, high=nominal * high_f, method="fp"
    )


def predict_defects_from_loc(
    loc: float,
    params: DensityParams,
    range_factors: tuple[float, float] = DEFAULT_RANGE_FACTORS,
) -> DefectPrediction:
    """Predict defects at system-test entry from a LOC density rate."""
    if loc < 0:
        raise InvalidParamsError(f"loc must be >= 0, got {loc}", "loc")
    low_f, high_f = _check_range_factors(range_factors)
    nominal = (loc / 1000.0) * params.defects_per_kloc * params.adjustment
    return DefectPrediction(
        nominal=nominal,
        low=nominal * low_f,
        high=nominal * high_f,
        method="loc_density",
    )


def direct_prediction(
    nominal: float,
    low: float | None = None,
    high: float | None = None,
    range_factors: tuple[float, float] = DEFAULT_RANGE_FACTORS,
) -> DefectPrediction:
    """Wrap an externally supplied defect count, filling the range if absent."""
    low_f, high_f = _check_range_factors(range_factors)
    if low is None:
        low = nominal * low_f
    if high is None:
        high = nominal * high_f
    return DefectPrediction(nominal=nominal, low=low, high=high, method="direct")
