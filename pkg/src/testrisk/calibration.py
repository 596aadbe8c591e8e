"""Calibration from historical release data.

Removal efficiency of a phase is Card's ratio E = N / (N + S): defects the
phase found over those plus everything surfaced later.  Density rates are
calibrated as the mean defects-per-size over past releases.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    EmptyHistoryError,
    InvalidParamsError,
    NoDefectsError,
    NoUsableHistoryError,
    UnknownPhaseError,
)
from .estimation import DensityParams, SizeEstimate, backfire_function_points


@dataclass(frozen=True)
class PhaseRecord:
    phase_name: str
    order: int
    defects_found: int

    def __post_init__(self):
        if self.defects_found < 0:
            raise InvalidParamsError(
                f"defects_found must be >= 0, got {self.defects_found}",
                f"phase.{self.phase_name}",
            )


@dataclass(frozen=True)
class ReleaseHistory:
    release_name: str
    phases: tuple[PhaseRecord, ...]
    size: SizeEstimate | None = None

    def __post_init__(self):
        orders = [p.order for p in self.phases]
        if len(set(orders)) != len(orders):
            raise InvalidParamsError(
                f"duplicate phase order in release {self.release_name!r}",
                f"history.{self.release_name}",
            )
        object.__setattr__(
            self, "phases", tuple(sorted(self.phases, key=lambda p: p.order))
        )

    def total_defects(self) -> int:
        return sum(p.defects_found for p in self.phases)


@dataclass(frozen=True)
class DreResult:
    phase_name: str
    efficiency: float
    found: int  # N: defects found by the phase itself
    subsequent: int  # S: defects found by all later phases
    caution: bool  # True when E = 1.0 (plans require dre < 1)

    def to_jsonable(self) -> dict:
        return {
            "phase": self.phase_name,
            "efficiency": self.efficiency,
            "found": self.found,
            "subsequent": self.subsequent,
            "caution": self.caution,
        }


def dre_of_phase(history: ReleaseHistory, phase: str) -> DreResult:
    """Card's E = N/(N+S) for one phase of a release history."""
    target = None
    for p in history.phases:
        if p.phase_name == phase:
            target = p
            break
    if target is None:
        raise UnknownPhaseError(
            f"phase {phase!r} not in release {history.release_name!r}", f"phase.{phase}"
        )
    n = target.defects_found
    s = sum(p.defects_found for p in history.phases if p.order > target.order)
    if n + s == 0:
        raise NoDefectsError(
            f"no defects found at or after phase {phase!r}; efficiency undefined",
            f"phase.{phase}",
        )
    e = n / (n + s)
    return DreResult(
        phase_name=phase, efficiency=e, found=n, subsequent=s, caution=(e == 1.0)
    )


@dataclass(frozen=True)
class DreProfile:
    entries: tuple[DreResult, ...]
    notes: tuple[str, ...]


def dre_profile(history: ReleaseHistory) -> DreProfile:
    """Per-phase efficiencies; phases with no observable defects are noted."""
    if not history.phases:
        raise EmptyHistoryError(
            f"release {history.release_name!r} has no phases",
            f"history.{history.release_name}",
        )
    entries = []
    notes = []
    for p in history.phases:
        s = sum(q.defects_found for q in history.phases if q.order > p.order)
        if p.defects_found + s == 0:
            notes.append(
                f"phase {p.phase_name!r}: no defects at or after it, efficiency undefined"
            )
            continue
        entries.append(dre_of_phase(history, p.phase_name))
    return DreProfile(entries=tuple(entries), notes=tuple(notes))


def calibrate_density(
    histories: list[ReleaseHistory], weighted: bool = False
) -> tuple[DensityParams, list[str]]:
    """Mean defects-per-KLOC and defects-per-FP over sized histories.

    Histories without size information (or with zero LOC) are skipped with a
    note.  ``weighted`` switches from the unweighted mean to a LOC-weighted
    one.
    """
    kloc_rates: list[tuple[float, float]] = []  # (rate, weight)
    fp_rates: list[tuple[float, float]] = []
    notes: list[str] = []
    for h in histories:
        if h.size is None or h.size.loc <= 0:
            notes.append(f"release {h.release_name!r}: no usable size, skipped")
            continue
        total = h.total_defects()
        kloc = h.size.loc / 1000.0
        fp = backfire_function_points(h.size)
        kloc_rates.append((total / kloc, h.size.loc))
        if fp > 0:
            fp_rates.append((total / fp, h.size.loc))
    if not kloc_rates:
        raise NoUsableHistoryError("no history with size information", "histories")

    def mean(pairs):
        if weighted:
            wsum = sum(w for _, w in pairs)
            return sum(r * w for r, w in pairs) / wsum
        return sum(r for r, _ in pairs) / len(pairs)

    params = DensityParams(
        defects_per_fp=mean(fp_rates) if fp_rates else 0.0,
        defects_per_kloc=mean(kloc_rates),
        adjustment=1.0,
    )
    return params, notes
