"""Per-step concentration diagnostics for a nibble trajectory."""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_TOLERANCE = 0.05  # relative; a calibration choice, reported only


@dataclass(frozen=True)
class StepDiagnostic:
    step: int
    size_ratio: float
    size_target: float
    degree_ratio: float
    degree_target: float
    size_ok: bool
    degree_ok: bool
    degree_exceeds_D: bool


@dataclass
class TrajectoryReport:
    p: float
    eps: float
    tolerance: float
    steps: list[StepDiagnostic] = field(default_factory=list)
    terminal_ratio: float | None = None

    @property
    def size_within_fraction(self) -> float:
        return sum(s.size_ok for s in self.steps) / len(self.steps) if self.steps else 1.0

    @property
    def degree_within_fraction(self) -> float:
        return sum(s.degree_ok for s in self.steps) / len(self.steps) if self.steps else 1.0

    @property
    def flagged_steps(self) -> list[int]:
        return [s.step for s in self.steps if s.degree_exceeds_D]

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "eps": self.eps,
            "tolerance": self.tolerance,
            "size_within_fraction": self.size_within_fraction,
            "degree_within_fraction": self.degree_within_fraction,
            "flagged_steps": self.flagged_steps,
            "terminal_ratio": self.terminal_ratio,
            "steps": [vars(s) for s in self.steps],
        }


def trajectory_report(trajectory: list[dict], p: float, eps: float, tolerance: float = DEFAULT_TOLERANCE,
                      terminal_ratio: float | None = None) -> TrajectoryReport:
    """Compare measured shrinkage per step with 1 - p/(1+3eps/4) (sizes)
    and 1 - p/(1+eps/4) (degrees of vertices with degree >= D/4).

    Sizes pass when within +-tolerance (relative) of the target; degrees
    pass when at most target * (1 + tolerance). Steps where the measured
    maximum average degree exceeded D(t) are flagged.
    """
    size_target = 1 - p / (1 + 3 * eps / 4)
    degree_target = 1 - p / (1 + eps / 4)
    report = TrajectoryReport(p, eps, tolerance, terminal_ratio=terminal_ratio)
    for row in trajectory[1:]:
        sr = row.get("size_ratio", 1.0)
        dr = row.get("degree_ratio", 1.0)
        report.steps.append(StepDiagnostic(
            step=row["step"],
            size_ratio=sr,
            size_target=size_target,
            degree_ratio=dr,
            degree_target=degree_target,
            size_ok=abs(sr - size_target) <= tolerance * size_target,
            degree_ok=dr <= degree_target * (1 + tolerance),
            degree_exceeds_D=row["max_avg_degree"] > row["D"] * (1 + 1e-12),
        ))
    return report
