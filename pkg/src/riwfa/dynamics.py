"""Best-response iteration until a fixed point: sequential, simultaneous, async.

One iteration is a full round: a Gauss-Seidel sweep over users in index order
(sequential), a Jacobi update of all users from the previous profile
(simultaneous), or one tick of an asynchronous schedule in which a random
subset of users update from possibly stale profile snapshots.  Iteration
stops once the largest per-user power change stays below ``tol`` for a full
round of updates (for async schedules: for max_staleness + 1 consecutive
ticks, which the schedule generator guarantees covers every user).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .model import (
    Scenario,
    check_profile,
    normalized_interference,
    uniform_profile,
    user_utility,
    zero_profile,
)
from .waterfill import best_response

SCHEDULE_KINDS = ("sequential", "simultaneous", "asynchronous")

# Support threshold for the orthogonality index reported with each run,
# as a fraction of the smallest power budget.
SUPPORT_THRESHOLD_FRACTION = 1e-3


@dataclass(frozen=True)
class Schedule:
    """Update order for the iteration.

    For ``asynchronous`` schedules, ``updates[t, i]`` says whether user i
    updates at tick t and ``snapshots[t, i]`` is the (virtual) time of the
    profile it reacts to, with  0 <= t - snapshots[t, i] <= max_staleness.
    Sequential and simultaneous schedules carry no arrays.
    """

    kind: str
    updates: np.ndarray | None = None
    snapshots: np.ndarray | None = None
    max_staleness: int = 0

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f"kind must be one of {SCHEDULE_KINDS}, got {self.kind!r}")
        if self.kind == "asynchronous":
            if self.updates is None or self.snapshots is None:
                raise ValueError("asynchronous schedules need updates and snapshots arrays")
            updates = np.asarray(self.updates, dtype=bool)
            snapshots = np.asarray(self.snapshots, dtype=int)
            if updates.ndim != 2 or updates.shape != snapshots.shape:
                raise ValueError("updates and snapshots must both have shape (T, M)")
            ticks = np.arange(updates.shape[0])[:, None]
            staleness = ticks - snapshots
            if np.any(staleness < 0) or np.any(staleness > self.max_staleness):
                raise ValueError("snapshots violate the staleness bound")
            object.__setattr__(self, "updates", updates)
            object.__setattr__(self, "snapshots", snapshots)
        elif self.updates is not None or self.snapshots is not None:
            raise ValueError(f"{self.kind} schedules do not take update arrays")

    def __len__(self) -> int:
        return 0 if self.updates is None else self.updates.shape[0]


def generate_schedule(kind: str, num_users: int, max_iter: int,
                      update_probability: float = 1.0, max_staleness: int = 0,
                      seed: int | None = None) -> Schedule:
    """Build a schedule; asynchronous ones are drawn from ``seed``.

    Each user updates with probability ``update_probability`` per tick and is
    forced to update once its last update is ``max_staleness`` ticks old, so
    no user ever goes more than max_staleness ticks without updating.
    Snapshot times are drawn uniformly from the allowed staleness window.
    """
    if kind not in SCHEDULE_KINDS:
        raise ValueError(f"kind must be one of {SCHEDULE_KINDS}, got {kind!r}")
    if kind != "asynchronous":
        return Schedule(kind=kind)
    if not 0.0 < update_probability <= 1.0:
        raise ValueError("update_probability must lie in (0, 1]")
    if max_staleness < 0:
        raise ValueError("max_staleness must be >= 0")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    rng = np.random.default_rng(seed)
    updates = np.zeros((max_iter, num_users), dtype=bool)
    snapshots = np.zeros((max_iter, num_users), dtype=int)
    last_update = np.full(num_users, -1)
    for t in range(max_iter):
        for i in range(num_users):
            forced = (t - last_update[i]) >= max_staleness
            if forced or rng.random() < update_probability:
                updates[t, i] = True
                last_update[i] = t
                low = max(0, t - max_staleness)
                snapshots[t, i] = rng.integers(low, t + 1) if low < t else t
            else:
                snapshots[t, i] = t
    return Schedule(kind="asynchronous", updates=updates, snapshots=snapshots,
                    max_staleness=max_staleness)


@dataclass(frozen=True)
class RunConfig:
    """Iteration controls: initial profile, stopping tolerance, iteration cap."""

    init: str | np.ndarray = "zero"
    tol: float = 1e-8
    max_iter: int = 10_000
    record_trajectory: bool = False

    def __post_init__(self):
        if isinstance(self.init, str):
            if self.init not in ("zero", "uniform"):
                raise ValueError("init must be 'zero', 'uniform', or a profile array")
        else:
            object.__setattr__(self, "init", np.asarray(self.init, dtype=float))
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class EquilibriumReport:
    """Outcome of a best-response run.

    ``residual`` is the fixed-point residual of the final profile (max over
    users of the sup-norm gap to their exact best response).  Utilities are
    evaluated at the nominal interference the profile actually induces.
    ``step_residuals[t]`` is the largest power change during iteration t+1.
    """

    profile: np.ndarray
    converged: bool
    iterations: int
    residual: float
    per_user_utility: np.ndarray
    social_utility: float
    orthogonality_index: float
    degenerate_uncertainty: bool = False
    trajectory: list[np.ndarray] | None = None
    step_residuals: list[float] | None = field(default=None, repr=False)


def fixed_point_residual(profile: np.ndarray, scenario: Scenario) -> float:
    """max_i || best_response_i(profile) - profile_i ||_inf; 0 exactly at
    an equilibrium of the (robust) game."""
    profile = np.asarray(profile, dtype=float)
    worst = 0.0
    for i in range(scenario.num_users):
        reply = best_response(i, scenario.channel, profile, scenario.constraints,
                              scenario.uncertainty).p
        worst = max(worst, float(np.abs(reply - profile[i]).max()))
    return worst


def _initial_profile(scenario: Scenario, config: RunConfig) -> np.ndarray:
    if isinstance(config.init, str):
        if config.init == "zero":
            return zero_profile(scenario.num_users, scenario.num_subchannels)
        return uniform_profile(scenario.constraints)
    return check_profile(config.init, scenario.constraints).copy()


def _support_threshold(scenario: Scenario) -> float:
    return SUPPORT_THRESHOLD_FRACTION * float(scenario.constraints.p_max.min())


def run(scenario: Scenario, schedule: Schedule, config: RunConfig = RunConfig()) -> EquilibriumReport:
    """Iterate best responses under ``schedule`` until the stopping rule fires.

    Deterministic: equal scenarios, schedules and configs give bitwise-equal
    reports.  Every intermediate profile is feasible because water-filling
    respects budgets and masks.
    """
    from .analysis import orthogonality_index, per_user_utilities  # local import, no cycle at module load

    m = scenario.num_users
    profile = _initial_profile(scenario, config)
    trajectory = [profile.copy()] if config.record_trajectory else None
    step_residuals: list[float] = []
    converged = False
    iterations = 0

    if schedule.kind == "asynchronous":
        total_ticks = min(config.max_iter, len(schedule))
        window = schedule.max_staleness + 1
        recent = {0: profile.copy()}
        quiet = 0
        for t in range(total_ticks):
            iterations = t + 1
            delta = 0.0
            nxt = profile.copy()
            for i in range(m):
                if schedule.updates[t, i]:
                    snap = recent[int(schedule.snapshots[t, i])]
                    reply = best_response(i, scenario.channel, snap,
                                          scenario.constraints, scenario.uncertainty).p
                    delta = max(delta, float(np.abs(reply - profile[i]).max()))
                    nxt[i] = reply
            profile = nxt
            recent[t + 1] = profile.copy()
            stale_floor = t + 1 - schedule.max_staleness
            for key in [k for k in recent if k < stale_floor]:
                del recent[key]
            step_residuals.append(delta)
            if config.record_trajectory:
                trajectory.append(profile.copy())
            quiet = quiet + 1 if delta <= config.tol else 0
            if quiet >= window:
                converged = True
                break
    else:
        sequential = schedule.kind == "sequential"
        for t in range(config.max_iter):
            iterations = t + 1
            delta = 0.0
            if sequential:
                for i in range(m):
                    reply = best_response(i, scenario.channel, profile,
                                          scenario.constraints, scenario.uncertainty).p
                    delta = max(delta, float(np.abs(reply - profile[i]).max()))
                    profile[i] = reply
            else:
                nxt = profile.copy()
                for i in range(m):
                    reply = best_response(i, scenario.channel, profile,
                                          scenario.constraints, scenario.uncertainty).p
                    delta = max(delta, float(np.abs(reply - profile[i]).max()))
                    nxt[i] = reply
                profile = nxt
            step_residuals.append(delta)
            if config.record_trajectory:
                trajectory.append(profile.copy())
            if delta <= config.tol:
                converged = True
                break

    utilities = per_user_utilities(profile, scenario.channel)
    return EquilibriumReport(
        profile=profile,
        converged=converged,
        iterations=iterations,
        residual=fixed_point_residual(profile, scenario),
        per_user_utility=utilities,
        social_utility=float(utilities.sum()),
        orthogonality_index=orthogonality_index(profile, _support_threshold(scenario)),
        degenerate_uncertainty=scenario.uncertainty.is_degenerate(),
        trajectory=trajectory,
        step_residuals=step_residuals,
    )


def write_trajectory_csv(report: EquilibriumReport, path,
                         preamble: str | None = None) -> None:
    """Long-format trajectory: one row per (iteration, user, subchannel).
    ``preamble`` becomes a leading '#' comment line."""
    if report.trajectory is None:
        raise ValueError("run was not configured with record_trajectory=True")
    with open(path, "w", newline="") as fh:
        if preamble is not None:
            fh.write(f"# {preamble}\n")
        writer = csv.writer(fh)
        writer.writerow(["iteration", "user", "subchannel", "power"])
        for t, profile in enumerate(report.trajectory):
            for i in range(profile.shape[0]):
                for k in range(profile.shape[1]):
                    writer.writerow([t, i, k, repr(float(profile[i, k]))])


def write_summary_csv(report: EquilibriumReport, scenario: Scenario, path,
                      preamble: str | None = None) -> None:
    """Per-iteration summary: largest power change and social utility.
    ``preamble`` becomes a leading '#' comment line."""
    if report.trajectory is None:
        raise ValueError("run was not configured with record_trajectory=True")
    with open(path, "w", newline="") as fh:
        if preamble is not None:
            fh.write(f"# {preamble}\n")
        writer = csv.writer(fh)
        writer.writerow(["iteration", "residual", "social_utility"])
        for t in range(1, len(report.trajectory)):
            profile = report.trajectory[t]
            social = sum(
                user_utility(profile[i], normalized_interference(scenario.channel, profile, i))
                for i in range(scenario.num_users)
            )
            writer.writerow([t, repr(report.step_residuals[t - 1]), repr(float(social))])
