"""Extragradient and proximal-point iterations with theorem-checking reports.

Both solvers record full trajectories (iterates, half iterates, cached
operator values) so that the rate reports can evaluate every convergence
theorem as a per-step inequality with an explicit signed slack.  A negative
slack beyond tolerance means a theorem was violated numerically, which for a
correct implementation on a genuinely monotone instance should never happen.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .instances import VIInstance, instance_to_json
from .measures import MeasureReport, gap, measure_report, natural_residual, tangent_residual
from .sets import UnsupportedSetError

FEASIBILITY_TOL = 1e-9


class StepSizeError(ValueError):
    """eta * L >= 1 where the theory (or the inner solve) requires less."""


class InnerSolveError(RuntimeError):
    """Picard iteration for the proximal step ran out of budget."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"proximal inner solve did not reach tolerance in {iterations} iterations "
            f"(last residual {residual:.3e})"
        )
        self.residual = residual


class ReferenceSolveError(RuntimeError):
    """Reference-solution run exhausted its budget; carries the best residual."""

    def __init__(self, best_residual: float):
        super().__init__(f"reference solve stalled at natural residual {best_residual:.3e}")
        self.best_residual = best_residual


@dataclass(frozen=True)
class SolverConfig:
    eta: float
    T: int
    inner_tol: float = 1e-12
    inner_max: int = 10_000
    record_half: bool = True

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("step size eta must be positive")
        if self.T < 0:
            raise ValueError("iteration count T must be nonnegative")


@dataclass
class Trajectory:
    """Recorded run: ``T+1`` iterates, ``T`` half iterates when recorded."""

    instance: VIInstance
    config: SolverConfig
    iterates: list[np.ndarray]
    half_iterates: list[np.ndarray] | None
    operator_values: list[np.ndarray]
    half_operator_values: list[np.ndarray] | None

    def __len__(self) -> int:
        return len(self.iterates)

    def measure_series(self, D: float | None = None) -> list[MeasureReport]:
        out = []
        for k, z in enumerate(self.iterates):
            z_half = None
            if self.half_iterates is not None and k < len(self.half_iterates):
                z_half = self.half_iterates[k]
            z_next = self.iterates[k + 1] if k + 1 < len(self.iterates) else None
            out.append(measure_report(self.instance, z, D=D, z_half=z_half, z_next=z_next))
        return out


def _warn_or_raise_step(inst: VIInstance, eta: float, strict: bool) -> None:
    if eta * inst.operator.lipschitz >= 1.0:
        msg = (
            f"eta * L = {eta * inst.operator.lipschitz:.6g} >= 1; "
            "the convergence theorems do not apply"
        )
        if strict:
            raise StepSizeError(msg)
        warnings.warn(msg, stacklevel=3)


def eg_step(inst: VIInstance, eta: float, z_k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One extragradient update: half step with F(z_k), full step with F(z_half)."""
    if eta <= 0:
        raise ValueError("step size eta must be positive")
    z_k = np.asarray(z_k, dtype=float)
    z_half = inst.set.project(z_k - eta * inst.operator(z_k))
    z_next = inst.set.project(z_k - eta * inst.operator(z_half))
    return z_half, z_next


def eg_run(inst: VIInstance, config: SolverConfig, z0: np.ndarray, strict: bool = False) -> Trajectory:
    """Run EG for ``config.T`` steps from a feasible start; fully deterministic."""
    _warn_or_raise_step(inst, config.eta, strict)
    z = np.asarray(z0, dtype=float)
    if inst.set.infeasibility(z) > FEASIBILITY_TOL:
        raise ValueError("starting point is infeasible")
    iterates = [z.copy()]
    op_values = [inst.operator(z)]
    halfs: list[np.ndarray] | None = [] if config.record_half else None
    half_ops: list[np.ndarray] | None = [] if config.record_half else None
    for _ in range(config.T):
        z_half = inst.set.project(z - config.eta * op_values[-1])
        F_half = inst.operator(z_half)
        z = inst.set.project(z - config.eta * F_half)
        if halfs is not None:
            halfs.append(z_half)
            half_ops.append(F_half)
        iterates.append(z.copy())
        op_values.append(inst.operator(z))
    return Trajectory(
        instance=inst,
        config=config,
        iterates=iterates,
        half_iterates=halfs,
        operator_values=op_values,
        half_operator_values=half_ops,
    )


def pp_step(
    inst: VIInstance,
    eta: float,
    z_k: np.ndarray,
    inner_tol: float = 1e-12,
    inner_max: int = 10_000,
) -> np.ndarray:
    """One proximal-point update ``z+ = proj(z - eta F(z+))`` by Picard iteration.

    The fixed-point map ``w -> proj(z - eta F(w))`` contracts with factor
    ``eta * L``, so ``eta * L < 1`` is a hard requirement here, not just a
    theory assumption.
    """
    if eta * inst.operator.lipschitz >= 1.0:
        raise StepSizeError(
            f"pp_step needs eta * L < 1 for the inner contraction "
            f"(got {eta * inst.operator.lipschitz:.6g})"
        )
    z_k = np.asarray(z_k, dtype=float)
    w = z_k.copy()
    residual = math.inf
    for _ in range(inner_max):
        w_new = inst.set.project(z_k - eta * inst.operator(w))
        residual = float(np.linalg.norm(w_new - w))
        w = w_new
        if residual <= inner_tol:
            return w
    raise InnerSolveError(residual, inner_max)


def pp_run(inst: VIInstance, config: SolverConfig, z0: np.ndarray) -> Trajectory:
    """Run PP for ``config.T`` steps; trajectories carry no half iterates."""
    z = np.asarray(z0, dtype=float)
    if inst.set.infeasibility(z) > FEASIBILITY_TOL:
        raise ValueError("starting point is infeasible")
    iterates = [z.copy()]
    op_values = [inst.operator(z)]
    for _ in range(config.T):
        z = pp_step(inst, config.eta, z, config.inner_tol, config.inner_max)
        iterates.append(z.copy())
        op_values.append(inst.operator(z))
    return Trajectory(
        instance=inst,
        config=config,
        iterates=iterates,
        half_iterates=None,
        operator_values=op_values,
        half_operator_values=None,
    )


def solve_reference(
    inst: VIInstance,
    eta: float,
    tol: float = 1e-11,
    max_iter: int = 2_000_000,
    z0: np.ndarray | None = None,
) -> np.ndarray:
    """High-accuracy solution by running EG until the natural residual is tiny."""
    if eta * inst.operator.lipschitz >= 1.0:
        raise StepSizeError("solve_reference needs eta * L < 1")
    z = (
        inst.set.project(np.zeros(inst.dimension))
        if z0 is None
        else np.asarray(z0, dtype=float)
    )
    best = math.inf
    for _ in range(max_iter):
        F_z = inst.operator(z)
        moved = inst.set.project(z - F_z)
        residual = float(np.linalg.norm(z - moved))
        best = min(best, residual)
        if residual <= tol:
            return z
        z_half = inst.set.project(z - eta * F_z)
        z = inst.set.project(z - eta * inst.operator(z_half))
    raise ReferenceSolveError(best)


# ---------------------------------------------------------------------------
# Rate reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateCheck:
    """Per-step record of one theorem: bound minus actual, signed."""

    name: str
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]

    @property
    def slack(self) -> tuple[float, ...]:
        return tuple(r - l for l, r in zip(self.lhs, self.rhs))

    @property
    def worst_slack(self) -> float:
        return min(self.slack, default=math.inf)


@dataclass(frozen=True)
class RateReport:
    checks: dict[str, RateCheck]
    tolerance: float

    @property
    def worst_slack(self) -> float:
        return min((c.worst_slack for c in self.checks.values()), default=math.inf)

    @property
    def passed(self) -> bool:
        return self.worst_slack >= -self.tolerance

    def to_json(self) -> dict:
        return {
            "tolerance": float(self.tolerance),
            "passed": bool(self.passed),
            "worst_slack": None if math.isinf(self.worst_slack) else float(self.worst_slack),
            "checks": {
                name: {
                    "lhs": [float(x) for x in c.lhs],
                    "rhs": [float(x) for x in c.rhs],
                    "worst_slack": None if math.isinf(c.worst_slack) else float(c.worst_slack),
                }
                for name, c in self.checks.items()
            },
        }


def _distances_to(iterates: Sequence[np.ndarray], z_star: np.ndarray) -> np.ndarray:
    return np.array([float(np.linalg.norm(z - z_star)) for z in iterates])


def _gap_series(inst, iterates, D, indices) -> tuple[list[float], list[int]]:
    values, kept = [], []
    for k in indices:
        try:
            values.append(gap(inst, iterates[k], D))
            kept.append(k)
        except UnsupportedSetError:
            return [], []
    return values, kept


def rate_report_eg(
    trajectory: Trajectory,
    z_star: np.ndarray,
    D: float | None = None,
    tolerance: float = 1e-8,
    gap_stride: int = 1,
) -> RateReport:
    """Check every EG rate theorem along a recorded run.

    Verifies, per step: the best-iterate descent inequality, the projection
    contraction between half and full steps, the distance-to-tangent-residual
    bound, tangent-residual monotonicity, the last-iterate gap rate, and (when
    the operator is strongly monotone) the linear rate and the gap-to-distance
    bound.  Requires half iterates and a reference solution with natural
    residual at most 1e-10.
    """
    inst = trajectory.instance
    eta = trajectory.config.eta
    if trajectory.half_iterates is None:
        raise ValueError("rate_report_eg needs a trajectory recorded with half iterates")
    if eta * inst.operator.lipschitz >= 1.0:
        raise StepSizeError("rate reports require eta * L < 1")
    if natural_residual(inst, z_star) > 1e-10:
        raise ValueError("z_star is not accurate enough for rate checks")

    L = inst.operator.lipschitz
    gamma = inst.operator.gamma
    etaL = eta * L
    z_star = np.asarray(z_star, dtype=float)
    zs = trajectory.iterates
    halfs = trajectory.half_iterates
    T = len(halfs)
    dist = _distances_to(zs, z_star)
    half_dist = np.array([float(np.linalg.norm(zs[k] - halfs[k])) for k in range(T)])
    r_tan = np.array([tangent_residual(inst, z) for z in zs])
    if D is None:
        D = 2.0 * dist[0] if dist[0] > 0 else 1.0

    checks: dict[str, RateCheck] = {}
    checks["best_iterate_descent"] = RateCheck(
        name="best_iterate_descent",
        lhs=tuple(dist[k + 1] ** 2 + (1.0 - etaL**2) * half_dist[k] ** 2 for k in range(T)),
        rhs=tuple(dist[k] ** 2 for k in range(T)),
    )
    checks["projection_contraction"] = RateCheck(
        name="projection_contraction",
        lhs=tuple(float(np.linalg.norm(halfs[k] - zs[k + 1])) for k in range(T)),
        rhs=tuple(etaL * half_dist[k] for k in range(T)),
    )
    checks["residual_from_half_step"] = RateCheck(
        name="residual_from_half_step",
        lhs=tuple(r_tan[k + 1] for k in range(T)),
        rhs=tuple((1.0 + etaL + etaL**2) * half_dist[k] / eta for k in range(T)),
    )
    checks["tangent_residual_monotone"] = RateCheck(
        name="tangent_residual_monotone",
        lhs=tuple(r_tan[k + 1] for k in range(T)),
        rhs=tuple(r_tan[k] for k in range(T)),
    )

    rate_constant = 3.0 * D * dist[0] / (eta * math.sqrt(1.0 - etaL**2))
    gap_indices = list(range(1, T + 1, max(1, gap_stride)))
    gap_values, kept = _gap_series(inst, zs, D, gap_indices)
    if kept:
        checks["last_iterate_gap_rate"] = RateCheck(
            name="last_iterate_gap_rate",
            lhs=tuple(gap_values),
            rhs=tuple(rate_constant / math.sqrt(k) for k in kept),
        )
        if gamma > 0:
            decay = 1.0 + 2.0 * eta * gamma * (1.0 - etaL) ** 2
            checks["strongly_monotone_linear_rate"] = RateCheck(
                name="strongly_monotone_linear_rate",
                lhs=tuple(gap_values),
                rhs=tuple(decay ** (-(k - 1) / 2.0) * rate_constant for k in kept),
            )
            checks["gap_bounds_distance"] = RateCheck(
                name="gap_bounds_distance",
                lhs=tuple(dist[k] ** 2 for k in kept),
                rhs=tuple(g / gamma for g in gap_values),
            )
    return RateReport(checks=checks, tolerance=tolerance)


def rate_report_pp(
    trajectory: Trajectory,
    z_star: np.ndarray,
    D: float | None = None,
    tolerance: float = 1e-8,
    gap_stride: int = 1,
) -> RateReport:
    """Check the proximal-point theorems along a recorded run.

    Per step: the descent inequality, monotone consecutive distances, the
    ``1/sqrt(k)`` distance drop, the ``1/k`` squared-residual drop, and the
    gap rate.  The tolerance grows with the inner-solve tolerance since the
    theorems assume exact proximal steps.
    """
    inst = trajectory.instance
    eta = trajectory.config.eta
    if eta * inst.operator.lipschitz >= 1.0:
        raise StepSizeError("rate reports require eta * L < 1")
    if natural_residual(inst, z_star) > 1e-10:
        raise ValueError("z_star is not accurate enough for rate checks")

    zs = trajectory.iterates
    T = len(zs) - 1
    z_star = np.asarray(z_star, dtype=float)
    dist = _distances_to(zs, z_star)
    steps = np.array([float(np.linalg.norm(zs[k + 1] - zs[k])) for k in range(T)])
    r_tan = np.array([tangent_residual(inst, z) for z in zs])
    if D is None:
        D = 2.0 * dist[0] if dist[0] > 0 else 1.0

    # inexact prox: each step may be off by inner_tol/(1 - eta L), and errors
    # accumulate linearly along the run
    slack_per_step = trajectory.config.inner_tol / max(1.0 - eta * inst.operator.lipschitz, 1e-6)
    tol = tolerance + 10.0 * slack_per_step * max(T, 1)

    checks: dict[str, RateCheck] = {}
    checks["best_iterate_descent"] = RateCheck(
        name="best_iterate_descent",
        lhs=tuple(dist[k + 1] ** 2 + steps[k] ** 2 for k in range(T)),
        rhs=tuple(dist[k] ** 2 for k in range(T)),
    )
    checks["step_monotone"] = RateCheck(
        name="step_monotone",
        lhs=tuple(steps[k + 1] for k in range(T - 1)),
        rhs=tuple(steps[k] for k in range(T - 1)),
    )
    checks["step_drop_rate"] = RateCheck(
        name="step_drop_rate",
        lhs=tuple(steps[k - 1] for k in range(1, T + 1)),
        rhs=tuple(dist[0] / math.sqrt(k) for k in range(1, T + 1)),
    )
    checks["residual_drop_rate"] = RateCheck(
        name="residual_drop_rate",
        lhs=tuple(r_tan[k] ** 2 for k in range(1, T + 1)),
        rhs=tuple(dist[0] ** 2 / (eta**2 * k) for k in range(1, T + 1)),
    )
    gap_indices = list(range(1, T + 1, max(1, gap_stride)))
    gap_values, kept = _gap_series(inst, zs, D, gap_indices)
    if kept:
        checks["gap_rate"] = RateCheck(
            name="gap_rate",
            lhs=tuple(gap_values),
            rhs=tuple(D * dist[0] / (eta * math.sqrt(k)) for k in kept),
        )
    return RateReport(checks=checks, tolerance=tol)


MEASURE_SERIES = {
    "natural-residual": lambda traj: [natural_residual(traj.instance, z) for z in traj.iterates],
    "tangent-residual": lambda traj: [tangent_residual(traj.instance, z) for z in traj.iterates],
    "half-step-dist": lambda traj: [
        float(np.linalg.norm(traj.iterates[k] - traj.half_iterates[k]))
        for k in range(len(traj.half_iterates or []))
    ],
    "full-step-dist": lambda traj: [
        float(np.linalg.norm(traj.iterates[k] - traj.iterates[k + 1]))
        for k in range(len(traj.iterates) - 1)
    ],
}


def best_iterate_index(trajectory: Trajectory, measure_name: str) -> int:
    """Index of the smallest value of the named measure series (ties: first)."""
    if measure_name not in MEASURE_SERIES:
        raise KeyError(
            f"unknown measure {measure_name!r}; choose from {sorted(MEASURE_SERIES)}"
        )
    series = MEASURE_SERIES[measure_name](trajectory)
    if not series:
        raise ValueError("trajectory has no values for this measure")
    return int(np.argmin(series))


# ---------------------------------------------------------------------------
# Trajectory export
# ---------------------------------------------------------------------------


def write_trajectory_csv(fp: TextIO, trajectory: Trajectory) -> None:
    n = trajectory.instance.dimension
    writer = csv.writer(fp)
    header = ["k"] + [f"z{i}" for i in range(n)]
    if trajectory.half_iterates is not None:
        header += [f"zhalf{i}" for i in range(n)]
    writer.writerow(header)
    for k, z in enumerate(trajectory.iterates):
        row = [k] + [f"{x:.17g}" for x in z]
        if trajectory.half_iterates is not None:
            if k < len(trajectory.half_iterates):
                row += [f"{x:.17g}" for x in trajectory.half_iterates[k]]
            else:
                row += [""] * n
        writer.writerow(row)


def trajectory_to_json(trajectory: Trajectory) -> dict:
    return {
        "instance": instance_to_json(trajectory.instance),
        "config": {
            "eta": trajectory.config.eta,
            "T": trajectory.config.T,
            "inner_tol": trajectory.config.inner_tol,
            "inner_max": trajectory.config.inner_max,
            "record_half": trajectory.config.record_half,
        },
        "iterates": [z.tolist() for z in trajectory.iterates],
        "half_iterates": None
        if trajectory.half_iterates is None
        else [z.tolist() for z in trajectory.half_iterates],
    }
