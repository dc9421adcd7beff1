"""Seeded Monte Carlo phase-transition experiments.

For each (strategy, measurement count m) cell, draw fresh signals from the
model, fresh Gaussian matrices, solve weighted basis pursuit, and tally
exact recoveries.  Every trial's randomness derives from the seed tuple
(master_seed, strategy index, m, trial index) through
``numpy.random.SeedSequence``, so results are bit-reproducible and
independent of execution order; cells may therefore run in parallel
processes without changing the output.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from wbp.model import (
    AppliedStrategy,
    PartitionModel,
    Strategy,
    apply_strategy,
    generate_instance,
    make_model,
)
from wbp.solver import BPProblem, SolverError, recovery_success, weighted_bp
from wbp.thresholds import minimize_threshold

DEFAULT_SUCCESS_THRESHOLD = 0.001
DEFAULT_TRIALS = 200


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one phase-transition experiment."""

    model: PartitionModel
    strategies: tuple[Strategy, ...]
    m_values: tuple[int, ...]
    trials_per_m: int = DEFAULT_TRIALS
    master_seed: int = 0
    success_threshold: float = DEFAULT_SUCCESS_THRESHOLD
    solver_tol: float = 1e-8

    def __post_init__(self):
        if len(self.strategies) == 0:
            raise ValueError("at least one strategy required")
        if len(self.m_values) == 0:
            raise ValueError("at least one measurement count required")
        for m in self.m_values:
            if not (isinstance(m, int) and 1 <= m <= self.model.d):
                raise ValueError(f"m values must be integers in [1, d], got {m}")
        if self.trials_per_m < 1:
            raise ValueError("trials_per_m must be >= 1")
        if not (isinstance(self.master_seed, int) and self.master_seed >= 0):
            raise ValueError("master_seed must be a non-negative integer")
        if self.success_threshold < 0.0:
            raise ValueError("success_threshold must be non-negative")


@dataclass(frozen=True)
class CurvePoint:
    """Tally for one (strategy, m) cell of the curve."""

    strategy: str
    m: int
    trials: int
    successes: int
    rate: float
    halfwidth3: float  # 3 * binomial standard error of rate
    predicted_threshold: float  # d * m_tilde for this strategy


@dataclass(frozen=True)
class PhaseCurve:
    """All cells of one experiment plus solver-failure diagnostics."""

    points: tuple[CurvePoint, ...]
    solver_failures: int = 0

    def series(self, strategy_label: str) -> tuple[np.ndarray, np.ndarray]:
        """(m values, success rates) for one strategy, ordered by m."""
        pts = sorted(
            (p for p in self.points if p.strategy == strategy_label), key=lambda p: p.m
        )
        if not pts:
            raise KeyError(f"no points for strategy {strategy_label!r}")
        return np.array([p.m for p in pts]), np.array([p.rate for p in pts])

    def predicted_threshold(self, strategy_label: str) -> float:
        for p in self.points:
            if p.strategy == strategy_label:
                return p.predicted_threshold
        raise KeyError(f"no points for strategy {strategy_label!r}")

    def crossing(self, strategy_label: str) -> Optional[float]:
        """Interpolated m where the success rate first reaches 1/2.

        Returns the leftmost grid m if the curve starts at or above 1/2
        (left-censored) and None if it never gets there.
        """
        ms, rates = self.series(strategy_label)
        if rates[0] >= 0.5:
            return float(ms[0])
        for i in range(1, len(ms)):
            if rates[i] >= 0.5:
                lo, hi = rates[i - 1], rates[i]
                frac = (0.5 - lo) / (hi - lo)
                return float(ms[i - 1] + frac * (ms[i] - ms[i - 1]))
        return None

    def to_csv(self) -> str:
        lines = ["strategy,m,trials,successes,rate,halfwidth3,predicted_threshold"]
        for p in self.points:
            lines.append(
                f"{p.strategy},{p.m},{p.trials},{p.successes},"
                f"{p.rate:.6f},{p.halfwidth3:.6f},{p.predicted_threshold:.6f}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_csv())


def _trial_outcome(
    config: ExperimentConfig, applied: AppliedStrategy, strategy_index: int, m: int, trial_index: int
) -> tuple[bool, bool]:
    """(success, solver_failed) for one seeded trial."""
    ss = np.random.SeedSequence((config.master_seed, strategy_index, m, trial_index))
    inst_ss, mat_ss = ss.spawn(2)
    instance = generate_instance(config.model, inst_ss)
    x0 = instance.x0
    A = np.random.default_rng(mat_ss).standard_normal((m, config.model.d))
    problem = BPProblem(A=A, b=A @ x0, w=applied.original_weights.expand())
    try:
        solution = weighted_bp(problem, tol=config.solver_tol)
    except SolverError:
        return False, True
    if solution.x_hat is None:
        return False, True
    return recovery_success(solution.x_hat, x0, config.success_threshold), False


def run_trial(config: ExperimentConfig, strategy: Strategy, m: int, trial_index: int) -> bool:
    """Run one seeded trial; solver failures count as recovery failures."""
    strategy_index = config.strategies.index(strategy)
    applied = apply_strategy(config.model, strategy)
    ok, _ = _trial_outcome(config, applied, strategy_index, m, trial_index)
    return ok


def _run_cell(args) -> tuple[int, int, int, int]:
    """(strategy_index, m, successes, solver_failures) for one grid cell."""
    config, strategy_index, m = args
    applied = apply_strategy(config.model, config.strategies[strategy_index])
    successes = 0
    failures = 0
    for t in range(config.trials_per_m):
        ok, failed = _trial_outcome(config, applied, strategy_index, m, t)
        successes += int(ok)
        failures += int(failed)
    return strategy_index, m, successes, failures


def default_jobs() -> int:
    """Worker count for experiment cells, from the WBP_JOBS env var (default 1)."""
    try:
        return max(1, int(os.environ.get("WBP_JOBS", "1")))
    except ValueError:
        return 1


def run_phase_curve(config: ExperimentConfig, jobs: Optional[int] = None) -> PhaseCurve:
    """Run the full (strategy x m) grid and aggregate a :class:`PhaseCurve`.

    ``jobs > 1`` distributes grid cells over worker processes; the output is
    identical either way because every trial is seeded independently.
    """
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    predicted = {}
    for strategy in config.strategies:
        applied = apply_strategy(config.model, strategy)
        result = minimize_threshold(applied.effective_model, applied.weights)
        predicted[strategy.label] = config.model.d * result.m_tilde

    cells = [(config, si, m) for si in range(len(config.strategies)) for m in config.m_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_cell, cells, chunksize=1))
    else:
        outcomes = [_run_cell(cell) for cell in cells]

    points = []
    total_failures = 0
    for strategy_index, m, successes, failures in outcomes:
        label = config.strategies[strategy_index].label
        n = config.trials_per_m
        rate = successes / n
        points.append(
            CurvePoint(
                strategy=label,
                m=m,
                trials=n,
                successes=successes,
                rate=rate,
                halfwidth3=3.0 * float(np.sqrt(rate * (1.0 - rate) / n)),
                predicted_threshold=predicted[label],
            )
        )
        total_failures += failures
    return PhaseCurve(points=tuple(points), solver_failures=total_failures)


def load_experiment_config(source) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from a JSON file path or a dict.

    Schema: ``{d, blocks, alpha, strategy | strategies, m_values,
    trials_per_m, seed, success_threshold}``.  Strategy entries are either
    kind strings or objects ``{"kind": ..., "merge": [...], "zero_blocks":
    [...]}``; alpha entries may be fraction strings.
    """
    if isinstance(source, dict):
        raw = dict(source)
    else:
        with open(source) as fh:
            raw = json.load(fh)
    try:
        model = make_model(raw["d"], raw["blocks"], raw["alpha"])
        if "strategies" in raw:
            strategy_specs = raw["strategies"]
        else:
            strategy_specs = [raw["strategy"]]
        strategies = tuple(Strategy.from_spec(s) for s in strategy_specs)
        m_values = tuple(int(m) for m in raw["m_values"])
    except KeyError as exc:
        raise ValueError(f"experiment config missing field {exc}") from exc
    return ExperimentConfig(
        model=model,
        strategies=strategies,
        m_values=m_values,
        trials_per_m=int(raw.get("trials_per_m", DEFAULT_TRIALS)),
        master_seed=int(raw.get("seed", 0)),
        success_threshold=float(raw.get("success_threshold", DEFAULT_SUCCESS_THRESHOLD)),
    )
