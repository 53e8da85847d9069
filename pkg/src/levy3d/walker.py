"""Intermittent Levy-walk trials on the torus.

A trial starts at a uniform point, takes ballistic steps of sampled length in
uniform directions, and detection is tested only at step endpoints; positions
during flight are never examined.  Elapsed time is the summed step length
(unit speed); a scan phase costs nothing.  A start already inside the target
counts as detection at time zero.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import DiagnosticError, InvalidInputError
from .geometry import Target
from .sampler import StepDist, sample_direction

DEFAULT_STEP_CAP = 10**8
_FIRST_BLOCK = 256
_MAX_BLOCK = 32768


@dataclass(frozen=True)
class WalkParams:
    """One Levy process instance: exponent, torus volume, cutoff, detection radius."""

    mu: float
    n: float
    ell_max: float = None
    d: float = 1.0

    def __post_init__(self):
        if not 1.0 < self.mu <= 3.0:
            raise InvalidInputError(f"mu must lie in (1, 3], got {self.mu}")
        if self.n < 8.0:
            raise InvalidInputError(f"torus volume must be >= 8, got {self.n}")
        if self.d < 1.0:
            raise InvalidInputError(f"detection radius must be >= 1, got {self.d}")
        if self.ell_max is None:
            object.__setattr__(self, "ell_max", self.half_width)
        if not 1.0 < self.ell_max <= self.half_width + 1e-9:
            raise InvalidInputError(
                f"ell_max must lie in (1, n^(1/3)/2], got {self.ell_max}"
            )

    @property
    def half_width(self) -> float:
        return self.n ** (1.0 / 3.0) / 2.0

    def step_dist(self) -> StepDist:
        return StepDist(self.mu, self.ell_max)


@dataclass(frozen=True)
class TrialOutcome:
    """Detection time (summed step lengths) and step count for one trial."""

    detect_time: float
    detect_steps: int
    truncated: bool


@dataclass(frozen=True)
class BatchResult:
    """Per-trial outcomes plus aggregates over the non-truncated trials."""

    outcomes: tuple
    mean_time: float
    sem_time: float
    mean_steps: float
    sem_steps: float
    truncated_fraction: float
    trials: int


def _check_target(params: WalkParams, target: Target) -> None:
    target.check_fits(params.half_width)
    if target.d != params.d:
        raise InvalidInputError(
            f"target detection radius {target.d} differs from walk d={params.d}"
        )


def run_trial(params: WalkParams, target: Target, rng: np.random.Generator,
              step_cap: int = DEFAULT_STEP_CAP) -> TrialOutcome:
    """Run one trial; returns a truncated outcome if step_cap is reached first."""
    if step_cap < 1:
        raise InvalidInputError(f"step_cap must be >= 1, got {step_cap}")
    _check_target(params, target)
    hw = params.half_width
    dist = params.step_dist()
    center = np.asarray(target.center)

    pos = rng.uniform(-hw, hw, 3)
    if geometry._contains_disp(target, geometry.wrap_coords(pos - center, hw))[0]:
        return TrialOutcome(0.0, 0, False)

    steps = 0
    elapsed = 0.0
    block = _FIRST_BLOCK
    while steps < step_cap:
        k = min(block, step_cap - steps)
        lengths = dist.sample(rng, k)
        disp = lengths[:, None] * sample_direction(rng, k)
        trail = geometry.wrap_coords(pos + np.cumsum(disp, axis=0), hw)
        hits = geometry._contains_disp(
            target, geometry.wrap_coords(trail - center, hw)
        )
        cum_time = np.cumsum(lengths)
        if hits.any():
            i = int(np.argmax(hits))
            return TrialOutcome(elapsed + float(cum_time[i]), steps + i + 1, False)
        steps += k
        elapsed += float(cum_time[-1])
        pos = trail[-1]
        block = min(block * 2, _MAX_BLOCK)
    return TrialOutcome(elapsed, steps, True)


def sample_path(params: WalkParams, rng: np.random.Generator, steps: int) -> np.ndarray:
    """Endpoint positions of `steps` steps from a uniform start, shape (steps+1, 3)."""
    hw = params.half_width
    dist = params.step_dist()
    disp = dist.sample(rng, steps)[:, None] * sample_direction(rng, steps)
    start = rng.uniform(-hw, hw, 3)
    path = np.empty((steps + 1, 3))
    path[0] = start
    path[1:] = geometry.wrap_coords(start + np.cumsum(disp, axis=0), hw)
    return path


def _trial_seeds(master_seed: int, trials: int):
    return np.random.SeedSequence(master_seed).spawn(trials)


def _run_trial_seeded(args):
    params, target, seed_seq, step_cap = args
    return run_trial(params, target, np.random.default_rng(seed_seq), step_cap)


def _resolve_workers(workers) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("LEVY3D_THREADS")
    if env:
        return max(1, int(env))
    return 1


def run_batch(params: WalkParams, target: Target, trials: int, master_seed: int,
              step_cap: int = DEFAULT_STEP_CAP, workers=None) -> BatchResult:
    """Run independent trials with per-trial RNG streams derived from the master seed.

    Trial ``i`` always consumes the stream spawned at index ``i``, so results
    do not depend on execution order or worker count.  Aggregates exclude
    truncated trials but report their fraction.
    """
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials}")
    _check_target(params, target)
    seeds = _trial_seeds(master_seed, trials)
    jobs = [(params, target, s, step_cap) for s in seeds]
    n_workers = _resolve_workers(workers)
    if n_workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            outcomes = list(pool.map(_run_trial_seeded, jobs,
                                     chunksize=max(1, trials // (4 * n_workers))))
    else:
        outcomes = [_run_trial_seeded(j) for j in jobs]

    kept_t = np.array([o.detect_time for o in outcomes if not o.truncated])
    kept_m = np.array([o.detect_steps for o in outcomes if not o.truncated], dtype=float)
    if kept_t.size == 0:
        raise DiagnosticError(
            f"all {trials} trials hit the step cap ({step_cap}); no usable outcomes"
        )
    k = kept_t.size
    sem_t = float(np.std(kept_t, ddof=1) / math.sqrt(k)) if k > 1 else 0.0
    sem_m = float(np.std(kept_m, ddof=1) / math.sqrt(k)) if k > 1 else 0.0
    return BatchResult(
        outcomes=tuple(outcomes),
        mean_time=float(kept_t.mean()),
        sem_time=sem_t,
        mean_steps=float(kept_m.mean()),
        sem_steps=sem_m,
        truncated_fraction=1.0 - k / trials,
        trials=trials,
    )


def wald_residual(batch: BatchResult, tau: float):
    """Mean and SEM of ``T_i - tau * m_i`` over non-truncated trials.

    The expected residual is zero for any intermittent walk, which makes
    ``|mean| <= 3 sem`` a runtime identity check.
    """
    diff = np.array(
        [o.detect_time - tau * o.detect_steps for o in batch.outcomes if not o.truncated]
    )
    if diff.size < 2:
        raise DiagnosticError("need at least two non-truncated trials")
    return float(diff.mean()), float(np.std(diff, ddof=1) / math.sqrt(diff.size))
