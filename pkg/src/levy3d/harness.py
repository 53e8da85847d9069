"""Experiment orchestration: parameter sweeps, scenario presets, CSV records.

A sweep is a grid of (target, mu) cells over one torus volume.  Every cell
gets its own RNG stream keyed by the cell's content (scenario name, shape,
parameters, mu), so adding or removing cells never perturbs the others, and
rerunning an identical spec reproduces identical records byte for byte.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, replace

import numpy as np

from . import bounds, geometry
from .errors import DiagnosticError, InvalidInputError
from .geometry import ShapeKind, Target
from .walker import DEFAULT_STEP_CAP, WalkParams, run_batch

CSV_COLUMNS = [
    "scenario", "mu", "n", "shape", "p1", "p2", "d",
    "delta_B", "delta_P", "elong", "V",
    "trials", "truncated_frac",
    "mean_time", "sem_time", "mean_steps", "sem_steps",
    "universal_lb", "cauchy_ub", "regime_lb", "overhead",
]

_SHAPE_ORDER = {"ball": 0, "disc": 1, "line": 2, "rect": 3}


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: scenario name, mu grid, target list, and run settings."""

    name: str
    n: float
    mu_values: tuple
    targets: tuple
    trials: int
    master_seed: int
    step_cap: int = DEFAULT_STEP_CAP

    def __post_init__(self):
        if not self.mu_values or not self.targets:
            raise InvalidInputError("sweep needs at least one mu and one target")
        if self.trials < 1:
            raise InvalidInputError(f"trials must be >= 1, got {self.trials}")


@dataclass(frozen=True)
class SweepRecord:
    """One grid cell: simulation aggregates plus geometry and bound columns."""

    scenario: str
    mu: float
    n: float
    shape: str
    p1: float
    p2: float | None
    d: float
    delta_B: float
    delta_P: float
    elong: float
    V: float
    trials: int
    truncated_frac: float
    mean_time: float
    sem_time: float
    mean_steps: float
    sem_steps: float
    universal_lb: float | None = None
    cauchy_ub: float | None = None
    regime_lb: float | None = None
    overhead: float | None = None


def record_target(rec: SweepRecord) -> Target:
    """Rebuild the cell's target from its record columns (axis-agnostic)."""
    kind = ShapeKind(rec.shape)
    if kind is ShapeKind.BALL:
        return Target.ball(rec.p1, rec.d)
    if kind is ShapeKind.DISC:
        return Target.disc(rec.p1, rec.d)
    if kind is ShapeKind.LINE:
        return Target.line(rec.p1, rec.d)
    return Target.rect(rec.p1, rec.p2, rec.d)


def _cell_seed(master_seed: int, name: str, target: Target, mu: float, n: float) -> int:
    """Content-addressed per-cell seed: stable under grid edits elsewhere."""
    key = (f"{name}|{target.kind.value}|{target.p1:.17g}|{target.p2}|"
           f"{target.d:.17g}|{mu:.17g}|{n:.17g}")
    c1 = zlib.crc32(key.encode())
    c2 = zlib.crc32(key[::-1].encode())
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(c1, c2))
    return int(ss.generate_state(1, np.uint64)[0])


def _record_sort_key(rec: SweepRecord):
    return (_SHAPE_ORDER[rec.shape], rec.p1, rec.p2 or 0.0, rec.mu)


def run_sweep(spec: SweepSpec, workers=None) -> list[SweepRecord]:
    """Run every cell; cells whose trials all truncate are flagged, not fatal.

    Output is sorted by (shape, size, mu) and is a pure function of the spec.
    """
    records = []
    for target in spec.targets:
        desc = geometry.descriptors(target)
        for mu in spec.mu_values:
            params = WalkParams(mu=mu, n=spec.n, d=target.d)
            seed = _cell_seed(spec.master_seed, spec.name, target, mu, spec.n)
            try:
                batch = run_batch(params, target, spec.trials, seed,
                                  spec.step_cap, workers=workers)
                agg = (batch.mean_time, batch.sem_time, batch.mean_steps,
                       batch.sem_steps, batch.truncated_fraction)
            except DiagnosticError:
                agg = (math.nan, math.nan, math.nan, math.nan, 1.0)
            records.append(SweepRecord(
                scenario=spec.name, mu=mu, n=spec.n,
                shape=target.kind.value, p1=target.p1, p2=target.p2, d=target.d,
                delta_B=desc.delta_B, delta_P=desc.delta_P,
                elong=desc.elongation, V=desc.volume,
                trials=spec.trials, truncated_frac=agg[4],
                mean_time=agg[0], sem_time=agg[1],
                mean_steps=agg[2], sem_steps=agg[3],
            ))
    records.sort(key=_record_sort_key)
    return records


def join_bounds(records) -> list[SweepRecord]:
    """Attach universal/Cauchy/regime bounds and the overhead column."""
    out = []
    for rec in records:
        rep = bounds.evaluate(record_target(rec), rec.mu, rec.n)
        over = (rec.mean_time / rep.universal_lb
                if math.isfinite(rec.mean_time) else math.nan)
        out.append(replace(rec, universal_lb=rep.universal_lb,
                           cauchy_ub=rep.cauchy_ub, regime_lb=rep.regime_lb,
                           overhead=over))
    return out


# ---------------------------------------------------------------------------
# scenario presets
# ---------------------------------------------------------------------------

_MU_GRID = tuple(round(1.2 + 0.2 * i, 1) for i in range(10))  # 1.2 .. 3.0
_MU_COARSE = (1.2, 1.5, 2.0, 2.5, 3.0)
DEFAULT_N = 64**3
DEFAULT_SEED = 20240


def _matched_projection_sizes(hw: float, d: float):
    """Line lengths filling the torus, with ball/disc radii of equal delta_P."""
    l_cap = 2.0 * (0.95 * hw - d)
    sizes = []
    for frac in (0.3, 0.6, 0.9):
        L = frac * l_cap
        delta_p = 2.0 * d * L + math.pi * d * d
        R = math.sqrt(delta_p / math.pi)
        sizes.append((L, R))
    return sizes


def scenario_library(n: float = DEFAULT_N, trials: int = None,
                     master_seed: int = DEFAULT_SEED,
                     step_cap: int = DEFAULT_STEP_CAP, d: float = 1.0) -> dict:
    """Named sweep presets, sized relative to the torus so they always fit.

    * ``cauchy-shapes``     -- mu = 2; line/disc/ball matched on delta_P, 3 sizes.
    * ``relative-ball``     -- mu grid 1.2..3.0; balls of 3 radii.
    * ``relative-disk``     -- same with discs.
    * ``relative-line``     -- same with lines.
    * ``ratio-fixed-volume``  -- lines and balls of equal volume.
    * ``ratio-fixed-surface`` -- lines and balls of equal surface area.
    * ``rect-delta``        -- rectangles with sides F^delta x F^(1-delta)
      (fixed side product F), nominal delta 0.5..0.9, coarse mu grid.
    """
    hw = n ** (1.0 / 3.0) / 2.0
    if hw <= 2.0 * d:
        raise InvalidInputError(f"torus n={n} too small for presets with d={d}")

    def spec(name, mus, targets, default_trials):
        return SweepSpec(name=name, n=n, mu_values=tuple(mus),
                         targets=tuple(targets),
                         trials=trials if trials is not None else default_trials,
                         master_seed=master_seed, step_cap=step_cap)

    lib = {}

    matched = []
    for L, R in _matched_projection_sizes(hw, d):
        matched += [Target.line(L, d), Target.disc(R, d), Target.ball(R, d)]
    lib["cauchy-shapes"] = spec("cauchy-shapes", (2.0,), matched, 500)

    radii = (hw / 8.0, hw / 4.0, hw / 2.0)
    lib["relative-ball"] = spec(
        "relative-ball", _MU_GRID, [Target.ball(r, d) for r in radii], 200)
    lib["relative-disk"] = spec(
        "relative-disk", _MU_GRID, [Target.disc(r, d) for r in radii], 200)
    lengths = (hw / 4.0, hw / 2.0, 1.5 * hw)
    lib["relative-line"] = spec(
        "relative-line", _MU_GRID, [Target.line(length, d) for length in lengths], 200)

    vol_targets = []
    for L in lengths:
        line = Target.line(L, d)
        R = (3.0 * geometry.descriptors(line).volume / (4.0 * math.pi)) ** (1.0 / 3.0)
        vol_targets += [line, Target.ball(max(R, d), d)]
    lib["ratio-fixed-volume"] = spec("ratio-fixed-volume", _MU_COARSE, vol_targets, 200)

    surf_targets = []
    for L in lengths:
        line = Target.line(L, d)
        R = math.sqrt(geometry.descriptors(line).surface_area / (4.0 * math.pi))
        surf_targets += [line, Target.ball(max(R, d), d)]
    lib["ratio-fixed-surface"] = spec("ratio-fixed-surface", _MU_COARSE, surf_targets, 200)

    F = min(40.0, (0.9 * hw) ** (1.0 / 0.9))
    rects = [Target.rect(F**delta, F ** (1.0 - delta), d)
             for delta in (0.5, 0.6, 0.7, 0.8, 0.9)]
    lib["rect-delta"] = spec("rect-delta", _MU_COARSE, rects, 200)

    return lib


# ---------------------------------------------------------------------------
# CSV contract
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def record_to_row(rec: SweepRecord) -> list[str]:
    return [_fmt(getattr(rec, col)) for col in CSV_COLUMNS]


def records_to_csv(records, provenance: dict = None) -> str:
    """Serialize records with the fixed column order; floats keep 17 digits.

    The optional provenance dict is embedded as a ``#`` comment line so the
    file is self-describing yet byte-reproducible.
    """
    lines = []
    if provenance is not None:
        lines.append("# levy3d-config: " + json.dumps(provenance, sort_keys=True))
    lines.append(",".join(CSV_COLUMNS))
    for rec in records:
        lines.append(",".join(record_to_row(rec)))
    return "\n".join(lines) + "\n"


def write_csv(records, path, provenance: dict = None) -> None:
    with open(path, "w") as fh:
        fh.write(records_to_csv(records, provenance))


def _parse(col: str, text: str):
    if col in ("scenario", "shape"):
        return text
    if col == "trials":
        return int(text)
    if text == "":
        return None
    return float(text)


def read_csv(path) -> list[SweepRecord]:
    """Parse a sweep CSV back into records; rejects unknown schemas."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    body = [ln for ln in lines if not ln.startswith("#")]
    if not body or body[0].split(",") != CSV_COLUMNS:
        raise InvalidInputError(
            f"CSV header does not match the documented schema {CSV_COLUMNS}")
    records = []
    for ln in body[1:]:
        cells = ln.split(",")
        if len(cells) != len(CSV_COLUMNS):
            raise InvalidInputError(f"malformed CSV row: {ln!r}")
        kwargs = {col: _parse(col, cell) for col, cell in zip(CSV_COLUMNS, cells)}
        records.append(SweepRecord(**kwargs))
    return records
