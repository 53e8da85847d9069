"""Lattice Levy walk on the discrete 3D torus, with exact small-instance oracles.

The walker sits on a ``side^3`` torus graph.  Each step it stays put with
probability 1/2 at zero time cost; otherwise it draws a jump length ``ell``
from ``p(ell) ~ ell^-mu`` (``1 <= ell <= ell_max``), lands on a node chosen
uniformly among those at Manhattan distance ``ell``, and pays time ``ell``.
Detection is checked at every step endpoint.  Step counts include lazy steps;
elapsed time does not.

Small instances admit exact expected hitting steps via the absorption linear
system, and exact total-variation mixing by distribution iteration; both act
as oracles for the Monte Carlo paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DiagnosticError, InvalidInputError

DEFAULT_STEP_CAP = 10**8
_FIRST_BLOCK = 512
_MAX_BLOCK = 65536
_DENSE_STATE_CAP = 20**3


# ---------------------------------------------------------------------------
# Manhattan shells in Z^3
# ---------------------------------------------------------------------------

def shell_size(ell: int) -> int:
    """Number of lattice points at Manhattan distance ``ell`` (= 4 ell^2 + 2)."""
    if ell < 1:
        raise InvalidInputError(f"shell radius must be >= 1, got {ell}")
    return 4 * ell * ell + 2


def _ring_point(r: int, j: int) -> tuple[int, int]:
    """j-th point (of 4r) on the 2D Manhattan ring |y| + |z| = r, r >= 1."""
    q, t = divmod(j, r)
    if q == 0:
        return r - t, t
    if q == 1:
        return -t, r - t
    if q == 2:
        return t - r, -t
    return t, t - r


def _ring_index(r: int, y: int, z: int) -> int:
    if y >= 1 and z >= 0:
        return 0 * r + z
    if y <= 0 and z >= 1:
        return 1 * r - y
    if y <= -1 and z <= 0:
        return 2 * r - z
    return 3 * r + y


def _block_sizes(ell: int) -> list[int]:
    """Sub-block sizes of the shell enumeration, indexed by i = |x|."""
    sizes = [4 * ell]
    sizes += [8 * (ell - i) for i in range(1, ell)]
    sizes.append(2)
    return sizes


def shell_point(ell: int, idx: int) -> tuple[int, int, int]:
    """idx-th point of the Manhattan shell, for idx in [0, shell_size(ell))."""
    size = shell_size(ell)
    if not 0 <= idx < size:
        raise InvalidInputError(f"index {idx} outside [0, {size})")
    for i, block in enumerate(_block_sizes(ell)):
        if idx < block:
            r = ell - i
            if r == 0:
                return (ell, 0, 0) if idx == 0 else (-ell, 0, 0)
            if i == 0:
                y, z = _ring_point(r, idx)
                return 0, y, z
            sign = 1 if idx < 4 * r else -1
            y, z = _ring_point(r, idx % (4 * r))
            return sign * i, y, z
        idx -= block
    raise AssertionError("unreachable")


def shell_index(ell: int, point) -> int:
    """Inverse of :func:`shell_point`; ``point`` must lie on the shell."""
    x, y, z = (int(v) for v in point)
    if abs(x) + abs(y) + abs(z) != ell:
        raise InvalidInputError(f"{(x, y, z)} is not at Manhattan distance {ell}")
    i = abs(x)
    base = sum(_block_sizes(ell)[:i])
    r = ell - i
    if r == 0:
        return base + (0 if x > 0 else 1)
    j = _ring_index(r, y, z)
    if i == 0:
        return base + j
    return base + (0 if x > 0 else 4 * r) + j


def shell_points(ell: int) -> np.ndarray:
    """All shell points in canonical index order, shape (4 ell^2 + 2, 3)."""
    return np.array([shell_point(ell, i) for i in range(shell_size(ell))], dtype=np.int64)


class ShellIndex:
    """Precomputed shell tables for O(1) uniform shell sampling up to ``ell_max``."""

    def __init__(self, ell_max: int):
        if ell_max < 1:
            raise InvalidInputError(f"ell_max must be >= 1, got {ell_max}")
        self.ell_max = ell_max
        tables = [shell_points(ell) for ell in range(1, ell_max + 1)]
        self.sizes = np.array([0] + [t.shape[0] for t in tables], dtype=np.int64)
        self.base = np.zeros(ell_max + 1, dtype=np.int64)
        self.base[1:] = np.cumsum(self.sizes[1:]) - self.sizes[1:]
        self.flat = np.concatenate(tables, axis=0)

    def sample(self, rng: np.random.Generator, ells: np.ndarray) -> np.ndarray:
        """Uniform shell point for each entry of ``ells``; shape (len(ells), 3)."""
        u = rng.integers(0, self.sizes[ells])
        return self.flat[self.base[ells] + u]


# ---------------------------------------------------------------------------
# the lattice walk
# ---------------------------------------------------------------------------

def length_pmf(mu: float, ell_max: int) -> np.ndarray:
    """Normalized jump-length probabilities p(ell) ~ ell^-mu for ell = 1..ell_max."""
    if not 1.0 < mu <= 3.0:
        raise InvalidInputError(f"mu must lie in (1, 3], got {mu}")
    w = np.arange(1, ell_max + 1, dtype=float) ** (-mu)
    return w / w.sum()


@dataclass(frozen=True)
class LatticeWalkParams:
    """Discrete walk on a ``side^3`` torus graph (n = side^3 nodes)."""

    side: int
    mu: float
    ell_max: int = None
    lazy_prob: float = 0.5

    def __post_init__(self):
        if self.side < 2:
            raise InvalidInputError(f"side must be >= 2, got {self.side}")
        if not 1.0 < self.mu <= 3.0:
            raise InvalidInputError(f"mu must lie in (1, 3], got {self.mu}")
        if self.ell_max is None:
            object.__setattr__(self, "ell_max", max(1, self.side // 2))
        if not 1 <= self.ell_max <= self.side // 2:
            raise InvalidInputError(
                f"ell_max must lie in [1, side/2], got {self.ell_max}"
            )
        if not 0.0 <= self.lazy_prob < 1.0:
            raise InvalidInputError(f"lazy_prob must lie in [0, 1), got {self.lazy_prob}")

    @property
    def n(self) -> int:
        return self.side**3


def sample_jump(params: LatticeWalkParams, rng: np.random.Generator,
                shells: ShellIndex = None):
    """One step: returns ``(offset, time_cost)``; lazy steps are (0,0,0) at cost 0."""
    offsets, costs = sample_jumps(params, rng, 1, shells)
    return offsets[0], int(costs[0])


def sample_jumps(params: LatticeWalkParams, rng: np.random.Generator, size: int,
                 shells: ShellIndex = None):
    """Vectorized steps: ``(offsets (size, 3), time_costs (size,))``."""
    if shells is None:
        shells = ShellIndex(params.ell_max)
    pmf = length_pmf(params.mu, params.ell_max)
    cum = np.cumsum(pmf)
    offsets = np.zeros((size, 3), dtype=np.int64)
    costs = np.zeros(size, dtype=np.int64)
    moving = rng.random(size) >= params.lazy_prob
    k = int(moving.sum())
    if k:
        ells = np.searchsorted(cum, rng.random(k), side="right") + 1
        ells = np.minimum(ells, params.ell_max)
        offsets[moving] = shells.sample(rng, ells)
        costs[moving] = ells
    return offsets, costs


@dataclass(frozen=True)
class LatticeBatchResult:
    """Aggregates of lattice detection trials (time, steps incl. lazy, moves)."""

    mean_time: float
    sem_time: float
    mean_steps: float
    sem_steps: float
    mean_moves: float
    sem_moves: float
    truncated_fraction: float
    trials: int


def line_nodes(side: int, L: int) -> np.ndarray:
    """The axis-parallel target path: nodes (x, 0, 0) for x = 0..L-1."""
    nodes = np.zeros((L, 3), dtype=np.int64)
    nodes[:, 0] = np.arange(L)
    return nodes


def _line_hits(positions: np.ndarray, L: int) -> np.ndarray:
    """Membership of lattice positions (coords in [0, side)) in the line target."""
    return (positions[:, 0] < L) & (positions[:, 1] == 0) & (positions[:, 2] == 0)


def hit_line(params: LatticeWalkParams, L: int, trials: int, master_seed: int,
             step_cap: int = DEFAULT_STEP_CAP) -> LatticeBatchResult:
    """Mean detection time of an axis-parallel path of ``L`` nodes.

    ``L = side`` is the degenerate full ring, where detection reduces to the
    walk's 2D projection hitting a single node.  Requires ``mu > 2`` (the
    regime where the line is found in near-optimal time).
    """
    if params.mu <= 2.0:
        raise InvalidInputError(f"line-target runs need mu > 2, got {params.mu}")
    if not 1 <= L <= params.side:
        raise InvalidInputError(f"L must lie in [1, side], got {L}")
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials}")
    shells = ShellIndex(params.ell_max)
    side = params.side
    seeds = np.random.SeedSequence(master_seed).spawn(trials)
    times = np.empty(trials)
    steps = np.empty(trials, dtype=np.int64)
    moves = np.empty(trials, dtype=np.int64)
    truncated = np.zeros(trials, dtype=bool)
    for i, seq in enumerate(seeds):
        rng = np.random.default_rng(seq)
        pos = rng.integers(0, side, 3)
        if _line_hits(pos[None, :], L)[0]:
            times[i], steps[i], moves[i] = 0.0, 0, 0
            continue
        t_acc = 0
        s_acc = 0
        mv_acc = 0
        block = _FIRST_BLOCK
        done = False
        while s_acc < step_cap:
            k = min(block, step_cap - s_acc)
            offsets, costs = sample_jumps(params, rng, k, shells)
            trail = np.mod(pos + np.cumsum(offsets, axis=0), side)
            hits = _line_hits(trail, L)
            cum_t = np.cumsum(costs)
            if hits.any():
                j = int(np.argmax(hits))
                times[i] = t_acc + float(cum_t[j])
                steps[i] = s_acc + j + 1
                moves[i] = mv_acc + int(np.count_nonzero(costs[: j + 1]))
                done = True
                break
            t_acc += int(cum_t[-1])
            s_acc += k
            mv_acc += int(np.count_nonzero(costs))
            pos = trail[-1]
            block = min(block * 2, _MAX_BLOCK)
        if not done:
            times[i], steps[i], moves[i] = float(t_acc), s_acc, mv_acc
            truncated[i] = True

    kept = ~truncated
    if not kept.any():
        raise DiagnosticError(f"all {trials} lattice trials hit the step cap")

    def _agg(v):
        vv = np.asarray(v, dtype=float)[kept]
        sem = float(np.std(vv, ddof=1) / math.sqrt(vv.size)) if vv.size > 1 else 0.0
        return float(vv.mean()), sem

    mt, st = _agg(times)
    ms, ss = _agg(steps)
    mm, sm = _agg(moves)
    return LatticeBatchResult(mt, st, ms, ss, mm, sm,
                              1.0 - kept.sum() / trials, trials)


# ---------------------------------------------------------------------------
# explicit kernels and exact oracles
# ---------------------------------------------------------------------------

def lazy_srw_cycle_kernel(m: int, lazy_prob: float = 0.5) -> np.ndarray:
    """Lazy simple random walk on an m-cycle."""
    P = np.zeros((m, m))
    idx = np.arange(m)
    P[idx, idx] = lazy_prob
    P[idx, (idx + 1) % m] += (1.0 - lazy_prob) / 2.0
    P[idx, (idx - 1) % m] += (1.0 - lazy_prob) / 2.0
    return P


def levy_cycle_kernel(m: int, mu: float, ell_max: int,
                      lazy_prob: float = 0.5) -> np.ndarray:
    """Lazy Levy walk on an m-cycle: jump +-ell with p(ell) ~ ell^-mu."""
    if not 1 <= ell_max <= m // 2:
        raise InvalidInputError(f"ell_max must lie in [1, m/2], got {ell_max}")
    pmf = length_pmf(mu, ell_max)
    P = np.zeros((m, m))
    idx = np.arange(m)
    P[idx, idx] = lazy_prob
    for ell, p in enumerate(pmf, start=1):
        P[idx, (idx + ell) % m] += (1.0 - lazy_prob) * p / 2.0
        P[idx, (idx - ell) % m] += (1.0 - lazy_prob) * p / 2.0
    return P


def projected_line_kernel(m: int, mu: float, ell_max: int,
                          lazy_prob: float = 0.5) -> np.ndarray:
    """One-axis projection of the 3D lattice walk, as a cycle kernel.

    A shell jump of length ``ell`` projects to axis offset ``k`` with
    probability ``count(k) / (4 ell^2 + 2)`` where ``count(k) = 4 (ell - |k|)``
    for ``|k| < ell`` and 1 at ``|k| = ell``.
    """
    if not 1 <= ell_max <= m // 2:
        raise InvalidInputError(f"ell_max must lie in [1, m/2], got {ell_max}")
    pmf = length_pmf(mu, ell_max)
    P = np.zeros((m, m))
    idx = np.arange(m)
    P[idx, idx] = lazy_prob
    for ell, p in enumerate(pmf, start=1):
        size = shell_size(ell)
        for k in range(-ell, ell + 1):
            count = 1 if abs(k) == ell else 4 * (ell - abs(k))
            if k == 0:
                count = 4 * ell
            P[idx, (idx + k) % m] += (1.0 - lazy_prob) * p * count / size
    return P


def lattice_torus_kernel(side: int, mu: float, ell_max: int = None,
                         lazy_prob: float = 0.5) -> np.ndarray:
    """Full transition matrix of the lattice walk on a side^3 torus.

    Node index is ``x * side^2 + y * side + z``.  Dense; capped at 20^3 states.
    """
    params = LatticeWalkParams(side, mu, ell_max, lazy_prob)
    n = params.n
    if n > _DENSE_STATE_CAP:
        raise InvalidInputError(f"dense kernel capped at {_DENSE_STATE_CAP} states, got {n}")
    pmf = length_pmf(params.mu, params.ell_max)
    coords = np.indices((side, side, side)).reshape(3, -1).T  # node -> (x, y, z)
    P = np.zeros((n, n))
    P[np.arange(n), np.arange(n)] = lazy_prob
    for ell, p in enumerate(pmf, start=1):
        pts = shell_points(ell)
        w = (1.0 - lazy_prob) * p / pts.shape[0]
        for z in pts:
            dest = np.mod(coords + z, side)
            j = dest[:, 0] * side * side + dest[:, 1] * side + dest[:, 2]
            P[np.arange(n), j] += w
    return P


def exact_hitting_steps(P: np.ndarray, target_states) -> np.ndarray:
    """Expected steps to reach ``target_states`` from every state, by linear solve.

    Solves ``(I - Q) h = 1`` on the non-target states; ``h = 0`` on targets.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    if P.ndim != 2 or P.shape[1] != n:
        raise InvalidInputError(f"kernel must be square, got shape {P.shape}")
    if n > _DENSE_STATE_CAP:
        raise InvalidInputError(f"dense solve capped at {_DENSE_STATE_CAP} states, got {n}")
    if not np.allclose(P.sum(axis=1), 1.0, atol=1e-9):
        raise InvalidInputError("kernel rows must sum to 1")
    targets = np.zeros(n, dtype=bool)
    targets[np.asarray(list(target_states), dtype=int)] = True
    if not targets.any():
        raise InvalidInputError("target set must be nonempty")
    h = np.zeros(n)
    free = ~targets
    if free.any():
        Q = P[np.ix_(free, free)]
        A = np.eye(int(free.sum())) - Q
        try:
            sol = np.linalg.solve(A, np.ones(int(free.sum())))
        except np.linalg.LinAlgError as exc:
            raise DiagnosticError(f"absorption system is singular: {exc}") from exc
        if not np.all(np.isfinite(sol)) or np.any(sol < 0):
            raise DiagnosticError("absorption solve produced invalid hitting steps "
                                  "(chain may not reach the target from every state)")
        h[free] = sol
    return h


def mixing_steps_tv(P: np.ndarray, epsilon: float, init_dist: np.ndarray = None,
                    max_steps: int = None) -> int:
    """First step at which TV distance to uniform drops below ``epsilon``.

    Iterates the distribution exactly, starting from a point mass at state 0
    unless ``init_dist`` is given.  The kernels built here are doubly
    stochastic, so uniform is the stationary law.
    """
    P = np.asarray(P, dtype=float)
    m = P.shape[0]
    if m > 4096:
        raise InvalidInputError(f"mixing iteration capped at 4096 states, got {m}")
    if not 0.0 < epsilon <= 0.5:
        raise InvalidInputError(f"epsilon must lie in (0, 1/2], got {epsilon}")
    if init_dist is None:
        dist = np.zeros(m)
        dist[0] = 1.0
    else:
        dist = np.asarray(init_dist, dtype=float)
        if dist.shape != (m,) or abs(dist.sum() - 1.0) > 1e-9 or np.any(dist < 0):
            raise InvalidInputError("init_dist must be a probability vector over the states")
    uniform = 1.0 / m
    if max_steps is None:
        max_steps = 200 * m * m + 1000
    for t in range(max_steps + 1):
        if 0.5 * np.abs(dist - uniform).sum() < epsilon:
            return t
        dist = dist @ P
    raise DiagnosticError(f"no mixing below eps={epsilon} within {max_steps} steps")
