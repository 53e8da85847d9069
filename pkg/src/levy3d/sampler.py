"""Truncated power-law step lengths, uniform directions, and step moments.

The step-length density is uniform below 1 and decays as ``ell^-mu`` up to a
hard cutoff::

    p(ell) = a              for ell <= 1
           = a * ell^-mu    for 1 < ell < ell_max
           = 0              for ell >= ell_max

with ``a = 1 / (1 + (1 - ell_max^(1-mu)) / (mu - 1))`` so the density
integrates to one.  ``mu = 2`` is the Cauchy walk.  Sampling uses the exact
piecewise inverse CDF; directions are drawn uniformly on the unit sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DiagnosticError, InvalidInputError

_MU_SINGULARITY_TOL = 1e-9


def normalization(mu: float, ell_max: float) -> float:
    """Closed-form normalization constant of the step-length density."""
    if not 1.0 < mu <= 3.0:
        raise InvalidInputError(f"mu must lie in (1, 3], got {mu}")
    if not ell_max > 1.0 or not math.isfinite(ell_max):
        raise InvalidInputError(f"ell_max must be a finite value > 1, got {ell_max}")
    tail_mass = (1.0 - ell_max ** (1.0 - mu)) / (mu - 1.0)
    return 1.0 / (1.0 + tail_mass)


@dataclass(frozen=True)
class Moments:
    """Mean ``tau``, variance ``sigma2`` and second moment ``M`` of the step length."""

    tau: float
    sigma2: float
    M: float


@dataclass(frozen=True)
class StepDist:
    """Truncated power-law step-length distribution.

    ``a`` is computed from ``(mu, ell_max)`` when not supplied; tests may
    override it to emulate a corrupted normalization.
    """

    mu: float
    ell_max: float
    a: float = None

    def __post_init__(self):
        if self.a is None:
            object.__setattr__(self, "a", normalization(self.mu, self.ell_max))

    # -- density and CDF ------------------------------------------------

    def pdf(self, ell):
        ell = np.asarray(ell, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(ell <= 1.0, self.a, self.a * ell ** (-self.mu))
        out = np.where((ell < 0.0) | (ell >= self.ell_max), 0.0, out)
        return out if out.ndim else float(out)

    def cdf(self, ell):
        ell = np.asarray(ell, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            tail = self.a * (1.0 + (1.0 - ell ** (1.0 - self.mu)) / (self.mu - 1.0))
        out = np.where(ell <= 1.0, self.a * np.clip(ell, 0.0, None), tail)
        out = np.where(ell >= self.ell_max, 1.0, out)
        return out if out.ndim else float(out)

    def inv_cdf(self, u):
        """Piecewise inverse of :meth:`cdf` on ``[0, 1]``."""
        u = np.asarray(u, dtype=float)
        mu, a = self.mu, self.a
        with np.errstate(invalid="ignore"):
            base = 1.0 - (mu - 1.0) * (u / a - 1.0)
            tail = base ** (1.0 / (1.0 - mu))
        out = np.where(u <= a, u / a, tail)
        out = np.minimum(out, self.ell_max)
        return out if out.ndim else float(out)

    # -- sampling --------------------------------------------------------

    def sample(self, rng: np.random.Generator, size=None):
        """Draw step lengths by inverse-transform sampling; output in (0, ell_max)."""
        scalar = size is None
        n = 1 if scalar else int(size)
        u = rng.random(n)
        # keep u strictly inside (0, 1): a length of exactly 0 or ell_max
        # would break downstream invariants
        bad = u == 0.0
        while np.any(bad):
            u[bad] = rng.random(int(bad.sum()))
            bad = u == 0.0
        lengths = self.inv_cdf(u)
        return float(lengths[0]) if scalar else lengths

    # -- moments -----------------------------------------------------------

    def moments(self) -> Moments:
        """Closed-form mean, variance and second moment of the step length.

        The antiderivatives have removable singularities at ``mu = 2`` (for
        the mean) and ``mu = 3`` (for the second moment); those use the log
        branch.
        """
        mu, lm, a = self.mu, self.ell_max, self.a
        if abs(mu - 2.0) < _MU_SINGULARITY_TOL:
            j1 = math.log(lm)
        else:
            j1 = (1.0 - lm ** (2.0 - mu)) / (mu - 2.0)
        if abs(mu - 3.0) < _MU_SINGULARITY_TOL:
            j2 = math.log(lm)
        else:
            j2 = (1.0 - lm ** (3.0 - mu)) / (mu - 3.0)
        tau = a * (0.5 + j1)
        second = a * (1.0 / 3.0 + j2)
        return Moments(tau=tau, sigma2=second - tau * tau, M=second)


def sample_direction(rng: np.random.Generator, size=None) -> np.ndarray:
    """Uniform unit vector(s) on the sphere via normalized Gaussian triples."""
    n = 1 if size is None else int(size)
    v = rng.standard_normal((n, 3))
    norm = np.linalg.norm(v, axis=1)
    bad = norm < 1e-300
    while np.any(bad):
        v[bad] = rng.standard_normal((int(bad.sum()), 3))
        norm = np.linalg.norm(v, axis=1)
        bad = norm < 1e-300
    v /= norm[:, None]
    return v[0] if size is None else v


def sample_steps(dist: StepDist, rng: np.random.Generator, size: int):
    """Draw ``size`` full steps; returns ``(lengths, unit_directions)``."""
    return dist.sample(rng, size), sample_direction(rng, size)


def projected_tail_exponent(
    dist: StepDist,
    samples: int,
    rng: np.random.Generator,
    n_bins: int = 24,
    min_count: int = 50,
) -> float:
    """Estimate the tail exponent of one-axis step projections.

    Draws full 3D steps, projects them onto a single axis and fits a log-log
    least-squares line to the histogram density of ``|V1|`` over the window
    ``[2, ell_max / 4]``, where the projected density is itself a power law
    with the walk's exponent.  Returns the fitted ``mu``.
    """
    if samples < 1_000_000:
        raise InvalidInputError(f"need at least 1e6 samples, got {samples}")
    lo, hi = 2.0, dist.ell_max / 4.0
    if hi <= lo:
        raise InvalidInputError(f"ell_max {dist.ell_max} leaves no fit window [2, ell_max/4]")
    proj = np.empty(samples)
    chunk = 2_000_000
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        lengths = dist.sample(rng, k)
        dirs = sample_direction(rng, k)
        proj[done : done + k] = np.abs(lengths * dirs[:, 0])
        done += k
    edges = np.geomspace(lo, hi, n_bins + 1)
    counts, _ = np.histogram(proj, bins=edges)
    widths = np.diff(edges)
    centers = np.sqrt(edges[:-1] * edges[1:])
    ok = counts >= min_count
    if ok.sum() < 4:
        raise DiagnosticError(
            f"only {int(ok.sum())} usable bins in the fit window [{lo}, {hi}]"
        )
    density = counts[ok] / (samples * widths[ok])
    slope = np.polyfit(np.log(centers[ok]), np.log(density), 1)[0]
    return float(-slope)
