"""Self-validation suite: analytic identities, distributional tests, oracles.

``run("quick")`` finishes in seconds (closed forms against numeric
quadrature, torus arithmetic properties, descriptor identities, tiny Monte
Carlo cross-checks).  ``run("full")`` adds the statistical suite: KS tests of
the sampler, the projection tail-exponent regression, the Wald identity on
fresh trial batches, shell-uniformity chi-square, and the exact-solver
versus Monte Carlo comparison on a small lattice.

Statistical checks use fixed seeds and 3-4 sigma envelopes, so a healthy
build passes deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import bounds, discrete, geometry
from .geometry import Target
from .sampler import StepDist, projected_tail_exponent, sample_direction
from .walker import WalkParams, run_batch, run_trial, sample_path, wald_residual

# chi-square critical value at p = 0.01 for 17 degrees of freedom
_CHI2_17_99 = 33.4087
_KS_LIMIT = 0.006


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _integrate(f, a, b, pts=20001):
    """Log-spaced trapezoid quadrature; the oracle side of closed-form checks."""
    x = np.geomspace(a, b, pts)
    return float(np.trapezoid(f(x), x))


def _ks_distance(samples: np.ndarray, cdf) -> float:
    x = np.sort(samples)
    n = x.size
    f = cdf(x)
    lo = np.max(f - np.arange(n) / n)
    hi = np.max((np.arange(n) + 1) / n - f)
    return float(max(lo, hi))


# ---------------------------------------------------------------------------
# individual checks; each returns (passed, detail)
# ---------------------------------------------------------------------------

def _check_normalization(dist_for):
    worst = 0.0
    for mu in (1.2, 1.5, 2.0, 2.5, 3.0):
        d = dist_for(mu, 256.0)
        total = d.a * 1.0 + _integrate(lambda x: d.a * x ** (-mu), 1.0, d.ell_max)
        worst = max(worst, abs(total - 1.0))
    return worst < 1e-6, f"max |integral p - 1| = {worst:.2e}"


def _check_cdf_roundtrip(dist_for):
    worst = 0.0
    for mu in (1.2, 2.0, 3.0):
        d = dist_for(mu, 128.0)
        u = np.linspace(1e-6, 1.0 - 1e-6, 2001)
        worst = max(worst, float(np.max(np.abs(d.cdf(d.inv_cdf(u)) - u))))
        grid = np.geomspace(1e-3, d.ell_max, 512)
        if np.any(np.diff(d.cdf(grid)) < -1e-15):
            return False, f"cdf not monotone at mu={mu}"
        if abs(d.cdf(d.ell_max) - 1.0) > 1e-12:
            return False, f"cdf(ell_max) != 1 at mu={mu}"
    return worst < 1e-9, f"max |cdf(inv(u)) - u| = {worst:.2e}"


def _check_moments(dist_for):
    worst = 0.0
    lin = np.linspace(0.0, 1.0, 20001)
    for mu in (1.2, 1.5, 2.0, 2.5, 3.0):
        d = dist_for(mu, 256.0)
        m = d.moments()
        # stop just short of the cutoff: the density's support edge is open
        # and the point discontinuity would poison the trapezoid rule
        top = d.ell_max * (1.0 - 1e-9)
        tau_q = float(np.trapezoid(lin * d.pdf(lin), lin)) + _integrate(
            lambda x: x * d.pdf(x), 1.0, top)
        m2_q = float(np.trapezoid(lin**2 * d.pdf(lin), lin)) + _integrate(
            lambda x: x * x * d.pdf(x), 1.0, top)
        worst = max(worst, abs(m.tau - tau_q) / tau_q, abs(m.M - m2_q) / m2_q)
        if not (m.tau > 0 and m.M >= m.sigma2 >= 0):
            return False, f"moment ordering violated at mu={mu}"
        if abs(m.M - (m.sigma2 + m.tau**2)) > 1e-9 * m.M:
            return False, f"M != sigma2 + tau^2 at mu={mu}"
    return worst < 1e-5, f"max rel err vs quadrature = {worst:.2e}"


def _check_wrap(rng):
    hw = 4.0
    p = rng.uniform(-50, 50, (500, 3))
    v = rng.uniform(-50, 50, (500, 3))
    w = geometry.wrap_coords(p, hw)
    if not (np.all(w >= -hw) and np.all(w < hw)):
        return False, "wrap left the fundamental domain"
    if not np.allclose(geometry.wrap_coords(w, hw), w, atol=1e-12):
        return False, "wrap is not idempotent"
    lhs = geometry.wrap_coords(p + v, hw)
    rhs = geometry.wrap_coords(w + v, hw)
    if not np.allclose(lhs, rhs, atol=1e-9):
        return False, "wrap additivity failed"
    return True, "range, idempotence, additivity on 500 random points"


def _check_displacement(rng):
    hw = 16.0
    for _ in range(200):
        a = geometry.wrap(rng.uniform(-hw, hw, 3), hw)
        b = geometry.wrap(rng.uniform(-hw, hw, 3), hw)
        d1 = geometry.torus_displacement(a, b)
        d2 = geometry.torus_displacement(b, a)
        if not np.allclose(d1, -d2, atol=1e-12):
            return False, f"antisymmetry failed for {a} / {b}"
    return True, "antisymmetry on 200 random pairs"


def _check_descriptors():
    shapes = [Target.ball(4.0), Target.disc(8.0), Target.line(30.0),
              Target.rect(10.0, 6.0)]
    for t in shapes:
        desc = geometry.descriptors(t)
        if desc.delta_P > desc.delta_B + 1e-12:
            return False, f"delta_P > delta_B for {t.kind.value}"
        if not 0.5 - 1e-12 <= desc.elongation <= 1.0:
            return False, f"elongation out of range for {t.kind.value}"
        if not desc.approx_convex:
            return False, f"{t.kind.value} should be approximately convex"
        x3 = desc.box[2]
        if abs(desc.delta_B**desc.elongation - x3) > 1e-9 * x3:
            return False, f"delta_B^delta != x3 for {t.kind.value}"
    rect = geometry.descriptors(Target.rect(10.0, 6.0))
    if rect.delta_P != rect.delta_B:
        return False, "rect silhouette must equal its largest face"
    if geometry.counterexample_ratio(200.0, 1.0) >= geometry.APPROX_CONVEX_THRESHOLD:
        return False, "cross shape at L=200d should not be approximately convex"
    return True, "descriptor identities for the four shapes plus the cross"


def _check_mc_projection(seed):
    t = Target.ball(4.0)
    est = geometry.mc_projected_area(t, 20_000, seed=seed)
    expect = geometry.descriptors(t).delta_P
    ok = abs(est.estimate - expect) < 6.0 * est.stderr
    return ok, f"ball: mc {est.estimate:.3f} vs analytic {expect:.3f} (se {est.stderr:.3f})"


def _check_shells():
    for ell in range(1, 13):
        rng_box = np.arange(-ell, ell + 1)
        xs, ys, zs = np.meshgrid(rng_box, rng_box, rng_box, indexing="ij")
        brute = int(np.sum(np.abs(xs) + np.abs(ys) + np.abs(zs) == ell))
        if brute != discrete.shell_size(ell):
            return False, f"shell size mismatch at ell={ell}"
        pts = discrete.shell_points(ell)
        if len({tuple(p) for p in pts}) != discrete.shell_size(ell):
            return False, f"shell enumeration not injective at ell={ell}"
        for idx in range(0, discrete.shell_size(ell), max(1, ell)):
            if discrete.shell_index(ell, discrete.shell_point(ell, idx)) != idx:
                return False, f"bijection round-trip failed at ell={ell}, idx={idx}"
    return True, "sizes, injectivity and round-trip for ell <= 12"


def _check_exact_cycle():
    P = discrete.lazy_srw_cycle_kernel(8)
    h = discrete.exact_hitting_steps(P, [0])
    ok = abs(h[4] - 32.0) < 1e-9
    return ok, f"lazy SRW cycle m=8, distance 4: {h[4]:.9f} (expect 32)"


def _check_walker_determinism(seed):
    params = WalkParams(mu=2.0, n=float(32**3))
    t = Target.ball(4.0)
    a = run_trial(params, t, np.random.default_rng(seed))
    b = run_trial(params, t, np.random.default_rng(seed))
    ok = a == b
    return ok, f"same seed twice: {a.detect_steps} vs {b.detect_steps} steps"


def _check_confinement(seed):
    params = WalkParams(mu=1.5, n=float(32**3))
    path = sample_path(params, np.random.default_rng(seed), 4000)
    hw = params.half_width
    ok = bool(np.all(path >= -hw) and np.all(path < hw))
    return ok, f"4000-step path stays in [-{hw}, {hw})"


def _check_bounds_identities():
    for t in (Target.ball(4.0), Target.disc(8.0), Target.line(30.0)):
        for n in (float(32**3), float(64**3)):
            rep = bounds.evaluate(t, 2.0, n)
            if rep.universal_lb > rep.cauchy_ub:
                return False, f"universal > cauchy for {t.kind.value} at n={n}"
        for mu in (2.2, 2.8):
            rep = bounds.evaluate(t, mu, float(64**3))
            desc = rep.descriptors
            want = desc.delta_B ** ((mu - 2.0) * (1.0 - desc.elongation))
            got = rep.diffusive_lb / rep.universal_lb
            if abs(got - want) > 1e-9 * want:
                return False, f"diffusive/universal ratio off for {t.kind.value}"
        lows = [bounds.evaluate(t, 1.5, float(s**3)).ballistic_lb for s in (32, 64, 128)]
        if not (lows[0] < lows[1] < lows[2]):
            return False, "ballistic bound not increasing in n"
    return True, "cauchy/universal ordering, ratio identity, n-monotonicity"


# -- full-level checks -------------------------------------------------------

def _check_ks(dist_for, seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for mu in (1.5, 2.0, 2.5, 3.0):
        d = dist_for(mu, 128.0)
        sample = d.sample(rng, 100_000)
        if np.any(sample <= 0) or np.any(sample >= d.ell_max):
            return False, f"sampled length outside (0, ell_max) at mu={mu}"
        worst = max(worst, _ks_distance(sample, d.cdf))
    return worst < _KS_LIMIT, f"max KS distance = {worst:.5f} (limit {_KS_LIMIT})"


def _check_sample_mean(dist_for, seed):
    rng = np.random.default_rng(seed)
    for mu in (1.2, 1.5, 2.0, 2.5, 3.0):
        d = dist_for(mu, 128.0)
        m = d.moments()
        sample = d.sample(rng, 1_000_000)
        sem = sample.std(ddof=1) / math.sqrt(sample.size)
        if abs(sample.mean() - m.tau) > 3.0 * sem:
            return False, f"sample mean off tau at mu={mu}"
    return True, "sample mean within 3 SEM of tau for five exponents"


def _check_tail_exponent(seed):
    d = StepDist(2.0, 256.0)
    est = projected_tail_exponent(d, 2_000_000, np.random.default_rng(seed))
    return abs(est - 2.0) < 0.2, f"projection exponent {est:.3f} (expect 2.0 +- 0.2)"


def _check_directions(seed):
    rng = np.random.default_rng(seed)
    v = sample_direction(rng, 1_000_000)
    n = v.shape[0]
    if np.max(np.abs(np.linalg.norm(v, axis=1) - 1.0)) > 1e-12:
        return False, "directions are not unit vectors"
    mean = v.mean(axis=0)
    # each component has sd 1/sqrt(3); allow 4 sigma of the mean
    if np.any(np.abs(mean) > 4.0 / math.sqrt(3.0 * n)):
        return False, f"direction mean biased: {mean}"
    z2 = (v[:, 2] ** 2).mean()
    z2_sem = (v[:, 2] ** 2).std(ddof=1) / math.sqrt(n)
    if abs(z2 - 1.0 / 3.0) > 4.0 * z2_sem:
        return False, f"<z^2> = {z2:.5f}, expected 1/3"
    octant = np.sum((v[:, 0] > 0) & (v[:, 1] > 0) & (v[:, 2] > 0)) / n
    sem = math.sqrt(0.125 * 0.875 / n)
    if abs(octant - 0.125) > 4.0 * sem:
        return False, f"octant fraction {octant:.5f}, expected 1/8"
    return True, "unit norm, centered mean, <z^2>=1/3, octant symmetry"


def _check_radial_monotonicity(seed):
    rng = np.random.default_rng(seed)
    d = StepDist(2.0, 128.0)
    for m in (2, 5):
        walkers = 200_000
        pos = np.zeros((walkers, 3))
        for _ in range(m):
            pos += d.sample(rng, walkers)[:, None] * sample_direction(rng, walkers)
        r = np.linalg.norm(pos, axis=1)
        edges = np.linspace(0.0, np.quantile(r, 0.9), 16)
        counts, _ = np.histogram(r, bins=edges)
        vols = 4.0 / 3.0 * math.pi * (edges[1:] ** 3 - edges[:-1] ** 3)
        dens = counts / vols
        sig = np.sqrt(np.maximum(counts, 1.0)) / vols
        for i in range(1, len(dens) - 1):
            if counts[i] < 50 or counts[i + 1] < 50:
                continue
            if dens[i + 1] > dens[i] + 3.0 * (sig[i] + sig[i + 1]):
                return False, f"radial density rises at bin {i} for m={m}"
    return True, "radial density non-increasing (3 sigma) for m in {2, 5}"


def _check_wald(seed):
    configs = [
        (WalkParams(mu=2.0, n=float(32**3)), Target.ball(4.0)),
        (WalkParams(mu=2.5, n=float(32**3)), Target.disc(4.0)),
    ]
    details = []
    for i, (params, target) in enumerate(configs):
        batch = run_batch(params, target, 1000, seed + i)
        tau = params.step_dist().moments().tau
        mean, sem = wald_residual(batch, tau)
        details.append(f"{target.kind.value}: |{mean:.3f}| vs 3x{sem:.3f}")
        if abs(mean) > 3.0 * sem:
            return False, "; ".join(details)
    return True, "wald-identity residual within 3 SEM: " + "; ".join(details)


def _check_shell_uniformity(seed):
    rng = np.random.default_rng(seed)
    shells = discrete.ShellIndex(4)
    draws = 100_000
    pts = shells.sample(rng, np.full(draws, 2))
    idx = np.array([discrete.shell_index(2, p) for p in pts])
    counts = np.bincount(idx, minlength=18)
    expected = draws / 18.0
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    return chi2 < _CHI2_17_99, f"chi2 = {chi2:.2f} (17 dof, p=0.01 cut {_CHI2_17_99})"


def _check_length_ratio(seed):
    rng = np.random.default_rng(seed)
    params = discrete.LatticeWalkParams(side=16, mu=2.5)
    _, costs = discrete.sample_jumps(params, rng, 400_000)
    moves = costs[costs > 0]
    n1, n2 = int(np.sum(moves == 1)), int(np.sum(moves == 2))
    ratio = n1 / n2
    want = 2.0**2.5
    sig = ratio * math.sqrt(1.0 / n1 + 1.0 / n2)
    return abs(ratio - want) < 3.0 * sig, f"P(1)/P(2) = {ratio:.3f} vs 2^mu = {want:.3f}"


def _check_kernel_stationarity():
    P = discrete.lattice_torus_kernel(8, 2.5)
    if not np.allclose(P, P.T, atol=1e-12):
        return False, "lattice kernel is not symmetric"
    dist = np.zeros(P.shape[0])
    dist[0] = 1.0
    uniform = 1.0 / P.shape[0]
    for _ in range(5000):
        dist = dist @ P
        if 0.5 * np.abs(dist - uniform).sum() < 1e-6:
            return True, "symmetric kernel; TV to uniform < 1e-6 by iteration"
    return False, "distribution iteration did not converge to uniform"


def _check_lattice_mc_vs_exact(seed):
    params = discrete.LatticeWalkParams(side=5, mu=2.5)
    P = discrete.lattice_torus_kernel(5, 2.5)
    side = 5
    targets = [x * side * side + 0 * side + 0 for x in range(3)]
    h = discrete.exact_hitting_steps(P, targets)
    exact = float(h.mean())
    res = discrete.hit_line(params, 3, 4000, seed)
    ok = abs(res.mean_steps - exact) < 3.0 * res.sem_steps
    return ok, f"mc {res.mean_steps:.2f} vs exact {exact:.2f} (sem {res.sem_steps:.2f})"


# ---------------------------------------------------------------------------
# suite driver
# ---------------------------------------------------------------------------

def suite(level: str = "quick", corrupt_normalization: float = None,
          seed: int = 987) -> list:
    """The (name, callable) check list for a level, without running it."""
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")

    def dist_for(mu, ell_max):
        d = StepDist(mu, ell_max)
        if corrupt_normalization is not None:
            d = replace(d, a=d.a * corrupt_normalization)
        return d

    rng = np.random.default_rng(seed)
    checks = [
        ("sampler.normalization-quadrature", lambda: _check_normalization(dist_for)),
        ("sampler.cdf-roundtrip", lambda: _check_cdf_roundtrip(dist_for)),
        ("sampler.moments-quadrature", lambda: _check_moments(dist_for)),
        ("geometry.wrap", lambda: _check_wrap(rng)),
        ("geometry.displacement", lambda: _check_displacement(rng)),
        ("geometry.descriptors", _check_descriptors),
        ("geometry.mc-projection", lambda: _check_mc_projection(seed)),
        ("discrete.shells", _check_shells),
        ("discrete.exact-cycle", _check_exact_cycle),
        ("walker.determinism", lambda: _check_walker_determinism(seed)),
        ("walker.confinement", lambda: _check_confinement(seed)),
        ("bounds.identities", _check_bounds_identities),
    ]
    if level == "full":
        checks += [
            ("sampler.ks", lambda: _check_ks(dist_for, seed)),
            ("sampler.sample-mean", lambda: _check_sample_mean(dist_for, seed)),
            ("sampler.projection-exponent", lambda: _check_tail_exponent(seed)),
            ("sampler.directions", lambda: _check_directions(seed)),
            ("sampler.radial-monotonicity", lambda: _check_radial_monotonicity(seed)),
            ("walker.wald-identity", lambda: _check_wald(seed)),
            ("discrete.shell-uniformity", lambda: _check_shell_uniformity(seed)),
            ("discrete.length-ratio", lambda: _check_length_ratio(seed)),
            ("discrete.kernel-stationarity", _check_kernel_stationarity),
            ("discrete.mc-vs-exact", lambda: _check_lattice_mc_vs_exact(seed)),
        ]
    return checks


def run(level: str = "quick", corrupt_normalization: float = None,
        seed: int = 987) -> list[CheckResult]:
    """Run the validation suite; ``corrupt_normalization`` is a test hook that
    scales the sampler's normalization constant to prove the suite catches it."""
    results = []
    for name, fn in suite(level, corrupt_normalization, seed):
        try:
            passed, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail))
    return results
