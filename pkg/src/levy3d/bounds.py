"""Closed-form detection-time bounds for a (target, mu, n) configuration.

Every bound is an order-of-growth statement; the hidden constants are set to
1 and all logarithms are natural, so absolute values are indicative while
ratios across configurations are meaningful.  Inapplicable bounds are absent
from the report together with the reason.

Implemented bounds (detection time, torus volume ``n``):

* universal:   ``n / delta_B``                      (any strategy)
* ballistic:   ``n^(1 + eps/3) / V``                (mu = 2 - eps, eps > 0)
* diffusive:   ``n * delta_B^(eps (1 - delta) - 1)``  (mu = 2 + eps in (2, 3))
               ``n / (delta_B^delta * log delta_B)``  (mu = 3)
* ball/disc:   ``n * Delta^(eps/2 - 1)``            (mu in (2, 3), surface Delta)
               ``n / (Delta^(1/2) * log Delta)``    (mu = 3)
* Cauchy upper bound: ``n * log^3 n / delta_P``     (mu = 2)

plus the expected travel time to distance ``r`` in the diffusive regime,
``r^(mu-1)`` for mu in (2, 3) and ``r^2 / log r`` for mu = 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import geometry
from .errors import InvalidInputError
from .geometry import GeoDescriptors, ShapeKind, Target

DISCLAIMER = (
    "asymptotic constants set to 1, natural logs; values guide ratios across "
    "configurations, not absolute predictions"
)


def travel_time(mu: float, dist: float) -> float:
    """Expected time for a diffusive walk (mu in (2, 3]) to reach distance ``dist``."""
    if not 2.0 < mu <= 3.0:
        raise InvalidInputError(f"travel-time bound needs mu in (2, 3], got {mu}")
    if dist <= 1.0:
        raise InvalidInputError(f"distance must exceed 1, got {dist}")
    if mu == 3.0:
        return dist * dist / math.log(dist)
    return dist ** (mu - 1.0)


def steps_lower_bound(target: Target, n: float) -> float:
    """Lower bound ``n / V`` on the expected number of steps before detection."""
    return n / geometry.descriptors(target).volume


@dataclass(frozen=True)
class BoundsReport:
    """Evaluated bounds for one (target, mu, n) triple; absent fields carry reasons."""

    mu: float
    n: float
    shape: str
    universal_lb: float
    cauchy_ub: float
    regime_lb: float
    ballistic_lb: float | None = None
    diffusive_lb: float | None = None
    ball_disc_lb: float | None = None
    travel_time_Td: float | None = None
    excluded: dict = field(default_factory=dict)
    descriptors: GeoDescriptors = None
    disclaimer: str = DISCLAIMER

    def as_dict(self) -> dict:
        """JSON-friendly view with the defining formula next to each value."""
        d = self.descriptors
        out = {
            "mu": self.mu,
            "n": self.n,
            "shape": self.shape,
            "delta_B": d.delta_B,
            "delta_P": d.delta_P,
            "volume": d.volume,
            "surface_area": d.surface_area,
            "elongation": d.elongation,
            "bounds": {
                "universal_lb": {"value": self.universal_lb, "formula": "n / delta_B"},
                "cauchy_ub": {"value": self.cauchy_ub, "formula": "n * log^3(n) / delta_P"},
                "regime_lb": {"value": self.regime_lb,
                              "formula": "regime-specific lower bound for this mu"},
            },
            "excluded": dict(self.excluded),
            "disclaimer": self.disclaimer,
        }
        if self.ballistic_lb is not None:
            out["bounds"]["ballistic_lb"] = {
                "value": self.ballistic_lb, "formula": "n^(1 + (2-mu)/3) / V"}
        if self.diffusive_lb is not None:
            formula = ("n / (delta_B^delta * log(delta_B))" if self.mu == 3.0
                       else "n * delta_B^((mu-2)(1-delta) - 1)")
            out["bounds"]["diffusive_lb"] = {"value": self.diffusive_lb, "formula": formula}
        if self.ball_disc_lb is not None:
            formula = ("n / (surface^(1/2) * log(surface))" if self.mu == 3.0
                       else "n * surface^((mu-2)/2 - 1)")
            out["bounds"]["ball_disc_lb"] = {"value": self.ball_disc_lb, "formula": formula}
        if self.travel_time_Td is not None:
            formula = ("x2^2 / log(x2)" if self.mu == 3.0 else "x2^(mu-1)")
            out["bounds"]["travel_time_Td"] = {
                "value": self.travel_time_Td,
                "formula": formula + " at the box width x2"}
        return out


def evaluate(target: Target, mu: float, n: float) -> BoundsReport:
    """Evaluate every applicable bound; pure function of its arguments."""
    if not 1.0 < mu <= 3.0:
        raise InvalidInputError(f"mu must lie in (1, 3], got {mu}")
    if n < 8.0:
        raise InvalidInputError(f"torus volume must be >= 8, got {n}")
    desc = geometry.descriptors(target)
    universal = n / desc.delta_B
    cauchy = n * math.log(n) ** 3 / desc.delta_P
    excluded = {}

    ballistic = None
    if mu < 2.0:
        ballistic = n ** (1.0 + (2.0 - mu) / 3.0) / desc.volume
    else:
        excluded["ballistic_lb"] = f"regime mu={mu:g} not in (1, 2)"

    diffusive = None
    ball_disc = None
    td = None
    if mu > 2.0:
        delta = desc.elongation
        if mu == 3.0:
            diffusive = n / (desc.delta_B ** delta * math.log(desc.delta_B))
        else:
            diffusive = n * desc.delta_B ** ((mu - 2.0) * (1.0 - delta) - 1.0)
        if target.kind in (ShapeKind.BALL, ShapeKind.DISC):
            surf = desc.surface_area
            if mu == 3.0:
                ball_disc = n / (math.sqrt(surf) * math.log(surf))
            else:
                ball_disc = n * surf ** ((mu - 2.0) / 2.0 - 1.0)
        else:
            excluded["ball_disc_lb"] = f"shape {target.kind.value} is not a ball or disc"
        x2 = desc.box[1]
        td = travel_time(mu, x2)
    else:
        reason = f"regime mu={mu:g} not in (2, 3]"
        excluded["diffusive_lb"] = reason
        excluded["travel_time_Td"] = reason
        if "ball_disc_lb" not in excluded:
            excluded["ball_disc_lb"] = reason

    if mu < 2.0:
        regime = ballistic
    elif mu > 2.0:
        regime = diffusive
    else:
        regime = universal

    return BoundsReport(
        mu=mu, n=n, shape=target.kind.value,
        universal_lb=universal, cauchy_ub=cauchy, regime_lb=regime,
        ballistic_lb=ballistic, diffusive_lb=diffusive,
        ball_disc_lb=ball_disc, travel_time_Td=td,
        excluded=excluded, descriptors=desc,
    )


def overhead(sim_mean_time: float, target: Target, n: float) -> float:
    """Simulated mean time divided by the universal lower bound.

    The true overhead divides by the (unknowable) optimal detection time, so
    this ratio upper-bounds it.
    """
    if not sim_mean_time > 0:
        raise InvalidInputError(f"mean time must be positive, got {sim_mean_time}")
    return sim_mean_time / (n / geometry.descriptors(target).delta_B)
