"""Three-node amplify-and-forward TWRC analysis.

Energy function of the two-slot exchange, the optimal relay amplification,
relay placement along the source-destination line, and the path-loss
threshold deciding whether the midpoint placement is an energy minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ZeroRateError
from .radio import PhyConfig, circuit_power

THETA_EPS = 1e-6
# Within this band around the threshold exponent the second derivative is
# numerically zero and no min/max label is forced.
BOUNDARY_BAND = 0.01

LOCAL_MIN = "local-min"
LOCAL_MAX = "local-max"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class EnergyPoint:
    x: float
    h1_sq: float
    h2_sq: float
    f_value: float


@dataclass(frozen=True)
class PlacementResult:
    theta: float
    relay_pos_fraction: float
    f_value: float
    classification: str


@dataclass(frozen=True)
class DirectVsTwrc:
    direct_energy: float
    twrc_energy: float
    winner: str  # "direct" or "twrc"


def energy_function(rate: float, h1_sq: float, h2_sq: float, x: float,
                    cfg: PhyConfig) -> float:
    """Total energy of one two-slot TWRC exchange, J per two channel uses.

    ``x`` is the squared relay amplification |beta|^2.
    """
    if x <= 0:
        raise DomainError(f"amplification x must be > 0, got {x}")
    if h1_sq <= 0 or h2_sq <= 0:
        raise DomainError("channel gains must be > 0")
    e = 2.0 ** rate - 1.0
    tx = 2.0 * e * (1.0 + h1_sq * x) * (1.0 + h2_sq * x) / (h1_sq * h2_sq * x) + x
    return (cfg.noise_n0 / cfg.eta) * tx + 2.0 * circuit_power(1, cfg.p00)


def optimal_amplification(rate: float, h1_sq: float, h2_sq: float) -> float:
    """The unique stationary amplification x0 of the energy function.

    The energy function decreases for x < x0 and increases for x > x0.
    """
    if rate <= 0:
        raise ZeroRateError("amplification degenerates to 0 at zero rate")
    if h1_sq <= 0 or h2_sq <= 0:
        raise DomainError("channel gains must be > 0")
    num = 2.0 * (2.0 ** rate - 1.0)
    den = (2.0 ** (rate + 1.0) - 1.0) * h1_sq * h2_sq
    return math.sqrt(num / den)


def ab_coefficients(rate: float, n0: float) -> tuple[float, float]:
    """Coefficients (a, b) of the reduced two-slot energy at the optimal x.

    The reduced energy is (a*h1*h2 + b*(h1^2 + h2^2)) / (eta*h1^2*h2^2)
    plus circuit terms.
    """
    s = 2.0 ** (rate + 1.0)
    a = 2.0 * n0 * math.sqrt((s - 1.0) * (s - 2.0))
    b = n0 * (s - 2.0)
    return a, b


def midpoint_threshold(rate: float) -> float:
    """Path-loss exponent above which the midpoint relay is a local minimum."""
    if rate <= 0:
        raise ZeroRateError("threshold is undefined at zero rate")
    s = 2.0 ** (rate + 1.0)
    return 1.0 + math.sqrt((s - 1.0) / (s - 2.0))


def classify_midpoint(rate: float, alpha: float) -> str:
    """Character of the midpoint placement: local-min, local-max or boundary."""
    thr = midpoint_threshold(rate)
    if abs(alpha - thr) <= BOUNDARY_BAND:
        return BOUNDARY
    return LOCAL_MIN if alpha > thr else LOCAL_MAX


def placement_energy(rate: float, theta: float, d: float,
                     cfg: PhyConfig) -> PlacementResult:
    """Two-slot energy with the relay on the A-B line at angle ``theta``.

    The relay sits at distance d*cos^2(theta) from A.  ``theta`` is clamped
    to [eps, pi/2 - eps] since the energy diverges at the endpoints.
    """
    if d <= 0:
        raise DomainError(f"distance must be > 0, got {d}")
    theta = min(max(theta, THETA_EPS), math.pi / 2.0 - THETA_EPS)
    a, b = ab_coefficients(rate, cfg.noise_n0)
    al = cfg.alpha
    c, s = math.cos(theta), math.sin(theta)
    f = (a * d ** al * c ** al * s ** al
         + b * d ** al * (s ** (2 * al) + c ** (2 * al))) / cfg.eta
    f += 2.0 * circuit_power(1, cfg.p00)
    return PlacementResult(
        theta=theta,
        relay_pos_fraction=c * c,
        f_value=f,
        classification=classify_midpoint(rate, cfg.alpha),
    )


def direct_vs_twrc(rate: float, d: float, cfg: PhyConfig) -> DirectVsTwrc:
    """Compare direct transmission against a midpoint-relay TWRC.

    Both energies cover one exchanged packet pair (two channel uses) and
    include the circuit terms of their respective topologies.
    """
    if d <= 0:
        raise DomainError(f"distance must be > 0, got {d}")
    n0, al = cfg.noise_n0, cfg.alpha
    direct = (2.0 * n0 * (2.0 ** rate - 1.0) * d ** al) / cfg.eta \
        + 2.0 * circuit_power(0, cfg.p00)
    a, b = ab_coefficients(rate, n0)
    twrc = (a + 2.0 * b) * (d / 2.0) ** al / cfg.eta \
        + 2.0 * circuit_power(1, cfg.p00)
    return DirectVsTwrc(
        direct_energy=direct,
        twrc_energy=twrc,
        winner="direct" if direct <= twrc else "twrc",
    )
