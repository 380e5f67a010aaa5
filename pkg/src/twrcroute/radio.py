"""Physical-layer constants, unit conversions, path loss and processing energy.

All internal energies are linear J/channel use; dBm appears only at the
input boundary.  One channel use is fixed at 1 s*Hz, so "per channel use"
and "per second per hertz" coincide throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainError, UnsupportedKError

# Circuit-power multipliers P_{0,k}/P_{0,0} for k = 0..6 relays.  These
# follow from the average number of active nodes per channel use of the
# hop-by-hop schedule; the multipliers are fixed, not recomputed from
# schedules.
CIRCUIT_MULTIPLIERS = {
    0: 1.0,
    1: 1.5,
    2: 1.25,
    3: 1.75,
    4: 2.0,
    5: 2.25,
    6: 2.75,
}

K_MIN, K_MAX = 0, 6


def noise_from_dbm_per_hz(n0_dbm: float) -> float:
    """Convert a noise density in dBm/Hz to J per channel use (linear)."""
    if not math.isfinite(n0_dbm):
        raise DomainError(f"noise density must be finite, got {n0_dbm}")
    return 10.0 ** ((n0_dbm - 30.0) / 10.0)


# Default physical-layer values: path-loss exponent 4, -174 dBm/Hz noise,
# drain efficiency 0.75, baseline circuit power 5e-7 mJ/cu, rate 1 bit/cu.
DEFAULT_ALPHA = 4.0
DEFAULT_N0_DBM = -174.0
DEFAULT_ETA = 0.75
DEFAULT_P00_MJ = 5e-7
DEFAULT_RATE = 1.0


@dataclass(frozen=True)
class PhyConfig:
    """Physical-layer constants.

    alpha     -- path-loss exponent (dimensionless, > 0)
    noise_n0  -- noise energy, J/channel use (linear)
    eta       -- power-amplifier drain efficiency, in (0, 1]
    p00       -- baseline circuit power P_{0,0}, J/channel use
    rate_r    -- per-link transmission rate, bit/channel use
    """

    alpha: float = DEFAULT_ALPHA
    noise_n0: float = noise_from_dbm_per_hz(DEFAULT_N0_DBM)
    eta: float = DEFAULT_ETA
    p00: float = DEFAULT_P00_MJ * 1e-3
    rate_r: float = DEFAULT_RATE

    def __post_init__(self):
        if self.alpha <= 0:
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if not 0 < self.eta <= 1:
            raise DomainError(f"eta must be in (0, 1], got {self.eta}")
        if self.noise_n0 <= 0:
            raise DomainError(f"noise_n0 must be > 0, got {self.noise_n0}")
        if self.p00 < 0:
            raise DomainError(f"p00 must be >= 0, got {self.p00}")
        if self.rate_r < 0:
            raise DomainError(f"rate_r must be >= 0, got {self.rate_r}")

    def with_(self, **kwargs) -> "PhyConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class RouteSpec:
    """One candidate route: total length in meters and relay count k in 0..6."""

    d_route: float
    k: int

    def __post_init__(self):
        if self.d_route <= 0:
            raise DomainError(f"d_route must be > 0, got {self.d_route}")
        if not (K_MIN <= self.k <= K_MAX) or int(self.k) != self.k:
            raise UnsupportedKError(self.k)

    @property
    def d_hop(self) -> float:
        return self.d_route / (self.k + 1)


@dataclass(frozen=True)
class ProcessingEnergy:
    """Average processing energy per channel use, split into its two parts."""

    pa_part: float
    circuit_part: float

    @property
    def per_cu(self) -> float:
        return self.pa_part + self.circuit_part


def path_gain_sq(d: float, alpha: float) -> float:
    """Large-scale channel gain squared, d^(-alpha)."""
    if d <= 0:
        raise DomainError(f"distance must be > 0, got {d}")
    if alpha <= 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    return d ** (-alpha)


def circuit_power(k: int, p00: float) -> float:
    """Circuit power P_{0,k} for a route with k relays, J/channel use."""
    try:
        mult = CIRCUIT_MULTIPLIERS[k]
    except (KeyError, TypeError):
        raise UnsupportedKError(k) from None
    return p00 * mult


def processing_energy(transmission_energy_per_cu: float, k: int,
                      cfg: PhyConfig) -> ProcessingEnergy:
    """Average processing energy per channel use for a given transmit energy.

    The power-amplifier part is (1/eta - 1) times the transmission energy;
    the circuit part is P_{0,k}.
    """
    if transmission_energy_per_cu < 0:
        raise DomainError("transmission energy must be >= 0")
    pa = (1.0 / cfg.eta - 1.0) * transmission_energy_per_cu
    return ProcessingEnergy(pa_part=pa, circuit_part=circuit_power(k, cfg.p00))


_CONFIG_KEYS = ("alpha", "n0_dbm_per_hz", "eta", "p00_mj_per_cu", "rate_r")


def load_config(path) -> PhyConfig:
    """Read a key = value text file into a PhyConfig.

    Recognized keys: alpha, n0_dbm_per_hz, eta, p00_mj_per_cu, rate_r.
    Missing keys fall back to the defaults; '#' starts a comment.
    """
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = float(val.strip())
            except ValueError:
                raise DomainError(
                    f"{path}:{lineno}: non-numeric value for {key!r}") from None
    kwargs = {}
    if "alpha" in values:
        kwargs["alpha"] = values["alpha"]
    if "n0_dbm_per_hz" in values:
        kwargs["noise_n0"] = noise_from_dbm_per_hz(values["n0_dbm_per_hz"])
    if "eta" in values:
        kwargs["eta"] = values["eta"]
    if "p00_mj_per_cu" in values:
        kwargs["p00"] = values["p00_mj_per_cu"] * 1e-3
    if "rate_r" in values:
        kwargs["rate_r"] = values["rate_r"]
    return PhyConfig(**kwargs)
