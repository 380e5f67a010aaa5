"""Closed-form optimal power allocations for routes with 0..6 relays.

Each route decomposes into at most two segment types per recursion period:

  u -- a unicast hop pair (two one-way transmissions),
  g -- an interference-free three-node TWRC,
  t -- the TWRC-plus-unicast pattern with cross interference (k = 4 phase),
  s -- the double-TWRC pattern with cross interference (k = 5 phase).

Segment energies are J per two channel uses; the period is two channel
uses for k <= 1 and four for k >= 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType

from .errors import InfeasibleRateError, UnsupportedKError, ZeroRateError
from .radio import PhyConfig, RouteSpec, path_gain_sq
from .twrc3 import ab_coefficients, optimal_amplification

RATE_BRACKET = (0.01, 20.0)
RATE_BISECT_TOL = 1e-9


@dataclass(frozen=True)
class CoeffsA:
    """Dimensionless coefficients of the t-segment energy and powers."""

    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    a6: float
    a7: float
    a8: float


@dataclass(frozen=True)
class CoeffsB:
    """Dimensionless coefficients of the s-segment energy and powers."""

    b1: float
    b2: float
    b3: float
    b4: float
    b5: float
    b6: float
    b7: float


@dataclass(frozen=True)
class SegmentAllocation:
    """Per-node transmit energies for one segment of the schedule.

    ``powers`` maps segment-local roles (A, R1, ..., B) to J/channel use;
    ``energy`` is the segment total in J per two channel uses; ``beta_sq``
    is the squared relay amplification where the segment amplifies.
    """

    kind: str
    energy: float
    powers: "MappingProxyType[str, float]"
    beta_sq: float | None = None


@dataclass(frozen=True)
class PowerAllocation:
    k: int
    segments: tuple[SegmentAllocation, ...]
    total_tx_energy: float
    period_cu: int
    h_sq: float = 1.0  # squared gain of one hop, for link-budget checks

    @property
    def beta_sqs(self) -> tuple[float, ...]:
        return tuple(s.beta_sq for s in self.segments if s.beta_sq is not None)


def _powers(d: dict) -> "MappingProxyType[str, float]":
    return MappingProxyType(dict(d))


def alloc_k0(rate: float, h_sq: float, n0: float) -> SegmentAllocation:
    """Symmetric unicast powers achieving ``rate`` on a single hop."""
    p = n0 * (2.0 ** rate - 1.0) / h_sq
    return SegmentAllocation(kind="u", energy=2.0 * p,
                             powers=_powers({"A": p, "B": p}))


def alloc_k1(rate: float, h_sq: float, n0: float) -> SegmentAllocation:
    """Optimal three-node TWRC allocation over two equal hops."""
    if rate <= 0:
        raise ZeroRateError("TWRC allocation degenerates at zero rate")
    x = optimal_amplification(rate, h_sq, h_sq)
    e = 2.0 ** rate - 1.0
    p_end = e * (h_sq * x + 1.0) * n0 / (h_sq * h_sq * x)
    p_relay = (2.0 * h_sq * p_end + n0) * x
    a, b = ab_coefficients(rate, n0)
    return SegmentAllocation(
        kind="g",
        energy=(a + 2.0 * b) / h_sq,
        powers=_powers({"A": p_end, "R": p_relay, "B": p_end}),
        beta_sq=x,
    )


def coeffs_a(rate: float, alpha: float) -> CoeffsA:
    """Coefficients of the t-segment system as functions of rate and alpha."""
    if rate <= 0:
        raise ZeroRateError("coefficients degenerate at zero rate")
    e = 2.0 ** rate - 1.0
    s = 2.0 * e + 1.0  # 2^(R+1) - 1
    c3 = 3.0 ** (-alpha)
    c5 = 5.0 ** (-alpha)
    p3 = 3.0 ** alpha
    a1 = -e * e * c5 + (2.0 ** rate) * e * c3 + p3
    a2 = (2.0 ** rate) * e * c5 - e * e * c3 + p3
    a3 = (e * e / s) * (1.0 - p3) * (2.0 * c3 + (c3 * c3 * c5 + c3 ** 3) * e) + e
    a4 = c3 * c3 * e * e + c3 * e
    a5 = (e / s) * (a1 * (c3 + c3 * c3 * c5 * e) + a2 * (c3 + c3 ** 3 * e))
    if 1.0 - a5 <= 0.0:
        raise InfeasibleRateError(
            f"rate {rate} infeasible for the t-segment: 1 - a5 <= 0",
            condition="1 - a5 > 0")
    a6 = (a1 * a4 * (1.0 + e * c5) + a2 * a4 * (1.0 + e * c3)) / (s * (1.0 - a5)) \
        + e - p3 + (a3 / (1.0 - a5)) * (p3 / e + 1.0)
    a7 = (e * (1.0 - p3) / s) * (2.0 + e * (c3 + c5)) \
        + (a1 * a3 * (1.0 + e * c5) + a2 * a3 * (1.0 + e * c3)) / ((1.0 - a5) * s)
    a8 = (a4 / (1.0 - a5)) * (p3 / e + 1.0)
    return CoeffsA(a1, a2, a3, a4, a5, a6, a7, a8)


def alloc_k4_segment_t(rate: float, h_sq: float, alpha: float,
                       n0: float) -> SegmentAllocation:
    """Minimum-energy allocation of the TWRC-plus-unicast (t) segment.

    Roles: A, R2 exchange through relay R1 while R4 and B exchange by
    unicast three hops away.  Raises InfeasibleRateError above the rate
    upper limit for this pattern.
    """
    c = coeffs_a(rate, alpha)
    for name, val in (("a7", c.a7), ("a8", c.a8)):
        if val <= 0.0:
            raise InfeasibleRateError(
                f"rate {rate} infeasible for the t-segment: {name} <= 0",
                condition=f"{name} > 0")
    e = 2.0 ** rate - 1.0
    s = 2.0 * e + 1.0
    c3 = 3.0 ** (-alpha)
    c5 = 5.0 ** (-alpha)
    p3 = 3.0 ** alpha
    # optimal h^2 * beta^2; all powers scale as n0/h_sq
    u = math.sqrt(c.a7 / c.a8)
    pb = (c.a3 + c.a4 * u) / (1.0 - c.a5)
    pa = (c.a1 * pb + e * (1.0 - p3)) / (s * u)
    p2 = (c.a2 * pb + e * (1.0 - p3)) / (s * u)
    p4 = e * (c3 * p2 + c5 * pa) + e
    p1 = p3 * pb / e - p3
    raw = {"A": pa, "R1": p1, "R2": p2, "R4": p4, "B": pb}
    for role, val in raw.items():
        if val <= 0.0:
            raise InfeasibleRateError(
                f"rate {rate} infeasible for the t-segment: power at {role} <= 0",
                condition=f"P_{role} > 0")
    scale = n0 / h_sq
    return SegmentAllocation(
        kind="t",
        energy=(2.0 * math.sqrt(c.a7 * c.a8) + c.a6) * scale,
        powers=_powers({r: v * scale for r, v in raw.items()}),
        beta_sq=u / h_sq,
    )


def coeffs_b(rate: float, alpha: float) -> CoeffsB:
    """Coefficients of the s-segment system as functions of rate and alpha."""
    if rate <= 0:
        raise ZeroRateError("coefficients degenerate at zero rate")
    e = 2.0 ** rate - 1.0
    c3 = 3.0 ** (-alpha)
    c5 = 5.0 ** (-alpha)
    d12 = 1.0 - e * (c3 - c5) * (1.0 + c5)
    if d12 <= 0.0:
        raise InfeasibleRateError(
            f"rate {rate} infeasible for the s-segment: b1/b2 denominator <= 0",
            condition="1 - (2^R-1)(3^-a - 5^-a)(1 + 5^-a) > 0")
    b1 = (1.0 + e * (c3 - c5) * (1.0 + c3)) / d12
    b2 = e * (c3 - c5) / d12
    d34 = 1.0 - e * (b1 * c5 * (2.0 + c5) + c5 + c3 + c3 * c5)
    if d34 <= 0.0:
        raise InfeasibleRateError(
            f"rate {rate} infeasible for the s-segment: b3/b4 denominator <= 0",
            condition="b3/b4 denominator > 0")
    b3 = ((2.0 * c5 + c5 * c5) * b2 + c5 + 1.0) * e / d34
    b4 = e / d34
    b5 = 2.0 * (b1 * b3 + b2) * (1.0 + c5) + 2.0 * b3 * (1.0 + c3) + 2.0
    b6 = 2.0 * (b1 + 1.0) * b4
    b7 = 2.0 * (b1 * b3 + b2) + 2.0 * b1 * b4 * (1.0 + c5) \
        + 2.0 * b3 + 2.0 * b4 * (1.0 + c3)
    return CoeffsB(b1, b2, b3, b4, b5, b6, b7)


def alloc_k5_segment_s(rate: float, h_sq: float, alpha: float,
                       n0: float) -> SegmentAllocation:
    """Minimum-energy allocation of the double-TWRC (s) segment.

    Two mirror TWRCs run concurrently; by symmetry P_A = P_B,
    P_R2 = P_R4 and P_R1 = P_R5.
    """
    c = coeffs_b(rate, alpha)
    for name, val in (("b5", c.b5), ("b6", c.b6)):
        if val <= 0.0:
            raise InfeasibleRateError(
                f"rate {rate} infeasible for the s-segment: {name} <= 0",
                condition=f"{name} > 0")
    c3 = 3.0 ** (-alpha)
    c5 = 5.0 ** (-alpha)
    u = math.sqrt(c.b6 / c.b5)
    pa = ((c.b1 * c.b3 + c.b2) * u + c.b1 * c.b4) / u
    p2 = (c.b3 * u + c.b4) / u
    p1 = u * ((1.0 + c5) * pa + (1.0 + c3) * p2 + 1.0)
    raw = {"A": pa, "R1": p1, "R2": p2, "R4": p2, "R5": p1, "B": pa}
    for role, val in raw.items():
        if val <= 0.0:
            raise InfeasibleRateError(
                f"rate {rate} infeasible for the s-segment: power at {role} <= 0",
                condition=f"P_{role} > 0")
    scale = n0 / h_sq
    return SegmentAllocation(
        kind="s",
        energy=(2.0 * math.sqrt(c.b5 * c.b6) + c.b7) * scale,
        powers=_powers({r: v * scale for r, v in raw.items()}),
        beta_sq=u / h_sq,
    )


# Segment composition per relay count.
_COMPOSITION = {
    0: ("u",),
    1: ("g",),
    2: ("u", "g"),
    3: ("g", "g"),
    4: ("g", "t"),
    5: ("g", "s"),
    6: ("t", "s"),
}


def _build_segment(kind: str, rate: float, h_sq: float, alpha: float,
                   n0: float) -> SegmentAllocation:
    if kind == "u":
        return alloc_k0(rate, h_sq, n0)
    if kind == "g":
        return alloc_k1(rate, h_sq, n0)
    if kind == "t":
        return alloc_k4_segment_t(rate, h_sq, alpha, n0)
    return alloc_k5_segment_s(rate, h_sq, alpha, n0)


def route_allocation(spec: RouteSpec, cfg: PhyConfig) -> PowerAllocation:
    """Minimum-energy allocation for a whole route at rate cfg.rate_r.

    The returned total is transmission energy per recursion period (two
    channel uses for k <= 1, four for k >= 2).
    """
    try:
        kinds = _COMPOSITION[spec.k]
    except KeyError:
        raise UnsupportedKError(spec.k) from None
    h_sq = path_gain_sq(spec.d_hop, cfg.alpha)
    segments = tuple(
        _build_segment(kind, cfg.rate_r, h_sq, cfg.alpha, cfg.noise_n0)
        for kind in kinds)
    return PowerAllocation(
        k=spec.k,
        segments=segments,
        total_tx_energy=sum(s.energy for s in segments),
        period_cu=2 if spec.k <= 1 else 4,
        h_sq=h_sq,
    )


def is_rate_feasible(k: int, rate: float, alpha: float) -> bool:
    """True when the closed-form allocation exists for (k, rate, alpha)."""
    if not 0 <= k <= 6:
        raise UnsupportedKError(k)
    if rate <= 0:
        return False
    try:
        # feasibility does not depend on h or N0 (homogeneity), use 1
        for kind in _COMPOSITION[k]:
            _build_segment(kind, rate, 1.0, alpha, 1.0)
    except InfeasibleRateError:
        return False
    return True


def rate_upper_limit(k: int, alpha: float) -> float:
    """Supremum of the feasible per-link rate; inf for k <= 3.

    For k >= 4 the limit is located by bisection on the feasibility
    predicate over the bracket (0.01, 20) to 1e-9 absolute.
    """
    if not 0 <= k <= 6:
        raise UnsupportedKError(k)
    if k <= 3:
        return math.inf
    lo, hi = RATE_BRACKET
    if not is_rate_feasible(k, lo, alpha):
        raise InfeasibleRateError(
            f"no feasible rate above {lo} for k={k}, alpha={alpha}")
    if is_rate_feasible(k, hi, alpha):
        return math.inf
    while hi - lo > RATE_BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if is_rate_feasible(k, mid, alpha):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
