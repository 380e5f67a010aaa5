"""Bandwidth efficiency, energy efficiency, latency and route ranking."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InfeasibleRateError, UnsupportedKError
from .radio import PhyConfig, RouteSpec, circuit_power
from .power_alloc import route_allocation


@dataclass(frozen=True)
class RouteMetrics:
    be: float            # bit/s/Hz
    ee: float            # bit/J
    latency: int         # slots per bit
    end_to_end_rate: float  # bit/channel use


@dataclass(frozen=True)
class ObjectiveScore:
    f_over_k: float
    normalizers: tuple[float, float, float] | None = None  # (ee_max, be_max, latency_max)

    @property
    def normalized(self) -> float | None:
        if self.normalizers is None:
            return None
        ee_max, be_max, lat_max = self.normalizers
        return self.f_over_k * lat_max / (ee_max * be_max)


def bandwidth_efficiency(k: int, rate):
    """End-to-end rate per unit time-bandwidth: R for k <= 1, R/2 beyond.

    Computed exactly (halving, no floating drift) when ``rate`` is exact.
    """
    if not 0 <= k <= 6:
        raise UnsupportedKError(k)
    if k <= 1:
        return rate
    return Fraction(rate) / 2 if isinstance(rate, (int, Fraction)) else rate / 2.0


def latency(k: int) -> int:
    """Slots each bit spends traversing a route with k relays."""
    if not 0 <= k <= 6:
        raise UnsupportedKError(k)
    return k + 1


def energy_efficiency(spec: RouteSpec, cfg: PhyConfig) -> float:
    """Delivered bits per joule at rate cfg.rate_r, processing included.

    The denominator is transmission energy per recursion period scaled by
    the drain efficiency plus the circuit energy over the period; the
    numerator 2R counts the packet pair exchanged per period.
    """
    alloc = route_allocation(spec, cfg)
    denom = alloc.total_tx_energy / cfg.eta \
        + alloc.period_cu * circuit_power(spec.k, cfg.p00)
    return 2.0 * cfg.rate_r / denom


def route_metrics(spec: RouteSpec, cfg: PhyConfig) -> RouteMetrics:
    return RouteMetrics(
        be=float(bandwidth_efficiency(spec.k, cfg.rate_r)),
        ee=energy_efficiency(spec, cfg),
        latency=latency(spec.k),
        end_to_end_rate=cfg.rate_r,
    )


def ee_k1_closed_form(rate: float, h_sq: float, n0: float) -> float:
    """Energy efficiency of a single midpoint TWRC with processing ignored."""
    s = 2.0 ** (rate + 1.0)
    denom = n0 * (math.sqrt((s - 1.0) * (s - 2.0)) + s - 2.0) / h_sq
    return rate / denom


def objective(metrics: RouteMetrics, normalizers=None) -> ObjectiveScore:
    """Combined route score EE*BE/latency; higher is better.

    When the (ee_max, be_max, latency_max) normalizers of a comparison set
    are supplied, the dimensionless normalized score is available too.
    """
    return ObjectiveScore(
        f_over_k=metrics.ee * metrics.be / metrics.latency,
        normalizers=normalizers,
    )


@dataclass(frozen=True)
class RouteCell:
    route: RouteSpec
    metrics: RouteMetrics | None   # None when infeasible at this rate
    f_over_k: float | None
    is_winner: bool

    @property
    def feasible(self) -> bool:
        return self.metrics is not None


@dataclass(frozen=True)
class ComparisonRow:
    rate: float
    cells: tuple[RouteCell, ...]

    @property
    def winner(self) -> RouteSpec | None:
        for c in self.cells:
            if c.is_winner:
                return c.route
        return None


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]
    normalizers: tuple[float, float, float]


def compare_routes(routes, cfg: PhyConfig, r_grid) -> ComparisonTable:
    """Rank candidate routes by EE*BE/latency at each rate of ``r_grid``.

    Routes infeasible at a given rate are kept in the row but excluded from
    the ranking there.  Ties break toward lower latency, then fewer relays.
    """
    routes = list(routes)
    if not routes:
        raise ValueError("need at least one route to compare")
    rows = []
    ee_max = be_max = 0.0
    lat_max = max(latency(r.k) for r in routes)
    for rate in r_grid:
        cells = []
        for route in routes:
            try:
                m = route_metrics(route, cfg.with_(rate_r=rate))
            except InfeasibleRateError:
                cells.append((route, None, None))
                continue
            ee_max = max(ee_max, m.ee)
            be_max = max(be_max, m.be)
            cells.append((route, m, objective(m).f_over_k))
        best = None
        for route, m, f in cells:
            if f is None:
                continue
            key = (-f, latency(route.k), route.k)
            if best is None or key < best[0]:
                best = (key, route)
        rows.append(ComparisonRow(
            rate=rate,
            cells=tuple(
                RouteCell(route=route, metrics=m, f_over_k=f,
                          is_winner=(best is not None and route is best[1]))
                for route, m, f in cells),
        ))
    return ComparisonTable(rows=tuple(rows),
                           normalizers=(ee_max, be_max, float(lat_max)))
