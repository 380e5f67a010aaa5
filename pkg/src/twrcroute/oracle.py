"""Independent brute-force verifiers for the closed-form results.

Every formula in the analytic modules is re-derived here by a separate
route -- grid search, direct linear-system elimination, or finite
differences -- sharing no code with the expressions being checked.  The
test suite treats any disagreement above the stated tolerance as a
build-blocking defect.

Tolerances: 1e-9 for linear-system agreement, 1e-6 for 1-D search
agreement, 1e-4 for global grid search (grid-resolution limited).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InfeasibleRateError
from .radio import PhyConfig

TOL_LINEAR = 1e-9
TOL_SEARCH = 1e-6
TOL_GRID = 1e-4


@dataclass(frozen=True)
class OracleReport:
    target: str
    closed_form_value: float
    oracle_value: float
    relative_error: float
    passed: bool
    details: dict = field(default_factory=dict)


def _report(target: str, closed: float, oracle: float, tol: float,
            **details) -> OracleReport:
    rel = abs(closed - oracle) / max(abs(oracle), 1e-300)
    return OracleReport(target=target, closed_form_value=closed,
                        oracle_value=oracle, relative_error=rel,
                        passed=rel <= tol, details=details)


def write_reports_csv(reports, path) -> None:
    """Emit oracle reports for audit: target, closed, oracle, rel_err, pass."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("# schema=1\n")
        w = csv.writer(fh)
        w.writerow(["target", "params", "closed", "oracle", "rel_err", "pass"])
        for r in reports:
            params = ";".join(f"{k}={v}" for k, v in sorted(r.details.items()))
            w.writerow([r.target, params, repr(r.closed_form_value),
                        repr(r.oracle_value), repr(r.relative_error),
                        int(r.passed)])


# -- three-node exchange: global grid search -------------------------------

def _raw_two_slot_energy(rate, h1_sq, h2_sq, x, cfg: PhyConfig):
    """Two-slot exchange energy written out directly (vectorized in x)."""
    e = 2.0 ** rate - 1.0
    tx = 2.0 * e * (1.0 + h1_sq * x) * (1.0 + h2_sq * x) / (h1_sq * h2_sq * x) + x
    # circuit part of a source-relay-destination trio over two channel uses
    return (cfg.noise_n0 / cfg.eta) * tx + 2.0 * cfg.p00 * 1.5


def brute_force_min_f(rate: float, d: float, alpha: float, cfg: PhyConfig,
                      grid_spec: tuple[int, int] = (1201, 1201)) -> OracleReport:
    """Grid minimum of the placement energy vs the analytic midpoint value.

    Searches theta in [eps, pi/2 - eps] and x log-spaced, evaluating the raw
    two-slot energy; compares against the closed-form value at the midpoint
    with the analytic amplification.  Meaningful as a pass/fail check only
    where the midpoint is the global minimum (alpha above the threshold);
    below it the report records where the grid minimum actually sits.
    """
    from .twrc3 import (classify_midpoint, midpoint_threshold,
                        optimal_amplification, placement_energy)
    cfg = cfg.with_(alpha=alpha)
    n_theta, n_x = grid_spec
    eps = 1e-6
    thetas = np.linspace(eps, math.pi / 2.0 - eps, n_theta)
    best_val = math.inf
    best_theta = None
    for th in thetas:
        h1 = (d * math.cos(th) ** 2) ** (-alpha)
        h2 = (d * math.sin(th) ** 2) ** (-alpha)
        x_c = optimal_amplification(rate, h1, h2)
        xs = np.logspace(math.log10(x_c) - 3.0, math.log10(x_c) + 3.0, n_x)
        vals = _raw_two_slot_energy(rate, h1, h2, xs, cfg)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_theta = float(th)
    closed = placement_energy(rate, math.pi / 4.0, d, cfg).f_value
    rep = _report("placement_energy_min", closed, best_val, TOL_GRID,
                  rate=rate, d=d, alpha=alpha, argmin_theta=best_theta,
                  midpoint_is_min=(alpha > midpoint_threshold(rate)),
                  classification=classify_midpoint(rate, alpha))
    return rep


def grid_min_amplification(rate: float, h1_sq: float, h2_sq: float,
                           cfg: PhyConfig, n: int = 200001) -> OracleReport:
    """Locate the energy-minimizing amplification by dense log-grid search."""
    from .twrc3 import optimal_amplification
    closed = optimal_amplification(rate, h1_sq, h2_sq)
    # search the x-dependent transmit part only; the circuit constant can
    # dwarf its variation and drown the argmin in rounding noise
    no_circuit = cfg.with_(p00=0.0)
    xs = np.logspace(math.log10(closed) - 2.0, math.log10(closed) + 2.0, n)
    vals = _raw_two_slot_energy(rate, h1_sq, h2_sq, xs, no_circuit)
    i = int(np.argmin(vals))
    # parabolic refinement in log-x around the grid argmin
    if 0 < i < n - 1:
        l0, l1, l2 = (math.log(xs[j]) for j in (i - 1, i, i + 1))
        f0, f1, f2 = vals[i - 1], vals[i], vals[i + 1]
        denom = (f0 - 2.0 * f1 + f2)
        step = l1 - l0
        shift = 0.0 if denom == 0.0 else 0.5 * step * (f0 - f2) / denom
        oracle = math.exp(l1 + shift)
    else:
        oracle = float(xs[i])
    return _report("optimal_amplification", closed, oracle, TOL_SEARCH,
                   rate=rate, h1_sq=h1_sq, h2_sq=h2_sq)


# -- k=4 pattern: raw linear system ----------------------------------------

def numeric_solve_k4(rate: float, h_sq: float, alpha: float, n0: float,
                     beta_sq: float) -> dict[str, float]:
    """Powers of the TWRC-plus-unicast pattern by direct elimination.

    For fixed amplification the five rate/consistency equations are linear
    in the five transmit powers; they are assembled from the SINR
    definitions and solved with a dense solver.  Shares nothing with the
    closed-form coefficient route.
    """
    e = 2.0 ** rate - 1.0
    c3 = 3.0 ** (-alpha)
    c5 = 5.0 ** (-alpha)
    u = h_sq * beta_sq
    # unknowns ordered [PA, P1, P2, P4, PB], normalized by n0/h_sq
    m = np.array([
        # decode at A (partner R2 through relay R1; far end 5 hops away)
        [0.0, 0.0, u, -e * c3 * u, -e * c5],
        # decode at R2 (partner A through relay R1; far end 3 hops away)
        [u, 0.0, 0.0, -e * c3 * u, -e * c3],
        # decode at B (unicast from R4, interfered by relay R1)
        [-e * c5, 0.0, -e * c3, 1.0, 0.0],
        # decode at R4 (unicast from B, interfered by relay R1's broadcast)
        [0.0, -e * c3, 0.0, 0.0, 1.0],
        # relay broadcast power equals amplified receive power
        [-u, 1.0, -u, -c3 * u, 0.0],
    ])
    rhs = np.array([e * (u + 1.0), e * (u + 1.0), e, e, u])
    try:
        sol = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError:
        raise InfeasibleRateError(
            f"singular system for rate {rate}, alpha {alpha}") from None
    resid = float(np.max(np.abs(m @ sol - rhs)))
    if resid > 1e-12 * max(1.0, float(np.max(np.abs(rhs)))):
        raise InfeasibleRateError(
            f"ill-conditioned system for rate {rate}, alpha {alpha}")
    scale = n0 / h_sq
    names = ("A", "R1", "R2", "R4", "B")
    return {name: float(v) * scale for name, v in zip(names, sol)}


def t_energy_numeric(rate: float, h_sq: float, alpha: float, n0: float,
                     beta_sq: float) -> float:
    return sum(numeric_solve_k4(rate, h_sq, alpha, n0, beta_sq).values())


def golden_min_t(rate: float, h_sq: float, alpha: float,
                 n0: float) -> tuple[float, float]:
    """(beta_sq, energy) minimizing the k=4 pattern by golden-section search."""
    def obj(log_u):
        try:
            return t_energy_numeric(rate, h_sq, alpha, n0,
                                    math.exp(log_u) / h_sq)
        except InfeasibleRateError:
            return math.inf
    res = minimize_scalar(obj, bracket=(-10.0, 0.0, 10.0), method="golden",
                          options={"xtol": 1e-12})
    return math.exp(res.x) / h_sq, float(res.fun)


# -- k=5 pattern: raw linear system ----------------------------------------

def numeric_solve_k5(rate: float, h_sq: float, alpha: float, n0: float,
                     beta_sq: float) -> dict[str, float]:
    """Powers of the symmetric double-TWRC pattern by direct elimination."""
    powers = numeric_solve_k5_unsymmetrized(rate, h_sq, alpha, n0,
                                            beta_sq, beta_sq)
    return powers


def numeric_solve_k5_unsymmetrized(rate: float, h_sq: float, alpha: float,
                                   n0: float, beta_l: float,
                                   beta_r: float) -> dict[str, float]:
    """Double-TWRC powers without imposing the left-right symmetry.

    Each mirror relay may have its own amplification; the four decoding
    equations stay linear in the four end-node powers once the two relay
    powers are substituted.
    """
    e = 2.0 ** rate - 1.0
    c3 = 3.0 ** (-alpha)
    c5 = 5.0 ** (-alpha)
    ul = h_sq * beta_l
    ur = h_sq * beta_r
    # unknowns [PA, P2, P4, PB] normalized by n0/h_sq;
    # relay powers: P_R1 = ul*(PA + P2 + c3*P4 + c5*PB + 1),
    #               P_R5 = ur*(P4 + PB + c3*P2 + c5*PA + 1)
    # interference at R1: c3*P4 + c5*PB; at R5: c3*P2 + c5*PA
    rows = []
    rhs = []
    # decode at A (partner R2, interferer R5's broadcast at 5 hops)
    rows.append([-e * c5 * ur * c5, ul - e * c5 * ur * c3,
                 -e * ul * c3 - e * c5 * ur, -e * ul * c5 - e * c5 * ur])
    rhs.append(e * (ul + 1.0 + c5 * ur))
    # decode at R2 (partner A, interferer R5 at 3 hops)
    rows.append([ul - e * c3 * ur * c5, -e * c3 * ur * c3,
                 -e * ul * c3 - e * c3 * ur, -e * ul * c5 - e * c3 * ur])
    rhs.append(e * (ul + 1.0 + c3 * ur))
    # decode at B (partner R4, interferer R1 at 5 hops)
    rows.append([-e * ur * c5 - e * c5 * ul, -e * ur * c3 - e * c5 * ul,
                 ur - e * c5 * ul * c3, -e * c5 * ul * c5])
    rhs.append(e * (ur + 1.0 + c5 * ul))
    # decode at R4 (partner B, interferer R1 at 3 hops)
    rows.append([-e * ur * c5 - e * c3 * ul, -e * ur * c3 - e * c3 * ul,
                 -e * c3 * ul * c3, ur - e * c3 * ul * c5])
    rhs.append(e * (ur + 1.0 + c3 * ul))
    m = np.array(rows)
    b = np.array(rhs)
    try:
        sol = np.linalg.solve(m, b)
    except np.linalg.LinAlgError:
        raise InfeasibleRateError(
            f"singular system for rate {rate}, alpha {alpha}") from None
    resid = float(np.max(np.abs(m @ sol - b)))
    if resid > 1e-12 * max(1.0, float(np.max(np.abs(b)))):
        raise InfeasibleRateError(
            f"ill-conditioned system for rate {rate}, alpha {alpha}")
    pa, p2, p4, pb = (float(v) for v in sol)
    p1 = ul * (pa + p2 + c3 * p4 + c5 * pb + 1.0)
    p5 = ur * (p4 + pb + c3 * p2 + c5 * pa + 1.0)
    scale = n0 / h_sq
    return {name: v * scale for name, v in
            (("A", pa), ("R1", p1), ("R2", p2), ("R4", p4), ("R5", p5),
             ("B", pb))}


def s_energy_numeric(rate: float, h_sq: float, alpha: float, n0: float,
                     beta_sq: float) -> float:
    return sum(numeric_solve_k5(rate, h_sq, alpha, n0, beta_sq).values())


def golden_min_s(rate: float, h_sq: float, alpha: float,
                 n0: float) -> tuple[float, float]:
    """(beta_sq, energy) minimizing the k=5 pattern by golden-section search."""
    def obj(log_u):
        try:
            return s_energy_numeric(rate, h_sq, alpha, n0,
                                    math.exp(log_u) / h_sq)
        except InfeasibleRateError:
            return math.inf
    res = minimize_scalar(obj, bracket=(-10.0, 0.0, 10.0), method="golden",
                          options={"xtol": 1e-12})
    return math.exp(res.x) / h_sq, float(res.fun)


# -- generic stationarity check --------------------------------------------

def finite_difference_stationarity(f, x0: float,
                                   h_rels=(1e-4, 1e-5)) -> OracleReport:
    """Central-difference test that x0 is a stationary point of f.

    Passes when the normalized slope |f'| * x0 / f is below 1e-5 at every
    step size and the estimates are mutually consistent (Richardson-style:
    shrinking the step must not blow the slope up).
    """
    f0 = f(x0)
    slopes = []
    for h_rel in h_rels:
        h = h_rel * abs(x0)
        slopes.append((f(x0 + h) - f(x0 - h)) / (2.0 * h))
    normalized = [abs(s) * abs(x0) / abs(f0) for s in slopes]
    worst = max(normalized)
    consistent = normalized[-1] <= 10.0 * normalized[0] + 1e-12
    return OracleReport(
        target="stationarity", closed_form_value=0.0, oracle_value=worst,
        relative_error=worst, passed=(worst < 1e-5 and consistent),
        details={"x0": x0, "f0": f0, "slopes": tuple(slopes)})


# -- end-to-end noise: independent recursion -------------------------------

def noise_recursion(k: int, n_received: int) -> tuple[float, ...]:
    """Variance trace of the compact end-to-end pattern via matrix iteration.

    Independent re-statement of the accumulation: receiving nodes (parity
    alternates each slot) pick up their neighbors' held variances plus one
    fresh unit; end nodes inject variance zero.  Implemented as alternating
    linear maps on the relay-variance vector.
    """
    n_nodes = k + 2
    maps = []
    for tx_parity in (0, 1):
        m = np.zeros((n_nodes, n_nodes))
        add = np.zeros(n_nodes)
        for i in range(n_nodes):
            if i % 2 == tx_parity or i in (0, n_nodes - 1):
                m[i, i] = 1.0  # holds its packet unchanged
                continue
            add[i] = 1.0
            for j in (i - 1, i + 1):
                if 0 < j < n_nodes - 1:
                    m[i, j] = 1.0
        maps.append((m, add))
    v = np.zeros(n_nodes)
    out = []
    slot = 0
    while len(out) < n_received:
        m, add = maps[slot % 2]
        v = m @ v + add
        if 0 % 2 != slot % 2:  # node 0 received this slot
            out.append(float(v[1] + 1.0))
        slot += 1
    return tuple(out[:n_received])
