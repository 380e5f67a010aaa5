"""Slot-level machinery for the hop-by-hop scheme.

Builds the per-k periodic slot schedule, runs a packet-token simulation
over it, verifies that a closed-form allocation reproduces the target rate
on every decoding link, quantifies the error of ignoring interference, and
demonstrates the noise accumulation of the compact end-to-end pattern.

Nodes are indexed 0 (source A) through k+1 (destination B); relays sit at
1..k.  Gains between nodes n hops apart are (n*d_hop)^(-alpha); a
transmitter three or more hops from a receiver is the only kind of
interferer the schedules permit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, RateVerificationError, UnsupportedKError
from .radio import PhyConfig, RouteSpec, circuit_power
from .power_alloc import (
    PowerAllocation,
    alloc_k1,
    route_allocation,
)

ROLE_TX_UNICAST = "tx-unicast"
ROLE_TX_TWRC = "tx-twrc"
ROLE_RX = "rx"
ROLE_AMPLIFY = "amplify-broadcast"
ROLE_IDLE = "idle"

RATE_TOL = 1e-9
MIN_INTERFERER_HOPS = 3


@dataclass(frozen=True)
class TwrcPhase:
    """A three-node exchange: ends transmit in up_slot, relay broadcasts next."""
    left: int
    mid: int
    right: int
    up_slot: int
    bc_slot: int
    seg: int
    role_left: str
    role_mid: str
    role_right: str


@dataclass(frozen=True)
class UnicastLink:
    tx: int
    rx: int
    slot: int
    seg: int
    role_tx: str


@dataclass(frozen=True)
class SlotAction:
    node: int
    role: str
    counterparts: tuple[int, ...]


@dataclass(frozen=True)
class SlotSchedule:
    k: int
    period: int
    n_nodes: int
    twrcs: tuple[TwrcPhase, ...]
    unicasts: tuple[UnicastLink, ...]

    def transmitters(self, slot: int) -> dict[int, tuple[int, str, str]]:
        """node -> (seg index, role key, action role) for the given slot."""
        out = {}
        for tw in self.twrcs:
            if slot == tw.up_slot:
                out[tw.left] = (tw.seg, tw.role_left, ROLE_TX_TWRC)
                out[tw.right] = (tw.seg, tw.role_right, ROLE_TX_TWRC)
            elif slot == tw.bc_slot:
                out[tw.mid] = (tw.seg, tw.role_mid, ROLE_AMPLIFY)
        for un in self.unicasts:
            if slot == un.slot:
                out[un.tx] = (un.seg, un.role_tx, ROLE_TX_UNICAST)
        return out

    def receivers(self, slot: int) -> dict[int, tuple[int, ...]]:
        """node -> intended source nodes for the given slot."""
        out = {}
        for tw in self.twrcs:
            if slot == tw.up_slot:
                out[tw.mid] = (tw.left, tw.right)
            elif slot == tw.bc_slot:
                out[tw.left] = (tw.mid,)
                out[tw.right] = (tw.mid,)
        for un in self.unicasts:
            if slot == un.slot:
                out[un.rx] = (un.tx,)
        return out

    def transfers(self, slot: int) -> tuple[tuple[int, int], ...]:
        """Directed token moves executed in the given slot."""
        moves = []
        for tw in self.twrcs:
            if slot == tw.up_slot:
                moves += [(tw.left, tw.mid), (tw.right, tw.mid)]
            elif slot == tw.bc_slot:
                moves += [(tw.mid, tw.right), (tw.mid, tw.left)]
        for un in self.unicasts:
            if slot == un.slot:
                moves.append((un.tx, un.rx))
        return tuple(moves)

    def slot_actions(self, slot: int) -> tuple[SlotAction, ...]:
        actions = []
        busy = {}
        for tw in self.twrcs:
            if slot == tw.up_slot:
                busy[tw.left] = SlotAction(tw.left, ROLE_TX_TWRC, (tw.mid,))
                busy[tw.right] = SlotAction(tw.right, ROLE_TX_TWRC, (tw.mid,))
                busy[tw.mid] = SlotAction(tw.mid, ROLE_RX, (tw.left, tw.right))
            elif slot == tw.bc_slot:
                busy[tw.mid] = SlotAction(tw.mid, ROLE_AMPLIFY, (tw.left, tw.right))
                busy[tw.left] = SlotAction(tw.left, ROLE_RX, (tw.mid,))
                busy[tw.right] = SlotAction(tw.right, ROLE_RX, (tw.mid,))
        for un in self.unicasts:
            if slot == un.slot:
                busy[un.tx] = SlotAction(un.tx, ROLE_TX_UNICAST, (un.rx,))
                busy[un.rx] = SlotAction(un.rx, ROLE_RX, (un.tx,))
        for node in range(self.n_nodes):
            actions.append(busy.get(node, SlotAction(node, ROLE_IDLE, ())))
        return tuple(actions)


def build_schedule(k: int) -> SlotSchedule:
    """Periodic slot schedule of the hop-by-hop scheme for k relays.

    Slot 0 always carries the source's insertion.  Segment indices match
    the order of the segments in a route allocation for the same k.
    """
    if k not in range(0, 7):
        raise UnsupportedKError(k)
    b = k + 1  # destination node index
    if k == 0:
        sched = SlotSchedule(k, 2, 2, (), (
            UnicastLink(0, 1, 0, 0, "A"),
            UnicastLink(1, 0, 1, 0, "B"),
        ))
    elif k == 1:
        sched = SlotSchedule(k, 2, 3, (
            TwrcPhase(0, 1, 2, 0, 1, 0, "A", "R", "B"),
        ), ())
    elif k == 2:
        sched = SlotSchedule(k, 4, 4, (
            TwrcPhase(1, 2, 3, 1, 2, 1, "A", "R", "B"),
        ), (
            UnicastLink(0, 1, 0, 0, "A"),
            UnicastLink(1, 0, 3, 0, "B"),
        ))
    elif k == 3:
        sched = SlotSchedule(k, 4, 5, (
            TwrcPhase(0, 1, 2, 0, 1, 0, "A", "R", "B"),
            TwrcPhase(2, 3, 4, 2, 3, 1, "A", "R", "B"),
        ), ())
    elif k == 4:
        sched = SlotSchedule(k, 4, 6, (
            TwrcPhase(0, 1, 2, 0, 1, 1, "A", "R1", "R2"),
            TwrcPhase(2, 3, 4, 2, 3, 0, "A", "R", "B"),
        ), (
            UnicastLink(4, 5, 0, 1, "R4"),
            UnicastLink(5, 4, 1, 1, "B"),
        ))
    elif k == 5:
        sched = SlotSchedule(k, 4, 7, (
            TwrcPhase(0, 1, 2, 0, 1, 1, "A", "R1", "R2"),
            TwrcPhase(4, 5, 6, 0, 1, 1, "R4", "R5", "B"),
            TwrcPhase(2, 3, 4, 2, 3, 0, "A", "R", "B"),
        ), ())
    else:  # k == 6: first two slots double-TWRC, last two TWRC plus unicast
        sched = SlotSchedule(k, 4, 8, (
            TwrcPhase(0, 1, 2, 0, 1, 1, "A", "R1", "R2"),
            TwrcPhase(4, 5, 6, 0, 1, 1, "R4", "R5", "B"),
            TwrcPhase(2, 3, 4, 2, 3, 0, "A", "R1", "R2"),
        ), (
            UnicastLink(6, 7, 2, 0, "R4"),
            UnicastLink(7, 6, 3, 0, "B"),
        ))
    check_schedule(sched)
    return sched


def check_schedule(sched: SlotSchedule) -> None:
    """Raise DomainError on a half-duplex or interference-range violation."""
    for slot in range(sched.period):
        txs = sched.transmitters(slot)
        rxs = sched.receivers(slot)
        both = set(txs) & set(rxs)
        if both:
            raise DomainError(
                f"slot {slot}: nodes {sorted(both)} transmit and receive")
        for rx, intended in rxs.items():
            for tx in txs:
                if tx in intended or tx == rx:
                    continue
                if abs(tx - rx) < MIN_INTERFERER_HOPS:
                    raise DomainError(
                        f"slot {slot}: interferer {tx} within two hops of "
                        f"receiver {rx}")


@dataclass
class SimResult:
    total_slots: int
    delivered_pairs: int
    hop_trace: list  # (slot number, token id, from node, to node)


def simulate_hop_by_hop(k: int, n_pairs: int) -> SimResult:
    """Token-level run of the schedule until n packet pairs are exchanged.

    Slots are counted from the source's first insertion (slot 1).  End
    nodes mint fresh tokens when the schedule lets them transmit; a token
    advances one hop per slot in which its holder forwards it.
    """
    if n_pairs < 1:
        raise DomainError("n_pairs must be >= 1")
    sched = build_schedule(k)
    dest = {+1: k + 1, -1: 0}
    origin = {+1: 0, -1: k + 1}
    holding = {node: {} for node in range(k + 2)}  # node -> {dir: token id}
    inserted = {+1: 0, -1: 0}
    delivered = {+1: 0, -1: 0}
    trace = []
    next_id = 0
    slot_no = 0
    limit = 8 * (k + 2) * (n_pairs + 2) + 16
    while delivered[+1] < n_pairs or delivered[-1] < n_pairs:
        slot_no += 1
        if slot_no > limit:
            raise RuntimeError("simulation failed to drain; schedule broken")
        moves = []
        snapshot = {n: dict(d) for n, d in holding.items()}
        for u, v in sched.transfers((slot_no - 1) % sched.period):
            direction = +1 if v > u else -1
            if u == origin[direction]:
                if inserted[direction] < n_pairs:
                    inserted[direction] += 1
                    moves.append((u, v, direction, next_id))
                    next_id += 1
            elif direction in snapshot[u]:
                moves.append((u, v, direction, snapshot[u].pop(direction)))
        for u, v, direction, tok in moves:
            holding[u].pop(direction, None)
            if v == dest[direction]:
                delivered[direction] += 1
            else:
                holding[v][direction] = tok
            trace.append((slot_no, tok, u, v))
        in_flight = sum(len(d) for d in holding.values())
        total_in = inserted[+1] + inserted[-1]
        total_out = delivered[+1] + delivered[-1]
        if total_in != total_out + in_flight:
            raise RuntimeError("token conservation violated")
    return SimResult(total_slots=slot_no, delivered_pairs=n_pairs,
                     hop_trace=trace)


@dataclass(frozen=True)
class LinkBudget:
    slot: int
    rx_node: int
    origin_node: int
    kind: str  # "twrc" or "unicast"
    signal: float
    interference: float
    noise: float
    rate: float


def _slot_powers(sched: SlotSchedule, alloc: PowerAllocation):
    """tx power per (slot, node) over one period."""
    powers = {}
    for slot in range(sched.period):
        for node, (seg, role, _) in sched.transmitters(slot).items():
            powers[(slot, node)] = alloc.segments[seg].powers[role]
    return powers


def verify_rates(k: int, alloc: PowerAllocation, cfg: PhyConfig,
                 check: bool = True) -> list[LinkBudget]:
    """Link budgets of every decoding link under the given allocation.

    With ``check`` set, every achieved rate must match cfg.rate_r and every
    relay broadcast power must equal the amplified receive power, both
    within 1e-9 relative; violations raise RateVerificationError naming
    the link.
    """
    if alloc.k != k:
        raise DomainError(f"allocation built for k={alloc.k}, not {k}")
    sched = build_schedule(k)
    powers = _slot_powers(sched, alloc)
    h2 = alloc.h_sq
    n0 = cfg.noise_n0

    def gain(hops: int) -> float:
        return h2 * float(hops) ** (-cfg.alpha)

    def interference_at(slot: int, rx: int, exclude: set) -> float:
        total = 0.0
        for node, (seg, role, _) in sched.transmitters(slot).items():
            if node in exclude or node == rx:
                continue
            total += gain(abs(node - rx)) * powers[(slot, node)]
        return total

    budgets = []
    for tw in sched.twrcs:
        x = alloc.segments[tw.seg].beta_sq
        p_l = powers[(tw.up_slot, tw.left)]
        p_r = powers[(tw.up_slot, tw.right)]
        p_m = powers[(tw.bc_slot, tw.mid)]
        i_mid = interference_at(tw.up_slot, tw.mid, {tw.left, tw.right})
        expected_pm = x * (h2 * p_l + h2 * p_r + i_mid + n0)
        if check and abs(p_m - expected_pm) > RATE_TOL * max(expected_pm, 1e-300):
            raise RateVerificationError(
                f"relay {tw.mid} broadcast power inconsistent with its "
                f"amplification", link=(tw.mid,))
        for decoder, partner in ((tw.left, tw.right), (tw.right, tw.left)):
            p_partner = powers[(tw.up_slot, partner)]
            i_dec = interference_at(tw.bc_slot, decoder, {tw.mid})
            signal = h2 * x * h2 * p_partner
            amplified = h2 * x * (n0 + i_mid)
            rate = math.log2(1.0 + signal / (amplified + n0 + i_dec))
            budgets.append(LinkBudget(
                slot=tw.bc_slot, rx_node=decoder, origin_node=partner,
                kind="twrc", signal=signal, interference=i_dec + h2 * x * i_mid,
                noise=amplified - h2 * x * i_mid + n0, rate=rate))
    for un in sched.unicasts:
        p_tx = powers[(un.slot, un.tx)]
        i_rx = interference_at(un.slot, un.rx, {un.tx})
        signal = h2 * p_tx
        rate = math.log2(1.0 + signal / (i_rx + n0))
        budgets.append(LinkBudget(
            slot=un.slot, rx_node=un.rx, origin_node=un.tx,
            kind="unicast", signal=signal, interference=i_rx, noise=n0,
            rate=rate))
    if check:
        for b in budgets:
            if abs(b.rate - cfg.rate_r) > RATE_TOL * max(cfg.rate_r, 1e-300):
                raise RateVerificationError(
                    f"link {b.origin_node}->{b.rx_node} (slot {b.slot}) "
                    f"achieves {b.rate}, target {cfg.rate_r}",
                    link=(b.origin_node, b.rx_node))
    return budgets


# -- SNR-only (interference-blind) segment energies ------------------------

def _minimize_log_u(fn) -> float:
    """Minimum of fn(u) over u > 0, searched on a log grid then refined."""
    import numpy as np
    lus = np.linspace(-14.0, 14.0, 4001)
    vals = [fn(math.exp(lu)) for lu in lus]
    i = int(np.argmin(vals))
    lo = lus[max(i - 1, 0)]
    hi = lus[min(i + 1, len(lus) - 1)]
    for _ in range(80):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if fn(math.exp(m1)) <= fn(math.exp(m2)):
            hi = m2
        else:
            lo = m1
    return fn(math.exp(0.5 * (lo + hi)))


def _t_segment_snr(rate: float, h_sq: float, alpha: float, n0: float) -> float:
    """t-segment energy when decoders ignore interference terms.

    Only the rate equations drop their interference; the relay still
    amplifies everything it hears.
    """
    e = 2.0 ** rate - 1.0
    c3 = 3.0 ** (-alpha)

    def total(u: float) -> float:
        pa = e * (u + 1.0) / u
        p2 = pa
        p4 = e
        pb = e
        p1 = u * (pa + p2 + c3 * p4 + 1.0)
        return pa + p1 + p2 + p4 + pb

    return _minimize_log_u(total) * n0 / h_sq


def _s_segment_snr(rate: float, h_sq: float, alpha: float, n0: float) -> float:
    """s-segment energy when decoders ignore interference terms."""
    e = 2.0 ** rate - 1.0
    c3 = 3.0 ** (-alpha)
    c5 = 5.0 ** (-alpha)

    def total(u: float) -> float:
        pa = e * (u + 1.0) / u
        p2 = pa
        p1 = u * ((1.0 + c5) * pa + (1.0 + c3) * p2 + 1.0)
        return 2.0 * (pa + p1 + p2)

    return _minimize_log_u(total) * n0 / h_sq


@dataclass(frozen=True)
class SinrErrorPoint:
    be: float
    ee_sinr: float | None
    ee_snr: float
    error_pct: float | None

    @property
    def feasible(self) -> bool:
        return self.ee_sinr is not None


def snr_vs_sinr_error(k: int, cfg: PhyConfig, be_grid,
                      d_route: float = 1000.0) -> list[SinrErrorPoint]:
    """EE error incurred by computing capacity from SNR instead of SINR.

    Only k >= 4 carries interference.  Points whose bandwidth efficiency
    exceeds the rate limit are marked infeasible for the SINR curve.
    """
    if k < 4 or k > 6:
        raise DomainError("interference-bearing patterns require k in 4..6")
    from .errors import InfeasibleRateError
    from .radio import path_gain_sq
    from .power_alloc import _COMPOSITION, _build_segment

    d_hop = d_route / (k + 1)
    h_sq = path_gain_sq(d_hop, cfg.alpha)
    out = []
    for be in be_grid:
        rate = 2.0 * be
        spec = RouteSpec(d_route=d_route, k=k)
        local = cfg.with_(rate_r=rate)
        circuit = 4.0 * circuit_power(k, cfg.p00)
        try:
            alloc = route_allocation(spec, local)
            ee_sinr = 2.0 * rate / (alloc.total_tx_energy / cfg.eta + circuit)
        except InfeasibleRateError:
            ee_sinr = None
        snr_energy = 0.0
        for kind in _COMPOSITION[k]:
            if kind == "t":
                snr_energy += _t_segment_snr(rate, h_sq, cfg.alpha, cfg.noise_n0)
            elif kind == "s":
                snr_energy += _s_segment_snr(rate, h_sq, cfg.alpha, cfg.noise_n0)
            else:
                snr_energy += _build_segment(
                    kind, rate, h_sq, cfg.alpha, cfg.noise_n0).energy
        ee_snr = 2.0 * rate / (snr_energy / cfg.eta + circuit)
        err = None if ee_sinr is None else abs(ee_snr - ee_sinr) / ee_sinr * 100.0
        out.append(SinrErrorPoint(be=be, ee_sinr=ee_sinr, ee_snr=ee_snr,
                                  error_pct=err))
    return out


@dataclass(frozen=True)
class NoiseTrace:
    k: int
    variances: tuple[float, ...]


def end_to_end_noise(k: int, n_received: int) -> NoiseTrace:
    """Noise variance per packet received at an end node under the compact
    end-to-end pattern.

    Relays re-broadcast without decoding: unit re-broadcast gain, one unit
    of fresh noise variance per reception, variances add under
    superposition.  Nodes alternate transmit/receive parity every slot.
    """
    if k < 2:
        raise DomainError("end-to-end accumulation needs k >= 2")
    if n_received < 1:
        raise DomainError("n_received must be >= 1")
    n_nodes = k + 2
    held = [0.0] * n_nodes  # accumulated variance of the packet each relay holds
    received = []
    slot = 0
    while len(received) < n_received:
        tx_parity = slot % 2
        snapshot = list(held)

        def contribution(j: int) -> float:
            # end nodes transmit fresh packets; relays forward what they hold
            return 0.0 if j in (0, n_nodes - 1) else snapshot[j]

        for i in range(n_nodes):
            if i % 2 == tx_parity:
                continue  # transmitting, not receiving
            incoming = 1.0  # fresh receiver noise
            for j in (i - 1, i + 1):
                if 0 <= j < n_nodes:
                    incoming += contribution(j)
            if i == 0:
                received.append(incoming)
            elif i < n_nodes - 1:
                held[i] = incoming
        slot += 1
    return NoiseTrace(k=k, variances=tuple(received[:n_received]))
