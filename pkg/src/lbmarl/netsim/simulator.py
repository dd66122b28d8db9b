from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .radio import rate_per_rb_bits, rsrp_matrix
from .topology import NetworkTopology

DETACHED = -1


@dataclass
class SimParams:
    tti: float = 1e-3
    step_time: float = 0.2
    hysteresis_db: float = 2.0
    time_to_trigger: float = 0.008
    cio_min: float = -9.0
    cio_max: float = 9.0
    attach_threshold_dbm: float = -110.0
    packet_bytes: int = 250
    packet_interval: float = 0.010
    traffic: str = "periodic"  # or "poisson"
    pdb: float = 0.150
    drop_factor: float = 5.0
    noise_figure_db: float = 9.0
    max_spectral_efficiency: float = 5.55
    handover_interruption_ttis: int = 1
    shadowing_std_db: float = 0.0
    initial_rbu: float = 0.0
    queue_capacity: int = 4096

    def __post_init__(self):
        if self.traffic not in ("periodic", "poisson"):
            raise ValueError(f"unknown traffic model {self.traffic!r}")
        if not self.cio_min <= 0.0 <= self.cio_max:
            raise ValueError("CIO range must contain 0")

    def ticks(self, duration: float) -> int:
        n = duration / self.tti
        if n < 0.5 or abs(n - round(n)) > 1e-6:
            raise ValueError(f"duration {duration} is not a whole number of TTIs")
        return int(round(n))

    @property
    def drop_ticks(self) -> int:
        return int(round(self.drop_factor * self.pdb / self.tti))


@dataclass
class UeState:
    serving_bs: int
    ttt_timers: np.ndarray
    tx_queue: list = field(default_factory=list)  # (enqueue_time_s, remaining_bits)
    delivered_bits: float = 0.0
    avg_delay: float = float("nan")
    dropped_packets: int = 0
    generated_packets: int = 0

    @property
    def detached(self) -> bool:
        return self.serving_bs == DETACHED


@dataclass
class BsState:
    cio: float
    attached_ues: set
    rbu_tti_samples: np.ndarray
    rbu: float


@dataclass(frozen=True)
class Observation:
    ue_ratio: float
    rbu: float
    cio: float

    def as_array(self) -> np.ndarray:
        return np.array([self.ue_ratio, self.rbu, self.cio])


@dataclass
class KpiReport:
    """Window KPIs. Per-UE delay is NaN when nothing was delivered."""

    time: float
    duration: float
    per_ue_throughput: np.ndarray
    per_ue_avg_delay: np.ndarray
    per_bs_rbu: np.ndarray
    plr: float
    serving: np.ndarray
    connected: np.ndarray
    bs_members: list
    cio: np.ndarray
    delivered_packets: np.ndarray
    dropped_packets: np.ndarray
    generated_packets: np.ndarray
    delay_sum: np.ndarray
    handovers: int
    # reward averaging set: who each BS served when the window opened
    start_members: list | None = None

    @property
    def connected_counts(self) -> np.ndarray:
        return np.array([len(m) for m in self.bs_members])


def rbu_expectation(samples) -> float:
    s = np.asarray(samples, dtype=float)
    if s.size == 0:
        raise ValueError("no RBU samples in window")
    if np.any(s < 0) or np.any(s > 1):
        raise ValueError("RBU samples must lie in [0, 1]")
    return float(s.mean())


def observation(bs: BsState, num_ue: int) -> Observation:
    return Observation(len(bs.attached_ues) / num_ue, bs.rbu, bs.cio)


class NetworkSimulator:
    """Discrete-time multi-cell downlink simulator driven by per-BS CIOs.

    UE positions are fixed for the lifetime of the instance; ``reset`` clears
    traffic, queues, timers and CIOs and redraws traffic phases from the
    simulator's own generator.
    """

    def __init__(self, topo: NetworkTopology, params: SimParams | None = None,
                 seed: int | np.random.SeedSequence = 0):
        self.topo = topo
        self.params = params or SimParams()
        root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        shadow_seq, traffic_seq = root.spawn(2)
        self.traffic_rng = np.random.default_rng(traffic_seq)
        shadow = None
        if self.params.shadowing_std_db > 0:
            shadow = np.random.default_rng(shadow_seq).normal(
                0.0, self.params.shadowing_std_db, (topo.num_ue, topo.num_bs))
        self.rsrp = rsrp_matrix(topo, shadow)
        self.rbg_sizes = topo.rbg_sizes()
        self.reset()

    @property
    def num_bs(self) -> int:
        return self.topo.num_bs

    @property
    def num_ue(self) -> int:
        return self.topo.num_ue

    def reset(self) -> np.ndarray:
        p, n, m = self.params, self.num_ue, self.num_bs
        self.tick = 0
        self.cio = np.zeros(m)
        self.loads = np.full(m, p.initial_rbu)
        self.rbu = np.zeros(m)
        self.rbu_samples = np.zeros((0, m))
        self.timers = np.zeros((n, m))
        self.block_until = np.zeros(n, dtype=np.int64)
        cap = p.queue_capacity
        self.q_enq = np.zeros((n, cap), dtype=np.int64)
        self.q_bits = np.zeros((n, cap))
        self.q_head = np.zeros(n, dtype=np.int64)
        self.q_len = np.zeros(n, dtype=np.int64)
        self.q_total = np.zeros(n)
        self.total_generated = np.zeros(n, dtype=np.int64)
        self.total_delivered = np.zeros(n, dtype=np.int64)
        self.total_dropped = np.zeros(n, dtype=np.int64)

        best = np.argmax(self.rsrp, axis=1)
        ok = self.rsrp[np.arange(n), best] >= p.attach_threshold_dbm
        self.serving = np.where(ok, best, DETACHED).astype(np.int64)

        if p.traffic == "periodic":
            self.interval_ticks = p.ticks(p.packet_interval)
            self.phase = self.traffic_rng.integers(0, self.interval_ticks, size=n)
        self._last_window = None
        return self.observations()

    def _arrivals(self, n_ticks: int) -> np.ndarray:
        p = self.params
        if p.traffic == "poisson":
            lam = p.tti / p.packet_interval
            return self.traffic_rng.poisson(lam, size=(n_ticks, self.num_ue)).astype(np.int64)
        ticks = self.tick + np.arange(n_ticks)[:, None]
        rel = ticks - self.phase[None, :]
        return ((rel >= 0) & (rel % self.interval_ticks == 0)).astype(np.int64)

    def validate_cio(self, cios) -> np.ndarray:
        c = np.asarray(cios, dtype=float).reshape(-1)
        if c.shape != (self.num_bs,):
            raise ValueError(f"expected {self.num_bs} CIO values, got {c.shape}")
        p = self.params
        if np.any(~np.isfinite(c)) or np.any(c < p.cio_min - 1e-9) or np.any(c > p.cio_max + 1e-9):
            raise ValueError(f"CIO outside [{p.cio_min}, {p.cio_max}]: {c}")
        return np.clip(c, p.cio_min, p.cio_max)

    def step(self, cios, duration: float | None = None):
        """Apply ``cios`` and advance one observation window.

        Returns (observations array of shape (num_bs, 3), KpiReport).
        """
        p = self.params
        self.cio = self.validate_cio(cios)
        duration = p.step_time if duration is None else duration
        n_ticks = p.ticks(duration)
        n, m = self.num_ue, self.num_bs

        rate = rate_per_rb_bits(self.rsrp, self.loads, self.topo.bandwidth_rb, p.tti,
                                p.noise_figure_db, p.max_spectral_efficiency)
        arrivals = self._arrivals(n_ticks)
        samples = np.zeros((n_ticks, m))
        delivered_bits = np.zeros(n)
        delay_sum = np.zeros(n)
        delivered = np.zeros(n, dtype=np.int64)
        dropped = np.zeros(n, dtype=np.int64)
        generated = np.zeros(n, dtype=np.int64)
        handovers = np.zeros(n, dtype=np.int64)
        ttt = math.ceil(p.time_to_trigger / p.tti - 1e-9) * p.tti
        start_members = [np.flatnonzero(self.serving == j) for j in range(m)]
        _kernel.run_window(
            self.tick, arrivals, p.tti, p.packet_bytes * 8.0, p.drop_ticks,
            self.rsrp, self.cio, p.hysteresis_db, ttt, p.attach_threshold_dbm,
            p.handover_interruption_ttis, np.ascontiguousarray(rate.T), self.rbg_sizes,
            self.serving, self.timers, self.block_until,
            self.q_enq, self.q_bits, self.q_head, self.q_len, self.q_total,
            samples, delivered_bits, delay_sum, delivered, dropped, generated, handovers)
        self.tick += n_ticks
        self.total_generated += generated
        self.total_delivered += delivered
        self.total_dropped += dropped

        self.rbu_samples = samples
        self.rbu = np.array([rbu_expectation(samples[:, j]) for j in range(m)])
        self.loads = self.rbu.copy()

        with np.errstate(invalid="ignore", divide="ignore"):
            avg_delay = np.where(delivered > 0, delay_sum / np.maximum(delivered, 1), np.nan)
        resolved = delivered.sum() + dropped.sum()
        connected = self.serving != DETACHED
        kpi = KpiReport(
            time=self.tick * p.tti,
            duration=duration,
            per_ue_throughput=delivered_bits / duration,
            per_ue_avg_delay=avg_delay,
            per_bs_rbu=self.rbu.copy(),
            plr=float(dropped.sum() / resolved) if resolved else 0.0,
            serving=self.serving.copy(),
            connected=connected,
            bs_members=[np.flatnonzero(self.serving == j) for j in range(m)],
            cio=self.cio.copy(),
            delivered_packets=delivered,
            dropped_packets=dropped,
            generated_packets=generated,
            delay_sum=delay_sum,
            handovers=int(handovers.sum()),
            start_members=start_members,
        )
        self._last_window = (delivered_bits, avg_delay, dropped, generated)
        return self.observations(), kpi

    def queued_packets(self) -> np.ndarray:
        return self.q_len.copy()

    def ue_state(self, u: int) -> UeState:
        cap = self.params.queue_capacity
        idx = (self.q_head[u] + np.arange(self.q_len[u])) % cap
        queue = [(self.q_enq[u, i] * self.params.tti, self.q_bits[u, i]) for i in idx]
        st = UeState(int(self.serving[u]), self.timers[u].copy(), queue,
                     generated_packets=int(self.total_generated[u]),
                     dropped_packets=int(self.total_dropped[u]))
        if self._last_window is not None:
            bits, delay, _, _ = self._last_window
            st.delivered_bits = float(bits[u])
            st.avg_delay = float(delay[u])
        return st

    def bs_state(self, j: int) -> BsState:
        return BsState(float(self.cio[j]), set(np.flatnonzero(self.serving == j).tolist()),
                       self.rbu_samples[:, j].copy(), float(self.rbu[j]))

    def observations(self) -> np.ndarray:
        return np.stack([observation(self.bs_state(j), self.num_ue).as_array()
                         for j in range(self.num_bs)])
