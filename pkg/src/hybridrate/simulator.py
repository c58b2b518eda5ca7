"""Cycle-by-cycle Monte Carlo of the two-node network.

Each protocol runs as a compiled loop over clock cycles. Every stochastic
event (photon flagged, photon reaching the analyzer, the 1/2 analyzer
success, storage decay) is a comparison of one uniform draw against its
probability, and all delays are whole cycles rounded up.

Cycle conventions, with ``c`` the cycle index:

* baseline: both nodes request together every
  ``max(ceil(2 t_n / T_base), 1)`` cycles, ``T_base = 1 / r_max``.
* ndspm: a channel flagged in cycle ``c`` next attempts in cycle
  ``c + max(ceil(2 t_n / T), 1)``. The analyzer photon exists only during
  the flagging cycle.
* ndspm_storage: a channel flagged in cycle ``c`` has its photon stored at
  ``c + ceil(t_n / T)``. Once both are stored they are released together;
  ``ceil(t_n / T)`` cycles later both nodes resume, starting the cycle
  after that.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numba
import numpy as np

from . import model
from .params import NetworkParams, Protocol

# tolerance when rounding a delay up to whole cycles, so 6.000000000001 -> 6
_CEIL_SLACK = 1e-9

_NONE = -1


def _ceil_cycles(x: float) -> int:
    return max(int(math.ceil(x - _CEIL_SLACK)), 0)


@dataclass(frozen=True)
class SimConfig:
    params: NetworkParams
    length_km: float
    protocol: Protocol
    cycles: int
    seed: int
    rng_resolution: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol.parse(self.protocol))
        if isinstance(self.cycles, bool) or int(self.cycles) != self.cycles or self.cycles < 1:
            raise ValueError(f"cycles must be a positive integer, got {self.cycles!r}")
        object.__setattr__(self, "cycles", int(self.cycles))
        if not self.length_km >= 0:
            raise ValueError(f"length_km must be non-negative, got {self.length_km!r}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))
        if self.rng_resolution is not None and not 0 < self.rng_resolution < 1:
            raise ValueError(f"rng_resolution must lie in (0, 1), got {self.rng_resolution!r}")


@dataclass(frozen=True)
class ChannelState:
    """Per-channel bookkeeping at the end of a run. Cycle indices are None when unset."""

    flag: bool
    flag_reset_cycle: Optional[int]
    storage_ready_cycle: Optional[int]
    bsa_photon: bool
    stored_since_cycle: Optional[int]


@dataclass(frozen=True)
class SimResult:
    entanglement_events: int
    simulated_time: float
    rate_estimate: float
    rate_std_error: float
    attempts_node1: int
    attempts_node2: int
    seed: int
    protocol: Protocol
    length_km: float
    cycles: int
    channels: tuple[ChannelState, ChannelState]

    def as_record(self) -> dict:
        return {
            "protocol": self.protocol.value,
            "length_km": self.length_km,
            "cycles": self.cycles,
            "seed": self.seed,
            "entanglement_events": self.entanglement_events,
            "simulated_time_s": self.simulated_time,
            "rate_hz": self.rate_estimate,
            "rate_std_error_hz": self.rate_std_error,
            "attempts_node1": self.attempts_node1,
            "attempts_node2": self.attempts_node2,
        }


@dataclass(frozen=True)
class CycleTiming:
    """Whole-cycle delays and per-draw probabilities used by one run."""

    period: float  # seconds per cycle
    delay: int  # protocol-specific delay in cycles, see module docstring
    p_attempt: float  # success probability of one request
    p_transmit: float  # probability a flagged photon reaches/enters the analyzer
    decay_per_cycle: float  # T / tau, 0 when storage does not decay


def cycle_timing(config: SimConfig) -> CycleTiming:
    params, L = config.params, config.length_km
    tn = model.travel_time(L, params)
    p_f = model.fiber_transmission(L, params.attenuation)
    if config.protocol is Protocol.BASELINE:
        t_base = 1.0 / params.r_max
        return CycleTiming(
            period=t_base,
            delay=max(_ceil_cycles(2 * tn / t_base), 1),
            p_attempt=model.p_bsa(L, params),
            p_transmit=1.0,
            decay_per_cycle=0.0,
        )
    T = model.cycle_period(params)
    if config.protocol is Protocol.NDSPM:
        return CycleTiming(
            period=T,
            delay=max(_ceil_cycles(2 * tn / T), 1),
            p_attempt=model.p_flag(params),
            p_transmit=params.gamma_nd * params.p_q ** (params.y - params.n) * p_f * params.p_d,
            decay_per_cycle=0.0,
        )
    return CycleTiming(
        period=T,
        delay=_ceil_cycles(tn / T),
        p_attempt=model.p_flag(params),
        p_transmit=params.gamma_nd * params.p_q**params.z * p_f * params.p_d * params.e_s,
        decay_per_cycle=0.0 if params.tau is None else T / params.tau,
    )


def analytic_rate(config: SimConfig) -> float:
    """Closed-form rate evaluated with the run's cycle-rounded delays.

    This is the oracle a simulation should agree with; at long lengths it
    converges to ``model.rate`` as the rounding becomes negligible.
    """
    timing = cycle_timing(config)
    if config.protocol is Protocol.NDSPM_STORAGE:
        tn = timing.delay * timing.period
    else:
        tn = timing.delay * timing.period / 2.0
    return model.rate(config.length_km, config.params, config.protocol, t_n=tn)


@numba.njit(cache=True)
def _draw(rng, resolution):
    u = rng.random()
    if resolution > 0.0:
        u = math.floor(u / resolution) * resolution
    return u


@numba.njit(cache=True, nogil=True)
def _run_baseline(rng, cycles, interval, p_bsa, resolution):
    state = np.full((2, 5), -1, dtype=np.int64)
    state[:, 0] = 0
    state[:, 3] = 0
    events = 0
    attempts = 0
    for c in range(0, cycles, interval):
        attempts += 1
        got1 = _draw(rng, resolution) < p_bsa
        got2 = _draw(rng, resolution) < p_bsa
        if got1 and got2 and _draw(rng, resolution) < 0.5:
            events += 1
        state[0, 3] = 1 if got1 else 0
        state[1, 3] = 1 if got2 else 0
    return events, attempts, attempts, state


@numba.njit(cache=True, nogil=True)
def _run_ndspm(rng, cycles, hold, p_flag, p_transmit, resolution):
    flag = np.zeros(2, dtype=np.bool_)
    reset = np.full(2, -1, dtype=np.int64)
    bsa = np.zeros(2, dtype=np.bool_)
    attempts = np.zeros(2, dtype=np.int64)
    events = 0
    for c in range(cycles):
        bsa[0] = False
        bsa[1] = False
        for ch in range(2):
            if not flag[ch]:
                attempts[ch] += 1
                if _draw(rng, resolution) < p_flag:
                    flag[ch] = True
                    reset[ch] = c + hold - 1
                    bsa[ch] = _draw(rng, resolution) < p_transmit
        if bsa[0] and bsa[1] and _draw(rng, resolution) < 0.5:
            events += 1
        for ch in range(2):
            if flag[ch] and reset[ch] == c:
                flag[ch] = False
    state = np.full((2, 5), -1, dtype=np.int64)
    for ch in range(2):
        state[ch, 0] = 1 if flag[ch] else 0
        state[ch, 1] = reset[ch] if flag[ch] else -1
        state[ch, 3] = 1 if bsa[ch] else 0
    return events, attempts[0], attempts[1], state


@numba.njit(cache=True, nogil=True)
def _run_storage(rng, cycles, transit, p_flag, p_transmit, decay_per_cycle, resolution):
    flag = np.zeros(2, dtype=np.bool_)
    ready = np.full(2, -1, dtype=np.int64)
    photon = np.zeros(2, dtype=np.bool_)
    attempts = np.zeros(2, dtype=np.int64)
    events = 0
    released = False
    reset_cycle = -1
    for c in range(cycles):
        for ch in range(2):
            if not flag[ch]:
                attempts[ch] += 1
                if _draw(rng, resolution) < p_flag:
                    flag[ch] = True
                    ready[ch] = c + transit
                    photon[ch] = _draw(rng, resolution) < p_transmit
        if (not released and flag[0] and flag[1]
                and ready[0] <= c and ready[1] <= c):
            ok = photon[0] and photon[1]
            if ok and decay_per_cycle > 0.0:
                waited = abs(ready[0] - ready[1])
                ok = _draw(rng, resolution) < math.exp(-waited * decay_per_cycle)
            if ok and _draw(rng, resolution) < 0.5:
                events += 1
            photon[0] = False
            photon[1] = False
            released = True
            reset_cycle = c + transit
        if released and c == reset_cycle:
            flag[0] = False
            flag[1] = False
            ready[0] = -1
            ready[1] = -1
            released = False
    state = np.full((2, 5), -1, dtype=np.int64)
    for ch in range(2):
        state[ch, 0] = 1 if flag[ch] else 0
        state[ch, 1] = reset_cycle if released else -1
        state[ch, 2] = ready[ch]
        state[ch, 3] = 1 if photon[ch] else 0
        if flag[ch] and photon[ch] and ready[ch] < cycles:
            state[ch, 4] = ready[ch]
    return events, attempts[0], attempts[1], state


def _channel(row) -> ChannelState:
    opt = lambda v: None if v == _NONE else int(v)  # noqa: E731
    return ChannelState(
        flag=bool(row[0]),
        flag_reset_cycle=opt(row[1]),
        storage_ready_cycle=opt(row[2]),
        bsa_photon=bool(row[3]),
        stored_since_cycle=opt(row[4]),
    )


def run_simulation(config: SimConfig, *, compiled: bool = True) -> SimResult:
    """Simulate ``config.cycles`` clock cycles and estimate the entanglement rate.

    ``compiled=False`` runs the same loop as plain Python (slow; the result
    is identical for the same seed).
    """
    timing = cycle_timing(config)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    res = 0.0 if config.rng_resolution is None else float(config.rng_resolution)

    def pick(fn):
        return fn if compiled else fn.py_func

    if config.protocol is Protocol.BASELINE:
        out = pick(_run_baseline)(rng, config.cycles, timing.delay, timing.p_attempt, res)
    elif config.protocol is Protocol.NDSPM:
        out = pick(_run_ndspm)(rng, config.cycles, timing.delay, timing.p_attempt,
                               timing.p_transmit, res)
    else:
        out = pick(_run_storage)(rng, config.cycles, timing.delay, timing.p_attempt,
                                 timing.p_transmit, timing.decay_per_cycle, res)
    events, att1, att2, state = out
    events = int(events)
    sim_time = config.cycles * timing.period
    return SimResult(
        entanglement_events=events,
        simulated_time=sim_time,
        rate_estimate=events / sim_time,
        rate_std_error=math.sqrt(events) / sim_time,
        attempts_node1=int(att1),
        attempts_node2=int(att2),
        seed=config.seed,
        protocol=config.protocol,
        length_km=config.length_km,
        cycles=config.cycles,
        channels=(_channel(state[0]), _channel(state[1])),
    )


class BatchError(RuntimeError):
    """Some runs of a batch failed. ``results`` holds None at the failed positions."""

    def __init__(self, results: list, errors: dict):
        self.results = results
        self.errors = errors
        detail = "; ".join(f"[{i}] {e}" for i, e in sorted(errors.items()))
        super().__init__(f"{len(errors)} of {len(results)} simulations failed: {detail}")


def run_batch(configs: Sequence[SimConfig], workers: int = 1) -> list[SimResult]:
    """Run independent simulations, returning results in input order.

    With ``workers > 1`` runs execute on a thread pool (the compiled loops
    release the GIL). Failing runs do not stop the others; a BatchError is
    raised once all have finished.
    """
    configs = list(configs)
    if not configs:
        raise ValueError("run_batch needs at least one configuration")
    results: list = [None] * len(configs)
    errors: dict[int, Exception] = {}

    def one(i):
        try:
            results[i] = run_simulation(configs[i])
        except Exception as exc:  # collected and re-raised below
            errors[i] = exc

    if workers <= 1:
        for i in range(len(configs)):
            one(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(len(configs))))
    if errors:
        raise BatchError(results, errors)
    return results


def agrees_with_analytic(result: SimResult, analytic_hz: float, n_sigma: float = 3.0) -> bool:
    """Poisson consistency check of a rate estimate against an expected rate.

    The count error is sqrt(max(observed, expected)), so a run with zero
    events is not judged with a zero-width interval.
    """
    expected = analytic_hz * result.simulated_time
    sigma = math.sqrt(max(result.entanglement_events, expected))
    return abs(result.entanglement_events - expected) <= n_sigma * sigma
