"""Monte Carlo simulation of the collision-channel secondary network.

Each slot draws fresh ``(h_i, g_i)`` for all ``N`` users. A user radiates
when its ratio ``X_i`` exceeds ``max(threshold, 1)``: scheduled users whose
water-filling power is zero stay silent and cannot collide. The slot
delivers ``log X`` nats if exactly one user radiates and nothing otherwise.
Power and interference of collided transmissions still count against the
budgets.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig
from .fading import FadingModel
from .policy import DualSolution, waterfill
from .rng import SlotStreams, stream_key

# Upper bound on h/g array elements held per chunk.
CHUNK_ELEMENTS = 1 << 21


@dataclass(frozen=True)
class SlotOutcome:
    rate: float
    num_transmitters: int
    total_power: float
    interference: float
    top_ratio: float
    second_ratio: float


@dataclass(frozen=True)
class SimStats:
    """Slot averages; power and interference are summed over all users."""

    throughput: float
    throughput_stderr: float
    p_an: float
    p_an_stderr: float
    avg_power: float
    power_stderr: float
    avg_interference: float
    interference_stderr: float
    slots: int


@dataclass(frozen=True)
class SlotRecord:
    """Per-slot arrays from one simulation run, in slot order."""

    rate: np.ndarray            # collision-channel rate
    rate_orderstat: np.ndarray  # log X_(1) on the event A_N
    transmitters: np.ndarray
    in_an: np.ndarray
    power: np.ndarray
    interference: np.ndarray


def slot_outcome(h, g, dual: DualSolution) -> SlotOutcome:
    """Evaluate one slot from given channel draws."""
    h = np.asarray(h, dtype=float)
    g = np.asarray(g, dtype=float)
    x = h / (dual.lam + dual.mu * g)
    on = x > dual.level
    count = int(on.sum())
    power = np.where(on, waterfill(h, g, dual.lam, dual.mu), 0.0)
    rate = float(np.log(x[on][0])) if count == 1 else 0.0
    top = np.sort(x)[::-1]
    return SlotOutcome(
        rate=rate,
        num_transmitters=count,
        total_power=float(power.sum()),
        interference=float((g * power).sum()),
        top_ratio=float(top[0]),
        second_ratio=float(top[1]) if top.size > 1 else 0.0,
    )


def draw_slot(n_users, model_h: FadingModel, model_g: FadingModel, stream):
    """``h`` then ``g`` for users ``0..n_users-1`` from one slot's stream."""
    return model_h.sample(stream, n_users), model_g.sample(stream, n_users)


def run_slot(config: NetworkConfig, dual: DualSolution, model_h: FadingModel,
             model_g: FadingModel, stream: np.random.Generator) -> SlotOutcome:
    h, g = draw_slot(config.n_users, model_h, model_g, stream)
    return slot_outcome(h, g, dual)


def _simulate_chunk(args):
    n, dual, model_h, model_g, key, start, stop = args
    streams = SlotStreams(key)
    b = stop - start
    h = np.empty((b, n))
    g = np.empty((b, n))
    for i in range(b):
        h[i], g[i] = draw_slot(n, model_h, model_g, streams(start + i))
    x = h / (dual.lam + dual.mu * g)
    level = dual.level
    on = x > level
    count = on.sum(axis=1)
    power = np.where(on, waterfill(h, g, dual.lam, dual.mu), 0.0)

    # Collision channel: the lone radiating user's log-ratio.
    lone = count == 1
    radiating_max = np.where(on, x, 0.0).max(axis=1)
    rate = np.zeros(b)
    rate[lone] = np.log(radiating_max[lone])

    # Order statistics: log X_(1) on {X_(1) > level >= X_(2)}.
    if n >= 2:
        top2 = np.partition(x, n - 2, axis=1)[:, -2:]
        x2, x1 = top2[:, 0], top2[:, 1]
    else:
        x1, x2 = x[:, 0], np.zeros(b)
    an = (x1 > level) & (x2 <= level)
    rate_os = np.zeros(b)
    rate_os[an] = np.log(x1[an])
    return (rate, rate_os, count, an, power.sum(axis=1), (g * power).sum(axis=1))


def simulate_slots(config: NetworkConfig, dual: DualSolution, model_h: FadingModel,
                   model_g: FadingModel, slots: int, seed: int = 0,
                   workers: int = 1, path: tuple = ()) -> SlotRecord:
    """Simulate ``slots`` slots; identical output for any ``workers``.

    ``path`` names an independent sub-stream of ``seed``, e.g. one per
    sweep row.
    """
    if slots < 1:
        raise ValueError("slots must be >= 1")
    n = config.n_users
    key = stream_key(seed, *path)
    step = max(1, CHUNK_ELEMENTS // n)
    jobs = [(n, dual, model_h, model_g, key, s, min(s + step, slots))
            for s in range(0, slots, step)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_chunk, jobs))
    else:
        parts = [_simulate_chunk(j) for j in jobs]
    cols = [np.concatenate(c) for c in zip(*parts)]
    return SlotRecord(*cols)


def _mean_err(values):
    values = np.asarray(values, dtype=float)
    # numpy reductions use pairwise summation
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / math.sqrt(values.size))


def summarize(record: SlotRecord, orderstat: bool = False) -> SimStats:
    rate = record.rate_orderstat if orderstat else record.rate
    success = record.in_an if orderstat else record.transmitters == 1
    thr, thr_err = _mean_err(rate)
    pan, pan_err = _mean_err(success)
    pw, pw_err = _mean_err(record.power)
    it, it_err = _mean_err(record.interference)
    return SimStats(thr, thr_err, pan, pan_err, pw, pw_err, it, it_err, rate.size)


def estimate(config: NetworkConfig, dual: DualSolution, model_h: FadingModel,
             model_g: FadingModel, slots: int, seed: int = 0, workers: int = 1,
             path: tuple = ()) -> SimStats:
    """Throughput, P(A_N) and realized budgets from the collision simulation."""
    return summarize(simulate_slots(config, dual, model_h, model_g, slots, seed, workers, path))


def estimate_orderstat(config: NetworkConfig, dual: DualSolution, model_h: FadingModel,
                       model_g: FadingModel, slots: int, seed: int = 0,
                       workers: int = 1, path: tuple = ()) -> SimStats:
    """Same draws as :func:`estimate`, rate taken from ``log X_(1) 1{A_N}``."""
    if config.n_users < 2:
        raise ValueError("the order-statistic estimator needs at least two users")
    record = simulate_slots(config, dual, model_h, model_g, slots, seed, workers, path)
    return summarize(record, orderstat=True)
