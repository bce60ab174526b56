"""Throughput against the number of users, next to the double-log asymptote.

Every row solves the multipliers at ``p = 1/N``, simulates the collision
channel and records the asymptotic curve
``(1/(e n_h)) log log N + (1/e) log P_ave`` for comparison. Row ``N`` draws
from its own sub-stream of the seed, so adding or removing rows does not
change the others.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .config import NetworkConfig
from .dual import solve_duals
from .errors import NumericalError
from .fading import Family, FadingModel
from .sim import estimate

log = logging.getLogger(__name__)

CSV_COLUMNS = ("n", "throughput", "stderr", "asymptote", "lambda", "mu", "threshold", "p_an")
DEFAULT_SLOTS = 100_000
SMALL_N_SLOTS = 1_000_000
SMALL_N = 200

_NAN = math.nan


@dataclass(frozen=True)
class SweepRow:
    """One value of ``N``. Failed rows carry NaN and the error message."""

    n_users: int
    throughput: float
    stderr: float
    asymptote: float
    lam: float
    mu: float
    threshold: float
    p_an: float
    p_an_stderr: float = _NAN
    avg_power: float = _NAN
    power_stderr: float = _NAN
    avg_interference: float = _NAN
    interference_stderr: float = _NAN
    slots: int = 0
    error: str = ""

    @property
    def failed(self) -> bool:
        return bool(self.error)


class RateSplit(NamedTuple):
    const_part: float
    growth_part: float
    const_limit: float


def tail_exponent(model_h: FadingModel) -> float:
    """``n_h``: ``c/2`` for Weibull, 1 for the other families."""
    if model_h.family is Family.WEIBULL:
        return model_h.shape / 2.0
    return 1.0


def asymptote(n_users, model_h: FadingModel, p_ave: float) -> float:
    """``(1/(e n_h)) log log N + (1/e) log P_ave`` in nats."""
    if not n_users > math.e:
        raise ValueError(f"log log N needs N > e, got N = {n_users}")
    if not p_ave > 0:
        raise ValueError("p_ave must be positive")
    return (math.log(math.log(n_users)) / (math.e * tail_exponent(model_h))
            + math.log(p_ave) / math.e)


def default_slots(n_users: int) -> int:
    return SMALL_N_SLOTS if n_users <= SMALL_N else DEFAULT_SLOTS


def run_row(n_users: int, model_h: FadingModel, model_g: FadingModel, p_ave: float,
            q_ave: float, slots: int | None = None, seed: int = 0,
            workers: int = 1) -> SweepRow:
    """Solve, simulate and compare one ``N``; errors become a failed row."""
    slots = default_slots(n_users) if slots is None else int(slots)
    asym = asymptote(n_users, model_h, p_ave) if n_users > math.e else _NAN
    try:
        config = NetworkConfig(n_users, p_ave, q_ave)
        dual = solve_duals(config, model_h, model_g)
        stats = estimate(config, dual, model_h, model_g, slots, seed, workers,
                         path=(n_users,))
    except (NumericalError, ArithmeticError) as exc:
        log.warning("row N=%d failed: %s", n_users, exc)
        return SweepRow(n_users, _NAN, _NAN, asym, _NAN, _NAN, _NAN, _NAN,
                        slots=slots, error=str(exc) or type(exc).__name__)
    return SweepRow(
        n_users=n_users, throughput=stats.throughput, stderr=stats.throughput_stderr,
        asymptote=asym, lam=dual.lam, mu=dual.mu, threshold=dual.threshold,
        p_an=stats.p_an, p_an_stderr=stats.p_an_stderr,
        avg_power=stats.avg_power, power_stderr=stats.power_stderr,
        avg_interference=stats.avg_interference,
        interference_stderr=stats.interference_stderr,
        slots=stats.slots)


def sweep(model_h: FadingModel, model_g: FadingModel, p_ave: float, q_ave: float,
          n_list: Iterable[int], slots: int | None = None, seed: int = 0,
          workers: int = 1) -> list[SweepRow]:
    """One row per ``N`` in increasing order.

    ``slots=None`` uses 10^5 slots per row and 10^6 for ``N <= 200``.
    ``avg_power`` and ``avg_interference`` are network totals per slot, in
    the units of ``p_ave`` and ``q_ave``.
    """
    ns = sorted({int(n) for n in n_list})
    if not ns:
        raise ValueError("n_list is empty")
    if ns[0] < 2:
        raise ValueError(f"every N must be at least 2, got {ns[0]}")
    return [run_row(n, model_h, model_g, p_ave, q_ave, slots, seed, workers) for n in ns]


def rate_decomposition(row: SweepRow, p_ave: float) -> RateSplit:
    """Split throughput into ``log(1/lam) p_an`` and the remainder.

    ``const_limit = (1/e) log p_ave`` is the value the first part tends to as
    ``lam -> 1/p_ave`` and ``p_an -> 1/e``.
    """
    if not p_ave > 0:
        raise ValueError("p_ave must be positive")
    const = math.log(1.0 / row.lam) * row.p_an
    return RateSplit(const, row.throughput - const, math.log(p_ave) / math.e)


def slope_fit(rows: Iterable[SweepRow]) -> float:
    """Least-squares slope of throughput against ``log log N`` (successful rows)."""
    pts = [(math.log(math.log(r.n_users)), r.throughput) for r in rows
           if not r.failed and r.n_users > math.e]
    if len(pts) < 2:
        raise ValueError("need at least two rows with N > e")
    mx = sum(x for x, _ in pts) / len(pts)
    my = sum(y for _, y in pts) / len(pts)
    sxy = sum((x - mx) * (y - my) for x, y in pts)
    sxx = sum((x - mx) ** 2 for x, _ in pts)
    return sxy / sxx


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

_FIELD_OF = dict(zip(CSV_COLUMNS, ("n_users", "throughput", "stderr", "asymptote",
                                   "lam", "mu", "threshold", "p_an")))


def write_csv(rows: Iterable[SweepRow], stream) -> None:
    """Write the fixed columns; floats use ``repr`` so they read back exactly."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([row.n_users] + [repr(float(getattr(row, _FIELD_OF[c])))
                                         for c in CSV_COLUMNS[1:]])


def read_csv(stream) -> list[SweepRow]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CSV_COLUMNS:
        raise ValueError(f"expected header {','.join(CSV_COLUMNS)}, got {header}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        vals = dict(zip(CSV_COLUMNS, rec))
        kwargs = {_FIELD_OF[c]: float(vals[c]) for c in CSV_COLUMNS[1:]}
        rows.append(SweepRow(n_users=int(vals["n"]), **kwargs))
    return rows

