"""Water-filling power allocation and threshold scheduling.

A secondary user with power gain ``h`` to its own base station and ``g`` to
the primary base station looks only at the ratio ``X = h / (lam + mu*g)``.
It is scheduled when ``X`` exceeds a threshold chosen so that the
scheduling probability is ``p``, and it then transmits with water-filling
power ``(1/(lam + mu*g) - 1/h)^+``.

The threshold is the ``(1 - p)``-quantile of ``X``, whose distribution is
obtained by integrating the conditional CDF of ``h`` against the law of
``g``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .fading import FadingModel
from .quadrature import integrate

QUAD_RTOL = 1e-9
# Probability mass of g beyond the integration cutoff.
G_TAIL_MASS = 1e-10


@dataclass(frozen=True)
class DualSolution:
    """Multipliers of the power and interference budgets plus the threshold."""

    lam: float
    mu: float
    threshold: float
    p: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.lam < 0 or self.mu < 0:
            raise ValueError("multipliers must be non-negative")
        if not self.lam + self.mu > 0:
            raise ValueError("lam + mu must be positive")
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")

    @property
    def level(self) -> float:
        """Smallest ratio at which a user actually radiates power."""
        return max(self.threshold, 1.0)


def waterfill(h, g, lam, mu):
    """Water-filling power ``(1/(lam + mu g) - 1/h)^+``; zero for ``h == 0``."""
    h = np.asarray(h, dtype=float)
    c = lam + mu * np.asarray(g, dtype=float)
    with np.errstate(divide="ignore"):
        power = 1.0 / c - np.where(h > 0, 1.0 / np.where(h > 0, h, 1.0), np.inf)
    out = np.maximum(power, 0.0)
    return out if out.ndim else float(out)


def ratio_value(h, g, lam, mu):
    out = np.asarray(h, dtype=float) / (lam + mu * np.asarray(g, dtype=float))
    return out if out.ndim else float(out)


def schedule(h, g, dual: DualSolution):
    out = np.asarray(ratio_value(h, g, dual.lam, dual.mu)) > dual.threshold
    return out if out.ndim else bool(out)


def instantaneous_rate(h, g, dual: DualSolution):
    """``log(1 + h P) * 1{X > threshold}`` in nats."""
    power = waterfill(h, g, dual.lam, dual.mu)
    rate = np.log1p(np.asarray(h, dtype=float) * power)
    out = np.where(schedule(h, g, dual), rate, 0.0)
    return out if out.ndim else float(out)


def eta_from_threshold(t):
    """Scheduling multiplier ``G(max(t, 1))`` with ``G(x) = log x + 1/x - 1``."""
    x = np.maximum(np.asarray(t, dtype=float), 1.0)
    out = np.log(x) + 1.0 / x - 1.0
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Expectations over g
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def _g_cutoff(model_g: FadingModel) -> float:
    return model_g.quantile(1.0 - G_TAIL_MASS)


def expect_over_g(model_g: FadingModel, phi, weight_g=False, tail_cap=None,
                  rtol=QUAD_RTOL):
    """``E[phi(g)]`` (or ``E[g phi(g)]``) for a monotone ``phi``.

    The variable change ``g = u**k`` with ``k = 1/gamma`` (the origin exponent
    of the law of ``g``) flattens the density near zero, e.g. the
    ``g**-1/2`` spike of Nakagami m=0.5.

    Mass beyond the cutoff quantile is bracketed and the bracket midpoint is
    added. For non-increasing ``phi`` the bracket is
    ``[0, G_TAIL_MASS * phi(cutoff)]``; a non-decreasing ``phi`` must pass
    its supremum as ``tail_cap``, giving ``[G_TAIL_MASS * phi(cutoff),
    G_TAIL_MASS * tail_cap]``. The ``g``-weighted case scales both ends by
    the cutoff.
    """
    k = 1.0 / model_g.tail().gamma
    g_max = _g_cutoff(model_g)

    def integrand(u):
        g = u ** k
        val = phi(g) * model_g.pdf(g) * k * u ** (k - 1.0)
        return val * g if weight_g else val

    res = integrate(integrand, 0.0, g_max ** (1.0 / k), rtol=rtol)
    edge = float(phi(np.array([g_max]))[0])
    lo, hi = (0.0, edge) if tail_cap is None else (edge, tail_cap)
    scale = g_max if weight_g else 1.0
    return res.value + 0.5 * G_TAIL_MASS * scale * (lo + hi)


# ---------------------------------------------------------------------------
# Distribution of X = h / (lam + mu g)
# ---------------------------------------------------------------------------

def ratio_cdf(x, lam, mu, model_h: FadingModel, model_g: FadingModel) -> float:
    """``P{h/(lam + mu g) <= x} = E_g[F_h(x (lam + mu g))]``."""
    if x <= 0:
        return 0.0
    if mu == 0:
        return float(model_h.cdf(x * lam))
    return expect_over_g(model_g, lambda g: model_h.cdf(x * (lam + mu * g)), tail_cap=1.0)


def ratio_sf(x, lam, mu, model_h: FadingModel, model_g: FadingModel) -> float:
    """``P{h/(lam + mu g) > x}``, integrated directly for upper-tail accuracy."""
    if x <= 0:
        return 1.0
    if mu == 0:
        return float(model_h.sf(x * lam))
    return expect_over_g(model_g, lambda g: model_h.sf(x * (lam + mu * g)))


def ratio_quantile(q, lam, mu, model_h: FadingModel, model_g: FadingModel) -> float:
    """Level ``x`` with ``P{X <= x} = q``.

    Upper quantiles are solved on the survival function so that
    ``q = 1 - 1/N`` for large ``N`` keeps its precision.
    """
    q = float(q)
    if not 0.0 <= q < 1.0:
        raise ValueError(f"quantile level must lie in [0, 1), got {q}")
    if q == 0.0:
        return 0.0
    if mu == 0:
        return model_h.quantile(q) / lam
    if q > 0.5:
        target = 1.0 - q

        def resid(x):
            return ratio_sf(x, lam, mu, model_h, model_g) - target
    else:
        def resid(x):
            return q - ratio_cdf(x, lam, mu, model_h, model_g)

    # resid > 0 to the left of the root
    lo, hi = 0.0, 1.0 / (lam + mu)
    while resid(hi) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise ArithmeticError("ratio quantile bracket expansion overflowed")
    if lo == 0.0:
        lo = hi / 2.0
        while resid(lo) <= 0:
            hi, lo = lo, lo / 2.0
            if lo < 1e-300:
                return 0.0
    return optimize.brentq(resid, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                           maxiter=200)
