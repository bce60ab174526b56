"""Lagrange multipliers that make the budgets hold.

For a candidate pair of multipliers the per-user average power and average
interference of the water-filling/threshold policy are computed by
quadrature: the inner integral over ``h`` has a closed form per family
(``P{h > a}/c - E[1/h; h > a]``) and the outer one over ``g`` is adaptive.

``solve_duals`` first tries ``mu = 0``. If that policy overshoots the
interference budget it searches the ratio ``rho = mu/lam``: since
``X = h/(lam (1 + rho g))`` the threshold only needs one quantile solve per
``rho``, and the inner search on ``lam`` reuses it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .config import NetworkConfig
from .errors import SolverError
from .fading import FadingModel
from .policy import DualSolution, expect_over_g, ratio_cdf, ratio_quantile

log = logging.getLogger(__name__)

LAM_BRACKET = (1e-6, 10.0)
LAM_FLOOR = 1e-12
RHO_START = 1.0
RHO_CEIL = 1e12
MAX_ITER = 500
RTOL = 1e-13


@dataclass(frozen=True)
class ConstraintBudget:
    per_user_power: float
    per_user_interference: float

    def __post_init__(self):
        for name in ("per_user_power", "per_user_interference"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v}")

    @classmethod
    def from_config(cls, config: NetworkConfig) -> "ConstraintBudget":
        return cls(config.per_user_power, config.per_user_interference)


def _power_given_g(model_h: FadingModel, lam, mu, level):
    """``E[(1/c - 1/h) 1{h > level*c} | g]`` with ``c = lam + mu g``."""
    def phi(g):
        c = lam + mu * np.asarray(g, dtype=float)
        a = level * c
        return np.maximum(model_h.sf(a) / c - model_h.inv_moment_above(a), 0.0)
    return phi


def expected_power(lam, mu, threshold, model_h: FadingModel, model_g: FadingModel) -> float:
    """Average transmit power per user, ``E[P(h, g) 1{X > threshold}]``."""
    if not lam + mu > 0:
        raise ValueError("lam + mu must be positive")
    phi = _power_given_g(model_h, lam, mu, max(threshold, 1.0))
    if mu == 0:
        return float(phi(np.array([0.0]))[0])
    return expect_over_g(model_g, phi)


def expected_interference(lam, mu, threshold, model_h: FadingModel,
                          model_g: FadingModel) -> float:
    """Average interference per user at the primary base station."""
    if not lam + mu > 0:
        raise ValueError("lam + mu must be positive")
    phi = _power_given_g(model_h, lam, mu, max(threshold, 1.0))
    if mu == 0:
        # g is independent of the policy and has unit mean
        return float(phi(np.array([0.0]))[0])
    return expect_over_g(model_g, phi, weight_g=True)


def _brentq(f, lo, hi, what):
    try:
        root, info = optimize.brentq(f, lo, hi, xtol=1e-300, rtol=RTOL,
                                     maxiter=MAX_ITER, full_output=True, disp=False)
    except ValueError as exc:
        raise SolverError(f"{what}: bracket lost ({exc})") from None
    if not info.converged:
        raise SolverError(f"{what}: no convergence after {info.iterations} iterations",
                          residual=f(root))
    return root, info.function_calls


class _Search:
    """Book-keeping for one ``solve_duals`` call."""

    def __init__(self, config, model_h, model_g):
        self.p = config.sched_prob
        self.power_budget = config.per_user_power
        self.interference_budget = config.per_user_interference
        self.model_h = model_h
        self.model_g = model_g
        self.quantile_solves = 0
        self.lam_evals = 0
        self.rho_trace = []

    def unit_threshold(self, rho):
        """(1-p)-quantile of ``h/(1 + rho g)``."""
        self.quantile_solves += 1
        return ratio_quantile(1.0 - self.p, 1.0, rho, self.model_h, self.model_g)

    def power(self, lam, rho, tau):
        self.lam_evals += 1
        return expected_power(lam, rho * lam, tau / lam, self.model_h, self.model_g)

    def solve_lam(self, rho, tau):
        target = self.power_budget

        def resid(log_lam):
            return self.power(math.exp(log_lam), rho, tau) - target

        lo, hi = LAM_BRACKET
        while resid(math.log(lo)) < 0:
            hi, lo = lo, lo / 10.0
            if lo < LAM_FLOOR:
                raise SolverError(
                    f"power budget {target:g} unreachable: lam fell below {LAM_FLOOR:g}")
        for _ in range(MAX_ITER):
            if resid(math.log(hi)) <= 0:
                break
            lo, hi = hi, hi * 10.0
        else:
            raise SolverError("could not bracket lam from above")
        log_lam, _ = _brentq(resid, math.log(lo), math.log(hi), "lam search")
        return math.exp(log_lam)

    def at(self, rho):
        tau = self.unit_threshold(rho)
        lam = self.solve_lam(rho, tau)
        interference = expected_interference(lam, rho * lam, tau / lam,
                                             self.model_h, self.model_g)
        self.rho_trace.append((rho, interference))
        return lam, tau, interference

    def check_monotone(self):
        trace = sorted(self.rho_trace)
        for (r0, i0), (r1, i1) in zip(trace, trace[1:]):
            if i1 > i0 * (1 + 1e-9):
                log.warning("interference not decreasing in mu/lam: I(%g)=%g < I(%g)=%g",
                            r0, i0, r1, i1)


def solve_duals(config: NetworkConfig, model_h: FadingModel,
                model_g: FadingModel) -> DualSolution:
    """Multipliers meeting both budgets with complementary slackness.

    The power budget is always active. ``mu`` is zero when the interference
    budget is slack under the power-only policy; otherwise the interference
    budget holds with equality.
    """
    s = _Search(config, model_h, model_g)
    target = s.interference_budget
    lam, tau, interference = s.at(0.0)
    rho = 0.0

    if interference > target:
        lo, hi = 0.0, RHO_START
        _, _, i_hi = s.at(hi)
        while i_hi > target:
            lo, hi = hi, hi * 10.0
            if hi > RHO_CEIL:
                raise SolverError("interference budget unreachable", residual=i_hi - target)
            _, _, i_hi = s.at(hi)
        rho, _ = _brentq(lambda r: s.at(r)[2] - target, lo, hi, "mu search")
        lam, tau, interference = s.at(rho)
        s.check_monotone()

    mu = rho * lam
    threshold = tau / lam
    power = expected_power(lam, mu, threshold, model_h, model_g)
    power_res = power / s.power_budget - 1.0
    interference_res = interference / target - 1.0
    if abs(power_res) > 1e-6 or (mu > 0 and abs(interference_res) > 1e-6):
        raise SolverError(
            f"budgets not met: power residual {power_res:.3e}, "
            f"interference residual {interference_res:.3e}",
            residual=(power_res, interference_res))
    cdf_res = ratio_cdf(threshold, lam, mu, model_h, model_g) - (1.0 - s.p)
    diagnostics = {
        "quantile_solves": s.quantile_solves,
        "power_evals": s.lam_evals,
        "outer_evals": len(s.rho_trace),
        "power": power,
        "interference": interference,
        "power_residual": power_res,
        "interference_residual": interference_res,
        "slackness": mu * (interference - target),
        "cdf_residual": cdf_res,
    }
    return DualSolution(lam=lam, mu=mu, threshold=threshold, p=s.p, diagnostics=diagnostics)
