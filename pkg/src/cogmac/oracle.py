"""Brute-force check of the water-filling/threshold policy on a finite grid.

The channel pair ``(h, g)`` is replaced by an equiprobable product grid.
On that grid two routes compute the best achievable rate:

* :func:`solve_relaxed` maximizes the perspective objective
  ``sum m_s w_s log(1 + h_s q_s / w_s)`` over effective powers ``q`` and
  scheduling weights ``w`` with a generic convex solver (log-barrier Newton
  by default, smoothed projected-gradient ascent on request). It knows
  nothing about water-filling.
* :func:`closed_form_objective` fixes the water-filling power law, finds
  the multipliers by minimizing the dual function, and then picks the
  scheduling weights.

The two values must agree. Discrete channels have atoms, so ties between
states are possible and fractional weights are allowed on them; the
continuous-fading theory only guarantees binary weights almost surely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .dual import ConstraintBudget
from .errors import InfeasibleError, NumericalError
from .fading import FadingModel

_TINY = 1e-300


@dataclass(frozen=True)
class DiscreteJointState:
    h: np.ndarray
    g: np.ndarray
    mass: np.ndarray
    counts: tuple[int, int]

    @property
    def states(self):
        return list(zip(self.h.tolist(), self.g.tolist(), self.mass.tolist()))


@dataclass
class OracleSolution:
    q: np.ndarray
    w: np.ndarray
    objective: float
    lam: float
    mu: float
    sched_eta: float
    residuals: dict = field(default_factory=dict)
    iterations: int = 0


@dataclass
class ClosedFormSolution:
    objective: float
    lam: float
    mu: float
    w: np.ndarray
    q: np.ndarray
    ratio: np.ndarray
    sched_eta: float


def discretize(model_h: FadingModel, model_g: FadingModel, n_h_grid: int,
               n_g_grid: int) -> DiscreteJointState:
    """Product grid at cell-midpoint quantiles, every state with equal mass."""
    if n_h_grid < 2 or n_g_grid < 2:
        raise ValueError("grid sizes must be at least 2")
    hs = [model_h.quantile((i + 0.5) / n_h_grid) for i in range(n_h_grid)]
    gs = [model_g.quantile((j + 0.5) / n_g_grid) for j in range(n_g_grid)]
    hh, gg = np.meshgrid(hs, gs, indexing="ij")
    mass = np.full(hh.size, 1.0 / hh.size)
    return DiscreteJointState(hh.ravel(), gg.ravel(), mass, (n_h_grid, n_g_grid))


def _check(budget: ConstraintBudget, p: float):
    if not 0.0 < p <= 1.0:
        raise InfeasibleError(f"scheduling probability must lie in (0, 1], got {p}")


def _gain(x):
    """``G(max(x, 1))`` with ``G(x) = log x + 1/x - 1``."""
    x = np.maximum(x, 1.0)
    return np.log(x) + 1.0 / x - 1.0


# ---------------------------------------------------------------------------
# Relaxed problem by projected-gradient ascent
#
# All random starts run in lockstep as the rows of 2-D arrays. The
# perspective term w log(1 + h q/w) is not differentiable at q = w = 0, where
# plain gradient steps stall, so the ascent works on the smoothed term
# (w + eps) log(1 + h q/(w + eps)) and drives eps to zero in stages.
# ---------------------------------------------------------------------------

SMOOTHING = (1e-3, 1e-6, 1e-9)


def _objective(d, q, w, eps=0.0):
    """Objective per row; ``eps = 0`` is the exact relaxation."""
    we = w + eps
    val = np.where(we > 0, we * np.log1p(d.h * q / np.maximum(we, _TINY)), 0.0)
    return val @ d.mass


def _gradient(d, q, w, eps):
    snr = d.h * q / np.maximum(w + eps, _TINY)
    gq = d.mass * d.h / (1.0 + snr)
    gw = d.mass * (np.log1p(snr) - snr / (1.0 + snr))
    return gq, gw


def _pl_root(knots, func, target):
    """Row-wise root of continuous non-increasing piecewise-linear functions.

    ``func`` maps an ``(S, K)`` array of abscissae to values; every kink of
    row ``s`` must be among ``knots[s]``. Exact up to rounding.
    """
    knots = np.sort(knots, axis=1)
    vals = func(knots)
    ok = vals <= target
    if not ok.any(axis=1).all():
        raise NumericalError("piecewise-linear root outside the knot range")
    rows = np.arange(knots.shape[0])
    k = np.argmax(ok, axis=1)
    km = np.maximum(k - 1, 0)
    x0, x1 = knots[rows, km], knots[rows, k]
    f0, f1 = vals[rows, km], vals[rows, k]
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(f0 > f1, (f0 - target) / (f0 - f1), 0.0)
    return np.where(k == 0, x1, x0 + frac * (x1 - x0))


def _project_box_sum(v, m, target):
    """Row-wise projection onto ``{0 <= w <= 1, m.w = target}``."""
    def excess(nu):
        return np.clip(v[:, None, :] - nu[:, :, None] * m, 0.0, 1.0) @ m

    nu = _pl_root(np.concatenate([v / m, (v - 1.0) / m], axis=1), excess, target)
    return np.clip(v - nu[:, None] * m, 0.0, 1.0)


def _halfspace_multiplier(v, a, budget):
    """Row-wise smallest ``t >= 0`` with ``a . max(0, v - t a) <= budget``."""
    slack = np.maximum(v, 0.0) @ a <= budget

    def load(t):
        return np.maximum(v[:, None, :] - t[:, :, None] * a, 0.0) @ a

    knots = np.concatenate([v / a, np.zeros((v.shape[0], 1))], axis=1)
    t = _pl_root(knots, load, budget)
    return np.where(slack, 0.0, np.maximum(t, 0.0))


def _project_two(v, a1, p_budget, a2, q_budget):
    """Rows where both budgets bind: active-set iteration on the 2x2 KKT
    system. Rows that fail to settle come back as NaN."""
    alpha = _halfspace_multiplier(v, a1, p_budget)
    on = v - alpha[:, None] * a1 > 0
    out = np.full_like(v, np.nan)
    todo = np.arange(v.shape[0])
    for _ in range(4 * v.shape[1] + 10):
        vv, oo = v[todo], on[todo]
        s11 = oo @ (a1 * a1)
        s12 = oo @ (a1 * a2)
        s22 = oo @ (a2 * a2)
        r1 = (oo * vv) @ a1 - p_budget
        r2 = (oo * vv) @ a2 - q_budget
        det = s11 * s22 - s12 * s12
        with np.errstate(divide="ignore", invalid="ignore"):
            alpha = (r1 * s22 - r2 * s12) / det
            beta = (s11 * r2 - s12 * r1) / det
            shifted = vv - alpha[:, None] * a1 - beta[:, None] * a2
        bad = ~(np.isfinite(alpha) & np.isfinite(beta) & (alpha >= 0) & (beta >= 0))
        nxt = shifted > 0
        settled = ~bad & (nxt == oo).all(axis=1)
        out[todo[settled]] = np.maximum(shifted[settled], 0.0)
        keep = ~bad & ~settled
        on[todo[keep]] = nxt[keep]
        todo = todo[keep]
        if todo.size == 0:
            break
    return out


def _project_power_nested(v, a1, p_budget, a2, q_budget):
    """Single-row fallback: root-find the interference multiplier."""
    def q_at(beta):
        shifted = (v - beta * a2)[None, :]
        alpha = _halfspace_multiplier(shifted, a1, p_budget)[0]
        return np.maximum(shifted[0] - alpha * a1, 0.0)

    hi = 1.0
    while a2 @ q_at(hi) > q_budget:
        hi *= 2.0
    beta = optimize.brentq(lambda b: a2 @ q_at(b) - q_budget, 0.0, hi,
                           xtol=1e-300, rtol=1e-15, maxiter=500)
    return q_at(beta)


def _project_power(v, a1, p_budget, a2, q_budget):
    """Row-wise projection onto ``{q >= 0, a1.q <= P, a2.q <= Q}``."""
    out = np.maximum(v, 0.0)
    done = (out @ a1 <= p_budget) & (out @ a2 <= q_budget)
    # A single-budget projection that happens to meet the other budget is the
    # answer; rows where neither does have both budgets binding.
    for a, budget, b_other, other in ((a1, p_budget, q_budget, a2),
                                      (a2, q_budget, p_budget, a1)):
        rest = np.nonzero(~done)[0]
        if rest.size == 0:
            return out
        t = _halfspace_multiplier(v[rest], a, budget)
        q = np.maximum(v[rest] - t[:, None] * a, 0.0)
        ok = q @ other <= b_other
        out[rest[ok]] = q[ok]
        done[rest[ok]] = True
    rest = np.nonzero(~done)[0]
    if rest.size:
        q = _project_two(v[rest], a1, p_budget, a2, q_budget)
        for i in np.nonzero(np.isnan(q[:, 0]))[0]:
            q[i] = _project_power_nested(v[rest[i]], a1, p_budget, a2, q_budget)
        out[rest] = q
    # Budgets may be a hair over from rounding.
    over = np.maximum(out @ a1 / p_budget, out @ a2 / q_budget)
    return out / np.maximum(over, 1.0)[:, None]


def _project(d, budget, p, q, w):
    qp = _project_power(q, d.mass, budget.per_user_power, d.mass * d.g,
                        budget.per_user_interference)
    return qp, _project_box_sum(w, d.mass, p)


def _ascend(d, budget, p, q, w, eps, max_iter, patience=50, tol=1e-12,
            armijo=1e-4, memory=5):
    """Spectral projected gradient on every row of ``(q, w)``.

    Trial steps come from the Barzilai-Borwein ratio and are halved until a
    non-monotone Armijo test against the best of the last ``memory`` values
    passes. A row stops once its best value improves by less than ``tol``
    over ``patience`` iterations.
    """
    q, w = _project(d, budget, p, q, w)
    f = _objective(d, q, w, eps)
    gq, gw = _gradient(d, q, w, eps)
    n_rows = q.shape[0]
    step = np.ones(n_rows)
    recent = [f.copy()]
    bests = [f.copy()]
    iters = np.zeros(n_rows, dtype=int)
    live = np.arange(n_rows)
    for _ in range(max_iter):
        ref = np.max(recent[-memory:], axis=0)[live]
        t = step[live].copy()
        q1, w1 = np.empty((live.size, q.shape[1])), np.empty((live.size, q.shape[1]))
        f1 = np.empty(live.size)
        pend = np.arange(live.size)
        while pend.size:
            r = live[pend]
            qq, ww = _project(d, budget, p, q[r] + t[pend, None] * gq[r],
                              w[r] + t[pend, None] * gw[r])
            ff = _objective(d, qq, ww, eps)
            lin = ((qq - q[r]) * gq[r]).sum(axis=1) + ((ww - w[r]) * gw[r]).sum(axis=1)
            acc = (ff >= ref[pend] + armijo * lin) | (t[pend] < 1e-20)
            q1[pend[acc]], w1[pend[acc]], f1[pend[acc]] = qq[acc], ww[acc], ff[acc]
            t[pend[~acc]] *= 0.5
            pend = pend[~acc]
        gq1, gw1 = _gradient(d, q1, w1, eps)
        ds = np.concatenate([q1 - q[live], w1 - w[live]], axis=1)
        dy = np.concatenate([gq[live] - gq1, gw[live] - gw1], axis=1)
        sy = (ds * dy).sum(axis=1)
        ss = (ds * ds).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            step[live] = np.where(sy > 0, np.clip(ss / sy, 1e-10, 1e10), 1e4)
        q[live], w[live], f[live], gq[live], gw[live] = q1, w1, f1, gq1, gw1
        iters[live] += 1
        recent.append(f.copy())
        bests.append(np.maximum(bests[-1], f))
        if len(bests) > patience:
            gain = bests[-1][live] - bests[-1 - patience][live]
            live = live[gain >= tol]
            if live.size == 0:
                break
    return q, w, iters


# ---------------------------------------------------------------------------
# Relaxed problem by a log-barrier Newton method (default)
# ---------------------------------------------------------------------------

BARRIER_GROWTH = 10.0
BARRIER_GAP = 1e-11


def _interior_start(rng, d, budget, p, starts):
    """Random strictly feasible points of the relaxation, one per row."""
    n = d.h.size
    a1, a2 = d.mass, d.mass * d.g
    q = rng.uniform(0.0, 1.0, (starts, n)) + 1e-3
    scale = 0.5 * np.minimum(budget.per_user_power / (q @ a1),
                             budget.per_user_interference / (q @ a2))
    q *= scale[:, None]
    if p >= 1.0:
        return q, np.ones((starts, n))
    w0 = rng.uniform(0.05, 0.95, (starts, n))
    dev = w0 - (w0 @ d.mass)[:, None]
    with np.errstate(divide="ignore"):
        room = np.where(dev > 0, (1.0 - p) / dev, np.where(dev < 0, -p / dev, np.inf))
    s = 0.9 * np.minimum(1.0, room.min(axis=1))
    return q, p + s[:, None] * dev


def _barrier_parts(d, budget, q, w, t, fix_w):
    """Value, gradient and Hessian (batched) of the barrier-augmented objective."""
    h, m = d.h, d.mass
    a1, a2 = m, m * d.g
    s1 = budget.per_user_power - q @ a1
    s2 = budget.per_user_interference - q @ a2
    den = w + h * q
    value = t * _objective(d, q, w) + np.log(q).sum(axis=1) + np.log(s1) + np.log(s2)
    gq = t * m * h * w / den + 1.0 / q - a1 / s1[:, None] - a2 / s2[:, None]
    hqq = -t * m * h * h * w / den**2 - 1.0 / q**2
    low = (a1[:, None] * a1)[None] / (s1**2)[:, None, None] \
        + (a2[:, None] * a2)[None] / (s2**2)[:, None, None]
    rows, n = q.shape
    diag = np.arange(n)
    if fix_w:
        hess = -low
        hess[:, diag, diag] += hqq
        return value, gq, hess
    value = value + np.log(w).sum(axis=1) + np.log1p(-w).sum(axis=1)
    snr = h * q / w
    gw = t * m * (np.log1p(snr) - h * q / den) + 1.0 / w - 1.0 / (1.0 - w)
    hqw = t * m * h * h * q / den**2
    hww = -t * m * h * h * q * q / (w * den**2) - 1.0 / w**2 - 1.0 / (1.0 - w) ** 2
    hess = np.zeros((rows, 2 * n, 2 * n))
    hess[:, :n, :n] = -low
    hess[:, diag, diag] += hqq
    hess[:, diag, n + diag] = hqw
    hess[:, n + diag, diag] = hqw
    hess[:, n + diag, n + diag] = hww
    return value, np.concatenate([gq, gw], axis=1), hess


def _barrier_value(d, budget, q, w, t, fix_w):
    s1 = budget.per_user_power - q @ d.mass
    s2 = budget.per_user_interference - q @ (d.mass * d.g)
    bad = (q <= 0).any(axis=1) | (s1 <= 0) | (s2 <= 0)
    if not fix_w:
        bad |= ((w <= 0) | (w >= 1)).any(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = t * _objective(d, q, w) + np.log(q).sum(axis=1) + np.log(s1) + np.log(s2)
        if not fix_w:
            value = value + np.log(w).sum(axis=1) + np.log1p(-w).sum(axis=1)
    return np.where(bad, -np.inf, value)


def _newton_direction(grad, hess, mass, fix_w):
    rows, nv = grad.shape
    if fix_w:
        kkt, rhs = hess, -grad
    else:
        n = mass.size
        kkt = np.zeros((rows, nv + 1, nv + 1))
        kkt[:, :nv, :nv] = hess
        kkt[:, nv, n:nv] = mass
        kkt[:, n:nv, nv] = mass
        rhs = np.concatenate([-grad, np.zeros((rows, 1))], axis=1)
    try:
        step = np.linalg.solve(kkt, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        step = np.stack([np.linalg.lstsq(k, r, rcond=None)[0] for k, r in zip(kkt, rhs)])
    return step[:, :nv]


def _barrier_newton(d, budget, p, q, w, max_newton=200, centering_tol=1e-10):
    """Follow the central path from interior rows ``(q, w)``.

    Each stage maximizes ``t f + (log-barrier of all inequalities)`` subject
    to the scheduling equality with damped Newton steps, then raises ``t``.
    Returns the rows at the last stage and the Newton step count per row.
    """
    n = d.h.size
    fix_w = p >= 1.0
    n_ineq = n + 2 + (0 if fix_w else 2 * n)
    rows = q.shape[0]
    steps = np.zeros(rows, dtype=int)
    t = 1.0
    while True:
        live = np.arange(rows)
        for _ in range(max_newton):
            value, grad, hess = _barrier_parts(d, budget, q[live], w[live], t, fix_w)
            dx = _newton_direction(grad, hess, d.mass, fix_w)
            decrement = (grad * dx).sum(axis=1)
            done = decrement / 2.0 <= centering_tol
            live, value, dx, decrement = live[~done], value[~done], dx[~done], decrement[~done]
            if live.size == 0:
                break
            dq, dw = dx[:, :n], (dx[:, n:] if not fix_w else np.zeros_like(dx))
            s = np.ones(live.size)
            pend = np.arange(live.size)
            while pend.size:
                r = live[pend]
                qq = q[r] + s[pend, None] * dq[pend]
                ww = w[r] + s[pend, None] * dw[pend]
                trial = _barrier_value(d, budget, qq, ww, t, fix_w)
                ok = (trial >= value[pend] + 0.25 * s[pend] * decrement[pend]) | (s[pend] < 1e-12)
                q[r[ok]], w[r[ok]] = qq[ok], ww[ok]
                s[pend[~ok]] *= 0.5
                pend = pend[~ok]
            steps[live] += 1
        if n_ineq / t <= BARRIER_GAP:
            return q, w, steps
        t *= BARRIER_GROWTH


def _recover_multipliers(d, q, w, tol=1e-7):
    """Fit ``h/(1 + h q/w) = lam + mu g`` on states that radiate."""
    active = (q > tol) & (w > tol)
    marginal = d.h / (1.0 + d.h * q / np.maximum(w, _TINY))
    if not active.any():
        return 0.0, 0.0, marginal, active
    A = np.column_stack([np.ones(active.sum()), d.g[active]])
    if np.ptp(d.g[active]) == 0.0:
        lam = float(marginal[active].mean())
        return lam, 0.0, marginal, active
    (lam, mu), *_ = np.linalg.lstsq(A, marginal[active], rcond=None)
    if mu < 0:
        lam, mu = float(marginal[active].mean()), 0.0
    return float(lam), float(mu), marginal, active


def solve_relaxed(d: DiscreteJointState, budget: ConstraintBudget, p: float,
                  starts: int = 20, seed: int = 0, max_iter: int = 20_000,
                  agree_rtol: float = 1e-6, method: str = "barrier") -> OracleSolution:
    """Maximize the convex relaxation from ``starts`` random feasible points.

    ``method="barrier"`` follows the log-barrier central path with Newton
    steps; ``method="gradient"`` runs smoothed spectral projected-gradient
    ascent, which needs far more time for the same accuracy (``max_iter``
    caps each smoothing stage). The relaxation is jointly concave, so every start
    must reach the same objective to ``agree_rtol``; otherwise
    :class:`NumericalError` is raised.
    """
    _check(budget, p)
    rng = np.random.default_rng(seed)
    n = d.h.size
    if method == "barrier":
        q, w = _interior_start(rng, d, budget, p, starts)
        q, w, steps = _barrier_newton(d, budget, p, q, w)
        total_iter = int(steps.sum())
    elif method == "gradient":
        q = rng.uniform(0.0, 2.0 * budget.per_user_power, (starts, n))
        w = rng.uniform(0.0, 1.0, (starts, n))
        total_iter = 0
        for eps in SMOOTHING:
            q, w, iters = _ascend(d, budget, p, q, w, eps, max_iter)
            total_iter += int(iters.sum())
    else:
        raise ValueError(f"unknown method {method!r}")
    values = _objective(d, q, w)
    spread = float((values.max() - values.min()) / max(abs(values.max()), _TINY))
    if spread > agree_rtol:
        raise NumericalError(f"relaxed starts disagree (relative spread {spread:.2e})",
                             residual=spread)
    k = int(np.argmax(values))
    q, w, f = q[k], w[k], float(values[k])
    lam, mu, marginal, active = _recover_multipliers(d, q, w)
    x = d.h / (lam + mu * d.g) if lam + mu > 0 else np.full(n, np.inf)
    interior = (w > 1e-6) & (w < 1 - 1e-6)
    if interior.any():
        eta = float(_gain(x[interior]).mean())
    else:
        on, off = _gain(x[w > 0.5]), _gain(x[w <= 0.5])
        eta = 0.5 * ((on.min() if on.size else 0.0) + (off.max() if off.size else 0.0))
    residuals = {
        "power": float(d.mass @ q - budget.per_user_power),
        "interference": float(d.mass @ (d.g * q) - budget.per_user_interference),
        "schedule": float(d.mass @ w - p),
        "start_spread": spread,
        "stationarity": float(np.max(np.abs(marginal[active] - lam - mu * d.g[active])))
        if active.any() else 0.0,
    }
    return OracleSolution(q=q, w=w, objective=f, lam=lam, mu=mu, sched_eta=eta,
                          residuals=residuals, iterations=total_iter)


# ---------------------------------------------------------------------------
# Water-filling route
# ---------------------------------------------------------------------------

def _knapsack(values, mass, p):
    """Best ``sum m w v`` with ``sum m w = p``, ``0 <= w <= 1``."""
    order = np.argsort(-values, kind="stable")
    w = np.zeros_like(values)
    left = p
    for i in order:
        take = min(1.0, left / mass[i])
        w[i] = take
        left -= take * mass[i]
        if left <= 0:
            break
    return float(mass @ (w * values))


def _dual_value(d, budget, p, lam, mu):
    x = d.h / (lam + mu * d.g)
    return (lam * budget.per_user_power + mu * budget.per_user_interference
            + _knapsack(_gain(x), d.mass, p))


def _minimize_dual(d, budget, p):
    lam_hi = p / budget.per_user_power
    mu_hi = p / budget.per_user_interference

    def inner(mu):
        res = optimize.minimize_scalar(
            lambda lam: _dual_value(d, budget, p, lam, mu), bounds=(0.0, lam_hi),
            method="bounded", options={"xatol": 1e-13 * lam_hi, "maxiter": 2000})
        return res.x, res.fun

    res = optimize.minimize_scalar(lambda mu: inner(mu)[1], bounds=(0.0, mu_hi),
                                   method="bounded",
                                   options={"xatol": 1e-13 * mu_hi, "maxiter": 2000})
    mu = float(res.x)
    lam, val = inner(mu)
    # The bounded method never lands on the endpoint; check mu = 0 explicitly.
    lam0, val0 = inner(0.0)
    if val0 <= val:
        return float(lam0), 0.0, float(val0)
    return float(lam), mu, float(val)


def closed_form_policy(d: DiscreteJointState, budget: ConstraintBudget,
                       p: float) -> ClosedFormSolution:
    """Water-filling powers at the dual-optimal multipliers plus best weights.

    Numerical multipliers are nudged upward before the weights are chosen:
    water-filling power only shrinks as the multipliers grow, so the exact
    optimal weights stay feasible and the result is a true feasible point.
    """
    _check(budget, p)
    lam, mu, _ = _minimize_dual(d, budget, p)
    lam_hi = p / budget.per_user_power
    mu_hi = p / budget.per_user_interference
    for eps in (1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4):
        lam_e = lam * (1 + eps) + eps * 1e-3 * lam_hi
        mu_e = mu * (1 + eps) + (eps * 1e-3 * mu_hi if mu > 0 else 0.0)
        x = d.h / (lam_e + mu_e * d.g)
        power = np.maximum(1.0 / (lam_e + mu_e * d.g) - 1.0 / d.h, 0.0)
        rate = np.log(np.maximum(x, 1.0))
        res = optimize.linprog(
            -(d.mass * rate),
            A_ub=np.vstack([d.mass * power, d.mass * d.g * power]),
            b_ub=[budget.per_user_power, budget.per_user_interference],
            A_eq=d.mass[None, :], b_eq=[p], bounds=[(0.0, 1.0)] * d.h.size,
            method="highs", options={"primal_feasibility_tolerance": 1e-10,
                                     "dual_feasibility_tolerance": 1e-10})
        if res.status == 0:
            w = np.clip(res.x, 0.0, 1.0)
            objective = float(d.mass @ (w * rate))
            interior = (w > 1e-9) & (w < 1 - 1e-9)
            gains = _gain(x)
            if interior.any():
                eta = float(gains[interior].mean())
            else:
                eta = float(gains[w > 0.5].min()) if (w > 0.5).any() else 0.0
            return ClosedFormSolution(objective, lam_e, mu_e, w, w * power, x, eta)
    raise InfeasibleError("no scheduling weights meet the budgets at the dual optimum")


def closed_form_objective(d: DiscreteJointState, budget: ConstraintBudget, p: float) -> float:
    return closed_form_policy(d, budget, p).objective


def optimality_gap(relaxed: float, closed: float) -> float:
    return abs(relaxed - closed) / max(abs(relaxed), _TINY)
