"""Unit-mean fading power-gain distributions.

Four families are supported: Rayleigh, Rician (factor ``K_f``), Nakagami-m
and Weibull (shape ``c``). Every model is normalized so the power gain has
mean one, which is the normalization the tail constants in
:class:`ClassCTail` assume.

Each model exposes vectorized ``cdf``/``sf``/``pdf``, a bisection
``quantile``, a sampler driven by an explicit ``numpy.random.Generator``,
and ``inv_moment_above`` (``E[1/h; h > a]``), the piece of the water-filling
power integral that has a closed form per family.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import special

_MARCUM_REL_TOL = 1e-15
_MARCUM_MAX_TERMS = 100_000


class Family(str, enum.Enum):
    RAYLEIGH = "rayleigh"
    RICIAN = "rician"
    NAKAGAMI = "nakagami"
    WEIBULL = "weibull"


# ---------------------------------------------------------------------------
# Marcum Q
# ---------------------------------------------------------------------------

def _bessel_series(ratio, z, start):
    """Sum ``ratio**k * ive(k, z)`` for ``k >= start`` until terms vanish."""
    shape = np.shape(z)
    ratio, z = np.broadcast_arrays(np.atleast_1d(np.asarray(ratio, dtype=float)),
                                   np.atleast_1d(np.asarray(z, dtype=float)))
    ratio = ratio.ravel()
    z = z.ravel()
    total = np.zeros_like(z)
    power = np.ones_like(z) if start == 0 else ratio.copy()
    active = np.ones(z.shape, dtype=bool)
    k = start
    while active.any():
        if k - start > _MARCUM_MAX_TERMS:
            raise ArithmeticError("Marcum Q series did not terminate")
        term = power[active] * special.ive(k, z[active])
        total[active] += term
        # ratio <= 1 and ive(k, z) decreases in k, so terms are monotone.
        done = term <= _MARCUM_REL_TOL * total[active]
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        power = power * ratio
        k += 1
    return total.reshape(shape)


def marcum_q1(a, b):
    """First-order Marcum Q function and its complement.

    Returns ``(Q_1(a, b), 1 - Q_1(a, b))``, each computed from its own
    modified-Bessel series so neither suffers cancellation::

        Q_1     = exp(-(a-b)^2/2) * sum_{k>=0} (a/b)^k I_k(ab) e^{-ab}   (a < b)
        1 - Q_1 = exp(-(a-b)^2/2) * sum_{k>=1} (b/a)^k I_k(ab) e^{-ab}   (b <= a)
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    a = a.astype(float)
    b = b.astype(float)
    q = np.ones(a.shape)
    qc = np.zeros(a.shape)

    zero_b = b <= 0.0
    zero_a = (a <= 0.0) & ~zero_b
    # Q_1(0, b) is the Rayleigh survival function.
    q[zero_a] = np.exp(-0.5 * b[zero_a] ** 2)
    qc[zero_a] = -np.expm1(-0.5 * b[zero_a] ** 2)

    rest = ~(zero_a | zero_b)
    upper = rest & (a < b)
    lower = rest & ~(a < b)
    if upper.any():
        aa, bb = a[upper], b[upper]
        pref = np.exp(-0.5 * (aa - bb) ** 2)
        q[upper] = np.minimum(pref * _bessel_series(aa / bb, aa * bb, 0), 1.0)
        qc[upper] = 1.0 - q[upper]
    if lower.any():
        aa, bb = a[lower], b[lower]
        pref = np.exp(-0.5 * (aa - bb) ** 2)
        qc[lower] = np.minimum(pref * _bessel_series(bb / aa, aa * bb, 1), 1.0)
        q[lower] = 1.0 - qc[lower]
    return q, qc


def log_marcum_q1(a, b):
    """``log Q_1(a, b)`` for ``0 < a < b``, finite far past where ``Q_1`` underflows."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return -0.5 * (a - b) ** 2 + np.log(_bessel_series(a / b, a * b, 0))


def upper_gamma(s, x):
    """Unregularized upper incomplete gamma ``Gamma(s, x)`` for real ``s``, ``x > 0``.

    Non-positive ``s`` is reached through the downward recurrence
    ``Gamma(s, x) = (Gamma(s + 1, x) - x^s e^{-x}) / s``.
    """
    x = np.asarray(x, dtype=float)
    if s > 0:
        return special.gammaincc(s, x) * special.gamma(s)
    if s == 0:
        return special.exp1(x)
    return (upper_gamma(s + 1.0, x) - x ** s * np.exp(-x)) / s


# ---------------------------------------------------------------------------
# Class-C tail constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassCTail:
    """Asymptotic constants of a class-C power-gain distribution.

    Upper tail: ``1 - F(x) ~ alpha * x**l * exp(-beta * x**n + H(x))``.
    Origin: ``F(x) ~ tail_eta * x**gamma``.
    """

    alpha: float
    l: float
    beta: float
    n: float
    H: Callable[[float], float]
    tail_eta: float
    gamma: float
    H_expr: str = "0"


def _as_shape(size):
    if size is None:
        return ()
    if np.ndim(size) == 0:
        return (int(size),)
    return tuple(int(s) for s in size)


def _zero(x):
    return 0.0 * np.asarray(x, dtype=float)


class TailRatio(NamedTuple):
    value: float
    saturated: bool


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FadingModel:
    """A unit-mean fading power-gain distribution."""

    family: Family
    shape: float | None = None

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        if family is Family.RAYLEIGH:
            if self.shape is not None:
                raise ValueError("rayleigh takes no shape parameter")
            return
        if self.shape is None:
            raise ValueError(f"{family.value} requires a shape parameter")
        shape = float(self.shape)
        if not (math.isfinite(shape) and shape > 0):
            raise ValueError(f"{family.value} shape must be positive, got {self.shape}")
        object.__setattr__(self, "shape", shape)

    @classmethod
    def parse(cls, text: str) -> "FadingModel":
        """Build a model from ``"family"`` or ``"family:shape"``, e.g. ``"weibull:4"``."""
        name, _, arg = text.strip().lower().partition(":")
        try:
            family = Family(name)
        except ValueError:
            raise ValueError(f"unknown fading family {name!r}") from None
        if family is Family.RAYLEIGH:
            if arg:
                raise ValueError("rayleigh takes no shape parameter")
            return cls(family)
        if not arg:
            raise ValueError(f"{family.value} requires a shape, e.g. '{family.value}:2'")
        try:
            shape = float(arg)
        except ValueError:
            raise ValueError(f"bad shape {arg!r} for {family.value}") from None
        return cls(family, shape)

    def __str__(self):
        if self.shape is None:
            return self.family.value
        return f"{self.family.value}:{self.shape:g}"

    # -- helpers -----------------------------------------------------------

    @property
    def _weibull_beta(self):
        c = self.shape
        return special.gamma(1.0 + 2.0 / c) ** (c / 2.0)

    def _rician_args(self, x):
        k = self.shape
        a = math.sqrt(2.0 * k)
        b = np.sqrt(2.0 * (k + 1.0) * np.maximum(x, 0.0))
        return a, b

    # -- distribution functions -------------------------------------------

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        pos = np.maximum(x, 0.0)
        fam = self.family
        if fam is Family.RAYLEIGH:
            out = -np.expm1(-pos)
        elif fam is Family.NAKAGAMI:
            m = self.shape
            out = special.gammainc(m, m * pos)
        elif fam is Family.WEIBULL:
            out = -np.expm1(-self._weibull_beta * pos ** (self.shape / 2.0))
        else:
            a, b = self._rician_args(pos)
            out = marcum_q1(a, b)[1]
        return np.where(x > 0, out, 0.0)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        pos = np.maximum(x, 0.0)
        fam = self.family
        if fam is Family.RAYLEIGH:
            out = np.exp(-pos)
        elif fam is Family.NAKAGAMI:
            m = self.shape
            out = special.gammaincc(m, m * pos)
        elif fam is Family.WEIBULL:
            out = np.exp(-self._weibull_beta * pos ** (self.shape / 2.0))
        else:
            a, b = self._rician_args(pos)
            out = marcum_q1(a, b)[0]
        return np.where(x > 0, out, 1.0)

    def log_sf(self, x: float) -> float:
        """Log survival function at a scalar ``x > 0``; ``-inf`` on underflow."""
        fam = self.family
        if fam is Family.RAYLEIGH:
            return -x
        if fam is Family.WEIBULL:
            return -self._weibull_beta * x ** (self.shape / 2.0)
        if fam is Family.RICIAN:
            a, b = self._rician_args(x)
            if a < b:
                return float(log_marcum_q1(a, b))
        with np.errstate(divide="ignore"):
            return float(np.log(self.sf(x)))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            pos = np.where(x > 0, x, 1.0)
            fam = self.family
            if fam is Family.RAYLEIGH:
                out = np.exp(-pos)
            elif fam is Family.NAKAGAMI:
                m = self.shape
                out = np.exp(m * math.log(m) + (m - 1.0) * np.log(pos) - m * pos
                             - special.gammaln(m))
            elif fam is Family.WEIBULL:
                n = self.shape / 2.0
                beta = self._weibull_beta
                out = beta * n * pos ** (n - 1.0) * np.exp(-beta * pos ** n)
            else:
                k = self.shape
                z = 2.0 * np.sqrt(k * (k + 1.0) * pos)
                out = (k + 1.0) * np.exp(-k - (k + 1.0) * pos + z) * special.i0e(z)
        return np.where(x > 0, out, 0.0)

    def quantile(self, q: float) -> float:
        """Inverse CDF by bracketed bisection.

        The upper bracket starts at 1 and doubles until it passes ``q``. For
        ``q > 1/2`` the comparison is made on the survival function so that
        upper quantiles keep full relative precision.
        """
        q = float(q)
        if not 0.0 <= q < 1.0:
            raise ValueError(f"quantile level must lie in [0, 1), got {q}")
        if q == 0.0:
            return 0.0
        upper_tail = q > 0.5
        target = 1.0 - q if upper_tail else q

        def below(x):
            # True while x sits left of the quantile.
            if upper_tail:
                return float(self.sf(x)) > target
            return float(self.cdf(x)) < target

        lo, hi = 0.0, 1.0
        while below(hi):
            lo, hi = hi, 2.0 * hi
            if hi > 1e300:
                raise ArithmeticError("quantile bracket expansion overflowed")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if below(mid):
                lo = mid
            else:
                hi = mid
        return hi

    def sample(self, rng: np.random.Generator, size=None):
        fam = self.family
        if fam is Family.RAYLEIGH:
            return rng.standard_exponential(size)
        if fam is Family.NAKAGAMI:
            m = self.shape
            return rng.gamma(m, 1.0 / m, size)
        if fam is Family.WEIBULL:
            n = self.shape / 2.0
            return (rng.standard_exponential(size) / self._weibull_beta) ** (1.0 / n)
        k = self.shape
        los = math.sqrt(k / (k + 1.0))
        sigma = math.sqrt(0.5 / (k + 1.0))
        z = rng.standard_normal((2,) + _as_shape(size))
        return (los + sigma * z[0]) ** 2 + (sigma * z[1]) ** 2

    def inv_moment_above(self, a):
        """``E[1/h; h > a]`` for ``a > 0`` (vectorized)."""
        a = np.asarray(a, dtype=float)
        fam = self.family
        if fam is Family.RAYLEIGH:
            return special.exp1(a)
        if fam is Family.NAKAGAMI:
            m = self.shape
            return m * upper_gamma(m - 1.0, m * a) / special.gamma(m)
        if fam is Family.WEIBULL:
            n = self.shape / 2.0
            beta = self._weibull_beta
            return beta ** (1.0 / n) * upper_gamma(1.0 - 1.0 / n, beta * a ** n)
        # Rician: Poisson(K) mixture of Gamma(j + 1, rate K + 1) laws.
        k = self.shape
        rate = k + 1.0
        total = rate * special.exp1(rate * a) * math.exp(-k)
        j = 1
        weight = math.exp(-k)
        while True:
            weight *= k / j
            term = weight * rate / j * special.gammaincc(j, rate * a)
            total = total + term
            if j > k and np.all(term <= 1e-17 * total):
                return total
            j += 1

    # -- class-C constants ---------------------------------------------------

    def tail(self) -> ClassCTail:
        """Class-C constants for this family."""
        fam = self.family
        if fam is Family.RAYLEIGH:
            return ClassCTail(1.0, 0.0, 1.0, 1.0, _zero, 1.0, 1.0)
        if fam is Family.RICIAN:
            k = self.shape
            kk = k * (k + 1.0)
            return ClassCTail(
                alpha=1.0 / (2.0 * math.sqrt(math.pi) * math.exp(k) * kk ** 0.25),
                l=-0.25,
                beta=k + 1.0,
                n=1.0,
                H=lambda x: 2.0 * np.sqrt(kk * np.asarray(x, dtype=float)),
                tail_eta=(k + 1.0) / math.exp(k),
                gamma=1.0,
                H_expr=f"2*sqrt({kk:g}*x)",
            )
        if fam is Family.NAKAGAMI:
            m = self.shape
            c = m ** (m - 1.0) / special.gamma(m)
            return ClassCTail(c, m - 1.0, m, 1.0, _zero, c, m)
        c = self.shape
        beta = special.gamma(1.0 + 2.0 / c) ** (c / 2.0)
        return ClassCTail(1.0, 0.0, beta, c / 2.0, _zero, beta, c / 2.0)


def cdf(model: FadingModel, x):
    return model.cdf(x)


def quantile(model: FadingModel, q: float) -> float:
    return model.quantile(q)


def sample(model: FadingModel, rng: np.random.Generator, size=None):
    return model.sample(rng, size)


def class_c_tail(model: FadingModel) -> ClassCTail:
    return model.tail()


def tail_ratio(model: FadingModel, tail: ClassCTail, x: float) -> TailRatio:
    """``(1 - F(x)) / (alpha x^l exp(-beta x^n + H(x)))``, computed in log space.

    When the survival function underflows the ratio cannot be formed;
    ``saturated`` is set and ``value`` is NaN.
    """
    if x <= 0:
        raise ValueError("tail_ratio needs x > 0")
    log_surv = model.log_sf(x)
    if not math.isfinite(log_surv):
        return TailRatio(math.nan, True)
    log_env = (math.log(tail.alpha) + tail.l * math.log(x)
               - tail.beta * x ** tail.n + float(tail.H(x)))
    return TailRatio(math.exp(log_surv - log_env), False)


def origin_ratio(model: FadingModel, tail: ClassCTail, x: float) -> float:
    """``F(x) / (tail_eta x^gamma)``; tends to 1 as ``x`` goes to 0."""
    if x <= 0:
        raise ValueError("origin_ratio needs x > 0")
    return float(model.cdf(x)) / (tail.tail_eta * x ** tail.gamma)
