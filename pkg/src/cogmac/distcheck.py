"""Self-checks of the fading models: sampling, inversion and class-C constants.

Used by the ``dist-check`` command and the acceptance suite. Each check
returns a :class:`Check` row; nothing raises on a failed check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special, stats

from .fading import Family, FadingModel, origin_ratio, tail_ratio
from .rng import slot_stream, stream_key

DEFAULT_MODELS = ("rayleigh", "rician:1", "nakagami:0.5", "weibull:4")
KS_SAMPLES = 100_000
# Asymptotic two-sided Kolmogorov critical value at the 1% level, times sqrt(n).
KS_COEF_1PCT = 1.6276
MEAN_SAMPLES = 1_000_000
ROUNDTRIP_LEVELS = (0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)
TAIL_GRID = (10.0, 20.0, 40.0)
ORIGIN_GRID = (1e-2, 1e-3, 1e-4)

# Point checks of the ratios: (model, point, allowed |ratio - 1|).
TAIL_BANDS = {"rayleigh": (5.0, 1e-12), "weibull:4": (3.0, 1e-12), "rician:1": (20.0, 0.05)}
ORIGIN_BANDS = {"rayleigh": (1e-4, 1e-4), "nakagami:0.5": (1e-6, 1e-3),
                "weibull:4": (1e-3, 1e-3)}


@dataclass(frozen=True)
class Check:
    model: str
    name: str
    value: float
    bound: float
    passed: bool

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict}  {self.model:<14} {self.name:<22} value={self.value:.6g} bound={self.bound:.3g}"


def table_row(model: FadingModel) -> tuple:
    """Class-C constants ``(alpha, l, beta, n, tail_eta, gamma)`` written out per family."""
    fam, s = model.family, model.shape
    if fam is Family.RAYLEIGH:
        return (1.0, 0.0, 1.0, 1.0, 1.0, 1.0)
    if fam is Family.RICIAN:
        alpha = 1.0 / (2.0 * math.sqrt(math.pi) * math.exp(s) * (s * (s + 1.0)) ** 0.25)
        return (alpha, -0.25, s + 1.0, 1.0, (s + 1.0) * math.exp(-s), 1.0)
    if fam is Family.NAKAGAMI:
        c = s ** (s - 1.0) / special.gamma(s)
        return (c, s - 1.0, s, 1.0, c, s)
    beta = special.gamma(1.0 + 2.0 / s) ** (s / 2.0)
    return (1.0, 0.0, beta, s / 2.0, beta, s / 2.0)


def _ratio_checks(label, name, ratio, grid, band):
    """``|ratio - 1|`` shrinks along ``grid`` and, if a band is given, is small there."""
    dev = [abs(ratio(x) - 1.0) for x in grid]
    monotone = all(b <= a + 1e-12 for a, b in zip(dev, dev[1:]))
    out = [Check(label, f"{name}_monotone", dev[-1], dev[0], monotone)]
    if band is not None:
        x, tol = band
        d = abs(ratio(x) - 1.0)
        out.append(Check(label, f"{name}@{x:g}", d, tol, bool(d <= tol)))
    return out


def check_model(model: FadingModel, seed: int = 0) -> list[Check]:
    label = str(model)
    out = []

    rng = slot_stream(stream_key(seed, 1), 0)
    draws = model.sample(rng, KS_SAMPLES)
    ks = stats.kstest(draws, model.cdf).statistic
    bound = KS_COEF_1PCT / math.sqrt(KS_SAMPLES)
    out.append(Check(label, "ks_distance", ks, bound, bool(ks <= bound)))
    out.append(Check(label, "positive_draws", float(draws.min()), 0.0, bool(draws.min() > 0)))

    rng = slot_stream(stream_key(seed, 2), 0)
    big = model.sample(rng, MEAN_SAMPLES)
    z = abs(big.mean() - 1.0) / (big.std(ddof=1) / math.sqrt(big.size))
    out.append(Check(label, "unit_mean_z", z, 4.0, bool(z <= 4.0)))

    err = max(abs(float(model.cdf(model.quantile(q))) - q) for q in ROUNDTRIP_LEVELS)
    out.append(Check(label, "quantile_roundtrip", err, 1e-9, bool(err <= 1e-9)))

    tail = model.tail()
    got = (tail.alpha, tail.l, tail.beta, tail.n, tail.tail_eta, tail.gamma)
    diff = max(abs(a - b) / max(abs(b), 1.0) for a, b in zip(got, table_row(model)))
    out.append(Check(label, "table_constants", diff, 0.0, bool(diff <= 1e-15)))
    growth = [abs(float(tail.H(x))) / x ** tail.n for x in (1e2, 1e4, 1e6)]
    ok = growth[-1] <= 0.01 and all(b <= a for a, b in zip(growth, growth[1:]))
    out.append(Check(label, "H_over_x^n", growth[-1], 0.01, bool(ok)))

    out += _ratio_checks(label, "tail_ratio", lambda x: tail_ratio(model, tail, x).value,
                         TAIL_GRID, TAIL_BANDS.get(label))
    out += _ratio_checks(label, "origin_ratio", lambda x: origin_ratio(model, tail, x),
                         ORIGIN_GRID, ORIGIN_BANDS.get(label))
    return out


def run_checks(models=DEFAULT_MODELS, seed: int = 0) -> list[Check]:
    out = []
    for m in models:
        out += check_model(m if isinstance(m, FadingModel) else FadingModel.parse(m), seed)
    return out
