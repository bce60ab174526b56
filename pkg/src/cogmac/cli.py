"""Command-line front end.

    cogmac simulate --model-h weibull:4 --model-g rayleigh --pave-db 15 --qave-db 0 --n 500
    cogmac sweep --model-h rayleigh --model-g nakagami:0.5 --pave-db 15 --qave-db 0 \\
        --n-list 100:1000:100 --output sweep.csv

Settings may also come from ``--config FILE`` holding ``key = value`` lines
whose keys mirror the flag names (``model-h`` or ``model_h``); flags given
on the command line win. Summaries print as ``key: value`` lines. Exit
status is 0 on success, 1 on numerical failure and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass

from .config import NetworkConfig, db_to_linear
from .distcheck import DEFAULT_MODELS, run_checks
from .dual import ConstraintBudget, solve_duals
from .errors import NumericalError
from .fading import FadingModel
from .oracle import closed_form_policy, discretize, optimality_gap, solve_relaxed
from .sim import estimate
from .sweep import asymptote, sweep, write_csv

SUBCOMMANDS = ("simulate", "duals", "sweep", "oracle-check", "dist-check")
DEFAULT_SLOTS = 100_000
ORACLE_GAP = 1e-3


def _int(text):
    """Integer, also accepting integral scientific notation such as ``1e5``."""
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not value.is_integer():
            raise
        return int(value)


# flag name -> (converter, help)
_OPTIONS = {
    "model-h": (str, "gain to the own base station, e.g. weibull:4"),
    "model-g": (str, "gain to the primary base station, e.g. rayleigh"),
    "pave-db": (float, "total average power budget in dB"),
    "qave-db": (float, "total average interference budget in dB"),
    "n": (_int, "number of secondary users"),
    "n-list": (str, "comma list or start:stop:step range of N values"),
    "p": (float, "scheduling probability (default 1/N)"),
    "slots": (_int, "simulated slots (sweep default: 1e5, 1e6 for N <= 200)"),
    "seed": (_int, "master seed"),
    "workers": (_int, "worker processes for simulation"),
    "output": (str, "output path (default standard output)"),
    "grid-h": (_int, "oracle grid size for h"),
    "grid-g": (_int, "oracle grid size for g"),
    "starts": (_int, "oracle random starts"),
    "models": (str, "comma list of models for dist-check"),
}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    model_h: FadingModel | None = None
    model_g: FadingModel | None = None
    p_ave_db: float | None = None
    q_ave_db: float | None = None
    n_users: int | None = None
    n_list: tuple[int, ...] = ()
    sched_prob: float | None = None
    slots: int | None = None
    seed: int = 0
    workers: int = 1
    output: str | None = None
    grid_h: int = 3
    grid_g: int = 3
    starts: int = 20
    models: tuple[str, ...] = DEFAULT_MODELS

    @property
    def p_ave(self) -> float:
        return db_to_linear(self.p_ave_db)

    @property
    def q_ave(self) -> float:
        return db_to_linear(self.q_ave_db)

    def network(self) -> NetworkConfig:
        return NetworkConfig(self.n_users, self.p_ave, self.q_ave, self.sched_prob)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    parser = _Parser(prog="cogmac", description=__doc__.split("\n\n")[0],
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("subcommand", nargs="?", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="key = value file; flags override it")
    for name, (_, text) in _OPTIONS.items():
        parser.add_argument(f"--{name}", dest=name.replace("-", "_"), help=text,
                            default=argparse.SUPPRESS)
    return parser


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"config {path}:{num}: expected key = value")
        key = key.strip().lower().replace("_", "-")
        value = value.strip().strip("'\"")
        if key != "subcommand" and key not in _OPTIONS:
            raise UsageError(f"config {path}:{num}: unknown key {key!r}")
        values[key.replace("-", "_")] = value
    return values


def _convert(field, text):
    conv = _OPTIONS[field.replace("_", "-")][0]
    try:
        return conv(text)
    except (TypeError, ValueError):
        kind = {_int: "an integer", float: "a number"}.get(conv, "text")
        raise UsageError(f"{field.replace('_', '-')}: cannot read {text!r} as {kind}") from None


def _parse_n_list(text):
    text = text.strip()
    try:
        if ":" in text:
            parts = [int(x) for x in text.split(":")]
            if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] <= 0):
                raise ValueError
            start, stop = parts[:2]
            step = parts[2] if len(parts) == 3 else 1
            return tuple(range(start, stop + 1, step))
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"n-list: cannot read {text!r}") from None


def _model(field, text):
    if text is None:
        raise UsageError(f"{field}: required")
    try:
        return FadingModel.parse(text)
    except ValueError as exc:
        raise UsageError(f"{field}: {exc}") from None


def _finite(field, value):
    if value is None:
        raise UsageError(f"{field}: required")
    if not math.isfinite(value):
        raise UsageError(f"{field}: must be finite, got {value}")
    return value


def parse(argv=None, config_file: str | None = None) -> RunConfig:
    """Validated :class:`RunConfig` from flags and an optional config file."""
    args = vars(_build_parser().parse_args(argv))
    path = args.pop("config", None) or config_file
    merged = read_config_file(path) if path else {}
    for key, value in args.items():
        if value is not None:
            merged[key] = value

    sub = merged.pop("subcommand", None)
    if sub not in SUBCOMMANDS:
        raise UsageError(f"subcommand: expected one of {', '.join(SUBCOMMANDS)}")
    raw = {k: (_convert(k, v) if isinstance(v, str) and k != "n_list" else v)
           for k, v in merged.items()}
    out = {"subcommand": sub}

    if "seed" in raw:
        out["seed"] = raw["seed"]
    if "workers" in raw:
        if raw["workers"] < 1:
            raise UsageError("workers: must be at least 1")
        out["workers"] = raw["workers"]
    if "output" in raw:
        out["output"] = raw["output"]
    if "slots" in raw:
        if raw["slots"] < 1:
            raise UsageError("slots: must be at least 1")
        out["slots"] = raw["slots"]

    if sub == "dist-check":
        if "models" in raw:
            names = tuple(m.strip() for m in raw["models"].split(",") if m.strip())
            for m in names:
                _model("models", m)
            out["models"] = names
        return RunConfig(**out)

    out["model_h"] = _model("model-h", raw.get("model_h"))
    out["model_g"] = _model("model-g", raw.get("model_g"))
    out["p_ave_db"] = _finite("pave-db", raw.get("pave_db"))
    out["q_ave_db"] = _finite("qave-db", raw.get("qave_db"))

    if sub == "oracle-check":
        for key in ("grid_h", "grid_g"):
            if key in raw:
                if not 2 <= raw[key] <= 50:
                    raise UsageError(f"{key.replace('_', '-')}: must lie in [2, 50]")
                out[key] = raw[key]
        if "starts" in raw:
            if raw["starts"] < 1:
                raise UsageError("starts: must be at least 1")
            out["starts"] = raw["starts"]
        # Out-of-range p is reported by the oracle itself as infeasible.
        out["sched_prob"] = _finite("p", raw.get("p"))
        return RunConfig(**out)

    if sub == "sweep":
        if "n_list" not in raw:
            raise UsageError("n-list: required")
        ns = _parse_n_list(raw["n_list"])
        if not ns:
            raise UsageError("n-list: empty")
        if min(ns) < 2:
            raise UsageError(f"n-list: every N must be at least 2, got {min(ns)}")
        out["n_list"] = ns
        return RunConfig(**out)

    if "n" not in raw:
        raise UsageError("n: required")
    if raw["n"] < 1:
        raise UsageError(f"n: must be at least 1, got {raw['n']}")
    out["n_users"] = raw["n"]
    if "p" in raw:
        out["sched_prob"] = raw["p"]
    if sub == "simulate":
        out.setdefault("slots", DEFAULT_SLOTS)
    cfg = RunConfig(**out)
    try:
        cfg.network()
    except ValueError as exc:
        raise UsageError(f"p: {exc}") from None
    return cfg


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _summary(pairs):
    return "".join(f"{k}: {_fmt(v)}\n" for k, v in pairs)


def _cmd_duals(cfg):
    net = cfg.network()
    dual = solve_duals(net, cfg.model_h, cfg.model_g)
    diag = dual.diagnostics
    pairs = [("n_users", net.n_users), ("p", net.sched_prob), ("p_ave", net.p_ave),
             ("q_ave", net.q_ave), ("lambda", dual.lam), ("mu", dual.mu),
             ("threshold", dual.threshold),
             ("power_per_user", diag["power"]), ("interference_per_user", diag["interference"]),
             ("power_residual", diag["power_residual"]),
             ("interference_residual", diag["interference_residual"]),
             ("cdf_residual", diag["cdf_residual"])]
    return net, dual, pairs


def _simulate(cfg):
    net, dual, pairs = _cmd_duals(cfg)
    stats = estimate(net, dual, cfg.model_h, cfg.model_g, cfg.slots, cfg.seed, cfg.workers)
    pairs = pairs[:7] + [
        ("slots", stats.slots), ("seed", cfg.seed),
        ("throughput", stats.throughput), ("stderr", stats.throughput_stderr),
        ("p_an", stats.p_an), ("p_an_stderr", stats.p_an_stderr),
        ("avg_power", stats.avg_power), ("power_stderr", stats.power_stderr),
        ("avg_interference", stats.avg_interference),
        ("interference_stderr", stats.interference_stderr),
    ]
    if net.n_users > math.e:
        pairs.append(("asymptote", asymptote(net.n_users, cfg.model_h, net.p_ave)))
    return 0, _summary(pairs)


def _duals(cfg):
    return 0, _summary(_cmd_duals(cfg)[2])


def _sweep(cfg):
    rows = sweep(cfg.model_h, cfg.model_g, cfg.p_ave, cfg.q_ave, cfg.n_list,
                 cfg.slots, cfg.seed, cfg.workers)
    buf = io.StringIO()
    write_csv(rows, buf)
    failed = [r for r in rows if r.failed]
    for r in failed:
        print(f"row N={r.n_users} failed: {r.error}", file=sys.stderr)
    return (1 if failed else 0), buf.getvalue()


def _oracle_check(cfg):
    d = discretize(cfg.model_h, cfg.model_g, cfg.grid_h, cfg.grid_g)
    budget = ConstraintBudget(cfg.p_ave, cfg.q_ave)
    relaxed = solve_relaxed(d, budget, cfg.sched_prob, starts=cfg.starts, seed=cfg.seed)
    closed = closed_form_policy(d, budget, cfg.sched_prob)
    gap = optimality_gap(relaxed.objective, closed.objective)
    ok = gap <= ORACLE_GAP and relaxed.objective >= closed.objective - 1e-9
    pairs = [("grid", f"{cfg.grid_h}x{cfg.grid_g}"), ("p", cfg.sched_prob),
             ("power_budget", budget.per_user_power),
             ("interference_budget", budget.per_user_interference),
             ("relaxed_objective", relaxed.objective),
             ("closed_form_objective", closed.objective), ("gap", gap),
             ("relaxed_lambda", relaxed.lam), ("relaxed_mu", relaxed.mu),
             ("relaxed_sched_eta", relaxed.sched_eta),
             ("closed_form_lambda", closed.lam), ("closed_form_mu", closed.mu),
             ("closed_form_sched_eta", closed.sched_eta),
             ("start_spread", relaxed.residuals["start_spread"]),
             ("status", "agree" if ok else "disagree")]
    return (0 if ok else 1), _summary(pairs)


def _dist_check(cfg):
    checks = run_checks(cfg.models, cfg.seed)
    text = "".join(c.line() + "\n" for c in checks)
    failed = sum(not c.passed for c in checks)
    text += f"checks: {len(checks)}\nfailed: {failed}\n"
    return (1 if failed else 0), text


_COMMANDS = {"simulate": _simulate, "duals": _duals, "sweep": _sweep,
             "oracle-check": _oracle_check, "dist-check": _dist_check}


def run(cfg: RunConfig) -> int:
    """Execute ``cfg``; returns the exit status."""
    try:
        status, text = _COMMANDS[cfg.subcommand](cfg)
    except (NumericalError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if cfg.output:
        try:
            with open(cfg.output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {cfg.output}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return status


def main(argv=None) -> int:
    try:
        cfg = parse(argv)
    except UsageError as exc:
        print(f"cogmac: usage error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
