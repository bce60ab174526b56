"""Network configuration and the dB boundary."""

from __future__ import annotations

from dataclasses import dataclass


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class NetworkConfig:
    """``n_users`` statistically identical secondary users and their budgets.

    ``p_ave`` and ``q_ave`` are network-wide linear budgets; each user is
    held to ``p_ave / n_users`` and ``q_ave / n_users``. ``sched_prob``
    defaults to ``1 / n_users``.
    """

    n_users: int
    p_ave: float
    q_ave: float
    sched_prob: float | None = None

    def __post_init__(self):
        if int(self.n_users) != self.n_users or self.n_users < 1:
            raise ValueError(f"n_users must be a positive integer, got {self.n_users}")
        object.__setattr__(self, "n_users", int(self.n_users))
        for name in ("p_ave", "q_ave"):
            v = getattr(self, name)
            if not (v > 0 and v < float("inf")):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        p = self.sched_prob if self.sched_prob is not None else 1.0 / self.n_users
        if not 0.0 < p < 1.0:
            raise ValueError(f"scheduling probability must lie in (0, 1), got {p}")
        object.__setattr__(self, "sched_prob", float(p))

    @classmethod
    def from_db(cls, n_users, p_ave_db, q_ave_db, sched_prob=None):
        return cls(n_users, db_to_linear(p_ave_db), db_to_linear(q_ave_db), sched_prob)

    @property
    def per_user_power(self) -> float:
        return self.p_ave / self.n_users

    @property
    def per_user_interference(self) -> float:
        return self.q_ave / self.n_users
