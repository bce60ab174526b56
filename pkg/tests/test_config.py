import math

import pytest

from cogmac.config import NetworkConfig, db_to_linear


def test_db_conversion():
    assert db_to_linear(15) == pytest.approx(31.6228, abs=5e-5)
    assert db_to_linear(0) == 1.0
    assert db_to_linear(-10) == pytest.approx(0.1, rel=1e-15)


def test_defaults_and_per_user_budgets():
    c = NetworkConfig.from_db(500, 15, 0)
    assert c.sched_prob == 0.002
    assert c.per_user_power == pytest.approx(31.6228 / 500, rel=1e-5)
    assert c.per_user_interference == 1 / 500


@pytest.mark.parametrize("kwargs", [
    dict(n_users=0, p_ave=1, q_ave=1), dict(n_users=2.5, p_ave=1, q_ave=1),
    dict(n_users=3, p_ave=0, q_ave=1), dict(n_users=3, p_ave=1, q_ave=math.inf),
    dict(n_users=1, p_ave=1, q_ave=1), dict(n_users=4, p_ave=1, q_ave=1, sched_prob=1.0),
])
def test_rejects(kwargs):
    # N = 1 defaults to p = 1, outside (0, 1)
    with pytest.raises(ValueError):
        NetworkConfig(**kwargs)
