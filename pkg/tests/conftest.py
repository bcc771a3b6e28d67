import numpy as np
import pytest

from otfs_rach import PreambleConfig, ZcRoot


@pytest.fixture(scope="session")
def cfg():
    """Default table configuration (M=139, N=4, 60 kHz, SRRC 10%, F=8)."""
    return PreambleConfig()


@pytest.fixture(scope="session")
def pulse(cfg):
    return cfg.make_pulse()


def make_cfg(u: int = 1, **kw) -> PreambleConfig:
    M = kw.pop("M", 139)
    return PreambleConfig(M=M, root=ZcRoot(u=u, M=M), **kw)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
