import numpy as np
import pytest

from addmarkov import _pykernels
from addmarkov.chain import AdditiveChainSpec, linear_memory, validate_additive


@pytest.fixture
def fig_spec():
    """N = 10, abar = 1/2, F(r) = 0.15 (1 - r/10)."""
    return AdditiveChainSpec(10, 0.5, linear_memory(10, 0.15))


@pytest.fixture
def compiled():
    return pytest.importorskip("addmarkov._kernels")


@pytest.fixture
def pure():
    return _pykernels


def random_additive(rng, max_order=20, abar_range=(0.2, 0.8)):
    """Random valid additive spec: memory scaled to stay inside the CPDF bounds."""
    while True:
        order = int(rng.integers(1, max_order + 1))
        abar = float(rng.uniform(*abar_range))
        memory = rng.uniform(-1, 1, order)
        budget = rng.uniform(0.05, 0.95) * min(abar, 1 - abar)
        memory *= budget / np.abs(memory).sum()
        spec = AdditiveChainSpec(order, abar, memory)
        if validate_additive(spec).ok:
            return spec


def boundary_additive(rng, max_order=20, reach=0.999):
    """Random spec scaled to a random fraction (up to ``reach``) of the validity boundary.

    The direction of F is mixed-sign, all positive or all negative with equal odds.
    """
    order = int(rng.integers(1, max_order + 1))
    abar = float(rng.uniform(0.02, 0.98))
    f = rng.uniform(-1, 1, order)
    mode = rng.integers(3)
    if mode == 1:
        f = np.abs(f)
    elif mode == 2:
        f = -np.abs(f)
    pos, neg = f[f > 0].sum(), -f[f < 0].sum()
    up = pos * (1 - abar) + neg * abar
    down = pos * abar + neg * (1 - abar)
    scale = min((1 - abar) / up if up else np.inf, abar / down if down else np.inf)
    return AdditiveChainSpec(order, abar, f * scale * rng.uniform(0, reach))


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS:
        terminalreporter.write_line(line)
