from __future__ import annotations

import random
import sys

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from defk.fields import GF, HQ, QQ
from defk.modules import ModuleDescriptor, Space
from defk.rings import RingDescriptor

settings.register_profile(
    "defk",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("defk")

F5 = GF(5)
F3 = GF(3)


def space_over(F, n: int = 1, q: int = 1, rank=float("inf")) -> Space:
    return Space(ModuleDescriptor.of(RingDescriptor.of((q, F)), rank), n)


def product_space(n: int = 1) -> Space:
    return Space(ModuleDescriptor.of(RingDescriptor.of((1, F5), (1, QQ))), n)


seeds = st.integers(min_value=0, max_value=2**32 - 1)
fields = st.sampled_from([F5, QQ, GF(2, 2), F3])
all_fields = st.sampled_from([F5, QQ, HQ, GF(2, 2), F3])


def rng_of(seed: int) -> random.Random:
    return random.Random(seed)


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
