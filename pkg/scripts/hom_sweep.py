"""Random sweep of the homomorphism law k1(f o g) = k1(f) + k1(g)."""
from __future__ import annotations

import argparse
import random
import time
from dataclasses import dataclass

from defk.defmaps import compose
from defk.fields import parse_field
from defk.k1 import k1_eq, k1_invariant
from defk.modules import ModuleDescriptor, Space
from defk.rings import RingDescriptor
from defk.sampling import random_automorphism


@dataclass
class SweepConfig:
    field: str = "GF(5)"
    power: int = 2
    pairs: int = 100
    steps: int = 2
    seed: int = 0


def run(cfg: SweepConfig) -> int:
    ring = RingDescriptor.of((1, parse_field(cfg.field)))
    space = Space(ModuleDescriptor.of(ring, float("inf")), cfg.power)
    rng = random.Random(cfg.seed)
    failures = 0
    t = time.perf_counter()
    for _ in range(cfg.pairs):
        f = random_automorphism(rng, space, cfg.steps)
        g = random_automorphism(rng, space, cfg.steps)
        if not k1_eq(k1_invariant(compose(f, g)), k1_invariant(f) + k1_invariant(g)):
            failures += 1
    print(f"{cfg.field} power {cfg.power}: {cfg.pairs - failures}/{cfg.pairs} pairs ok in {time.perf_counter() - t:.1f}s")
    return failures


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(SweepConfig()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    raise SystemExit(1 if run(SweepConfig(**vars(p.parse_args()))) else 0)
