"""Compare the engine against brute enumeration on finite truncations.

For each random automorphism over an odd finite field, the permutation it
induces on ``(F^n)^N`` is enumerated; its parity and moved points are checked
against what the K1 class and the support predict.
"""
from __future__ import annotations

import argparse
import random
from collections import Counter
from dataclasses import dataclass

from defk.errors import SizeBoundExceeded
from defk.fields import parse_field
from defk.modules import ModuleDescriptor, Space
from defk.oracle import _data_indices, exhaustive_check
from defk.rings import RingDescriptor
from defk.sampling import random_automorphism


@dataclass
class ParityConfig:
    field: str = "GF(3)"
    power: int = 1
    maps: int = 50
    seed: int = 0


def run(cfg: ParityConfig) -> Counter:
    ring = RingDescriptor.of((1, parse_field(cfg.field)))
    space = Space(ModuleDescriptor.of(ring, float("inf")), cfg.power)
    rng = random.Random(cfg.seed)
    tally = Counter()
    for _ in range(cfg.maps):
        f = random_automorphism(rng, space)
        try:
            rep = exhaustive_check(f, max(2, _data_indices(f)))
        except SizeBoundExceeded:
            tally["skipped"] += 1
            continue
        tally["agree" if rep.agree else "disagree"] += 1
        if not rep.agree:
            print("disagreement:", rep.details)
    print(dict(tally))
    return tally


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(ParityConfig()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    raise SystemExit(1 if run(ParityConfig(**vars(p.parse_args())))["disagree"] else 0)
