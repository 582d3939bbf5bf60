"""Abelianized symmetric groups along the chain of finite definable sets."""
from __future__ import annotations

import argparse

from defk.fields import parse_field
from defk.oracle import FiniteStructure, brute_k1_finite

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--field", default="GF(3)")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--max-power", type=int, default=1)
    a = p.parse_args()
    rep = brute_k1_finite(FiniteStructure(parse_field(a.field), a.rank), a.max_power)
    for st in rep.stages:
        print(f"|X| = {st.size}: |Sym| = {st.group_order}, |Sym'| = {st.derived_order}, quotient {st.descriptor.format()}")
    print(f"K1 = {rep.descriptor.format()}, stabilized: {rep.stabilized}")
