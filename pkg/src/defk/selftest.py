"""Quick randomized self-checks behind ``defk selftest``."""
from __future__ import annotations

import random

from . import linalg
from .defmaps import compose, conjugate, extend_to_full, embed
from .defsets import DefinableSet, dim_of, k0_class
from .fields import GF, QQ
from .k1 import k1_eq, k1_invariant
from .modules import ModuleDescriptor, Space
from .rings import RingDescriptor
from . import sampling


def _space(F, n: int) -> Space:
    return Space(ModuleDescriptor.of(RingDescriptor.of((1, F))), n)


def selftest(rng: random.Random, cases: int = 10) -> list:
    results = []

    bad = 0
    for j in range(cases):
        sp = _space(GF(5) if j % 2 else QQ, 1 + j % 2)
        f, g = sampling.random_automorphism(rng, sp), sampling.random_automorphism(rng, sp)
        bad += not k1_eq(k1_invariant(compose(f, g)), k1_invariant(f) + k1_invariant(g))
    results.append({"name": "k1 homomorphism", "ok": bad == 0, "detail": f"{cases - bad}/{cases}"})

    bad = 0
    for j in range(cases):
        sp = _space(GF(5), 1 + j % 2)
        f, g = sampling.random_automorphism(rng, sp), sampling.random_automorphism(rng, sp)
        c = k1_invariant(f)
        bad += not k1_eq(k1_invariant(conjugate(g, f)), c)
        bad += not k1_eq(k1_invariant(extend_to_full(embed(f, sp.n + 1))), c)
    results.append({"name": "k1 conjugation and stabilization", "ok": bad == 0, "detail": f"{2 * cases - bad}/{2 * cases}"})

    bad = 0
    for _ in range(cases):
        sp = _space(GF(5), 2)
        A, B = sampling.random_set(rng, sp), sampling.random_set(rng, sp)
        union = A.union(B)
        lhs = k0_class(union) + k0_class(A.intersect(B))
        bad += lhs != k0_class(A) + k0_class(B)
        bad += not union.is_empty() and k0_class(union).degree != dim_of(union)
    results.append({"name": "k0 inclusion-exclusion and degree", "ok": bad == 0, "detail": f"{2 * cases - bad}/{2 * cases}"})

    bad = 0
    for _ in range(cases):
        F = rng.choice([GF(5), QQ])
        n = rng.randint(1, 4)
        A, B = sampling.random_matrix(rng, F, n), sampling.random_matrix(rng, F, n)
        lhs = linalg.dieudonne_det(F, linalg.mat_mul(F, A, B))
        bad += lhs != F.class_mul(linalg.dieudonne_det(F, A), linalg.dieudonne_det(F, B))
    results.append({"name": "dieudonne multiplicativity", "ok": bad == 0, "detail": f"{cases - bad}/{cases}"})
    return results
