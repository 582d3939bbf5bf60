"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line in ``RESULTS``; ``conftest`` prints them in
the terminal summary, and running this file directly prints them as well.
"""
from __future__ import annotations

import random
import time

from defk import linalg
from defk.defmaps import (
    AffinePiece,
    PiecewiseAffineBijection,
    component_product,
    compose,
    conjugate,
    embed,
    extend_by_identity,
    extend_to_full,
    stabilize,
    support,
)
from defk.defsets import Block, DefinableSet, dim_of, find_point, k0_class
from defk.fields import GF, HQ, QQ, quat
from defk.k1 import Cyclic, expected_k1_group, k1_eq, k1_invariant, k1_of_gl, transport_automorphism_group
from defk.modules import ModuleDescriptor, morita_translate
from defk.oracle import FiniteStructure, _data_indices, brute_k1_finite, check_cardinality
from defk.ppsets import AffineMap
from defk.rings import RingDescriptor, UnitClass
from defk.sampling import (
    coset_cycle,
    point_transposition,
    random_automorphism,
    random_block,
    random_matrix,
    random_set,
    random_subcoset,
)

from conftest import F3, F5, product_space, space_over

RESULTS: list[str] = []


def _record(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _top(c):
    comp = c.components[0]
    return comp.levels[-1] if comp.levels else None


def test_criterion_1_finite_structure():
    t = time.perf_counter()
    rep = brute_k1_finite(FiniteStructure(F3, 1), 1)
    dt = time.perf_counter() - t
    ok = rep.descriptor == Cyclic(2) and rep.stabilized and len(rep.stages) >= 2 and dt < 10
    _record(1, ok, f"K1 = {rep.descriptor.format()}, stabilized={rep.stabilized}, {dt:.2f}s")


def test_criterion_2_homomorphism_law():
    rng = random.Random(2)
    cases = [(F, n) for F in (F5, QQ) for n in (1, 2)]
    t = time.perf_counter()
    bad = 0
    for j in range(200):
        F, n = cases[j % len(cases)]
        sp = space_over(F, n)
        f, g = random_automorphism(rng, sp), random_automorphism(rng, sp)
        if not k1_eq(k1_invariant(compose(f, g)), k1_invariant(f) + k1_invariant(g)):
            bad += 1
    dt = time.perf_counter() - t
    _record(2, bad == 0 and dt < 60, f"{200 - bad}/200 pairs, {dt:.1f}s")


def _cofactor_det(A):
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def test_criterion_3_algebraic_embedding():
    rng = random.Random(3)
    ring = RingDescriptor.of((1, QQ))
    bad = 0
    for _ in range(100):
        A = random_matrix(rng, QQ, 2)
        comp = k1_of_gl(ring, [A]).components[0]
        want = UnitClass.of_unit(QQ, _cofactor_det(A))
        if comp.sign0 != 0 or comp.as_dict() != ({} if want.is_trivial else {2: (want, 0)}):
            bad += 1
    for _ in range(50):
        i, j = rng.sample(range(2), 2)
        E = [list(r) for r in linalg.identity(QQ, 2)]
        E[i][j] = QQ.random(rng, nonzero=True)
        if not k1_of_gl(ring, [tuple(map(tuple, E))]).is_zero:
            bad += 1
    _record(3, bad == 0, f"{150 - bad}/150 matrices (100 random, 50 elementary)")


def test_criterion_4_weak_morita():
    def group(q):
        ring = RingDescriptor.of((q, F5))
        return expected_k1_group(ring, ModuleDescriptor.of(ring, float("inf")))

    same = group(1) == group(2)
    sp = space_over(F5, 1)
    dets = []
    for u in range(2, 5):
        f = PiecewiseAffineBijection.global_affine(AffineMap.linear(sp, [((u,),)]))
        small = _top(k1_invariant(f))
        big = _top(k1_invariant(morita_translate(stabilize(f, 2), 2)))
        dets.append(small is not None and big is not None and small[1] == big[1] == UnitClass(F5, u))
    _record(4, same and all(dets), f"descriptors equal={same}, top dets equal for u=2,3,4: {dets}")


def test_criterion_5_product_rings():
    rng = random.Random(5)
    ring = RingDescriptor.of((1, F5), (1, QQ))
    t = time.perf_counter()
    bad = 0
    for j in range(100):
        n = 1 + j % 2
        f1 = random_automorphism(rng, space_over(F5, n))
        f2 = random_automorphism(rng, space_over(QQ, n))
        c = k1_invariant(component_product(ring, [f1, f2]))
        if c.components != (k1_invariant(f1).components[0], k1_invariant(f2).components[0]):
            bad += 1
    dt = time.perf_counter() - t
    _record(5, bad == 0 and dt < 60, f"{100 - bad}/100 products, {dt:.1f}s")


def test_criterion_6_k0_laws():
    rng = random.Random(6)
    bad = []
    for j in range(100):
        sp = space_over(F5, 1 + j % 2) if j % 2 == 0 else product_space(1 + (j // 2) % 2)
        A, B = random_set(rng, sp), random_set(rng, sp)
        D = A.difference(B)
        if k0_class(D.disjoint_union(B)) != k0_class(D) + k0_class(B):
            bad.append(("additive", j))
        if k0_class(A.product(B)) != k0_class(A) * k0_class(B):
            bad.append(("product", j))
        if k0_class(A).degree != dim_of(A):
            bad.append(("degree", j))
    counts = 0
    for j in range(30):
        sp = space_over(F3, 1 + j % 2)
        D = random_set(rng, sp)
        N = max(1, _data_indices(D))
        if 3 ** (sp.n * N) > 5000:
            continue
        counts += 1
        if not check_cardinality(D, N).agree:
            bad.append(("cardinality", j))
    _record(6, not bad, f"100 sets, {counts} F3 truncations, failures {bad[:3]}")


def test_criterion_7_dieudonne():
    rng = random.Random(7)
    bad = 0
    plugins = [F5, GF(2, 2), QQ, HQ]
    for F in plugins:
        for j in range(500):
            n = 1 + j % 4
            A, B = random_matrix(rng, F, n), random_matrix(rng, F, n)
            lhs = linalg.dieudonne_det(F, linalg.mat_mul(F, A, B))
            if lhs != F.class_mul(linalg.dieudonne_det(F, A), linalg.dieudonne_det(F, B)):
                bad += 1
    o = HQ.zero
    ij = linalg.dieudonne_det(HQ, ((quat(0, 1, 0, 0), o), (o, quat(0, 0, 1, 0))))
    trivial = UnitClass(HQ, ij).is_trivial
    _record(7, bad == 0 and trivial, f"{4 * 500 - bad}/{4 * 500} products over {len(plugins)} plugins, diag(i,j) trivial={trivial}")


def _restrict(f, D):
    pieces = []
    for p in f.pieces:
        for b in D.blocks:
            dom = p.domain.intersect(b)
            if dom is not None:
                pieces.append(AffinePiece.of(dom, p.aff))
    return PiecewiseAffineBijection.make(D, D, pieces)


def test_criterion_8_stabilization_and_conjugation():
    rng = random.Random(8)
    bad = []
    for j in range(50):
        F = (F5, QQ)[j % 2]
        sp = space_over(F, 1 + j % 2)
        f = random_automorphism(rng, sp)
        c = k1_invariant(f)
        S = support(f)
        if not S.is_empty():
            r = _restrict(f, S)
            if not k1_eq(k1_invariant(extend_by_identity(r, DefinableSet.full(sp))), c):
                bad.append(("extend", j))
            if not k1_eq(k1_invariant(extend_to_full(embed(r, sp.n + 1))), c):
                bad.append(("embed", j))
        g = random_automorphism(rng, sp)
        if not k1_eq(k1_invariant(conjugate(g, f)), c):
            bad.append(("conjugate", j))
    sp = space_over(F5, 1)
    t = transport_automorphism_group(DefinableSet.full(sp), DefinableSet.full(sp.power(2)), (0,))
    for j in range(10):
        f = (point_transposition, coset_cycle)[j % 2](rng, sp)
        if not k1_eq(k1_invariant(extend_to_full(t.conjugate(f))), k1_invariant(f)):
            bad.append(("transport", j))
    _record(8, not bad, f"50 maps x (extend, embed, conjugate) + 10 transports, failures {bad[:3]}")


def test_criterion_9_block_calculus():
    rng = random.Random(9)
    bad = 0
    for j in range(200):
        sp = space_over((F5, QQ, HQ)[j % 3], 1 + j % 2) if j % 4 else product_space(1 + j % 2)
        b1 = random_block(rng, sp)
        if not b1.contains(find_point(DefinableSet(sp, (b1,)))):
            bad += 1
        holes = [h for h in (random_subcoset(rng, b1.ambient) for _ in range(2)) if h is not None]
        b2 = Block.make(b1.ambient, holes)
        inter = b1.intersect(b2)
        if inter is None or not (b1.contains(x := find_point(DefinableSet(sp, (inter,)))) and b2.contains(x)):
            bad += 1
    _record(9, bad == 0, f"{200 - bad}/200 block pairs")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
