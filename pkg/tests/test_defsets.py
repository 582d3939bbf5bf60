from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from defk.defmaps import validate
from defk.defsets import Block, DefinableSet, K0Class, common_chunk, dim_of, find_point, k0_class, normalize
from defk.errors import EmptySet, PreconditionFailed, UnsupportedRing
from defk.modules import Vector
from defk.ppsets import Coset, canonicalize
from defk.sampling import random_block, random_set, random_subcoset, random_vector

from conftest import F5, fields, product_space, rng_of, seeds, space_over

spaces = st.builds(space_over, fields, st.integers(1, 2)) | st.builds(product_space, st.integers(1, 2))
X = K0Class.monomial


@given(spaces, seeds)
def test_normalize_preserves_membership(space, seed):
    rng = rng_of(seed)
    blocks = [random_block(rng, space) for _ in range(3)]
    D = normalize(space, blocks)
    for b in D.blocks:
        for c in D.blocks:
            assert b is c or b.intersect(c) is None
    probes = [random_vector(rng, space) for _ in range(10)] + [b.ambient.rep for b in blocks]
    for x in probes:
        assert D.contains(x) == any(b.contains(x) for b in blocks)


@given(spaces, seeds)
def test_k0_additive_and_multiplicative(space, seed):
    rng = rng_of(seed)
    A, B = random_set(rng, space), random_set(rng, space)
    assert k0_class(A.union(B)) + k0_class(A.intersect(B)) == k0_class(A) + k0_class(B)
    disjoint = A.difference(B)
    assert k0_class(disjoint.disjoint_union(B)) == k0_class(disjoint) + k0_class(B)
    assert k0_class(A.product(B)) == k0_class(A) * k0_class(B)


@given(spaces, seeds)
def test_degree_is_dimension(space, seed):
    D = random_set(rng_of(seed), space)
    assert not D.is_empty()
    assert k0_class(D).degree == dim_of(D)


@given(spaces, seeds)
def test_find_point_lands_in_the_set(space, seed):
    D = random_set(rng_of(seed), space)
    assert D.contains(find_point(D))


@given(spaces, seeds)
def test_blocks_with_equal_ambient_meet(space, seed):
    rng = rng_of(seed)
    b1 = random_block(rng, space)
    holes = [h for h in (random_subcoset(rng, b1.ambient) for _ in range(2)) if h is not None]
    b2 = Block.make(b1.ambient, holes)
    inter = b1.intersect(b2)
    assert inter is not None and inter.contains(find_point(DefinableSet(space, (inter,))))


def test_k0_examples():
    sp = space_over(F5, 2)
    assert k0_class(DefinableSet.full(sp)) == X((2,))
    line = space_over(F5, 1)
    punctured = DefinableSet(line, (Block.make(Coset.full(line), [Coset.point(Vector.zero(line))]),))
    assert k0_class(punctured) == X((1,)) - X((0,))
    assert k0_class(punctured).format() == "X - 1"
    assert k0_class(DefinableSet.empty(sp)) == K0Class.zero()


def test_two_lines_inclusion_exclusion():
    sp = space_over(F5, 2)
    L1 = Coset.make(canonicalize(sp, ann=[((1,), (0,))]))
    L2 = Coset.make(canonicalize(sp, ann=[((0,), (1,))]))
    U = normalize(sp, [Block(L1), Block(L2)])
    assert len(U.blocks) == 2
    assert k0_class(U) == X((1,)) + X((1,)) - X((0,))
    assert k0_class(U).to_json() == [{"exponent": [0], "coeff": -1}, {"exponent": [1], "coeff": 2}]


def test_dim_examples():
    sp = product_space(2)
    assert dim_of(DefinableSet.full(sp)) == (2, 2)
    assert dim_of(DefinableSet.empty(sp)) is None
    assert dim_of(DefinableSet.of_coset(Coset.point(Vector.zero(sp)))) == (0, 0)


def test_find_point_examples():
    sp = space_over(F5, 1)
    assert find_point(DefinableSet.full(sp)) == Vector.zero(sp)
    punctured = DefinableSet(sp, (Block.make(Coset.full(sp), [Coset.point(Vector.zero(sp))]),))
    assert find_point(punctured) == Vector.make(sp, [{0: (1,)}])
    with pytest.raises(EmptySet):
        find_point(DefinableSet.empty(sp))


def test_block_with_full_hole_is_empty():
    sp = space_over(F5, 1)
    assert Block.make(Coset.full(sp), [Coset.full(sp)]) is None


def test_k0_needs_infinite_modules():
    sp = space_over(F5, 1, rank=2)
    with pytest.raises(UnsupportedRing):
        k0_class(DefinableSet.full(sp))


def test_common_chunk_fast_path():
    sp = space_over(F5, 2)
    D, g = common_chunk(DefinableSet.full(sp), DefinableSet.full(sp), (1,))
    assert D.equals(DefinableSet.full(sp)) and all(p.aff.is_identity() for p in g.pieces)


def test_common_chunk_plane_into_coset():
    sp = space_over(F5, 2)
    D1 = DefinableSet.full(sp)
    other = Coset.make(canonicalize(sp, ann=[((1,), (2,))]), Vector.make(sp, [{1: (1, 0)}]))
    D2 = DefinableSet.of_coset(other).union(DefinableSet.of_coset(Coset.point(Vector.make(sp, [{4: (1, 1)}]))))
    D, g = common_chunk(D1, D2, (0,))
    assert validate(g) == []
    assert g.target.equals(D2.pad(D.space.n))
    assert dim_of(D1.pad(D.space.n).intersect(D)) >= (1,)


@given(seeds)
def test_common_chunk_product_ring(seed):
    rng = rng_of(seed)
    sp = product_space(2)
    full = DefinableSet.full(sp)
    D2 = random_set(rng, sp).union(DefinableSet.of_coset(Coset.full(sp).translate(random_vector(rng, sp))))
    D, g = common_chunk(full, D2, (1, 1))
    assert validate(g) == []
    assert dim_of(full.pad(D.space.n).intersect(D)) == (2, 2)


def test_common_chunk_checks_dimensions():
    sp = space_over(F5, 1)
    with pytest.raises(PreconditionFailed):
        common_chunk(DefinableSet.full(sp), DefinableSet.full(sp), (1,))
