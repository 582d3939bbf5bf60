from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from defk.defmaps import (
    AffinePiece,
    PiecewiseAffineBijection,
    compose,
    component_product,
    dim_of_map,
    embed,
    extend_by_identity,
    extend_to_full,
    factor_components,
    invert,
    is_identity,
    support,
    validate,
)
from defk.defsets import Block, DefinableSet
from defk.errors import InvalidMap, UnsupportedDecomposition
from defk.fields import QQ
from defk.modules import ModuleDescriptor, Space, Vector
from defk.ppsets import AffineMap, Coset, canonicalize
from defk.rings import RingDescriptor
from defk.sampling import coset_cycle, global_affine, point_transposition, random_automorphism, random_vector

from conftest import F5, fields, product_space, rng_of, seeds, space_over

spaces = st.builds(space_over, fields, st.integers(1, 2)) | st.builds(product_space, st.integers(1, 2))


def _line_pair(sp):
    L = Coset.make(canonicalize(sp, ann=[((1,), (0,))]))
    return L, L.translate(Vector.make(sp, [{0: (1, 0)}]))


def test_identity_is_valid():
    sp = space_over(F5, 2)
    f = PiecewiseAffineBijection.identity(DefinableSet.full(sp))
    assert validate(f) == []
    assert support(f).is_empty() and dim_of_map(f) is None


def test_overlapping_domains_are_reported():
    sp = space_over(F5, 1)
    full = DefinableSet.full(sp)
    p = AffinePiece.of(Block(Coset.full(sp)), AffineMap.identity(sp))
    f = PiecewiseAffineBijection(full, full, (p, p))
    assert "domains overlap" in validate(f)
    with pytest.raises(InvalidMap):
        PiecewiseAffineBijection.make(full, full, (p, p))


def test_parallel_swap_is_valid():
    sp = space_over(F5, 2)
    L, L1 = _line_pair(sp)
    e = Vector.make(sp, [{0: (1, 0)}])
    full = DefinableSet.full(sp)
    rest = Block.make(Coset.full(sp), [L, L1])
    f = PiecewiseAffineBijection.make(
        full,
        full,
        [
            AffinePiece.of(Block(L), AffineMap.translation(e)),
            AffinePiece.of(Block(L1), AffineMap.translation(-e)),
            AffinePiece.of(rest, AffineMap.identity(sp)),
        ],
    )
    assert validate(f) == []
    assert is_identity(compose(f, f))
    assert dim_of_map(f) == (1,)


def test_translation_moves_everything():
    sp = space_over(QQ, 1)
    f = PiecewiseAffineBijection.global_affine(AffineMap.translation(Vector.make(sp, [{0: (QQ.one,)}])))
    assert support(f).equals(DefinableSet.full(sp))


def test_point_transposition_support():
    sp = space_over(F5, 1)
    f = point_transposition(rng_of(0), sp)
    S = support(f)
    assert len(S.blocks) == 2 and dim_of_map(f) == (0,)


def test_single_pieces_compose_in_action_order():
    sp = space_over(QQ, 2)
    A1 = ((QQ.one, QQ.from_int(2)), (QQ.zero, QQ.one))
    A2 = ((QQ.zero, QQ.one), (QQ.one, QQ.zero))
    f = PiecewiseAffineBijection.global_affine(AffineMap.linear(sp, [A1]))
    g = PiecewiseAffineBijection.global_affine(AffineMap.linear(sp, [A2]))
    h = compose(f, g)
    x = Vector.make(sp, [{0: (QQ.from_int(3), QQ.from_int(-1)), 2: (QQ.one, QQ.one)}])
    assert h.apply(x) == f.apply(g.apply(x))
    from defk import linalg

    assert h.pieces[0].aff.mats[0] == linalg.mat_mul(QQ, A2, A1)


@given(spaces, seeds)
def test_compose_invert_laws(space, seed):
    rng = rng_of(seed)
    f, g, h = (random_automorphism(rng, space) for _ in range(3))
    assert validate(compose(f, g)) == []
    assert is_identity(compose(f, invert(f)))
    x = random_vector(rng, space)
    assert compose(compose(f, g), h).apply(x) == compose(f, compose(g, h)).apply(x)
    fx = f.apply(x)
    assert any(p.image.contains(fx) for p in f.pieces)


@given(spaces, seeds)
def test_support_laws(space, seed):
    rng = rng_of(seed)
    f, g = random_automorphism(rng, space), random_automorphism(rng, space)
    assert support(invert(f)).equals(support(f))
    assert support(compose(f, g)).le(support(f).union(support(g)))
    S = support(f)
    assert S.image(f.pieces[0].aff).space == S.space
    image = DefinableSet(space, tuple(b for p in f.pieces for b in [p.domain.intersect(c) for c in S.blocks] if b))
    moved = DefinableSet(
        space, tuple(b.image(p.aff) for p in f.pieces for b in [p.domain.intersect(c) for c in S.blocks] if b)
    )
    assert image.equals(S) and moved.equals(S)


@given(spaces, seeds)
def test_extend_by_identity_keeps_support(space, seed):
    rng = rng_of(seed)
    f = coset_cycle(rng, space)
    big = extend_to_full(embed(f, space.n + 1))
    assert validate(big) == []
    assert support(big).equals(support(f).pad(space.n + 1))


def test_extension_of_point_swap():
    sp = space_over(F5, 1)
    f = point_transposition(rng_of(3), sp)
    E = support(f)
    restricted = PiecewiseAffineBijection(
        E, E, tuple(p for p in f.pieces if any(p.domain.intersect(b) for b in E.blocks) and not p.aff.is_identity())
    )
    g = extend_by_identity(embed(restricted, 2), DefinableSet.full(sp.power(2)))
    assert validate(g) == []
    assert support(g).equals(E.pad(2))


def test_extend_requires_containment():
    sp = space_over(F5, 1)
    f = PiecewiseAffineBijection.identity(DefinableSet.full(sp))
    with pytest.raises(InvalidMap):
        extend_by_identity(f, DefinableSet.of_coset(Coset.point(Vector.zero(sp))))


@given(seeds)
def test_component_product_factors_back(seed):
    rng = rng_of(seed)
    ring = RingDescriptor.of((1, F5), (1, QQ))
    f1 = random_automorphism(rng, space_over(F5, 2))
    f2 = random_automorphism(rng, space_over(QQ, 2))
    f = component_product(ring, [f1, f2])
    assert validate(f) == []
    x = random_vector(rng, f.space)
    parts = factor_components(f)
    for i, (fi, orig) in enumerate(zip(parts, (f1, f2))):
        assert is_identity(compose(invert(orig), fi))


def test_non_product_map_is_rejected():
    sp = product_space(1)
    v = Vector.make(sp, [{0: (1,)}, {0: (QQ.one,)}])
    full = DefinableSet.full(sp)
    p0, p1 = Coset.point(Vector.zero(sp)), Coset.point(v)
    rest = Block.make(Coset.full(sp), [p0, p1])
    swap = PiecewiseAffineBijection.make(
        full,
        full,
        [
            AffinePiece.of(Block(p0), AffineMap.translation(v)),
            AffinePiece.of(Block(p1), AffineMap.translation(-v)),
            AffinePiece.of(rest, AffineMap.identity(sp)),
        ],
    )
    with pytest.raises(UnsupportedDecomposition):
        factor_components(swap)
