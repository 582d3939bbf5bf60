from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st
from sympy.combinatorics import Permutation

from defk.defmaps import support
from defk.errors import ShapeError, SizeBoundExceeded
from defk.k1 import Cyclic, k1_invariant
from defk.oracle import (
    FiniteStructure,
    _data_indices,
    abelianization,
    brute_k1_finite,
    check_cardinality,
    check_sign,
    check_support,
    exhaustive_check,
    symmetric_generators,
    truncated_parity,
)
from defk.sampling import point_transposition, random_automorphism, random_set

from conftest import F3, F5, rng_of, seeds, space_over


def test_finite_structure_f3():
    rep = brute_k1_finite(FiniteStructure(F3, 1), 1)
    assert rep.descriptor == Cyclic(2) and rep.stabilized
    assert [s.size for s in rep.stages] == [2, 3]


def test_s3_abelianization_by_commutators():
    order, derived, desc = abelianization(symmetric_generators(3), 3)
    assert (order, derived, desc) == (6, 3, Cyclic(2))


def test_cyclic_group_abelianization():
    gens = [Permutation([1, 2, 3, 0])]
    assert abelianization(gens, 4)[2] == Cyclic(4)


def test_bounds():
    with pytest.raises(ShapeError):
        brute_k1_finite(FiniteStructure(F3, 0), 1)
    with pytest.raises(SizeBoundExceeded):
        brute_k1_finite(FiniteStructure(F5, 1), 1)


def test_point_swap_support_and_sign():
    sp = space_over(F3, 1)
    f = point_transposition(rng_of(2), sp)
    N = max(2, _data_indices(f))
    assert check_support(f, support(f), N).agree
    c = k1_invariant(f)
    assert c.components[0].sign0 == 1
    assert truncated_parity(f, N) == 1
    assert check_sign(f, c, N).agree


def _small(f, limit=3):
    return max(2, _data_indices(f)) <= limit


@settings(max_examples=25)
@given(st.sampled_from([(F3, 1), (F3, 2), (F5, 1)]), seeds)
def test_parity_identity_on_truncations(case, seed):
    F, n = case
    rng = rng_of(seed)
    f = random_automorphism(rng, space_over(F, n))
    N = max(2, _data_indices(f))
    if F.cardinality ** (n * N) > 5000:
        return
    assert exhaustive_check(f, N).agree


@settings(max_examples=25)
@given(st.sampled_from([(F3, 1), (F3, 2), (F5, 1)]), seeds)
def test_cardinality_is_k0_at_field_powers(case, seed):
    F, n = case
    D = random_set(rng_of(seed), space_over(F, n))
    N = max(1, _data_indices(D))
    if F.cardinality ** (n * N) > 5000:
        return
    rep = check_cardinality(D, N)
    assert rep.agree, rep.details


def test_coset_count_over_f3():
    from defk.defsets import DefinableSet
    from defk.ppsets import Coset, canonicalize

    sp = space_over(F3, 2)
    L = Coset.make(canonicalize(sp, ann=[((1,), (1,))]))
    rep = check_cardinality(DefinableSet.of_coset(L), 2)
    assert rep.details == {"enumerated": 9, "predicted": 9}
