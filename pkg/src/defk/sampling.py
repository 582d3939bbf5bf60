"""Random sets and automorphisms for experiments and property tests.

Everything is driven by an explicit ``random.Random`` so runs are reproducible.
"""
from __future__ import annotations

import random

from . import linalg
from .defmaps import AffinePiece, PiecewiseAffineBijection, compose
from .defsets import Block, DefinableSet
from .errors import Singular
from .modules import Space, Vector
from .ppsets import AffineMap, Coset, Subgroup, pp_iso_standard

SUPPORT = 3  # basis indices used by random vectors


def random_matrix(rng: random.Random, F, n: int, invertible: bool = True) -> tuple:
    while True:
        A = tuple(tuple(F.random(rng) for _ in range(n)) for _ in range(n))
        if not invertible:
            return A
        try:
            linalg.invert(F, A)
            return A
        except Singular:
            continue


def random_vector(rng: random.Random, space: Space, density: float = 0.5) -> Vector:
    comps = []
    for i, F in enumerate(space.fields):
        rows = {}
        for t in range(int(min(SUPPORT, space.module.ranks[i]))):
            if rng.random() < density:
                rows[t] = tuple(F.random(rng) for _ in range(space.width(i)))
        comps.append(rows)
    return Vector.make(space, comps)


def random_subgroup(rng: random.Random, space: Space, dims) -> Subgroup:
    gens = []
    for i, F in enumerate(space.fields):
        w = space.width(i)
        while True:
            rows = tuple(tuple(F.random(rng) for _ in range(w)) for _ in range(dims[i]))
            if linalg.rank(F, rows, w) == dims[i]:
                break
        gens.append(rows)
    return Subgroup.spanned(space, gens)


def random_coset(rng: random.Random, space: Space, dims=None) -> Coset:
    if dims is None:
        dims = tuple(rng.randint(0, space.width(i)) for i in range(space.k))
    return Coset.make(random_subgroup(rng, space, dims), random_vector(rng, space))


def random_subcoset(rng: random.Random, A: Coset) -> Coset | None:
    """A proper subcoset of ``A``, or None when ``A`` is a point."""
    space = A.space
    if sum(A.colour) == 0:
        return None
    idx = [i for i in range(space.k) if A.colour[i] > 0]
    shrink = rng.choice(idx)
    gens = []
    for i, (F, B) in enumerate(zip(space.fields, A.sub.bases)):
        keep = rng.randint(0, len(B) - 1) if i == shrink else rng.randint(0, len(B))
        rows = []
        while len(linalg.rref(F, rows, space.width(i))) < keep:
            coeff = tuple(F.random(rng) for _ in B)
            rows.append(linalg.vec_mat(F, coeff, B))
        gens.append(tuple(rows))
    sub = Subgroup.spanned(space, gens)
    shift = _random_in(rng, A.sub)
    return Coset.make(sub, A.rep + shift)


def _random_in(rng: random.Random, sub: Subgroup) -> Vector:
    space = sub.space
    comps = []
    for i, (F, B) in enumerate(zip(space.fields, sub.bases)):
        rows = {}
        if B:
            for t in range(int(min(SUPPORT, space.module.ranks[i]))):
                if rng.random() < 0.5:
                    rows[t] = linalg.vec_mat(F, tuple(F.random(rng) for _ in B), B)
        comps.append(rows)
    return Vector.make(space, comps)


def random_block(rng: random.Random, space: Space, max_holes: int = 2) -> Block:
    A = random_coset(rng, space)
    holes = [h for h in (random_subcoset(rng, A) for _ in range(rng.randint(0, max_holes))) if h is not None]
    return Block.make(A, holes)


def random_set(rng: random.Random, space: Space, max_blocks: int = 3) -> DefinableSet:
    return DefinableSet.of_blocks(space, [random_block(rng, space) for _ in range(rng.randint(1, max_blocks))])


# -- automorphisms of the full power --------------------------------------------

def global_affine(rng: random.Random, space: Space) -> PiecewiseAffineBijection:
    mats = tuple(random_matrix(rng, F, space.width(i)) for i, F in enumerate(space.fields))
    aff = AffineMap(space, mats, random_vector(rng, space, 0.3))
    return PiecewiseAffineBijection.global_affine(aff)


def _outside(rng: random.Random, sub: Subgroup) -> Vector:
    while True:
        v = random_vector(rng, sub.space, 0.7)
        if not sub.contains(v):
            return v


def _with_identity(space: Space, pieces) -> PiecewiseAffineBijection:
    full = DefinableSet.full(space)
    rest = Block.make(Coset.full(space), [p.domain.ambient for p in pieces])
    if rest is not None:
        pieces = list(pieces) + [AffinePiece(rest, AffineMap.identity(space), rest)]
    return PiecewiseAffineBijection(full, full, tuple(pieces))


def coset_cycle(rng: random.Random, space: Space, length: int = 2, dims=None) -> PiecewiseAffineBijection:
    """Cycle ``length`` parallel proper cosets by translations."""
    if dims is None:
        dims = tuple(rng.randint(0, space.width(i) - 1) for i in range(space.k))
    sub = random_subgroup(rng, space, dims)
    base = random_vector(rng, space)
    cosets = [Coset.make(sub, base)]
    while len(cosets) < length:
        C = Coset.make(sub, base + _outside(rng, sub))
        if all(C != D for D in cosets):
            cosets.append(C)
    pieces = []
    for j, C in enumerate(cosets):
        D = cosets[(j + 1) % length]
        pieces.append(AffinePiece.of(Block(C), AffineMap.translation(D.rep - C.rep)))
    return _with_identity(space, pieces)


def point_transposition(rng: random.Random, space: Space) -> PiecewiseAffineBijection:
    return coset_cycle(rng, space, 2, (0,) * space.k)


def coset_affine(rng: random.Random, space: Space, dims=None) -> PiecewiseAffineBijection:
    """An affine self-map of one proper coset, identity elsewhere."""
    if dims is None:
        dims = tuple(rng.randint(1, space.width(i) - 1) if space.width(i) > 1 else 0 for i in range(space.k))
    C = random_coset(rng, space, dims)
    phi = pp_iso_standard(C)
    mats = []
    for i, F in enumerate(space.fields):
        w, d = space.width(i), dims[i]
        G = random_matrix(rng, F, d) if d else ()
        I = linalg.identity(F, w)
        mats.append(tuple(G[r] + I[r][d:] if r < d else I[r] for r in range(w)))
    shift = _random_in(rng, Subgroup.standard(space, dims))
    inner = AffineMap(space, tuple(mats), shift)
    aff = phi.inverse() @ inner @ phi
    return _with_identity(space, [AffinePiece.of(Block(C), aff)])


def random_automorphism(rng: random.Random, space: Space, steps: int = 2) -> PiecewiseAffineBijection:
    """A product of ``steps`` random generators of the automorphism group of ``M^n``."""
    gens = [global_affine, point_transposition, coset_cycle, coset_affine]
    f = None
    for _ in range(steps):
        g = rng.choice(gens)(rng, space)
        f = g if f is None else compose(g, f)
    return f
