"""Definable bijections as finitely many affine pieces on disjoint blocks."""
from __future__ import annotations

from dataclasses import dataclass

from .defsets import Block, DefinableSet, dim_of, normalize
from .errors import DescriptorMismatch, InvalidMap, ShapeError, UnsupportedDecomposition
from .modules import Space, Vector
from .ppsets import AffineMap, Coset, Subgroup
from .rings import RingDescriptor


@dataclass(frozen=True)
class AffinePiece:
    """``x -> x @ A + shift`` restricted to ``domain``; ``image`` is kept symbolically."""

    domain: Block
    aff: AffineMap
    image: Block

    @classmethod
    def of(cls, domain: Block, aff: AffineMap) -> "AffinePiece":
        if domain is None:
            raise InvalidMap("piece with an empty domain")
        if domain.space != aff.space:
            raise DescriptorMismatch("piece domain and map live in different powers")
        return cls(domain, aff, domain.image(aff))

    @classmethod
    def from_points(cls, domain: Block, d1: Vector, mats, d2: Vector) -> "AffinePiece":
        """The piece ``x -> (x - d1) @ A + d2``."""
        return cls.of(domain, AffineMap.from_points(d1, mats, d2))

    def inverse(self) -> "AffinePiece":
        return AffinePiece(self.image, self.aff.inverse(), self.domain)

    def to_json(self):
        return {"domain": self.domain.to_json(), "map": self.aff.to_json()}


@dataclass(frozen=True)
class PiecewiseAffineBijection:
    source: DefinableSet
    target: DefinableSet
    pieces: tuple

    @classmethod
    def make(cls, source: DefinableSet, target: DefinableSet, pieces, check: bool = True):
        f = cls(source, target, tuple(pieces))
        if check:
            problems = validate(f)
            if problems:
                raise InvalidMap("; ".join(problems))
        return f

    @classmethod
    def identity(cls, D: DefinableSet) -> "PiecewiseAffineBijection":
        ident = AffineMap.identity(D.space)
        return cls(D, D, tuple(AffinePiece(b, ident, b) for b in D.blocks))

    @classmethod
    def global_affine(cls, aff: AffineMap) -> "PiecewiseAffineBijection":
        D = DefinableSet.full(aff.space)
        return cls(D, D, (AffinePiece.of(D.blocks[0], aff),))

    @property
    def space(self) -> Space:
        return self.source.space

    @property
    def is_automorphism(self) -> bool:
        return self.source.equals(self.target)

    def apply(self, x: Vector) -> Vector:
        for p in self.pieces:
            if p.domain.contains(x):
                return p.aff.apply(x)
        raise InvalidMap(f"point {x.format()} outside the source")

    def __call__(self, x: Vector) -> Vector:
        return self.apply(x)

    def __matmul__(self, other: "PiecewiseAffineBijection") -> "PiecewiseAffineBijection":
        return compose(self, other)

    def translate(self, fn, space: Space) -> "PiecewiseAffineBijection":
        """Re-read every coset, vector and affine part through ``fn``."""

        def block(b: Block) -> Block:
            return Block(fn(b.ambient), tuple(fn(h) for h in b.holes))

        pieces = tuple(AffinePiece(block(p.domain), fn(p.aff), block(p.image)) for p in self.pieces)
        src = DefinableSet(space, tuple(block(b) for b in self.source.blocks))
        tgt = DefinableSet(space, tuple(block(b) for b in self.target.blocks))
        return PiecewiseAffineBijection(src, tgt, pieces)

    def to_json(self):
        return {"source": self.source.to_json(), "target": self.target.to_json(), "pieces": [p.to_json() for p in self.pieces]}


def _pairwise_disjoint(blocks) -> bool:
    return all(a.intersect(b) is None for i, a in enumerate(blocks) for b in blocks[i + 1 :])


def validate(f: PiecewiseAffineBijection) -> list:
    """All violations of the bijection contract; empty when ``f`` is valid."""
    out = []
    space = f.source.space
    if f.target.space != space:
        out.append("source and target in different powers")
        return out
    for j, p in enumerate(f.pieces):
        if p.domain.space != space or p.aff.space != space:
            out.append(f"piece {j} lives in another power")
            return out
        if p.domain.image(p.aff) != p.image:
            out.append(f"piece {j} has a stale image")
        try:
            AffineMap.linear(space, p.aff.mats)
        except Exception:
            out.append(f"piece {j} has a singular linear part")
    doms = [p.domain for p in f.pieces]
    imgs = [p.image for p in f.pieces]
    if not _pairwise_disjoint(doms):
        out.append("domains overlap")
    if not _pairwise_disjoint(imgs):
        out.append("images overlap")
    if not DefinableSet(space, tuple(doms)).equals(f.source):
        out.append("domains do not cover the source exactly")
    if not DefinableSet(space, tuple(imgs)).equals(f.target):
        out.append("images do not cover the target exactly")
    return out


def compose(f: PiecewiseAffineBijection, g: PiecewiseAffineBijection) -> PiecewiseAffineBijection:
    """``f o g`` (apply ``g`` first)."""
    if g.target.space != f.source.space:
        raise DescriptorMismatch("composition across different powers")
    pieces = []
    for p in g.pieces:
        for q in f.pieces:
            mid = p.image.intersect(q.domain)
            if mid is None:
                continue
            dom = mid.image(p.aff.inverse())
            pieces.append(AffinePiece(dom, q.aff @ p.aff, mid.image(q.aff)))
    return PiecewiseAffineBijection(g.source, f.target, tuple(pieces))


def invert(f: PiecewiseAffineBijection) -> PiecewiseAffineBijection:
    return PiecewiseAffineBijection(f.target, f.source, tuple(p.inverse() for p in f.pieces))


def _require_auto(f: PiecewiseAffineBijection):
    if not f.is_automorphism:
        raise InvalidMap("source and target differ; not an automorphism")


def support(f: PiecewiseAffineBijection) -> DefinableSet:
    _require_auto(f)
    return support_unchecked(f)


def support_unchecked(f: PiecewiseAffineBijection) -> DefinableSet:
    blocks = []
    for p in f.pieces:
        fixed = p.aff.fixed_set()
        b = p.domain if fixed is None else p.domain.minus_coset(fixed)
        if b is not None:
            blocks.append(b)
    return DefinableSet(f.space, tuple(blocks))


def dim_of_map(f: PiecewiseAffineBijection):
    return dim_of(support(f))


def is_identity(f: PiecewiseAffineBijection) -> bool:
    return support_unchecked(f).is_empty()


def extend_by_identity(f: PiecewiseAffineBijection, ambient: DefinableSet) -> PiecewiseAffineBijection:
    _require_auto(f)
    if ambient.space != f.space:
        raise DescriptorMismatch("ambient set in another power")
    rest = ambient.difference(f.source)
    if not f.source.le(ambient):
        raise InvalidMap("the map's source is not contained in the ambient set")
    extra = PiecewiseAffineBijection.identity(rest)
    return PiecewiseAffineBijection(ambient, ambient, f.pieces + extra.pieces)


def extend_to_full(f: PiecewiseAffineBijection) -> PiecewiseAffineBijection:
    return extend_by_identity(f, DefinableSet.full(f.space))


def embed(f: PiecewiseAffineBijection, n: int) -> PiecewiseAffineBijection:
    """``f`` on ``E x {0}`` inside ``M^n`` (zero padding of every coordinate past the old power)."""
    if n == f.space.n:
        return f
    pieces = tuple(AffinePiece(p.domain.pad(n), p.aff.pad(n), p.image.pad(n)) for p in f.pieces)
    return PiecewiseAffineBijection(f.source.pad(n), f.target.pad(n), pieces)


def stabilize(f: PiecewiseAffineBijection, n: int) -> PiecewiseAffineBijection:
    """``f x id`` on ``E x M^(n - old power)``."""
    r = n - f.space.n
    if r < 0:
        raise ShapeError("cannot stabilize to a smaller power")
    if r == 0:
        return f
    full = Block(Coset.full(f.space.power(r)))
    pieces = tuple(AffinePiece(p.domain.product(full), p.aff.pad(n), p.image.product(full)) for p in f.pieces)
    src = DefinableSet(f.space.power(n), tuple(b.product(full) for b in f.source.blocks))
    tgt = DefinableSet(f.space.power(n), tuple(b.product(full) for b in f.target.blocks))
    return PiecewiseAffineBijection(src, tgt, pieces)


def conjugate(g: PiecewiseAffineBijection, f: PiecewiseAffineBijection) -> PiecewiseAffineBijection:
    """``g o f o g^-1``."""
    return compose(g, compose(f, invert(g)))


# -- componentwise structure over product rings ---------------------------

def component_space(space: Space, i: int) -> Space:
    return Space(space.module.component(i), space.n)


def project_coset(C: Coset, i: int) -> Coset:
    sp = component_space(C.space, i)
    return Coset(Subgroup(sp, (C.sub.bases[i],)), Vector(sp, (C.rep.comps[i],)))


def project_block(b: Block, i: int) -> Block | None:
    """``pi_i(b)``: a hole only survives projection when it is full in the other components."""
    A = b.ambient
    others = [j for j in range(A.space.k) if j != i]
    holes = [
        project_coset(h, i)
        for h in b.holes
        if all(h.sub.bases[j] == A.sub.bases[j] and h.rep.comps[j] == A.rep.comps[j] for j in others)
    ]
    return Block.make(project_coset(A, i), holes)


def project_affine(f: AffineMap, i: int) -> AffineMap:
    sp = component_space(f.space, i)
    return AffineMap(sp, (f.mats[i],), Vector(sp, (f.shift.comps[i],)))


def join_cosets(space: Space, parts) -> Coset:
    return Coset(Subgroup(space, tuple(c.sub.bases[0] for c in parts)), Vector(space, tuple(c.rep.comps[0] for c in parts)))


def join_blocks(space: Space, parts) -> Block:
    ambients = [b.ambient for b in parts]
    holes = []
    for i, b in enumerate(parts):
        for h in b.holes:
            holes.append(join_cosets(space, ambients[:i] + [h] + ambients[i + 1 :]))
    return Block.make(join_cosets(space, ambients), holes)


def join_affine(space: Space, parts) -> AffineMap:
    return AffineMap(space, tuple(a.mats[0] for a in parts), Vector(space, tuple(a.shift.comps[0] for a in parts)))


def product_space(ring: RingDescriptor, spaces) -> Space:
    from .modules import ModuleDescriptor

    ns = {s.n for s in spaces}
    if len(ns) != 1:
        raise ShapeError("component maps must share the same power")
    ranks = tuple(r for s in spaces for r in s.module.ranks)
    return Space(ModuleDescriptor(ring, ranks), ns.pop())


def component_product(ring: RingDescriptor, maps) -> PiecewiseAffineBijection:
    """``f_1 x ... x f_k`` over ``S = S_1 x ... x S_k`` from single-component maps."""
    space = product_space(ring, [f.space for f in maps])

    def sets(attr):
        out = [()]
        for f in maps:
            out = [acc + (b,) for acc in out for b in getattr(f, attr).blocks]
        return DefinableSet(space, tuple(join_blocks(space, bs) for bs in out))

    pieces = [()]
    for f in maps:
        pieces = [acc + (p,) for acc in pieces for p in f.pieces]
    out = []
    for ps in pieces:
        dom = join_blocks(space, [p.domain for p in ps])
        aff = join_affine(space, [p.aff for p in ps])
        out.append(AffinePiece(dom, aff, join_blocks(space, [p.image for p in ps])))
    return PiecewiseAffineBijection(sets("source"), sets("target"), tuple(out))


def factor_components(f: PiecewiseAffineBijection) -> list:
    """Split an automorphism of ``M^n`` into per-component automorphisms.

    Raises :class:`UnsupportedDecomposition` unless ``f`` is exactly the
    product of the recovered component maps.
    """
    f = extend_to_full(f)
    space = f.space
    if space.k == 1:
        return [f]
    comps = []
    for i in range(space.k):
        sp = component_space(space, i)
        full = DefinableSet.full(sp)
        covered = DefinableSet.empty(sp)
        pieces = []
        for p in f.pieces:
            b = project_block(p.domain, i)
            if b is None:
                continue
            aff = project_affine(p.aff, i)
            for nb in DefinableSet(sp, (b,)).difference(covered).blocks:
                pieces.append(AffinePiece.of(nb, aff))
            covered = covered.union(DefinableSet(sp, (b,)))
        try:
            comps.append(PiecewiseAffineBijection.make(full, full, pieces))
        except InvalidMap as e:
            raise UnsupportedDecomposition(f"component {i} does not split off: {e}") from e
    prod = component_product(space.module.ring, comps)
    if not is_identity(compose(invert(prod), f)):
        raise UnsupportedDecomposition("the map is not a product of per-component automorphisms")
    return comps


def normalize_map(f: PiecewiseAffineBijection) -> PiecewiseAffineBijection:
    """Same map with normalized source/target descriptions."""
    return PiecewiseAffineBijection(normalize(f.space, f.source.blocks), normalize(f.space, f.target.blocks), f.pieces)
