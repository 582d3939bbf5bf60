"""Semisimple rings as products of matrix rings over division-ring plugins."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from . import linalg
from .errors import PluginMismatch, ShapeError, Singular
from .fields import GF, DivisionRing


@dataclass(frozen=True)
class Mat:
    """A rectangular matrix over a division ring."""

    field: DivisionRing
    rows: tuple

    @classmethod
    def of(cls, field, rows):
        rows = tuple(tuple(r) for r in rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise ShapeError("ragged matrix")
        return cls(field, rows)

    @classmethod
    def identity(cls, field, n):
        return cls(field, linalg.identity(field, n))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.field != other.field:
            raise PluginMismatch(f"{self.field} vs {other.field}")
        if self.shape[1] != other.shape[0]:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        return Mat(self.field, linalg.mat_mul(self.field, self.rows, other.rows))

    def format(self) -> str:
        return "[" + ", ".join("[" + ", ".join(self.field.format(x) for x in r) + "]" for r in self.rows) + "]"


@dataclass(frozen=True)
class UnitClass:
    """An element of R^x/[R^x, R^x] in normal form (written multiplicatively)."""

    field: DivisionRing
    value: Any

    @classmethod
    def trivial(cls, field):
        return cls(field, field.class_one)

    @classmethod
    def of_unit(cls, field, a):
        if field.is_zero(a):
            raise Singular("zero is not a unit")
        return cls(field, field.unit_class(a))

    def combine(self, other: "UnitClass") -> "UnitClass":
        if self.field != other.field:
            raise PluginMismatch(f"{self.field} vs {other.field}")
        return UnitClass(self.field, self.field.class_mul(self.value, other.value))

    def inverse(self) -> "UnitClass":
        return UnitClass(self.field, self.field.class_inv(self.value))

    @property
    def is_trivial(self) -> bool:
        return self.value == self.field.class_one

    def format(self) -> str:
        return self.field.format_class(self.value)

    def to_json(self):
        if self.field.is_commutative:
            return self.field.to_json(self.value)
        return {"nrd": str(self.value)}


def mat_invert(A: Mat) -> Mat:
    return Mat(A.field, linalg.invert(A.field, A.rows))


def dieudonne_det(A: Mat) -> UnitClass:
    return UnitClass(A.field, linalg.dieudonne_det(A.field, A.rows))


def unit_class_op(u: UnitClass, v: UnitClass, op: str):
    if u.field != v.field:
        raise PluginMismatch(f"{u.field} vs {v.field}")
    if op == "combine":
        return u.combine(v)
    if op == "equals":
        return u.value == v.value
    raise ValueError(f"unknown op {op!r}")


@dataclass(frozen=True)
class RingDescriptor:
    """S = M_{q_1}(R_1) x ... x M_{q_k}(R_k)."""

    components: tuple  # tuple[tuple[int, DivisionRing], ...]

    def __post_init__(self):
        if not self.components:
            raise ShapeError("a ring needs at least one component")
        for q, _ in self.components:
            if q < 1:
                raise ShapeError("matrix size q must be >= 1")

    @classmethod
    def of(cls, *components):
        return cls(tuple((int(q), F) for q, F in components))

    @property
    def k(self) -> int:
        return len(self.components)

    def q(self, i: int) -> int:
        return self.components[i][0]

    def field(self, i: int) -> DivisionRing:
        return self.components[i][1]

    @property
    def fields(self) -> tuple:
        return tuple(F for _, F in self.components)

    @property
    def qs(self) -> tuple:
        return tuple(q for q, _ in self.components)

    def is_excluded_component(self, i: int) -> bool:
        """|M_q(R)| == 2, where the K1 computation does not apply."""
        q, F = self.components[i]
        return q == 1 and isinstance(F, GF) and F.cardinality == 2

    def component(self, i: int) -> "RingDescriptor":
        return RingDescriptor((self.components[i],))

    def idempotent(self, i: int) -> "RingElement":
        return RingElement(
            self,
            tuple(
                linalg.identity(F, q) if j == i else tuple((F.zero,) * q for _ in range(q))
                for j, (q, F) in enumerate(self.components)
            ),
        )

    def one(self) -> "RingElement":
        return RingElement(self, tuple(linalg.identity(F, q) for q, F in self.components))

    def format(self) -> str:
        return " x ".join(f"M({q}, {F.name})" for q, F in self.components)


@dataclass(frozen=True)
class RingElement:
    ring: RingDescriptor
    blocks: tuple  # one q_i x q_i matrix per component

    def __mul__(self, other: "RingElement") -> "RingElement":
        return RingElement(
            self.ring,
            tuple(linalg.mat_mul(F, a, b) for F, a, b in zip(self.ring.fields, self.blocks, other.blocks)),
        )

    def __add__(self, other: "RingElement") -> "RingElement":
        return RingElement(
            self.ring,
            tuple(
                tuple(linalg.row_add(F, r, s) for r, s in zip(a, b))
                for F, a, b in zip(self.ring.fields, self.blocks, other.blocks)
            ),
        )

    def is_unit(self) -> bool:
        return all(
            linalg.rank(F, a, q) == q for (q, F), a in zip(self.ring.components, self.blocks)
        )


def ring_decompose(S: RingDescriptor, x: RingElement) -> tuple:
    """The components ``x * e_i``; their sum reassembles ``x``."""
    if x.ring != S:
        raise ShapeError("element does not belong to this ring")
    return tuple(x * S.idempotent(i) for i in range(S.k))
