"""Polynomial matrices and free-module elements."""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

from .rationals import QQ
from .ring import Polynomial, VariableSet


class FreeModuleElement:
    """Element of P^r: a fixed-length tuple of polynomials."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[Polynomial]):
        self.components = tuple(components)

    @property
    def rank(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return all(not c for c in self.components)

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeModuleElement) and self.components == other.components

    def __add__(self, other: "FreeModuleElement") -> "FreeModuleElement":
        return FreeModuleElement([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "FreeModuleElement") -> "FreeModuleElement":
        return FreeModuleElement([a - b for a, b in zip(self.components, other.components)])

    def __mul__(self, f: Polynomial) -> "FreeModuleElement":
        return FreeModuleElement([c * f for c in self.components])

    def scale(self, c) -> "FreeModuleElement":
        return FreeModuleElement([p.scale(c) for p in self.components])

    def __repr__(self) -> str:
        from .ring import poly_print

        return "(" + ", ".join(poly_print(c) for c in self.components) + ")"


class PolyMatrix:
    """Immutable matrix of polynomials over one variable set."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: VariableSet, entries: Sequence[Sequence[Polynomial]]):
        self.ring = ring
        self.entries = tuple(tuple(row) for row in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("ragged matrix")

    @staticmethod
    def zero(ring: VariableSet, rows: int, cols: int) -> "PolyMatrix":
        z = Polynomial.zero(ring)
        return PolyMatrix(ring, [[z] * cols for _ in range(rows)])

    @staticmethod
    def row_vector(ring: VariableSet, polys: Iterable[Polynomial]) -> "PolyMatrix":
        return PolyMatrix(ring, [list(polys)])

    @staticmethod
    def identity(ring: VariableSet, n: int) -> "PolyMatrix":
        one = Polynomial.constant(ring, 1)
        z = Polynomial.zero(ring)
        return PolyMatrix(ring, [[one if i == j else z for j in range(n)] for i in range(n)])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyMatrix)
            and self.ring == other.ring
            and self.entries == other.entries
        )

    def is_zero(self) -> bool:
        return all(not e for row in self.entries for e in row)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._same_shape(other)
        return PolyMatrix(
            self.ring,
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
        )

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._same_shape(other)
        return PolyMatrix(
            self.ring,
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
        )

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(self.ring, [[-e for e in row] for row in self.entries])

    def scale(self, c) -> "PolyMatrix":
        return PolyMatrix(self.ring, [[e.scale(c) for e in row] for row in self.entries])

    def scale_poly(self, f: Polynomial) -> "PolyMatrix":
        return PolyMatrix(self.ring, [[e * f for e in row] for row in self.entries])

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        return matrix_mul(self, other)

    def map(self, fn: Callable[[Polynomial], Polynomial]) -> "PolyMatrix":
        return PolyMatrix(self.ring, [[fn(e) for e in row] for row in self.entries])

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.ring, list(zip(*self.entries)))

    def row(self, i: int) -> FreeModuleElement:
        return FreeModuleElement(self.entries[i])

    def column(self, j: int) -> FreeModuleElement:
        return FreeModuleElement([self.entries[i][j] for i in range(self.rows)])

    def _same_shape(self, other: "PolyMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def __repr__(self) -> str:
        return f"PolyMatrix({self.rows}x{self.cols} over {list(self.ring.names)})"


def matrix_mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """Exact matrix product; dimensions must agree."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.rows}x{a.cols} times {b.rows}x{b.cols}")
    if a.ring != b.ring:
        raise ValueError("matrices over different variable sets")
    bt = list(zip(*b.entries))
    out = []
    for i in range(a.rows):
        arow = a.entries[i]
        out_row = []
        for j in range(b.cols):
            bcol = bt[j]
            acc = Polynomial.zero(a.ring)
            for x, y in zip(arow, bcol):
                if x and y:
                    acc = acc + x * y
            out_row.append(acc)
        out.append(out_row)
    return PolyMatrix(a.ring, out)


def scalar_matrix_from_rows(ring: VariableSet, rows) -> PolyMatrix:
    """Build a constant PolyMatrix from a dense rational matrix."""
    return PolyMatrix(
        ring, [[Polynomial.constant(ring, QQ(c)) for c in row] for row in rows]
    )
