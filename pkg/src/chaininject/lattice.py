"""Rotated surface-code geometry.

Data qubits sit on a ``rows x cols`` grid and are numbered row-major from 1,
so the 3x3 layout reads::

    1 2 3
    4 5 6
    7 8 9

Logical Z chains are rows and logical X chains are columns.  Weight-2 X
stabilizers live on the top and bottom edges, weight-2 Z stabilizers on the
left and right edges, and bulk plaquettes alternate in a checkerboard with
the top-left plaquette X-type.

Every stabilizer is indexed by its "virtual plaquette" corner ``(r, c)``
(0-based, ``-1`` for the boundary row/column outside the grid).  Listing X
stabilizers and then Z stabilizers, each in reading order of that corner,
reproduces the familiar 3x3 order X2X3, X1X2X4X5, X5X6X8X9, X7X8, Z1Z4,
Z2Z3Z5Z6, Z4Z5Z7Z8, Z6Z9.  Trajectories index into this order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    AdjacentRowsError,
    DuplicateRowError,
    InvalidSpecError,
    TooManyChainsError,
)

__all__ = [
    "LatticeSpec",
    "Stabilizer",
    "LogicalChain",
    "ChainSet",
    "Lattice",
    "build_lattice",
    "enumerate_z_chains",
    "validate_chain_set",
]


@dataclass(frozen=True)
class LatticeSpec:
    rows: int
    cols: int

    def __post_init__(self):
        for name in ("rows", "cols"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidSpecError(f"{name} must be an integer, got {value!r}")
            if value < 3:
                raise InvalidSpecError(f"{name} must be >= 3, got {value}")

    @classmethod
    def square(cls, d: int) -> "LatticeSpec":
        return cls(d, d)

    @classmethod
    def parse(cls, text: str) -> "LatticeSpec":
        """Parse ``"3x5"`` (rows x cols) or a bare distance ``"3"``."""
        text = text.strip().lower()
        try:
            if "x" in text:
                r, c = text.split("x")
                return cls(int(r), int(c))
            return cls.square(int(text))
        except ValueError as exc:
            if isinstance(exc, InvalidSpecError):
                raise
            raise InvalidSpecError(f"cannot parse lattice {text!r}") from exc


@dataclass(frozen=True)
class Stabilizer:
    id: int
    kind: str
    support: tuple[int, ...]
    corner: tuple[int, int] = field(compare=False, repr=False)

    @property
    def weight(self) -> int:
        return len(self.support)

    @property
    def indices(self) -> tuple[int, ...]:
        """Zero-based data-qubit indices, as used by the state engine."""
        return tuple(q - 1 for q in self.support)

    @property
    def label(self) -> str:
        return "".join(f"{self.kind}{q}" for q in self.support)


@dataclass(frozen=True)
class LogicalChain:
    row: int
    qubits: tuple[int, ...]
    adjacent_z_stabilizers: tuple[int, ...]
    # Z stabilizers tiling the strip between this row and the reference row;
    # their product is Z(row) * Z(reference row).
    sign_stabilizers: tuple[int, ...]


@dataclass(frozen=True)
class ChainSet:
    chains: tuple[LogicalChain, ...]

    @property
    def rows(self) -> tuple[int, ...]:
        return tuple(ch.row for ch in self.chains)

    def __len__(self) -> int:
        return len(self.chains)

    def __iter__(self):
        return iter(self.chains)


class Lattice:
    """Immutable rotated-surface-code layout.  Build it with :func:`build_lattice`."""

    def __init__(self, spec: LatticeSpec, stabilizers: Sequence[Stabilizer]):
        self.spec = spec
        self.stabilizers: tuple[Stabilizer, ...] = tuple(stabilizers)

    @property
    def rows(self) -> int:
        return self.spec.rows

    @property
    def cols(self) -> int:
        return self.spec.cols

    @property
    def num_data(self) -> int:
        return self.rows * self.cols

    @property
    def num_stabilizers(self) -> int:
        return len(self.stabilizers)

    @property
    def reference_row(self) -> int:
        """Row whose Z-string is the reference Z_L representative (1-based)."""
        return (self.rows + 1) // 2

    @property
    def reference_column(self) -> int:
        """Column whose X-string is the reference X_L representative (1-based)."""
        return (self.cols + 1) // 2

    def qubit(self, row: int, col: int) -> int:
        """1-based qubit number of the data qubit at 1-based (row, col)."""
        return (row - 1) * self.cols + col

    def row_qubits(self, row: int) -> tuple[int, ...]:
        return tuple(self.qubit(row, c) for c in range(1, self.cols + 1))

    def column_qubits(self, col: int) -> tuple[int, ...]:
        return tuple(self.qubit(r, col) for r in range(1, self.rows + 1))

    def logical_z(self) -> list[tuple[int, ...]]:
        return [self.row_qubits(r) for r in range(1, self.rows + 1)]

    def logical_x(self) -> list[tuple[int, ...]]:
        return [self.column_qubits(c) for c in range(1, self.cols + 1)]

    def stabilizer(self, sid: int) -> Stabilizer:
        return self.stabilizers[sid - 1]

    @cached_property
    def x_stabilizers(self) -> tuple[Stabilizer, ...]:
        return tuple(s for s in self.stabilizers if s.kind == "X")

    @cached_property
    def z_stabilizers(self) -> tuple[Stabilizer, ...]:
        return tuple(s for s in self.stabilizers if s.kind == "Z")

    @cached_property
    def z_chains(self) -> tuple[LogicalChain, ...]:
        return tuple(self._chain(r) for r in range(1, self.rows + 1))

    def _chain(self, row: int) -> LogicalChain:
        qubits = self.row_qubits(row)
        members = set(qubits)
        adjacent = tuple(s.id for s in self.z_stabilizers if members.intersection(s.support))
        lo, hi = sorted((row, self.reference_row))
        strip = tuple(
            s.id
            for s in self.z_stabilizers
            if lo != hi and all(lo <= self._row_of(q) <= hi for q in s.support)
        )
        return LogicalChain(row, qubits, adjacent, strip)

    def _row_of(self, qubit: int) -> int:
        return (qubit - 1) // self.cols + 1

    def to_text(self) -> str:
        """One stabilizer per line: ``id kind qubit-list``."""
        return "".join(
            f"{s.id} {s.kind} {','.join(map(str, s.support))}\n" for s in self.stabilizers
        )

    def __repr__(self) -> str:
        return f"Lattice({self.rows}x{self.cols})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Lattice) and self.spec == other.spec

    def __hash__(self) -> int:
        return hash(self.spec)


def _plaquette_kind(r: int, c: int) -> str:
    return "X" if (r + c) % 2 == 0 else "Z"


def build_lattice(spec: LatticeSpec | tuple[int, int]) -> Lattice:
    if not isinstance(spec, LatticeSpec):
        spec = LatticeSpec(*spec)
    R, C = spec.rows, spec.cols

    def q(r: int, c: int) -> int:
        return r * C + c + 1

    found: list[tuple[str, tuple[int, int], tuple[int, ...]]] = []
    for r in range(-1, R):
        for c in range(-1, C):
            kind = _plaquette_kind(r, c)
            cells = [(r + dr, c + dc) for dr in (0, 1) for dc in (0, 1)]
            cells = [(a, b) for a, b in cells if 0 <= a < R and 0 <= b < C]
            if len(cells) == 4:
                found.append((kind, (r, c), tuple(q(a, b) for a, b in cells)))
            elif len(cells) == 2:
                horizontal = cells[0][0] == cells[1][0]
                # X boundaries close the top/bottom edges, Z boundaries the sides.
                if (kind == "X") == horizontal:
                    found.append((kind, (r, c), tuple(q(a, b) for a, b in cells)))

    ordered = [f for f in found if f[0] == "X"] + [f for f in found if f[0] == "Z"]
    stabilizers = [
        Stabilizer(i, kind, tuple(sorted(support)), corner)
        for i, (kind, corner, support) in enumerate(ordered, start=1)
    ]
    if len(stabilizers) != R * C - 1:
        raise AssertionError(f"layout produced {len(stabilizers)} stabilizers for {R}x{C}")
    return Lattice(spec, stabilizers)


def enumerate_z_chains(lattice: Lattice) -> list[LogicalChain]:
    return list(lattice.z_chains)


def max_chains(rows: int) -> int:
    return math.ceil(rows / 2)


def validate_chain_set(lattice: Lattice, rows: Iterable[int]) -> ChainSet:
    """Check a selection of injection rows and return it as a :class:`ChainSet`.

    Rows are 1-based.  Selected rows must be distinct, pairwise non-adjacent
    and no more than ``ceil(rows / 2)`` in number.
    """
    rows = list(rows)
    for r in rows:
        if not isinstance(r, int) or not 1 <= r <= lattice.rows:
            raise InvalidSpecError(f"row {r!r} outside 1..{lattice.rows}")
    if len(set(rows)) != len(rows):
        raise DuplicateRowError(f"duplicate rows in {rows}")
    if not rows:
        raise InvalidSpecError("at least one chain row is required")
    limit = max_chains(lattice.rows)
    if len(rows) > limit:
        raise TooManyChainsError(f"{len(rows)} chains exceed the limit of {limit}")
    ordered = sorted(rows)
    for a, b in zip(ordered, ordered[1:]):
        if b - a < 2:
            raise AdjacentRowsError(f"rows {a} and {b} are adjacent")
    return ChainSet(tuple(lattice.z_chains[r - 1] for r in ordered))
