"""Finite measurable partitions and finite-valued observation functions.

Cells are unions of axis-aligned half-open boxes.  This covers interval
unions on the circle [0,1), dyadic rectangles on the unit square, and
position-box x angle-sector cells for billiard phase spaces, while keeping
cell measures exactly computable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Box",
    "PhaseSpace",
    "Partition",
    "ObservationFunction",
    "refine",
    "observation_from_partition",
    "interval_partition",
    "grid_partition",
]


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class Box:
    """Half-open axis-aligned box prod_i [lo_i, hi_i)."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise PartitionError("box bounds have mismatched dimensions")
        object.__setattr__(self, "lo", tuple(float(x) for x in self.lo))
        object.__setattr__(self, "hi", tuple(float(x) for x in self.hi))

    @property
    def dim(self):
        return len(self.lo)

    def volume(self):
        v = 1.0
        for a, b in zip(self.lo, self.hi):
            v *= max(b - a, 0.0)
        return v

    def contains(self, point):
        return all(a <= x < b for x, a, b in zip(point, self.lo, self.hi))

    def intersect(self, other):
        lo = tuple(max(a, c) for a, c in zip(self.lo, other.lo))
        hi = tuple(min(b, d) for b, d in zip(self.hi, other.hi))
        if any(a >= b for a, b in zip(lo, hi)):
            return None
        return Box(lo, hi)


@dataclass(frozen=True)
class PhaseSpace:
    """Named rectangular domain; coordinates flagged periodic wrap around."""

    name: str
    domain: Box
    periodic: tuple = ()

    @property
    def dim(self):
        return self.domain.dim

    def wrap(self, point):
        point = list(point)
        for i in self.periodic:
            lo, hi = self.domain.lo[i], self.domain.hi[i]
            point[i] = lo + (point[i] - lo) % (hi - lo)
        return tuple(point)


UNIT_INTERVAL = PhaseSpace("unit_interval", Box((0.0,), (1.0,)), periodic=(0,))
UNIT_SQUARE = PhaseSpace("unit_square", Box((0.0, 0.0), (1.0, 1.0)))


@dataclass(frozen=True)
class Partition:
    """Finite partition of a phase space into positive-measure cells.

    Each cell is a tuple of disjoint boxes; cells are pairwise disjoint and
    jointly cover the domain up to measure zero.
    """

    space: PhaseSpace
    cells: tuple  # tuple of tuples of Box
    labels: tuple

    def __post_init__(self):
        cells = tuple(tuple(c) for c in self.cells)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(cells) < 1:
            raise PartitionError("partition needs at least one cell")
        if len(self.labels) != len(cells):
            raise PartitionError("label count does not match cell count")
        if len(set(self.labels)) != len(self.labels):
            raise PartitionError("labels must be distinct")
        for cell in cells:
            if self.cell_measure(cell) <= 0.0:
                raise PartitionError("zero-measure cell")
        total = sum(self.cell_measure(c) for c in cells)
        if abs(total - self.space.domain.volume()) > 1e-9:
            raise PartitionError(
                f"cells cover measure {total}, domain has {self.space.domain.volume()}"
            )
        # pairwise disjointness, up to measure zero
        for i in range(len(cells)):
            for j in range(i + 1, len(cells)):
                if _cells_overlap(cells[i], cells[j]):
                    raise PartitionError(
                        f"cells {self.labels[i]!r} and {self.labels[j]!r} overlap"
                    )

    @staticmethod
    def cell_measure(cell):
        return sum(b.volume() for b in cell)

    @property
    def size(self):
        return len(self.cells)

    def measures(self):
        return np.array([self.cell_measure(c) for c in self.cells])

    def cell_index(self, point):
        point = self.space.wrap(point)
        for i, cell in enumerate(self.cells):
            if any(b.contains(point) for b in cell):
                return i
        raise PartitionError(f"point {point} not covered by any cell")


def _cells_overlap(a, b, tol=1e-12):
    for ba in a:
        for bb in b:
            inter = ba.intersect(bb)
            if inter is not None and inter.volume() > tol:
                return True
    return False


def refine(a: Partition, b: Partition) -> Partition:
    """Common refinement: all positive-measure intersections of cells."""
    if a.space != b.space:
        raise PartitionError("partitions live on different phase spaces")
    cells, labels = [], []
    for la, ca in zip(a.labels, a.cells):
        for lb, cb in zip(b.labels, b.cells):
            boxes = []
            for ba in ca:
                for bb in cb:
                    inter = ba.intersect(bb)
                    if inter is not None and inter.volume() > 1e-12:
                        boxes.append(inter)
            if boxes:
                cells.append(tuple(boxes))
                labels.append(f"{la}&{lb}" if la != lb else la)
    # collapse duplicate labels from identical partitions refined with themselves
    if len(set(labels)) != len(labels):
        labels = [f"{l}#{i}" if labels.count(l) > 1 else l for i, l in enumerate(labels)]
    return Partition(a.space, tuple(cells), tuple(labels))


@dataclass(frozen=True)
class ObservationFunction:
    """Finite-valued observation: symbol of the cell containing the state."""

    partition: Partition
    symbols: tuple = field(default=None)

    def __post_init__(self):
        symbols = self.symbols if self.symbols is not None else self.partition.labels
        symbols = tuple(symbols)
        if len(symbols) != self.partition.size:
            raise PartitionError("one symbol per cell required")
        object.__setattr__(self, "symbols", symbols)

    @property
    def nontrivial(self):
        return len(self.alphabet) >= 2

    @property
    def alphabet(self):
        return tuple(dict.fromkeys(self.symbols))

    def __call__(self, point):
        return self.symbols[self.partition.cell_index(point)]


def observation_from_partition(p: Partition, labels=None) -> ObservationFunction:
    """Observation function reading off the cell label of the state."""
    return ObservationFunction(p, tuple(labels) if labels is not None else None)


def interval_partition(breaks, labels, space=UNIT_INTERVAL) -> Partition:
    """Partition of [0,1) into consecutive intervals at the given breakpoints."""
    breaks = [float(x) for x in breaks]
    cells = tuple((Box((a,), (b,)),) for a, b in zip(breaks[:-1], breaks[1:]))
    return Partition(space, cells, tuple(labels))


def grid_partition(nx, ny, space=UNIT_SQUARE, prefix="c") -> Partition:
    """nx-by-ny rectangular grid partition of a 2-d rectangular domain."""
    (x0, y0), (x1, y1) = space.domain.lo[:2], space.domain.hi[:2]
    extra_lo, extra_hi = space.domain.lo[2:], space.domain.hi[2:]
    dx, dy = (x1 - x0) / nx, (y1 - y0) / ny
    cells, labels = [], []
    for i in range(nx):
        for j in range(ny):
            lo = (x0 + i * dx, y0 + j * dy) + extra_lo
            hi = (x0 + (i + 1) * dx, y0 + (j + 1) * dy) + extra_hi
            cells.append((Box(lo, hi),))
            labels.append(f"{prefix}{i}_{j}")
    return Partition(space, tuple(cells), tuple(labels))
