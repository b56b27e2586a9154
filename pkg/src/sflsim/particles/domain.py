"""Axis-aligned box domain with per-axis boundary types."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sflsim.errors import CaseAssemblyError

PERIODIC = "periodic"
SYMMETRIC = "symmetric"
CUTOFF = "cutoff"

BOUNDARY_ALIASES = {
    "periodic": PERIODIC,
    "1": PERIODIC,
    "symmetric": SYMMETRIC,
    "2": SYMMETRIC,
    "cutoff": CUTOFF,
    "cut-off": CUTOFF,
    "0": CUTOFF,
}


def parse_boundary(text: str) -> tuple[str, ...]:
    """Split a ``a|b|c`` boundary spec into canonical per-axis names."""
    parts = [part.strip().lower() for part in str(text).split("|")]
    resolved = []
    for part in parts:
        if part.endswith(".0") and part[:-2] in BOUNDARY_ALIASES:
            part = part[:-2]
        if part not in BOUNDARY_ALIASES:
            allowed = ", ".join(sorted(BOUNDARY_ALIASES))
            raise CaseAssemblyError(f"unknown boundary type '{part}'; expected one of: {allowed}")
        resolved.append(BOUNDARY_ALIASES[part])
    return tuple(resolved)


@dataclass(frozen=True, eq=False)
class Domain:
    """Box spanning ``minimum*cell_size`` to ``maximum*cell_size``; min/max count cells."""

    cell_size: np.ndarray
    minimum: np.ndarray
    maximum: np.ndarray
    boundary: tuple[str, ...]

    def __post_init__(self) -> None:
        for name in ("cell_size", "minimum", "maximum"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).reshape(-1).copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        dims = {self.cell_size.size, self.minimum.size, self.maximum.size, len(self.boundary)}
        if len(dims) != 1:
            raise CaseAssemblyError(
                "domain cell_size, minimum, maximum and boundary must have one dimension, "
                f"got {self.cell_size.size}, {self.minimum.size}, {self.maximum.size}, {len(self.boundary)}"
            )
        if not 1 <= self.dimension <= 3:
            raise CaseAssemblyError(f"domain dimension must be 1, 2 or 3, got {self.dimension}")
        if np.any(self.cell_size <= 0):
            raise CaseAssemblyError(f"domain cell_size must be positive, got {self.cell_size.tolist()}")
        if np.any(self.maximum <= self.minimum):
            raise CaseAssemblyError(
                f"domain maximum must exceed minimum per axis, got {self.minimum.tolist()} "
                f"and {self.maximum.tolist()}"
            )
        unknown = [b for b in self.boundary if b not in (PERIODIC, SYMMETRIC, CUTOFF)]
        if unknown:
            raise CaseAssemblyError(f"unknown boundary types: {unknown}")
        spans = self.maximum - self.minimum
        ragged = [
            axis
            for axis in range(self.dimension)
            if self.boundary[axis] == PERIODIC and abs(spans[axis] - round(spans[axis])) >= 1e-9
        ]
        if ragged:
            raise CaseAssemblyError(f"periodic axes {ragged} must span a whole number of cells")

    @property
    def dimension(self) -> int:
        return int(self.cell_size.size)

    @property
    def lower(self) -> np.ndarray:
        return self.minimum * self.cell_size

    @property
    def upper(self) -> np.ndarray:
        return self.maximum * self.cell_size

    @property
    def extent(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def cell_counts(self) -> np.ndarray:
        spans = self.maximum - self.minimum
        return np.array(
            [int(round(span)) if abs(span - round(span)) < 1e-9 else math.ceil(span) for span in spans],
            dtype=np.int64,
        )

    @property
    def min_cell_size(self) -> float:
        return float(self.cell_size.min())

    def axes(self, kind: str) -> np.ndarray:
        return np.array([b == kind for b in self.boundary], dtype=bool)

    def describe(self) -> str:
        return (
            f"dimension={self.dimension} cell_size={self.cell_size.tolist()} "
            f"minimum={self.minimum.tolist()} maximum={self.maximum.tolist()} boundary={'|'.join(self.boundary)}"
        )
