"""Particle positions, the cell grid and boundary-aware neighbor pairs.

Pairs are enumerated over the 3^d cell stencil of every active particle and
stored in CSR order (grouped by the particle ``i``), including the self pair.
On periodic axes neighbors across the box are shifted by the box extent; on
symmetric axes particles of the wall cell are mirrored across the wall and
the pair carries ``guide = -1`` on that axis; cut-off axes have no images.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from sflsim.core.tensor import Tensor
from sflsim.errors import CaseAssemblyError
from sflsim.particles.domain import CUTOFF, PERIODIC, SYMMETRIC, Domain
from sflsim.sfl.context import Diagnostics

logger = logging.getLogger(__name__)

NeighborCallback = Callable[[Tensor, int, Tensor, Tensor], Tensor]


@dataclass(frozen=True, eq=False)
class CellGrid:
    """Cell membership in CSR form: particles of cell c are ``order[starts[c]:starts[c+1]]``."""

    counts: np.ndarray
    coords: np.ndarray
    order: np.ndarray
    starts: np.ndarray

    @property
    def cell_total(self) -> int:
        return int(np.prod(self.counts))

    def members(self, cell: int) -> np.ndarray:
        return self.order[self.starts[cell] : self.starts[cell + 1]]

    def occupancy(self) -> np.ndarray:
        return np.diff(self.starts)


@dataclass(frozen=True, eq=False)
class PairList:
    """Candidate pairs grouped by ``i``; pairs of particle p are ``offsets[p]:offsets[p+1]``."""

    i: np.ndarray
    j: np.ndarray
    rel: np.ndarray
    distance: np.ndarray
    guide: np.ndarray
    mirrored: np.ndarray
    offsets: np.ndarray

    def __len__(self) -> int:
        return int(self.i.size)

    def span(self, indices: np.ndarray) -> np.ndarray:
        """Pair positions belonging to `indices`, in CSR order."""
        starts = self.offsets[indices]
        sizes = self.offsets[indices + 1] - starts
        return np.repeat(starts - np.cumsum(sizes) + sizes, sizes) + np.arange(int(sizes.sum()))


class ParticleSystem:
    """The reserved position field ``r`` plus domain, activity flags and neighbor pairs."""

    def __init__(self, domain: Domain, positions: np.ndarray, diagnostics: Diagnostics | None = None) -> None:
        positions = np.asarray(positions, dtype=np.float64)
        if positions.ndim != 2 or positions.shape[1] != domain.dimension:
            raise CaseAssemblyError(
                f"positions must have {domain.dimension} columns to match the domain, got shape {positions.shape}"
            )
        if positions.shape[0] == 0:
            raise CaseAssemblyError("particle system has no particles")
        self.domain = domain
        self.diagnostics = diagnostics or Diagnostics()
        self.active = np.ones(positions.shape[0], dtype=bool)
        self.dirty = True
        self.rebuild_count = 0
        self.cells: CellGrid | None = None
        self._pairs: PairList | None = None
        self._positions = _readonly(positions.copy())
        self._position_tensor: Tensor | None = None

    @property
    def count(self) -> int:
        return int(self._positions.shape[0])

    @property
    def dimension(self) -> int:
        return self.domain.dimension

    @property
    def active_count(self) -> int:
        return int(self.active.sum())

    @property
    def positions(self) -> np.ndarray:
        return self._positions

    def position_tensor(self) -> Tensor:
        if self._position_tensor is None:
            self._position_tensor = Tensor.wrap(self._positions.reshape(self.count, self.dimension, 1))
        return self._position_tensor

    def set_positions(self, positions: np.ndarray) -> None:
        """Replace all positions, apply boundary shifts and mark neighbors stale."""
        positions = np.asarray(positions, dtype=np.float64).reshape(self.count, self.dimension)
        self._positions = _readonly(positions.copy())
        self._position_tensor = None
        self.apply_boundary_shift()

    def check_inside(self) -> None:
        """Raise if an active particle lies outside the box on a non-periodic axis."""
        lower, upper = self.domain.lower, self.domain.upper
        tol = 1e-12 * self.domain.extent
        closed = ~self.domain.axes(PERIODIC)
        outside = ((self._positions < lower - tol) | (self._positions > upper + tol))[:, closed]
        bad = np.flatnonzero(outside.any(axis=1) & self.active)
        if bad.size:
            first = int(bad[0])
            raise CaseAssemblyError(
                f"{bad.size} particle(s) outside the domain, first is particle {first} at "
                f"{self._positions[first].tolist()} (domain {lower.tolist()} to {upper.tolist()})"
            )

    def apply_boundary_shift(self) -> None:
        """Wrap periodic axes, clamp symmetric crossings, deactivate cut-off escapes."""
        dom = self.domain
        pos = self._positions.copy()
        for axis, kind in enumerate(dom.boundary):
            lo, hi = dom.lower[axis], dom.upper[axis]
            col = pos[:, axis]
            if kind == PERIODIC:
                wrapped = lo + np.mod(col - lo, dom.extent[axis])
                wrapped[wrapped >= hi] = lo
                pos[:, axis] = wrapped
                continue
            out = self.active & ((col < lo) | (col > hi))
            if not out.any():
                continue
            if kind == SYMMETRIC:
                self.diagnostics.warn(
                    "symmetric-crossing",
                    f"particle {int(np.flatnonzero(out)[0])} crossed a symmetric wall on axis {axis}; clamped",
                    int(out.sum()),
                )
                pos[:, axis] = np.where(out, np.clip(col, lo, hi), col)
            elif kind == CUTOFF:
                self.diagnostics.warn(
                    "cutoff-deactivated",
                    f"particle {int(np.flatnonzero(out)[0])} left the domain through a cut-off face on axis {axis}",
                    int(out.sum()),
                )
                self.active[out] = False
        self._positions = _readonly(pos)
        self._position_tensor = None
        self.dirty = True

    def build_cells(self) -> CellGrid:
        """Assign active particles to cells and enumerate candidate pairs."""
        self.check_inside()
        dom = self.domain
        counts = dom.cell_counts
        coords = np.floor((self._positions - dom.lower) / dom.cell_size).astype(np.int64)
        coords = np.clip(coords, 0, counts - 1)
        active = np.flatnonzero(self.active)
        flat = np.ravel_multi_index(tuple(coords[active].T), tuple(counts))
        order = active[np.argsort(flat, kind="stable")]
        occupancy = np.bincount(flat, minlength=int(np.prod(counts)))
        starts = np.concatenate(([0], np.cumsum(occupancy)))
        self.cells = CellGrid(counts=counts, coords=coords, order=order, starts=starts)
        self._pairs = self._enumerate_pairs(self.cells, active)
        self.dirty = False
        self.rebuild_count += 1
        logger.debug(
            "built %d cells for %d active particles, %d pairs", self.cells.cell_total, active.size, len(self._pairs)
        )
        return self.cells

    def ensure_neighbors(self) -> PairList:
        if self.dirty or self._pairs is None:
            self.build_cells()
        assert self._pairs is not None
        return self._pairs

    @property
    def pairs(self) -> PairList:
        if self._pairs is None:
            raise RuntimeError("neighbor pairs requested before build_cells")
        return self._pairs

    def _enumerate_pairs(self, cells: CellGrid, active: np.ndarray) -> PairList:
        dom = self.domain
        d = dom.dimension
        counts = cells.counts
        occupancy = cells.occupancy()
        pos = self._positions
        parts: list[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = []
        for offset in itertools.product((-1, 0, 1), repeat=d):
            target = cells.coords[active] + np.asarray(offset)
            sign = np.ones((active.size, d))
            shift = np.zeros((active.size, d))
            valid = np.ones(active.size, dtype=bool)
            for axis, kind in enumerate(dom.boundary):
                below = target[:, axis] < 0
                above = target[:, axis] >= counts[axis]
                if kind == PERIODIC:
                    target[below, axis] += counts[axis]
                    target[above, axis] -= counts[axis]
                    shift[below, axis] = -dom.extent[axis]
                    shift[above, axis] = dom.extent[axis]
                elif kind == SYMMETRIC:
                    target[below, axis] = 0
                    target[above, axis] = counts[axis] - 1
                    sign[below | above, axis] = -1.0
                    shift[below, axis] = 2.0 * dom.lower[axis]
                    shift[above, axis] = 2.0 * dom.upper[axis]
                else:
                    valid &= ~(below | above)
            source = active[valid]
            target_cells = np.ravel_multi_index(tuple(target[valid].T), tuple(counts))
            sizes = occupancy[target_cells]
            total = int(sizes.sum())
            if total == 0:
                continue
            i = np.repeat(source, sizes)
            within = np.arange(total) - np.repeat(np.cumsum(sizes) - sizes, sizes)
            j = cells.order[np.repeat(cells.starts[target_cells], sizes) + within]
            pair_sign = np.repeat(sign[valid], sizes, axis=0)
            image = pair_sign * pos[j] + np.repeat(shift[valid], sizes, axis=0)
            rel = image - pos[i]
            keep = np.all(np.abs(rel) <= dom.cell_size, axis=1)
            parts.append((i[keep], j[keep], rel[keep], pair_sign[keep]))

        if parts:
            i = np.concatenate([part[0] for part in parts])
            j = np.concatenate([part[1] for part in parts])
            rel = np.concatenate([part[2] for part in parts])
            guide = np.concatenate([part[3] for part in parts]).astype(np.int8)
        else:
            i = j = np.zeros(0, dtype=np.int64)
            rel = np.zeros((0, d))
            guide = np.zeros((0, d), dtype=np.int8)
        by_i = np.argsort(i, kind="stable")
        i, j, rel, guide = i[by_i], j[by_i], rel[by_i], guide[by_i]
        offsets = np.concatenate(([0], np.cumsum(np.bincount(i, minlength=self.count))))
        return PairList(
            i=_readonly(i),
            j=_readonly(j),
            rel=_readonly(rel),
            distance=_readonly(np.linalg.norm(rel, axis=1)),
            guide=_readonly(guide),
            mirrored=_readonly(np.any(guide < 0, axis=1)),
            offsets=_readonly(offsets),
        )

    def for_each_neighbor(self, i: int, callback: NeighborCallback) -> Tensor:
        """Sum ``callback(rel_pos, j, cell_size, guide)`` over the candidate pairs of particle `i`."""
        pairs = self.ensure_neighbors()
        cell_size = Tensor.vector(self.domain.cell_size)
        total: Tensor | None = None
        for k in range(int(pairs.offsets[i]), int(pairs.offsets[i + 1])):
            value = callback(
                Tensor.vector(pairs.rel[k]), int(pairs.j[k]), cell_size, Tensor.vector(pairs.guide[k])
            )
            total = value if total is None else total + value
        return total if total is not None else Tensor.scalar(0.0)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr
