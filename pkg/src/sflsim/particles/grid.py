"""Rectilinear particle lattices."""

from __future__ import annotations

import numpy as np

from sflsim.errors import CaseAssemblyError


def grid_counts(gsize: np.ndarray, gip_dist: np.ndarray) -> np.ndarray:
    """Points per axis: ``floor(gsize/gip_dist) + 1``."""
    return (np.floor(gsize / gip_dist + 1e-9) + 1).astype(np.int64)


def generate_grid(
    gpos: np.ndarray,
    gsize: np.ndarray,
    goffset: np.ndarray,
    gip_dist: np.ndarray,
    gid: int | float = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Return lattice positions ``gpos + goffset + k*gip_dist`` and the matching gid values."""
    arrays = [np.asarray(value, dtype=np.float64).reshape(-1) for value in (gpos, gsize, goffset, gip_dist)]
    gpos, gsize, goffset, gip_dist = arrays
    if len({arr.size for arr in arrays}) != 1:
        raise CaseAssemblyError(
            "grid gpos, gsize, goffset and gip_dist must have one dimension, "
            f"got {[arr.size for arr in arrays]}"
        )
    if np.any(gip_dist <= 0):
        raise CaseAssemblyError(f"grid spacing gip_dist must be positive, got {gip_dist.tolist()}")
    counts = grid_counts(gsize, gip_dist)
    if np.any(counts <= 0):
        raise CaseAssemblyError(f"grid with gsize {gsize.tolist()} holds no particles")
    axes = [gpos[a] + goffset[a] + np.arange(counts[a]) * gip_dist[a] for a in range(gpos.size)]
    mesh = np.meshgrid(*axes, indexing="ij")
    positions = np.stack([m.reshape(-1) for m in mesh], axis=1)
    return positions, np.full(positions.shape[0], float(gid))
