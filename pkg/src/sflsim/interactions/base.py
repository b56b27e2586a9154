"""Shared machinery for pairwise interaction operators.

An operator evaluates its operands once per solve over all particles, gathers
the neighbor pairs of the requested particle block into a `PairBatch`, asks
its pair rule for per-pair contributions and sums them per particle. The sum
runs over pairs in their fixed CSR order, so the result does not depend on
how particles are split between worker threads.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from sflsim.core.tensor import Tensor
from sflsim.errors import EvaluationError, TensorShapeError
from sflsim.kernels import WendlandKernel, make_kernel
from sflsim.sfl.context import EvalContext
from sflsim.sfl.functions import FINITE, INTERACTION_OP, FunctionSpec, Impl, register
from sflsim.sfl.keywords import decode_kernel_keyword
from sflsim.sfl.nodes import FunctionCall, KernelKeywordNode


@dataclass(frozen=True, eq=False)
class PairBatch:
    """Neighbor pairs of one particle block; ``local`` maps each pair to its row in the block."""

    i: np.ndarray
    j: np.ndarray
    rel: np.ndarray
    distance: np.ndarray
    guide: np.ndarray
    mirrored: np.ndarray
    local: np.ndarray
    block_size: int
    cell_size: np.ndarray

    def __len__(self) -> int:
        return int(self.i.size)

    @property
    def dimension(self) -> int:
        return int(self.cell_size.size)

    def at_i(self, values: np.ndarray) -> np.ndarray:
        return values[self.i]

    def at_j(self, values: np.ndarray, *, vector: bool = False) -> np.ndarray:
        """Operand values of the (possibly mirrored) neighbor; `vector` marks d x 1 vector operands."""
        return mirror(values[self.j], self.guide, vector=vector)

    def unit(self) -> np.ndarray:
        """Unit vectors ``rel/|rel|`` as (P, d, 1); zero for coincident pairs."""
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(self.distance > 0.0, 1.0 / self.distance, 0.0)
        return (self.rel * scale[:, None])[:, :, None]

    def rel3(self) -> np.ndarray:
        return self.rel[:, :, None]

    def select(self, mask: np.ndarray) -> PairBatch:
        return PairBatch(
            i=self.i[mask],
            j=self.j[mask],
            rel=self.rel[mask],
            distance=self.distance[mask],
            guide=self.guide[mask],
            mirrored=self.mirrored[mask],
            local=self.local[mask],
            block_size=self.block_size,
            cell_size=self.cell_size,
        )


def mirror(values: np.ndarray, guide: np.ndarray, *, vector: bool = False) -> np.ndarray:
    """Apply per-axis reflection signs to vector (``g*v``) or matrix (``g g^T * M``) values.

    Operands flagged with `vector` are always reflected. Otherwise d x 1 and
    d x d values are taken as vectors and matrices only for d > 1, so a 1x1
    value in a 1D domain stays a scalar.
    """
    if values.shape[0] == 0:
        return values
    d = guide.shape[1]
    rows, cols = values.shape[1], values.shape[2]
    signs = guide.astype(np.float64)
    if vector or (d > 1 and rows == d and cols == 1):
        return values * signs[:, :, None]
    if d > 1 and rows == d and cols == d:
        return values * (signs[:, :, None] * signs[:, None, :])
    return values


def pair_batch(ctx: EvalContext, idx: np.ndarray) -> PairBatch:
    """Gather the candidate pairs of the particles in `idx` (ascending) in CSR order."""
    pairs = ctx.neighbors()
    assert ctx.system is not None
    positions = pairs.span(idx)
    sizes = pairs.offsets[idx + 1] - pairs.offsets[idx]
    return PairBatch(
        i=pairs.i[positions],
        j=pairs.j[positions],
        rel=pairs.rel[positions],
        distance=pairs.distance[positions],
        guide=pairs.guide[positions],
        mirrored=pairs.mirrored[positions],
        local=np.repeat(np.arange(idx.size), sizes),
        block_size=int(idx.size),
        cell_size=ctx.system.domain.cell_size,
    )


def sum_pairs(batch: PairBatch, contributions: np.ndarray) -> np.ndarray:
    """Sum (P, r, c) contributions into (block, r, c) rows in pair order."""
    out = np.zeros((batch.block_size, *contributions.shape[1:]))
    if len(batch) == 0:
        return out
    starts = np.flatnonzero(np.r_[True, batch.local[1:] != batch.local[:-1]])
    out[batch.local[starts]] = np.add.reduceat(contributions, starts, axis=0)
    return out


def interact(ctx: EvalContext, idx: np.ndarray, rule: Callable[[PairBatch], np.ndarray]) -> Tensor:
    """Sum ``rule(batch)`` contributions over the neighbor pairs of each particle in `idx`."""
    batch = pair_batch(ctx, idx)
    return Tensor.wrap(sum_pairs(batch, rule(batch)))


def operand(ctx: EvalContext, node: FunctionCall, k: int) -> np.ndarray:
    """Operand `k` over all particles as a (N, r, c) array, evaluated once per solve."""
    arg = node.args[k]
    return ctx.full(arg, lambda ix: arg.evaluate(ctx, ix)).data


def scalar_operand(ctx: EvalContext, node: FunctionCall, k: int, what: str) -> np.ndarray:
    values = operand(ctx, node, k)
    if values.shape[1:] != (1, 1):
        raise TensorShapeError(
            f"{node.name} needs a scalar {what} operand, got shape {values.shape[1]}x{values.shape[2]}"
        )
    return values


def vector_operand(ctx: EvalContext, node: FunctionCall, k: int, what: str) -> np.ndarray:
    assert ctx.system is not None
    values = operand(ctx, node, k)
    if values.shape[1:] != (ctx.system.dimension, 1):
        raise TensorShapeError(
            f"{node.name} needs a {ctx.system.dimension}x1 vector {what} operand, "
            f"got shape {values.shape[1]}x{values.shape[2]}"
        )
    return values


def uniform_value(ctx: EvalContext, node: FunctionCall, k: int, what: str) -> float:
    """Operand `k` as one scalar shared by all particles (e.g. an influence radius)."""
    value = node.args[k].evaluate(ctx, ctx.active_indices[:1])
    if not value.is_scalar or value.count != 1:
        raise TensorShapeError(f"{node.name} needs a uniform scalar {what} operand")
    return value.item()


def influence_radius(ctx: EvalContext, node: FunctionCall, k: int) -> float:
    radius = uniform_value(ctx, node, k, "radius")
    if not radius > 0:
        raise EvaluationError(f"{node.name} influence radius must be positive, got {radius!r}")
    assert ctx.system is not None
    cell = ctx.system.domain.min_cell_size
    if radius > cell * (1.0 + 1e-12):
        ctx.warn_once(
            node,
            "radius-exceeds-cell",
            f"{node.name} radius {radius!r} exceeds the smallest cell size {cell!r}; far neighbors are ignored",
        )
    return radius


def kernel_operand(ctx: EvalContext, node: FunctionCall, k: int, radius: float) -> WendlandKernel:
    arg = node.args[k]
    if not isinstance(arg, KernelKeywordNode):
        raise EvaluationError(f"{node.name} operand {k + 1} must be a kernel keyword, got '{arg.to_sfl()}'")
    return make_kernel(decode_kernel_keyword(arg.raw), radius)


def warn_coincident(ctx: EvalContext, node: FunctionCall, batch: PairBatch) -> np.ndarray:
    """Mask of pairs with positive distance; coincident distinct particles are counted."""
    separated = batch.distance > 0.0
    clash = ~separated & (batch.i != batch.j)
    if clash.any():
        k = int(np.flatnonzero(clash)[0])
        ctx.diagnostics.warn(
            "coincident-pair",
            f"{node.name} skipped coincident particles {int(batch.i[k])} and {int(batch.j[k])}",
            int(clash.sum()),
        )
    return separated


def register_interaction(
    name: str,
    impl: Impl,
    min_args: int,
    max_args: int | None = None,
    *,
    kernel_operand: int | None = None,
    radius_operand: int | None = None,
    influence: str = FINITE,
    summary: str = "",
) -> FunctionSpec:
    """Add an interaction operator to the SFL function table."""
    return register(
        FunctionSpec(
            name=name,
            kind=INTERACTION_OP,
            min_args=min_args,
            max_args=max_args if max_args is not None else min_args,
            impl=impl,
            kernel_operand=kernel_operand,
            radius_operand=radius_operand,
            influence=influence,
            summary=summary,
        )
    )
