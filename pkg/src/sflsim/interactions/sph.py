"""SPH operators: sampling, divergence, symmetric gradient, Laplacian and artificial viscosity.

All share the operand list ``(A, mass, rho, kernel keyword, radius)``. Pair
vectors are ``rel = r_j - r_i`` and ``grad W`` is the gradient with respect to
``r_i`` (it points toward ``j``). ``V_j = m_j / rho_j`` is the particle volume.

    sph_S(A)   = sum_j A_j V_j W_ij                      (self term included)
    sph_D00(A) = sum_j (A_j - A_i) . grad W_ij V_j
    sph_G11(A) = rho_i sum_j (A_i/rho_i^2 + A_j/rho_j^2) m_j grad W_ij
    sph_L0(A)  = sum_j 2 (A_j - A_i) (rel . grad W_ij) / |rel|^2 V_j
    sph_A(v)   = sum_j pi_ij m_j grad W_ij,
                 pi_ij = (v_ji . rel) / (rho_i |rel|^2) if v_ji . rel < 0 else 0

Pairs at or beyond the radius contribute nothing; derivative operators also
skip coincident pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sflsim.core.tensor import Tensor
from sflsim.errors import EvaluationError
from sflsim.interactions.base import (
    PairBatch,
    influence_radius,
    interact,
    kernel_operand,
    operand,
    register_interaction,
    scalar_operand,
    vector_operand,
    warn_coincident,
)
from sflsim.kernels import WendlandKernel
from sflsim.sfl.context import EvalContext
from sflsim.sfl.nodes import FunctionCall

KERNEL_OPERAND = 3
RADIUS_OPERAND = 4


@dataclass(frozen=True, eq=False)
class SphOperands:
    name: str
    kernel: WendlandKernel
    radius: float
    mass: np.ndarray
    rho: np.ndarray

    def inside(self, batch: PairBatch) -> np.ndarray:
        """(P, 1, 1) mask of pairs closer than the radius."""
        return (batch.distance < self.radius)[:, None, None]

    def density(self, particles: np.ndarray, mask: np.ndarray) -> np.ndarray:
        rho = self.rho[particles]
        zero = (rho == 0.0) & mask
        if zero.any():
            k = int(np.flatnonzero(zero.reshape(-1))[0])
            raise EvaluationError(f"{self.name}: density of particle {int(particles[k])} is zero")
        return np.where(mask, rho, 1.0)

    def volume_j(self, batch: PairBatch, mask: np.ndarray) -> np.ndarray:
        return np.where(mask, self.mass[batch.j] / self.density(batch.j, mask), 0.0)

    def gradient(self, batch: PairBatch) -> np.ndarray:
        return self.kernel.gradient(batch.rel, batch.distance)[:, :, None]


def sph_operands(ctx: EvalContext, node: FunctionCall) -> SphOperands:
    """Kernel, radius, mass and density shared by every SPH operator."""
    radius = influence_radius(ctx, node, RADIUS_OPERAND)
    kernel = kernel_operand(ctx, node, KERNEL_OPERAND, radius)
    assert ctx.system is not None
    if kernel.dimension != ctx.system.dimension:
        ctx.warn_once(
            node,
            "kernel-dimension",
            f"{node.name}: kernel {kernel.keyword.raw} is normalized in {kernel.dimension}D "
            f"but the domain is {ctx.system.dimension}D",
        )
    return SphOperands(
        name=node.name,
        kernel=kernel,
        radius=radius,
        mass=scalar_operand(ctx, node, 1, "mass"),
        rho=scalar_operand(ctx, node, 2, "density"),
    )


def _derivative_mask(ctx: EvalContext, node: FunctionCall, ops: SphOperands, batch: PairBatch) -> np.ndarray:
    return ops.inside(batch) & warn_coincident(ctx, node, batch)[:, None, None]


def sph_s(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    ops = sph_operands(ctx, node)
    values = operand(ctx, node, 0)

    def rule(batch: PairBatch) -> np.ndarray:
        mask = ops.inside(batch)
        weight = ops.kernel.value(batch.distance)[:, None, None] * ops.volume_j(batch, mask)
        return batch.at_j(values) * weight

    return interact(ctx, idx, rule)


def sph_d00(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    ops = sph_operands(ctx, node)
    values = vector_operand(ctx, node, 0, "A")

    def rule(batch: PairBatch) -> np.ndarray:
        mask = _derivative_mask(ctx, node, ops, batch)
        diff = batch.at_j(values, vector=True) - batch.at_i(values)
        flux = np.sum(diff * ops.gradient(batch), axis=1, keepdims=True)
        return flux * ops.volume_j(batch, mask)

    return interact(ctx, idx, rule)


def sph_g11(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    ops = sph_operands(ctx, node)
    values = scalar_operand(ctx, node, 0, "A")

    def rule(batch: PairBatch) -> np.ndarray:
        mask = _derivative_mask(ctx, node, ops, batch)
        rho_i = ops.density(batch.i, mask)
        rho_j = ops.density(batch.j, mask)
        weight = rho_i * (values[batch.i] / rho_i**2 + values[batch.j] / rho_j**2) * ops.mass[batch.j]
        return np.where(mask, weight, 0.0) * ops.gradient(batch)

    return interact(ctx, idx, rule)


def sph_l0(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    ops = sph_operands(ctx, node)
    values = operand(ctx, node, 0)

    def rule(batch: PairBatch) -> np.ndarray:
        mask = _derivative_mask(ctx, node, ops, batch)
        square = np.where(mask, batch.distance[:, None, None] ** 2, 1.0)
        projected = np.sum(batch.rel3() * ops.gradient(batch), axis=1, keepdims=True) / square
        diff = batch.at_j(values) - batch.at_i(values)
        return 2.0 * diff * projected * ops.volume_j(batch, mask)

    return interact(ctx, idx, rule)


def sph_a(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    ops = sph_operands(ctx, node)
    velocity = vector_operand(ctx, node, 0, "velocity")

    def rule(batch: PairBatch) -> np.ndarray:
        mask = _derivative_mask(ctx, node, ops, batch)
        v_ji = batch.at_j(velocity, vector=True) - batch.at_i(velocity)
        approach = np.sum(v_ji * batch.rel3(), axis=1, keepdims=True)
        active = mask & (approach < 0.0)
        rho_i = ops.density(batch.i, active)
        square = np.where(active, batch.distance[:, None, None] ** 2, 1.0)
        pi = np.where(active, approach / (rho_i * square), 0.0)
        return pi * ops.mass[batch.j] * ops.gradient(batch)

    return interact(ctx, idx, rule)


for _name, _impl, _summary in (
    ("sph_S", sph_s, "SPH sample sum_j A_j V_j W_ij"),
    ("sph_D00", sph_d00, "SPH divergence of a vector field"),
    ("sph_G11", sph_g11, "symmetric SPH gradient of a scalar field"),
    ("sph_L0", sph_l0, "SPH Laplacian"),
    ("sph_A", sph_a, "artificial viscosity sum"),
):
    register_interaction(
        _name, _impl, 5, kernel_operand=KERNEL_OPERAND, radius_operand=RADIUS_OPERAND, summary=_summary
    )
