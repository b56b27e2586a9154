"""Social force model for pedestrian crowds.

``sfm(v, v0, rdesired, R, A, B, k, c, m, tau)`` returns the acceleration

    (v0 e0 - v_i) / tau - 1/m_i sum_j [A exp((R_ij - d)/B) + k max(R_ij - d, 0) - c_ij] n

with ``e0`` the unit vector from ``r_i`` toward ``rdesired_i``,
``R_ij = R_i + R_j``, ``c_ij = (c_i + c_j)/2`` and ``n = (r_j - r_i)/d``.
Neighbors count when ``0 < d < `` the smallest cell size; symmetric walls act
through mirror images like any other neighbor.
"""

from __future__ import annotations

import numpy as np

from sflsim.core.tensor import Tensor
from sflsim.errors import EvaluationError
from sflsim.interactions.base import (
    PairBatch,
    interact,
    register_interaction,
    scalar_operand,
    vector_operand,
    warn_coincident,
)
from sflsim.sfl.context import EvalContext
from sflsim.sfl.nodes import FunctionCall


def _positive(ctx: EvalContext, node: FunctionCall, values: np.ndarray, label: str) -> None:
    active = ctx.active_indices
    bad = active[values[active].reshape(-1) <= 0.0]
    if bad.size:
        raise EvaluationError(f"{node.name}: {label} must be positive, particle {int(bad[0])} has {values[bad[0]].item()!r}")


def driving_term(
    ctx: EvalContext,
    idx: np.ndarray,
    velocity: np.ndarray,
    speed: np.ndarray,
    target: np.ndarray,
    tau: np.ndarray,
) -> np.ndarray:
    """(v0 e0 - v)/tau for the particles in `idx`; e0 = 0 where the target is reached."""
    assert ctx.system is not None
    heading = target[idx] - ctx.system.positions[idx][:, :, None]
    length = np.linalg.norm(heading, axis=(1, 2), keepdims=True)
    arrived = length[:, 0, 0] == 0.0
    if arrived.any():
        ctx.diagnostics.warn(
            "sfm-no-heading",
            f"particle {int(idx[arrived][0])} stands on its desired position; driving term suppressed",
            int(arrived.sum()),
        )
    e0 = np.where(length > 0.0, heading / np.where(length > 0.0, length, 1.0), 0.0)
    drive = (speed[idx] * e0 - velocity[idx]) / tau[idx]
    return np.where(arrived[:, None, None], 0.0, drive)


def sfm(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    if ctx.system is None:
        raise EvaluationError("sfm needs a particle system")
    velocity = vector_operand(ctx, node, 0, "velocity")
    speed = scalar_operand(ctx, node, 1, "desired speed")
    target = vector_operand(ctx, node, 2, "desired position")
    size = scalar_operand(ctx, node, 3, "body radius")
    strength = scalar_operand(ctx, node, 4, "interaction strength A")
    reach = scalar_operand(ctx, node, 5, "interaction range B")
    stiffness = scalar_operand(ctx, node, 6, "body stiffness k")
    attraction = scalar_operand(ctx, node, 7, "attraction c")
    mass = scalar_operand(ctx, node, 8, "mass")
    tau = scalar_operand(ctx, node, 9, "relaxation time")
    _positive(ctx, node, mass, "mass")
    _positive(ctx, node, tau, "relaxation time")
    _positive(ctx, node, reach, "interaction range B")
    limit = ctx.system.domain.min_cell_size

    def rule(batch: PairBatch) -> np.ndarray:
        near = warn_coincident(ctx, node, batch) & (batch.distance < limit)
        i, j = batch.i, batch.j
        gap = size[i] + size[j] - batch.distance[:, None, None]
        with np.errstate(over="ignore"):
            repulsion = np.exp(gap / reach[i])
        push = strength[i] * repulsion + stiffness[i] * np.maximum(gap, 0.0)
        magnitude = (push - 0.5 * (attraction[i] + attraction[j])) / mass[i]
        return np.where(near[:, None, None], -magnitude * batch.unit(), 0.0)

    neighbors = interact(ctx, idx, rule).data
    return Tensor.wrap(driving_term(ctx, idx, velocity, speed, target, tau) + neighbors)


register_interaction("sfm", sfm, 10, summary="social force acceleration")
