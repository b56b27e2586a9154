"""All-pairs Newtonian gravity.

``nbody_gravity(mass, G[, eps])`` returns

    a_i = sum_{j != i} G m_j (r_j - r_i) / (|r_j - r_i|^2 + eps^2)^1.5

over every active particle. The cell grid is not used and boundaries add no
images.
"""

from __future__ import annotations

import numpy as np

from sflsim.core.tensor import Tensor
from sflsim.errors import EvaluationError
from sflsim.interactions.base import register_interaction, scalar_operand, uniform_value
from sflsim.sfl.context import EvalContext
from sflsim.sfl.functions import INFINITE
from sflsim.sfl.nodes import FunctionCall

SOURCE_CHUNK = 1024


def nbody_gravity(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    if ctx.system is None:
        raise EvaluationError("nbody_gravity needs a particle system")
    mass = scalar_operand(ctx, node, 0, "mass")[:, 0, 0]
    strength = uniform_value(ctx, node, 1, "gravitational constant")
    eps = uniform_value(ctx, node, 2, "softening length") if len(node.args) > 2 else 0.0
    positions = ctx.system.positions
    sources = ctx.active_indices
    out = np.zeros((idx.size, ctx.system.dimension))
    for start in range(0, sources.size, SOURCE_CHUNK):
        j = sources[start : start + SOURCE_CHUNK]
        rel = positions[j][None, :, :] - positions[idx][:, None, :]
        square = np.sum(rel**2, axis=2) + eps**2
        same = idx[:, None] == j[None, :]
        clash = (square == 0.0) & ~same
        if clash.any():
            a, b = np.argwhere(clash)[0]
            raise EvaluationError(
                f"nbody_gravity: particles {int(idx[a])} and {int(j[b])} coincide and the softening length is 0"
            )
        with np.errstate(divide="ignore", invalid="ignore"):
            weight = np.where(same, 0.0, strength * mass[j][None, :] / square**1.5)
        out += np.sum(weight[:, :, None] * rel, axis=1)
    return Tensor.wrap(out[:, :, None])


register_interaction(
    "nbody_gravity", nbody_gravity, 2, 3, influence=INFINITE, summary="all-pairs gravitational acceleration"
)
