"""Hertzian DEM contact between spheres and against symmetric walls.

Operands: ``(v, R, E, nu, mass, c_f, radius[, damping_scale])``.

For a pair with ``rel = r_j - r_i``, ``d = |rel|``, ``n = rel/d`` and overlap
``delta = R_i + R_j - d > 0`` the force on ``i`` is

    f = -(k delta^1.5 + c delta^0.25 delta_dot) n + c_f |f_n| t

with ``delta_dot = -(v_ji . n)``, ``k = 4/3 sqrt(R') E'``,
``c = damping_scale * sqrt(m' k) / 8`` and ``t`` the unit tangential part of
``v_ji``. Effective quantities:

    R' = R_i R_j / (R_i + R_j)
    m' = m_i m_j / (m_i + m_j)
    E' = E_i E_j / (E_j (1 - nu_i^2) + E_i (1 - nu_j^2))

A symmetric wall acts through the particle's own mirror image, so the wall
overlap is ``2(R - a)`` for a sphere at distance ``a`` from the wall. Images
of other particles and corner images are not contacts.
"""

from __future__ import annotations

import numpy as np

from sflsim.core.tensor import Tensor
from sflsim.errors import EvaluationError
from sflsim.interactions.base import (
    PairBatch,
    influence_radius,
    interact,
    register_interaction,
    scalar_operand,
    uniform_value,
    vector_operand,
)
from sflsim.sfl.context import EvalContext
from sflsim.sfl.nodes import FunctionCall

RADIUS_OPERAND = 6
DAMPING_OPERAND = 7
TANGENTIAL_FLOOR = 1e-12


def effective_radius(r_i: np.ndarray, r_j: np.ndarray) -> np.ndarray:
    return r_i * r_j / (r_i + r_j)


def effective_mass(m_i: np.ndarray, m_j: np.ndarray) -> np.ndarray:
    return m_i * m_j / (m_i + m_j)


def effective_modulus(e_i: np.ndarray, e_j: np.ndarray, nu_i: np.ndarray, nu_j: np.ndarray) -> np.ndarray:
    return e_i * e_j / (e_j * (1.0 - nu_i**2) + e_i * (1.0 - nu_j**2))


def hertz_stiffness(r_eff: np.ndarray, e_eff: np.ndarray) -> np.ndarray:
    return 4.0 / 3.0 * np.sqrt(r_eff) * e_eff


def hertz_damping(m_eff: np.ndarray, stiffness: np.ndarray) -> np.ndarray:
    return np.sqrt(m_eff * stiffness) / 8.0


def _wall_images(batch: PairBatch) -> np.ndarray:
    return batch.mirrored & (batch.i == batch.j) & (np.sum(batch.guide < 0, axis=1) == 1)


class ContactLaw:
    """Per-particle material operands of one DEM call."""

    def __init__(self, ctx: EvalContext, node: FunctionCall) -> None:
        self.name = node.name
        self.radius = influence_radius(ctx, node, RADIUS_OPERAND)
        self.velocity = vector_operand(ctx, node, 0, "velocity")
        self.size = scalar_operand(ctx, node, 1, "sphere radius")
        self.modulus = scalar_operand(ctx, node, 2, "Young's modulus")
        self.poisson = scalar_operand(ctx, node, 3, "Poisson ratio")
        self.mass = scalar_operand(ctx, node, 4, "mass")
        self.friction = scalar_operand(ctx, node, 5, "friction coefficient")
        self.damping_scale = (
            uniform_value(ctx, node, DAMPING_OPERAND, "damping scale") if len(node.args) > DAMPING_OPERAND else 1.0
        )
        active = ctx.active_indices
        for label, values in (("sphere radius", self.size), ("Young's modulus", self.modulus), ("mass", self.mass)):
            bad = active[values[active].reshape(-1) <= 0.0]
            if bad.size:
                raise EvaluationError(
                    f"{self.name}: {label} must be positive, particle {int(bad[0])} has {values[bad[0]].item()!r}"
                )

    def contacts(self, batch: PairBatch, walls_only: bool) -> np.ndarray:
        """(P,) mask of overlapping pairs taking part in the sum."""
        wall = _wall_images(batch)
        eligible = wall if walls_only else (wall | ~batch.mirrored & (batch.i != batch.j))
        overlap = self.size[batch.i, 0, 0] + self.size[batch.j, 0, 0] - batch.distance
        return eligible & (batch.distance > 0.0) & (batch.distance < self.radius) & (overlap > 0.0)

    def forces(self, batch: PairBatch, contact: np.ndarray) -> np.ndarray:
        """(P, d, 1) contact force on ``i``; zero where ``contact`` is false."""
        i, j = batch.i, batch.j
        r_i, r_j = self.size[i], self.size[j]
        distance = np.where(contact, batch.distance, 1.0)[:, None, None]
        normal = batch.rel3() / distance
        overlap = np.where(contact[:, None, None], r_i + r_j - distance, 0.0)

        stiffness = hertz_stiffness(
            effective_radius(r_i, r_j),
            effective_modulus(self.modulus[i], self.modulus[j], self.poisson[i], self.poisson[j]),
        )
        damping = self.damping_scale * hertz_damping(effective_mass(self.mass[i], self.mass[j]), stiffness)

        v_ji = batch.at_j(self.velocity, vector=True) - self.velocity[i]
        normal_speed = np.sum(v_ji * normal, axis=1, keepdims=True)
        magnitude = stiffness * overlap**1.5 + damping * overlap**0.25 * (-normal_speed)
        f_normal = -magnitude * normal

        tangential = v_ji - normal_speed * normal
        speed = np.linalg.norm(tangential, axis=1, keepdims=True)
        sliding = speed > TANGENTIAL_FLOOR
        direction = tangential / np.where(sliding, speed, 1.0)
        f_tangent = np.where(sliding, self.friction[i] * np.abs(magnitude) * direction, 0.0)
        return np.where(contact[:, None, None], f_normal + f_tangent, 0.0)


def dem_l(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    """Contact acceleration ``sum f / m_i`` from neighbors and wall images."""
    law = ContactLaw(ctx, node)

    def rule(batch: PairBatch) -> np.ndarray:
        return law.forces(batch, law.contacts(batch, walls_only=False)) / law.mass[batch.i]

    return interact(ctx, idx, rule)


def dem_boundary_force(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    """Wall contact force on each particle (not divided by mass)."""
    law = ContactLaw(ctx, node)

    def rule(batch: PairBatch) -> np.ndarray:
        return law.forces(batch, law.contacts(batch, walls_only=True))

    return interact(ctx, idx, rule)


register_interaction(
    "dem_l", dem_l, 7, 8, radius_operand=RADIUS_OPERAND, summary="Hertzian contact acceleration"
)
register_interaction(
    "dem_boundary_force",
    dem_boundary_force,
    7,
    8,
    radius_operand=RADIUS_OPERAND,
    summary="Hertzian wall contact force",
)
