"""Smoothing kernels selected by keyword."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sflsim.core.tensor import Tensor
from sflsim.errors import EvaluationError
from sflsim.sfl.keywords import KernelKeyword, decode_kernel_keyword


@dataclass(frozen=True)
class WendlandKernel:
    """Quintic Wendland kernel W = alpha_D (1 - q/2)^4 (2q + 1), q = r/h, support 2h."""

    keyword: KernelKeyword
    h: float

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise EvaluationError(f"kernel smoothing radius must be positive, got {self.h!r}")

    @property
    def dimension(self) -> int:
        return self.keyword.dimension

    @property
    def support(self) -> float:
        return 2.0 * self.h

    @property
    def alpha(self) -> float:
        h = self.h
        if self.dimension == 1:
            return 3.0 / (4.0 * h)
        if self.dimension == 2:
            return 7.0 / (4.0 * math.pi * h**2)
        return 21.0 / (16.0 * math.pi * h**3)

    def value(self, distance: np.ndarray) -> np.ndarray:
        q = np.asarray(distance, dtype=np.float64) / self.h
        base = np.clip(1.0 - 0.5 * q, 0.0, None)
        return self.alpha * base**4 * (2.0 * q + 1.0)

    def radial_slope(self, distance: np.ndarray) -> np.ndarray:
        """|grad W| = 5 alpha q (1 - q/2)^3 / h, zero outside the support."""
        q = np.asarray(distance, dtype=np.float64) / self.h
        base = np.clip(1.0 - 0.5 * q, 0.0, None)
        return 5.0 * self.alpha * q * base**3 / self.h

    def gradient(self, rel: np.ndarray, distance: np.ndarray) -> np.ndarray:
        """grad_i W for pair vectors ``rel = r_j - r_i`` of shape (n, d); points toward j."""
        slope = self.radial_slope(distance)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(distance > 0.0, slope / distance, 0.0)
        return rel * scale[:, None]


_FAMILIES = {"wendland": WendlandKernel}


def make_kernel(keyword: KernelKeyword | str, support_radius: float) -> WendlandKernel:
    """Build the kernel for `keyword` with influence radius `support_radius` (= 2h)."""
    if isinstance(keyword, str):
        keyword = decode_kernel_keyword(keyword)
    return _FAMILIES[keyword.family](keyword=keyword, h=float(support_radius) / 2.0)


def kernel_value(kernel: WendlandKernel, distance: float) -> Tensor:
    if distance < 0:
        raise EvaluationError(f"kernel distance must be non-negative, got {distance!r}")
    return Tensor.scalar(float(kernel.value(np.array(distance))))


def kernel_gradient(kernel: WendlandKernel, rel_pos: Tensor) -> Tensor:
    """grad_i W for one pair vector ``rel_pos = r_j - r_i``."""
    rel = rel_pos.data.reshape(1, -1)
    distance = np.linalg.norm(rel, axis=1)
    if distance[0] == 0.0:
        raise EvaluationError("kernel gradient is undefined for a zero-length pair vector")
    return Tensor.vector(kernel.gradient(rel, distance)[0])
