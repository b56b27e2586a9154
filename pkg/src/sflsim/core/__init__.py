"""Core value types and shared I/O helpers."""

from sflsim.core.tensor import Tensor, binary, elementwise, norm

__all__ = [
    "Tensor",
    "binary",
    "elementwise",
    "norm",
]
