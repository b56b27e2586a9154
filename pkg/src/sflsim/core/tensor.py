"""Small dense tensor values (scalar, vector, up to 3x3 matrix) and their arithmetic.

A `Tensor` holds a read-only float64 array of shape ``(count, rows, cols)``.
``count == 1`` is a single value shared by every particle; ``count > 1`` is one
value per particle of an evaluated block. All operators broadcast a single
value against a block.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from typing import Any

import numpy as np

from sflsim.errors import TensorShapeError

MAX_DIM = 3

ARITHMETIC_OPERATORS = ("+", "-", "*", "/", "^")
COMPARISON_OPERATORS = ("<", "<=", ">", ">=", "==", "!=")


class Tensor:
    """Immutable batch of equally shaped small matrices."""

    __slots__ = ("_data",)
    __hash__ = None  # type: ignore[assignment]

    def __init__(self, data: Any) -> None:
        arr = np.array(data, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1, 1)
        elif arr.ndim == 1:
            arr = arr.reshape(1, -1, 1)
        elif arr.ndim == 2:
            arr = arr.reshape(1, *arr.shape)
        elif arr.ndim != 3:
            raise TensorShapeError(f"tensor data must have at most 3 dimensions, got {arr.ndim}")
        self._data = _freeze(arr)

    @classmethod
    def wrap(cls, arr: np.ndarray) -> Tensor:
        """Adopt a freshly computed ``(count, rows, cols)`` array without copying."""
        if arr.ndim != 3:
            raise TensorShapeError(f"expected a (count, rows, cols) array, got shape {arr.shape}")
        obj = cls.__new__(cls)
        obj._data = _freeze(np.asarray(arr, dtype=np.float64))
        return obj

    @classmethod
    def scalar(cls, value: float) -> Tensor:
        return cls.wrap(np.full((1, 1, 1), float(value)))

    @classmethod
    def vector(cls, values: Sequence[float]) -> Tensor:
        return cls.wrap(np.asarray(values, dtype=np.float64).reshape(1, -1, 1).copy())

    @classmethod
    def matrix(cls, rows: Sequence[Sequence[float]]) -> Tensor:
        return cls.wrap(np.asarray(rows, dtype=np.float64).reshape(1, len(rows), -1).copy())

    @classmethod
    def zeros(cls, rows: int, cols: int, count: int = 1) -> Tensor:
        return cls.wrap(np.zeros((count, rows, cols)))

    @classmethod
    def stack(cls, items: Iterable[Tensor]) -> Tensor:
        """Concatenate tensors of one shape into a single per-particle block."""
        parts = [item.data for item in items]
        if not parts:
            raise TensorShapeError("cannot stack an empty sequence of tensors")
        shapes = {part.shape[1:] for part in parts}
        if len(shapes) != 1:
            listed = ", ".join(sorted(_fmt(shape) for shape in shapes))
            raise TensorShapeError(f"cannot stack tensors of different shapes: {listed}")
        return cls.wrap(np.concatenate(parts, axis=0))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def count(self) -> int:
        return int(self._data.shape[0])

    @property
    def rows(self) -> int:
        return int(self._data.shape[1])

    @property
    def cols(self) -> int:
        return int(self._data.shape[2])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_scalar(self) -> bool:
        return self.shape == (1, 1)

    @property
    def is_vector(self) -> bool:
        return self.cols == 1

    @property
    def is_uniform(self) -> bool:
        return self.count == 1

    @property
    def values(self) -> list[float]:
        """Row-major values of a single tensor."""
        if self.count != 1:
            raise TensorShapeError(f"expected a single tensor, got a block of {self.count}")
        return [float(value) for value in self._data[0].ravel()]

    def shape_str(self) -> str:
        return _fmt(self.shape)

    def item(self) -> float:
        """Return the value of a single scalar."""
        if not self.is_scalar or self.count != 1:
            raise TensorShapeError(f"expected a single scalar, got shape {self.shape_str()} x{self.count}")
        return float(self._data[0, 0, 0])

    def at(self, index: int) -> Tensor:
        """Return the value for one entry of the block (or the shared value)."""
        if self.count == 1:
            return self
        return Tensor.wrap(self._data[index : index + 1])

    def take(self, indices: np.ndarray) -> Tensor:
        if self.count == 1:
            return self
        return Tensor.wrap(self._data[indices])

    def broadcast(self, count: int) -> Tensor:
        if self.count == count:
            return self
        if self.count != 1:
            raise TensorShapeError(f"cannot broadcast a block of {self.count} to {count}")
        return Tensor.wrap(np.repeat(self._data, count, axis=0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(np.array_equal(self._data, other._data))

    def __repr__(self) -> str:
        if self.count == 1:
            return f"Tensor({self.shape_str()}, {self.values})"
        return f"Tensor({self.shape_str()} x{self.count})"

    def __add__(self, other: Tensor) -> Tensor:
        return binary("+", self, other)

    def __sub__(self, other: Tensor) -> Tensor:
        return binary("-", self, other)

    def __mul__(self, other: Tensor) -> Tensor:
        return binary("*", self, other)

    def __truediv__(self, other: Tensor) -> Tensor:
        return binary("/", self, other)

    def __pow__(self, other: Tensor) -> Tensor:
        return binary("^", self, other)

    def __neg__(self) -> Tensor:
        return negate(self)


def _freeze(arr: np.ndarray) -> np.ndarray:
    if arr.ndim == 3 and not (1 <= arr.shape[1] <= MAX_DIM and 1 <= arr.shape[2] <= MAX_DIM):
        raise TensorShapeError(f"tensor shape {_fmt(arr.shape[1:])} exceeds 3x3")
    view = arr.view()
    view.flags.writeable = False
    return view


def _fmt(shape: tuple[int, ...]) -> str:
    return "x".join(str(dim) for dim in shape)


def _check_counts(op: str, a: Tensor, b: Tensor) -> None:
    if a.count != b.count and a.count != 1 and b.count != 1:
        raise TensorShapeError(f"operator '{op}' cannot combine blocks of {a.count} and {b.count} values")


def _shape_error(op: str, a: Tensor, b: Tensor) -> TensorShapeError:
    return TensorShapeError(f"operator '{op}' cannot combine shapes {a.shape_str()} and {b.shape_str()}")


def binary(op: str, a: Tensor, b: Tensor) -> Tensor:
    """Apply an arithmetic, comparison or concatenation operator."""
    _check_counts(op, a, b)
    x, y = a.data, b.data
    with np.errstate(all="ignore"):
        if op in ("+", "-"):
            if a.shape != b.shape:
                raise _shape_error(op, a, b)
            return Tensor.wrap(x + y if op == "+" else x - y)
        if op == "*":
            if a.is_scalar or b.is_scalar:
                return Tensor.wrap(x * y)
            if a.cols == b.rows:
                return Tensor.wrap(np.matmul(x, y))
            raise _shape_error(op, a, b)
        if op in ("/", "^"):
            if not (b.is_scalar or a.shape == b.shape):
                raise _shape_error(op, a, b)
            return Tensor.wrap(x / y if op == "/" else np.power(x, y))
        if op in COMPARISON_OPERATORS:
            if not (a.is_scalar and b.is_scalar):
                raise _shape_error(op, a, b)
            return Tensor.wrap(_COMPARE[op](x, y).astype(np.float64))
    if op == "|":
        return concat(a, b)
    raise TensorShapeError(f"unknown operator '{op}'")


_COMPARE: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "<": np.less,
    "<=": np.less_equal,
    ">": np.greater,
    ">=": np.greater_equal,
    "==": np.equal,
    "!=": np.not_equal,
}


def negate(a: Tensor) -> Tensor:
    return Tensor.wrap(-a.data)


def concat(a: Tensor, b: Tensor) -> Tensor:
    """Stack two column vectors (or scalars) into one column vector."""
    _check_counts("|", a, b)
    if not (a.is_vector and b.is_vector) or a.rows + b.rows > MAX_DIM:
        raise _shape_error("|", a, b)
    count = max(a.count, b.count)
    return Tensor.wrap(np.concatenate([a.broadcast(count).data, b.broadcast(count).data], axis=1))


def norm(a: Tensor) -> Tensor:
    """Frobenius norm as a scalar per entry."""
    return Tensor.wrap(np.linalg.norm(a.data, axis=(1, 2)).reshape(-1, 1, 1))


_UNARY: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "asin": np.arcsin,
    "acos": np.arccos,
    "atan": np.arctan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "abs": np.abs,
    "floor": np.floor,
    "ceil": np.ceil,
    "sign": np.sign,
}

UNARY_FUNCTIONS = tuple(_UNARY)


def elementwise(fn: str, *args: Tensor) -> Tensor:
    """Apply a named elementwise function."""
    if fn in _UNARY:
        (a,) = args
        with np.errstate(all="ignore"):
            return Tensor.wrap(_UNARY[fn](a.data))
    if fn in ("min2", "max2"):
        a, b = args
        _check_counts(fn, a, b)
        if not (a.shape == b.shape or a.is_scalar or b.is_scalar):
            raise _shape_error(fn, a, b)
        pick = np.minimum if fn == "min2" else np.maximum
        return Tensor.wrap(pick(a.data, b.data))
    raise TensorShapeError(f"unknown elementwise function '{fn}'")


def dot(a: Tensor, b: Tensor) -> Tensor:
    _check_counts("dot", a, b)
    if a.shape != b.shape:
        raise _shape_error("dot", a, b)
    return Tensor.wrap(np.sum(a.data * b.data, axis=(1, 2)).reshape(-1, 1, 1))


def transpose(a: Tensor) -> Tensor:
    return Tensor.wrap(np.ascontiguousarray(np.swapaxes(a.data, 1, 2)))


def component(a: Tensor, k: Tensor) -> Tensor:
    """Row-major component ``k`` (0-based) of every entry."""
    if not k.is_scalar or k.count != 1:
        raise TensorShapeError("component index must be a single scalar")
    index = int(k.item())
    size = a.rows * a.cols
    if index != k.item() or not 0 <= index < size:
        raise TensorShapeError(f"component index {k.item()!r} out of range for shape {a.shape_str()}")
    flat = a.data.reshape(a.count, size)
    return Tensor.wrap(flat[:, index].reshape(-1, 1, 1).copy())
