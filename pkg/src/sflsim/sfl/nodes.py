"""Expression tree nodes.

Every node evaluates on a block of particle indices and returns a `Tensor`
holding either one value per index or a single shared value. Nodes are
immutable once the parser has built them, so one tree may be evaluated by
many worker threads at once.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, ClassVar

import numpy as np

from sflsim.core.tensor import Tensor, binary, negate
from sflsim.errors import EvaluationError, TensorShapeError

if TYPE_CHECKING:
    from sflsim.sfl.context import EvalContext
    from sflsim.sfl.functions import FunctionSpec

LITERAL = "literal"
SYMBOL_REF = "symbol-ref"
ARITHMETIC_OP = "arithmetic-op"
KERNEL_KEYWORD = "kernel-keyword"


def _locate(exc: TensorShapeError, node: ExpressionNode) -> TensorShapeError:
    """Attach the innermost failing sub-expression to a shape error once."""
    if getattr(exc, "expression", None) is None:
        exc.expression = node.to_sfl()  # type: ignore[attr-defined]
        exc.args = (f"{exc.args[0]} in '{exc.expression}'",)  # type: ignore[attr-defined]
    return exc


class ExpressionNode(ABC):
    kind: ClassVar[str]

    @abstractmethod
    def evaluate(self, ctx: EvalContext, idx: np.ndarray) -> Tensor:
        """Evaluate for the particle indices in `idx`."""

    @abstractmethod
    def to_sfl(self) -> str:
        """Fully parenthesized SFL source for this subtree."""

    def children(self) -> tuple[ExpressionNode, ...]:
        return ()

    def walk(self) -> Iterator[ExpressionNode]:
        yield self
        for child in self.children():
            yield from child.walk()

    def __str__(self) -> str:
        return self.to_sfl()


@dataclass(frozen=True)
class Literal(ExpressionNode):
    kind: ClassVar[str] = LITERAL
    value: float

    def evaluate(self, ctx: EvalContext, idx: np.ndarray) -> Tensor:
        return Tensor.scalar(self.value)

    def to_sfl(self) -> str:
        value = float(self.value)
        if np.isinf(value):
            # overflows back to inf when re-parsed
            return "1e999" if value > 0 else "(-1e999)"
        return repr(value)


@dataclass(frozen=True)
class SymbolRef(ExpressionNode):
    kind: ClassVar[str] = SYMBOL_REF
    name: str

    def evaluate(self, ctx: EvalContext, idx: np.ndarray) -> Tensor:
        return ctx.lookup(self.name).take(idx)

    def to_sfl(self) -> str:
        return self.name


@dataclass(frozen=True)
class KernelKeywordNode(ExpressionNode):
    """Smoothing-kernel keyword; only meaningful as an interaction operand."""

    kind: ClassVar[str] = KERNEL_KEYWORD
    raw: str

    def evaluate(self, ctx: EvalContext, idx: np.ndarray) -> Tensor:
        raise EvaluationError(f"kernel keyword '{self.raw}' can only be used as an interaction operand")

    def to_sfl(self) -> str:
        return self.raw


@dataclass(frozen=True)
class UnaryOp(ExpressionNode):
    kind: ClassVar[str] = ARITHMETIC_OP
    op: str
    operand: ExpressionNode

    def evaluate(self, ctx: EvalContext, idx: np.ndarray) -> Tensor:
        value = self.operand.evaluate(ctx, idx)
        return negate(value) if self.op == "-" else value

    def to_sfl(self) -> str:
        return f"({self.op}{self.operand.to_sfl()})"

    def children(self) -> tuple[ExpressionNode, ...]:
        return (self.operand,)


@dataclass(frozen=True)
class BinaryOp(ExpressionNode):
    kind: ClassVar[str] = ARITHMETIC_OP
    op: str
    left: ExpressionNode
    right: ExpressionNode

    def evaluate(self, ctx: EvalContext, idx: np.ndarray) -> Tensor:
        left = self.left.evaluate(ctx, idx)
        right = self.right.evaluate(ctx, idx)
        try:
            return binary(self.op, left, right)
        except TensorShapeError as exc:
            raise _locate(exc, self) from None

    def to_sfl(self) -> str:
        return f"({self.left.to_sfl()}{self.op}{self.right.to_sfl()})"

    def children(self) -> tuple[ExpressionNode, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class FunctionCall(ExpressionNode):
    """Call of a registered function; `serial` keys its random stream."""

    name: str
    args: tuple[ExpressionNode, ...]
    spec: FunctionSpec = field(compare=False, repr=False)
    serial: int = field(default=0, compare=False)

    @property
    def kind(self) -> str:  # type: ignore[override]
        return self.spec.kind

    def evaluate(self, ctx: EvalContext, idx: np.ndarray) -> Tensor:
        try:
            return self.spec.impl(ctx, idx, self)
        except TensorShapeError as exc:
            raise _locate(exc, self) from None

    def to_sfl(self) -> str:
        return f"{self.name}({', '.join(arg.to_sfl() for arg in self.args)})"

    def children(self) -> tuple[ExpressionNode, ...]:
        return self.args


def evaluate(node: ExpressionNode, ctx: EvalContext, i: int) -> Tensor:
    """Evaluate `node` for the single particle `i`."""
    return node.evaluate(ctx, np.array([i], dtype=np.intp))


def symbol_names(node: ExpressionNode) -> list[str]:
    """Referenced symbol names in first-appearance order."""
    seen: dict[str, None] = {}
    for item in node.walk():
        if isinstance(item, SymbolRef):
            seen.setdefault(item.name, None)
    return list(seen)


def function_calls(node: ExpressionNode) -> list[FunctionCall]:
    return [item for item in node.walk() if isinstance(item, FunctionCall)]
