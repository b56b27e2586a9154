"""Function table: built-in functions, reductions, integrators and interaction operators.

New operators register a `FunctionSpec` here; the parser and the evaluator
need no other change to pick them up.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from sflsim.core.tensor import UNARY_FUNCTIONS, Tensor, binary, component, dot, elementwise, norm, transpose
from sflsim.errors import EvaluationError, TensorShapeError

if TYPE_CHECKING:
    from sflsim.sfl.context import EvalContext
    from sflsim.sfl.nodes import FunctionCall

BUILTIN_FN = "builtin-fn"
REDUCTION_FN = "reduction-fn"
INTEGRATOR = "integrator"
INTERACTION_OP = "interaction-op"

FINITE = "finite"
INFINITE = "infinite"

Impl = Callable[["EvalContext", np.ndarray, "FunctionCall"], Tensor]


@dataclass(frozen=True)
class FunctionSpec:
    """Name, operand count range, node kind and implementation of one SFL function."""

    name: str
    kind: str
    min_args: int
    max_args: int
    impl: Impl
    kernel_operand: int | None = None
    radius_operand: int | None = None
    influence: str | None = None
    summary: str = ""

    def accepts(self, count: int) -> bool:
        return self.min_args <= count <= self.max_args

    def arity_text(self) -> str:
        if self.min_args == self.max_args:
            return str(self.min_args)
        return f"{self.min_args} to {self.max_args}"

    @property
    def needs_neighbors(self) -> bool:
        return self.kind == INTERACTION_OP and self.influence == FINITE


_FUNCTIONS: dict[str, FunctionSpec] = {}


def register(spec: FunctionSpec) -> FunctionSpec:
    """Add a function to the table; re-registering a name with another spec is an error."""
    existing = _FUNCTIONS.get(spec.name)
    if existing is not None and existing != spec:
        raise ValueError(f"function '{spec.name}' is already registered")
    _FUNCTIONS[spec.name] = spec
    return spec


def lookup(name: str) -> FunctionSpec | None:
    return _FUNCTIONS.get(name)


def registered(kind: str | None = None) -> list[FunctionSpec]:
    return [spec for _, spec in sorted(_FUNCTIONS.items()) if kind is None or spec.kind == kind]


def eval_args(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> list[Tensor]:
    return [arg.evaluate(ctx, idx) for arg in node.args]


def _unary(fn: str) -> Impl:
    def impl(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
        (value,) = eval_args(ctx, idx, node)
        return elementwise(fn, value)

    return impl


def _pairwise(fn: str) -> Impl:
    def impl(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
        a, b = eval_args(ctx, idx, node)
        return elementwise(fn, a, b)

    return impl


def _norm(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    (value,) = eval_args(ctx, idx, node)
    return norm(value)


def _transpose(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    (value,) = eval_args(ctx, idx, node)
    return transpose(value)


def _dot(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    a, b = eval_args(ctx, idx, node)
    return dot(a, b)


def _comp(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    a, k = eval_args(ctx, idx, node)
    return component(a, k)


def _euler(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    x, xdot, dt = eval_args(ctx, idx, node)
    if x.shape != xdot.shape:
        raise TensorShapeError(f"euler needs x and xdot of one shape, got {x.shape_str()} and {xdot.shape_str()}")
    if not dt.is_scalar:
        raise TensorShapeError(f"euler needs a scalar time step, got {dt.shape_str()}")
    return binary("+", x, binary("*", xdot, dt))


def _rand(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
    low, high = eval_args(ctx, idx, node)
    if not (low.is_scalar and high.is_scalar):
        raise TensorShapeError(f"rand bounds must be scalars, got {low.shape_str()} and {high.shape_str()}")
    if np.any(low.data > high.data):
        raise EvaluationError(f"rand lower bound exceeds upper bound in '{node.to_sfl()}'")
    size = max(ctx.particle_count, 1)

    def draw() -> Tensor:
        seq = np.random.SeedSequence(ctx.seed, spawn_key=(ctx.solve_counter, node.serial))
        return Tensor.wrap(np.random.default_rng(seq).random(size).reshape(-1, 1, 1))

    unit = ctx.memo(("rand", id(node)), draw).take(idx)
    return Tensor.wrap(low.data + (high.data - low.data) * unit.data)


def _reduce_values(ctx: EvalContext, node: FunctionCall) -> np.ndarray:
    active = ctx.active_indices
    if active.size == 0:
        raise EvaluationError(f"{node.name} over an empty particle system")
    arg = node.args[0]
    return ctx.full(arg, lambda ix: arg.evaluate(ctx, ix)).data[active]


def _reduction(name: str) -> Impl:
    def compute(ctx: EvalContext, node: FunctionCall) -> Tensor:
        values = _reduce_values(ctx, node)
        if name == "fsum":
            return Tensor.wrap(np.sum(values, axis=0, keepdims=True))
        if name == "fmean":
            return Tensor.wrap(np.sum(values, axis=0, keepdims=True) / values.shape[0])
        magnitudes = np.linalg.norm(values, axis=(1, 2))
        pick = np.max if name == "fmax" else np.min
        if values.shape[1:] == (1, 1):
            return Tensor.scalar(float(pick(values)))
        return Tensor.scalar(float(pick(magnitudes)))

    def impl(ctx: EvalContext, idx: np.ndarray, node: FunctionCall) -> Tensor:
        return ctx.memo(("reduce", id(node)), lambda: compute(ctx, node))

    return impl


for _fn in UNARY_FUNCTIONS:
    register(FunctionSpec(_fn, BUILTIN_FN, 1, 1, _unary(_fn), summary=f"elementwise {_fn}"))
for _alias, _fn in (("min", "min2"), ("max", "max2"), ("min2", "min2"), ("max2", "max2")):
    register(FunctionSpec(_alias, BUILTIN_FN, 2, 2, _pairwise(_fn), summary=f"elementwise {_fn[:3]}imum"))
register(FunctionSpec("norm", BUILTIN_FN, 1, 1, _norm, summary="Frobenius norm"))
register(FunctionSpec("transpose", BUILTIN_FN, 1, 1, _transpose, summary="matrix transpose"))
register(FunctionSpec("dot", BUILTIN_FN, 2, 2, _dot, summary="sum of elementwise products"))
register(FunctionSpec("comp", BUILTIN_FN, 2, 2, _comp, summary="row-major component k (0-based)"))
register(FunctionSpec("rand", BUILTIN_FN, 2, 2, _rand, summary="uniform sample in [a, b]"))
register(FunctionSpec("euler", INTEGRATOR, 3, 3, _euler, summary="x + xdot*dt"))
for _fn in ("fmax", "fmin", "fsum", "fmean"):
    register(FunctionSpec(_fn, REDUCTION_FN, 1, 1, _reduction(_fn), summary=f"{_fn[1:]} over active particles"))
