"""Equation solving.

Equations run strictly in list order. A field equation is evaluated for all
active particles into a staging array, split into contiguous blocks over the
worker threads, and only then written back, so its right-hand side sees the
pre-solve values of its own target. A variable equation is evaluated once, on
one thread, at the first active particle.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from types import TracebackType

import numpy as np

from sflsim.case.assembly import Case, Equation
from sflsim.case.workspace import VARIABLE
from sflsim.core.tensor import Tensor
from sflsim.errors import EvaluationError, NonFiniteValueError, TensorShapeError
from sflsim.sfl.context import EvalContext

logger = logging.getLogger(__name__)


def particle_blocks(active: np.ndarray, threads: int) -> list[np.ndarray]:
    """Contiguous blocks of at most ``ceil(len(active)/threads)`` indices, none empty."""
    if active.size == 0:
        return []
    size = -(-active.size // max(threads, 1))
    return [active[start : start + size] for start in range(0, active.size, size)]


def _first_non_finite(values: np.ndarray) -> int | None:
    bad = ~np.isfinite(values.reshape(values.shape[0], -1)).all(axis=1)
    return int(np.flatnonzero(bad)[0]) if bad.any() else None


class Solver:
    """Solve the equations of one case with a fixed number of worker threads."""

    def __init__(self, case: Case, threads: int = 1) -> None:
        if threads < 1:
            raise ValueError("threads must be >= 1")
        self.case = case
        self.threads = threads
        self._executor = ThreadPoolExecutor(max_workers=threads, thread_name_prefix="sflsim") if threads > 1 else None

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self) -> Solver:
        return self

    def __exit__(
        self, exc_type: type[BaseException] | None, exc: BaseException | None, tb: TracebackType | None
    ) -> None:
        self.close()

    def solve_step(self) -> None:
        """Solve every equation once, in order."""
        for equation in self.case.equations:
            self.solve_equation(equation)

    def solve_equation(self, equation: Equation) -> None:
        case = self.case
        case.solve_counter += 1
        system = case.system
        if equation.needs_neighbors and system.dirty:
            system.build_cells()
        ctx = case.context()
        try:
            if case.workspace.kind_of(equation.target) == VARIABLE:
                self._solve_variable(equation, ctx)
            else:
                self._solve_field(equation, ctx)
        except (TensorShapeError, EvaluationError) as exc:
            raise type(exc)(f"equation '{equation.name}' ({equation.source}): {exc}") from None

    def _solve_variable(self, equation: Equation, ctx: EvalContext) -> None:
        active = ctx.active_indices
        at = active[:1] if active.size else np.zeros(1, dtype=np.intp)
        value = equation.rhs.evaluate(ctx, at)
        if value.count != 1:
            value = value.at(0)
        if _first_non_finite(value.data) is not None:
            raise NonFiniteValueError(equation.name, int(at[0]), time=self.case.time)
        self.case.workspace.set_variable(equation.target, value)

    def _solve_field(self, equation: Equation, ctx: EvalContext) -> None:
        ws = self.case.workspace
        current = ws.value(equation.target)
        count = ws.particle_count
        staging = np.array(current.broadcast(count).data)
        blocks = particle_blocks(ctx.active_indices, self.threads)

        def run(block: np.ndarray) -> Tensor:
            return equation.rhs.evaluate(ctx, block)

        if self._executor is None or len(blocks) < 2:
            results = [run(block) for block in blocks]
        else:
            results = list(self._executor.map(run, blocks))
        for block, result in zip(blocks, results, strict=True):
            if result.shape != current.shape:
                raise TensorShapeError(
                    f"'{equation.target}' has shape {current.shape_str()}, right-hand side gives {result.shape_str()}"
                )
            staging[block] = result.broadcast(block.size).data
        if blocks:
            active = np.concatenate(blocks)
            bad = _first_non_finite(staging[active])
            if bad is not None:
                raise NonFiniteValueError(equation.name, int(active[bad]), time=self.case.time)
        ws.set_field(equation.target, Tensor.wrap(staging))
