"""Time loop: output-instant dt clipping, frame writing and the run report."""

from __future__ import annotations

import logging
import time as clock
from collections.abc import Callable
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

from sflsim.case.assembly import TIME_STEP, Case
from sflsim.case.solver import Solver
from sflsim.core.io import write_text
from sflsim.core.tensor import Tensor
from sflsim.errors import EvaluationError
from sflsim.scheduler.frames import capture_frame
from sflsim.scheduler.vtk import ASCII, write_vtk

logger = logging.getLogger(__name__)

REPORT_NAME = "run_report.txt"


class RunReport(BaseModel):
    """Summary of one run."""

    model_config = ConfigDict(extra="forbid")

    case: str
    particles: int
    threads: int
    steps: int = 0
    frames: int = 0
    cell_rebuilds: int = 0
    final_time: float = 0.0
    wall_time_s: float = 0.0
    warnings: dict[str, int] = Field(default_factory=dict)
    frame_times: list[float] = Field(default_factory=list)
    output_dir: str | None = None

    def to_text(self) -> str:
        lines = [
            f"case: {self.case}",
            f"particles: {self.particles}",
            f"threads: {self.threads}",
            f"steps: {self.steps}",
            f"frames: {self.frames}",
            f"cell_rebuilds: {self.cell_rebuilds}",
            f"final_time: {self.final_time!r}",
            f"wall_time_s: {self.wall_time_s:.3f}",
            f"warnings: {sum(self.warnings.values())}",
        ]
        lines.extend(f"  {category}: {count}" for category, count in self.warnings.items())
        if self.output_dir is not None:
            lines.append(f"output_dir: {self.output_dir}")
        return "\n".join(lines) + "\n"


def frame_path(output_dir: Path, index: int) -> Path:
    return output_dir / f"frame_{index:06d}.vtk"


def run(
    case: Case,
    *,
    threads: int = 1,
    output_dir: Path | None = None,
    output_format: str = ASCII,
    on_status: Callable[[str], None] | None = None,
) -> RunReport:
    """Advance `case` to ``simulated_time``, writing a frame at t=0 and at every output instant."""

    def emit(message: str) -> None:
        if on_status:
            on_status(message)

    started = clock.perf_counter()
    end = case.parameters.simulated_time
    tol = 1e-12 * end
    ws = case.workspace
    report = RunReport(
        case=case.name,
        particles=case.system.count,
        threads=threads,
        output_dir=None if output_dir is None else str(output_dir),
    )

    def write_frame() -> None:
        if output_dir is not None:
            frame = capture_frame(case)
            write_vtk(frame, frame_path(output_dir, frame.index), output_format)
        report.frames += 1
        report.frame_times.append(case.time)
        emit(f"frame {case.frame_index} at t={case.time:.6g} after {case.step_count} steps")
        case.frame_index += 1

    def interval() -> float:
        value = case.print_interval
        if not value > 0:
            raise EvaluationError(f"print_interval must be positive, got {value!r}")
        return value

    if case.step_count == 0 and not case.resumed:
        write_frame()
    next_output = case.time + interval()

    with Solver(case, threads=threads) as solver:
        while case.time < end - tol:
            user_dt = case.dt
            if not user_dt > 0:
                raise EvaluationError(f"time step dt must be positive, got {user_dt!r} at t={case.time!r}")
            target = end if next_output > end - tol else next_output
            reaches = case.time + user_dt >= target - tol
            step = min(user_dt, target - case.time) if reaches else user_dt
            clipped = step < user_dt
            if clipped:
                ws.set_variable(TIME_STEP, Tensor.scalar(step))
            solver.solve_step()
            if clipped and ws.variables[TIME_STEP].item() == step:
                ws.set_variable(TIME_STEP, Tensor.scalar(user_dt))
            case.time = target if reaches else case.time + step
            case.step_count += 1
            report.steps += 1
            if reaches and next_output <= target + tol:
                write_frame()
                next_output = case.time + interval()

    report.cell_rebuilds = case.system.rebuild_count
    report.final_time = case.time
    report.warnings = case.diagnostics.counts()
    report.wall_time_s = clock.perf_counter() - started
    if output_dir is not None:
        write_text(output_dir / REPORT_NAME, report.to_text())
    logger.info("run finished: %d steps, %d frames, %d cell rebuilds", report.steps, report.frames, report.cell_rebuilds)
    return report
