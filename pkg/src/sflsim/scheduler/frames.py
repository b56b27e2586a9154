"""Result frames: immutable snapshots of a case at an output instant."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict

from sflsim.case.assembly import Case, InitialState


class FrameMetadata(BaseModel):
    """Everything but the per-particle arrays; stored as text inside a result file."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    case: str
    index: int
    time: float
    step_count: int = 0
    solve_counter: int = 0
    rebuild_count: int = 0
    seed: int = 0
    dimension: int
    domain: dict[str, list[float] | list[str]]
    constants: dict[str, list[list[float]]] = {}
    variables: dict[str, list[list[float]]] = {}
    field_shapes: dict[str, list[int]] = {}
    equations: list[str] = []
    inactive: list[int] = []
    warnings: dict[str, int] = {}


@dataclass(frozen=True, eq=False)
class ResultFrame:
    """Positions, fields and metadata of one output instant."""

    metadata: FrameMetadata
    positions: np.ndarray
    fields: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def index(self) -> int:
        return self.metadata.index

    @property
    def time(self) -> float:
        return self.metadata.time

    @property
    def count(self) -> int:
        return int(self.positions.shape[0])

    @property
    def active(self) -> np.ndarray:
        mask = np.ones(self.count, dtype=bool)
        mask[np.asarray(self.metadata.inactive, dtype=np.intp)] = False
        return mask

    def variables(self) -> dict[str, np.ndarray]:
        return {name: np.asarray(rows, dtype=np.float64)[None, :, :] for name, rows in self.metadata.variables.items()}

    def to_initial_state(self) -> InitialState:
        return InitialState(
            positions=self.positions.copy(),
            active=self.active,
            fields={name: values.copy() for name, values in self.fields.items()},
            variables=self.variables(),
            time=self.metadata.time,
            frame_index=self.metadata.index + 1,
            step_count=self.metadata.step_count,
            solve_counter=self.metadata.solve_counter,
            rebuild_count=self.metadata.rebuild_count,
            warnings=dict(self.metadata.warnings),
        )


def _rows(values: np.ndarray) -> list[list[float]]:
    return [[float(x) for x in row] for row in values[0]]


def capture_frame(case: Case) -> ResultFrame:
    """Deep copy of the current case state."""
    ws = case.workspace
    system = case.system
    dom = case.domain
    fields = {name: np.array(value.data) for name, value in ws.fields.items()}
    metadata = FrameMetadata(
        case=case.name,
        index=case.frame_index,
        time=case.time,
        step_count=case.step_count,
        solve_counter=case.solve_counter,
        rebuild_count=system.rebuild_count,
        seed=case.seed,
        dimension=dom.dimension,
        domain={
            "cell_size": dom.cell_size.tolist(),
            "minimum": dom.minimum.tolist(),
            "maximum": dom.maximum.tolist(),
            "boundary": list(dom.boundary),
        },
        constants={name: _rows(value.data) for name, value in ws.constants.items()},
        variables={name: _rows(value.data) for name, value in ws.variables.items()},
        field_shapes={name: [value.shape[1], value.shape[2]] for name, value in fields.items()},
        equations=[f"{eq.name}: {eq.source}" for eq in case.equations],
        inactive=np.flatnonzero(~system.active).tolist(),
        warnings=case.diagnostics.counts(),
    )
    return ResultFrame(metadata=metadata, positions=np.array(system.positions), fields=fields)
