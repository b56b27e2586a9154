from __future__ import annotations

from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from sflsim.case.assembly import Case, assemble_case
from sflsim.case.models import validate_document
from sflsim.sfl.parser import parse_expression

FIXTURES = Path(__file__).parent / "fixtures"

Pairs = Sequence[tuple[str, Any]]


def write_points(path: Path, points: Sequence[Sequence[float]]) -> Path:
    path.write_text("\n".join(" ".join(repr(float(x)) for x in row) for row in points) + "\n", encoding="utf-8")
    return path


def case_document(
    *,
    domain: dict[str, str],
    grid: dict[str, Any] | list[dict[str, Any]],
    constants: Pairs = (),
    variables: Pairs = (("dt", "0.001"),),
    fields: Pairs = (),
    equations: Pairs = (),
    simulated_time: float = 1.0,
    print_interval: float = 0.1,
) -> dict[str, Any]:
    return {
        "simulation": {
            "case": {
                "workspace": {
                    "constants": [{name: value} for name, value in constants],
                    "variables": [{name: value} for name, value in variables],
                    "particle_system": {"domain": domain, "grid": grid},
                    "fields": [{name: value} for name, value in fields],
                },
                "equations": [{name: value} for name, value in equations],
            },
            "parameter_space": {"simulated_time": simulated_time, "print_interval": print_interval},
        }
    }


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def build_case(tmp_path: Path) -> Callable[..., Case]:
    """Assemble a case from keyword sections; `points` writes a points file used as the grid."""

    def build(
        *,
        domain: dict[str, str],
        points: Sequence[Sequence[float]] | None = None,
        grid: dict[str, Any] | list[dict[str, Any]] | None = None,
        seed: int = 0,
        name: str = "case",
        **sections: Any,
    ) -> Case:
        if points is not None:
            write_points(tmp_path / "points.txt", points)
            grid = {"gid": 0, "file": "points.txt"}
        assert grid is not None
        document = validate_document(case_document(domain=domain, grid=grid, **sections))
        return assemble_case(document, base_dir=tmp_path, seed=seed, name=name)

    return build


@pytest.fixture
def evaluate() -> Callable[[Case, str], np.ndarray]:
    """Evaluate an SFL expression for every particle of a case as an (N, rows, cols) array."""

    def run(case: Case, source: str) -> np.ndarray:
        node = parse_expression(source)
        ctx = case.context()
        return np.array(node.evaluate(ctx, ctx.all_indices).broadcast(case.system.count).data)

    return run
