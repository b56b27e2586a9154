"""Resume a simulation from a result file."""

from __future__ import annotations

import logging
from pathlib import Path

from sflsim.case.assembly import Case, assemble_case
from sflsim.case.models import CaseDocument
from sflsim.scheduler.vtk import read_vtk

logger = logging.getLogger(__name__)


def hot_start(
    result_path: Path,
    document: CaseDocument,
    *,
    base_dir: Path | None = None,
    seed: int | None = None,
    name: str = "case",
) -> Case:
    """Assemble `document` with positions, fields, variables and time taken from `result_path`.

    The grid block of the document is ignored; the result file decides the
    particle count. Fields the document adds are initialized from their
    expressions. Equations always come from the document.
    """
    frame = read_vtk(result_path)
    logger.info("hot start from %s (frame %d, t=%r)", result_path, frame.index, frame.time)
    return assemble_case(
        document,
        base_dir=base_dir,
        seed=frame.metadata.seed if seed is None else seed,
        name=name,
        initial_state=frame.to_initial_state(),
    )
