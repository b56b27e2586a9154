"""I/O helpers for case files, point files and run reports."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np
import yaml

from sflsim.case.models import CaseDocument, validate_document
from sflsim.errors import CaseAssemblyError, CaseFileError, ResultFileError


def load_yaml(path: Path) -> Any:
    """Load a YAML file; syntax errors carry the line number."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ResultFileError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise CaseFileError(f"{path}: malformed YAML{where}: {problem}") from None


def read_case_file(path: Path) -> CaseDocument:
    """Read and validate a case file."""
    data = load_yaml(path)
    if not isinstance(data, dict):
        raise CaseFileError(f"{path}: expected a mapping with a 'simulation' key")
    return validate_document(data, source=str(path))


def read_points_file(path: Path, dimension: int | None = None) -> np.ndarray:
    """Read whitespace-separated particle positions, one particle per line."""
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ResultFileError(f"cannot read points file {path}: {exc.strerror or exc}") from exc
    rows: list[list[float]] = []
    width: int | None = None
    for number, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens:
            continue
        try:
            row = [float(token) for token in tokens]
        except ValueError:
            bad = next(token for token in tokens if not _is_number(token))
            raise CaseAssemblyError(f"{path}: non-numeric value '{bad}' at line {number}") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise CaseAssemblyError(f"{path}: line {number} has {len(row)} columns, expected {width}")
        rows.append(row)
    if not rows:
        raise CaseAssemblyError(f"{path}: points file holds no particles")
    if dimension is not None and width != dimension:
        raise CaseAssemblyError(f"{path}: points have {width} columns but the domain is {dimension}D")
    return np.asarray(rows, dtype=np.float64)


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def write_text(path: Path, text: str) -> None:
    """Write a UTF-8 text file, creating parent directories."""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ResultFileError(f"cannot write {path}: {exc.strerror or exc}") from exc
