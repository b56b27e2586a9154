from __future__ import annotations

from pathlib import Path

import pytest

from sflsim.core.io import load_yaml, read_case_file, read_points_file, write_text
from sflsim.errors import CaseAssemblyError, CaseFileError, ResultFileError


def test_read_points_file_skips_blank_lines(tmp_path: Path) -> None:
    path = tmp_path / "points.txt"
    path.write_text("0 0 1\n\n0.5 -1 2e-1\n", encoding="utf-8")

    points = read_points_file(path, dimension=3)

    assert points.shape == (2, 3)
    assert points[1].tolist() == [0.5, -1.0, 0.2]


def test_read_points_file_reports_non_numeric_value_and_line(tmp_path: Path) -> None:
    path = tmp_path / "points.txt"
    path.write_text("0 0\n1 abc\n", encoding="utf-8")

    with pytest.raises(CaseAssemblyError, match="non-numeric value 'abc' at line 2"):
        read_points_file(path)


def test_read_points_file_rejects_ragged_rows(tmp_path: Path) -> None:
    path = tmp_path / "points.txt"
    path.write_text("0 0\n1 2 3\n", encoding="utf-8")

    with pytest.raises(CaseAssemblyError, match="line 2 has 3 columns, expected 2"):
        read_points_file(path)


def test_read_points_file_checks_domain_dimension(tmp_path: Path) -> None:
    path = tmp_path / "points.txt"
    path.write_text("0 0\n", encoding="utf-8")

    with pytest.raises(CaseAssemblyError, match="2 columns but the domain is 3D"):
        read_points_file(path, dimension=3)


def test_read_points_file_rejects_empty_file(tmp_path: Path) -> None:
    path = tmp_path / "points.txt"
    path.write_text("\n", encoding="utf-8")

    with pytest.raises(CaseAssemblyError, match="no particles"):
        read_points_file(path)


def test_missing_points_file_is_an_io_error(tmp_path: Path) -> None:
    with pytest.raises(ResultFileError, match="cannot read points file"):
        read_points_file(tmp_path / "missing.txt")


def test_load_yaml_reports_line_of_syntax_error(tmp_path: Path) -> None:
    path = tmp_path / "bad.yaml"
    path.write_text("simulation:\n  case: [1, 2\n  other: 3\n", encoding="utf-8")

    with pytest.raises(CaseFileError, match="malformed YAML at line"):
        load_yaml(path)


def test_read_case_file_requires_a_mapping(tmp_path: Path) -> None:
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")

    with pytest.raises(CaseFileError, match="expected a mapping"):
        read_case_file(path)


def test_write_text_creates_parent_directories(tmp_path: Path) -> None:
    target = tmp_path / "a" / "b" / "report.txt"

    write_text(target, "ok\n")

    assert target.read_text(encoding="utf-8") == "ok\n"
