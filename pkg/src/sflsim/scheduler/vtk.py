"""Legacy VTK PolyData result files.

Points are the particle positions (padded to three components), one vertex
cell per particle. Scalar fields are written as ``SCALARS``, fields shaped
like a position as ``VECTORS`` (padded to three components) and any other
shape as a point-data ``FIELD`` array in row-major order. Frame metadata
(run counters, domain, constants, variables, equations) is stored as UTF-8
JSON text in ``unsigned_char`` field-data arrays.

ASCII numbers use the shortest representation that parses back to the same
double; binary files use big-endian doubles and 32-bit integers.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np
import pydantic_core

from sflsim.errors import ResultFileError
from sflsim.scheduler.frames import FrameMetadata, ResultFrame

ASCII = "ascii"
BINARY = "binary"
FORMATS = (ASCII, BINARY)

METADATA_PARTS = ("run", "domain", "constants", "variables", "equations")
_PREFIX = "sflsim_"
_BINARY_TYPES = {"double": ">f8", "float": ">f4", "int": ">i4", "unsigned_char": "u1", "vtkIdType": ">i4"}


class _Writer:
    def __init__(self, binary: bool) -> None:
        self.binary = binary
        self.chunks: list[bytes] = []

    def line(self, text: str) -> None:
        self.chunks.append(text.encode("ascii") + b"\n")

    def doubles(self, values: np.ndarray, per_line: int) -> None:
        values = np.asarray(values, dtype=np.float64)
        if self.binary:
            self._raw(values.astype(">f8").tobytes())
            return
        flat = values.reshape(-1, per_line) if values.size else values.reshape(0, per_line)
        for row in flat:
            self.line(" ".join(repr(float(x)) for x in row))

    def ints(self, values: np.ndarray, per_line: int, dtype: str = ">i4") -> None:
        values = np.asarray(values)
        if self.binary:
            self._raw(values.astype(dtype).tobytes())
            return
        flat = values.reshape(-1)
        for start in range(0, flat.size, per_line):
            self.line(" ".join(str(int(x)) for x in flat[start : start + per_line]))

    def _raw(self, payload: bytes) -> None:
        self.chunks.append(payload + b"\n")

    def getvalue(self) -> bytes:
        return b"".join(self.chunks)


def _pad3(values: np.ndarray) -> np.ndarray:
    out = np.zeros((values.shape[0], 3))
    out[:, : values.shape[1]] = values
    return out


def _metadata_parts(metadata: FrameMetadata) -> dict[str, bytes]:
    data = metadata.model_dump(mode="json")
    parts: dict[str, Any] = {name: data.pop(name) for name in METADATA_PARTS if name != "run"}
    parts["run"] = data
    return {name: pydantic_core.to_json(parts[name], inf_nan_mode="constants") for name in METADATA_PARTS}


def encode_vtk(frame: ResultFrame, fmt: str = ASCII) -> bytes:
    if fmt not in FORMATS:
        raise ValueError(f"unknown output format '{fmt}'; expected one of: {', '.join(FORMATS)}")
    out = _Writer(binary=fmt == BINARY)
    meta = frame.metadata
    n = frame.count
    out.line("# vtk DataFile Version 3.0")
    out.line(f"sflsim {meta.case} frame {meta.index} time {meta.time!r}"[:255])
    out.line(fmt.upper())
    out.line("DATASET POLYDATA")

    parts = _metadata_parts(meta)
    out.line(f"FIELD FieldData {len(parts)}")
    for name, payload in parts.items():
        out.line(f"{_PREFIX}{name} 1 {len(payload)} unsigned_char")
        out.ints(np.frombuffer(payload, dtype=np.uint8), per_line=32, dtype="u1")

    out.line(f"POINTS {n} double")
    out.doubles(_pad3(frame.positions), per_line=3)
    out.line(f"VERTICES {n} {2 * n}")
    out.ints(np.column_stack([np.ones(n, dtype=np.int64), np.arange(n)]), per_line=2)

    out.line(f"POINT_DATA {n}")
    other: list[tuple[str, np.ndarray]] = []
    for name, values in frame.fields.items():
        rows, cols = values.shape[1], values.shape[2]
        if (rows, cols) == (1, 1):
            out.line(f"SCALARS {name} double 1")
            out.line("LOOKUP_TABLE default")
            out.doubles(values.reshape(-1, 1), per_line=1)
        elif cols == 1 and rows == meta.dimension:
            out.line(f"VECTORS {name} double")
            out.doubles(_pad3(values.reshape(n, rows)), per_line=3)
        else:
            other.append((name, values.reshape(n, rows * cols)))
    if other:
        out.line(f"FIELD FieldData {len(other)}")
        for name, values in other:
            out.line(f"{name} {values.shape[1]} {n} double")
            out.doubles(values, per_line=values.shape[1])
    return out.getvalue()


def write_vtk(frame: ResultFrame, path: Path, fmt: str = ASCII) -> None:
    """Write `frame` to `path` as legacy VTK PolyData."""
    payload = encode_vtk(frame, fmt)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as exc:
        raise ResultFileError(f"cannot write result file {path}: {exc.strerror or exc}") from exc


class _Cursor:
    def __init__(self, data: bytes, path: Path) -> None:
        self.data = data
        self.path = path
        self.pos = 0
        self.binary = False

    def at_end(self) -> bool:
        while self.pos < len(self.data) and self.data[self.pos] in b" \t\r\n":
            self.pos += 1
        return self.pos >= len(self.data)

    def line(self) -> str:
        while True:
            if self.pos >= len(self.data):
                raise self.error("unexpected end of file")
            end = self.data.find(b"\n", self.pos)
            end = len(self.data) if end < 0 else end
            raw = self.data[self.pos : end]
            self.pos = end + 1
            text = raw.decode("ascii", errors="replace").strip()
            if text:
                return text

    def values(self, count: int, kind: str) -> np.ndarray:
        if self.binary:
            dtype = np.dtype(_BINARY_TYPES.get(kind, ">f8"))
            size = count * dtype.itemsize
            if self.pos + size > len(self.data):
                raise self.error(f"truncated {kind} block")
            values = np.frombuffer(self.data, dtype=dtype, count=count, offset=self.pos)
            self.pos += size
            if self.data[self.pos : self.pos + 1] == b"\n":
                self.pos += 1
            return values.astype(np.float64)
        tokens: list[str] = []
        while len(tokens) < count:
            tokens.extend(self.line().split())
        if len(tokens) != count:
            raise self.error(f"expected {count} values, found {len(tokens)}")
        try:
            return np.array([float(token) for token in tokens], dtype=np.float64)
        except ValueError as exc:
            raise self.error(f"bad number: {exc}") from None

    def error(self, message: str) -> ResultFileError:
        return ResultFileError(f"{self.path}: {message}")


def _read_field_arrays(cursor: _Cursor, header: list[str]) -> dict[str, np.ndarray]:
    arrays: dict[str, np.ndarray] = {}
    for _ in range(int(header[2])):
        name, comps, tuples, kind = cursor.line().split()[:4]
        values = cursor.values(int(comps) * int(tuples), kind)
        arrays[name] = values.reshape(int(tuples), int(comps))
    return arrays


def decode_vtk(data: bytes, path: Path) -> ResultFrame:
    cursor = _Cursor(data, path)
    if not cursor.line().startswith("# vtk DataFile"):
        raise cursor.error("not a legacy VTK file")
    cursor.line()
    mode = cursor.line().upper()
    if mode not in ("ASCII", "BINARY"):
        raise cursor.error(f"unknown file mode '{mode}'")
    cursor.binary = mode == "BINARY"
    if cursor.line().upper() != "DATASET POLYDATA":
        raise cursor.error("only POLYDATA datasets are supported")

    global_arrays: dict[str, np.ndarray] = {}
    point_arrays: dict[str, np.ndarray] = {}
    positions: np.ndarray | None = None
    in_point_data = False
    while not cursor.at_end():
        header = cursor.line().split()
        keyword = header[0].upper()
        if keyword == "FIELD":
            (point_arrays if in_point_data else global_arrays).update(_read_field_arrays(cursor, header))
        elif keyword == "POINTS":
            positions = cursor.values(3 * int(header[1]), header[2]).reshape(-1, 3)
        elif keyword in ("VERTICES", "LINES", "POLYGONS", "TRIANGLE_STRIPS"):
            cursor.values(int(header[2]), "int")
        elif keyword == "POINT_DATA":
            in_point_data = True
        elif keyword == "SCALARS":
            comps = int(header[3]) if len(header) > 3 else 1
            cursor.line()
            count = 0 if positions is None else positions.shape[0]
            point_arrays[header[1]] = cursor.values(count * comps, header[2]).reshape(count, comps)
        elif keyword == "VECTORS":
            count = 0 if positions is None else positions.shape[0]
            point_arrays[header[1]] = cursor.values(count * 3, header[2]).reshape(count, 3)
        else:
            raise cursor.error(f"unsupported section '{header[0]}'")
    if positions is None:
        raise cursor.error("file has no POINTS section")

    parts: dict[str, Any] = {}
    for name in METADATA_PARTS:
        raw = global_arrays.get(f"{_PREFIX}{name}")
        if raw is None:
            raise cursor.error(f"missing '{_PREFIX}{name}' metadata; not written by sflsim")
        parts[name] = pydantic_core.from_json(raw.astype(np.uint8).tobytes())
    metadata = FrameMetadata.model_validate({**parts.pop("run"), **parts})

    n = positions.shape[0]
    fields: dict[str, np.ndarray] = {}
    for name, (rows, cols) in metadata.field_shapes.items():
        values = point_arrays.get(name)
        if values is None:
            raise cursor.error(f"field '{name}' listed in the metadata has no point data")
        fields[name] = np.ascontiguousarray(values[:, : rows * cols]).reshape(n, rows, cols)
    return ResultFrame(
        metadata=metadata,
        positions=np.ascontiguousarray(positions[:, : metadata.dimension]),
        fields=fields,
    )


def read_vtk(path: Path) -> ResultFrame:
    """Load a result file written by `write_vtk`."""
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ResultFileError(f"cannot read result file {path}: {exc.strerror or exc}") from exc
    return decode_vtk(data, path)
