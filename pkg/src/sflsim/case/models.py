"""Pydantic models for the case-file document.

The document keeps the YAML layout::

    simulation:
      case:
        workspace: {constants, variables, particle_system: {domain, grid}, fields}
        equations: [...]
      parameter_space: {simulated_time, print_interval}

Definition lists are lists of one-key mappings whose order is binding. All
definition values are SFL source text; YAML numbers are turned back into text
so ``rho0: 1000`` and ``rho0: "1000"`` mean the same thing.
"""

from __future__ import annotations

import difflib
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from sflsim.errors import CaseFileError


def suggest_key(key: str, valid: list[str]) -> str:
    """`` (did you mean 'x'?)`` for the closest valid key, or an empty string."""
    match = difflib.get_close_matches(key, valid, n=1, cutoff=0.6)
    return f" (did you mean '{match[0]}'?)" if match else ""


def _as_source(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        raise ValueError("definition value is empty")
    if isinstance(value, (list, dict)):
        raise ValueError(f"expected an SFL expression, got {type(value).__name__}")
    return str(value).strip()


class SchemaModel(BaseModel):
    """Base model rejecting unknown keys with a suggestion."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="before")
    @classmethod
    def _reject_unknown_keys(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        valid = list(cls.model_fields)
        for key in data:
            if key not in cls.model_fields:
                raise ValueError(f"unknown key '{key}'{suggest_key(str(key), valid)}")
        return data


class Definition(BaseModel):
    """One ``name: expression`` entry of a definition list."""

    model_config = ConfigDict(frozen=True)

    name: str
    source: str

    @model_validator(mode="before")
    @classmethod
    def _from_mapping(cls, data: Any) -> Any:
        if isinstance(data, dict) and set(data) != {"name", "source"}:
            if len(data) != 1:
                raise ValueError(f"each entry must be a single 'name: value' pair, got {len(data)} keys")
            ((name, value),) = data.items()
            return {"name": str(name).strip(), "source": _as_source(value)}
        return data


class DomainSpec(SchemaModel):
    cell_size: str
    minimum: str
    maximum: str
    boundary: str

    @field_validator("cell_size", "minimum", "maximum", "boundary", mode="before")
    @classmethod
    def _text(cls, value: Any) -> str:
        return _as_source(value)


class GridBlock(SchemaModel):
    """A rectilinear lattice (``gpos``/``gsize``/``gip_dist``) or an external points ``file``."""

    gid: str = "0"
    gpos: str | None = None
    gsize: str | None = None
    goffset: str | None = None
    gip_dist: str | None = None
    file: str | None = None

    @field_validator("gid", "gpos", "gsize", "goffset", "gip_dist", mode="before")
    @classmethod
    def _text(cls, value: Any) -> str | None:
        return None if value is None else _as_source(value)

    @model_validator(mode="after")
    def _one_source(self) -> GridBlock:
        lattice = [self.gpos, self.gsize, self.gip_dist]
        if self.file is not None:
            if any(item is not None for item in lattice):
                raise ValueError("grid block takes either 'file' or gpos/gsize/gip_dist, not both")
        elif any(item is None for item in lattice):
            raise ValueError("grid block needs gpos, gsize and gip_dist (or a 'file')")
        return self


class ParticleSystemSpec(SchemaModel):
    domain: DomainSpec
    grid: list[GridBlock]

    @field_validator("grid", mode="before")
    @classmethod
    def _blocks(cls, value: Any) -> Any:
        return [value] if isinstance(value, dict) else value


class WorkspaceSpec(SchemaModel):
    constants: list[Definition] = Field(default_factory=list)
    variables: list[Definition] = Field(default_factory=list)
    particle_system: ParticleSystemSpec
    fields: list[Definition] = Field(default_factory=list)

    @field_validator("constants", "variables", "fields", mode="before")
    @classmethod
    def _empty(cls, value: Any) -> Any:
        return [] if value is None else value


class CaseSpec(SchemaModel):
    workspace: WorkspaceSpec
    equations: list[Definition] = Field(default_factory=list)

    @field_validator("equations", mode="before")
    @classmethod
    def _empty(cls, value: Any) -> Any:
        return [] if value is None else value


class ParameterSpace(SchemaModel):
    simulated_time: float = Field(gt=0)
    print_interval: float = Field(gt=0)


class SimulationSpec(SchemaModel):
    case: CaseSpec
    parameter_space: ParameterSpace


class CaseDocument(SchemaModel):
    """Root of a case file."""

    simulation: SimulationSpec


def _location(loc: tuple[int | str, ...]) -> str:
    text = ""
    for part in loc:
        if isinstance(part, int):
            text += f"[{part}]"
        elif not part.startswith(("function-", "list[")):
            text += f".{part}" if text else part
    return text or "document"


def validate_document(data: Any, source: str = "case file") -> CaseDocument:
    """Validate a loaded YAML document; schema errors become `CaseFileError`."""
    try:
        return CaseDocument.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        message = str(first["msg"]).removeprefix("Value error, ")
        raise CaseFileError(f"{source}: {_location(first['loc'])}: {message}") from None
