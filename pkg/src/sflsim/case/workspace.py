"""Symbol storage: constants, variables, per-particle fields and the position field ``r``."""

from __future__ import annotations

from sflsim.core.tensor import Tensor
from sflsim.errors import CaseAssemblyError, EvaluationError, TensorShapeError
from sflsim.particles.system import ParticleSystem
from sflsim.sfl.keywords import looks_like_kernel_keyword

CONSTANT = "constant"
VARIABLE = "variable"
FIELD = "field"
POSITION = "position"

POSITION_FIELD = "r"


class Workspace:
    """One flat namespace; every name is a constant, a variable, a field or ``r``."""

    def __init__(self) -> None:
        self.constants: dict[str, Tensor] = {}
        self.variables: dict[str, Tensor] = {}
        self.fields: dict[str, Tensor] = {}
        self.system: ParticleSystem | None = None

    @property
    def particle_count(self) -> int:
        return 0 if self.system is None else self.system.count

    def kind_of(self, name: str) -> str | None:
        if name == POSITION_FIELD and self.system is not None:
            return POSITION
        if name in self.constants:
            return CONSTANT
        if name in self.variables:
            return VARIABLE
        if name in self.fields:
            return FIELD
        return None

    def names(self) -> list[str]:
        names = [*self.constants, *self.variables]
        if self.system is not None:
            names.append(POSITION_FIELD)
        return [*names, *self.fields]

    def value(self, name: str) -> Tensor:
        if name == POSITION_FIELD and self.system is not None:
            return self.system.position_tensor()
        for table in (self.constants, self.variables, self.fields):
            found = table.get(name)
            if found is not None:
                return found
        raise EvaluationError(f"unknown symbol '{name}'")

    def _claim(self, name: str) -> None:
        if not name.isidentifier():
            raise CaseAssemblyError(f"'{name}' is not a valid symbol name")
        if name == POSITION_FIELD:
            raise CaseAssemblyError("'r' is reserved for particle positions")
        if looks_like_kernel_keyword(name):
            raise CaseAssemblyError(f"'{name}' is reserved as a kernel keyword")
        kind = self.kind_of(name)
        if kind is not None:
            raise CaseAssemblyError(f"duplicate name '{name}' (already defined as a {kind})")

    def define_constant(self, name: str, value: Tensor) -> None:
        self._claim(name)
        self.constants[name] = _uniform(name, value)

    def define_variable(self, name: str, value: Tensor) -> None:
        self._claim(name)
        self.variables[name] = _uniform(name, value)

    def attach(self, system: ParticleSystem) -> None:
        if self.fields:
            raise CaseAssemblyError("the particle system must be attached before fields are defined")
        self.system = system

    def define_field(self, name: str, value: Tensor) -> None:
        self._claim(name)
        if self.system is None:
            raise CaseAssemblyError(f"field '{name}' defined before the particle system")
        self.fields[name] = value.broadcast(self.system.count)

    def set_variable(self, name: str, value: Tensor) -> None:
        current = self.variables[name]
        value = _uniform(name, value)
        if value.shape != current.shape:
            raise TensorShapeError(
                f"variable '{name}' has shape {current.shape_str()}, equation gives {value.shape_str()}"
            )
        self.variables[name] = value

    def set_field(self, name: str, value: Tensor) -> None:
        current = self.value(name)
        if value.shape != current.shape:
            raise TensorShapeError(f"field '{name}' has shape {current.shape_str()}, equation gives {value.shape_str()}")
        if name == POSITION_FIELD:
            assert self.system is not None
            self.system.set_positions(value.broadcast(self.system.count).data)
            return
        self.fields[name] = value.broadcast(self.particle_count)

    def snapshot(self) -> dict[str, dict[str, Tensor]]:
        """Shallow copy of all symbol tables; tensors are immutable."""
        return {
            CONSTANT: dict(self.constants),
            VARIABLE: dict(self.variables),
            FIELD: dict(self.fields),
        }


def _uniform(name: str, value: Tensor) -> Tensor:
    if value.count != 1:
        raise CaseAssemblyError(f"'{name}' must have a single value, its expression depends on particles")
    return value
