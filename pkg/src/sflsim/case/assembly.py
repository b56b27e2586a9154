"""Turn a validated case document into a runnable `Case`.

Symbols are defined in document order: constants, variables, the particle
system (which creates ``r`` and the per-particle ``gid`` field), then fields.
Each definition may refer to anything defined before it. Equations are parsed
last, against the complete symbol table.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sflsim.case.models import CaseDocument, Definition, GridBlock, ParameterSpace
from sflsim.case.workspace import CONSTANT, FIELD, VARIABLE, Workspace
from sflsim.core.io import read_points_file
from sflsim.core.tensor import Tensor
from sflsim.errors import CaseAssemblyError, SflSyntaxError
from sflsim.particles.domain import Domain, parse_boundary
from sflsim.particles.grid import generate_grid
from sflsim.particles.system import ParticleSystem
from sflsim.sfl.context import Diagnostics, EvalContext
from sflsim.sfl.functions import INTERACTION_OP
from sflsim.sfl.keywords import decode_kernel_keyword
from sflsim.sfl.nodes import ExpressionNode, KernelKeywordNode, function_calls, symbol_names
from sflsim.sfl.parser import parse_expression, parse_statement

logger = logging.getLogger(__name__)

GID_FIELD = "gid"
TIME_STEP = "dt"
PRINT_INTERVAL = "print_interval"


@dataclass(frozen=True)
class Equation:
    """``target = rhs``; `name` is a label, list position is the execution order."""

    name: str
    target: str
    rhs: ExpressionNode
    source: str
    needs_neighbors: bool

    def to_sfl(self) -> str:
        return f"{self.target}={self.rhs.to_sfl()}"


@dataclass
class InitialState:
    """Restored particle and symbol state for a hot start."""

    positions: np.ndarray
    active: np.ndarray
    fields: dict[str, np.ndarray]
    variables: dict[str, np.ndarray]
    time: float = 0.0
    frame_index: int = 0
    step_count: int = 0
    solve_counter: int = 0
    rebuild_count: int = 0
    warnings: dict[str, int] = field(default_factory=dict)


@dataclass
class Case:
    """Workspace, ordered equations, domain and run parameters of one simulation."""

    workspace: Workspace
    equations: list[Equation]
    domain: Domain
    parameters: ParameterSpace
    diagnostics: Diagnostics
    seed: int = 0
    name: str = "case"
    time: float = 0.0
    solve_counter: int = 0
    step_count: int = 0
    frame_index: int = 0
    resumed: bool = False
    document_fields: tuple[str, ...] = ()

    @property
    def system(self) -> ParticleSystem:
        assert self.workspace.system is not None
        return self.workspace.system

    @property
    def dt(self) -> float:
        return self.workspace.variables[TIME_STEP].item()

    @property
    def print_interval(self) -> float:
        """The ``print_interval`` variable when defined, else the parameter-space literal."""
        bound = self.workspace.variables.get(PRINT_INTERVAL)
        if bound is not None:
            return bound.item()
        return self.parameters.print_interval

    def context(self, solve_counter: int | None = None) -> EvalContext:
        return EvalContext(
            self.workspace,
            self.workspace.system,
            seed=self.seed,
            solve_counter=self.solve_counter if solve_counter is None else solve_counter,
            diagnostics=self.diagnostics,
        )


def check_tree(node: ExpressionNode, known: Callable[[str], bool], where: str) -> None:
    """Reject unknown symbols, unknown kernel keywords and misplaced keywords."""
    for name in symbol_names(node):
        if not known(name):
            raise CaseAssemblyError(f"{where}: unknown symbol '{name}'")
    allowed: set[int] = set()
    for call in function_calls(node):
        slot = call.spec.kernel_operand
        if call.spec.kind == INTERACTION_OP and slot is not None:
            operand = call.args[slot]
            if not isinstance(operand, KernelKeywordNode):
                raise CaseAssemblyError(
                    f"{where}: operand {slot + 1} of {call.name} must be a kernel keyword, got '{operand.to_sfl()}'"
                )
            allowed.add(id(operand))
    for item in node.walk():
        if isinstance(item, KernelKeywordNode):
            if id(item) not in allowed:
                raise CaseAssemblyError(f"{where}: kernel keyword '{item.raw}' is only valid as a kernel operand")
            try:
                decode_kernel_keyword(item.raw)
            except CaseAssemblyError as exc:
                raise CaseAssemblyError(f"{where}: {exc}") from None


def _parse(source: str, serials: Iterator[int], where: str) -> ExpressionNode:
    try:
        return parse_expression(source, serials)
    except SflSyntaxError as exc:
        raise SflSyntaxError(f"{where}: {exc}") from None


class _Assembler:
    def __init__(self, seed: int, diagnostics: Diagnostics) -> None:
        self.workspace = Workspace()
        self.seed = seed
        self.diagnostics = diagnostics
        self.serials = itertools.count()

    def known(self, name: str) -> bool:
        return self.workspace.kind_of(name) is not None

    def evaluate(self, source: str, where: str) -> Tensor:
        node = _parse(source, self.serials, where)
        check_tree(node, self.known, where)
        ctx = EvalContext(self.workspace, self.workspace.system, seed=self.seed, diagnostics=self.diagnostics)
        count = max(self.workspace.particle_count, 1)
        return node.evaluate(ctx, np.arange(count))

    def vector(self, source: str, where: str) -> np.ndarray:
        value = self.evaluate(source, where)
        if value.count != 1 or value.cols != 1:
            raise CaseAssemblyError(f"{where} must be a single scalar or column vector, got '{source}'")
        return value.data.reshape(-1)

    def scalar(self, source: str, where: str) -> float:
        values = self.vector(source, where)
        if values.size != 1:
            raise CaseAssemblyError(f"{where} must be a scalar, got '{source}'")
        return float(values[0])

    def domain(self, spec: CaseDocument) -> Domain:
        dom = spec.simulation.case.workspace.particle_system.domain
        return Domain(
            cell_size=self.vector(dom.cell_size, "domain cell_size"),
            minimum=self.vector(dom.minimum, "domain minimum"),
            maximum=self.vector(dom.maximum, "domain maximum"),
            boundary=parse_boundary(dom.boundary),
        )

    def grid_block(self, block: GridBlock, number: int, domain: Domain, base_dir: Path) -> tuple[np.ndarray, np.ndarray]:
        where = f"grid block {number}"
        gid = self.scalar(block.gid, f"{where} gid")
        if block.file is not None:
            positions = read_points_file(base_dir / block.file, domain.dimension)
            return positions, np.full(positions.shape[0], gid)
        assert block.gpos is not None and block.gsize is not None and block.gip_dist is not None
        gpos = self.vector(block.gpos, f"{where} gpos")
        goffset = self.vector(block.goffset, f"{where} goffset") if block.goffset else np.zeros_like(gpos)
        positions, gids = generate_grid(
            gpos, self.vector(block.gsize, f"{where} gsize"), goffset, self.vector(block.gip_dist, f"{where} gip_dist"), gid
        )
        if positions.shape[1] != domain.dimension:
            raise CaseAssemblyError(f"{where} is {positions.shape[1]}D but the domain is {domain.dimension}D")
        return positions, gids


def _define_all(
    definitions: list[Definition], define: Callable[[str, Tensor], None], evaluate: Callable[[str, str], Tensor], kind: str
) -> None:
    for item in definitions:
        define(item.name, evaluate(item.source, f"{kind} '{item.name}'"))


def assemble_case(
    document: CaseDocument,
    *,
    base_dir: Path | None = None,
    seed: int = 0,
    name: str = "case",
    initial_state: InitialState | None = None,
    diagnostics: Diagnostics | None = None,
) -> Case:
    """Define every symbol, build the particle system and parse the equations."""
    diagnostics = diagnostics or Diagnostics()
    if initial_state is not None:
        diagnostics.restore(initial_state.warnings)
    asm = _Assembler(seed, diagnostics)
    ws = asm.workspace
    spec = document.simulation.case.workspace
    base_dir = base_dir or Path.cwd()

    _define_all(spec.constants, ws.define_constant, asm.evaluate, CONSTANT)
    _define_all(spec.variables, ws.define_variable, asm.evaluate, VARIABLE)
    if TIME_STEP not in ws.variables:
        raise CaseAssemblyError("the variable 'dt' (time step) is not defined")
    if not ws.variables[TIME_STEP].is_scalar:
        raise CaseAssemblyError("the variable 'dt' must be a scalar")

    domain = asm.domain(document)
    if initial_state is None:
        blocks = [asm.grid_block(block, n, domain, base_dir) for n, block in enumerate(spec.particle_system.grid)]
        positions = np.concatenate([block[0] for block in blocks])
        gids = np.concatenate([block[1] for block in blocks])
    else:
        positions = initial_state.positions
        gids = initial_state.fields.get(GID_FIELD, np.zeros(positions.shape[0])).reshape(-1)
        if positions.ndim != 2 or positions.shape[1] != domain.dimension:
            raise CaseAssemblyError(
                f"hot-start positions are {positions.shape[-1]}D but the domain is {domain.dimension}D"
            )
    system = ParticleSystem(domain, positions, diagnostics)
    if initial_state is not None:
        system.active[:] = initial_state.active
        system.rebuild_count = initial_state.rebuild_count
    system.check_inside()
    system.apply_boundary_shift()
    system.build_cells()
    ws.attach(system)
    ws.define_field(GID_FIELD, Tensor.wrap(gids.reshape(-1, 1, 1)))

    _define_all(spec.fields, ws.define_field, asm.evaluate, FIELD)
    if initial_state is not None:
        _restore(ws, initial_state)

    equations = [_equation(item, asm) for item in document.simulation.case.equations]
    case = Case(
        workspace=ws,
        equations=equations,
        domain=domain,
        parameters=document.simulation.parameter_space,
        diagnostics=diagnostics,
        seed=seed,
        name=name,
        document_fields=tuple(item.name for item in spec.fields),
    )
    if initial_state is not None:
        case.time = initial_state.time
        case.resumed = True
        case.frame_index = initial_state.frame_index
        case.step_count = initial_state.step_count
        case.solve_counter = initial_state.solve_counter
    logger.info(
        "assembled %s: %d particles, %d constants, %d variables, %d fields, %d equations",
        name,
        system.count,
        len(ws.constants),
        len(ws.variables),
        len(ws.fields),
        len(equations),
    )
    return case


def _equation(item: Definition, asm: _Assembler) -> Equation:
    where = f"equation '{item.name}'"
    try:
        statement = parse_statement(item.source, asm.serials)
    except SflSyntaxError as exc:
        raise SflSyntaxError(f"{where}: {exc}") from None
    if statement.target is None:
        raise CaseAssemblyError(f"{where} has no left-hand side: '{item.source}'")
    kind = asm.workspace.kind_of(statement.target)
    if kind is None:
        raise CaseAssemblyError(f"{where}: unknown symbol '{statement.target}'")
    if kind == CONSTANT:
        raise CaseAssemblyError(f"{where} assigns to the constant '{statement.target}'")
    check_tree(statement.expression, asm.known, where)
    return Equation(
        name=item.name,
        target=statement.target,
        rhs=statement.expression,
        source=item.source,
        needs_neighbors=any(call.spec.needs_neighbors for call in function_calls(statement.expression)),
    )


def _restore(ws: Workspace, state: InitialState) -> None:
    """Overwrite fields and variables with hot-start values; every mismatch is reported."""
    problems: list[str] = []
    count = ws.particle_count
    for name, values in state.fields.items():
        if name == GID_FIELD:
            continue
        if name not in ws.fields:
            problems.append(f"field '{name}' in the result file is not defined by the case")
            continue
        current = ws.fields[name]
        if values.shape != (count, current.rows, current.cols):
            problems.append(
                f"field '{name}' has shape {values.shape[1]}x{values.shape[2]} in the result file, "
                f"{current.shape_str()} in the case"
            )
            continue
        ws.fields[name] = Tensor.wrap(values)
    for name, values in state.variables.items():
        if name not in ws.variables:
            problems.append(f"variable '{name}' in the result file is not defined by the case")
            continue
        current = ws.variables[name]
        if values.shape != (1, current.rows, current.cols):
            problems.append(
                f"variable '{name}' has shape {values.shape[1]}x{values.shape[2]} in the result file, "
                f"{current.shape_str()} in the case"
            )
            continue
        ws.variables[name] = Tensor.wrap(values)
    if problems:
        raise CaseAssemblyError("hot start does not match the case:\n  " + "\n  ".join(problems))
