"""Evaluation context shared by all nodes while one equation is solved."""

from __future__ import annotations

import logging
import threading
from collections import Counter
from collections.abc import Callable, Hashable
from typing import TYPE_CHECKING, Protocol

import numpy as np

from sflsim.core.tensor import Tensor
from sflsim.errors import EvaluationError

if TYPE_CHECKING:
    from sflsim.particles.system import PairList, ParticleSystem

logger = logging.getLogger(__name__)


class SymbolSource(Protocol):
    def value(self, name: str) -> Tensor: ...


class Diagnostics:
    """Thread-safe warning counters; the first warning of each category is logged."""

    def __init__(self) -> None:
        self._counts: Counter[str] = Counter()
        self._lock = threading.Lock()

    def warn(self, category: str, message: str, count: int = 1) -> None:
        if count <= 0:
            return
        with self._lock:
            first = category not in self._counts
            self._counts[category] += count
        if first:
            logger.warning("%s: %s", category, message)

    def counts(self) -> dict[str, int]:
        with self._lock:
            return dict(sorted(self._counts.items()))

    @property
    def total(self) -> int:
        with self._lock:
            return sum(self._counts.values())

    def restore(self, counts: dict[str, int]) -> None:
        with self._lock:
            self._counts = Counter(counts)


class EvalContext:
    """Symbol values, particle system, random stream key and per-solve memo cache."""

    def __init__(
        self,
        symbols: SymbolSource,
        system: ParticleSystem | None = None,
        *,
        seed: int = 0,
        solve_counter: int = 0,
        diagnostics: Diagnostics | None = None,
    ) -> None:
        self.symbols = symbols
        self.system = system
        self.seed = seed
        self.solve_counter = solve_counter
        self.diagnostics = diagnostics or Diagnostics()
        self._cache: dict[Hashable, Tensor] = {}
        self._warned: set[Hashable] = set()
        self._lock = threading.RLock()

    @property
    def particle_count(self) -> int:
        return 0 if self.system is None else self.system.count

    @property
    def all_indices(self) -> np.ndarray:
        return np.arange(self.particle_count)

    @property
    def active_indices(self) -> np.ndarray:
        if self.system is None:
            return np.arange(0)
        return np.flatnonzero(self.system.active)

    def lookup(self, name: str) -> Tensor:
        return self.symbols.value(name)

    def neighbors(self) -> PairList:
        """Current pair list, rebuilt first if particles moved."""
        if self.system is None:
            raise EvaluationError("interaction operators need a particle system")
        with self._lock:
            return self.system.ensure_neighbors()

    def memo(self, key: Hashable, compute: Callable[[], Tensor]) -> Tensor:
        """Compute a value once per solve; concurrent callers wait for the first."""
        with self._lock:
            cached = self._cache.get(key)
            if cached is None:
                cached = compute()
                self._cache[key] = cached
            return cached

    def warn_once(self, node: object, category: str, message: str) -> None:
        """Count `category` once per solve for `node`, however many blocks evaluate it."""
        key = ("warned", category, id(node))
        with self._lock:
            if key in self._warned:
                return
            self._warned.add(key)
        self.diagnostics.warn(category, message)

    def full(self, node: object, evaluate: Callable[[np.ndarray], Tensor]) -> Tensor:
        """Value of `node` for every particle, computed once per solve."""
        count = self.particle_count
        return self.memo(("full", id(node)), lambda: evaluate(np.arange(count)).broadcast(count))
