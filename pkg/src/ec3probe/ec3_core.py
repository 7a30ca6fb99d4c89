"""3-bit exact cover (EC3) instances, clause energies and a brute-force oracle.

Bit convention: an assignment ``z1 z2 ... zn`` is encoded as the integer whose
most significant bit is ``z1``.  Clause indices are 1-based, as in the usual
statement of the problem.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

#: Largest register size the enumerating routines will accept by default.
MAX_BITS = 20

# assignments are enumerated in blocks of this many integers
_CHUNK = 1 << 16


class InstanceError(ValueError):
    """Raised for malformed or invalid EC3 instance documents."""


class ResourceError(RuntimeError):
    """Raised when a request exceeds the configured size cap."""


@dataclass(frozen=True)
class EC3Instance:
    n: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise InstanceError(f"n must be an integer, got {self.n!r}")
        if self.n < 3:
            raise InstanceError(f"n must be at least 3, got {self.n}")
        if len(self.clauses) == 0:
            raise InstanceError("clause list is empty")
        clauses = []
        for pos, clause in enumerate(self.clauses, start=1):
            clauses.append(_check_clause(clause, self.n, pos))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "clauses", tuple(clauses))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def to_dict(self) -> dict:
        return {"n": self.n, "clauses": [list(c) for c in self.clauses]}


def _check_clause(clause, n: int, pos: int) -> tuple[int, int, int]:
    try:
        items = list(clause)
    except TypeError:
        raise InstanceError(f"clause {pos}: expected a list of 3 indices, got {clause!r}") from None
    if len(items) != 3:
        raise InstanceError(f"clause {pos}: expected 3 indices, got {len(items)}")
    for idx in items:
        if isinstance(idx, bool) or not isinstance(idx, (int, np.integer)):
            raise InstanceError(f"clause {pos}: index {idx!r} is not an integer")
        if not 1 <= idx <= n:
            raise InstanceError(f"clause {pos}: index {idx} out of range [1, {n}]")
    if len(set(items)) != 3:
        raise InstanceError(f"clause {pos}: repeated index in {items}")
    return tuple(int(i) for i in items)  # type: ignore[return-value]


@dataclass(frozen=True, order=True)
class Assignment:
    """A bit string ``z1 ... zn``; ``bits[0]`` is ``z1``."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"bits must be 0/1, got {self.bits}")

    @classmethod
    def from_string(cls, s: str) -> "Assignment":
        return cls(tuple(int(ch) for ch in s))

    @classmethod
    def from_index(cls, index: int, n: int) -> "Assignment":
        if not 0 <= index < (1 << n):
            raise ValueError(f"index {index} out of range for n={n}")
        return cls(tuple((index >> (n - 1 - p)) & 1 for p in range(n)))

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        out = 0
        for b in self.bits:
            out = (out << 1) | b
        return out

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class SpectrumSummary:
    degeneracies: dict[int, int]
    min_energy: int
    minimizers: list[Assignment] = field(default_factory=list)
    num_clauses: int = 0

    @property
    def satisfiable(self) -> bool:
        return self.min_energy == 0

    @property
    def num_solutions(self) -> int:
        """Number of satisfying assignments (``m``); zero when unsatisfiable."""
        return self.degeneracies.get(0, 0)

    @property
    def max_excited_degeneracy(self) -> int:
        """Largest degeneracy among levels with nonzero energy."""
        return max((m for e, m in self.degeneracies.items() if e != 0), default=0)

    def to_dict(self) -> dict:
        return {
            "degeneracies": {str(e): m for e, m in sorted(self.degeneracies.items())},
            "min_energy": self.min_energy,
            "minimizers": [str(a) for a in self.minimizers],
            "num_clauses": self.num_clauses,
            "satisfiable": self.satisfiable,
        }


def parse_instance(text: str) -> EC3Instance:
    """Parse the JSON instance format ``{"n": int, "clauses": [[i, j, k], ...]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed instance document: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    if "n" not in doc or "clauses" not in doc:
        raise InstanceError('instance document needs fields "n" and "clauses"')
    clauses = doc["clauses"]
    if not isinstance(clauses, list):
        raise InstanceError('"clauses" must be an array')
    return EC3Instance(doc["n"], tuple(clauses))


def load_instance(path: str | Path) -> EC3Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def _as_assignment(a: Assignment | Sequence[int] | str) -> Assignment:
    if isinstance(a, Assignment):
        return a
    if isinstance(a, str):
        return Assignment.from_string(a)
    return Assignment(tuple(int(b) for b in a))


def clause_energy(clause: Sequence[int], a: Assignment | Sequence[int] | str) -> int:
    """0 if exactly one of the three addressed bits is 1, otherwise 1."""
    bits = _as_assignment(a).bits
    ones = bits[clause[0] - 1] + bits[clause[1] - 1] + bits[clause[2] - 1]
    return 0 if ones == 1 else 1


def problem_energy(inst: EC3Instance, a: Assignment | Sequence[int] | str) -> int:
    a = _as_assignment(a)
    if a.n != inst.n:
        raise ValueError(f"assignment length {a.n} != instance n {inst.n}")
    return sum(clause_energy(c, a) for c in inst.clauses)


def _check_cap(n: int, max_bits: int) -> None:
    if n > max_bits:
        raise ResourceError(f"n = {n} exceeds the enumeration cap of {max_bits} bits")


def _energies_for_range(inst: EC3Instance, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    n = inst.n
    energy = np.zeros(idx.shape, dtype=np.int64)
    for i, j, k in inst.clauses:
        ones = ((idx >> (n - i)) & 1) + ((idx >> (n - j)) & 1) + ((idx >> (n - k)) & 1)
        energy += ones != 1
    return energy


def build_hp_diagonal(inst: EC3Instance, max_bits: int = MAX_BITS) -> np.ndarray:
    """Diagonal of the problem Hamiltonian, indexed by assignment encoding."""
    _check_cap(inst.n, max_bits)
    return _energies_for_range(inst, 0, 1 << inst.n)


def _iter_energy_chunks(inst: EC3Instance) -> Iterable[tuple[int, np.ndarray]]:
    total = 1 << inst.n
    for start in range(0, total, _CHUNK):
        yield start, _energies_for_range(inst, start, min(start + _CHUNK, total))


def brute_force_solve(inst: EC3Instance, max_bits: int = MAX_BITS) -> SpectrumSummary:
    """Enumerate all 2**n assignments; returns the full level/degeneracy table.

    Enumeration is streamed in fixed blocks so only the current minimizers
    are held in memory.
    """
    _check_cap(inst.n, max_bits)
    counts: dict[int, int] = {}
    best = None
    best_idx: list[np.ndarray] = []
    for start, energy in _iter_energy_chunks(inst):
        levels, m = np.unique(energy, return_counts=True)
        for e, cnt in zip(levels.tolist(), m.tolist()):
            counts[e] = counts.get(e, 0) + cnt
        low = int(levels[0])
        if best is None or low < best:
            best, best_idx = low, []
        if low == best:
            best_idx.append(start + np.flatnonzero(energy == low))
    assert best is not None
    minimizers = [Assignment.from_index(int(i), inst.n) for i in np.concatenate(best_idx)]
    return SpectrumSummary(
        degeneracies=dict(sorted(counts.items())),
        min_energy=best,
        minimizers=minimizers,
        num_clauses=inst.num_clauses,
    )


def satisfying_assignments(inst: EC3Instance) -> list[Assignment]:
    summary = brute_force_solve(inst)
    return summary.minimizers if summary.satisfiable else []


def random_instance(rng: np.random.Generator, n: int, num_clauses: int) -> EC3Instance:
    """Instance with ``num_clauses`` uniformly drawn 3-subsets of ``1..n``."""
    clauses = []
    for _ in range(num_clauses):
        triple = np.sort(rng.choice(n, size=3, replace=False)) + 1
        clauses.append(tuple(int(t) for t in triple))
    return EC3Instance(n, tuple(clauses))
