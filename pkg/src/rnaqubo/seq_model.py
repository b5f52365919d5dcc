"""Sequences, base-pair rules and the nearest-neighbour lookup tables.

Tables are read from line-oriented ``KEY<TAB>VALUE`` files; ``#`` starts a
comment line. Stacking keys are ``XY/ZW``: top strand 5'-XY-3' paired over
bottom strand 3'-ZW-5', so the outer pair is (X, Z) and the inner pair (Y, W).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DomainError, InvalidBase, MissingEntry

BASES = frozenset("ACGU")
FORBIDDEN = math.inf
"""Sentinel returned by :func:`hairpin_penalty` for loops too small to close."""


@dataclass(frozen=True)
class RnaSequence:
    bases: str
    id: str = ""

    def __post_init__(self):
        if not self.bases:
            raise DomainError("sequence must contain at least one base")
        for pos, b in enumerate(self.bases, start=1):
            if b not in BASES:
                raise InvalidBase(pos, b)

    def __len__(self):
        return len(self.bases)

    def __str__(self):
        return self.bases

    def at(self, i: int) -> str:
        """Base at 1-based position ``i``."""
        if not 1 <= i <= len(self.bases):
            raise IndexError(i)
        return self.bases[i - 1]


def parse_sequence(text: str, id: str = "") -> RnaSequence:
    cleaned = "".join(text.split()).upper().replace("T", "U")
    for pos, b in enumerate(cleaned, start=1):
        if b not in BASES:
            raise InvalidBase(pos, b)
    return RnaSequence(cleaned, id)


@dataclass(frozen=True)
class PairRule:
    allowed: frozenset = field(
        default_factory=lambda: frozenset(
            frozenset(p) for p in (("G", "C"), ("A", "U"), ("G", "U"))
        )
    )

    def __contains__(self, pair) -> bool:
        return frozenset(pair) in self.allowed


CANONICAL = PairRule()


def can_pair(a: str, b: str, rule: PairRule = CANONICAL) -> bool:
    return a != b and frozenset((a, b)) in rule.allowed


# ---------------------------------------------------------------------------
# table files


def _read_kv(lines: Iterable[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("\t")
        if not sep:
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"expected KEY<TAB>VALUE, got {raw!r}")
            key, value = parts
        out[key.strip()] = value.strip()
    return out


def _fmt(value: float) -> str:
    if value == FORBIDDEN:
        return "forbidden"
    return repr(float(value))


def _open_table(path: str | Path | None, default_name: str) -> list[str]:
    if path is None:
        text = resources.files("rnaqubo.data").joinpath(default_name).read_text()
    else:
        text = Path(path).read_text()
    return text.splitlines()


@dataclass(frozen=True)
class NnTable:
    """Stacking free energies (kcal/mol, 37 C) keyed ``XY/ZW``."""

    entries: Mapping[str, float]

    @classmethod
    def load(cls, path: str | Path | None = None) -> "NnTable":
        kv = _read_kv(_open_table(path, "turner2004_stack.tsv"))
        entries = {}
        for key, value in kv.items():
            top, _, bottom = key.partition("/")
            if len(top) != 2 or len(bottom) != 2 or set(top + bottom) - BASES:
                raise ValueError(f"bad stack key {key!r}")
            entries[key] = float(value)
        return cls(entries)

    def serialize(self) -> str:
        return "".join(f"{k}\t{_fmt(v)}\n" for k, v in self.entries.items())

    def stability(self, pair1, pair2) -> float:
        """Stability score of a stack, ``-dG``; larger is more stable."""
        return -stack_energy(self, pair1, pair2)


def stack_key(pair1, pair2) -> str:
    """Key for outer pair ``pair1 = (5' base, 3' base)`` stacked on inner ``pair2``."""
    return f"{pair1[0]}{pair2[0]}/{pair1[1]}{pair2[1]}"


def stack_energy(table: NnTable, pair1, pair2) -> float:
    key = stack_key(pair1, pair2)
    try:
        return table.entries[key]
    except KeyError:
        raise MissingEntry(key) from None


@dataclass(frozen=True)
class LoopPenaltyTable:
    hairpin: Mapping[int, float]
    inline_stem: Mapping[int, float]
    inline_default: float = 1.0

    @classmethod
    def load(cls, path: str | Path | None = None) -> "LoopPenaltyTable":
        kv = _read_kv(_open_table(path, "loop_penalties.tsv"))
        hairpin: dict[int, float] = {}
        inline: dict[int, float] = {}
        default = 1.0
        for key, value in kv.items():
            kind, _, size = key.partition(".")
            val = FORBIDDEN if value.lower() == "forbidden" else float(value)
            if kind == "hairpin":
                hairpin[int(size)] = val
            elif kind == "inline_stem" and size == "default":
                default = val
            elif kind == "inline_stem":
                inline[int(size)] = val
            else:
                raise ValueError(f"unknown loop-penalty key {key!r}")
        finite = [s for s, v in hairpin.items() if v != FORBIDDEN]
        if not finite:
            raise ValueError("hairpin table has no finite entries")
        return cls(hairpin, inline, default)

    def serialize(self) -> str:
        rows = [f"hairpin.{s}\t{_fmt(v)}" for s, v in self.hairpin.items()]
        rows += [f"inline_stem.{n}\t{_fmt(v)}" for n, v in self.inline_stem.items()]
        rows.append(f"inline_stem.default\t{_fmt(self.inline_default)}")
        return "".join(r + "\n" for r in rows)

    @property
    def max_hairpin_size(self) -> int:
        return max(self.hairpin)

    def inline(self, length: int) -> float:
        return self.inline_stem.get(length, self.inline_default)


def hairpin_penalty(table: LoopPenaltyTable, loop_size: int) -> float:
    """Hairpin penalty, or :data:`FORBIDDEN` for loops of size 2 or less."""
    if loop_size < 0:
        raise DomainError(f"loop size must be non-negative, got {loop_size}")
    if loop_size <= 2:
        return FORBIDDEN
    size = min(loop_size, table.max_hairpin_size)
    try:
        return table.hairpin[size]
    except KeyError:
        raise MissingEntry(f"hairpin.{size}") from None


_default_nn: NnTable | None = None
_default_loops: LoopPenaltyTable | None = None


def default_nn_table() -> NnTable:
    global _default_nn
    if _default_nn is None:
        _default_nn = NnTable.load()
    return _default_nn


def default_loop_table() -> LoopPenaltyTable:
    global _default_loops
    if _default_loops is None:
        _default_loops = LoopPenaltyTable.load()
    return _default_loops
