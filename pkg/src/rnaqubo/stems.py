"""Candidate stems and stacked quartets, and how pairs of them interact.

Every candidate becomes one binary variable of a QUBO. A pair of candidates
is related in exactly one way: they share a base (overlap), their spans cross
(pseudoknot), one quartet continues the other (stacked, quartets only), or
they are independent. Only the first three are stored.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError
from .seq_model import CANONICAL, NnTable, PairRule, RnaSequence, can_pair, default_nn_table


class Kind(str, enum.Enum):
    OVERLAP = "Overlap"
    PSEUDOKNOT = "Pseudoknot"
    STACKED = "Stacked"
    INDEPENDENT = "Independent"


BP_LENGTH = "bp_length"
NN_ENERGY = "nn_energy"


@dataclass(frozen=True, order=True)
class StemCandidate:
    """A run of ``length`` nested pairs (first, last), (first+1, last-1), ...

    Indices are 1-based. ``weight`` is the bp count or the summed stacking
    stability score depending on how the set was enumerated. Stacked quartets
    are candidates with ``length == 2``.
    """

    first: int
    last: int
    length: int
    weight: float = field(compare=False)

    @property
    def loop_size(self) -> int:
        return self.last - self.first - 2 * self.length + 1

    def pairs(self) -> list[tuple[int, int]]:
        return [(self.first + t, self.last - t) for t in range(self.length)]

    def bases(self) -> set[int]:
        five = range(self.first, self.first + self.length)
        three = range(self.last - self.length + 1, self.last + 1)
        return set(five) | set(three)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.first, self.last, self.length)


QuartetCandidate = StemCandidate


@dataclass(frozen=True)
class PairRelation:
    i: int
    j: int
    kind: Kind
    n_ss: int | None = None
    direction: str | None = None


@dataclass(frozen=True)
class CandidateSet:
    seq: RnaSequence
    candidates: tuple[StemCandidate, ...]
    relations: tuple[PairRelation, ...] = ()
    weight_mode: str = BP_LENGTH
    quartets: bool = False
    min_loop: int = 3
    m: int = 2

    @property
    def mu(self) -> float:
        return max((c.weight for c in self.candidates), default=0.0)

    def __len__(self):
        return len(self.candidates)

    def relation_map(self) -> dict[tuple[int, int], PairRelation]:
        return {(r.i, r.j): r for r in self.relations}


# ---------------------------------------------------------------------------
# enumeration


def pair_matrix(seq: RnaSequence, rule: PairRule = CANONICAL, min_loop: int = 3) -> np.ndarray:
    """Boolean ``(n, n)`` matrix; ``M[i-1, j-1]`` for 1-based ``i < j``.

    True iff the bases can pair and ``j - i > min_loop``. The diagonal and
    lower triangle are always False.
    """
    if min_loop < 0:
        raise DomainError("min_loop must be non-negative")
    s = seq.bases
    n = len(s)
    mat = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + min_loop + 1, n):
            mat[i, j] = can_pair(s[i], s[j], rule)
    return mat


def _runs(mat: np.ndarray) -> Iterator[tuple[int, int, int]]:
    """Maximal anti-diagonal runs as (outer i, outer j, length), 1-based."""
    n = mat.shape[0]
    for s in range(1, 2 * n - 2):  # 0-based i + j
        i, run_start, length = max(0, s - n + 1), None, 0
        while i < s - i:
            if mat[i, s - i]:
                if run_start is None:
                    run_start = i
                length += 1
            elif run_start is not None:
                yield run_start + 1, s - run_start + 1, length
                run_start, length = None, 0
            i += 1
        if run_start is not None:
            yield run_start + 1, s - run_start + 1, length


def stem_stability(seq: RnaSequence, first: int, last: int, length: int, table: NnTable) -> float:
    """Summed ``-dG`` over the ``length - 1`` stacks of a stem."""
    total = 0.0
    for t in range(length - 1):
        outer = (seq.at(first + t), seq.at(last - t))
        inner = (seq.at(first + t + 1), seq.at(last - t - 1))
        total += table.stability(outer, inner)
    return total


def enumerate_stems(
    seq: RnaSequence,
    rule: PairRule = CANONICAL,
    m: int = 2,
    min_loop: int = 3,
    weight_mode: str = BP_LENGTH,
    table: NnTable | None = None,
    classify: bool = True,
) -> CandidateSet:
    """All stems of at least ``m`` pairs, including every sub-stem of a run.

    In ``nn_energy`` mode stems whose stacks sum to a non-positive stability
    score are dropped, so every emitted weight is positive.
    """
    if m < 2:
        raise DomainError("minimum stem length must be at least 2")
    if weight_mode not in (BP_LENGTH, NN_ENERGY):
        raise DomainError(f"unknown weight mode {weight_mode!r}")
    table = table or default_nn_table()
    mat = pair_matrix(seq, rule, min_loop)
    cands = []
    for i0, j0, run in _runs(mat):
        for a in range(run - m + 1):
            for length in range(m, run - a + 1):
                first, last = i0 + a, j0 - a
                if weight_mode == BP_LENGTH:
                    w = float(length)
                else:
                    w = stem_stability(seq, first, last, length, table)
                    if w <= 0:
                        continue
                cands.append(StemCandidate(first, last, length, w))
    cands.sort()
    out = CandidateSet(seq, tuple(cands), (), weight_mode, False, min_loop, m)
    return classify_pairs(out) if classify else out


def enumerate_quartets(
    seq: RnaSequence,
    rule: PairRule = CANONICAL,
    min_loop: int = 3,
    table: NnTable | None = None,
    classify: bool = True,
) -> CandidateSet:
    """Every stacked quartet, weighted by the stability score of its stack."""
    table = table or default_nn_table()
    mat = pair_matrix(seq, rule, min_loop)
    cands = []
    for i0, j0, run in _runs(mat):
        for a in range(run - 1):
            first, last = i0 + a, j0 - a
            cands.append(StemCandidate(first, last, 2, stem_stability(seq, first, last, 2, table)))
    cands.sort()
    out = CandidateSet(seq, tuple(cands), (), NN_ENERGY, True, min_loop, 2)
    return classify_pairs(out) if classify else out


# ---------------------------------------------------------------------------
# pair classification


def _strands_intersect(a: StemCandidate, b: StemCandidate) -> bool:
    sa = ((a.first, a.first + a.length - 1), (a.last - a.length + 1, a.last))
    sb = ((b.first, b.first + b.length - 1), (b.last - b.length + 1, b.last))
    return any(x0 <= y1 and y0 <= x1 for x0, x1 in sa for y0, y1 in sb)


def relate(a: StemCandidate, b: StemCandidate, quartets: bool = False) -> tuple[Kind, int | None, str | None]:
    """Relation between two candidates as ``(kind, n_ss, direction)``.

    For quartets, ``direction`` says whether the second argument sits
    ``"inner"`` or ``"outer"`` of the first.
    """
    swapped = (b.first, b.last) < (a.first, a.last)
    lo, hi = (b, a) if swapped else (a, b)
    if quartets and (hi.first, hi.last) == (lo.first + 1, lo.last - 1):
        return Kind.STACKED, None, "outer" if swapped else "inner"
    if _strands_intersect(lo, hi):
        return Kind.OVERLAP, None, None
    if lo.first < hi.first < lo.last < hi.last:
        n_ss = (hi.last - lo.first + 1) - 2 * lo.length - 2 * hi.length
        return Kind.PSEUDOKNOT, n_ss, None
    return Kind.INDEPENDENT, None, None


def classify_pairs(cset: CandidateSet) -> CandidateSet:
    """Fill ``relations`` with a line sweep over candidate spans.

    Two candidates can only overlap, cross or stack if their spans
    ``[first, last]`` intersect, so the sweep keeps the spans still open at
    the current start position and tests only those.
    """
    cands = cset.candidates
    order = sorted(range(len(cands)), key=lambda k: (cands[k].first, cands[k].last))
    active: list[int] = []
    rels = []
    for k in order:
        c = cands[k]
        active = [a for a in active if cands[a].last >= c.first]
        for a in active:
            kind, n_ss, direction = relate(cands[a], c, cset.quartets)
            if kind is Kind.INDEPENDENT:
                continue
            i, j = (a, k) if a < k else (k, a)
            if direction is not None and i != a:
                direction = "outer" if direction == "inner" else "inner"
            rels.append(PairRelation(i, j, kind, n_ss, direction))
        active.append(k)
    rels.sort(key=lambda r: (r.i, r.j))
    return replace(cset, relations=tuple(rels))


# ---------------------------------------------------------------------------
# worst-case counting


def worst_case_sequence(n: int) -> RnaSequence:
    """Alternating G/C sequence of length ``n``; maximises candidate counts."""
    if n < 1:
        raise DomainError("length must be at least 1")
    return RnaSequence(("GC" * n)[:n], f"worst_case_{n}")


def _check_counting_domain(n: int, m: int) -> None:
    if n % 2 == 0:
        raise DomainError(f"closed form holds for odd N only, got {n}")
    if m < 1 or n < 2 * m + 1:
        raise DomainError(f"need N >= 2m + 1, got N={n}, m={m}")


def stem_count_closed_form(n: int, m: int) -> int:
    """Number of candidate stems on the worst-case sequence of odd length ``n``."""
    _check_counting_domain(n, m)
    num = (
        n**3
        + n**2 * (9 - 6 * m)
        + n * (12 * m**2 - 36 * m + 23)
        + (-8 * m**3 + 36 * m**2 - 46 * m)
        + 15
    )
    q, r = divmod(num, 24)
    assert r == 0, (n, m, num)
    return q


def pair_count_closed_form(n: int, m: int) -> int:
    s = stem_count_closed_form(n, m)
    return s * (s - 1) // 2


# ---------------------------------------------------------------------------
# line format


def to_lines(cset: CandidateSet) -> str:
    rows = [f"STEM {c.first} {c.last} {c.length} {c.weight!r}" for c in cset.candidates]
    for r in cset.relations:
        row = f"REL {r.i} {r.j} {r.kind.value}"
        if r.kind is Kind.PSEUDOKNOT:
            row += f" {r.n_ss}"
        elif r.kind is Kind.STACKED:
            row += f" {r.direction}"
        rows.append(row)
    return "".join(r + "\n" for r in rows)


def parse_lines(text: str) -> tuple[list[StemCandidate], list[PairRelation]]:
    cands, rels = [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "STEM":
            cands.append(StemCandidate(int(parts[1]), int(parts[2]), int(parts[3]), float(parts[4])))
        elif parts[0] == "REL":
            kind = Kind(parts[3])
            n_ss = int(parts[4]) if kind is Kind.PSEUDOKNOT else None
            direction = parts[4] if kind is Kind.STACKED else None
            rels.append(PairRelation(int(parts[1]), int(parts[2]), kind, n_ss, direction))
        else:
            raise ValueError(f"unknown record {parts[0]!r}")
    return cands, rels


def count_pairs(cands: Sequence[StemCandidate]) -> int:
    """Unordered candidate pairs the classifier has to consider."""
    return len(cands) * (len(cands) - 1) // 2
