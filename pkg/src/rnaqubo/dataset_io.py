"""CT and FASTA files, known-structure stems, and dataset manifests.

Manifest files are tab-separated with a header row::

    id  sequence  ct  pseudoknotted  split

``sequence`` and ``ct`` are paths relative to the manifest's directory; an
empty ``sequence`` (or ``-``) means the sequence is taken from the CT file.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import (
    DuplicateId,
    InconsistentPairing,
    LengthMismatch,
    MalformedRow,
    MissingFile,
)
from .seq_model import NnTable, RnaSequence, default_nn_table, parse_sequence
from .scoring import SecondaryStructure
from .stems import BP_LENGTH, NN_ENERGY, StemCandidate, stem_stability

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# CT


def parse_ct(text: str, id: str = "", strict: bool = False) -> tuple[RnaSequence, SecondaryStructure]:
    """Parse a single-molecule 6-column connectivity table.

    Leading ``#`` lines are skipped. Anything after the count on the header
    line is taken as the title. With ``strict`` the prev/next columns must
    match the row index.
    """
    lines = [(no, ln) for no, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    while lines and lines[0][1].lstrip().startswith("#"):
        lines.pop(0)
    if not lines:
        raise MalformedRow(0, "", "empty CT file")
    head_no, head = lines[0]
    head_fields = head.split(None, 1)
    try:
        n = int(head_fields[0])
    except ValueError:
        raise MalformedRow(head_no, head, "header must start with the base count") from None
    title = head_fields[1].strip() if len(head_fields) > 1 else ""
    body = lines[1:]
    if len(body) != n:
        raise LengthMismatch(f"header declares {n} bases, found {len(body)} rows")
    bases, partner = [], [0] * (n + 1)
    for row, (no, ln) in enumerate(body, start=1):
        cols = ln.split()
        if len(cols) < 6:
            raise MalformedRow(no, ln, "expected 6 columns")
        try:
            idx, prev, nxt, pk = int(cols[0]), int(cols[2]), int(cols[3]), int(cols[4])
        except ValueError:
            raise MalformedRow(no, ln, "non-integer column") from None
        if idx != row:
            raise MalformedRow(no, ln, f"expected index {row}")
        if not 0 <= pk <= n or pk == idx:
            raise MalformedRow(no, ln, f"partner {pk} out of range")
        if strict and (prev != idx - 1 or nxt != (idx + 1) % (n + 1)):
            raise MalformedRow(no, ln, "prev/next columns do not match the index")
        base = cols[1].upper().replace("T", "U")
        if len(base) != 1 or base not in "ACGU":
            raise MalformedRow(no, ln, f"unsupported base {cols[1]!r}")
        bases.append(base)
        partner[idx] = pk
    for i in range(1, n + 1):
        j = partner[i]
        if j and partner[j] != i:
            raise InconsistentPairing(i, j)
    seq = RnaSequence("".join(bases), id or title)
    pairs = [(i, partner[i]) for i in range(1, n + 1) if partner[i] > i]
    return seq, SecondaryStructure(n, pairs)


def emit_ct(seq: RnaSequence, s: SecondaryStructure, title: str | None = None) -> str:
    if len(seq) != s.n:
        raise LengthMismatch(f"sequence length {len(seq)} != structure length {s.n}")
    partner = s.partners()
    n = s.n
    rows = [f"{n:5d} {title if title is not None else seq.id}".rstrip()]
    for i in range(1, n + 1):
        nxt = i + 1 if i < n else 0
        rows.append(f"{i:5d} {seq.at(i)} {i - 1:5d} {nxt:5d} {partner[i]:5d} {i:5d}")
    return "\n".join(rows) + "\n"


def read_ct(path: str | Path, **kw) -> tuple[RnaSequence, SecondaryStructure]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    return parse_ct(path.read_text(), id=kw.pop("id", path.stem), **kw)


# ---------------------------------------------------------------------------
# FASTA


def parse_fasta(text: str) -> list[RnaSequence]:
    records: list[RnaSequence] = []
    name, chunks = None, []

    def flush():
        if name is not None:
            records.append(parse_sequence("".join(chunks), name))

    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith(">"):
            flush()
            header = line[1:].split()
            name, chunks = (header[0] if header else ""), []
        else:
            if name is None:
                name = ""
            chunks.append(line)
    flush()
    return records


def read_fasta(path: str | Path) -> list[RnaSequence]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    return parse_fasta(path.read_text())


# ---------------------------------------------------------------------------
# structure analysis


def known_stems(
    s: SecondaryStructure,
    m: int = 2,
    weight_mode: str = BP_LENGTH,
    seq: RnaSequence | None = None,
    table: NnTable | None = None,
) -> tuple[list[StemCandidate], float]:
    """Maximal runs of stacked pairs with at least ``m`` pairs, and their max weight.

    Runs shorter than ``m`` (isolated pairs included) are skipped. ``nn_energy``
    weights need the sequence.
    """
    if weight_mode == NN_ENERGY and seq is None:
        raise ValueError("nn_energy weights need the sequence")
    table = table or default_nn_table()
    pairs = s.pairs
    stems = []
    for i, j in sorted(pairs):
        if (i - 1, j + 1) in pairs:
            continue
        length = 1
        while (i + length, j - length) in pairs and i + length < j - length:
            length += 1
        if length < m:
            continue
        w = float(length) if weight_mode == BP_LENGTH else stem_stability(seq, i, j, length, table)
        stems.append(StemCandidate(i, j, length, w))
    mu = max((c.weight for c in stems), default=0.0)
    return stems, mu


def is_pseudoknotted(s: SecondaryStructure) -> bool:
    """True iff two pairs cross. Sort by 5' index and keep a stack of open 3' ends."""
    stack: list[int] = []
    for i, j in sorted(s.pairs):
        while stack and stack[-1] < i:
            stack.pop()
        if stack and stack[-1] < j:
            return True
        stack.append(j)
    return False


# ---------------------------------------------------------------------------
# manifests


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    sequence_path: Path | None
    ct_path: Path
    pseudoknotted: bool
    split: str

    def load(self) -> tuple[RnaSequence, SecondaryStructure]:
        seq, truth = read_ct(self.ct_path, id=self.id)
        if self.sequence_path is not None:
            recs = read_fasta(self.sequence_path)
            if not recs:
                raise LengthMismatch(f"{self.sequence_path} holds no sequence")
            if recs[0].bases != seq.bases:
                raise LengthMismatch(f"{self.id}: FASTA and CT sequences differ")
            seq = RnaSequence(recs[0].bases, self.id)
        return seq, truth


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def select(self, split: str | None = None, pseudoknotted: bool | None = None) -> "DatasetManifest":
        return DatasetManifest(
            tuple(
                e
                for e in self.entries
                if (split is None or e.split == split)
                and (pseudoknotted is None or e.pseudoknotted == pseudoknotted)
            )
        )

    def load(self) -> list[tuple[str, RnaSequence, SecondaryStructure]]:
        return [(e.id, *e.load()) for e in self.entries]


_TRUE = {"1", "true", "yes", "t", "y"}
_FALSE = {"0", "false", "no", "f", "n"}


def _flag(value: str) -> bool:
    v = value.strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise ValueError(f"not a boolean: {value!r}")


def load_manifest(path: str | Path, check: bool = True) -> DatasetManifest:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    root = path.parent
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with path.open(newline="") as fh:
        rows = [r for r in fh if r.strip() and not r.startswith("#")]
    for row in csv.DictReader(rows, delimiter="\t"):
        eid = row["id"].strip()
        if eid in seen:
            raise DuplicateId(eid)
        seen.add(eid)
        seq_field = (row.get("sequence") or "").strip()
        seq_path = None if seq_field in ("", "-") else root / seq_field
        ct_path = root / row["ct"].strip()
        for p in (seq_path, ct_path):
            if p is not None and not p.is_file():
                raise MissingFile(str(p))
        entry = ManifestEntry(eid, seq_path, ct_path, _flag(row["pseudoknotted"]), row["split"].strip())
        if check:
            _, truth = read_ct(ct_path)
            if is_pseudoknotted(truth) != entry.pseudoknotted:
                log.warning("%s: manifest pseudoknotted=%s but the CT says %s",
                            eid, entry.pseudoknotted, is_pseudoknotted(truth))
        entries.append(entry)
    return DatasetManifest(tuple(entries))


def write_manifest(path: str | Path, entries: Iterable[ManifestEntry]) -> None:
    path = Path(path)
    root = path.parent
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["id", "sequence", "ct", "pseudoknotted", "split"])
        for e in entries:
            seq = e.sequence_path.relative_to(root) if e.sequence_path else "-"
            w.writerow([e.id, seq, e.ct_path.relative_to(root), int(e.pseudoknotted), e.split])
