"""Generate the bundled toy dataset of designed structures.

Each entry is a sequence built around a dot-bracket template (hairpins and
H-type pseudoknots); the template is the known structure. Sequences are
resampled until every model's candidate set fits the exhaustive solver.

    python scripts/make_toy_dataset.py src/rnaqubo/data/toy --seed 2 --max-vars 25
"""

import argparse
from pathlib import Path

import numpy as np

from rnaqubo.dataset_io import ManifestEntry, emit_ct, is_pseudoknotted, write_manifest
from rnaqubo.pipeline import candidates
from rnaqubo.scoring import SecondaryStructure
from rnaqubo.seq_model import RnaSequence

TEMPLATES = [
    "..((((....))))..",
    ".(((((....)))))...",
    "((((...))))....",
    "((((....))))((((...))))",
    "..((((...))))..((((....))))",
    "((((..[[[[...))))...]]]]",
    ".((((.[[[[..))))....]]]]",
    "((((...[[[[..))))..]]]].",
    "(((..[[[[...)))...]]]]",
    "..((((..[[[[..))))...]]]]",
]

# GC-rich stems so that stem stability outweighs the hairpin penalty
PAIRS = ["GC", "CG", "GC", "CG", "AU", "UA", "GC", "CG"]


def parse_template(t):
    stacks = {"(": [], "[": []}
    close = {")": "(", "]": "["}
    pairs = []
    for i, ch in enumerate(t, start=1):
        if ch in stacks:
            stacks[ch].append(i)
        elif ch in close:
            pairs.append((stacks[close[ch]].pop(), i))
    return pairs


def fill(template, rng):
    pairs = parse_template(template)
    seq = list(rng.choice(list("ACAU"), len(template)))
    for i, j in pairs:
        a, b = PAIRS[rng.integers(len(PAIRS))]
        seq[i - 1], seq[j - 1] = a, b
    return "".join(seq), pairs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out", type=Path)
    ap.add_argument("--seed", type=int, default=2)
    ap.add_argument("--max-vars", type=int, default=25)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, template in enumerate(TEMPLATES):
        while True:
            bases, pairs = fill(template, rng)
            seq = RnaSequence(bases, f"toy{k:02d}")
            if all(len(candidates(m, seq)) <= args.max_vars for m in (1, 2, 3)):
                break
        truth = SecondaryStructure(len(seq), pairs)
        ct = args.out / f"{seq.id}.ct"
        fa = args.out / f"{seq.id}.fa"
        ct.write_text(emit_ct(seq, truth))
        fa.write_text(f">{seq.id}\n{seq.bases}\n")
        split = "train" if k % 2 == 0 else "test"
        entries.append(ManifestEntry(seq.id, fa, ct, is_pseudoknotted(truth), split))
    write_manifest(args.out / "manifest.tsv", entries)
    write_manifest(args.out / "manifest5.tsv", entries[:3] + entries[5:7])


if __name__ == "__main__":
    main()
