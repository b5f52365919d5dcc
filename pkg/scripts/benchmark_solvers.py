"""Hit rate and wall time of the heuristic solvers against the exhaustive ground state.

    python3 scripts/benchmark_solvers.py --count 100 --reads 1 2 4 8
"""

import argparse
import time

import numpy as np

from rnaqubo.models import build
from rnaqubo.pipeline import candidates
from rnaqubo.seq_model import RnaSequence
from rnaqubo.solvers import EXHAUSTIVE, SIM_ANNEAL, TABU, SolveRequest, solve


def instances(count, seed, max_vars):
    rng = np.random.default_rng(seed)
    while count:
        seq = RnaSequence("".join(rng.choice(list("ACGU"), size=int(rng.integers(12, 26)))))
        for model in (1, 2, 3):
            cset = candidates(model, seq)
            if 0 < len(cset) <= max_vars:
                yield model, build(model, cset)
        count -= 1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-vars", type=int, default=22)
    ap.add_argument("--reads", type=int, nargs="+", default=[1, 2, 4, 8])
    args = ap.parse_args()

    problems = [(q, solve(SolveRequest(q, method=EXHAUSTIVE)).best_energy) for _, q in instances(args.count, args.seed, args.max_vars)]
    print(f"{len(problems)} QUBOs")
    print("method\treads\thits\tseconds")
    for method in (SIM_ANNEAL, TABU):
        for reads in args.reads:
            start = time.perf_counter()
            hits = sum(
                abs(solve(SolveRequest(q, method=method, seed=i, reads=reads)).best_energy - e) <= 1e-9
                for i, (q, e) in enumerate(problems)
            )
            print(f"{method}\t{reads}\t{hits}/{len(problems)}\t{time.perf_counter() - start:.2f}")


if __name__ == "__main__":
    main()
