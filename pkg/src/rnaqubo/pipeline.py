"""Sequence to predicted structure: enumerate, build, solve, decode."""

from __future__ import annotations

from dataclasses import dataclass

from .models import PARAM_TYPES, Qubo, build
from .seq_model import CANONICAL, LoopPenaltyTable, NnTable, PairRule, RnaSequence
from .scoring import SecondaryStructure
from .solvers import EXHAUSTIVE, SIM_ANNEAL, SolveRequest, SolveResult, decode, solve
from .stems import BP_LENGTH, NN_ENERGY, CandidateSet, enumerate_quartets, enumerate_stems

AUTO = "auto"


@dataclass(frozen=True)
class SolverSettings:
    method: str = SIM_ANNEAL
    seed: int = 0
    reads: int = 8
    sweeps: int | None = None
    tenure: int | None = None
    cap: int = 25

    def request(self, qubo: Qubo, seed: int | None = None) -> SolveRequest:
        method = self.method
        if method == AUTO:
            method = EXHAUSTIVE if qubo.num_vars <= self.cap else SIM_ANNEAL
        return SolveRequest(
            qubo,
            method=method,
            seed=self.seed if seed is None else seed,
            reads=self.reads,
            sweeps=self.sweeps,
            tenure=self.tenure,
            cap=self.cap,
        )


@dataclass(frozen=True)
class FoldSettings:
    m: int = 2
    min_loop: int = 3
    rule: PairRule = CANONICAL
    nn_table: NnTable | None = None
    loop_table: LoopPenaltyTable | None = None


@dataclass
class Prediction:
    cset: CandidateSet
    qubo: Qubo
    result: SolveResult
    structure: SecondaryStructure


def candidates(model: int, seq: RnaSequence, fold: FoldSettings = FoldSettings()) -> CandidateSet:
    if model == 1:
        return enumerate_stems(seq, fold.rule, fold.m, fold.min_loop, BP_LENGTH, fold.nn_table)
    if model == 2:
        return enumerate_quartets(seq, fold.rule, fold.min_loop, fold.nn_table)
    if model == 3:
        return enumerate_stems(seq, fold.rule, fold.m, fold.min_loop, NN_ENERGY, fold.nn_table)
    raise ValueError(f"unknown model {model!r}")


def predict(
    model: int,
    seq: RnaSequence,
    params=None,
    solver: SolverSettings = SolverSettings(),
    fold: FoldSettings = FoldSettings(),
    cset: CandidateSet | None = None,
    seed: int | None = None,
) -> Prediction:
    cset = cset if cset is not None else candidates(model, seq, fold)
    params = params if params is not None else PARAM_TYPES[model]()
    qubo = build(model, cset, params, fold.loop_table)
    result = solve(solver.request(qubo, seed))
    return Prediction(cset, qubo, result, decode(cset, result.best_q))
