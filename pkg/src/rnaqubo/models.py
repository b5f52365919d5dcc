"""The three parameterised RNA-folding Hamiltonians in QUBO form.

All three are minimised. Overlapping candidates always add a large positive
``overlap_penalty`` so that no ground state assigns a base two partners.

* model 1: stems weighted by bp length, squared-length reward with a
  pseudoknot discount ``X`` on the pairwise reward.
* model 2: stacked quartets weighted by stacking stability, reward ``M+`` for
  stacked neighbours and penalty ``M-`` for crossing ones.
* model 3: stems weighted by summed stacking stability, hairpin-loop penalty
  and a loop-length based pseudoknot penalty.
"""

from __future__ import annotations

import itertools
import json
import math
from importlib import resources
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import ForbiddenLoop, LengthMismatch, WrongCandidateKind, WrongWeightMode
from .seq_model import FORBIDDEN, LoopPenaltyTable, default_loop_table, hairpin_penalty
from .stems import BP_LENGTH, NN_ENERGY, CandidateSet, Kind, PairRelation

MIN_OVERLAP_PENALTY = 1000.0


@dataclass(frozen=True)
class Qubo:
    num_vars: int
    linear: Mapping[int, float]
    quadratic: Mapping[tuple[int, int], float]
    labels: Mapping[int, tuple] = field(default_factory=dict)

    def __post_init__(self):
        for i, j in self.quadratic:
            if not 0 <= i < j < self.num_vars:
                raise ValueError(f"quadratic key {(i, j)} is not canonical")
        for i in self.linear:
            if not 0 <= i < self.num_vars:
                raise ValueError(f"linear key {i} out of range")

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """``(h, J)`` with ``J`` symmetric and zero on the diagonal."""
        h = np.zeros(self.num_vars)
        J = np.zeros((self.num_vars, self.num_vars))
        for i, v in self.linear.items():
            h[i] = v
        for (i, j), v in self.quadratic.items():
            J[i, j] = J[j, i] = v
        return h, J

    def max_abs_coefficient(self) -> float:
        vals = [abs(v) for v in self.linear.values()] + [abs(v) for v in self.quadratic.values()]
        return max(vals, default=0.0)

    # interchange file ------------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "num_vars": self.num_vars,
            "linear": {str(i): float(v) for i, v in sorted(self.linear.items())},
            "quadratic": {f"{i},{j}": float(v) for (i, j), v in sorted(self.quadratic.items())},
            "labels": {str(i): list(v) for i, v in sorted(self.labels.items())},
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Qubo":
        doc = json.loads(text)
        quad = {}
        for key, v in doc.get("quadratic", {}).items():
            i, j = (int(x) for x in key.split(","))
            if i > j:
                i, j = j, i
            quad[(i, j)] = quad.get((i, j), 0.0) + float(v)
        return cls(
            int(doc["num_vars"]),
            {int(i): float(v) for i, v in doc.get("linear", {}).items()},
            quad,
            {int(i): tuple(v) for i, v in doc.get("labels", {}).items()},
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> "Qubo":
        return cls.from_json(Path(path).read_text())


def energy(qubo: Qubo, q: Sequence[int]) -> float:
    """Sum of ``h_i q_i`` plus ``J_ij q_i q_j`` over stored terms."""
    if len(q) != qubo.num_vars:
        raise LengthMismatch(f"bit vector has {len(q)} entries, QUBO has {qubo.num_vars} variables")
    total = 0.0
    for i, v in qubo.linear.items():
        if q[i]:
            total += v
    for (i, j), v in qubo.quadratic.items():
        if q[i] and q[j]:
            total += v
    return total


# ---------------------------------------------------------------------------
# parameters


class _Params:
    """Shared helpers for the parameter dataclasses."""

    tunable: tuple[str, ...] = ()

    def vector(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in self.tunable], dtype=float)

    def with_vector(self, values):
        kw = asdict(self)
        kw.update({n: float(v) for n, v in zip(self.tunable, values)})
        return type(self)(**kw)

    @classmethod
    def ones(cls):
        return cls(**{n: 1.0 for n in cls.tunable})

    def to_kv(self) -> str:
        return "".join(f"{n}\t{getattr(self, n)!r}\n" for n in self.tunable)

    @classmethod
    def from_kv(cls, text: str, base=None):
        base = base if base is not None else cls()
        kw = asdict(base)
        names = {f.name for f in fields(cls)}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, value = line.split(None, 1)
            if key not in names:
                raise ValueError(f"unknown parameter {key!r} for {cls.__name__}")
            kw[key] = None if value == "auto" else float(value)
        return cls(**kw)


@dataclass(frozen=True)
class Model1Params(_Params):
    c_L: float = 0.639
    c_B: float = 0.223
    X: float = 0.681
    overlap_penalty: float | None = None

    tunable = ("c_L", "c_B", "X")
    bounds = ((0.0, math.inf), (0.0, math.inf), (1e-6, 1.0))


@dataclass(frozen=True)
class Model2Params(_Params):
    m_plus: float = 1.748
    m_minus: float = 0.386
    overlap_penalty: float | None = None

    tunable = ("m_plus", "m_minus")
    bounds = ((0.0, math.inf), (0.0, math.inf))


@dataclass(frozen=True)
class Model3Params(_Params):
    alpha: float = 1.604
    beta: float = 2.212
    p1: float = 1.495
    p2: float = 1.338
    e_dim: float = 1.0
    overlap_penalty: float | None = None

    tunable = ("alpha", "beta", "p1", "p2")
    bounds = ((0.0, math.inf),) * 4


PARAM_TYPES = {1: Model1Params, 2: Model2Params, 3: Model3Params}


def preset_names() -> list[str]:
    root = resources.files("rnaqubo.data").joinpath("presets")
    return sorted(p.name for p in root.iterdir() if p.is_dir())


def load_preset(name: str, model: int):
    """Parameters shipped under ``data/presets/<name>/model<k>.tsv``."""
    entry = resources.files("rnaqubo.data").joinpath("presets").joinpath(name).joinpath(f"model{model}.tsv")
    if not entry.is_file():
        raise KeyError(f"no preset {name!r} for model {model}; known: {preset_names()}")
    return PARAM_TYPES[model].from_kv(entry.read_text(), base=PARAM_TYPES[model].ones())


def _finish(cset: CandidateSet, linear, soft, overlaps, penalty) -> Qubo:
    """Assemble a Qubo, scaling the overlap penalty to dominate every reward."""
    if penalty is None:
        scale = sum(abs(v) for v in linear.values()) + sum(abs(v) for v in soft.values())
        penalty = max(MIN_OVERLAP_PENALTY, 10.0 * scale)
    quad = dict(soft)
    for key in overlaps:
        quad[key] = penalty
    labels = {i: c.as_tuple() for i, c in enumerate(cset.candidates)}
    return Qubo(len(cset.candidates), linear, dict(sorted(quad.items())), labels)


def build_model1(cset: CandidateSet, p: Model1Params = Model1Params()) -> Qubo:
    if cset.weight_mode != BP_LENGTH or cset.quartets:
        raise WrongWeightMode("model 1 needs stems weighted by bp length")
    cands = cset.candidates
    mu = cset.mu
    linear = {i: p.c_L * (c.weight - mu) ** 2 - p.c_B * c.weight**2 for i, c in enumerate(cands)}
    rels = cset.relation_map()
    soft, overlaps = {}, []
    for i, j in itertools.combinations(range(len(cands)), 2):
        rel = rels.get((i, j))
        if rel is not None and rel.kind is Kind.OVERLAP:
            overlaps.append((i, j))
            continue
        delta = p.X if rel is not None and rel.kind is Kind.PSEUDOKNOT else 1.0
        soft[(i, j)] = -(2.0 * p.c_B * cands[i].weight * cands[j].weight * delta + 1.0)
    return _finish(cset, linear, soft, overlaps, p.overlap_penalty)


def build_model2(cset: CandidateSet, p: Model2Params = Model2Params()) -> Qubo:
    if not cset.quartets:
        raise WrongCandidateKind("model 2 needs stacked-quartet candidates")
    linear = {i: -c.weight for i, c in enumerate(cset.candidates)}
    soft, overlaps = {}, []
    for rel in cset.relations:
        if rel.kind is Kind.STACKED:
            soft[(rel.i, rel.j)] = -p.m_plus
        elif rel.kind is Kind.PSEUDOKNOT:
            soft[(rel.i, rel.j)] = p.m_minus
        elif rel.kind is Kind.OVERLAP:
            overlaps.append((rel.i, rel.j))
    return _finish(cset, linear, soft, overlaps, p.overlap_penalty)


def pk_penalty(
    rel: PairRelation,
    cset: CandidateSet,
    table: LoopPenaltyTable | None = None,
    p: Model3Params = Model3Params(),
) -> float:
    """Pseudoknot penalty from intervening single strands and in-line stem lengths.

    ``n_ss`` is clamped to at least 1 to keep the logarithm finite.
    """
    if rel.kind is not Kind.PSEUDOKNOT:
        raise ValueError("pk_penalty applies to pseudoknotted pairs only")
    table = table or default_loop_table()
    n_ss = max(rel.n_ss or 0, 1)
    lam = table.inline(cset.candidates[rel.i].length) + table.inline(cset.candidates[rel.j].length)
    return p.p1 * math.log(p.e_dim**2 * n_ss) + p.p2 * math.log(lam)


def model3_linear(k: float, mu: float, loop_penalty: float, p: Model3Params) -> float:
    return p.alpha * (k - mu) ** 2 - p.beta * (k - loop_penalty)


def build_model3(
    cset: CandidateSet,
    table: LoopPenaltyTable | None = None,
    p: Model3Params = Model3Params(),
) -> Qubo:
    if cset.weight_mode != NN_ENERGY or cset.quartets:
        raise WrongWeightMode("model 3 needs stems weighted by stacking stability")
    table = table or default_loop_table()
    mu = cset.mu
    linear = {}
    for i, c in enumerate(cset.candidates):
        loop = hairpin_penalty(table, c.loop_size)
        if loop == FORBIDDEN:
            raise ForbiddenLoop(f"stem {c.as_tuple()} closes a loop of size {c.loop_size}")
        linear[i] = model3_linear(c.weight, mu, loop, p)
    soft, overlaps = {}, []
    for rel in cset.relations:
        if rel.kind is Kind.PSEUDOKNOT:
            soft[(rel.i, rel.j)] = pk_penalty(rel, cset, table, p)
        elif rel.kind is Kind.OVERLAP:
            overlaps.append((rel.i, rel.j))
    return _finish(cset, linear, soft, overlaps, p.overlap_penalty)


def build(model: int, cset: CandidateSet, params=None, table: LoopPenaltyTable | None = None) -> Qubo:
    if model == 1:
        return build_model1(cset, params or Model1Params())
    if model == 2:
        return build_model2(cset, params or Model2Params())
    if model == 3:
        return build_model3(cset, table, params or Model3Params())
    raise ValueError(f"unknown model {model!r}")
