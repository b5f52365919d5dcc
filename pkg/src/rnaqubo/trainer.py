"""SPSA training of model parameters against known structures.

The loss is built from per-structure MCC scores of the predicted structures:
``1 - mean(MCC)`` by default, or ``mean((1 - MCC)**2)``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import RnaQuboError
from .models import PARAM_TYPES
from .pipeline import FoldSettings, SolverSettings, candidates, predict
from .scoring import SecondaryStructure, score
from .seq_model import RnaSequence

log = logging.getLogger(__name__)

LOSS_ONE_MINUS_MEAN = "1-mcc"
LOSS_MEAN_SQUARED = "mse"

Dataset = Sequence[tuple[RnaSequence, SecondaryStructure]]


@dataclass(frozen=True)
class SpsaConfig:
    iterations: int = 60
    a: float | None = None  # None: calibrate from the first gradient estimates
    c: float = 0.1
    A: float | None = None  # None: 0.1 * iterations
    alpha_exp: float = 0.602
    gamma_exp: float = 0.101
    seed: int = 0
    initial: tuple[float, ...] | None = None  # None: all ones
    target_step: float = 0.5
    calibration_samples: int = 8
    loss_kind: str = LOSS_ONE_MINUS_MEAN

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.c <= 0:
            raise ValueError("c must be positive")
        for name in ("alpha_exp", "gamma_exp"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if self.loss_kind not in (LOSS_ONE_MINUS_MEAN, LOSS_MEAN_SQUARED):
            raise ValueError(f"unknown loss kind {self.loss_kind!r}")

    @property
    def stability(self) -> float:
        return self.A if self.A is not None else 0.1 * self.iterations

    def c_k(self, k: int) -> float:
        return self.c / (k + 1) ** self.gamma_exp

    def a_k(self, k: int, a: float) -> float:
        return a / (k + 1 + self.stability) ** self.alpha_exp


def perturbation(seed: int, k: int, dim: int) -> np.ndarray:
    """Bernoulli +/-1 vector for iteration ``k``; a pure function of (seed, k)."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, k])))
    return rng.integers(0, 2, dim) * 2.0 - 1.0


def _clip(theta: np.ndarray, bounds) -> np.ndarray:
    if bounds is None:
        return theta
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    return np.clip(theta, lo, hi)


def gradient_estimate(theta, delta, ck, loss_fn, bounds=None):
    """Two-measurement gradient estimate; returns ``(g, loss_plus, loss_minus)``."""
    lp = loss_fn(_clip(theta + ck * delta, bounds))
    lm = loss_fn(_clip(theta - ck * delta, bounds))
    return (lp - lm) / (2.0 * ck * delta), lp, lm


def pilot_perturbations(cfg: SpsaConfig, dim: int) -> list[np.ndarray]:
    """Directions probed to calibrate ``a``, starting with iteration 0's.

    When the ``2**(dim-1)`` sign classes (a direction and its negation give
    the same estimate) fit in ``calibration_samples`` they are all used;
    otherwise further directions are drawn from a stream separate from the
    iteration stream.
    """
    first = perturbation(cfg.seed, 0, dim)
    n = max(1, cfg.calibration_samples)
    if 2 ** (dim - 1) <= n:
        rest = [np.array((1.0,) + signs) for signs in itertools.product((1.0, -1.0), repeat=dim - 1)]
        rest = [d for d in rest if not (np.array_equal(d, first) or np.array_equal(d, -first))]
        return [first, *rest]
    return [first] + [perturbation(cfg.seed + 7919, t, dim) for t in range(1, n)]


def calibrate(theta, cfg: SpsaConfig, loss_fn, bounds=None) -> float:
    """Gain ``a`` such that the first update moves no parameter by more than ``target_step``.

    The largest gradient component seen over the pilot directions sets the
    scale. A loss built from MCC scores is piecewise constant, so most pilots
    may see no change at all; if every pilot is flat the gain falls back to
    the value that would give a unit gradient a step of ``target_step``.
    """
    theta = np.asarray(theta, dtype=float)
    ck = cfg.c_k(0)
    top = 0.0
    for delta in pilot_perturbations(cfg, theta.size):
        g, _, _ = gradient_estimate(theta, delta, ck, loss_fn, bounds)
        top = max(top, float(np.max(np.abs(g))))
    scale = (1 + cfg.stability) ** cfg.alpha_exp
    return cfg.target_step * scale / top if top > 0 else cfg.target_step * scale


def spsa_step(theta, k: int, cfg: SpsaConfig, loss_fn: Callable, a: float | None = None, bounds=None) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    a = cfg.a if a is None else a
    if a is None:
        raise ValueError("gain a must be given or calibrated")
    delta = perturbation(cfg.seed, k, theta.size)
    g, _, _ = gradient_estimate(theta, delta, cfg.c_k(k), loss_fn, bounds)
    return _clip(theta - cfg.a_k(k, a) * g, bounds)


@dataclass
class IterationRecord:
    k: int
    params: tuple[float, ...]
    loss: float
    delta: tuple[float, ...]
    loss_plus: float
    loss_minus: float


@dataclass
class TrainRecord:
    names: tuple[str, ...]
    initial_params: tuple[float, ...]
    initial_loss: float
    gain_a: float
    iterations: list[IterationRecord] = field(default_factory=list)

    @property
    def best(self) -> tuple[tuple[float, ...], float]:
        best_p, best_l = self.initial_params, self.initial_loss
        for rec in self.iterations:
            if rec.loss < best_l:
                best_p, best_l = rec.params, rec.loss
        return best_p, best_l

    @property
    def best_params(self) -> tuple[float, ...]:
        return self.best[0]

    @property
    def best_loss(self) -> float:
        return self.best[1]

    def log_rows(self) -> list[list]:
        rows = [["iteration", "loss", *self.names]]
        rows.append([0, self.initial_loss, *self.initial_params])
        for rec in self.iterations:
            rows.append([rec.k + 1, rec.loss, *rec.params])
        return rows


def minimize(loss_fn: Callable, theta0, cfg: SpsaConfig, bounds=None, names=None) -> TrainRecord:
    """Run ``cfg.iterations`` SPSA steps from ``theta0``, recording every iterate."""
    theta = _clip(np.asarray(theta0, dtype=float), bounds)
    names = tuple(names) if names else tuple(f"x{i}" for i in range(theta.size))
    a = cfg.a if cfg.a is not None else calibrate(theta, cfg, loss_fn, bounds)
    rec = TrainRecord(names, tuple(float(x) for x in theta), float(loss_fn(theta)), a)
    for k in range(cfg.iterations):
        delta = perturbation(cfg.seed, k, theta.size)
        g, lp, lm = gradient_estimate(theta, delta, cfg.c_k(k), loss_fn, bounds)
        theta = _clip(theta - cfg.a_k(k, a) * g, bounds)
        loss = float(loss_fn(theta))
        rec.iterations.append(
            IterationRecord(k, tuple(float(x) for x in theta), loss, tuple(float(x) for x in delta), float(lp), float(lm))
        )
        log.info("iteration %d loss %.6f params %s", k + 1, loss, np.round(theta, 6).tolist())
    return rec


class MccLoss:
    """Loss over a dataset for one model; candidate sets are enumerated once."""

    def __init__(
        self,
        model: int,
        dataset: Dataset,
        solver: SolverSettings = SolverSettings(),
        fold: FoldSettings = FoldSettings(),
        kind: str = LOSS_ONE_MINUS_MEAN,
    ):
        if not dataset:
            raise ValueError("dataset must be non-empty")
        self.model = model
        self.dataset = list(dataset)
        self.solver = solver
        self.fold = fold
        self.kind = kind
        self.param_type = PARAM_TYPES[model]
        self._csets = [candidates(model, seq, fold) for seq, _ in self.dataset]

    def scores(self, params) -> list[float]:
        if not isinstance(params, self.param_type):
            params = self.param_type().with_vector(params)
        out = []
        for idx, ((seq, truth), cset) in enumerate(zip(self.dataset, self._csets)):
            try:
                pred = predict(self.model, seq, params, self.solver, self.fold, cset, seed=self.solver.seed + idx)
                out.append(score(pred.structure, truth))
            except RnaQuboError as exc:
                log.warning("%s: prediction failed (%s); scoring MCC 0", seq.id or idx, exc)
                out.append(0.0)
        return out

    def __call__(self, params) -> float:
        s = np.array(self.scores(params))
        if self.kind == LOSS_MEAN_SQUARED:
            return float(np.mean((1.0 - s) ** 2))
        return float(1.0 - s.mean())


def loss(model: int, params, dataset: Dataset, solver: SolverSettings = SolverSettings(), **kw) -> float:
    return MccLoss(model, dataset, solver, **kw)(params)


def train(
    model: int,
    dataset: Dataset,
    cfg: SpsaConfig = SpsaConfig(),
    solver: SolverSettings = SolverSettings(),
    fold: FoldSettings = FoldSettings(),
) -> TrainRecord:
    ptype = PARAM_TYPES[model]
    loss_fn = MccLoss(model, dataset, solver, fold, cfg.loss_kind)
    theta0 = cfg.initial if cfg.initial is not None else ptype.ones().vector()
    return minimize(loss_fn, theta0, cfg, bounds=ptype.bounds, names=ptype.tunable)
