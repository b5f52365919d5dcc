"""Local QUBO solvers: exhaustive search, simulated annealing and tabu search.

Random draws are reproducible across runs and platforms. Restart ``r`` of a
solve with seed ``s`` uses ``numpy.random.Generator(PCG64(SeedSequence([s, r])))``
and draws, in this order:

* simulated annealing: the initial state ``integers(0, 2, n)``, then
  ``random((sweeps, n))`` acceptance uniforms consumed sweep by sweep,
  visiting variables in index order;
* tabu search: the initial state ``integers(0, 2, n)`` only; moves are
  deterministic with ties going to the lowest index.

Adding restarts therefore never changes the restarts already run, so the
best energy cannot get worse as ``reads`` grows.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import ConflictingPairs, LengthMismatch, TooLarge
from .models import Qubo, energy
from .scoring import SecondaryStructure
from .stems import CandidateSet

EXHAUSTIVE = "exhaustive"
SIM_ANNEAL = "sa"
TABU = "tabu"
METHODS = (EXHAUSTIVE, SIM_ANNEAL, TABU)


@dataclass
class SolveRequest:
    qubo: Qubo
    method: str = SIM_ANNEAL
    seed: int = 0
    reads: int = 8
    sweeps: int | None = None  # SA sweeps or tabu iterations per read
    t_initial: float | None = None
    t_final: float | None = None
    tenure: int | None = None
    cap: int = 25


@dataclass
class Sample:
    q: tuple[int, ...]
    energy: float
    count: int


@dataclass
class SolveResult:
    best_q: tuple[int, ...]
    best_energy: float
    samples: list[Sample] = field(default_factory=list)
    wall_time: float = 0.0

    def bitstring(self) -> str:
        return "".join(str(b) for b in self.best_q)

    def to_dict(self) -> dict:
        return {
            "best": self.bitstring(),
            "energy": self.best_energy,
            "wall_time": self.wall_time,
            "samples": [
                {"q": "".join(map(str, s.q)), "energy": s.energy, "count": s.count}
                for s in self.samples
            ],
        }


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, restart])))


def _result(qubo: Qubo, states, t0: float) -> SolveResult:
    counts = Counter(tuple(int(b) for b in q) for q in states)
    samples = sorted(
        (Sample(q, energy(qubo, q), c) for q, c in counts.items()),
        key=lambda s: (s.energy, s.q),
    )
    best = samples[0]
    return SolveResult(best.q, best.energy, samples, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# exhaustive


def _bit_rows(width: int) -> np.ndarray:
    """All ``2**width`` states, row ``a`` holding the bits of ``a`` MSB first."""
    idx = np.arange(2**width, dtype=np.int64)[:, None]
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)[None, :]
    return ((idx >> shifts) & 1).astype(float)


def _block_energies(h, J, rows):
    return rows @ h + 0.5 * np.einsum("ij,jk,ik->i", rows, J, rows)


def solve_exhaustive(qubo: Qubo, cap: int = 25) -> SolveResult:
    """Global minimiser by enumeration.

    Among (numerically) tied minima the state with the smallest integer value,
    reading ``q`` as a binary number with ``q[0]`` most significant, wins.
    """
    t0 = time.perf_counter()
    n = qubo.num_vars
    if n > cap:
        raise TooLarge(f"{n} variables exceeds the exhaustive cap of {cap}")
    if n == 0:
        return SolveResult((), 0.0, [Sample((), 0.0, 1)], time.perf_counter() - t0)
    h, J = qubo.dense()
    n_hi = n // 2
    n_lo = n - n_hi
    lo = _bit_rows(n_lo)
    hi = _bit_rows(n_hi)
    e_lo = _block_energies(h[n_hi:], J[n_hi:, n_hi:], lo)
    e_hi = _block_energies(h[:n_hi], J[:n_hi, :n_hi], hi)
    cross = J[:n_hi, n_hi:]
    chunk = max(1, 2**22 // lo.shape[0])
    scale = float(np.abs(h).sum() + np.abs(J).sum() / 2)
    tol = 1e-9 * max(1.0, scale)

    def blocks():
        for start in range(0, hi.shape[0], chunk):
            b = hi[start : start + chunk]
            yield start, e_hi[start : start + chunk, None] + e_lo[None, :] + (b @ cross) @ lo.T

    e_min = min(float(block.min()) for _, block in blocks())
    for start, block in blocks():
        hits = np.flatnonzero(block.ravel() <= e_min + tol)
        if hits.size:
            r, a = divmod(int(hits[0]), lo.shape[0])
            q = tuple(int(x) for x in np.concatenate([hi[start + r], lo[a]]))
            break
    e = energy(qubo, q)
    return SolveResult(q, e, [Sample(q, e, 1)], time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# simulated annealing


@numba.njit(cache=True)
def _anneal(h, J, q, temps, uniforms):
    n = h.shape[0]
    field_ = J @ q
    e = 0.0
    for i in range(n):
        e += q[i] * (h[i] + 0.5 * field_[i])
    best_e = e
    best_q = q.copy()
    for s in range(temps.shape[0]):
        t = temps[s]
        for i in range(n):
            sign = 1.0 - 2.0 * q[i]
            de = sign * (h[i] + field_[i])
            if de <= 0.0 or uniforms[s, i] < np.exp(-de / t):
                q[i] = 1.0 - q[i]
                for j in range(n):
                    field_[j] += sign * J[j, i]
                e += de
                if e < best_e:
                    best_e = e
                    best_q[:] = q
    return best_q


def anneal_schedule(qubo: Qubo, sweeps: int, t_initial=None, t_final=None) -> np.ndarray:
    """Geometric temperatures from ``max|coef|`` down to a thousandth of it."""
    t0 = t_initial if t_initial is not None else (qubo.max_abs_coefficient() or 1.0)
    t1 = t_final if t_final is not None else 1e-3 * t0
    if sweeps == 1:
        return np.array([t1])
    return t0 * (t1 / t0) ** (np.arange(sweeps) / (sweeps - 1))


def solve_sa(req: SolveRequest) -> SolveResult:
    t0 = time.perf_counter()
    qubo = req.qubo
    n = qubo.num_vars
    if n == 0:
        return SolveResult((), 0.0, [Sample((), 0.0, req.reads)], time.perf_counter() - t0)
    sweeps = req.sweeps or 1000
    h, J = qubo.dense()
    temps = anneal_schedule(qubo, sweeps, req.t_initial, req.t_final)
    states = []
    for r in range(req.reads):
        rng = _restart_rng(req.seed, r)
        q0 = rng.integers(0, 2, n).astype(float)
        uniforms = rng.random((sweeps, n))
        states.append(_anneal(h, J, q0, temps, uniforms))
    return _result(qubo, states, t0)


# ---------------------------------------------------------------------------
# tabu search


@numba.njit(cache=True)
def _tabu(h, J, q, iterations, tenure):
    n = h.shape[0]
    field_ = J @ q
    e = 0.0
    for i in range(n):
        e += q[i] * (h[i] + 0.5 * field_[i])
    best_e = e
    best_q = q.copy()
    tabu_until = np.zeros(n, dtype=np.int64)
    for it in range(iterations):
        move = -1
        move_de = np.inf
        for i in range(n):
            de = (1.0 - 2.0 * q[i]) * (h[i] + field_[i])
            allowed = tabu_until[i] <= it or e + de < best_e - 1e-12
            if allowed and de < move_de:
                move = i
                move_de = de
        if move < 0:
            continue
        sign = 1.0 - 2.0 * q[move]
        q[move] = 1.0 - q[move]
        for j in range(n):
            field_[j] += sign * J[j, move]
        e += move_de
        tabu_until[move] = it + 1 + tenure
        if e < best_e - 1e-12:
            best_e = e
            best_q[:] = q
    return best_q


def solve_tabu(req: SolveRequest) -> SolveResult:
    """Steepest single-flip descent with a tabu list and aspiration."""
    t0 = time.perf_counter()
    qubo = req.qubo
    n = qubo.num_vars
    if n == 0:
        return SolveResult((), 0.0, [Sample((), 0.0, req.reads)], time.perf_counter() - t0)
    iterations = req.sweeps or max(200, 50 * n)
    tenure = req.tenure if req.tenure is not None else max(1, min(10, n // 4))
    h, J = qubo.dense()
    states = []
    for r in range(req.reads):
        rng = _restart_rng(req.seed, r)
        q0 = rng.integers(0, 2, n).astype(float)
        states.append(_tabu(h, J, q0, iterations, tenure))
    return _result(qubo, states, t0)


def solve(req: SolveRequest) -> SolveResult:
    if req.method == EXHAUSTIVE:
        return solve_exhaustive(req.qubo, req.cap)
    if req.method == SIM_ANNEAL:
        return solve_sa(req)
    if req.method == TABU:
        return solve_tabu(req)
    raise ValueError(f"unknown solver {req.method!r}")


def decode(cset: CandidateSet, q) -> SecondaryStructure:
    """Union of the base pairs of every selected candidate."""
    if len(q) != len(cset.candidates):
        raise LengthMismatch(f"bit vector has {len(q)} entries, {len(cset.candidates)} candidates")
    partner: dict[int, int] = {}
    for bit, cand in zip(q, cset.candidates):
        if not bit:
            continue
        for i, j in cand.pairs():
            for a, b in ((i, j), (j, i)):
                if partner.setdefault(a, b) != b:
                    raise ConflictingPairs(a)
    pairs = {(a, b) for a, b in partner.items() if a < b}
    return SecondaryStructure(len(cset.seq), pairs)
