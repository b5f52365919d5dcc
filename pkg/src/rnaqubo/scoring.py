"""Base-pair MCC and the two-sample Kolmogorov-Smirnov comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import kolmogorov

from .errors import EmptySample, LengthMismatch


@dataclass(frozen=True, init=False)
class SecondaryStructure:
    n: int
    pairs: frozenset

    def __init__(self, n: int, pairs: Iterable[tuple[int, int]] = ()):
        canon = set()
        seen: dict[int, int] = {}
        for a, b in pairs:
            i, j = (a, b) if a < b else (b, a)
            if i == j or i < 1 or j > n:
                raise ValueError(f"invalid pair {(a, b)} for length {n}")
            for base, partner in ((i, j), (j, i)):
                if seen.get(base, partner) != partner:
                    raise ValueError(f"base {base} appears in more than one pair")
                seen[base] = partner
            canon.add((i, j))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "pairs", frozenset(canon))

    def __len__(self):
        return len(self.pairs)

    def partners(self) -> list[int]:
        """1-based partner table with 0 for unpaired; index 0 is unused."""
        out = [0] * (self.n + 1)
        for i, j in self.pairs:
            out[i], out[j] = j, i
        return out

    def dot_bracket(self) -> str:
        """Dot-bracket string; crossing pairs are put in ``[]``, ``{}``, ``<>`` layers."""
        brackets = ["()", "[]", "{}", "<>"]
        layers: list[list[tuple[int, int]]] = []
        for i, j in sorted(self.pairs):
            for layer in layers:
                if not any(a < i < b < j for a, b in layer):
                    layer.append((i, j))
                    break
            else:
                layers.append([(i, j)])
        chars = ["."] * self.n
        for depth, layer in enumerate(layers):
            o, c = brackets[min(depth, len(brackets) - 1)]
            for i, j in layer:
                chars[i - 1], chars[j - 1] = o, c
        return "".join(chars)


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int


def confusion(pred: SecondaryStructure, truth: SecondaryStructure) -> Confusion:
    """Exact base-pair confusion over all ``n(n-1)/2`` index pairs."""
    if pred.n != truth.n:
        raise LengthMismatch(f"predicted length {pred.n} != known length {truth.n}")
    tp = len(pred.pairs & truth.pairs)
    fp = len(pred.pairs - truth.pairs)
    fn = len(truth.pairs - pred.pairs)
    tn = truth.n * (truth.n - 1) // 2 - tp - fp - fn
    return Confusion(tp, fp, fn, tn)


def mcc(c: Confusion) -> float:
    denom = (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn)
    if denom == 0:
        return 0.0
    return (c.tp * c.tn - c.fp * c.fn) / math.sqrt(denom)


def score(pred: SecondaryStructure, truth: SecondaryStructure) -> float:
    return mcc(confusion(pred, truth))


def ks_2sample(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """KS statistic and asymptotic p-value for two samples.

    The p-value uses the limiting Kolmogorov distribution at
    ``sqrt(n_a n_b / (n_a + n_b)) * D``; it is not exact for small samples.
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be non-empty")
    points = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, points, side="right") / a.size
    cdf_b = np.searchsorted(b, points, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    n_eff = a.size * b.size / (a.size + b.size)
    p = float(kolmogorov(math.sqrt(n_eff) * d)) if d > 0 else 1.0
    return d, min(1.0, p)


def ks_critical_value(n_a: int, n_b: int, alpha: float) -> float:
    """Asymptotic critical D at significance ``alpha``; reject when D exceeds it."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c * math.sqrt((n_a + n_b) / (n_a * n_b))
