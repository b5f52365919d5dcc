import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rnaqubo.errors import EmptySample, LengthMismatch
from rnaqubo.scoring import (
    Confusion,
    SecondaryStructure,
    confusion,
    ks_2sample,
    ks_critical_value,
    mcc,
    score,
)

from conftest import structures


def stem(first, last, k):
    return [(first + t, last - t) for t in range(k)]


def brute_confusion(pred, truth):
    c = {"tp": 0, "fp": 0, "fn": 0, "tn": 0}
    for pair in itertools.combinations(range(1, truth.n + 1), 2):
        p, t = pair in pred.pairs, pair in truth.pairs
        c[{(1, 1): "tp", (1, 0): "fp", (0, 1): "fn", (0, 0): "tn"}[(p, t)]] += 1
    return Confusion(**c)


def test_structure_validation():
    with pytest.raises(ValueError):
        SecondaryStructure(5, [(1, 6)])
    with pytest.raises(ValueError):
        SecondaryStructure(5, [(1, 3), (3, 5)])
    with pytest.raises(ValueError):
        SecondaryStructure(5, [(2, 2)])
    assert SecondaryStructure(5, [(4, 1)]).pairs == {(1, 4)}


def test_dot_bracket_layers():
    s = SecondaryStructure(12, stem(1, 8, 2) + stem(5, 12, 2))
    assert s.dot_bracket() == "((..[[))..]]"
    assert SecondaryStructure(3).dot_bracket() == "..."


def test_confusion_examples():
    truth = SecondaryStructure(10, stem(1, 10, 3))
    assert confusion(truth, truth) == Confusion(3, 0, 0, 42)
    assert confusion(SecondaryStructure(10), truth) == Confusion(0, 0, 3, 42)


def test_shifted_stem_scores_poorly():
    truth = SecondaryStructure(20, stem(4, 13, 3))
    pred = SecondaryStructure(20, stem(5, 14, 3))
    shared = set(stem(4, 13, 3)) & set(stem(5, 14, 3))
    c = confusion(pred, truth)
    assert c.tp == len(shared) == 0
    assert (c.fp, c.fn) == (3, 3)
    assert mcc(c) < 0


def test_confusion_length_mismatch():
    with pytest.raises(LengthMismatch):
        confusion(SecondaryStructure(4), SecondaryStructure(5))


def test_mcc_examples():
    assert mcc(Confusion(3, 0, 0, 42)) == 1.0
    assert mcc(Confusion(0, 0, 3, 42)) == 0.0
    assert mcc(Confusion(3, 1, 1, 10)) == pytest.approx(29 / 44, abs=1e-12)


@given(structures(), structures())
def test_confusion_matches_brute_force(a, b):
    if a.n != b.n:
        b = SecondaryStructure(a.n, [p for p in b.pairs if p[1] <= a.n])
    c = confusion(a, b)
    assert c == brute_confusion(a, b)
    assert c.tp + c.fp + c.fn + c.tn == a.n * (a.n - 1) // 2


@given(structures(), st.data())
def test_mcc_symmetric(truth, data):
    pred = data.draw(structures(min_n=truth.n, max_n=truth.n))
    assert score(pred, truth) == score(truth, pred)
    c, d = confusion(pred, truth), confusion(truth, pred)
    assert (c.fp, c.fn) == (d.fn, d.fp)


@given(st.integers(0, 20), st.integers(0, 20), st.integers(0, 20), st.integers(0, 20))
def test_mcc_formula_and_range(tp, fp, fn, tn):
    c = Confusion(tp, fp, fn, tn)
    v = mcc(c)
    assert -1.0 <= v <= 1.0
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom:
        assert v == pytest.approx((tp * tn - fp * fn) / math.sqrt(denom))
        if tp == 0 and tn == 0:
            assert v < 0


# ---------------------------------------------------------------------------
# KS


def brute_ks(a, b):
    points = sorted(set(a) | set(b))
    return max(abs(sum(x <= t for x in a) / len(a) - sum(x <= t for x in b) / len(b)) for t in points)


def test_ks_examples():
    d, p = ks_2sample([0.2, 0.5, 0.9], [0.2, 0.5, 0.9])
    assert (d, p) == (0.0, 1.0)
    assert ks_2sample([0, 0, 0], [1, 1, 1])[0] == 1.0
    a, b = [0.1, 0.4, 0.7], [0.2, 0.5, 0.8, 0.9]
    assert ks_2sample(a, b)[0] == pytest.approx(brute_ks(a, b))


def test_ks_empty():
    with pytest.raises(EmptySample):
        ks_2sample([], [1.0])


samples = st.lists(st.floats(-1, 1, allow_nan=False).map(lambda x: round(x, 2)), min_size=1, max_size=30)


@given(samples, samples)
def test_ks_symmetric_and_matches_brute_force(a, b):
    d, p = ks_2sample(a, b)
    d2, p2 = ks_2sample(b, a)
    assert (d, p) == (d2, p2)
    assert 0.0 <= d <= 1.0 and 0.0 <= p <= 1.0
    assert d == pytest.approx(brute_ks(a, b), abs=1e-12)


def test_ks_pvalue_is_limiting_kolmogorov():
    from scipy import stats

    rng = np.random.default_rng(0)
    a, b = rng.normal(size=80), rng.normal(0.4, size=90)
    d, p = ks_2sample(a, b)
    assert d == pytest.approx(stats.ks_2samp(a, b).statistic)
    en = 80 * 90 / 170
    assert p == pytest.approx(stats.kstwobign.sf(math.sqrt(en) * d), rel=1e-9)


def test_ks_critical_values():
    # c(0.05) = 1.358, c(0.01) = 1.628 for equal sample sizes
    assert ks_critical_value(50, 50, 0.05) == pytest.approx(1.358 * math.sqrt(2 / 50), rel=1e-3)
    assert ks_critical_value(50, 50, 0.01) == pytest.approx(1.628 * math.sqrt(2 / 50), rel=1e-3)
