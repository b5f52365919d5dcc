import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rnaqubo.errors import DomainError
from rnaqubo.seq_model import RnaSequence, can_pair, default_nn_table
from rnaqubo.stems import (
    NN_ENERGY,
    Kind,
    StemCandidate,
    classify_pairs,
    count_pairs,
    enumerate_quartets,
    enumerate_stems,
    pair_count_closed_form,
    pair_matrix,
    parse_lines,
    relate,
    stem_count_closed_form,
    to_lines,
    worst_case_sequence,
)

from conftest import EXAMPLE_SEQUENCE, rna

# ---------------------------------------------------------------------------
# oracles


def brute_stems(seq, m, min_loop):
    """Every (i, j, k) whose k nested pairs are all allowed and clear the loop minimum."""
    n = len(seq)
    out = set()
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(m, n):
                inner_i, inner_j = i + k - 1, j - k + 1
                if inner_j - inner_i <= min_loop:
                    break
                if all(can_pair(seq.at(i + t), seq.at(j - t)) for t in range(k)):
                    out.add((i, j, k))
                else:
                    break
    return out


def brute_relation(a, b, quartets):
    bases_a = set(range(a.first, a.first + a.length)) | set(range(a.last - a.length + 1, a.last + 1))
    bases_b = set(range(b.first, b.first + b.length)) | set(range(b.last - b.length + 1, b.last + 1))
    lo, hi = sorted([a, b], key=lambda c: (c.first, c.last))
    if quartets and (hi.first, hi.last) == (lo.first + 1, lo.last - 1):
        return Kind.STACKED, None
    if bases_a & bases_b:
        return Kind.OVERLAP, None
    if lo.first < hi.first < lo.last < hi.last:
        inside = set(range(lo.first, hi.last + 1)) - bases_a - bases_b
        return Kind.PSEUDOKNOT, len(inside)
    return Kind.INDEPENDENT, None


# ---------------------------------------------------------------------------
# pair matrix


def test_pair_matrix_gcgcg():
    mat = pair_matrix(RnaSequence("GCGCG"), min_loop=0)
    assert mat.sum() == 6
    assert not np.tril(mat).any()


@given(rna(max_size=15), st.integers(0, 4))
def test_pair_matrix_matches_brute_force(seq, min_loop):
    mat = pair_matrix(seq, min_loop=min_loop)
    n = len(seq)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            expect = i < j and j - i > min_loop and can_pair(seq.at(i), seq.at(j))
            assert mat[i - 1, j - 1] == expect


# ---------------------------------------------------------------------------
# enumeration


def test_gcgcg_two_stems():
    cset = enumerate_stems(RnaSequence("GCGCG"), m=2, min_loop=0)
    assert [c.as_tuple() for c in cset.candidates] == [(1, 4, 2), (2, 5, 2)]


def test_aaaa_has_no_candidates():
    assert len(enumerate_stems(RnaSequence("AAAA"))) == 0
    assert len(enumerate_quartets(RnaSequence("AAAA"))) == 0


@given(rna(max_size=16), st.integers(2, 4), st.integers(0, 4))
def test_enumerate_stems_matches_brute_force(seq, m, min_loop):
    cset = enumerate_stems(seq, m=m, min_loop=min_loop)
    got = [c.as_tuple() for c in cset.candidates]
    assert len(got) == len(set(got))
    assert set(got) == brute_stems(seq, m, min_loop)
    assert all(c.weight == c.length for c in cset.candidates)
    assert cset.mu == max((c.length for c in cset.candidates), default=0)


@given(rna(max_size=16))
def test_nn_weights_are_summed_stability(seq):
    table = default_nn_table()
    cset = enumerate_stems(seq, weight_mode=NN_ENERGY)
    for c in cset.candidates:
        expect = sum(
            table.stability((seq.at(c.first + t), seq.at(c.last - t)), (seq.at(c.first + t + 1), seq.at(c.last - t - 1)))
            for t in range(c.length - 1)
        )
        assert c.weight == pytest.approx(expect)
        assert c.weight > 0
    bp = {c.as_tuple() for c in enumerate_stems(seq).candidates}
    assert {c.as_tuple() for c in cset.candidates} <= bp


@given(rna(max_size=16))
def test_candidate_invariants(seq):
    for c in enumerate_stems(seq, min_loop=3).candidates:
        five = set(range(c.first, c.first + c.length))
        three = set(range(c.last - c.length + 1, c.last + 1))
        assert not five & three
        assert c.loop_size >= 3
        assert c.bases() == five | three


def test_enumeration_is_deterministic():
    seq = RnaSequence(EXAMPLE_SEQUENCE)
    assert enumerate_stems(seq) == enumerate_stems(seq)


def test_example_candidates():
    cset = enumerate_stems(RnaSequence(EXAMPLE_SEQUENCE), m=2)
    assert any(c.length == 3 for c in cset.candidates)
    kinds = {r.kind for r in cset.relations}
    assert Kind.PSEUDOKNOT in kinds


def test_quartets_gcgcg_and_example_stack():
    q = enumerate_quartets(RnaSequence("GCGCG"), min_loop=0)
    assert [c.as_tuple() for c in q.candidates] == [(1, 4, 2), (2, 5, 2)]
    # the length-3 stem (1, 14, 3) splits into two stacked quartets
    q = enumerate_quartets(RnaSequence(EXAMPLE_SEQUENCE))
    tuples = [c.as_tuple() for c in q.candidates]
    a, b = tuples.index((1, 14, 2)), tuples.index((2, 13, 2))
    rel = q.relation_map()[(min(a, b), max(a, b))]
    assert rel.kind is Kind.STACKED


# ---------------------------------------------------------------------------
# classification


def test_shared_base_is_overlap():
    a = StemCandidate(3, 7, 2, 2.0)
    b = StemCandidate(7, 14, 2, 2.0)
    assert relate(a, b)[0] is Kind.OVERLAP


def test_nested_stems_are_independent():
    outer = StemCandidate(1, 20, 2, 2.0)
    inner = StemCandidate(5, 15, 3, 3.0)
    assert relate(outer, inner)[0] is Kind.INDEPENDENT


def test_pseudoknot_single_strand_count():
    a = StemCandidate(1, 10, 2, 2.0)  # bases 1,2 and 9,10
    b = StemCandidate(5, 16, 2, 2.0)  # bases 5,6 and 15,16
    kind, n_ss, _ = relate(a, b)
    assert kind is Kind.PSEUDOKNOT
    assert n_ss == 16 - 8  # 3,4,7,8,11,12,13,14


@given(rna(max_size=22), st.booleans())
def test_classify_matches_brute_force(seq, quartets):
    cset = enumerate_quartets(seq) if quartets else enumerate_stems(seq)
    got = {(r.i, r.j): (r.kind, r.n_ss) for r in cset.relations}
    cands = cset.candidates
    for i, j in itertools.combinations(range(len(cands)), 2):
        kind, n_ss = brute_relation(cands[i], cands[j], quartets)
        if kind is Kind.INDEPENDENT:
            assert (i, j) not in got
        else:
            assert got[(i, j)] == (kind, n_ss)
    assert all(r.kind is not Kind.INDEPENDENT for r in cset.relations)


@given(rna(max_size=18))
def test_classification_independent_of_candidate_order(seq):
    cset = enumerate_stems(seq, classify=False)
    rev = type(cset)(cset.seq, tuple(reversed(cset.candidates)), (), cset.weight_mode)
    a = {(cset.candidates[r.i], cset.candidates[r.j]): r.kind for r in classify_pairs(cset).relations}
    rc = classify_pairs(rev)
    b = {tuple(sorted((rev.candidates[r.i], rev.candidates[r.j]))): r.kind for r in rc.relations}
    assert a == b


# ---------------------------------------------------------------------------
# worst case and closed forms


def test_worst_case_sequence():
    assert worst_case_sequence(5).bases == "GCGCG"
    assert worst_case_sequence(1).bases == "G"
    assert worst_case_sequence(6).bases == "GCGCGC"


@pytest.mark.parametrize("n, m, s, p", [(5, 2, 2, 1), (7, 2, 8, 28), (9, 3, 8, 28)])
def test_closed_form_values(n, m, s, p):
    assert stem_count_closed_form(n, m) == s
    assert pair_count_closed_form(n, m) == p


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_closed_form_at_smallest_length(m):
    # N = 2m+1 holds two full-length anti-diagonal runs (first base and last base as outer 5' ends)
    n = 2 * m + 1
    brute = len(enumerate_stems(worst_case_sequence(n), m=m, min_loop=0, classify=False))
    assert stem_count_closed_form(n, m) == brute == 2


def test_closed_form_domain():
    with pytest.raises(DomainError):
        stem_count_closed_form(6, 2)
    with pytest.raises(DomainError):
        stem_count_closed_form(3, 2)


@given(st.integers(2, 12).map(lambda k: 2 * k + 1), st.integers(2, 5))
def test_closed_form_matches_enumeration(n, m):
    if n < 2 * m + 1:
        return
    cands = enumerate_stems(worst_case_sequence(n), m=m, min_loop=0, classify=False).candidates
    assert len(cands) == stem_count_closed_form(n, m)
    assert count_pairs(cands) == sum(1 for _ in itertools.combinations(cands, 2))


# ---------------------------------------------------------------------------
# line format


@given(rna(max_size=18), st.booleans())
def test_line_format_round_trip(seq, quartets):
    cset = enumerate_quartets(seq) if quartets else enumerate_stems(seq, weight_mode=NN_ENERGY)
    cands, rels = parse_lines(to_lines(cset))
    assert tuple(cands) == cset.candidates
    assert [c.weight for c in cands] == [c.weight for c in cset.candidates]
    assert tuple(rels) == cset.relations


def test_line_format_rejects_unknown_record():
    with pytest.raises(ValueError):
        parse_lines("STEM 1 10 2 2.0\nFOO 1 2\n")


def test_bad_arguments():
    with pytest.raises(DomainError):
        enumerate_stems(RnaSequence("GCGC"), m=1)
    with pytest.raises(DomainError):
        enumerate_stems(RnaSequence("GCGC"), weight_mode="bogus")
    with pytest.raises(DomainError):
        pair_matrix(RnaSequence("GCGC"), min_loop=-1)
