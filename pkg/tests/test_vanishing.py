from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from weaving.vanishing import (EXTERNAL, KOSZUL, THM_7_4, Obligation, Uncertified, certify,
                               check_lemma_5_2, check_thm_6_1, check_thm_7_1, check_thm_7_4,
                               check_thm_9_6, external, koszul_ranks,
                               koszul_truncation_certificate, load_corpus, replay_corpus,
                               require)

small = st.integers(-12, 12)


def test_excluded_interval_examples():
    assert check_thm_7_1(5, 9, 4, 0, 1, -1).ok
    assert not check_thm_7_1(5, 9, 4, 2, 0, 0).ok
    assert check_thm_7_1(5, 7, 3, 2, 0, -1).ok
    r = check_thm_7_1(5, 9, 4, 0, 1, Fraction(1, 2))
    assert not r.ok and r.failures == ("t not integral",)


def test_open_interval_examples():
    assert check_thm_7_4(5, 9, 4, 0, 0, 1).ok
    assert not check_thm_7_4(5, 9, 4, 1, 0, 1).ok
    # a negative t is not covered; the caller has to use the Thm7.1 rule instead
    assert not check_thm_7_4(5, 9, 0, 1, 0, -2).ok
    assert check_thm_7_4(5, 9, 4, 0, 0, 2).ok


def test_divisor_rule_examples():
    assert check_thm_9_6(5, 9, 4, 2, 1).ok
    assert not check_thm_9_6(5, 9, 4, 2, 2).ok
    assert not check_thm_9_6(5, 9, 4, 5, 1).ok


def test_half_gap_examples():
    assert check_lemma_5_2(5, 9, 4, 3, 4, -1).ok
    assert not check_lemma_5_2(5, 9, 4, 3, 1, 1).ok
    for g in range(3, 10):
        assert check_lemma_5_2(g, 2 * g - 1, g - 1, 0, 0, -1).ok


def test_truncation_range_examples():
    assert check_thm_6_1(5, 3, 1).ok
    assert not check_thm_6_1(5, 1, 1).ok
    assert check_thm_6_1(5, 4, 0).ok and check_thm_6_1(5, 4, 1).ok


# Independent restatements of the inequalities, used as oracles.
def _base(g, d, j):
    return 2 < d <= 2 * g + 1 and 1 <= j <= (d - 1) // 2


@given(st.integers(2, 8), st.integers(1, 17), st.integers(0, 8), small, small, small)
def test_excluded_interval_matches_inequalities(g, d, j, a, b, t):
    top = d + g - 2 * j - 1
    want = (_base(g, d, j) and a <= top and b <= top and a - j - 1 < t < top - b
            and not 0 <= t <= a)
    assert check_thm_7_1(g, d, j, a, b, t).ok == want


@given(st.integers(2, 8), st.integers(1, 17), st.integers(0, 8), small, small, small)
def test_open_interval_matches_inequalities(g, d, j, a, b, t):
    top = d + g - 2 * j - 1
    pre = d > 0 if j == 0 else _base(g, d, j)
    assert check_thm_7_4(g, d, j, a, b, t).ok == (pre and a < t < top - b)


@given(st.integers(2, 8), st.integers(1, 17), st.integers(0, 8), small, small, small)
def test_half_gap_matches_inequalities(g, d, j, a, b, t):
    top = d + g - 2 * j - 1
    cap = min(top, j)
    want = (_base(g, d, j) and a <= cap and b <= cap and a - j - 1 < t < top - b
            and 2 * t < a - b)
    assert check_lemma_5_2(g, d, j, a, b, t).ok == want


def test_certificates_list_every_inequality():
    c = check_thm_7_4(5, 9, 4, 0, 0, 1)
    assert len(c.verified) == 4
    assert c.to_json()["params"] == {"g": 5, "d": 9, "j": 4, "a": 0, "b": 0, "t": 1}


def test_certify_dispatch():
    hinted = certify(Obligation.of(THM_7_4, "", g=5, d=9, j=4, a=0, b=0, t=1))
    assert hinted.ok and hinted.rule == THM_7_4
    auto = certify(Obligation.of("auto", "", g=5, d=9, j=4, a=0, b=0, t=1))
    assert auto.ok and auto.rule == THM_7_4
    bad = Obligation.of("auto", "", g=5, d=1, j=1, a=0, b=0, t=0)
    assert not certify(bad).ok
    with pytest.raises(Uncertified):
        require(bad)


def test_koszul_example():
    assert koszul_ranks(5, 1, 2) == [10, 20, 10]
    assert koszul_truncation_certificate(5, 1, 2).ok
    assert not koszul_truncation_certificate(5, 1, 1).ok


@given(st.integers(1, 12), st.integers(0, 3), st.integers(0, 8))
def test_koszul_accepts_exactly_k_at_least_2l(b, l, k):
    cert = koszul_truncation_certificate(b, l, k)
    assert cert.ok == (k >= 2 * l)
    if cert.ok:
        assert cert.rule == KOSZUL
    a = b + 1 - 2 * l
    if a >= 1:
        want = [comb(b, i) * comb(a + k - i - 1, k - i) for i in range(k + 1)]
        assert koszul_ranks(b, l, k) == want


def test_external_citation():
    c = external("[TT, Theorem 4.1]", g=5)
    assert c.rule == EXTERNAL and c.status == "External"


def test_corpus_replays_without_rejects():
    assert len(load_corpus()) > 10
    for g in range(2, 9):
        results = replay_corpus(g)
        assert results
        assert [(e.source, env) for e, env, r in results if not r.ok] == []
