import pytest
from hypothesis import given, strategies as st

from weaving import pipeline, weave
from weaving.decomposition import diff
from weaving.kernels import LINE, TENSOR_E
from weaving.loom import e_kernel
from weaving.vanishing import check_thm_6_1


@pytest.fixture(scope="module")
def g5():
    return pipeline.run(5)


def test_reduce_example():
    kx = e_kernel(5, 5, 1, 1, -1)  # mega-block IV, λ=5, m=1
    pieces = weave.reduce_via_truncation(kx, 5)
    assert pieces == [(4, 0), (2, 0), (4, 1)]
    assert all(check_thm_6_1(5, k, l).ok for k, l in pieces)


@given(st.integers(2, 12), st.integers(0, 20), st.integers(-20, 20), st.integers(-20, 20))
def test_truncation_shape(g, j, a, b):
    from weaving.kernels import kernel
    from weaving.picard import from_z_theta
    kx = kernel(TENSOR_E, j, from_z_theta(a, b, g), source_twist_free=j > 0)
    pieces = weave.truncation_pieces(kx, g)
    assert len(pieces) == (3 if j > 0 else 1)
    assert pieces[0] == (a + j, b, 0)


def test_single_block_when_lambda_even():
    assert weave.lemma_selection("IV", 5, 4, 2) == (2,)
    assert weave.lemma_selection("I", 5, 3, 1) == (1, 2)


def test_g5_final(g5):
    r = g5.weave
    assert len(r.pulled_back) == 9 and r.residual_count == 26
    assert diff(weave.n_side(r), weave.theorem11_expected(5)) == []


def test_g2_final():
    r = pipeline.run(2).weave
    labels = [r.dec.block(i).kernel.label(2) for i in r.pulled_back]
    assert labels == ["θ^-1", "O", "E^⊠1"]
    assert r.residual_count == 2


@pytest.mark.parametrize("g", range(2, 10))
def test_weave_invariants(g):
    r = pipeline.run(g).weave
    assert len(r.pulled_back) == 2 * g - 1 == weave.pulled_back_count(g)
    assert r.residual_count == g * (3 * g - 1) // 2 - (2 * g - 1)
    assert diff(weave.n_side(r), weave.theorem11_expected(g)) == []
    for k, l in r.thm61:
        assert 0 <= 2 * l <= k <= g - 1
    # the residual blocks sit in front of the pulled-back ones
    pos = {bid: p for p, bid in enumerate(r.dec.ids)}
    assert max(pos[i] for i in r.residual) < min(pos[i] for i in r.pulled_back)


def test_final_families_k_decreasing():
    for mb in weave.theorem11_cells(9):
        degrees = [d for d, _ in mb]
        assert degrees == sorted(degrees)  # E-degree top - 2k grows as k decreases
        assert len(set(degrees)) == len(degrees)


# Frozen Thm6.1 counts and dual-form external citations, from g <= 7 runs.
THM61 = {2: 1, 3: 7, 4: 22, 5: 46, 6: 79, 7: 121}
EXTERNAL = {2: 0, 3: 8, 4: 44, 5: 120, 6: 252, 7: 456}


def test_frozen_counts():
    for g in THM61:
        assert len(pipeline.run(g).weave.thm61) == THM61[g]
        assert weave.external_count(weave.dual_sod(g)[1]) == EXTERNAL[g]


@pytest.mark.parametrize("g", [2, 3, 5, 8])
def test_dual_form(g):
    dec, log = weave.dual_sod(g)
    assert diff(dec, weave.theorem7_expected(g)) == []
    assert all(c.ok for ev in log for c in ev.certificates)
    assert weave.external_count(log) == sum(
        1 for ev in log for c in ev.certificates if c.rule == "ExternalCitation")
