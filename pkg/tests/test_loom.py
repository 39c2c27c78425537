import pytest
from hypothesis import given, strategies as st

from weaving import crosswarp, loom, twill
from weaving.decomposition import PERMUTE, SPLIT, diff
from weaving.kernels import TENSOR_E, kernel, rewrite_F_to_E, global_twist
from weaving.picard import THETA, from_z_theta, omega_M

# Frozen from the four-mega-block index sets (k <= λ/2, λ - k <= cap), counted by hand for g <= 7.
SIZES = {2: [1, 1, 1, 2], 3: [2, 3, 3, 4], 4: [4, 6, 6, 6], 5: [6, 10, 10, 9],
         6: [9, 15, 15, 12], 7: [12, 21, 21, 16]}


def _loom(g):
    dec = twill.run(g).dec
    crosswarp.run(dec, g)
    return dec, loom.run(dec, g)


def test_sizes_frozen():
    assert {g: loom.theorem55_sizes(g) for g in SIZES} == SIZES
    for g, sizes in SIZES.items():
        assert sum(sizes) == g * (3 * g - 1) // 2


@pytest.mark.parametrize("g", range(2, 9))
def test_four_megablocks(g):
    dec, res = _loom(g)
    assert diff(dec, loom.theorem55_expected(g)) == []
    assert [len(m) for m in dec.megablocks()] == loom.theorem55_sizes(g)
    assert all(c.ok for c in res.certificates)


def test_helix_third_family_base_block():
    g = 6
    assert loom.e_kernel(g, 0, 0, 1, -1).twist == from_z_theta(1 - g, 1, g)


@given(st.integers(2, 12), st.integers(0, 10), st.integers(0, 10))
def test_lattice_identity(g, j, k):
    # F^{*⊠j} twist of the first cross-warp family, moved through the helix
    src = crosswarp.f_kernel(g, 0, j, k)
    got = global_twist(rewrite_F_to_E(global_twist(src, omega_M(g) * (3 - g)), g),
                       THETA(g) * -(2 * g - 5))
    assert got.twist == from_z_theta(3 + j + 2 * k - g, -(k + j + 1), g)
    assert got.base == kernel(TENSOR_E, j).base


def test_swap_obligation_examples():
    ob = loom.swap_obligation(5, (5, 1), (6, 1))
    assert ob.rule == "Lemma5.2" and dict(ob.params)["t"] == -1
    eq = loom.swap_obligation(5, (4, 0), (4, 2))
    p = dict(eq.params)
    # t = k2 - k1 < 2(k2 - k1) = j1 - j2, written for the dual pair
    assert eq.rule == "Thm7.1" and p["t"] == -2 and p["b"] - p["a"] == 4
    with pytest.raises(loom.LoomError):
        loom.swap_obligation(5, (6, 1), (5, 1))


def test_one_event_per_swap():
    dec, res = _loom(5)
    ev = dec.log.stage("loom")
    assert sum(1 for e in ev if e.kind == PERMUTE) == len(res.certificates)
    assert [e.kind for e in ev].count(SPLIT) == 1
