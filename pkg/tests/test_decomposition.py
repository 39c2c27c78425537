import pytest
from hypothesis import given, strategies as st

from weaving import twill
from weaving.decomposition import (CHAIN, GLOBAL_TWIST, OVER, PERMUTE, WINDOWS, Block,
                                   Decomposition, Event, EventLog, ShapeError, apply_event,
                                   braid_word, diff, from_kernels, replay, span_swaps)
from weaving.kernels import line
from weaving.picard import of_mn


def _dec(n, boundaries=()):
    return from_kernels([line(of_mn(i, 0)) for i in range(n)], [n], "M_1") if not boundaries \
        else Decomposition([Block(i, line(of_mn(i, 0)), "M_1") for i in range(n)], boundaries)


def _inversions(p):
    return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])


@given(st.permutations(list(range(7))))
def test_span_swaps_is_minimal(perm):
    swaps = span_swaps(list(range(7)), list(perm))
    assert len(swaps) == _inversions(perm)
    cur = list(range(7))
    for slot, mover, other in swaps:
        assert cur[slot + 1] == mover and cur[slot] == other
        cur[slot], cur[slot + 1] = mover, other
    assert cur == list(perm)


@given(st.lists(st.permutations(list(range(6))), min_size=1, max_size=5))
def test_replay_and_json_roundtrip(perms):
    dec = _dec(6)
    for t, p in enumerate(perms):
        apply_event(dec, Event(PERMUTE, "test", t, span=(0, 6), order=tuple(p),
                               participants=tuple((i, OVER) for i in p)))
    text = dec.log.to_jsonl()
    log = EventLog.from_jsonl(text)
    assert log.to_jsonl() == text
    again = replay(log, _dec(6))
    assert again.ids == dec.ids
    assert len(braid_word(log, _dec(6))) == sum(
        _inversions([prev.index(x) for x in cur])
        for prev, cur in zip([list(range(6))] + [list(p) for p in perms], [list(p) for p in perms]))


def test_empty_log_gives_empty_word():
    assert braid_word([]) == []


def test_shape_errors_name_ids():
    dec = _dec(3)
    with pytest.raises(ShapeError) as err:
        apply_event(dec, Event(PERMUTE, "test", 0, span=(0, 2), order=(0, 2),
                               participants=((0, OVER),)))
    assert 2 in err.value.ids or 1 in err.value.ids
    with pytest.raises(ShapeError) as err:
        apply_event(dec, Event(PERMUTE, "test", 0, span=(0, 2), order=(1, 0),
                               participants=((9, OVER),)))
    assert err.value.ids == (9,)
    with pytest.raises(ShapeError):
        apply_event(dec, Event(CHAIN, "test", 0, span=(0, 2), order=(1, 0),
                               participants=((0, OVER), (1, OVER))))
    with pytest.raises(ShapeError):
        Event("Bogus", "test", 0)
    with pytest.raises(ShapeError):
        Decomposition([Block(1, line(), "M_1"), Block(1, line(), "M_1")])


def test_only_windows_creates_blocks():
    dec = _dec(2)
    new = (Block(7, line(), "M_1"),)
    with pytest.raises(ShapeError):
        apply_event(dec, Event(GLOBAL_TWIST, "test", 0, new_blocks=new))
    apply_event(dec, Event(WINDOWS, "test", 0, new_blocks=new))
    assert dec.ids == [0, 1, 7]


def test_diff_examples():
    dec = twill.run(3).dec
    assert diff(dec, dec) == []
    assert diff(dec, twill.theorem22_expected(3)) == []
    shifted = dec.copy()
    shifted.boundaries = [b + 1 for b in shifted.boundaries]
    report = diff(shifted, dec)
    assert report and str(dec.boundaries[0]) in report[-1]


def test_three_megablocks_g3_by_hand():
    # mega-block sizes from the index sets j + k <= g-2, j + k <= g-2, j + k <= g-1
    dec = twill.run(3).dec
    assert len(dec) == 12
    assert [len(m) for m in dec.megablocks()] == [3, 3, 6]
