import re

import pytest

from weaving import oracle, pipeline, render, twill
from weaving.decomposition import EventLog, braid_word


@pytest.fixture(scope="module")
def g5():
    return pipeline.run(5)


def test_empty_log():
    assert render.layout(EventLog(), 2).polylines == {}


def test_twill_layout_matches_oracle():
    res = twill.run(5, twill.COROLLARY28)
    for transform in (render.RAW, render.FIGURE):
        lay = render.layout(res.log, 5, transform, stage="twill")
        assert len(lay.polylines) == 35
        assert len(lay.crossings) == oracle.crossing_count(5)


def test_raw_rows_are_one_per_crossing():
    res = twill.run(4, twill.COROLLARY28)
    lay = render.layout(res.log, 4, render.RAW)
    assert lay.rows == len(lay.crossings)
    assert sorted(c.row for c in lay.crossings) == list(range(lay.rows))


def test_figure_rows_never_overlap():
    res = twill.run(5, twill.COROLLARY28)
    lay = render.layout(res.log, 5, render.FIGURE)
    used = {}
    for c in lay.crossings:
        for s in (c.slot, c.slot + 1):
            assert (c.row, s) not in used
            used[(c.row, s)] = c
    assert lay.rows <= len(lay.crossings)


def test_all_panels(g5):
    svg = render.render(g5.log, 5)
    text = svg.decode()
    assert re.findall(r'data-stage="(\w+)"', text) == list(render.PANEL_ORDER)
    assert render.crossing_total(svg) == len(braid_word(g5.log))
    assert text.startswith("<?xml") and text.rstrip().endswith("</svg>")


def test_deterministic(g5):
    a = render.render(g5.log, 5)
    b = render.render(pipeline.run(5).log, 5)
    assert a == b
    lay = render.stage_layouts(g5.log, 5)
    assert render.layout_json(lay) == render.layout_json(render.stage_layouts(g5.log, 5))


def test_wefts_are_dashed():
    res = pipeline.run(4, "crosswarp")
    svg = render.render(res.log, 4, "crosswarp").decode()
    assert "stroke-dasharray" in svg


def test_trajectories_follow_hyperbolas():
    lines = render.trajectory_polylines(3)
    assert len(lines) == 12
    for (k, s), pts in lines.items():
        for x, t in pts[1:]:
            if x < 4:
                assert x == twill.trajectory(k, s, t)


def test_bad_transform():
    with pytest.raises(ValueError):
        render.layout(EventLog(), 2, "sideways")
