"""SVG drawings of the weaving patterns.

A panel is a braid diagram read top to bottom: columns are positions in the
decomposition, and each adjacent transposition of the braid word is one
crossing.  The figure-style layout packs independent crossings into shared
rows; the raw layout gives every crossing its own row, and for the twill also
offers the true trajectories x = s/(t - k).  Output is plain SVG text built in
a fixed order, so equal inputs give equal bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from html import escape

from .decomposition import Decomposition, EventLog, apply_event, event_swaps
from .kernels import FBULLET
from .picard import THETA, ZERO
from .twill import strands, trajectory

RAW = "raw"
FIGURE = "figure-style"

PANEL_ORDER = ("twill", "crosswarp", "loom", "weave")

# one colour per source degree k, cycled
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
           "#e377c2", "#17becf", "#bcbd22", "#7f7f7f")


@dataclass
class Crossing:
    row: int
    slot: int
    over: int
    under: int
    left: int = -1  # the strand that starts in column `slot`
    dashed: tuple = ()  # ids drawn as wefts on this crossing


@dataclass
class Layout:
    g: int
    stage: str
    columns: int = 0
    rows: int = 0
    crossings: list = field(default_factory=list)
    # (id, column, first row, last row, dashed)
    segments: list = field(default_factory=list)
    colors: dict = field(default_factory=dict)
    labels: list = field(default_factory=list)
    polylines: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "g": self.g, "stage": self.stage, "columns": self.columns, "rows": self.rows,
            "crossings": [[c.row, c.slot, c.over, c.under] for c in self.crossings],
            "segments": [list(s) for s in self.segments],
            "polylines": {str(i): [[float(x), float(y)] for x, y in pts]
                          for i, pts in sorted(self.polylines.items())},
        }


def _color_key(block) -> int:
    if block.strand is not None:
        return block.strand[0]
    return block.source_degree


def _label_offset(stage: str, g: int):
    # The loom and weave kernels carry a θ^{-(2g-5)} twist; labels undo it.
    if stage in ("loom", "weave"):
        return THETA(g) * (2 * g - 5)
    return ZERO


def layout(log, g: int, transform: str = FIGURE, start: Decomposition | None = None,
           stage: str = "") -> Layout:
    """Strand paths for the events in log, starting from `start`."""
    if transform not in (RAW, FIGURE):
        raise ValueError(f"unknown transform {transform!r}")
    dec = start.copy() if start is not None else Decomposition()
    dec.log = EventLog()
    out = Layout(g, stage)
    last: dict[int, int] = {}  # slot -> last row used
    open_seg: dict[int, tuple[int, int, bool]] = {}  # id -> (column, first row, dashed)
    frontier = 0

    def close(bid: int, row: int) -> None:
        col, r0, dashed = open_seg.pop(bid)
        out.segments.append((bid, col, r0, row, dashed))

    def is_weft(bid: int) -> bool:
        return dec.block(bid).kernel.base.kind == FBULLET

    for b in dec.blocks:
        out.colors[b.id] = _color_key(b)
        open_seg[b.id] = (dec.index(b.id), 0, is_weft(b.id))

    for ev in log:
        cur = dec.ids
        for slot, over, under in event_swaps(ev, cur):
            if transform == FIGURE:
                row = 1 + max(last.get(slot - 1, -1), last.get(slot, -1), last.get(slot + 1, -1))
                row = max(row, open_seg[over][1], open_seg[under][1])
            else:
                row = frontier
            frontier = max(frontier, row + 1)
            last[slot] = row
            left, right = cur[slot], cur[slot + 1]
            dashed = tuple(i for i in (left, right) if is_weft(i))
            out.crossings.append(Crossing(row, slot, over, under, left, dashed))
            for bid, col in ((left, slot + 1), (right, slot)):
                close(bid, row)
                open_seg[bid] = (col, row + 1, is_weft(bid))
            cur[slot], cur[slot + 1] = right, left
        apply_event(dec, ev)
        for b in dec.blocks:
            if b.id not in open_seg:
                out.colors[b.id] = _color_key(b)
                open_seg[b.id] = (dec.index(b.id), frontier, is_weft(b.id))
            elif open_seg[b.id][2] != is_weft(b.id):
                # the style switches where the strand left its last crossing
                col, r0, _ = open_seg[b.id]
                close(b.id, r0)
                open_seg[b.id] = (col, r0, is_weft(b.id))
    out.rows = frontier
    for bid in list(open_seg):
        close(bid, frontier)
    out.segments.sort()
    out.columns = len(dec)
    off = _label_offset(stage, g)
    for p, b in enumerate(dec.blocks):
        text = b.label if stage == "twill" and b.label else b.kernel.label(g, off)
        out.labels.append((p, text))
    for bid, col, r0, r1, _ in out.segments:
        out.polylines.setdefault(bid, [])
        out.polylines[bid] += [(Fraction(col), Fraction(r0)), (Fraction(col), Fraction(r1))]
    return out


def trajectory_polylines(g: int, samples: int = 24, x_max: Fraction = Fraction(4)) -> dict:
    """True twill trajectories in the (x, t) plane, one polyline per strand."""
    out = {}
    for k, s in strands(g):
        pts = []
        for n in range(samples + 1):
            t = Fraction(k) + Fraction(g - k) * Fraction(n, samples)
            if t == k:
                x = Fraction(0) if s == 0 else x_max
            else:
                x = min(trajectory(k, s, t), x_max)
            pts.append((x, t))
        out[(k, s)] = pts
    return out


# ------------------------------------------------------------------- svg


@dataclass
class SvgOptions:
    width: int | None = None
    height: int | None = None
    column: int = 14
    row: int = 10
    margin: int = 30
    label_band: int = 120
    labels: bool = True


def _num(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return s if s not in ("-0", "") else "0"


def _panel(lay: Layout, x0: float, opt: SvgOptions) -> tuple[list[str], float, float]:
    cw, rh, m = opt.column, opt.row, opt.margin
    width = max(lay.columns, 1) * cw
    height = max(lay.rows, 1) * rh
    parts = [f'<g class="panel" data-stage="{escape(lay.stage)}">',
             f'<text x="{_num(x0 + width / 2)}" y="{_num(m - 12)}" text-anchor="middle" '
             f'font-size="14">{escape(lay.stage)}</text>']

    def X(col):
        return x0 + col * cw + cw / 2

    def Y(row):
        return m + row * rh

    for bid, col, r0, r1, dashed in lay.segments:
        if r1 <= r0:
            continue
        color = PALETTE[lay.colors.get(bid, 0) % len(PALETTE)]
        dash = ' stroke-dasharray="3,2"' if dashed else ""
        parts.append(f'<line x1="{_num(X(col))}" y1="{_num(Y(r0))}" x2="{_num(X(col))}" '
                     f'y2="{_num(Y(r1))}" stroke="{color}" stroke-width="1.6"{dash}/>')
    for c in lay.crossings:
        # the over strand moves one way, the under strand the other
        y1, y2 = Y(c.row), Y(c.row + 1)
        parts.append(f'<g class="crossing" data-over="{c.over}" data-under="{c.under}">')
        for n, bid in enumerate((c.under, c.over)):
            color = PALETTE[lay.colors.get(bid, 0) % len(PALETTE)]
            dash = ' stroke-dasharray="3,2"' if bid in c.dashed else ""
            a, b = (c.slot, c.slot + 1) if bid == c.left else (c.slot + 1, c.slot)
            if n == 1:
                parts.append(f'<line x1="{_num(X(a))}" y1="{_num(y1)}" x2="{_num(X(b))}" '
                             f'y2="{_num(y2)}" stroke="white" stroke-width="5"/>')
            parts.append(f'<line x1="{_num(X(a))}" y1="{_num(y1)}" x2="{_num(X(b))}" '
                         f'y2="{_num(y2)}" stroke="{color}" stroke-width="1.6"{dash}/>')
        parts.append('</g>')
    if opt.labels:
        for p, text in lay.labels:
            x, y = X(p), Y(max(lay.rows, 1)) + 6
            parts.append(f'<text x="{_num(x)}" y="{_num(y)}" font-size="8" '
                         f'transform="rotate(60 {_num(x)} {_num(y)})">{escape(text)}</text>')
    parts.append('</g>')
    return parts, width, height


def emit_svg(layouts: list[Layout], options: SvgOptions | None = None) -> bytes:
    opt = options or SvgOptions()
    body, x0, h = [], float(opt.margin), 0.0
    for lay in layouts:
        parts, w, ph = _panel(lay, x0, opt)
        body += parts
        x0 += w + opt.margin
        h = max(h, ph)
    width = opt.width or int(x0)
    height = opt.height or int(h + 2 * opt.margin + (opt.label_band if opt.labels else 0))
    head = ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
            f'height="{height}" viewBox="0 0 {_num(x0)} {_num(height)}">\n'
            '<rect width="100%" height="100%" fill="white"/>\n')
    return (head + "\n".join(body) + "\n</svg>\n").encode("utf-8")


def stage_layouts(log, g: int, stage: str = "all", transform: str = FIGURE) -> list[Layout]:
    """One layout per requested stage, each starting where the previous one ended."""
    wanted = PANEL_ORDER if stage == "all" else (stage,)
    dec = Decomposition()
    out = []
    for name in PANEL_ORDER:
        part = EventLog(ev for ev in log if ev.stage == name)
        if name in wanted:
            out.append(layout(part, g, transform, dec, name))
        for ev in part:
            apply_event(dec, ev)
        dec.log = EventLog()
    return out


def render(log, g: int, stage: str = "all", options: SvgOptions | None = None,
           transform: str = FIGURE) -> bytes:
    return emit_svg(stage_layouts(log, g, stage, transform), options)


def layout_json(layouts: list[Layout]) -> str:
    return json.dumps([lay.to_json() for lay in layouts], sort_keys=True)


def crossing_total(svg: bytes) -> int:
    return svg.count(b'class="crossing"')
