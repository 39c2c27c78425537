"""Ordered block lists, mutation events, and the append-only event log."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable

from .kernels import DSHEAF, KernelExpr
from .picard import restrict
from .vanishing import Certificate

SCHEMA = "v1"

PERMUTE = "Permute"
CHAIN = "ChainMutation"
WINDOWS = "WindowsEmbed"
GLOBAL_TWIST = "GlobalTwist"
DUALIZE_ALL = "DualizeAll"
PROJECTOR = "ProjectorMove"
DIVISOR = "DivisorRestrictionMove"
SPLIT = "SplitMegaBlock"
REORDER = "Reorder"

KINDS = (PERMUTE, CHAIN, WINDOWS, GLOBAL_TWIST, DUALIZE_ALL, PROJECTOR,
         DIVISOR, SPLIT, REORDER)
NEEDS_CERTIFICATE = (CHAIN, PROJECTOR, REORDER)

OVER = "over"
UNDER = "under"


class ShapeError(ValueError):
    """An event does not fit the decomposition it is applied to."""

    def __init__(self, message: str, ids: Iterable[int] = ()):
        self.ids = tuple(ids)
        super().__init__(f"{message} (ids: {list(self.ids)})" if self.ids else message)


@dataclass(frozen=True)
class Block:
    id: int
    kernel: KernelExpr
    ambient: str
    label: str = ""
    strand: tuple[int, int] | None = None

    @property
    def source_degree(self) -> int:
        return self.kernel.source_degree

    def to_json(self) -> dict:
        out = {"id": self.id, "kernel": self.kernel.to_json(),
               "ambient": self.ambient, "sourceDegree": self.source_degree}
        if self.label:
            out["label"] = self.label
        if self.strand is not None:
            out["strand"] = list(self.strand)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Block":
        strand = obj.get("strand")
        return cls(obj["id"], KernelExpr.from_json(obj["kernel"]), obj["ambient"],
                   obj.get("label", ""), tuple(strand) if strand else None)


def _time_json(t):
    if isinstance(t, Fraction):
        return str(t) if t.denominator != 1 else int(t)
    return t


def _time_from_json(t):
    if isinstance(t, str):
        return Fraction(t)
    return t


@dataclass
class Event:
    kind: str
    stage: str
    time: Fraction | int
    span: tuple[int, int] = (0, 0)
    order: tuple[int, ...] = ()
    participants: tuple[tuple[int, str], ...] = ()
    kernel_updates: dict = field(default_factory=dict)
    new_blocks: tuple[Block, ...] = ()
    boundaries: tuple[int, ...] | None = None
    ambient: str | None = None
    certificates: tuple[Certificate, ...] = ()
    weft: bool = False
    tags: dict = field(default_factory=dict)
    note: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ShapeError(f"unknown event kind {self.kind!r}")

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": self.kind,
            "stage": self.stage,
            "time": _time_json(self.time),
            "span": list(self.span),
            "order": list(self.order),
            "participants": [[i, r] for i, r in self.participants],
            "kernelUpdates": {str(i): k.to_json() for i, k in sorted(self.kernel_updates.items())},
            "newBlocks": [b.to_json() for b in self.new_blocks],
            "boundaries": None if self.boundaries is None else list(self.boundaries),
            "ambient": self.ambient,
            "certificates": [c.to_json() for c in self.certificates],
            "weft": self.weft,
            "tags": {str(i): t for i, t in sorted(self.tags.items())},
            "note": self.note,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Event":
        if obj.get("schema") != SCHEMA:
            raise ValueError(f"unsupported event schema {obj.get('schema')!r}")
        return cls(
            kind=obj["kind"], stage=obj["stage"], time=_time_from_json(obj["time"]),
            span=tuple(obj["span"]), order=tuple(obj["order"]),
            participants=tuple((i, r) for i, r in obj["participants"]),
            kernel_updates={int(i): KernelExpr.from_json(k)
                            for i, k in obj["kernelUpdates"].items()},
            new_blocks=tuple(Block.from_json(b) for b in obj["newBlocks"]),
            boundaries=None if obj["boundaries"] is None else tuple(obj["boundaries"]),
            ambient=obj["ambient"],
            certificates=tuple(Certificate.from_json(c) for c in obj["certificates"]),
            weft=obj["weft"], tags={int(i): t for i, t in obj["tags"].items()},
            note=obj["note"],
        )

    def line(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, ensure_ascii=False)


class EventLog(list):
    """Append-only list of events with JSON-lines round trip."""

    def to_jsonl(self) -> str:
        return "".join(ev.line() + "\n" for ev in self)

    @classmethod
    def from_jsonl(cls, text: str) -> "EventLog":
        return cls(Event.from_json(json.loads(ln)) for ln in text.splitlines() if ln.strip())

    def stage(self, name: str) -> "EventLog":
        return EventLog(ev for ev in self if ev.stage == name)


class Decomposition:
    """Mutable ordered block list with mega-block boundaries and its log."""

    def __init__(self, blocks: Iterable[Block] = (), boundaries: Iterable[int] = ()):
        self.blocks: list[Block] = list(blocks)
        self.boundaries: list[int] = list(boundaries)
        self.log = EventLog()
        self._check()

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    @property
    def ids(self) -> list[int]:
        return [b.id for b in self.blocks]

    def index(self, bid: int) -> int:
        for i, b in enumerate(self.blocks):
            if b.id == bid:
                return i
        raise ShapeError("block not present", [bid])

    def block(self, bid: int) -> Block:
        return self.blocks[self.index(bid)]

    def megablocks(self) -> list[list[Block]]:
        cuts = [0, *self.boundaries, len(self.blocks)]
        return [self.blocks[a:b] for a, b in zip(cuts, cuts[1:])]

    def copy(self) -> "Decomposition":
        out = Decomposition(self.blocks, self.boundaries)
        out.log = EventLog(self.log)
        return out

    def _check(self) -> None:
        ids = self.ids
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise ShapeError("duplicate block ids", dup)
        prev = 0
        for c in self.boundaries:
            if not prev < c < len(self.blocks):
                raise ShapeError(f"bad mega-block boundary {c} in {self.boundaries}")
            prev = c

    def to_json(self) -> dict:
        return {"blocks": [b.to_json() for b in self.blocks],
                "boundaries": list(self.boundaries)}

    def snapshot(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, ensure_ascii=False)


def apply_event(dec: Decomposition, ev: Event) -> Decomposition:
    """Apply ev in place, append it to dec.log and return dec."""
    present = set(dec.ids) | {b.id for b in ev.new_blocks}
    missing = [i for i, _ in ev.participants if i not in present]
    missing += [i for i in ev.kernel_updates if i not in present]
    if missing:
        raise ShapeError(f"{ev.kind}: participants not in decomposition", missing)
    if ev.kind in NEEDS_CERTIFICATE and not ev.certificates:
        raise ShapeError(f"{ev.kind} carries no certificate",
                         [i for i, _ in ev.participants])

    start, stop = ev.span
    if not 0 <= start <= stop <= len(dec.blocks):
        raise ShapeError(f"{ev.kind}: span {ev.span} out of range")
    window = dec.blocks[start:stop]
    if stop > start:
        old_ids = [b.id for b in window]
        if sorted(old_ids) != sorted(ev.order) or len(ev.order) != len(old_ids):
            raise ShapeError(f"{ev.kind}: new order is not a permutation of the span",
                             sorted(set(old_ids) ^ set(ev.order)))
        if ev.kind == CHAIN:
            members = [i for i, _ in ev.participants]
            if sorted(members) != sorted(old_ids):
                raise ShapeError("chain participants are not contiguous", members)
        by_id = {b.id: b for b in window}
        dec.blocks[start:stop] = [by_id[i] for i in ev.order]

    if ev.kernel_updates:
        dec.blocks = [replace(b, kernel=ev.kernel_updates[b.id])
                      if b.id in ev.kernel_updates else b for b in dec.blocks]
    if ev.ambient is not None:
        dec.blocks = [replace(b, ambient=ev.ambient) for b in dec.blocks]
    if ev.new_blocks:
        if ev.kind != WINDOWS:
            raise ShapeError(f"{ev.kind} may not create blocks",
                             [b.id for b in ev.new_blocks])
        dec.blocks.extend(ev.new_blocks)
    if ev.boundaries is not None:
        dec.boundaries = list(ev.boundaries)
    dec._check()
    dec.log.append(ev)
    return dec


def replay(log: Iterable[Event], start: Decomposition | None = None) -> Decomposition:
    dec = start.copy() if start is not None else Decomposition()
    dec.log = EventLog()
    for ev in log:
        apply_event(dec, ev)
    return dec


# ------------------------------------------------------------ braid word


def span_swaps(old: list[int], new: list[int]) -> list[tuple[int, int, int]]:
    """Adjacent transpositions turning old into new, as (left slot, mover, other).

    The mover is the block that moves to the left.  The count equals the
    number of inversions, so each crossing pair swaps exactly once.
    """
    cur = list(old)
    out = []
    for idx, want in enumerate(new):
        pos = cur.index(want)
        while pos > idx:
            out.append((pos - 1, want, cur[pos - 1]))
            cur[pos - 1], cur[pos] = cur[pos], cur[pos - 1]
            pos -= 1
    return out


def event_swaps(ev: Event, old_ids: list[int]):
    """Generators contributed by one event, given the ids before it."""
    start, stop = ev.span
    if stop <= start:
        return []
    changed = set(ev.kernel_updates)
    word = []
    for pos, mover, other in span_swaps(old_ids[start:stop], list(ev.order)):
        if (other in changed) and (mover not in changed):
            over, under = mover, other
        elif (mover in changed) and (other not in changed):
            over, under = other, mover
        else:
            over, under = mover, other
        word.append((start + pos, over, under))
    return word


def braid_word(log: Iterable[Event], start: Decomposition | None = None):
    """Replay the log and list every adjacent transposition (index, over, under)."""
    dec = start.copy() if start is not None else Decomposition()
    dec.log = EventLog()
    word = []
    for ev in log:
        word.extend(event_swaps(ev, dec.ids))
        apply_event(dec, ev)
    return word


# ------------------------------------------------------------------ diff


def ambient_level(ambient: str) -> int | None:
    if ambient.startswith("M_"):
        return int(ambient[2:])
    return None


def kernels_match(a: KernelExpr, b: KernelExpr, ambient: str = "") -> bool:
    """Kernel equality up to source-side twists.

    A structure sheaf D^k on M_k has fiber M_0, a projective space, where only
    the total H-degree of a twist survives; two twists that agree there give
    the same subcategory.
    """
    if a.same_up_to_source(b):
        return True
    if a.base == b.base and a.shift == b.shift and a.tag == b.tag and a.base.kind == DSHEAF:
        level = ambient_level(ambient)
        if level is not None and level == a.base.index:
            m, n = restrict(a.twist - b.twist, level).to_mn()
            return m + n == 0
    return False


def diff(dec: Decomposition, expected: Decomposition,
         match: Callable[[KernelExpr, KernelExpr, str], bool] = kernels_match) -> list[str]:
    """Differences between two decompositions; empty means equal."""
    report = []
    if len(dec) != len(expected):
        report.append(f"block count {len(dec)} != expected {len(expected)}")
    for pos, (got, want) in enumerate(zip(dec.blocks, expected.blocks)):
        if not match(got.kernel, want.kernel, got.ambient):
            report.append(f"position {pos}: block {got.id} kernel {got.kernel.to_json()} "
                          f"!= expected {want.kernel.to_json()}")
    if list(dec.boundaries) != list(expected.boundaries):
        bad = sorted(set(dec.boundaries) ^ set(expected.boundaries))
        report.append(f"boundaries {dec.boundaries} != expected {expected.boundaries}; "
                      f"differing at {bad}")
    return report


def from_kernels(kernels: list[KernelExpr], sizes: list[int], ambient: str,
                 labels: list[str] | None = None) -> Decomposition:
    """Build a closed-form decomposition with ids 0..n-1."""
    blocks = [Block(i, k, ambient, labels[i] if labels else "") for i, k in enumerate(kernels)]
    cuts, acc = [], 0
    for s in sizes[:-1]:
        acc += s
        cuts.append(acc)
    # empty mega-blocks collapse onto a neighbour boundary
    cuts = sorted({c for c in cuts if 0 < c < len(blocks)})
    return Decomposition(blocks, cuts)
