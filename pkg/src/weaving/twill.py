"""Stage one: the Farey Twill.

Strand (k, s) is born at t = k and runs along x = s/(t-k).  Blocks are kept in
increasing order of x; strands with s = 0 sit at x = 0 ordered by k.  Where
trajectories meet at integer x the blocks undergo a chain mutation, otherwise
they simply swap.  All times and positions are exact fractions.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import floor

from .decomposition import (CHAIN, OVER, PERMUTE, REORDER, UNDER, WINDOWS, Block,
                            Decomposition, Event, EventLog, apply_event, diff,
                            from_kernels)
from .kernels import DSHEAF, KernelExpr, kernel
from .picard import PicElt, of_mn, weight
from .vanishing import Obligation, require

STAGE = "twill"
THEOREM22 = "theorem22"
COROLLARY28 = "corollary28"


class TwillError(RuntimeError):
    pass


def max_s(g: int, k: int) -> int:
    return 3 * g - 3 - 3 * k


def strands(g: int) -> list[tuple[int, int]]:
    return [(k, s) for k in range(g) for s in range(max_s(g, k) + 1)]


def strand_ids(g: int) -> dict[tuple[int, int], int]:
    return {st: i for i, st in enumerate(strands(g))}


def trajectory(k: int, s: int, t) -> Fraction:
    t = Fraction(t)
    if t <= k:
        raise ValueError(f"strand ({k},{s}) is not alive at t={t}")
    return Fraction(s) / (t - k)


def _check_range(g: int, k: int, s: int) -> None:
    if not (0 <= k <= g - 1 and 0 <= s <= max_s(g, k)):
        raise ValueError(f"strand ({k},{s}) out of range for g={g}")


def twist_bundle(k: int, s: int, t, g: int) -> PicElt:
    """Line bundle twisting D^k on the strand (k, s) at a generic time t."""
    _check_range(g, k, s)
    t = Fraction(t)
    i = floor(t)
    if not k <= i <= g - 1:
        raise ValueError(f"t={t} outside [k, g) for strand ({k},{s})")
    if i > k:
        q = floor(Fraction(s) / (t - k))
        return of_mn(q, s + q * (k - 1))
    return of_mn(s, s * k)


def twist_after(k: int, s: int, t, g: int) -> PicElt:
    """The twist just after time t (t may be a crossing time)."""
    t = Fraction(t)
    i = floor(t)
    if i > k:
        x = Fraction(s) / (t - k)
        q = x.numerator // x.denominator
        if x.denominator == 1:
            q -= 1
        if s == 0:
            q = 0
        return of_mn(q, s + q * (k - 1))
    return of_mn(s, s * k)


def block_kernel(k: int, twist: PicElt) -> KernelExpr:
    return kernel(DSHEAF, k, twist)


def label(k: int, s: int) -> str:
    return f"D^{{{k},{s}}}"


def windows_weight(k: int, s: int, i: int) -> int:
    """Weight at wall i of the twist carried into level i."""
    return weight(level_twist(k, s, i), i)


def level_twist(k: int, s: int, i: int) -> PicElt:
    """L^{k,s}_i = O(floor(s/(i-k)), s + floor(s/(i-k))(k-1))."""
    q = s // (i - k)
    return of_mn(q, s + q * (k - 1))


def windows_check(i: int, k: int, s: int) -> bool:
    return weight(level_twist(k, s, i), i) + k <= i - 1


# -------------------------------------------------------------- schedule


@dataclass(frozen=True)
class CrossingGroup:
    t: Fraction
    x: Fraction
    members: tuple[tuple[int, int], ...]  # ascending k, i.e. order before the crossing

    @property
    def chain(self) -> bool:
        return self.x.denominator == 1

    @property
    def level(self) -> bool:
        return self.t.denominator == 1


def _members_at(g: int, t: Fraction, x: Fraction) -> tuple[tuple[int, int], ...]:
    out = []
    for k in range(0, floor(t) + 1):
        if k >= t:
            break
        s = x * (t - k)
        if s.denominator == 1 and 1 <= s <= max_s(g, k):
            out.append((k, int(s)))
    return tuple(out)


def crossing_schedule(g: int, t_end=None) -> list[CrossingGroup]:
    """Every crossing point with 0 < t < t_end, sorted by t then x descending.

    Points at integer t list the old strands meeting there; the new strand
    D^{t,0} is not included (it joins every group at its level).
    """
    t_end = Fraction(g if t_end is None else t_end)
    pts: set[tuple[Fraction, Fraction]] = set()
    live = [(k, s) for k, s in strands(g) if s > 0]
    for a, (k, s) in enumerate(live):
        for k2, s2 in live[a + 1:]:
            if k2 == k or s == s2:
                continue
            (k1, s1), (k2_, s2_) = ((k, s), (k2, s2)) if k < k2 else ((k2, s2), (k, s))
            if s1 <= s2_:
                continue
            t = Fraction(s1 * k2_ - s2_ * k1, s1 - s2_)
            if k2_ < t < t_end and t.denominator != 1:
                pts.add((t, Fraction(s2_) / (t - k2_)))
        # a strand passing an integer x after its own level can change alone
        for n in range(1, s):
            t = k + Fraction(s, n)
            if t < t_end and t.denominator != 1:
                pts.add((t, Fraction(n)))
    for level in range(1, g):
        if level < t_end:
            for k, s in live:
                if k < level:
                    pts.add((Fraction(level), Fraction(s, level - k)))
    groups = []
    for t, x in pts:
        members = _members_at(g, t, x)
        if t.denominator == 1:
            members = tuple(m for m in members if m[0] < t)
        if members:
            groups.append(CrossingGroup(t, x, members))
    groups.sort(key=lambda c: (c.t, -c.x))
    return groups


def chain_participants(n: int, k: int, s: int, t, g: int) -> list[tuple[int, int]]:
    """The strands meeting D^{k,s} at integer x = n, starting from the oldest."""
    t = Fraction(t)
    if Fraction(s) / (t - k) != n:
        raise ValueError(f"strand ({k},{s}) is not at x={n} at t={t}")
    if k > 0 and s + n <= max_s(g, k - 1):
        raise ValueError(f"chain does not start at its smallest k: ({k - 1},{s + n}) exists")
    out = []
    for kk in range(k, floor(t) + 1):
        ss = s - (kk - k) * n
        if kk == t:
            ss = 0
        if 0 <= ss <= max_s(g, kk):
            out.append((kk, ss))
    return out


# ---------------------------------------------------------- certificates


@lru_cache(maxsize=None)
def permute_obligations(g: int, i: int, k: int, k2: int, delta: int) -> tuple:
    """Orthogonality of D^{k,s} and D^{k2,s2}, k < k2, crossing off integer x."""
    if k2 == i:
        j, d = 0, 2 * g - 1 - 2 * k2
    else:
        j, d = i - k2, 2 * g - 1 - 2 * k2
    certs = []
    for l in range(k + 1):
        for m in range(k + 1 - l):
            certs.append(require(Obligation.of("Thm7.4", "permute", g=g, d=d, j=j,
                                               a=m, b=0, t=l + m + delta)))
    return tuple(certs)


@lru_cache(maxsize=None)
def chain_obligations(g: int, i: int, k: int) -> tuple:
    """Vanishings letting chain member D^k pass the younger members up to level i."""
    certs = []
    for alpha in range(k + 1, i + 1):
        for l in range(k + 1):
            for m in range(k + 1 - l):
                certs.append(require(Obligation.of(
                    "Thm7.4", "chain", g=g, d=2 * g - 1 - 2 * alpha, j=i - alpha,
                    a=m, b=0, t=l + m + i - k)))
    return tuple(certs)


def _dedup(certs):
    seen, out = set(), []
    for c in certs:
        if c not in seen:
            seen.add(c)
            out.append(c)
    return tuple(out)


# ------------------------------------------------------------------ sweep


@dataclass
class TwillResult:
    g: int
    mode: str
    dec: Decomposition
    ids: dict
    windows: list = field(default_factory=list)
    pair_certs: dict = field(default_factory=dict)
    chain_pairs: set = field(default_factory=set)

    @property
    def log(self) -> EventLog:
        return self.dec.log


class _Sweep:
    def __init__(self, g: int, validate: bool = False):
        self.g = g
        self.validate = validate
        self.ids = strand_ids(g)
        self.st = {i: st for st, i in self.ids.items()}
        self.dec = Decomposition()
        self.twists: dict[int, PicElt] = {}
        self.pos: dict[int, int] = {}
        self.windows: list = []
        self.pair_certs: dict = {}
        self.chain_pairs: set = set()

    def _reindex(self, start: int = 0, stop: int | None = None) -> None:
        blocks = self.dec.blocks
        for p in range(start, len(blocks) if stop is None else stop):
            self.pos[blocks[p].id] = p

    # --- events

    def embed(self, level: int, only_zero: bool = False, check: bool = True) -> None:
        g = self.g
        if level > 0 and check:
            for b in self.dec.blocks:
                k, s = self.st[b.id]
                w = weight(self.twists[b.id], level)
                expected = level_twist(k, s, level)
                ok = (self.twists[b.id] == expected and w == s % (level - k)
                      and w + k <= level - 1)
                self.windows.append((level, k, s, w, ok))
                if not ok:
                    raise TwillError(f"windows check fails at level {level} for ({k},{s})")
        top = 0 if only_zero else max_s(g, level)
        new = []
        for s in range(top + 1):
            bid = self.ids[(level, s)]
            tw = of_mn(s, s * level)
            self.twists[bid] = tw
            new.append(Block(bid, block_kernel(level, tw), f"M_{level}",
                             label(level, s), (level, s)))
        ev = Event(WINDOWS, STAGE, Fraction(level), span=(0, 0),
                   participants=tuple((b.id, OVER) for b in new),
                   new_blocks=tuple(new), ambient=f"M_{level}",
                   note=f"blocks D^{{{level},s}} for s=0..{top}")
        apply_event(self.dec, ev)
        self._reindex(len(self.dec.blocks) - len(new))

    def cross(self, t: Fraction, x: Fraction, members: list[int],
              boundaries: tuple[int, ...] | None = None) -> None:
        """Reverse a contiguous run of blocks meeting at (t, x)."""
        g = self.g
        positions = [self.pos[m] for m in members]
        start = min(positions)
        if positions != list(range(start, start + len(members))):
            raise TwillError(f"blocks meeting at t={t}, x={x} are not adjacent: "
                             f"{[self.st[m] for m in members]}")
        ks = [self.st[m][0] for m in members]
        if ks != sorted(ks) or len(set(ks)) != len(ks):
            raise TwillError(f"unexpected order before crossing at t={t}, x={x}")
        i = floor(t)
        chain = x.denominator == 1
        updates = {}
        for m in members:
            k, s = self.st[m]
            after = twist_after(k, s, t, g)
            if after != self.twists[m]:
                if not chain:
                    raise TwillError(f"twist of ({k},{s}) changes off integer x at t={t}")
                updates[m] = block_kernel(k, after)
                self.twists[m] = after
            elif chain and k < i:
                raise TwillError(f"chain member ({k},{s}) unchanged at t={t}")
        certs = []
        if chain:
            for m in members:
                k = self.st[m][0]
                if k < i:
                    certs.extend(chain_obligations(g, i, k))
            for a_, m in enumerate(members):
                for m2 in members[a_ + 1:]:
                    self.chain_pairs.add(frozenset((m, m2)))
        else:
            for a_, m in enumerate(members):
                k, s = self.st[m]
                for m2 in members[a_ + 1:]:
                    k2, s2 = self.st[m2]
                    delta = s - s2 - floor(x) * (k2 - k)
                    pc = permute_obligations(g, i, k, k2, delta)
                    self.pair_certs[frozenset((m, m2))] = (pc, t, x)
                    certs.extend(pc)
        order = tuple(reversed(members))
        roles = tuple((m, UNDER if m in updates else OVER) for m in members)
        ev = Event(CHAIN if chain else PERMUTE, STAGE, t,
                   span=(start, start + len(members)), order=order,
                   participants=roles, kernel_updates=updates,
                   certificates=_dedup(certs), boundaries=boundaries, note=f"x={x}")
        apply_event(self.dec, ev)
        self._reindex(start, start + len(members))

    # --- checks

    def check_order(self, t: Fraction) -> None:
        keys = []
        for b in self.dec.blocks:
            k, s = self.st[b.id]
            keys.append((trajectory(k, s, t), k))
        if keys != sorted(keys):
            raise TwillError(f"blocks out of trajectory order at t={t}")
        for b in self.dec.blocks:
            k, s = self.st[b.id]
            if self.twists[b.id] != twist_bundle(k, s, t, self.g):
                raise TwillError(f"twist of ({k},{s}) disagrees with the closed form at t={t}")

    def run(self, t_end: Fraction, until_level: int) -> None:
        """Process every crossing with t < t_end and levels below until_level."""
        g = self.g
        self.embed(0)
        groups = crossing_schedule(g, t_end)
        by_time = defaultdict(list)
        for cg in groups:
            by_time[cg.t].append(cg)
        times = sorted(set(by_time) | {Fraction(lv) for lv in range(1, until_level)})
        for n_, t in enumerate(times):
            if t.denominator == 1:
                level = int(t)
                self.embed(level)
                new_zero = self.ids[(level, 0)]
                for cg in sorted(by_time.get(t, []), key=lambda c: -c.x):
                    members = [self.ids[m] for m in cg.members] + [new_zero]
                    self.cross(t, cg.x, members)
            else:
                for cg in sorted(by_time[t], key=lambda c: -c.x):
                    self.cross(t, cg.x, [self.ids[m] for m in cg.members])
            if self.validate:
                nxt = times[n_ + 1] if n_ + 1 < len(times) else t_end
                self.check_order((t + nxt) / 2)


# ------------------------------------------------------------ closed forms


def insertions(g: int) -> Decomposition:
    """Apply only the windows insertions, level 0..g-1; crossings never change the count."""
    sw = _Sweep(g)
    for level in range(g):
        sw.embed(level, check=False)
    return sw.dec


def strand_counts(g: int) -> dict[int, int]:
    """Blocks per source degree k after the last insertion."""
    counts: dict[int, int] = defaultdict(int)
    for b in insertions(g).blocks:
        counts[b.source_degree if b.strand is None else b.strand[0]] += 1
    return dict(counts)


def corollary28_expected(g: int) -> Decomposition:
    """The blocks at t = g - epsilon, in order of s/(g-k), s = 0 strands by k."""
    items = sorted(strands(g), key=lambda ks: (Fraction(ks[1], g - ks[0]), ks[0]))
    kernels = []
    for k, s in items:
        q = s // (g - k)
        kernels.append(block_kernel(k, of_mn(q, s + q * (k - 1))))
    return from_kernels(kernels, [len(kernels)], f"M_{g - 1}",
                        [label(k, s) for k, s in items])


def theorem22_index(g: int) -> list[tuple[int, int, int]]:
    """(mega-block q, k, j) in the order of the three mega-blocks."""
    out = []
    for q, cap in ((0, g - 2), (1, g - 2), (2, g - 1)):
        cells = [(k, j) for k in range(g) for j in range(g) if j + k <= cap]
        cells.sort(key=lambda kj: (kj[0] + kj[1], kj[1]))
        out.extend((q, k, j) for k, j in cells)
    return out


def theorem22_strand(g: int, q: int, k: int, j: int) -> tuple[int, int]:
    if q == 2 and j + k == g - 1:
        return (k, max_s(g, k))
    return (k, q * (g - 1 - k) + j)


def theorem22_twist(g: int, q: int, j: int) -> PicElt:
    return of_mn(q, q * (g - 2) + j)


def theorem22_expected(g: int) -> Decomposition:
    idx = theorem22_index(g)
    kernels = [block_kernel(k, theorem22_twist(g, q, j)) for q, k, j in idx]
    labels = [label(*theorem22_strand(g, q, k, j)) for q, k, j in idx]
    sizes = [sum(1 for q, _, _ in idx if q == c) for c in range(3)]
    return from_kernels(kernels, sizes, f"M_{g - 1}", labels)


def stopping_point(k: int, s: int, g: int) -> tuple[Fraction, Fraction]:
    """(x, t) where strand (k, s) stops; s = 0 strands stop where they are born."""
    if not (0 <= k <= g - 2 and 0 <= s <= max_s(g, k) - 1):
        raise ValueError(f"strand ({k},{s}) has no stopping time for g={g}")
    q = s // (g - 1 - k)
    j = s - q * (g - 1 - k)
    x = q + Fraction(j + k, g - 1)
    if s == 0:
        return x, Fraction(k)
    return x, k + Fraction(s) / x


def stopping_time(k: int, s: int, g: int) -> Fraction:
    return stopping_point(k, s, g)[1]


def _stop_key(g: int, k: int, s: int):
    q = s // (g - 1 - k)
    j = s - q * (g - 1 - k)
    x, _ = stopping_point(k, s, g)
    return (x, j)


# -------------------------------------------------------------------- run


def run(g: int, mode: str = THEOREM22, validate: bool = False,
        check: bool = True) -> TwillResult:
    if g < 2:
        raise ValueError(f"genus must be at least 2, got {g}")
    if mode not in (THEOREM22, COROLLARY28):
        raise ValueError(f"unknown twill mode {mode!r}")
    sw = _Sweep(g, validate)
    if mode == COROLLARY28:
        sw.run(Fraction(g), g)
        expected = corollary28_expected(g)
    else:
        sw.run(Fraction(g - 1), g - 1)
        _finish_theorem22(sw)
        expected = theorem22_expected(g)
    res = TwillResult(g, mode, sw.dec, sw.ids, sw.windows, sw.pair_certs, sw.chain_pairs)
    if check:
        report = diff(sw.dec, expected)
        if report:
            raise TwillError(f"{mode} output differs from the closed form:\n" + "\n".join(report))
    return res


def _finish_theorem22(sw: _Sweep) -> None:
    g = sw.g
    level = g - 1
    # Kernels were frozen at each strand's stopping time: re-check that claim.
    for b in sw.dec.blocks:
        k, s = sw.st[b.id]
        if s < max_s(g, k):
            q = s // (g - 1 - k)
            if sw.twists[b.id] != of_mn(q, s + q * (k - 1)):
                raise TwillError(f"strand ({k},{s}) changed after its stopping time")
    sw.embed(level, only_zero=True)
    n_stopped = sum(1 for b in sw.dec.blocks
                    if sw.st[b.id][1] < max_s(g, sw.st[b.id][0]))
    prefix = [b.id for b in sw.dec.blocks[:n_stopped]]
    if any(sw.st[i][1] == max_s(g, sw.st[i][0]) for i in prefix):
        raise TwillError("a maximal strand sits among the stopped ones")
    target = sorted(prefix, key=lambda i: _stop_key(g, *sw.st[i]))
    certs = []
    rank = {i: p for p, i in enumerate(target)}
    for a_, i in enumerate(prefix):
        for i2 in prefix[a_ + 1:]:
            if rank[i] > rank[i2]:
                rec = sw.pair_certs.get(frozenset((i, i2)))
                if rec is None:
                    raise TwillError(f"reordering {sw.st[i]} past {sw.st[i2]} "
                                     "undoes a crossing that was not orthogonal")
                certs.extend(rec[0])
    if target != prefix:
        ev = Event(REORDER, STAGE, Fraction(level), span=(0, n_stopped), order=tuple(target),
                   participants=tuple((i, OVER) for i in prefix),
                   certificates=_dedup(certs),
                   note="stopped strands return to their stopping order")
        apply_event(sw.dec, ev)
        sw._reindex()
    members = [sw.ids[(k, max_s(g, k))] for k in range(level)] + [sw.ids[(level, 0)]]
    half = g * (g - 1) // 2
    cuts = tuple(c for c in (half, 2 * half) if 0 < c < len(sw.dec.blocks))
    sw.cross(Fraction(level), Fraction(3), members, boundaries=cuts)


def snapshot(g: int, t) -> Decomposition:
    """The decomposition at a time t strictly between events."""
    t = Fraction(t)
    if not 0 < t < g:
        raise ValueError(f"t={t} outside (0, {g})")
    if t.denominator == 1:
        raise ValueError("snapshots are taken between levels, not on them")
    sw = _Sweep(g)
    sw.run(t, floor(t) + 1)
    return sw.dec
