"""Stage four: the Plain Weave.

Starting from the four loom mega-blocks, the blocks with no power of Z are
pulled back from N and stay put.  Every other block is pushed past them:
either projected across a small group B of pulled-back blocks (certified by
the Thm6.1 rule through a two-step truncation of its kernel), or restricted to the
divisor Z.  Blocks that end up on the left lie in A = ker Rζ_*, blocks on the
right in A' = ker Rζ_*(- ⊗ ω_M); a final ω_M twist brings the latter round
to the left as well.

Sub-stages run in a fixed order: I, IIa, the IIa boundary move, IIb on the
left; IV, IIIb, the IIIb boundary move, IIIa on the right.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace

from .decomposition import (DIVISOR, GLOBAL_TWIST, OVER, PERMUTE, PROJECTOR, UNDER,
                            Decomposition, Event, apply_event, diff, from_kernels,
                            span_swaps)
from .kernels import (LINE, TENSOR_E, TENSOR_EBAR, ZRESTRICTED, KernelExpr, dualize,
                      global_twist, kernel)
from .loom import four_cells, theorem55_expected
from .picard import from_z_theta, in_z_theta, omega_M
from .vanishing import (EXTERNAL, Certificate, Obligation, external,
                        koszul_truncation_certificate, require, zeta_vanishing)

STAGE = "weave"
DUAL_STAGE = "dual"

PULLED_BACK = "PulledBack"
IN_A = "InA"
IN_A_PRIME = "InAPrime"
FRAMED = "Framed"  # a Z-power times a pulled-back block
PENDING = "Pending"

SUBSTAGES = ("I", "IIa", "IIb", "IIIa", "IIIb", "IV")
PROJECTED = "proj"


class WeaveError(RuntimeError):
    pass


# ----------------------------------------------------------- closed forms


def theorem11_cells(g: int) -> list[list[tuple[int, int]]]:
    """(E-degree, θ-exponent) per mega-block, k decreasing."""
    fams = ((g - 2, 1 - g), (g - 3, 2 - g), (g - 2, 2 - g), (g - 1, 2 - g))
    out = []
    for top, th in fams:
        out.append([(top - 2 * k, th + k) for k in range(top // 2, -1, -1)] if top >= 0
                   else [])
    return out


def theorem11_kernels(g: int) -> list[list[KernelExpr]]:
    return [[kernel(TENSOR_E, d, from_z_theta(0, th, g), source_twist_free=d > 0)
             for d, th in mb] for mb in theorem11_cells(g)]


def theorem11_expected(g: int) -> Decomposition:
    mbs = theorem11_kernels(g)
    return from_kernels([k for mb in mbs for k in mb], [len(mb) for mb in mbs], "N")


def theorem7_expected(g: int) -> Decomposition:
    """Final mega-blocks rebuilt with Ē, k increasing; degree <= 1 kernels stay E."""
    kernels, sizes = [], []
    for mb in theorem11_cells(g):
        cells = list(reversed(mb))
        kernels += [kernel(TENSOR_EBAR if d > 1 else TENSOR_E, d, from_z_theta(0, th, g),
                           source_twist_free=d > 0) for d, th in cells]
        sizes.append(len(cells))
    return from_kernels(kernels, sizes, "N")


def pulled_back_count(g: int) -> int:
    return sum(len(mb) for mb in theorem11_cells(g))


# ------------------------------------------------------ truncation pieces


def truncation_pieces(kx: KernelExpr, g: int, frame: int = 0) -> list[tuple[int, int, int]]:
    """(Z-power, θ-power, l) of the line bundles left by the two-step truncation.

    The kernel Z^f Z^a θ^b E^{⊠j} is F^{*⊠j} twisted by Z^{a-j} θ^{b+j}; the
    truncation leaves that twist times Λ̄^{*j}, times Λ̄^{*(j-1)}, and times
    Λ̄^{*j} on (D^1)^∨, the last two only when j > 0.  Λ̄^* = Z^2 θ^{-1}.
    """
    if kx.base.kind not in (LINE, TENSOR_E, TENSOR_EBAR):
        raise WeaveError(f"cannot truncate a {kx.base.kind} kernel")
    j = kx.source_degree
    a, b = in_z_theta(kx.twist, g)
    a, b = a - frame - j, b + j
    out = [(a + 2 * j, b - j, 0)]
    if j > 0:
        out += [(a + 2 * (j - 1), b - (j - 1), 0), (a + 2 * j, b - j, 1)]
    return out


def reduce_via_truncation(kx: KernelExpr, g: int, frame: int = 0) -> list[tuple[int, int]]:
    """Thm6.1 rule parameters (k, l) for one block."""
    return [(k, l) for k, _, l in truncation_pieces(kx, g, frame)]


def koszul(b: int, l: int, k: int):
    return koszul_truncation_certificate(b, l, k)


# ------------------------------------------------------------------ state


@dataclass
class WeaveResult:
    g: int
    dec: Decomposition
    tags: dict
    chains: dict
    pulled_back: list
    residual: list
    thm61: list = field(default_factory=list)
    selections: dict = field(default_factory=dict)

    @property
    def residual_count(self) -> int:
        return len(self.residual)

    def report(self) -> dict:
        certs = Counter(c.rule for chain in self.chains.values() for c in chain)
        ext = certs.pop(EXTERNAL, 0)
        return {
            "genus": self.g,
            "pulled_back": [self.dec.block(i).kernel.label(self.g) for i in self.pulled_back],
            "residual_A": [self.dec.block(i).kernel.label(self.g) for i in self.residual],
            "certificates": dict(sorted(certs.items())),
            "external_citations": ext,
        }


# (mega-block index, λ test, side, Z frame, landing tag) for each half
_GROUPS = {
    # name: (q, λ of the group relative to g, side of the moving blocks, frame)
    "I": (0, -2, "left", 0, IN_A),
    "IIa": (1, -2, "right", 1, IN_A),
    "IIb": (1, -3, "left", 0, IN_A),
    "IIIa": (2, -2, "right", 0, IN_A_PRIME),
    "IIIb": (2, -3, "left", -1, IN_A_PRIME),
    "IV": (3, -1, "right", 0, IN_A_PRIME),
}


def lemma_selection(which: str, g: int, lam: int, m: int) -> tuple[int, ...]:
    """k-values of the B-blocks the lemmas of the weave name for block (λ, m)."""
    if which in ("I", "IIb", "IIIb"):
        ks = (m, m + 1)
    elif which == "IV":
        ks = (g - 1 - lam + m, g - lam + m)
    else:
        ks = (g - 2 - lam + m, g - 1 - lam + m)
    return ks[:1] if lam == 2 * m else ks


class Weave:
    def __init__(self, dec: Decomposition, g: int, seq: int = 0):
        self.dec = dec
        self.g = g
        self.seq = seq
        self.key: dict[int, tuple[int, int, int]] = {}
        self.tags: dict[int, str] = {}
        self.chains: dict[int, list[Certificate]] = {}
        self.thm61: list[tuple[int, int]] = []
        self.selections: dict[int, tuple[int, ...]] = {}
        self.done: list[str] = []

    # -- binding and classification

    def bind(self) -> None:
        report = diff(self.dec, theorem55_expected(self.g))
        if report:
            raise WeaveError("weave input is not the four-mega-block loom output:\n"
                             + "\n".join(report))
        cells = [(q, lam, k) for q, mb in enumerate(four_cells(self.g)) for lam, k in mb]
        for b, key in zip(self.dec.blocks, cells):
            self.key[b.id] = key
            self.tags[b.id] = PENDING
            self.chains[b.id] = []

    def members(self, which: str, part: str) -> list[int]:
        q, rel, _, _, _ = _GROUPS[which]
        lam0 = self.g + rel
        out = []
        for b in self.dec.blocks:
            bq, lam, _ = self.key[b.id]
            if bq != q:
                continue
            if part == "group" and lam == lam0:
                out.append(b.id)
            elif part == "rest" and (lam > lam0 if _GROUPS[which][2] == "right" else lam < lam0):
                out.append(b.id)
        return out

    def classify_pullbacks(self) -> list[list[int]]:
        groups = [self.members(w, "group") for w in ("I", "IIb", "IIIa", "IV")]
        for ids, want in zip(groups, theorem11_kernels(self.g)):
            got = [self.dec.block(i).kernel for i in ids]
            if len(got) != len(want) or any(not a.same_up_to_source(b)
                                            for a, b in zip(got, want)):
                raise WeaveError("pulled-back candidates differ from the target families: "
                                 f"{[k.label(self.g) for k in got]} vs "
                                 f"{[k.label(self.g) for k in want]}")
            for i in ids:
                self.tags[i] = PULLED_BACK
        flat = {i for ids in groups for i in ids}
        for b in self.dec.blocks:
            z = in_z_theta(b.kernel.twist, self.g)[0]
            if (z == 0) != (b.id in flat):
                raise WeaveError(f"block {b.id} has Z-exponent {z} but pulled-back status "
                                 f"{b.id in flat}")
        for which in ("IIa", "IIIb"):
            for i in self.members(which, "group"):
                self.tags[i] = FRAMED
        return groups

    # -- event helpers

    def _emit(self, ev: Event, b_ids: tuple = ()) -> None:
        ev.time = self.seq
        self.seq += 1
        self._assert_bypasses(ev, set(b_ids))
        apply_event(self.dec, ev)
        for i, t in ev.tags.items():
            self.tags[i] = t

    def _legal_bypass(self, a: int, b: int, tags: dict) -> bool:
        ta, tb = tags.get(a, self.tags[a]), tags.get(b, self.tags[b])
        landed = (IN_A, IN_A_PRIME)
        pb = (PULLED_BACK, FRAMED)
        return (ta in landed and tb in pb) or (tb in landed and ta in pb)

    def _assert_bypasses(self, ev: Event, b_ids: set) -> None:
        """Every crossing not covered by a certificate must be a projection-formula pass."""
        if ev.kind not in (PERMUTE, PROJECTOR, DIVISOR):
            return
        start, stop = ev.span
        old = self.dec.ids[start:stop]
        for _, mover, other in span_swaps(old, list(ev.order)):
            if {mover, other} & b_ids:
                continue
            if not self._legal_bypass(mover, other, ev.tags):
                raise WeaveError(f"illegal bypass of blocks {mover} and {other} "
                                 f"({self.tags[mover]}, {self.tags[other]})")

    def _span_of(self, ids: list[int]) -> tuple[int, int]:
        pos = [self.dec.index(i) for i in ids]
        if pos != list(range(pos[0], pos[0] + len(ids))):
            raise WeaveError(f"blocks {ids} are not adjacent")
        return pos[0], pos[0] + len(ids)

    # -- B selection

    def _profile(self, bid: int, dual: bool, frame: int) -> tuple[int, int]:
        kx = self.dec.block(bid).kernel
        if dual:
            kx = dualize(kx, self.g)
        a, b = in_z_theta(kx.twist, self.g)
        if a - frame != 0:
            raise WeaveError(f"group block {bid} is not framed by Z^{frame}")
        return kx.source_degree, b

    def select_b(self, which: str, cid: int, group: list[int]):
        """Certificates and B-block ids for projecting block cid across group."""
        _, _, side, frame, _ = _GROUPS[which]
        dual = side == "left"
        kx = self.dec.block(cid).kernel
        if dual:
            kx, frame = dualize(kx, self.g), -frame
        prof = {self._profile(i, dual, frame): i for i in group}
        certs, chosen = [], []
        for k, th, l in truncation_pieces(kx, self.g, frame):
            bid = prof.get((k, th))
            if bid is None:
                raise WeaveError(f"{which}: no B-block E^{k} θ^{th} for block {cid} "
                                 f"(l={l})")
            if bid not in chosen:
                chosen.append(bid)
            certs.append(require(Obligation.of("Thm6.1", f"plain weave {which}",
                                               g=self.g, k=k, l=l)))
            self.thm61.append((k, l))
        _, lam, m = self.key[cid]
        got = tuple(sorted(self.key[b][2] for b in chosen))
        want = tuple(sorted(lemma_selection(which, self.g, lam, m)))
        if got != want:
            raise WeaveError(f"{which}: block (λ={lam}, m={m}) selected B at k={got}, "
                             f"lemma names k={want}")
        self.selections[cid] = got
        return tuple(certs), tuple(chosen)

    # -- sub-stages

    def process_megablock(self, which: str) -> None:
        if which in self.done:
            raise WeaveError(f"mega-block {which} already processed")
        _, _, side, _, tag = _GROUPS[which]
        group = self.members(which, "group")
        rest = self.members(which, "rest")
        if rest and not group:
            raise WeaveError(f"{which}: blocks to process but no pulled-back group")
        # the block touching the group goes first
        order = list(reversed(rest)) if side == "right" else list(rest)
        for cid in order:
            lo, hi = self._span_of(group)
            certs, chosen = self.select_b(which, cid, group)
            if side == "right":
                if self.dec.index(cid) != lo - 1:
                    raise WeaveError(f"{which}: block {cid} is not next to the group")
                span, new = (lo - 1, hi), tuple(group) + (cid,)
            else:
                if self.dec.index(cid) != hi:
                    raise WeaveError(f"{which}: block {cid} is not next to the group")
                span, new = (lo, hi + 1), (cid,) + tuple(group)
            kx = replace(self.dec.block(cid).kernel, tag=PROJECTED)
            self.chains[cid].extend(certs)
            self._emit(Event(
                PROJECTOR, STAGE, 0, span=span, order=new,
                participants=((cid, UNDER),) + tuple((i, OVER) for i in group),
                kernel_updates={cid: kx}, certificates=certs,
                tags={cid: tag},
                note=f"{which}: (λ,m)={self.key[cid][1:]} projected past B={list(chosen)}"),
                chosen)
        self.done.append(which)

    def _bypass(self, movers: list[int], group: list[int], side: str, note: str) -> None:
        """Move a run of settled blocks across a pulled-back group, unchanged."""
        if not movers or not group:
            return
        run = movers + group if side == "right" else group + movers
        lo, hi = self._span_of(run)
        new = tuple(group + movers) if side == "right" else tuple(movers + group)
        self._emit(Event(
            PERMUTE, STAGE, 0, span=(lo, hi), order=new,
            participants=tuple((i, OVER) for i in run), note=note))

    def boundary_IIa(self) -> None:
        """⟨T, ZT⟩ -> ⟨ZT|_Z, T⟩ for each Z-framed block, then clear the way."""
        g = self.g
        ipb = self.members("I", "group")
        zt = self.members("IIa", "group")
        for cid in zt:
            lo, hi = self._span_of(ipb)
            if self.dec.index(cid) != hi:
                raise WeaveError("Z-framed block is not next to the mega-block I group")
            inner = self.dec.block(cid).kernel
            t = global_twist(inner, from_z_theta(-1, 0, g))
            bid = next((i for i in ipb if self.dec.block(i).kernel.same_up_to_source(t)),
                       None)
            if bid is None:
                raise WeaveError(f"no pulled-back block matches Z^-1 ⊗ block {cid}")
            cert = zeta_vanishing("O_Z(Z)", f"block {cid} = Z ⊗ block {bid}")
            self.chains[cid].append(cert)
            self._emit(Event(
                DIVISOR, STAGE, 0, span=(lo, hi + 1), order=(cid,) + tuple(ipb),
                participants=((cid, UNDER),) + tuple((i, OVER) for i in ipb),
                kernel_updates={cid: kernel(ZRESTRICTED, 0, inner=inner)},
                certificates=(cert,), tags={cid: IN_A},
                note=f"restriction to Z through 0 -> O -> O(Z) -> O_Z(Z) -> 0, B={bid}"),
                (bid,))
        self._bypass(self.members("IIa", "rest"), ipb, "left",
                     "processed IIa blocks lie in A and pass the mega-block I group")

    def boundary_IIIb(self) -> None:
        """⟨Z^{-1}T, T⟩ -> ⟨T, O_Z ⊗ T⟩ for each Z^{-1}-framed block."""
        g = self.g
        ivpb = self.members("IV", "group")
        heads = self.members("IIIb", "group")
        for cid in reversed(heads):
            lo, hi = self._span_of(ivpb)
            if self.dec.index(cid) != lo - 1:
                raise WeaveError("Z^-1-framed block is not next to the mega-block IV group")
            inner = self.dec.block(cid).kernel
            t = global_twist(inner, from_z_theta(1, 0, g))
            bid = next((i for i in ivpb if self.dec.block(i).kernel.same_up_to_source(t)),
                       None)
            if bid is None:
                raise WeaveError(f"no pulled-back block matches Z ⊗ block {cid}")
            cert = zeta_vanishing("O_Z(omega_M)", f"block {cid} = Z^-1 ⊗ block {bid}")
            self.chains[cid].append(cert)
            self._emit(Event(
                DIVISOR, STAGE, 0, span=(lo - 1, hi), order=tuple(ivpb) + (cid,),
                participants=((cid, UNDER),) + tuple((i, OVER) for i in ivpb),
                kernel_updates={cid: kernel(ZRESTRICTED, 0, inner=t)},
                certificates=(cert,), tags={cid: IN_A_PRIME},
                note=f"restriction to Z through 0 -> O(-Z) -> O -> O_Z -> 0, B={bid}"),
                (bid,))
        self._bypass(self.members("IIIb", "rest"), ivpb, "right",
                     "processed IIIb blocks lie in A' and pass the mega-block IV group")

    def run_left(self) -> None:
        self.process_megablock("I")
        self.process_megablock("IIa")
        self.boundary_IIa()
        self.process_megablock("IIb")
        self._bypass(self.members("IIb", "rest"), self.members("I", "group"), "left",
                     "processed IIb blocks lie in A and pass the mega-block I group")

    def run_right(self) -> None:
        self.process_megablock("IV")
        self.process_megablock("IIIb")
        self.boundary_IIIb()
        self.process_megablock("IIIa")
        self._bypass(self.members("IIIa", "rest"), self.members("IV", "group"), "right",
                     "processed IIIa blocks lie in A' and pass the mega-block IV group")

    def finalize(self) -> WeaveResult:
        if sorted(self.done) != sorted(SUBSTAGES):
            raise WeaveError(f"finalize before all sub-stages ran: {self.done}")
        g, dec = self.g, self.dec
        prime = [b.id for b in dec.blocks if self.tags[b.id] == IN_A_PRIME]
        others = [b.id for b in dec.blocks if self.tags[b.id] != IN_A_PRIME]
        pb = [i for i in others if self.tags[i] == PULLED_BACK]
        n_res = len(dec) - len(pb)
        if others[len(others) - len(pb):] != pb:
            raise WeaveError("pulled-back blocks are not contiguous at the right end")
        sizes = [n_res] + [len(mb) for mb in theorem11_cells(g)]
        cuts, acc = [], 0
        for s in sizes[:-1]:
            acc += s
            cuts.append(acc)
        w = omega_M(g)
        self._emit(Event(
            GLOBAL_TWIST, STAGE, 0, span=(0, len(dec)), order=tuple(prime + others),
            participants=tuple((i, UNDER) for i in prime) + tuple((i, OVER) for i in others),
            kernel_updates={i: global_twist(dec.block(i).kernel, w) for i in prime},
            boundaries=tuple(sorted({c for c in cuts if 0 < c < len(dec)})),
            tags={i: IN_A for i in prime},
            note="A' blocks twisted by omega_M wrap round to the left into A"))
        want = [k for mb in theorem11_kernels(g) for k in mb]
        got = [dec.block(i).kernel for i in pb]
        if len(got) != len(want) or any(not a.same_up_to_source(b) for a, b in zip(got, want)):
            raise WeaveError("final pulled-back blocks differ from the target decomposition")
        residual = dec.ids[:n_res]
        if any(self.tags[i] != IN_A for i in residual):
            raise WeaveError("a residual block is not in A")
        return WeaveResult(g, dec, dict(self.tags), self.chains, pb, residual,
                           list(self.thm61), dict(self.selections))


def run(dec: Decomposition, g: int, seq: int = 0) -> WeaveResult:
    w = Weave(dec, g, seq)
    w.bind()
    w.classify_pullbacks()
    w.run_left()
    w.run_right()
    return w.finalize()


def n_side(result: WeaveResult) -> Decomposition:
    """The target decomposition of D^b(N), read off the pulled-back blocks."""
    kernels = [result.dec.block(i).kernel for i in result.pulled_back]
    sizes = [len(mb) for mb in theorem11_cells(result.g)]
    return from_kernels(kernels, sizes, "N")


# --------------------------------------------------------- dual decomposition

_TT = "[TT, Theorem 4.1]"


def comparison_certificates(g: int) -> dict[tuple[int, int], list[Certificate]]:
    """Certificates that the E- and Ē-mega-blocks agree, keyed by mega-block pair.

    Mega-blocks are 0..3 for A, B, C, D.  Most steps cite an external vanishing
    theorem; the A/D pairs are checked here.
    """
    r = [len(mb) for mb in theorem11_cells(g)]
    d, j = 2 * g - 1, g - 1
    out: dict[tuple[int, int], list[Certificate]] = {}

    def add(pair, cert):
        out.setdefault(pair, []).append(cert)

    for l in range(r[0]):
        for k in range(r[1]):
            add((0, 1), external(_TT, k=k, l=l, pair="A,Bbar"))
            add((0, 1), external(_TT, k=k, l=l, pair="Abar,B"))
        for k in range(r[2]):
            add((0, 2), external(_TT, k=k, l=l, pair="A,Cbar"))
            add((0, 2), external(_TT, k=k, l=l, pair="Abar,C"))
        for k in range(r[3]):
            if l - k < 0:
                ob = Obligation.of("Thm7.1", "A against Dbar", g=g, d=d, j=j,
                                   a=g - 1 - 2 * k, b=g - 2 - 2 * l, t=l - k)
            else:
                ob = Obligation.of("Thm7.1", "A against Dbar", g=g, d=d, j=j,
                                   a=g - 2 - 2 * l, b=g - 1 - 2 * k, t=k - l - 1)
            add((0, 3), require(ob))
            add((0, 3), require(Obligation.of("Lemma5.2", "Abar against D", g=g, d=d, j=j,
                                              a=g - 2 - 2 * l, b=g - 1 - 2 * k,
                                              t=k - l - 1)))
    for p, q in ((1, 2), (1, 3), (2, 3)):
        for l in range(r[p]):
            for k in range(r[q]):
                add((p, q), external(_TT, k=k, l=l, pair=f"{'ABCD'[p]},{'ABCD'[q]}bar"))
                add((p, q), external(_TT, k=k, l=l, pair=f"{'ABCD'[p]}bar,{'ABCD'[q]}"))
    return out


def dual_sod(g: int) -> tuple[Decomposition, list]:
    """Mutate each final mega-block into its Ē form, k increasing."""
    dec = theorem11_expected(g)
    comp = comparison_certificates(g)
    cells = theorem11_cells(g)
    cuts = [0]
    for mb in cells:
        cuts.append(cuts[-1] + len(mb))
    seq = 0
    for q, mb in enumerate(cells):
        certs = tuple(c for pair, cs in sorted(comp.items()) if q in pair for c in cs)
        if not certs:
            certs = (external("semi-orthogonality of the target decomposition", g=g),)
        lo = cuts[q]
        ids = dec.ids[lo:lo + len(mb)]
        # ids[0] has the smallest E-degree and stays; each later block moves to the front
        for n in range(1, len(ids)):
            bid = ids[n]
            deg, th = mb[n]
            new = kernel(TENSOR_EBAR if deg > 1 else TENSOR_E, deg, from_z_theta(0, th, g),
                         source_twist_free=True)
            window = dec.ids[lo:lo + n + 1]
            apply_event(dec, Event(
                PROJECTOR, DUAL_STAGE, seq, span=(lo, lo + n + 1),
                order=(bid,) + tuple(w for w in window if w != bid),
                participants=((bid, UNDER),) + tuple((w, OVER) for w in window if w != bid),
                kernel_updates={bid: new}, certificates=certs,
                note=f"mega-block {'ABCD'[q]}: E^{deg} becomes Ē^{deg}"))
            seq += 1
    report = diff(dec, theorem7_expected(g))
    if report:
        raise WeaveError("dual decomposition differs from the closed form:\n"
                         + "\n".join(report))
    return dec, dec.log


def external_count(log) -> int:
    return sum(1 for ev in log for c in ev.certificates if c.rule == EXTERNAL)


__all__ = ["run", "Weave", "WeaveResult", "truncation_pieces", "reduce_via_truncation",
           "koszul", "dual_sod", "external_count", "theorem11_expected",
           "theorem11_cells", "theorem7_expected", "lemma_selection", "n_side",
           "pulled_back_count"]
