"""Stage two: the Cross Warp.

Each mega-block of the twill output is a stack G_0, ..., G_N with
G_n = <D^n, Λ̄^*G_{n-1}>.  A basic move at degree k turns the pair
<Φ_{k-1}, G_k> into <Λ̄^*G_{k-1}, Φ_k>, where Φ_k = <F^{*⊠k}, ..., F^*, O>.
It runs in three logged steps: D^k passes Λ̄^*G_{k-1} and becomes the complex
F^{•⊠k}, the two groups of older blocks swap, and F^{•⊠k} passes Φ_{k-1} to
become F^{*⊠k}.  One sweep k = 1..N leaves Λ̄^*S_{N-1}, Φ_N; recursing on the
twisted stack finishes the mega-block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .decomposition import (OVER, PERMUTE, PROJECTOR, UNDER, Decomposition, Event,
                            apply_event, diff, from_kernels, kernels_match)
from .kernels import FBULLET, TENSOR_FSTAR, KernelExpr, kernel
from .picard import LBAR, THETA, ZERO, PicElt, Z, weight
from .twill import theorem22_index
from .vanishing import Obligation, require

STAGE = "crosswarp"


class CrossWarpError(RuntimeError):
    pass


def megablock_twists(g: int) -> list[PicElt]:
    return [ZERO, Z(g) + LBAR(g), THETA(g) + LBAR(g)]


def megablock_tops(g: int) -> list[int]:
    return [g - 2, g - 2, g - 1]


def f_kernel(g: int, q: int, deg: int, power: int) -> KernelExpr:
    """T_q Λ̄^{*power} F^{*⊠deg}."""
    return kernel(TENSOR_FSTAR, deg, megablock_twists(g)[q] - LBAR(g) * power)


def theorem32_index(g: int) -> list[tuple[int, int, int]]:
    """(mega-block q, k, j) ordered k descending then j descending."""
    out = []
    for q, cap in enumerate(megablock_tops(g)):
        cells = [(k, j) for k in range(cap + 1) for j in range(cap + 1 - k)]
        cells.sort(key=lambda kj: (-kj[0], -kj[1]))
        out.extend((q, k, j) for k, j in cells)
    return out


def theorem32_expected(g: int) -> Decomposition:
    idx = theorem32_index(g)
    kernels = [f_kernel(g, q, j, k) for q, k, j in idx]
    sizes = [sum(1 for q, _, _ in idx if q == c) for c in range(3)]
    return from_kernels(kernels, sizes, f"M_{g - 1}")


# ------------------------------------------------------------ obligations


def _resolve_pair(g: int, i: int, k: int, l: int, m: int) -> Obligation:
    """F^{*⊠m} against D^l Λ̄^{*(k-l)}, l < k, m <= k."""
    t = l + m - k
    if not 0 <= t <= m:
        return Obligation.of("Thm7.1", "lemma 4.10", g=g, d=2 * g - 1 - 2 * l,
                             j=i - l, a=m, b=0, t=t)
    # The same cohomology group read through Serre duality on the fiber.
    return Obligation.of("Thm7.1", "lemma 4.10 (dual form)", g=g, d=2 * g - 1 - 2 * l,
                         j=i - l, a=0, b=m, t=l - k)


@lru_cache(maxsize=None)
def resolve_obligations(g: int, i: int, k: int) -> tuple:
    """D^k passing <D^{k-1}Λ̄^*, ..., Λ̄^{*k}> to become F^{•⊠k}."""
    obs = [_resolve_pair(g, i, k, l, m) for l in range(k) for m in range(k + 1)]
    obs += [Obligation.of("Thm7.4", "lemma 4.10", g=g, d=2 * g - 1 - 2 * k, j=i - k,
                          a=0, b=l, t=m)
            for l in range(k) for m in range(1, k - l + 1)]
    return tuple(require(ob) for ob in obs)


@lru_cache(maxsize=None)
def insert_obligations(g: int, i: int, k: int) -> tuple:
    """F^{•⊠k} passing Φ_{k-1} to become F^{*⊠k}."""
    return tuple(require(Obligation.of("Thm7.4", "lemma 4.9", g=g, d=2 * g - 1 - 2 * l,
                                       j=i - l, a=m, b=0, t=k))
                 for l in range(k + 1) for m in range(k))


@lru_cache(maxsize=None)
def family_obligations(g: int, i: int, k: int) -> tuple:
    """Semi-orthogonality inside <Λ̄^{*k}, F^{*⊠k}, ..., O>."""
    d = 2 * g - 1
    obs = [Obligation.of("Thm9.6", "lemma 3.5", g=g, d=d, j=i, a=a, b=b)
           for a in range(1, k + 1) for b in range(a)]
    obs += [Obligation.of("Thm7.1", "lemma 3.5", g=g, d=d, j=i, a=0, b=l, t=-k)
            for l in range(k)]
    obs += [Obligation.of("Thm7.4", "lemma 3.5", g=g, d=d, j=i, a=l, b=0, t=k)
            for l in range(k)]
    return tuple(require(ob) for ob in obs)


@lru_cache(maxsize=None)
def swap_obligations(g: int, i: int, k: int) -> tuple:
    """Φ_{k-1} against Λ̄^*G_{k-1}: k^2 orthogonal crossings."""
    return tuple(require(_resolve_pair(g, i, k, l, m))
                 for m in range(k) for l in range(k))


def step_insert_bullet(g: int, k: int, i: int | None = None) -> tuple:
    """Obligations of <F^{*⊠k}, Φ_{k-1}> -> <Φ_{k-1}, F^{•⊠k}>."""
    return insert_obligations(g, g - 1 if i is None else i, k)


def step_resolve_bullet(g: int, k: int, i: int | None = None) -> tuple:
    """Obligations of <Λ̄^*G_{k-1}, F^{•⊠k}> -> <D^k, Λ̄^*G_{k-1}>."""
    return resolve_obligations(g, g - 1 if i is None else i, k)


# ------------------------------------------------------------------- run


@dataclass
class CrossWarpResult:
    g: int
    dec: Decomposition
    keys: dict  # block id -> (q, degree, power)
    obligations: int = 0
    moves: list = field(default_factory=list)


class _Warp:
    def __init__(self, dec: Decomposition, g: int):
        self.dec = dec
        self.g = g
        self.i = g - 1
        self.key: dict[int, tuple[int, int, int]] = {}
        self.by_key: dict[tuple[int, int, int], int] = {}
        self.converted: set[int] = set()
        self.count = 0
        self.moves: list = []

    def bind(self) -> None:
        expected = _twill_layout(self.g)
        report = diff(self.dec, expected)
        if report:
            raise CrossWarpError("input is not the twill output:\n" + "\n".join(report))
        for b, (q, k, j) in zip(self.dec.blocks, theorem22_index(self.g)):
            self.key[b.id] = (q, k, j)
            self.by_key[(q, k, j)] = b.id
            if k == 0:
                self.converted.add(b.id)

    def ids(self, q: int, cells) -> list[int]:
        return [self.by_key[(q, d, p)] for d, p in cells]

    def _expect_contiguous(self, ids: list[int]) -> int:
        pos = [self.dec.index(i) for i in ids]
        if pos != list(range(pos[0], pos[0] + len(ids))):
            raise CrossWarpError(f"pattern mismatch: blocks {ids} are not in place")
        return pos[0]

    def _emit(self, ev: Event) -> None:
        self.count += len(ev.certificates)
        apply_event(self.dec, ev)

    def basic_move(self, q: int, k: int, p: int, seq: int) -> int:
        g, i = self.g, self.i
        phi = self.ids(q, [(k - 1 - r, p) for r in range(k)])
        top = self.by_key[(q, k, p)]
        lower = self.ids(q, [(k - 1 - r, p + 1 + r) for r in range(k)])
        for bid in phi:
            if bid not in self.converted:
                raise CrossWarpError(f"block {bid} expected in F-form before degree {k}")
        if top in self.converted or any(b in self.converted and self.key[b][1] > 0
                                        for b in lower):
            raise CrossWarpError("stacking mismatch: D-blocks already converted")
        start = self._expect_contiguous(phi + [top] + lower)
        tw = megablock_twists(g)[q] - LBAR(g) * p
        note = f"mega-block {q + 1}, degree {k}, twist power {p}"

        # D^k moves right across Λ̄^*G_{k-1}; what arrives is F^{•⊠k}.
        s1 = start + k
        self._emit(Event(
            PROJECTOR, STAGE, seq, span=(s1, s1 + k + 1), order=tuple(lower + [top]),
            participants=((top, UNDER),) + tuple((b, OVER) for b in lower),
            kernel_updates={top: kernel(FBULLET, k, tw)},
            certificates=resolve_obligations(g, i, k), weft=True,
            note=note + ": D^k resolves to the weft"))
        # Φ_{k-1} and Λ̄^*G_{k-1} are mutually orthogonal.
        self._emit(Event(
            PERMUTE, STAGE, seq + 1, span=(start, start + 2 * k), order=tuple(lower + phi),
            participants=tuple((b, OVER) for b in phi + lower),
            certificates=swap_obligations(g, i, k), note=note))
        # F^{•⊠k} moves left across Φ_{k-1}, landing as F^{*⊠k}.
        s3 = start + k
        self._emit(Event(
            PROJECTOR, STAGE, seq + 2, span=(s3, s3 + k + 1), order=tuple([top] + phi),
            participants=((top, UNDER),) + tuple((b, OVER) for b in phi),
            kernel_updates={top: kernel(TENSOR_FSTAR, k, tw)},
            certificates=insert_obligations(g, i, k) + family_obligations(g, i, k),
            weft=True, note=note + ": the weft settles as F^{*⊠k}"))
        self.converted.add(top)
        self.moves.append((q, k, p))
        return seq + 3

    def run(self) -> int:
        seq = 0
        for q, n_top in enumerate(megablock_tops(self.g)):
            for p in range(n_top):
                for k in range(1, n_top - p + 1):
                    seq = self.basic_move(q, k, p, seq)
        return seq


def _twill_layout(g: int) -> Decomposition:
    from .twill import theorem22_expected

    return theorem22_expected(g)


def windows_compatible(kx: KernelExpr, i: int) -> bool:
    """F^{*⊠j}-type blocks have weights in [w, w+j]; they must fit in [0, i-1]."""
    w = weight(kx.twist, i)
    return 0 <= w and w + kx.source_degree <= i - 1


def run(dec: Decomposition, g: int, check: bool = True) -> CrossWarpResult:
    warp = _Warp(dec, g)
    warp.bind()
    warp.run()
    if check:
        report = diff(dec, theorem32_expected(g))
        if report:
            raise CrossWarpError("cross warp output differs from the closed form:\n"
                                 + "\n".join(report))
    return CrossWarpResult(g, dec, dict(warp.key), warp.count, warp.moves)


__all__ = ["run", "theorem32_expected", "theorem32_index", "step_insert_bullet",
           "step_resolve_bullet", "windows_compatible", "kernels_match"]
