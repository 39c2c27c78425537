"""Stage three: the Broken Loom.

The cross-warp output is rotated around the helix, rewritten with E-kernels,
re-sorted inside each mega-block by λ = 2k + j, and finally the low-λ half of
the last mega-block is wrapped around to the front, giving four mega-blocks.

Blocks are keyed by (mega-block, λ, k); the E-degree is j = λ - 2k.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .crosswarp import theorem32_expected, theorem32_index
from .decomposition import (GLOBAL_TWIST, OVER, PERMUTE, SPLIT, UNDER, Decomposition,
                            Event, apply_event, diff, from_kernels)
from .kernels import TENSOR_E, KernelExpr, global_twist, kernel, rewrite_F_to_E
from .picard import THETA, from_z_theta, omega_M
from .vanishing import Certificate, Obligation, require

STAGE = "loom"
MEGA = ("I", "II", "III", "IV")


class LoomError(RuntimeError):
    pass


# ----------------------------------------------------------- closed forms

# (Z offset, θ offset) so that a three-block kernel is Z^{λ+z-g} θ^{-(λ-k+c)}.
_THREE = ((3, 1), (2, 0), (1, -1))
# Four mega-blocks after the split, same convention.
_FOUR = ((2, 1), (3, 1), (2, 0), (1, -1))


def e_kernel(g: int, lam: int, k: int, z: int, c: int) -> KernelExpr:
    return kernel(TENSOR_E, lam - 2 * k, from_z_theta(lam + z - g, -(lam - k + c), g),
                  source_twist_free=lam - 2 * k > 0)


def three_cells(g: int) -> list[list[tuple[int, int]]]:
    """(λ, k) per mega-block of the three-block form, λ descending then k descending."""
    caps = (g - 2, g - 2, g - 1)
    out = []
    for cap in caps:
        cells = [(lam, k) for lam in range(2 * cap + 1) for k in range(lam // 2 + 1)
                 if lam - k <= cap]
        cells.sort(key=lambda c: (-c[0], -c[1]))
        out.append(cells)
    return out


def four_cells(g: int) -> list[list[tuple[int, int]]]:
    """(λ, k) index sets of the four mega-blocks, λ descending then k descending."""
    top = three_cells(g)
    first = [c for c in top[2] if c[0] <= g - 2]
    last = [c for c in top[2] if c[0] >= g - 1]
    return [first, top[0], top[1], last]


def eq51_index(g: int) -> list[tuple[int, int, int]]:
    """(q, λ, k) in the cross-warp order: k descending then j descending."""
    return [(q, 2 * k + j, k) for q, k, j in theorem32_index(g)]


def eq51_expected(g: int) -> Decomposition:
    idx = eq51_index(g)
    kernels = [e_kernel(g, lam, k, *_THREE[q]) for q, lam, k in idx]
    return from_kernels(kernels, [sum(1 for x in idx if x[0] == q) for q in range(3)],
                        f"M_{g - 1}")


def theorem53_expected(g: int) -> Decomposition:
    cells = three_cells(g)
    kernels = [e_kernel(g, lam, k, *_THREE[q]) for q in range(3) for lam, k in cells[q]]
    return from_kernels(kernels, [len(c) for c in cells], f"M_{g - 1}")


def theorem55_expected(g: int) -> Decomposition:
    cells = four_cells(g)
    kernels = [e_kernel(g, lam, k, *_FOUR[q]) for q in range(4) for lam, k in cells[q]]
    return from_kernels(kernels, [len(c) for c in cells], f"M_{g - 1}")


def theorem55_sizes(g: int) -> list[int]:
    return [len(c) for c in four_cells(g)]


# ----------------------------------------------------------- obligations


def swap_obligation(g: int, left: tuple[int, int], right: tuple[int, int]) -> Obligation:
    """Vanishing needed to move `right` in front of `left` inside one mega-block."""
    (l1, k1), (l2, k2) = left, right
    j1, j2 = l1 - 2 * k1, l2 - 2 * k2
    d, j = 2 * g - 1, g - 1
    if l1 < l2:
        return Obligation.of("Lemma5.2", "lambda order", g=g, d=d, j=j, a=j1, b=j2,
                             t=(k1 + j1) - (k2 + j2))
    if l1 == l2 and k1 < k2:
        # Λ^t ⊗ (F^j1)^* ⊗ F^j2 rewritten as Λ^{t+j2-j1} ⊗ F̄^j1 ⊗ F^{*j2}.
        return Obligation.of("Thm7.1", "equal lambda", g=g, d=d, j=j, a=j2, b=j1,
                             t=-(k2 - k1))
    raise LoomError(f"blocks {left} and {right} are already in order")


# ------------------------------------------------------------------- run


@dataclass
class LoomResult:
    g: int
    dec: Decomposition
    keys: dict  # block id -> (mega-block 0..3, λ, k)
    certificates: list = field(default_factory=list)


def _check(dec: Decomposition, expected: Decomposition, what: str) -> None:
    report = diff(dec, expected)
    if report:
        raise LoomError(f"{what} differs from the closed form:\n" + "\n".join(report))


def helix_and_rewrite(dec: Decomposition, g: int, seq: int = 0) -> tuple[dict, int]:
    """Twist by ω_M^{3-g}, pass to E-kernels, twist by θ^{-(2g-5)}.

    Returns the (q, λ, k) key of every block and the next event time.
    """
    _check(dec, theorem32_expected(g), "loom input")
    keys = {b.id: key for b, key in zip(dec.blocks, eq51_index(g))}

    rot = omega_M(g) * (3 - g)
    apply_event(dec, Event(
        GLOBAL_TWIST, STAGE, seq,
        kernel_updates={b.id: global_twist(b.kernel, rot) for b in dec.blocks},
        note=f"helix rotation: twist by omega_M^{3 - g}"))
    apply_event(dec, Event(
        GLOBAL_TWIST, STAGE, seq + 1,
        kernel_updates={b.id: rewrite_F_to_E(b.kernel, g) for b in dec.blocks},
        note="rewrite F^* tensor powers through E"))
    shift = THETA(g) * -(2 * g - 5)
    apply_event(dec, Event(
        GLOBAL_TWIST, STAGE, seq + 2,
        kernel_updates={b.id: global_twist(b.kernel, shift) for b in dec.blocks},
        note=f"twist by theta^{-(2 * g - 5)}"))
    for b in dec.blocks:
        q, lam, k = keys[b.id]
        if b.kernel != e_kernel(g, lam, k, *_THREE[q]):
            raise LoomError(f"block {b.id} (mega-block {q + 1}, λ={lam}, k={k}) has "
                            f"kernel {b.kernel.label(g)}, lattice identity fails")
    _check(dec, eq51_expected(g), "helix output")
    return keys, seq + 3


def _sort_key(cell: tuple[int, int]) -> tuple[int, int]:
    return (-cell[0], -cell[1])


def reorder_by_lambda(dec: Decomposition, g: int, keys: dict,
                      seq: int = 0) -> tuple[list[Certificate], int]:
    """Stable adjacent-swap sort to (λ desc, k desc) inside each mega-block."""
    certs: list[Certificate] = []
    cuts = [0, *dec.boundaries, len(dec)]
    for lo, hi in zip(cuts, cuts[1:]):
        # bubble sort on the live decomposition, one certified event per swap
        changed = True
        while changed:
            changed = False
            for p in range(lo, hi - 1):
                a, b = dec.blocks[p], dec.blocks[p + 1]
                ca, cb = keys[a.id][1:], keys[b.id][1:]
                if _sort_key(cb) < _sort_key(ca):
                    cert = require(swap_obligation(g, ca, cb))
                    certs.append(cert)
                    apply_event(dec, Event(
                        PERMUTE, STAGE, seq, span=(p, p + 2), order=(b.id, a.id),
                        participants=((b.id, OVER), (a.id, OVER)),
                        certificates=(cert,),
                        note=f"(λ,k)={cb} passes {ca}"))
                    seq += 1
                    changed = True
    _check(dec, theorem53_expected(g), "reordered decomposition")
    return certs, seq


def split_four(dec: Decomposition, g: int, keys: dict, seq: int = 0) -> tuple[dict, int]:
    """Cut the last mega-block at λ = g-1 and wrap its low part to the front."""
    n = len(dec)
    last = dec.boundaries[-1] if dec.boundaries else 0
    tail = [b.id for b in dec.blocks[last:] if keys[b.id][1] <= g - 2]
    head = [b.id for b in dec.blocks if b.id not in set(tail)]
    if [b.id for b in dec.blocks[n - len(tail):]] != tail:
        raise LoomError("the λ <= g-2 blocks are not at the end of the last mega-block")
    w = omega_M(g)
    sizes = [len(tail)] + [hi - lo for lo, hi in
                           zip([0, *dec.boundaries], [*dec.boundaries, n])]
    sizes[-1] -= len(tail)
    cuts, acc = [], 0
    for s in sizes[:-1]:
        acc += s
        cuts.append(acc)
    apply_event(dec, Event(
        SPLIT, STAGE, seq, span=(0, n), order=tuple(tail + head),
        participants=tuple((i, UNDER) for i in tail) + tuple((i, OVER) for i in head),
        kernel_updates={i: global_twist(dec.block(i).kernel, w) for i in tail},
        boundaries=tuple(sorted({c for c in cuts if 0 < c < n})),
        note="split at λ = g-1; the low half wraps around the helix (twist by omega_M)"))
    out = {}
    for i, (q, lam, k) in keys.items():
        if q == 2 and lam <= g - 2:
            out[i] = (0, lam, k)
        elif q == 2:
            out[i] = (3, lam, k)
        else:
            out[i] = (q + 1, lam, k)
    _check(dec, theorem55_expected(g), "four mega-blocks")
    return out, seq + 1


def run(dec: Decomposition, g: int) -> LoomResult:
    keys, seq = helix_and_rewrite(dec, g)
    certs, seq = reorder_by_lambda(dec, g, keys, seq)
    keys, seq = split_four(dec, g, keys, seq)
    return LoomResult(g, dec, keys, certs)


__all__ = ["run", "helix_and_rewrite", "reorder_by_lambda", "split_four",
           "eq51_expected", "theorem53_expected", "theorem55_expected",
           "theorem55_sizes", "four_cells", "three_cells", "swap_obligation", "e_kernel"]
