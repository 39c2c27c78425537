"""Compare the twill braid word with the brute-force crossing oracle, per genus.

Also splits the engine's crossings into simple swaps and chain crossings, the
ones that happen at an integer level or an integer x.
"""

import argparse

from weaving import oracle, twill
from weaving.decomposition import CHAIN, braid_word, event_swaps, replay


def census(g: int) -> dict:
    res = twill.run(g, twill.COROLLARY28)
    by_kind = {}
    dec = replay([])
    for ev in res.log:
        n = len(event_swaps(ev, dec.ids))
        by_kind[ev.kind] = by_kind.get(ev.kind, 0) + n
        dec = replay([ev], dec)
    return {"g": g, "engine": len(braid_word(res.log)), "oracle": oracle.crossing_count(g),
            "chain": by_kind.get(CHAIN, 0), "by_kind": by_kind}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--to", type=int, default=8)
    args = ap.parse_args()
    print(f"{'g':>3} {'engine':>8} {'oracle':>8} {'chain':>7}  match")
    for g in range(2, args.to + 1):
        c = census(g)
        print(f"{g:>3} {c['engine']:>8} {c['oracle']:>8} {c['chain']:>7}  "
              f"{'yes' if c['engine'] == c['oracle'] else 'NO'}")


if __name__ == "__main__":
    main()
