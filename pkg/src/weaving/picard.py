"""Rank-2 Picard lattice of the stable-pair moduli spaces.

Elements are stored as integer coefficients of H and E.  The chart
O(m, n) = (m+n)H - nE is the canonical one for input and output.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class PicElt:
    """A line bundle class hH + eE."""

    h: int = 0
    e: int = 0

    def __add__(self, other: "PicElt") -> "PicElt":
        return PicElt(self.h + other.h, self.e + other.e)

    def __sub__(self, other: "PicElt") -> "PicElt":
        return PicElt(self.h - other.h, self.e - other.e)

    def __neg__(self) -> "PicElt":
        return PicElt(-self.h, -self.e)

    def __mul__(self, c: int) -> "PicElt":
        return PicElt(c * self.h, c * self.e)

    __rmul__ = __mul__

    @property
    def m(self) -> int:
        return self.h + self.e

    @property
    def n(self) -> int:
        return -self.e

    def to_mn(self) -> tuple[int, int]:
        return (self.m, self.n)

    def is_zero(self) -> bool:
        return self.h == 0 and self.e == 0

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n}

    @classmethod
    def from_json(cls, obj: dict) -> "PicElt":
        return of_mn(int(obj["m"]), int(obj["n"]))

    def __str__(self) -> str:
        return f"O({self.m},{self.n})"


ZERO = PicElt(0, 0)


def of_mn(m: int, n: int) -> PicElt:
    """O(m, n) as (m+n)H - nE."""
    return PicElt(m + n, -n)


def weight(b: PicElt, i: int) -> int:
    """Weight of b at the wall between M_{i-1} and M_i."""
    m, n = b.to_mn()
    return n - (i - 1) * m


def restrict(b: PicElt, k: int) -> PicElt:
    """Restriction to the fiber of the k-th projection: O(m,n) -> O(m, n-km)."""
    if k < 0:
        raise ValueError(f"restriction degree must be non-negative, got {k}")
    m, n = b.to_mn()
    return of_mn(m, n - k * m)


def _check_genus(g: int) -> None:
    if g < 2:
        raise ValueError(f"genus must be at least 2, got {g}")


def Z(g: int) -> PicElt:
    _check_genus(g)
    return of_mn(1, g - 1)


def LBAR(g: int) -> PicElt:
    _check_genus(g)
    return of_mn(0, -1)


def THETA(g: int) -> PicElt:
    _check_genus(g)
    return of_mn(2, 2 * g - 3)


def omega(g: int, d: int) -> PicElt:
    """Canonical class of M_i(d)."""
    _check_genus(g)
    if not 1 <= d <= 2 * g - 1:
        raise ValueError(f"degree d={d} outside 1..{2 * g - 1}")
    return of_mn(-3, -(d + g - 4))


def omega_M(g: int) -> PicElt:
    return omega(g, 2 * g - 1)


_SYMBOLS = {
    "Z": Z,
    "Lbar": LBAR,
    "Λ̄": LBAR,
    "theta": THETA,
    "θ": THETA,
    "omegaM": omega_M,
    "ωM": omega_M,
}


def named(g: int, symbol: str, d: int | None = None) -> PicElt:
    """Look up a named bundle; omega needs its degree d."""
    if symbol in ("omega", "ω"):
        if d is None:
            raise ValueError("omega needs a degree")
        return omega(g, d)
    try:
        fn = _SYMBOLS[symbol]
    except KeyError:
        raise ValueError(f"unknown bundle symbol {symbol!r}") from None
    return fn(g)


def in_z_theta(x: PicElt, g: int) -> tuple[int, int]:
    """Coordinates (a, b) with x = aZ + b*theta.

    Z and theta span the lattice: the determinant of their (m, n) columns is -1.
    """
    m, n = x.to_mn()
    # Z=(1,g-1), theta=(2,2g-3); inverse of [[1,2],[g-1,2g-3]] is [[-(2g-3),2],[g-1,-1]].
    a = -(2 * g - 3) * m + 2 * n
    b = (g - 1) * m - n
    assert Z(g) * a + THETA(g) * b == x
    return a, b


def from_z_theta(a: int, b: int, g: int) -> PicElt:
    return Z(g) * a + THETA(g) * b


def z_exponent(x: PicElt, g: int) -> int:
    return in_z_theta(x, g)[0]


def fmt_z_theta(x: PicElt, g: int) -> str:
    a, b = in_z_theta(x, g)
    parts = []
    if a:
        parts.append("Z" if a == 1 else f"Z^{a}")
    if b:
        parts.append("θ" if b == 1 else f"θ^{b}")
    return "".join(parts) or "O"
