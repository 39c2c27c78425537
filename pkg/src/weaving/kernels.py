"""Symbolic Fourier-Mukai kernels used as block labels.

A kernel is a base family (a structure sheaf, a tensor power of a universal
bundle, a dual sheaf, ...) tensored with a line bundle from the moduli side.
Line bundles that live on the symmetric power of the curve are not tracked;
dropping one sets ``source_twist_free``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .picard import ZERO, PicElt, fmt_z_theta

LINE = "LineOnly"
DSHEAF = "DSheaf"
DDUAL = "DDual"
TENSOR_E = "TensorE"
TENSOR_EBAR = "TensorEbar"
TENSOR_FSTAR = "TensorFstar"
TENSOR_FBAR = "TensorFbar"
FBULLET = "FBullet"
ZRESTRICTED = "ZRestricted"

# Degree-0 members of these families are the structure sheaf itself.
_COLLAPSE_AT_ZERO = {DSHEAF, DDUAL, TENSOR_E, TENSOR_EBAR, TENSOR_FSTAR, TENSOR_FBAR}
_INDEXED = _COLLAPSE_AT_ZERO | {FBULLET}


@dataclass(frozen=True)
class Base:
    kind: str
    index: int = 0
    inner: "KernelExpr | None" = None

    def __post_init__(self):
        if self.kind == ZRESTRICTED:
            if self.inner is None:
                raise ValueError("ZRestricted needs an inner kernel")
        elif self.kind not in _INDEXED and self.kind != LINE:
            raise ValueError(f"unknown base kind {self.kind!r}")
        if self.index < 0:
            raise ValueError("base index must be non-negative")

    def to_json(self) -> dict:
        out = {"tag": self.kind, "index": self.index}
        if self.inner is not None:
            out["inner"] = self.inner.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Base":
        inner = obj.get("inner")
        return cls(obj["tag"], obj.get("index", 0),
                   KernelExpr.from_json(inner) if inner else None)


def base(kind: str, index: int = 0, inner: "KernelExpr | None" = None) -> Base:
    if kind in _COLLAPSE_AT_ZERO and index == 0:
        return Base(LINE)
    return Base(kind, index, inner)


@dataclass(frozen=True)
class KernelExpr:
    base: Base
    twist: PicElt = ZERO
    shift: int = 0
    source_twist_free: bool = False
    tag: str = ""

    @property
    def source_degree(self) -> int:
        if self.base.kind == LINE:
            return 0
        if self.base.kind == ZRESTRICTED:
            return self.base.inner.source_degree
        return self.base.index

    def same_up_to_source(self, other: "KernelExpr") -> bool:
        """Equality ignoring the source-twist flag."""
        return (self.base == other.base and self.twist == other.twist
                and self.shift == other.shift and self.tag == other.tag)

    def to_json(self) -> dict:
        out = {
            "base": self.base.to_json(),
            "twist": self.twist.to_json(),
            "shift": self.shift,
            "sourceTwistFree": self.source_twist_free,
        }
        if self.tag:
            out["tag"] = self.tag
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "KernelExpr":
        return cls(Base.from_json(obj["base"]), PicElt.from_json(obj["twist"]),
                   obj.get("shift", 0), obj.get("sourceTwistFree", False),
                   obj.get("tag", ""))

    def label(self, g: int, offset: PicElt = ZERO) -> str:
        return _label(self, g, offset)


def kernel(kind: str, index: int = 0, twist: PicElt = ZERO, *,
           shift: int = 0, source_twist_free: bool = False, tag: str = "",
           inner: KernelExpr | None = None) -> KernelExpr:
    return KernelExpr(base(kind, index, inner), twist, shift,
                      source_twist_free, tag)


def line(twist: PicElt = ZERO) -> KernelExpr:
    return kernel(LINE, 0, twist)


def rewrite_F_to_E(x: KernelExpr, g: int) -> KernelExpr:
    """F^{*⊠j} = E^{⊠j} ⊗ Z^{-j} Λ̄^{-j}, up to a source-side twist."""
    from .picard import LBAR, Z

    if x.base.kind == LINE:
        return x
    if x.base.kind != TENSOR_FSTAR:
        raise ValueError(f"rewrite_F_to_E needs TensorFstar, got {x.base.kind}")
    j = x.base.index
    return replace(x, base=base(TENSOR_E, j),
                   twist=x.twist - (Z(g) + LBAR(g)) * j,
                   source_twist_free=True)


def dualize(x: KernelExpr, g: int) -> KernelExpr:
    """Derived dual of the kernel, shifts left to the caller."""
    from .picard import THETA

    kind, j = x.base.kind, x.base.index
    if kind == LINE:
        return replace(x, twist=-x.twist)
    if kind == TENSOR_FSTAR:
        return replace(x, base=base(TENSOR_FBAR, j), twist=-x.twist,
                       source_twist_free=True)
    if kind == TENSOR_FBAR:
        return replace(x, base=base(TENSOR_FSTAR, j), twist=-x.twist,
                       source_twist_free=True)
    if kind == DSHEAF:
        return replace(x, base=base(DDUAL, j), twist=-x.twist)
    if kind == DDUAL:
        return replace(x, base=base(DSHEAF, j), twist=-x.twist)
    # (E^{⊠j})^* is θ^{-j} Ē^{⊠j} and symmetrically.
    if kind == TENSOR_E:
        return replace(x, base=base(TENSOR_EBAR, j),
                       twist=-x.twist - THETA(g) * j, source_twist_free=True)
    if kind == TENSOR_EBAR:
        return replace(x, base=base(TENSOR_E, j),
                       twist=-x.twist - THETA(g) * j, source_twist_free=True)
    raise ValueError(f"dualize is not defined for {kind}")


def global_twist(x: KernelExpr, t: PicElt) -> KernelExpr:
    return replace(x, twist=x.twist + t)


_SYMBOL = {
    DSHEAF: "D^{}",
    DDUAL: "(D^{})^∨",
    TENSOR_E: "E^⊠{}",
    TENSOR_EBAR: "Ē^⊠{}",
    TENSOR_FSTAR: "F*^⊠{}",
    TENSOR_FBAR: "F̄^⊠{}",
    FBULLET: "F•^⊠{}",
}


def _label(x: KernelExpr, g: int, offset: PicElt) -> str:
    if x.base.kind == ZRESTRICTED:
        body = "O_Z⊗(" + _label(x.base.inner, g, offset) + ")"
        tw = "" if x.twist.is_zero() else fmt_z_theta(x.twist, g)
    else:
        body = "" if x.base.kind == LINE else _SYMBOL[x.base.kind].format(x.base.index)
        tw = fmt_z_theta(x.twist + offset, g)
        if body and tw == "O":
            tw = ""
    s = (tw + body) or "O"
    if x.shift:
        s += f"[{x.shift}]"
    if x.tag:
        s += "'"
    return s
