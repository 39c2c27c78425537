"""Hypothesis checks for the vanishing statements behind each mutation step.

Only the integer side conditions are checked; the conclusions are taken as
axioms.  A passing check returns a Certificate, a failing one a Reject that
lists every inequality that did not hold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import comb

THM_7_1 = "Thm7.1"
THM_7_4 = "Thm7.4"
THM_9_6 = "Thm9.6"
LEMMA_5_2 = "Lemma5.2"
THM_6_1 = "Thm6.1"
KOSZUL = "KoszulRange"
EXTERNAL = "ExternalCitation"
ZETA = "ZetaVanishing"

RULES = (THM_7_1, THM_7_4, THM_9_6, LEMMA_5_2, THM_6_1, KOSZUL, EXTERNAL, ZETA)

CERTIFIED = "Certified"
EXTERNAL_STATUS = "External"


@dataclass(frozen=True)
class Certificate:
    rule: str
    params: tuple
    verified: tuple = ()
    status: str = CERTIFIED

    ok = True

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "params": {k: _num(v) for k, v in self.params},
            "verifiedInequalities": list(self.verified),
            "status": self.status,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        return cls(obj["rule"], tuple(obj["params"].items()),
                   tuple(obj["verifiedInequalities"]), obj["status"])

    def param(self, name: str):
        return dict(self.params)[name]


@dataclass(frozen=True)
class Reject:
    rule: str
    params: tuple
    failures: tuple = ()

    ok = False

    def __str__(self) -> str:
        ps = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.rule}({ps}) rejected: " + "; ".join(self.failures)


class Uncertified(Exception):
    """Raised when a mutation step has an obligation no rule accepts."""

    def __init__(self, rejects):
        self.rejects = list(rejects) if isinstance(rejects, (list, tuple)) else [rejects]
        super().__init__(" | ".join(str(r) for r in self.rejects))


def _num(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    return v


class _Checker:
    """Collects named inequalities, keeping both passes and failures."""

    def __init__(self):
        self.passed: list[str] = []
        self.failed: list[str] = []

    def need(self, cond: bool, text: str) -> None:
        (self.passed if cond else self.failed).append(text)

    def result(self, rule: str, params: tuple):
        if self.failed:
            return Reject(rule, params, tuple(self.failed))
        return Certificate(rule, params, tuple(self.passed))


def _integral(t) -> bool:
    return Fraction(t).denominator == 1


def _base_conditions(c: _Checker, g: int, d: int, j: int) -> None:
    c.need(2 < d <= 2 * g + 1, f"2 < d={d} <= 2g+1={2 * g + 1}")
    c.need(1 <= j <= (d - 1) // 2, f"1 <= j={j} <= floor((d-1)/2)={(d - 1) // 2}")


@lru_cache(maxsize=None)
def check_thm_7_1(g: int, d: int, j: int, a: int, b: int, t) -> Certificate | Reject:
    params = (("g", g), ("d", d), ("j", j), ("a", a), ("b", b), ("t", t))
    if not _integral(t):
        return Reject(THM_7_1, params, ("t not integral",))
    t = int(t)
    c = _Checker()
    _base_conditions(c, g, d, j)
    top = d + g - 2 * j - 1
    c.need(a <= top, f"a={a} <= d+g-2j-1={top}")
    c.need(b <= top, f"b={b} <= d+g-2j-1={top}")
    c.need(a - j - 1 < t, f"a-j-1={a - j - 1} < t={t}")
    c.need(t < top - b, f"t={t} < d+g-2j-1-b={top - b}")
    c.need(not 0 <= t <= a, f"t={t} not in [0,{a}]")
    return c.result(THM_7_1, params)


@lru_cache(maxsize=None)
def check_thm_7_4(g: int, d: int, j: int, a: int, b: int, t) -> Certificate | Reject:
    params = (("g", g), ("d", d), ("j", j), ("a", a), ("b", b), ("t", t))
    if not _integral(t):
        return Reject(THM_7_4, params, ("t not integral",))
    t = int(t)
    c = _Checker()
    if j == 0:
        c.need(d > 0, f"d={d} > 0 (j=0)")
    else:
        _base_conditions(c, g, d, j)
    top = d + g - 2 * j - 1
    c.need(a < t, f"a={a} < t={t}")
    c.need(t < top - b, f"t={t} < d+g-2j-1-b={top - b}")
    return c.result(THM_7_4, params)


@lru_cache(maxsize=None)
def check_thm_9_6(g: int, d: int, j: int, a: int, b: int) -> Certificate | Reject:
    params = (("g", g), ("d", d), ("j", j), ("a", a), ("b", b))
    c = _Checker()
    _base_conditions(c, g, d, j)
    c.need(a <= j, f"a={a} <= j={j}")
    c.need(b < d + g - 2 * j - 1, f"b={b} < d+g-2j-1={d + g - 2 * j - 1}")
    c.need(a > b, f"a={a} > b={b} (divisor condition)")
    return c.result(THM_9_6, params)


@lru_cache(maxsize=None)
def check_lemma_5_2(g: int, d: int, j: int, a: int, b: int, t) -> Certificate | Reject:
    params = (("g", g), ("d", d), ("j", j), ("a", a), ("b", b), ("t", t))
    if not _integral(t):
        return Reject(LEMMA_5_2, params, ("t not integral",))
    t = int(t)
    c = _Checker()
    _base_conditions(c, g, d, j)
    top = d + g - 2 * j - 1
    cap = min(top, j)
    c.need(a <= cap, f"a={a} <= min(d+g-2j-1, j)={cap}")
    c.need(b <= cap, f"b={b} <= min(d+g-2j-1, j)={cap}")
    c.need(a - j - 1 < t, f"a-j-1={a - j - 1} < t={t}")
    c.need(t < top - b, f"t={t} < d+g-2j-1-b={top - b}")
    c.need(2 * t < a - b, f"2t={2 * t} < a-b={a - b}")
    return c.result(LEMMA_5_2, params)


@lru_cache(maxsize=None)
def check_thm_6_1(g: int, k: int, l: int) -> Certificate | Reject:
    params = (("g", g), ("k", k), ("l", l))
    c = _Checker()
    c.need(0 <= 2 * l, f"0 <= 2l={2 * l}")
    c.need(2 * l <= k, f"2l={2 * l} <= k={k}")
    c.need(k <= g - 1, f"k={k} <= g-1={g - 1}")
    return c.result(THM_6_1, params)


def _binom(n: int, r: int) -> int:
    if r == 0:
        return 1
    if r < 0 or n < 0:
        return 0
    return comb(n, r)


def koszul_ranks(b: int, l: int, k: int) -> list[int]:
    """Ranks of the degree -i terms of Sym^k[A -> B], i = 0..k, with rk A = b+1-2l."""
    a = b + 1 - 2 * l
    return [_binom(b, i) * _binom(a + k - i - 1, k - i) for i in range(k + 1)]


@lru_cache(maxsize=None)
def _multisets(n: int, r: int) -> int:
    # Monomials of degree r in n variables, by peeling off one variable.
    if r == 0:
        return 1
    if n <= 0:
        return 0
    return sum(_multisets(n - 1, r - q) for q in range(r + 1))


@lru_cache(maxsize=None)
def _subsets(n: int, r: int) -> int:
    if r == 0:
        return 1
    if n <= 0 or r < 0:
        return 0
    return _subsets(n - 1, r) + _subsets(n - 1, r - 1)


def _koszul_pushforward_ranks(b: int, l: int, k: int) -> list[int]:
    # Λ^i B^* ⊗ Sym^{k-i} A^*, counted by recursion rather than closed form.
    a = b + 1 - 2 * l
    return [_subsets(b, i) * _multisets(a, k - i) for i in range(k + 1)]


def koszul_truncation_certificate(b: int, l: int, k: int) -> Certificate | Reject:
    params = (("b", b), ("l", l), ("k", k))
    if b < 1 or l < 0 or k < 0:
        return Reject(KOSZUL, params, ("need b >= 1, l >= 0, k >= 0",))
    a = b + 1 - 2 * l
    c = _Checker()
    c.need(k >= 2 * l, f"k={k} >= 2l={2 * l}")
    c.need(-b + k >= 1 - a, f"-b+k={k - b} >= 1-a={1 - a}")
    ranks = koszul_ranks(b, l, k)
    c.need(ranks == _koszul_pushforward_ranks(b, l, k),
           f"term ranks {ranks} match the Koszul pushforward")
    if c.failed and c.failed[0].startswith("k="):
        c.failed[0] = "vanishing range fails: " + c.failed[0]
    return c.result(KOSZUL, params)


def external(source: str, **params) -> Certificate:
    """A step justified by an external theorem whose hypotheses are not reproduced."""
    return Certificate(EXTERNAL, tuple(sorted(params.items())),
                       (f"cites {source}",), EXTERNAL_STATUS)


# The two pushforward facts a divisor-restriction move rests on.
ZETA_FACTS = {
    "O_Z(Z)": "R zeta_* O_Z(Z) = 0",
    "O_Z(omega_M)": "R zeta_* O_Z(omega_M) = 0",
}


def zeta_vanishing(sheaf: str, matched: str) -> Certificate:
    """A divisor-restriction step: the quoted pushforward fact plus the block match."""
    try:
        fact = ZETA_FACTS[sheaf]
    except KeyError:
        raise ValueError(f"no pushforward fact for {sheaf!r}") from None
    return Certificate(ZETA, (("sheaf", sheaf),), (fact, matched))


_CHECKS = {
    THM_7_1: check_thm_7_1,
    THM_7_4: check_thm_7_4,
    THM_9_6: check_thm_9_6,
    LEMMA_5_2: check_lemma_5_2,
    THM_6_1: check_thm_6_1,
}

AUTO_ORDER = (THM_7_4, THM_7_1, LEMMA_5_2, THM_9_6)


@dataclass(frozen=True)
class Obligation:
    """A vanishing statement some step needs, with the rule its proof names."""

    rule: str
    params: tuple
    context: str = ""

    @classmethod
    def of(cls, rule: str, context: str = "", **params) -> "Obligation":
        return cls(rule, tuple(params.items()), context)


def _run(rule: str, params: dict):
    fn = _CHECKS[rule]
    if rule == THM_9_6:
        keys = ("g", "d", "j", "a", "b")
    elif rule == THM_6_1:
        keys = ("g", "k", "l")
    else:
        keys = ("g", "d", "j", "a", "b", "t")
    return fn(*(params[k] for k in keys))


def certify(ob: Obligation) -> Certificate | Reject:
    params = dict(ob.params)
    if ob.rule != "auto":
        return _run(ob.rule, params)
    rejects = []
    for rule in AUTO_ORDER:
        if rule == THM_9_6:
            res = _run(rule, params)
        elif "t" not in params:
            continue
        else:
            res = _run(rule, params)
        if res.ok:
            return res
        rejects.append(res)
    return Reject("auto", ob.params,
                  tuple(f"{r.rule}: {'; '.join(r.failures)}" for r in rejects))


def require(ob: Obligation) -> Certificate:
    res = certify(ob)
    if not res.ok:
        raise Uncertified(res)
    return res


def require_all(obs) -> list[Certificate]:
    return [require(ob) for ob in obs]


# ---------------------------------------------------------------- corpus


@dataclass
class CorpusEntry:
    rule: str
    params: dict
    source: str
    ranges: dict = field(default_factory=dict)
    when: list = field(default_factory=list)


def load_corpus() -> list[CorpusEntry]:
    text = resources.files("weaving").joinpath("proof_instantiations.jsonl").read_text()
    entries = []
    for line in text.splitlines():
        if line.strip():
            obj = json.loads(line)
            entries.append(CorpusEntry(obj["rule"], obj["params"], obj["source"],
                                       obj.get("ranges", {}), obj.get("when", [])))
    return entries


_SAFE = {"min": min, "max": max, "abs": abs}


def _ev(expr, env: dict):
    if isinstance(expr, int):
        return expr
    return eval(str(expr), {"__builtins__": {}}, {**_SAFE, **env})


def _expand(entry: CorpusEntry, env: dict, names: list[str]):
    if not names:
        if all(_ev(w, env) for w in entry.when):
            yield dict(env)
        return
    name, rest = names[0], names[1:]
    lo, hi = entry.ranges[name]
    for v in range(_ev(lo, env), _ev(hi, env) + 1):
        env[name] = v
        yield from _expand(entry, env, rest)
    env.pop(name, None)


def replay_corpus(g: int, entries: list[CorpusEntry] | None = None):
    """Expand every corpus entry at genus g and certify each instance.

    Returns a list of (entry, env, result).
    """
    out = []
    for entry in entries if entries is not None else load_corpus():
        for env in _expand(entry, {"g": g}, list(entry.ranges)):
            params = {k: _ev(v, env) for k, v in entry.params.items()}
            params["g"] = g
            out.append((entry, env, certify(Obligation(entry.rule, tuple(params.items()),
                                                       entry.source))))
    return out
