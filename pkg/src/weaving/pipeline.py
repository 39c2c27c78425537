"""Run the four stages in sequence on one decomposition and collect checks."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import crosswarp, loom, oracle, twill, weave
from .decomposition import Decomposition, EventLog, braid_word
from .vanishing import koszul_truncation_certificate, replay_corpus

STAGES = ("twill", "crosswarp", "loom", "weave")


@dataclass
class PipelineResult:
    g: int
    dec: Decomposition
    stages: list
    weave: weave.WeaveResult | None = None
    dual_log: EventLog | None = None
    timings: dict = field(default_factory=dict)

    @property
    def log(self) -> EventLog:
        return self.dec.log

    def report(self) -> dict:
        out = {"genus": self.g, "stages": list(self.stages), "events": len(self.log),
               "strands": len(self.dec), "braid_length": len(braid_word(self.log))}
        if self.weave is not None:
            out.update(self.weave.report())
            out["final_blocks"] = len(self.weave.pulled_back)
        if self.dual_log is not None:
            out["dual_external_citations"] = weave.external_count(self.dual_log)
        return out


def run(g: int, stage: str = "all", mode: str = twill.THEOREM22,
        dual: bool = False) -> PipelineResult:
    """Run every stage up to and including `stage`."""
    if g < 2:
        raise ValueError(f"genus must be at least 2, got {g}")
    last = STAGES.index("weave" if stage == "all" else stage)
    if last > 0 and mode != twill.THEOREM22:
        raise ValueError("the later stages start from the theorem22 twill output")
    timings = {}
    t0 = time.perf_counter()
    dec = twill.run(g, mode).dec
    timings["twill"] = time.perf_counter() - t0
    done = ["twill"]
    wr = None
    for name in STAGES[1:last + 1]:
        t0 = time.perf_counter()
        if name == "crosswarp":
            crosswarp.run(dec, g)
        elif name == "loom":
            loom.run(dec, g)
        else:
            wr = weave.run(dec, g)
        timings[name] = time.perf_counter() - t0
        done.append(name)
    dual_log = weave.dual_sod(g)[1] if dual else None
    return PipelineResult(g, dec, done, wr, dual_log, timings)


def verify(g: int) -> dict:
    """Every closed-form diff and certificate batch for one genus; raises on failure."""
    checks = {}
    t0 = time.perf_counter()
    c28 = twill.run(g, twill.COROLLARY28)
    checks["corollary28"] = len(c28.dec)
    res = run(g, "all", dual=True)
    checks["strands"] = len(res.dec)
    checks["final_blocks"] = len(res.weave.pulled_back)
    checks["residual"] = res.weave.residual_count
    checks["thm61_obligations"] = len(res.weave.thm61)
    if g <= 8:
        word = braid_word(c28.log)
        if len(word) != oracle.crossing_count(g):
            raise AssertionError(f"braid word {len(word)} != oracle {oracle.crossing_count(g)}")
        checks["oracle_crossings"] = len(word)
    corpus = replay_corpus(g)
    bad = [(e.source, env) for e, env, r in corpus if not r.ok]
    if bad:
        raise AssertionError(f"corpus rejects: {bad[:5]}")
    checks["corpus_instances"] = len(corpus)
    for b in range(1, 6):
        for l in range(3):
            for k in range(2 * l, 7):
                if not koszul_truncation_certificate(b, l, k).ok:
                    raise AssertionError(f"Koszul check fails at b={b}, l={l}, k={k}")
    checks["dual_external_citations"] = weave.external_count(res.dual_log)
    checks["seconds"] = round(time.perf_counter() - t0, 3)
    return checks
