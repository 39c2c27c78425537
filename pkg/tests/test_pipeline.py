import pytest

from weaving import pipeline


def test_stage_prefixes():
    for i, stage in enumerate(pipeline.STAGES):
        res = pipeline.run(3, stage)
        assert res.stages == list(pipeline.STAGES[:i + 1])
    with pytest.raises(ValueError):
        pipeline.run(1)


def test_verify_checks():
    checks = pipeline.verify(4)
    assert checks["strands"] == 22 and checks["final_blocks"] == 7
    assert checks["oracle_crossings"] == 95
    assert checks["corpus_instances"] > 0


def test_log_replays_to_final_state():
    from weaving.decomposition import EventLog, replay
    res = pipeline.run(4)
    again = replay(EventLog.from_jsonl(res.log.to_jsonl()))
    assert again.snapshot() == res.dec.snapshot()
