import pytest

from src.clients.bench.runner import Stats, run_batch, run_one
from src.clients.pipeline import RunConfig


def test_stats_percentiles():
    st = Stats()
    for i, dt in enumerate([0.1, 0.2, 0.3, 0.4]):
        st.add(dt, ok=i != 3)
    assert (st.count, st.ok, st.err) == (4, 3, 1)
    assert st.avg == pytest.approx(0.25)
    assert st.p50 == pytest.approx(0.25)
    assert st.p95 == pytest.approx(0.3)


@pytest.mark.asyncio
async def test_batch_keeps_input_order(tmp_path):
    configs = [
        RunConfig(ce="misA", out=tmp_path / "a", iterations=200),
        RunConfig(ce="misA", out=tmp_path / "b", iterations=200, strategy="open2"),
    ]
    outcomes = await run_batch(configs, jobs=2)
    assert [o["out"] for o in outcomes] == [str(tmp_path / "a"), str(tmp_path / "b")]
    assert outcomes[0]["passed"]
    assert (tmp_path / "b" / "cert.json").is_file()


@pytest.mark.asyncio
async def test_failures_become_outcomes(tmp_path):
    # closed-loop steps on the zero objective have no usable L
    wall, st, outcomes = await run_one([RunConfig(ce="misA", out=tmp_path / "x", iterations=5, strategy="closed")], 1)
    assert wall >= 0
    assert st.err == 1
    assert outcomes[0]["verdict"] == "error"
    assert "L > 0" in outcomes[0]["error"]


@pytest.mark.asyncio
async def test_jobs_must_be_positive():
    with pytest.raises(ValueError):
        await run_batch([], jobs=0)
