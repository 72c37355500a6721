import pytest

from covdecomp.errors import InvalidInput
from covdecomp.synth import SynthConfig, gen_model
from covdecomp.sweep import COLUMNS, SweepConfig, read_rows, run_sweep, summarize


@pytest.fixture(scope="module")
def small_model():
    return gen_model(SynthConfig(rows=3, cols=3, seed=1))


def test_sweep_rows_and_determinism(tmp_path, small_model):
    cfg = dict(sample_sizes=(200, 400), replicates=1, out=None)
    a = run_sweep(SweepConfig(**{**cfg, "out": str(tmp_path / "a.csv")}), small_model)
    run_sweep(SweepConfig(**{**cfg, "out": str(tmp_path / "b.csv")}), small_model)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert len(a) == 4
    assert [(r["method"], r["n"]) for r in a] == [
        ("l1_linf", 200), ("l1_linf", 400), ("l1_only", 200), ("l1_only", 400)]
    assert (tmp_path / "a.csv").read_text().splitlines()[0] == ",".join(COLUMNS)
    rows = read_rows(tmp_path / "a.csv")
    assert rows[0]["n"] == 200 and rows[0]["method"] == "l1_linf"
    n_resid = int(abs(small_model.sigma_r).astype(bool).sum() // 2)
    for r in a:
        assert r["status"] == "ok"
        if r["method"] == "l1_only":
            assert r["edit_residual"] == n_resid


def test_parallel_matches_serial(small_model):
    cfg = dict(sample_sizes=(300,), replicates=2)
    serial = run_sweep(SweepConfig(**cfg, jobs=1), small_model)
    parallel = run_sweep(SweepConfig(**cfg, jobs=2), small_model)
    assert serial == parallel


def test_summarize_medians():
    rows = [{"method": "m", "n": 1, "x": v} for v in (3, 1, 2)]
    rows.append({"method": "m", "n": 1, "x": float("nan")})
    assert summarize(rows, "x") == {("m", 1): 2}


@pytest.mark.parametrize("kw", [
    {"sample_sizes": (200, 100)}, {"sample_sizes": ()}, {"replicates": 0},
    {"methods": ("bogus",)}, {"jobs": 0},
])
def test_config_validation(kw):
    with pytest.raises(InvalidInput):
        SweepConfig(**kw)
