import numpy as np
import pandas as pd
import pytest

from tensorfactor.bench import (
    RECORD_COLUMNS,
    ExperimentConfig,
    RunRecord,
    Stage,
    load_experiment_config,
    parse_experiment_config,
    read_records,
    run_experiment,
    sort_records,
    summarize,
    write_records,
    write_summary,
)
from tensorfactor.errors import ConfigError, EmptyRecordsError

SMALL_EXPERIMENT = """
# a quick paired run
setting = II
dims = 6, 5
lambda = 2
T = 40
h0 = 1, 2
methods = TOPUP, 1TOPUP, itopup, TIPUP-iTOPUP
nrep = 2
seed = 13
trajectory = true
"""


def make_record(**overrides):
    fields = dict(
        rep=0,
        setting="I",
        T=100,
        lambda_=1.0,
        h0=1,
        method="TOPUP",
        mode=1,
        stage=Stage.INIT,
        loss=0.5,
        iters=0,
        lambda_hat_sq=1.0,
        lambda_star_hat_sq=1.0,
    )
    fields.update(overrides)
    return RunRecord(**fields)


@pytest.fixture(scope="module")
def small_config():
    return parse_experiment_config(SMALL_EXPERIMENT)


@pytest.fixture(scope="module")
def small_records(small_config):
    return run_experiment(small_config)


def test_parse_experiment_config(small_config):
    cfg = small_config
    assert cfg.setting.value == "II"
    assert (cfg.dims, cfg.lambda_list, cfg.T_list, cfg.h0_list) == ([6, 5], [2.0], [40], [1, 2])
    assert cfg.methods == ["TOPUP", "1TOPUP", "iTOPUP", "TIPUP-iTOPUP"]
    assert (cfg.nrep, cfg.seed, cfg.record_trajectory, cfg.timing) == (2, 13, True, False)
    assert cfg.label == "II"

    spec = cfg.spec_for(40, 2.0)
    assert (spec.dims, spec.ranks, spec.ar_coeffs, spec.lambda_) == ([6, 5], [1, 2], [0.8, 0.6], 2.0)


def test_custom_model_config():
    cfg = parse_experiment_config("dims = 4, 4\nranks = 2, 1\nphis = 0.5\nmethods = UP\nT = 20")
    assert cfg.label == "custom"
    assert cfg.spec_for(20, 1.0).ranks == [2, 1]


@pytest.mark.parametrize(
    "text",
    [
        "setting = I\nmethods = TOPUP\ncolour = red",
        "setting = I\nmethods = TOPUP\nmethods = TIPUP",
        "setting = I\nmethods TOPUP",
        "setting = I\nmethods = HOOI",
        "setting = IV\nmethods = TOPUP",
        "methods = TOPUP",
        "setting = I\nmethods = TOPUP\nT = 5\nh0 = 5",
        "setting = I\nmethods = TOPUP\nnrep = 0",
        "dims = 3, 3\nranks = 4, 1\nphis = 0.5\nmethods = UP",
    ],
)
def test_bad_configs_raise_config_error(text):
    with pytest.raises(ConfigError):
        parse_experiment_config(text)


def test_load_missing_config(tmp_path):
    with pytest.raises(ConfigError):
        load_experiment_config(tmp_path / "missing.cfg")


def test_load_config_file(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(SMALL_EXPERIMENT)
    assert load_experiment_config(path) == parse_experiment_config(SMALL_EXPERIMENT)


def test_record_counts(small_records):
    # per (rep, h0): TOPUP 1 stage, the other three 3 stages each, times 2 modes
    assert len(small_records) == 2 * 2 * (1 + 3 + 3 + 3) * 2


def test_paired_methods_share_the_initial_estimate(small_records):
    frame = pd.DataFrame([r.model_dump() for r in small_records])
    init = frame[(frame.stage == Stage.INIT) & frame.method.isin(["TOPUP", "1TOPUP", "iTOPUP"])]
    for _, group in init.groupby(["rep", "h0", "mode"]):
        assert len(group) == 3
        assert np.allclose(group.loss, group.loss.iloc[0], rtol=0, atol=1e-12)


def test_stage_consistency(small_records):
    by_key = {(r.rep, r.h0, r.method, r.mode, r.stage): r for r in small_records}
    for (rep, h0, method, mode, stage), record in by_key.items():
        assert 0.0 <= record.loss <= 1.0
        if method == "1TOPUP" and stage == Stage.FINAL:
            sweep = by_key[(rep, h0, method, mode, Stage.SWEEP1)]
            assert record.iters == sweep.iters == 1
            assert record.loss == sweep.loss
        if stage == Stage.INIT:
            assert record.iters == 0


def test_records_are_sorted(small_config, small_records):
    assert sort_records(list(reversed(small_records)), small_config) == small_records
    assert [r.method for r in small_records[:2]] == ["TOPUP", "TOPUP"]
    assert all(r.wall_time_ms == 0.0 for r in small_records)


def test_reruns_write_identical_files(tmp_path, small_config, small_records):
    first = write_records(small_records, tmp_path / "a.csv")
    second = write_records(run_experiment(small_config), tmp_path / "b.csv")
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text().splitlines()[0] == ",".join(RECORD_COLUMNS)


def test_records_read_back(tmp_path, small_records):
    path = write_records(small_records, tmp_path / "records.csv")
    assert read_records(path) == small_records


def test_iterative_records_without_trajectory_are_final_only():
    cfg = parse_experiment_config("setting = I\ndims = 5, 5\nT = 30\nmethods = UP, iUP\nseed = 1")
    records = run_experiment(cfg)
    assert [(r.method, r.stage) for r in records] == [
        ("UP", Stage.INIT),
        ("UP", Stage.INIT),
        ("iUP", Stage.FINAL),
        ("iUP", Stage.FINAL),
    ]


def test_one_step_methods_run_without_a_trajectory():
    cfg = parse_experiment_config("setting = I\ndims = 5, 4\nT = 30\nmethods = UP, TIPUP, TOPUP\nnrep = 2")
    assert not cfg.record_trajectory
    records = run_experiment(cfg)
    assert len(records) == 3 * 2 * 2
    assert {r.stage for r in records} == {Stage.INIT}
    assert all(r.iters == 0 and 0.0 <= r.loss <= 1.0 for r in records)


def test_summarize_single_record():
    summary = summarize([make_record(loss=0.5, iters=3)])
    assert len(summary) == 1
    row = summary.iloc[0]
    assert row.n == 1
    assert row.median_log_loss == pytest.approx(np.log(0.5))
    assert row.q1_log_loss == row.q3_log_loss == row.mean_log_loss == row.median_log_loss
    assert row.median_iters == 3


def test_summarize_floors_zero_loss():
    summary = summarize([make_record(loss=0.0)])
    assert summary.iloc[0].median_log_loss == pytest.approx(np.log(1e-16))


def test_summarize_two_records():
    summary = summarize([make_record(rep=0, loss=0.1), make_record(rep=1, loss=0.4)])
    row = summary.iloc[0]
    assert row.median_log_loss == pytest.approx((np.log(0.1) + np.log(0.4)) / 2)
    assert row.q1_log_loss == pytest.approx(np.log(0.1) + 0.25 * (np.log(0.4) - np.log(0.1)))


def test_summarize_quantiles_match_sorted_order_statistics():
    losses = np.random.default_rng(3).uniform(0.01, 0.9, size=11)
    summary = summarize([make_record(rep=i, loss=float(v)) for i, v in enumerate(losses)])
    logs = np.sort(np.log(losses))
    row = summary.iloc[0]
    assert row.n == 11
    assert row.median_log_loss == pytest.approx(logs[5])
    assert row.q1_log_loss == pytest.approx(logs[2] + 0.5 * (logs[3] - logs[2]))
    assert row.q3_log_loss == pytest.approx(logs[7] + 0.5 * (logs[8] - logs[7]))


def test_summarize_keeps_cells_apart_in_first_seen_order():
    records = [make_record(method="iTOPUP", stage=Stage.FINAL), make_record(method="TOPUP"), make_record(mode=2)]
    summary = summarize(records)
    assert list(zip(summary.method, summary["mode"])) == [("iTOPUP", 1), ("TOPUP", 1), ("TOPUP", 2)]


def test_summarize_rejects_empty_input():
    with pytest.raises(EmptyRecordsError):
        summarize([])


def test_write_summary(tmp_path, small_records):
    path = write_summary(small_records, tmp_path / "summary.csv")
    frame = pd.read_csv(path)
    assert list(frame.columns[:7]) == ["setting", "T", "lambda", "h0", "method", "mode", "stage"]
    assert frame.n.unique().tolist() == [2]


def test_experiment_config_is_a_model():
    cfg = ExperimentConfig(setting="3", methods=["iTIPUP"], T_list=[50], h0_list=[2])
    assert cfg.setting.value == "III"
    assert cfg.spec_for(50, 1.0).ar_coeffs == [0.8, -0.8]
