import csv
import json

import numpy as np
import pytest

from polarflip.sim import (
    PmfReport,
    SimConfig,
    emit_report,
    load_manifest,
    run_pmf,
    run_sweep,
    simulate_point,
)

SMALL = dict(N=64, k=26, crc=6, omega=2, t_max=10, points=(1.0, 3.0), min_frames=120,
             target_errors=10_000, chunk=50)


def test_stopping_rule_and_row_count():
    cfg = SimConfig(**SMALL)
    res = simulate_point(cfg, 0)
    assert res.rows.shape == (120, 5)
    stop_early = SimConfig(**{**SMALL, "target_errors": 1, "points": (-2.0,)})
    rows = simulate_point(stop_early, 0).rows
    # stops at the first chunk that reaches the error target
    assert len(rows) == 50 and rows[:, 0].sum() >= 1


def test_sweep_is_reproducible_and_worker_invariant():
    a = run_sweep(SimConfig(**SMALL))
    b = run_sweep(SimConfig(**SMALL, workers=2))
    assert [p.row() for p in a] == [p.row() for p in b]
    assert a[0].fer >= a[1].fer
    for p in a:
        assert 0 <= p.reduction_pct <= 100
        assert p.avg_cc_mech <= p.avg_cc


def test_sweep_csv_and_manifest_round_trip(tmp_path):
    cfg = SimConfig(**SMALL, out=str(tmp_path))
    points = run_sweep(cfg)
    files = emit_report(cfg, points)
    assert [f.name for f in files] == ["sweep.csv", "manifest.json"]
    with open(files[0]) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert float(rows[0]["fer"]) == pytest.approx(points[0].fer)
    assert load_manifest(files[1]) == cfg
    assert json.loads(files[1].read_text())["summary"]["kind"] == "sweep"


def test_pmf_report_rows(tmp_path):
    cfg = SimConfig(**{**SMALL, "points": (1.0,)})
    report = run_pmf(cfg)
    code = cfg.code()
    assert report.sufficient
    assert len(report.counts) == code.k_tot
    assert report.pmf.sum() == pytest.approx(1.0)
    assert report.p_lhs + report.p_rhs == pytest.approx(1.0)
    first = report.extra["first_trial_counts"]
    assert first.sum() == report.failed_frames
    files = emit_report(cfg, report, tmp_path)
    with open(files[0]) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["j", "a_j", "probability"]
    assert len(rows) == code.k_tot + 1
    assert [int(r[1]) for r in rows[1:]] == list(code.info_set)


def test_empty_pmf_is_flagged(tmp_path):
    cfg = SimConfig(**{**SMALL, "points": (12.0,), "min_frames": 20})
    report = run_pmf(cfg)
    assert not report.sufficient
    assert report.p_lhs == 0.0 and report.p_rhs == 0.0
    emit_report(cfg, report, tmp_path)
    summary = json.loads((tmp_path / "manifest.json").read_text())["summary"]
    assert summary["sufficient_data"] is False


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(min_frames=0)
    with pytest.raises(ValueError):
        SimConfig(workers=0)
    with pytest.raises(ValueError):
        SimConfig.from_dict({"bogus": 1})
    with pytest.raises(ValueError):
        emit_report(SimConfig(), [])


def test_pmf_report_arithmetic():
    r = PmfReport(np.arange(4), np.array([1, 1, 2, 0]), j_rhs=2)
    assert r.p_lhs == pytest.approx(0.5) and r.p_rhs == pytest.approx(0.5)
