import csv
import io
import math

import pytest

from leoship import sweep
from leoship.config import SweepSpec
from leoship.errors import InvalidArgumentError
from leoship.model import default_scenario


def small_spec(**kw):
    args = dict(base=default_scenario(), axis="tau_db", values=(8.0, 13.0),
                engines=("theory", "mc_distributional"), mc_trials=20_000, seed=3, capacity=True)
    args.update(kw)
    return SweepSpec(**args)


def parse(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_header_and_rows():
    rows = sweep.run_sweep(small_spec())
    text = sweep.format_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(sweep.CSV_HEADER)
    recs = parse(text)
    assert [(r["value"][:4], r["engine"]) for r in recs] == [
        ("8.00", "theory"), ("8.00", "mc_distributional"),
        ("1.30", "theory"), ("1.30", "mc_distributional")]
    th, mc8 = recs[0], recs[1]
    assert th["ci_halfwidth"] == "" and th["n_trials"] == ""
    assert float(mc8["ci_halfwidth"]) > 0 and mc8["n_trials"] == "20000"
    assert abs(float(th["p_s"]) - float(mc8["p_s"])) < 0.01
    assert "inc_p_s=" in th["diag"]


def test_single_row_is_two_lines():
    rows = sweep.run_sweep(small_spec(values=(8.0,), engines=("theory",), capacity=False))
    assert len(sweep.format_csv(rows).splitlines()) == 2


def test_byte_identical_across_workers():
    spec = small_spec()
    a = sweep.format_csv(sweep.run_sweep(spec, workers=1))
    b = sweep.format_csv(sweep.run_sweep(spec, workers=2))
    c = sweep.format_csv(sweep.run_sweep(spec, workers=1))
    assert a == b == c


def test_timing_column_optional():
    rows = sweep.run_sweep(small_spec(values=(8.0,), engines=("theory",), capacity=False))
    assert parse(sweep.format_csv(rows))[0]["elapsed_ms"] == ""
    assert float(parse(sweep.format_csv(rows, include_timing=True))[0]["elapsed_ms"]) > 0


def test_empty_table_rejected():
    with pytest.raises(InvalidArgumentError):
        sweep.format_csv([])


def test_increments():
    row = sweep.evaluate_point(default_scenario(tau_db=13), "theory", "tau_db", 13.0)
    assert row.inc_p_s == pytest.approx(row.p_s - row.p_bd)
    assert 7 <= row.inc_p_s / row.p_bd <= 11
    assert row.inc_c_s > 0


def test_error_rows_do_not_abort(monkeypatch):
    from leoship import analysis
    from leoship.errors import NumericFailure

    def boom(*a, **k):
        raise NumericFailure("forced", {"where": "test"})

    monkeypatch.setattr(analysis, "evaluate", boom)
    row = sweep.evaluate_point(default_scenario(), "theory", "tau_db", 10.0)
    assert not row.ok and row.diag.startswith("error")
    assert math.isnan(row.p_s)
    assert "error" in sweep.format_csv([row])


def test_emit_csv_unwritable(tmp_path):
    rows = sweep.run_sweep(small_spec(values=(8.0,), engines=("theory",), capacity=False))
    with pytest.raises(OSError):
        sweep.emit_csv(rows, tmp_path / "no" / "such" / "dir.csv")
    out = tmp_path / "rows.csv"
    sweep.emit_csv(rows, out)
    assert out.read_text() == sweep.format_csv(rows)


def test_figure_presets():
    assert set(sweep.FIGURES) == {f"fig{i}" for i in range(4, 15)}
    preset = sweep.figure_preset("fig5", engines=("theory",))
    assert len(preset.specs) == 3
    assert preset.specs[0].axis == "n_sats"
    assert {s.base.constellation.altitude_km for s in preset.specs} == {600.0, 1200.0, 1800.0}
    with pytest.raises(InvalidArgumentError):
        sweep.figure_preset("fig99")


def test_axis_values_applied():
    spec = small_spec(axis="n_channels", values=(10, 50))
    assert spec.scenario_at(50).constellation.n_channels == 50
    spec = small_spec(axis="r_bd_nmile", values=(20.0,))
    assert spec.scenario_at(20.0).r_bd_km == pytest.approx(37.04)
