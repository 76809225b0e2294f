"""
Parameter sweeps over theory and Monte Carlo engines, CSV output and figure presets.
"""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from . import analysis, montecarlo
from .config import SweepSpec
from .errors import InvalidArgumentError, NumericFailure
from .model import Scenario, default_scenario

__all__ = [
    "CSV_HEADER",
    "ResultRow",
    "FigurePreset",
    "FIGURES",
    "evaluate_point",
    "run_sweep",
    "emit_csv",
    "format_csv",
    "figure_preset",
]

CSV_HEADER = ("axis", "value", "engine", "p_bd", "p_esd", "p_s", "c_s_bps",
              "ci_halfwidth", "n_trials", "elapsed_ms", "diag")
_NAN = float("nan")


@dataclass(frozen=True)
class ResultRow:
    """One engine evaluated at one axis value.

    ``inc_p_s`` and ``inc_c_s`` are the gains over a marine-only system:
    ``p_s - p_bd`` and ``c_s`` minus the unconditional marine rate.
    """

    axis: str
    value: float
    engine: str
    p_bd: float = _NAN
    p_esd: float = _NAN
    p_s: float = _NAN
    c_s_bps: float = _NAN
    ci_halfwidth: float = _NAN
    n_trials: int | None = None
    elapsed_ms: float = _NAN
    diag: str = ""
    c_marine_bps: float = _NAN
    series: str = ""

    @property
    def inc_p_s(self) -> float:
        return self.p_s - self.p_bd

    @property
    def inc_c_s(self) -> float:
        return self.c_s_bps - self.c_marine_bps

    @property
    def ok(self) -> bool:
        return not self.diag.startswith("error")


def _diag(items: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in items.items())


def evaluate_point(scenario: Scenario, engine: str, axis: str, value, mc_trials: int = 100_000,
                   seed: int = 1, capacity: bool = True, workers: int = 1,
                   series: str = "") -> ResultRow:
    """Evaluate one engine on one scenario; numeric failures become an error row."""
    t0 = time.perf_counter()
    try:
        if engine == "theory":
            res = analysis.evaluate(scenario, capacity=capacity)
            c_mar = analysis.c_marine(scenario) if capacity else _NAN
            d = {"neval": res.diagnostics.get("p_esd_neval", 0),
                 "abserr": f"{res.diagnostics.get('p_esd_abserr', 0.0):.3e}"}
            row = ResultRow(axis, value, engine, res.p_bd, res.p_esd, res.p_s, res.c_s,
                            c_marine_bps=c_mar, diag=_diag(d), series=series)
        else:
            mode = engine.removeprefix("mc_")
            est = montecarlo.run(montecarlo.TrialPlan(mode, mc_trials, seed, scenario), workers)
            d = {"c_s_hw": f"{est.c_s_hw:.6e}", "p_bd_hw": f"{est.p_bd_hw:.3e}",
                 "p_esd_hw": f"{est.p_esd_hw:.3e}"}
            row = ResultRow(axis, value, engine, est.p_bd_hat, est.p_esd_hat, est.p_s_hat,
                            est.c_s_hat, est.p_s_hw, est.n_trials, c_marine_bps=est.c_marine_hat,
                            diag=_diag(d), series=series)
    except (NumericFailure, InvalidArgumentError) as exc:
        row = ResultRow(axis, value, engine, diag=f"error: {type(exc).__name__}: {exc}",
                        series=series)
    return replace(row, elapsed_ms=(time.perf_counter() - t0) * 1000.0)


def _point_job(args):
    return evaluate_point(*args)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[ResultRow]:
    """Evaluate every engine at every axis value.

    Rows come out value-major, engines in the order given by the spec.
    With ``workers > 1`` sweep points run in separate processes; Monte
    Carlo results are unaffected because each point reuses the sweep seed.
    """
    jobs = [(spec.scenario_at(v), eng, spec.axis, v, spec.mc_trials, spec.seed, spec.capacity,
             1, spec.label)
            for v in spec.values for eng in spec.engines]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_point_job, jobs))
    return [_point_job(j) for j in jobs]


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    x = float(x)
    return "nan" if math.isnan(x) else f"{x:.17e}"


def format_csv(rows, include_timing: bool = False) -> str:
    """Render rows as CSV text.

    ``elapsed_ms`` is left blank unless ``include_timing`` is set, so that
    identical sweeps give byte-identical files.
    """
    rows = list(rows)
    if not rows:
        raise InvalidArgumentError("cannot emit an empty table")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        diag = r.diag if not r.series else _diag({"series": r.series}) + (";" + r.diag if r.diag else "")
        if r.ok and not math.isnan(r.c_marine_bps):
            diag += f";inc_p_s={_num(r.inc_p_s)};inc_c_s={_num(r.inc_c_s)}"
        w.writerow([r.axis, _num(r.value), r.engine, _num(r.p_bd), _num(r.p_esd), _num(r.p_s),
                    _num(r.c_s_bps), "" if r.engine == "theory" else _num(r.ci_halfwidth),
                    _num(r.n_trials), _num(r.elapsed_ms) if include_timing else "", diag])
    return buf.getvalue()


def emit_csv(rows, path, include_timing: bool = False) -> None:
    text = format_csv(rows, include_timing)
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV to {path}: {exc.strerror}") from exc


# --------------------------------------------------------------------------
# Figure presets
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FigurePreset:
    id: str
    title: str
    specs: tuple


_ALTITUDES = (600.0, 1200.0, 1800.0)
_TAU = tuple(float(t) for t in range(-10, 31))
_N_GRID = tuple(range(20, 401, 20))
_ALT_GRID = tuple(float(a) for a in range(400, 2001, 200))
_RBD_GRID = tuple(float(r) for r in range(2, 61, 2))
_K_GRID = (10, 20, 25, 40, 50, 100)

# id -> (title, axis, grid, series field, series values, capacity)
_FIGURE_TABLE = {
    "fig4": ("success probability of each link vs threshold", "tau_db", _TAU,
             None, (None,), False),
    "fig5": ("end-to-end success vs constellation size", "n_sats", _N_GRID,
             "altitude_km", _ALTITUDES, False),
    "fig6": ("end-to-end success vs altitude", "altitude_km", _ALT_GRID,
             "n_sats", (100, 500, 1000), False),
    "fig7": ("end-to-end success vs marine distance", "r_bd_nmile", _RBD_GRID,
             "altitude_km", _ALTITUDES, False),
    "fig8": ("end-to-end success vs channel count", "n_channels", _K_GRID,
             "altitude_km", _ALTITUDES, False),
    "fig9": ("capacity vs altitude", "altitude_km", _ALT_GRID,
             "n_sats", (100, 500, 1000), True),
    "fig10": ("capacity vs constellation size", "n_sats", _N_GRID,
              "altitude_km", _ALTITUDES, True),
    "fig11": ("capacity vs marine distance", "r_bd_nmile", _RBD_GRID,
              "altitude_km", _ALTITUDES, True),
    "fig12": ("capacity vs channel count", "n_channels", _K_GRID,
              "altitude_km", _ALTITUDES, True),
    "fig13": ("gains over marine-only vs threshold", "tau_db", _TAU,
              "altitude_km", _ALTITUDES, True),
    "fig14": ("gains over marine-only vs marine distance", "r_bd_nmile", _RBD_GRID,
              "altitude_km", _ALTITUDES, True),
}
FIGURES = tuple(_FIGURE_TABLE)


def figure_preset(fig_id: str, engines=("theory", "mc_distributional"), mc_trials: int = 100_000,
                  seed: int = 1, base: Scenario | None = None) -> FigurePreset:
    """Sweeps reproducing one result figure, one SweepSpec per plotted series."""
    if fig_id not in _FIGURE_TABLE:
        raise InvalidArgumentError(f"unknown figure {fig_id!r}; expected one of {FIGURES}")
    title, axis, grid, field_name, series_vals, capacity = _FIGURE_TABLE[fig_id]
    base = base or default_scenario()
    specs = []
    for sv in series_vals:
        scen = base if field_name is None else base.with_constellation(**{field_name: sv})
        label = "" if field_name is None else f"{field_name}={sv:g}"
        specs.append(SweepSpec(scen, axis, grid, tuple(engines), mc_trials, seed, capacity, label))
    return FigurePreset(fig_id, title, tuple(specs))
