"""Command line front end: detection runs, scenario simulation, evaluation
and SVG report plots.

Input is CSV with a header row (an optional leading time-index column named
t, time or index, case-insensitive); reports are JSON rendered with sorted
keys so that identical runs produce byte-identical output apart from the
timings block; plots are self-contained SVG built from the report alone.

Exit codes: 0 success, 2 input error, 3 configuration error, 4 numerical
failure.
"""

from __future__ import annotations

import csv
import functools
import json
import math
import sys
from dataclasses import asdict
from typing import Dict, List, Optional, Tuple
from xml.sax.saxutils import escape

import click
import numpy as np
from click.core import ParameterSource

from . import __version__
from .errors import (
    ConfigError,
    DegenerateFrequencyError,
    InputError,
    NumericalError,
    OscsegError,
    SegmentTooShortError,
    SplitInfeasibleError,
)
from .fourier import GRID_EQUAL, GRID_PERIODOGRAM
from .metrics import bias as metric_bias
from .metrics import coverage as metric_coverage
from .metrics import hausdorff as metric_hausdorff
from .metrics import rmse as metric_rmse
from .segment import (
    SEARCH_FULL,
    SEARCH_OPTIMISTIC,
    SELECT_MDL,
    SELECT_THRESHOLD,
    DetectionConfig,
    DetectionResult,
    PanelSeries,
    Partition,
    detect,
)
from .simgen import (
    gen_piecewise_ar,
    gen_scenario1,
    gen_scenario2,
    gen_scenario3,
    gen_tvar,
    gen_white_noise,
)

SCHEMA_VERSION = 1

_CONFIG_KEYS: Dict[str, type] = {
    "grid": str,
    "ne": str,
    "delta": float,
    "select": str,
    "min_seg": int,
    "sigma0": float,
    "pip_threshold": float,
    "search": str,
    "threads": int,
    "seed": int,
}


def _die(exc: BaseException, code: int) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _cli_errors(fn):
    """Map library exceptions onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            _die(exc, 3)
        except (InputError, SegmentTooShortError, SplitInfeasibleError) as exc:
            _die(exc, 2)
        except (NumericalError, DegenerateFrequencyError) as exc:
            _die(exc, 4)
        except np.linalg.LinAlgError as exc:
            _die(exc, 4)
        except OscsegError as exc:
            _die(exc, 2)

    return wrapper


@click.group()
@click.version_option(__version__, prog_name="oscseg")
def main() -> None:
    """Change point detection for oscillatory time series."""


def read_panel_csv(path: str) -> PanelSeries:
    """Read a header-first CSV into a panel (columns become series rows).

    The first column is treated as a time index when its header is t, time or
    index (case-insensitive); every other cell must be a finite number.
    Errors carry the file, line and column of the offending cell.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}")
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file, expected a header row")
        except csv.Error as exc:
            raise InputError(f"{path}: line 1: {exc}")
        header = [cell.strip() for cell in header]
        has_index = bool(header) and header[0].lower() in ("t", "time", "index")
        first_data_col = 1 if has_index else 0
        labels = header[first_data_col:]
        if not labels:
            raise InputError(f"{path}: header declares no series columns")
        columns: List[List[float]] = [[] for _ in labels]
        lineno = 1
        try:
            for row in reader:
                lineno += 1
                if not row:
                    continue
                if len(row) != len(header):
                    raise InputError(
                        f"{path}: line {lineno}: expected {len(header)} fields,"
                        f" found {len(row)}"
                    )
                for j, cell in enumerate(row[first_data_col:]):
                    colname = labels[j]
                    try:
                        value = float(cell)
                    except ValueError:
                        raise InputError(
                            f"{path}: line {lineno}: column {colname!r}:"
                            f" not a number: {cell.strip()!r}"
                        )
                    if not math.isfinite(value):
                        raise InputError(
                            f"{path}: line {lineno}: column {colname!r}:"
                            f" non-finite value {cell.strip()!r}"
                        )
                    columns[j].append(value)
        except csv.Error as exc:
            raise InputError(f"{path}: line {lineno}: {exc}")
    if len(columns[0]) < 4:
        raise InputError(f"{path}: need at least 4 data rows")
    return PanelSeries(data=np.array(columns), labels=tuple(labels))


def _parse_grid(text: str) -> Tuple[str, int]:
    mode, _, ptxt = text.strip().partition(":")
    mode = mode.strip().lower()
    if mode not in (GRID_PERIODOGRAM, GRID_EQUAL):
        raise ConfigError(
            f"unknown grid mode {mode!r}, expected"
            f" {GRID_PERIODOGRAM!r} or {GRID_EQUAL!r}"
        )
    if ptxt:
        try:
            p = int(ptxt)
        except ValueError:
            raise ConfigError(f"grid size must be an integer, got {ptxt!r}")
    else:
        p = 50
    return mode, p


def _parse_ne(text: str) -> Tuple[int, bool, int]:
    t = text.strip().lower()
    if t.startswith("auto"):
        _, _, cap = t.partition(":")
        if cap:
            try:
                ne_max = int(cap)
            except ValueError:
                raise ConfigError(f"effect cap must be an integer, got {cap!r}")
        else:
            ne_max = 4
        return 1, True, ne_max
    try:
        return int(t), False, 4
    except ValueError:
        raise ConfigError(f"--ne expects an integer or auto[:MAX], got {text!r}")


def _apply_config_file(path: str, values: Dict[str, object]) -> None:
    """Overlay key=value lines onto flag values not set on the command line.

    values maps parameter name to its current value for keys whose source is
    not the command line; command-line flags always win.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc.strerror or exc}")
    ctx = click.get_current_context()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}: line {lineno}: expected key=value")
        key = key.strip().lower().replace("-", "_")
        val = val.strip()
        if len(val) >= 2 and val[0] == val[-1] and val[0] in ("'", '"'):
            val = val[1:-1]
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}: line {lineno}: unknown key {key!r}")
        if ctx.get_parameter_source(key) == ParameterSource.COMMANDLINE:
            continue
        try:
            values[key] = _CONFIG_KEYS[key](val)
        except ValueError:
            raise ConfigError(
                f"{path}: line {lineno}: invalid value {val!r} for {key!r}"
            )


def _detection_config(values: Dict[str, object]) -> DetectionConfig:
    grid_mode, grid_p = _parse_grid(str(values["grid"]))
    n_effects, ne_auto, ne_max = _parse_ne(str(values["ne"]))
    return DetectionConfig(
        grid_mode=grid_mode,
        grid_p=grid_p,
        n_effects=n_effects,
        ne_auto=ne_auto,
        ne_max=ne_max,
        sigma0_sq=float(values["sigma0"]),
        delta=float(values["delta"]),
        min_seg=int(values["min_seg"]),
        selection=str(values["select"]),
        search=str(values["search"]),
        pip_threshold=float(values["pip_threshold"]),
        threads=int(values["threads"]),
        seed=values["seed"] if values["seed"] is None else int(values["seed"]),
    )


def _series_labels(panel: PanelSeries) -> List[str]:
    if panel.labels is not None:
        return list(panel.labels)
    return [f"y{i + 1}" for i in range(panel.d)]


def _finite_or_none(x: float) -> Optional[float]:
    return float(x) if math.isfinite(x) else None


def build_report(res: DetectionResult, panel: PanelSeries, input_name: str) -> dict:
    """Assemble the JSON-ready detection report."""
    labels = _series_labels(panel)
    segments = []
    for j, (u, v) in enumerate(res.partition.segments()):
        per_series = []
        for i in range(panel.d):
            s = res.summaries[j][i]
            per_series.append(
                {
                    "label": labels[i],
                    "frequencies": [float(x) for x in s.frequencies],
                    "intensities": [[float(a), float(b)] for a, b in s.intensities],
                    "amplitudes": [float(x) for x in s.amplitudes],
                    "l_hat": int(s.l_hat),
                    "sigma_sq": float(res.segment_sigma_sq[j][i]),
                    "pip": [float(x) for x in s.pip],
                }
            )
        segments.append({"start": int(u), "end": int(v), "series": per_series})
    config = asdict(res.config)
    for key in ("custom_freqs", "prior_pi"):
        if config[key] is not None:
            config[key] = [float(x) for x in config[key]]
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "detection_report",
        "input": {"name": input_name, "d": panel.d, "T": panel.T},
        "config": config,
        "grid": {
            "mode": res.grid.source,
            "freqs": [float(x) for x in res.grid.freqs],
        },
        "series": {
            "labels": labels,
            "values": [[float(x) for x in row] for row in panel.data],
        },
        "chosen_ne": int(res.chosen_ne),
        "partition": {
            "T": res.partition.T,
            "cps": [int(c) for c in res.partition.cps],
        },
        "segments": segments,
        "gain_tree": [
            {
                "u": int(r.u),
                "v": int(r.v),
                "split": int(r.split),
                "gain": float(r.gain),
                "raw_ratio": _finite_or_none(r.raw_ratio),
                "n_evals": int(r.profile.n_evals),
            }
            for r in res.tree
        ],
        "criterion": [
            {
                "cps": [int(c) for c in c_score.cps],
                "mdl": float(c_score.mdl),
                "n_effects": int(c_score.n_effects),
            }
            for c_score in res.criterion
        ],
        "n_gain_evals": int(res.n_gain_evals),
        "timings": {k: float(t) for k, t in res.timings.items()},
    }


def _dump_json(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {what} {path}: {exc.strerror or exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON: {exc}")
    if not isinstance(payload, dict):
        raise InputError(f"{path}: expected a JSON object")
    return payload


@main.command(name="detect")
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=False, dir_okay=False),
              help="CSV file with a header row; columns are series.")
@click.option("--grid", default="periodogram:50", show_default=True,
              help="Frequency grid: periodogram[:P] or equal[:P].")
@click.option("--ne", default="2", show_default=True,
              help="Effects per segment: an integer or auto[:MAX].")
@click.option("--delta", type=float, default=1.01, show_default=True,
              help="Gain threshold for accepting a split.")
@click.option("--select", type=click.Choice([SELECT_MDL, SELECT_THRESHOLD]),
              default=SELECT_MDL, show_default=True,
              help="Final partition selection rule.")
@click.option("--min-seg", type=int, default=30, show_default=True,
              help="Minimum segment length.")
@click.option("--sigma0", type=float, default=1.0, show_default=True,
              help="Prior variance of each intensity coefficient.")
@click.option("--pip-threshold", type=float, default=0.5, show_default=True,
              help="Inclusion probability needed to report a frequency.")
@click.option("--search", type=click.Choice([SEARCH_OPTIMISTIC, SEARCH_FULL]),
              default=SEARCH_OPTIMISTIC, show_default=True,
              help="Split search strategy inside each interval.")
@click.option("--threads", type=int, default=1, envvar="OSCSEG_THREADS",
              show_default=True, help="Worker threads for per-series scoring.")
@click.option("--seed", type=int, default=None, help="Seed echoed in the report.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the JSON report here instead of stdout.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              default=None, help="key=value file; explicit flags win.")
@_cli_errors
def cmd_detect(input_path, grid, ne, delta, select, min_seg, sigma0,
               pip_threshold, search, threads, seed, out, config_path):
    """Detect change points in a CSV panel and emit a JSON report."""
    values: Dict[str, object] = {
        "grid": grid, "ne": ne, "delta": delta, "select": select,
        "min_seg": min_seg, "sigma0": sigma0, "pip_threshold": pip_threshold,
        "search": search, "threads": threads, "seed": seed,
    }
    if config_path is not None:
        _apply_config_file(config_path, values)
    cfg = _detection_config(values)
    panel = read_panel_csv(input_path)
    result = detect(panel, cfg)
    _dump_json(build_report(result, panel, input_path), out)


_SCENARIO_FLAGS = {
    "1a": {"sigma"},
    "1b": set(),
    "1c": set(),
    "2a": {"t_total", "n_cps"},
    "2b": {"t_total", "n_cps"},
    "3": {"t_total", "n_cps", "d", "d1"},
    "4": set(),
    "5": set(),
    "6": {"t_total", "sigma"},
}


def _simulate_scenario(scenario, seed, t_total, n_cps, d, d1, sigma):
    """Run one scenario; returns (panel 2-D array, truth dict)."""
    truth: Dict[str, object] = {
        "schema_version": SCHEMA_VERSION,
        "kind": "truth",
        "scenario": scenario,
        "seed": seed,
    }
    if scenario in ("1a", "1b", "1c"):
        variant = {"1a": "gauss1", "1b": "t3", "1c": "m1"}[scenario]
        y, part, mean = gen_scenario1(variant, seed=seed, sigma=sigma)
        truth.update(
            cps=[int(c) for c in part.cps], T=part.T,
            mean=[[float(x) for x in mean]],
            sigmas=[float(sigma) if sigma is not None else
                    (1.0 if scenario == "1a" else None)],
            noise={"1a": "gaussian", "1b": "student_t3", "1c": "m1"}[scenario],
        )
        return y[None, :], truth
    if scenario in ("2a", "2b"):
        y, sim = gen_scenario2(
            T=t_total or 1000, m=n_cps if n_cps is not None else 3,
            continuity=(scenario == "2b"), seed=seed,
        )
        truth.update(
            cps=[int(c) for c in sim.partition.cps], T=sim.partition.T,
            mean=[[float(x) for x in sim.mean]],
            sigmas=[float(s) for s in sim.sigmas],
            assignment=sim.assignment,
            segments=_spec_segments(sim.specs[0]),
        )
        return y[None, :], truth
    if scenario == "3":
        panel, sim = gen_scenario3(
            d=d if d is not None else 3, T=t_total or 1000,
            m=n_cps if n_cps is not None else 3, d1=d1, seed=seed,
        )
        truth.update(
            cps=[int(c) for c in sim.partition.cps], T=sim.partition.T,
            mean=[[float(x) for x in row] for row in sim.mean],
            sigmas=[float(s) for s in sim.sigmas],
            assignment=sim.assignment,
        )
        return panel, truth
    if scenario == "4":
        y, part = gen_piecewise_ar(seed=seed)
        truth.update(cps=[int(c) for c in part.cps], T=part.T, mean=None)
        return y[None, :], truth
    if scenario == "5":
        y, omega = gen_tvar(seed=seed)
        truth.update(
            cps=[], T=int(y.size), mean=None,
            omega_star=[float(x) for x in omega],
        )
        return y[None, :], truth
    if scenario == "6":
        sd = 3.0 if sigma is None else float(sigma)
        y = gen_white_noise(T=t_total or 1000, sigma=sd, seed=seed)
        truth.update(
            cps=[], T=int(y.size), mean=[[0.0] * int(y.size)], sigmas=[sd]
        )
        return y[None, :], truth
    raise ConfigError(f"unknown scenario {scenario!r}")


def _spec_segments(spec) -> List[dict]:
    out = []
    start = 0
    for seg in spec.segments:
        out.append(
            {
                "start": start,
                "end": start + seg.length,
                "components": [
                    {
                        "freq": float(c.freq),
                        "b_sin": float(c.b_sin),
                        "b_cos": float(c.b_cos),
                        "phase": float(c.phase),
                    }
                    for c in seg.components
                ],
            }
        )
        start += seg.length
    return out


@main.command(name="simulate")
@click.option("--scenario", required=True,
              help="One of 1a, 1b, 1c, 2a, 2b, 3, 4, 5, 6.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--T", "t_total", type=int, default=None,
              help="Series length (scenarios 2a, 2b, 3, 6).")
@click.option("--m", "n_cps", type=int, default=None,
              help="Change point count (scenarios 2a, 2b, 3).")
@click.option("--d", type=int, default=None, help="Series count (scenario 3).")
@click.option("--d1", type=int, default=None,
              help="How many series keep the low noise level (scenario 3).")
@click.option("--sigma", type=float, default=None,
              help="Gaussian noise standard deviation (scenarios 1a, 6).")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="CSV output path; the truth sidecar replaces .csv with"
                   " .truth.json. Defaults to scenario<ID>_seed<SEED>.csv.")
@_cli_errors
def cmd_simulate(scenario, seed, t_total, n_cps, d, d1, sigma, out_path):
    """Sample a benchmark scenario to CSV plus a truth JSON sidecar."""
    scenario = scenario.strip().lower()
    if scenario not in _SCENARIO_FLAGS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    given = {
        "t_total": t_total, "n_cps": n_cps, "d": d, "d1": d1, "sigma": sigma,
    }
    allowed = _SCENARIO_FLAGS[scenario]
    flag_names = {"t_total": "--T", "n_cps": "--m", "d": "--d", "d1": "--d1",
                  "sigma": "--sigma"}
    for key, val in given.items():
        if val is not None and key not in allowed:
            raise ConfigError(
                f"{flag_names[key]} does not apply to scenario {scenario}"
            )
    panel, truth = _simulate_scenario(scenario, seed, t_total, n_cps, d, d1, sigma)
    if out_path is None:
        out_path = f"scenario{scenario}_seed{seed}.csv"
    truth_path = (
        out_path[:-4] + ".truth.json"
        if out_path.endswith(".csv")
        else out_path + ".truth.json"
    )
    labels = [f"y{i + 1}" for i in range(panel.shape[0])]
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", *labels])
        for t in range(panel.shape[1]):
            writer.writerow([t + 1, *[repr(float(x)) for x in panel[:, t]]])
    with open(truth_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(truth, sort_keys=True, indent=2, allow_nan=False) + "\n")
    click.echo(f"wrote {out_path} and {truth_path}", err=True)


def _fitted_panel(report: dict) -> np.ndarray:
    """Posterior-mean reconstruction from a report's selected frequencies."""
    T = int(report["partition"]["T"])
    d = int(report["input"]["d"])
    fitted = np.zeros((d, T))
    for seg in report["segments"]:
        u, v = int(seg["start"]), int(seg["end"])
        t = np.arange(u + 1, v + 1, dtype=float)
        for i, entry in enumerate(seg["series"]):
            total = np.zeros(v - u)
            for freq, (b_sin, b_cos) in zip(
                entry["frequencies"], entry["intensities"]
            ):
                ang = 2.0 * np.pi * float(freq) * t
                total += float(b_sin) * np.sin(ang) + float(b_cos) * np.cos(ang)
            fitted[i, u:v] = total
    return fitted


@main.command(name="evaluate")
@click.option("--report", "report_path", required=True,
              type=click.Path(dir_okay=False), help="Detection report JSON.")
@click.option("--truth", "truth_path", required=True,
              type=click.Path(dir_okay=False), help="Truth JSON sidecar.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the evaluation JSON here instead of stdout.")
@_cli_errors
def cmd_evaluate(report_path, truth_path, out):
    """Score a detection report against a simulation truth file."""
    report = _load_json(report_path, "report")
    truth = _load_json(truth_path, "truth file")
    try:
        est = Partition(
            cps=np.asarray(report["partition"]["cps"], dtype=int),
            T=int(report["partition"]["T"]),
        )
        truth_T = int(truth["T"])
        truth_cps = np.asarray(truth["cps"], dtype=int)
    except KeyError as exc:
        raise InputError(f"missing key {exc} in report or truth file")
    if est.T != truth_T:
        raise ConfigError(
            f"length mismatch: report T={est.T}, truth T={truth_T}"
        )
    ref = Partition(cps=truth_cps, T=truth_T)
    payload: Dict[str, object] = {
        "schema_version": SCHEMA_VERSION,
        "kind": "evaluation",
        "coverage": metric_coverage(ref, est),
        "hausdorff": metric_hausdorff(ref, est),
        "bias": metric_bias(ref, est),
        "rmse_signal": None,
        "rmse_fit": None,
    }
    if truth.get("mean") is not None and "segments" in report:
        fitted = _fitted_panel(report)
        truth_mean = np.asarray(truth["mean"], dtype=float)
        if truth_mean.shape == fitted.shape:
            payload["rmse_signal"] = metric_rmse(truth_mean.ravel(), fitted.ravel())
        observed = np.asarray(report["series"]["values"], dtype=float)
        if observed.shape == fitted.shape:
            payload["rmse_fit"] = metric_rmse(observed.ravel(), fitted.ravel())
    _dump_json(payload, out)


def _svg_header(width: int, height: int) -> List[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}"'
        f' height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]


def render_svg(report: dict) -> str:
    """Deterministic SVG summary: per series, the line, change point markers
    and per-segment frequency bars shaded by amplitude."""
    fmt = lambda x: f"{x:.2f}"  # noqa: E731 - tiny local formatter
    values = report["series"]["values"]
    labels = report["series"]["labels"]
    T = int(report["partition"]["T"])
    cps = [int(c) for c in report["partition"]["cps"]]
    d = len(values)
    ml, mr, mt = 60, 20, 30
    pw = 820
    series_h, strip_h, gap = 130, 44, 36
    panel_h = series_h + strip_h + 10
    width = ml + pw + mr
    height = mt + d * (panel_h + gap)
    parts = _svg_header(width, height)
    amp_max = 0.0
    for seg in report["segments"]:
        for entry in seg["series"]:
            for a in entry["amplitudes"]:
                amp_max = max(amp_max, float(a))
    x_of = lambda t: ml + pw * t / T  # noqa: E731

    for i in range(d):
        top = mt + i * (panel_h + gap)
        row = np.asarray(values[i], dtype=float)
        lo, hi = float(np.min(row)), float(np.max(row))
        if hi - lo < 1e-12:
            lo, hi = lo - 1.0, hi + 1.0
        pad = 0.05 * (hi - lo)
        lo, hi = lo - pad, hi + pad
        y_of = lambda val: top + series_h * (hi - val) / (hi - lo)  # noqa: E731
        parts.append(
            f'<text x="{ml}" y="{top - 8}" font-family="monospace"'
            f' font-size="13" fill="#333333">{escape(str(labels[i]))}</text>'
        )
        parts.append(
            f'<rect x="{ml}" y="{top}" width="{pw}" height="{series_h}"'
            f' fill="none" stroke="#cccccc" stroke-width="1"/>'
        )
        pts = " ".join(
            f"{fmt(x_of(t + 1))},{fmt(y_of(row[t]))}" for t in range(T)
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="#1f6fb4"'
            f' stroke-width="1"/>'
        )
        for cp in cps:
            x = fmt(x_of(cp))
            parts.append(
                f'<line x1="{x}" y1="{top}" x2="{x}"'
                f' y2="{top + series_h + strip_h}" stroke="#c23b3b"'
                f' stroke-width="1.5" stroke-dasharray="5,3"/>'
            )
        strip_top = top + series_h + 4
        parts.append(
            f'<rect x="{ml}" y="{strip_top}" width="{pw}" height="{strip_h}"'
            f' fill="#f5f5f5" stroke="#cccccc" stroke-width="0.5"/>'
        )
        for seg in report["segments"]:
            u, v = int(seg["start"]), int(seg["end"])
            entry = seg["series"][i]
            for freq, amp in zip(entry["frequencies"], entry["amplitudes"]):
                frac = min(float(freq) / 0.5, 1.0)
                y_bar = strip_top + strip_h - frac * strip_h
                opacity = 0.25 + 0.75 * (float(amp) / amp_max if amp_max else 0.0)
                parts.append(
                    f'<rect x="{fmt(x_of(u))}" y="{fmt(y_bar - 1.5)}"'
                    f' width="{fmt(x_of(v) - x_of(u))}" height="3"'
                    f' fill="#2a8f5c" fill-opacity="{opacity:.3f}"/>'
                )
        axis_y = strip_top + strip_h
        parts.append(
            f'<text x="{ml}" y="{axis_y + 16}" font-family="monospace"'
            f' font-size="11" fill="#666666">1</text>'
        )
        parts.append(
            f'<text x="{ml + pw}" y="{axis_y + 16}" font-family="monospace"'
            f' font-size="11" fill="#666666" text-anchor="end">{T}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


@main.command(name="plot")
@click.option("--report", "report_path", required=True,
              type=click.Path(dir_okay=False), help="Detection report JSON.")
@click.option("--out", "out_path", required=True,
              type=click.Path(dir_okay=False), help="SVG output path.")
@_cli_errors
def cmd_plot(report_path, out_path):
    """Render a detection report to a static SVG summary."""
    report = _load_json(report_path, "report")
    for key in ("series", "partition", "segments"):
        if key not in report:
            raise InputError(f"{report_path}: report lacks the {key!r} block")
    svg = render_svg(report)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(svg)
    click.echo(f"wrote {out_path}", err=True)


if __name__ == "__main__":
    main()
