"""Seeded generators for the simulation scenarios used in tests, demos and the
command line `simulate` command.

Every generator is a pure function of its arguments and a seed: replays are
bit-identical. Mean functions are built on the absolute time index t = 1..T,
matching the convention of the design matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InputError, NumericalError
from .segment import Partition

GAP_TOL = 1e-6


@dataclass(frozen=True)
class Component:
    """One sinusoidal component b_sin*sin(2 pi w t + a) + b_cos*cos(2 pi w t + a)."""

    freq: float
    b_sin: float
    b_cos: float
    phase: float = 0.0


@dataclass(frozen=True)
class SegmentSpec:
    """A segment of a given length with its sinusoidal components."""

    length: int
    components: Tuple[Component, ...]


@dataclass(frozen=True)
class OscSpec:
    """Piecewise oscillatory signal specification.

    noise_kind is one of "gaussian" (scale noise_scale), "student_t"
    (noise_df degrees of freedom) or "m1" (the nonstationary variant
    e_t = 0.5 cos(t/T) e_{t-1} + z_t + 0.3 (t/T) z_{t-1} with z iid standard
    normal).
    """

    segments: Tuple[SegmentSpec, ...]
    noise_kind: str = "gaussian"
    noise_scale: float = 1.0
    noise_df: float = 3.0

    @property
    def T(self) -> int:
        return sum(s.length for s in self.segments)

    def partition(self) -> Partition:
        bounds = np.cumsum([s.length for s in self.segments])
        return Partition(cps=bounds[:-1].astype(int), T=int(bounds[-1]))


def _segment_mean(components: Sequence[Component], t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    for c in components:
        ang = 2.0 * np.pi * c.freq * t + c.phase
        out += c.b_sin * np.sin(ang) + c.b_cos * np.cos(ang)
    return out


def mean_from_spec(spec: OscSpec) -> np.ndarray:
    """Deterministic mean signal of a specification over t = 1..T."""
    T = spec.T
    mean = np.empty(T)
    lo = 0
    for seg in spec.segments:
        hi = lo + seg.length
        t = np.arange(lo + 1, hi + 1, dtype=float)
        mean[lo:hi] = _segment_mean(seg.components, t)
        lo = hi
    return mean


def _draw_noise(spec: OscSpec, rng: np.random.Generator) -> np.ndarray:
    T = spec.T
    if spec.noise_kind == "gaussian":
        return rng.normal(0.0, spec.noise_scale, size=T)
    if spec.noise_kind == "student_t":
        return spec.noise_scale * rng.standard_t(spec.noise_df, size=T)
    if spec.noise_kind == "m1":
        z = rng.normal(size=T + 1)  # z[0] seeds the moving-average lag
        eps = np.empty(T)
        prev = 0.0
        for t in range(1, T + 1):
            frac = t / T
            eps[t - 1] = 0.5 * np.cos(frac) * prev + z[t] + 0.3 * frac * z[t - 1]
            prev = eps[t - 1]
        return eps
    raise InputError(f"unknown noise kind {spec.noise_kind!r}")


def gen_oscillation(spec: OscSpec, seed: int) -> Tuple[np.ndarray, Partition, np.ndarray]:
    """Sample one series from a specification: mean plus noise.

    Returns (series, truth partition, mean signal).
    """
    rng = np.random.default_rng(seed)
    mean = mean_from_spec(spec)
    return mean + _draw_noise(spec, rng), spec.partition(), mean


# The three printed baseline mean functions plus three fixed stand-ins chosen
# to span the same frequency band; coefficients of the stand-ins are arbitrary
# but frozen so replays and tests are stable.
BASELINE_COMPONENTS: Tuple[Tuple[Component, ...], ...] = (
    (
        Component(1 / 24, 2.0, 3.0),
        Component(1 / 15, 4.0, 5.0),
        Component(1 / 7, 1.0, 2.5),
    ),
    (Component(1 / 12, 4.0, 3.0),),
    (
        Component(1 / 22, 2.5, 4.0),
        Component(1 / 25, 4.0, 2.0),
    ),
    (
        Component(1 / 9, 3.0, 2.0),
        Component(1 / 18, 2.0, 4.0),
    ),
    (
        Component(1 / 28, 4.0, 2.5),
        Component(1 / 40, 3.0, 3.0),
    ),
    (Component(1 / 11, 5.0, 3.0),),
)


def gen_scenario1(
    noise: str = "gauss1", seed: int = 0, sigma: Optional[float] = None
) -> Tuple[np.ndarray, Partition, np.ndarray]:
    """Three-segment oscillatory series of length 900 with breaks at 300 and 650.

    Noise variants: "gauss1" N(0, 1), "gauss3" N(0, 9), "t3" Student t with 3
    degrees of freedom, "m1" the nonstationary modulated variant. sigma
    overrides the Gaussian standard deviation of the gauss variants.
    """
    kinds = {
        "gauss1": ("gaussian", 1.0),
        "gauss3": ("gaussian", 3.0),
        "t3": ("student_t", 1.0),
        "m1": ("m1", 1.0),
    }
    if noise not in kinds:
        raise InputError(f"unknown scenario 1 noise variant {noise!r}")
    kind, scale = kinds[noise]
    if sigma is not None:
        if kind != "gaussian":
            raise InputError("sigma override applies only to the Gaussian variants")
        if sigma < 0:
            raise InputError("sigma must be nonnegative")
        scale = float(sigma)
    spec = OscSpec(
        segments=(
            SegmentSpec(300, BASELINE_COMPONENTS[0]),
            SegmentSpec(350, BASELINE_COMPONENTS[1]),
            SegmentSpec(250, BASELINE_COMPONENTS[2]),
        ),
        noise_kind=kind,
        noise_scale=scale,
    )
    return gen_oscillation(spec, seed)


@dataclass
class SimTruth:
    """Ground truth attached to a sampled series or panel."""

    partition: Partition
    mean: np.ndarray  # (T,) or (d, T)
    assignment: List[List[int]] = field(default_factory=list)
    sigmas: List[float] = field(default_factory=list)
    specs: List[OscSpec] = field(default_factory=list)


def min_spacing_for(T: int) -> int:
    """Minimum segment length enforced when sampling change points."""
    if T <= 1000:
        return 100
    if T <= 5000:
        return 200
    return 300


def sample_change_points(
    T: int, m: int, spacing: int, rng: np.random.Generator
) -> np.ndarray:
    """m sorted change points in (0, T) with all m+1 segments >= spacing."""
    slack = T - (m + 1) * spacing
    if m < 0 or slack < 0:
        raise InputError(
            f"cannot place {m} change points with spacing {spacing} in length {T}"
        )
    if m == 0:
        return np.empty(0, dtype=int)
    u = np.sort(rng.integers(0, slack + 1, size=m))
    return (np.arange(1, m + 1) * spacing + u).astype(int)


def _draw_assignment(m: int, rng: np.random.Generator) -> List[int]:
    ids: List[int] = []
    n_pool = len(BASELINE_COMPONENTS)
    for _ in range(m + 1):
        nxt = int(rng.integers(n_pool))
        while ids and nxt == ids[-1]:  # consecutive segments must differ
            nxt = int(rng.integers(n_pool))
        ids.append(nxt)
    return ids


def _boundary_gaps(segments: List[SegmentSpec], cps: np.ndarray) -> np.ndarray:
    gaps = np.empty(cps.size)
    for j, b in enumerate(cps):
        t = np.array([float(b)])
        left = _segment_mean(segments[j].components, t)[0]
        right = _segment_mean(segments[j + 1].components, t)[0]
        gaps[j] = right - left
    return gaps


def _with_phase(seg: SegmentSpec, idx: int, phase: float) -> SegmentSpec:
    comps = list(seg.components)
    c = comps[idx]
    comps[idx] = Component(c.freq, c.b_sin, c.b_cos, phase)
    return SegmentSpec(seg.length, tuple(comps))


def _optimize_phases(
    segments: List[SegmentSpec],
    cps: np.ndarray,
    rng: np.random.Generator,
    max_sweeps: int = 200,
) -> Optional[List[SegmentSpec]]:
    """Coordinate descent over all component phases until every boundary gap
    is below GAP_TOL. Each coordinate is minimized by a coarse scan followed by
    golden-section refinement. Returns None when the sweep cap is hit."""
    coords = [
        (j, l) for j, seg in enumerate(segments) for l in range(len(seg.components))
    ]
    segs = list(segments)
    for j, l in coords:
        segs[j] = _with_phase(segs[j], l, rng.uniform(0.0, 2.0 * np.pi))

    grid = np.linspace(0.0, 2.0 * np.pi, 65)[:-1]
    for _ in range(max_sweeps):
        for j, l in coords:
            def objective(a: float) -> float:
                trial = list(segs)
                trial[j] = _with_phase(trial[j], l, a)
                g = _boundary_gaps(trial, cps)
                return float(g @ g)

            values = np.array([objective(a) for a in grid])
            k = int(np.argmin(values))
            bracket = (grid[k] - grid[1], grid[k], grid[k] + grid[1])
            res = minimize_scalar(
                objective,
                bracket=bracket,
                method="golden",
                options={"xtol": 1e-12},
            )
            best = res.x if res.fun <= values[k] else grid[k]
            segs[j] = _with_phase(segs[j], l, float(best) % (2.0 * np.pi))
        if np.max(np.abs(_boundary_gaps(segs, cps))) <= GAP_TOL:
            return segs
    return None


def _continuous_segments(
    segments: List[SegmentSpec],
    cps: np.ndarray,
    rng: np.random.Generator,
    restarts: int = 40,
) -> Optional[List[SegmentSpec]]:
    if cps.size == 0:
        return segments
    for _ in range(restarts):
        out = _optimize_phases(segments, cps, rng)
        if out is not None:
            return out
    return None


def gen_scenario2(
    T: int = 1000,
    m: int = 3,
    continuity: bool = False,
    seed: int = 0,
) -> Tuple[np.ndarray, SimTruth]:
    """Random change points, baseline means drawn from a pool of six, N(0, 9) noise.

    Change points are sampled with a minimum spacing that grows with T (100 up
    to length 1000, 200 up to 5000, 300 beyond). With continuity=True, each
    component receives a phase shift optimized so that adjacent segment means
    agree at every change point to within 1e-6.
    """
    rng = np.random.default_rng(seed)
    spacing = min_spacing_for(T)
    for _attempt in range(6):
        cps = sample_change_points(T, m, spacing, rng)
        ids = _draw_assignment(m, rng)
        bounds = np.concatenate(([0], cps, [T]))
        segments = [
            SegmentSpec(int(bounds[j + 1] - bounds[j]), BASELINE_COMPONENTS[ids[j]])
            for j in range(m + 1)
        ]
        if continuity:
            adjusted = _continuous_segments(segments, cps, rng)
            if adjusted is None:  # infeasible assignment, redraw it
                continue
            segments = adjusted
        spec = OscSpec(tuple(segments), noise_kind="gaussian", noise_scale=3.0)
        y, part, mean = gen_oscillation(spec, int(rng.integers(2**32)))
        truth = SimTruth(
            partition=part, mean=mean, assignment=[ids], sigmas=[3.0], specs=[spec]
        )
        return y, truth
    raise NumericalError("could not produce a continuous signal for this seed")


def gen_scenario3(
    d: int,
    T: int = 1000,
    m: int = 3,
    d1: Optional[int] = None,
    seed: int = 0,
) -> Tuple[np.ndarray, SimTruth]:
    """Panel of d series sharing one set of change points.

    Per-series means are drawn independently from the baseline pool; noise is
    Gaussian with standard deviation 3 for the first d1 series and 9 for the
    rest (d1 defaults to d).
    """
    if d < 1:
        raise InputError("d must be at least 1")
    d1 = d if d1 is None else d1
    if d1 > d or d1 < 0:
        raise InputError("d1 must lie in [0, d]")
    rng = np.random.default_rng(seed)
    spacing = min_spacing_for(T)
    cps = sample_change_points(T, m, spacing, rng)
    bounds = np.concatenate(([0], cps, [T]))
    panel = np.empty((d, T))
    means = np.empty((d, T))
    assignment: List[List[int]] = []
    sigmas: List[float] = []
    specs: List[OscSpec] = []
    for i in range(d):
        ids = _draw_assignment(m, rng)
        sigma = 3.0 if i < d1 else 9.0
        segments = tuple(
            SegmentSpec(int(bounds[j + 1] - bounds[j]), BASELINE_COMPONENTS[ids[j]])
            for j in range(m + 1)
        )
        spec = OscSpec(segments, noise_kind="gaussian", noise_scale=sigma)
        y, _, mean = gen_oscillation(spec, int(rng.integers(2**32)))
        panel[i] = y
        means[i] = mean
        assignment.append(ids)
        sigmas.append(sigma)
        specs.append(spec)
    truth = SimTruth(
        partition=Partition(cps=cps, T=T),
        mean=means,
        assignment=assignment,
        sigmas=sigmas,
        specs=specs,
    )
    return panel, truth


PIECEWISE_AR_PIECES: Tuple[Tuple[int, Tuple[float, ...]], ...] = (
    (512, (0.9,)),
    (768, (1.69, -0.81)),
    (1024, (1.32, -0.81)),
)


def gen_piecewise_ar(seed: int = 0) -> Tuple[np.ndarray, Partition]:
    """Piecewise autoregressive series of length 1024 with breaks at 512 and 768.

    The AR state carries across the breaks (a single trajectory with
    structural coefficient changes); 200 burn-in steps under the first piece
    initialize the state and are discarded.
    """
    rng = np.random.default_rng(seed)
    T = PIECEWISE_AR_PIECES[-1][0]
    burn = 200
    y1, y2 = 0.0, 0.0  # last two values, newest first
    out = np.empty(T)
    tails = [end for end, _ in PIECEWISE_AR_PIECES]
    coeffs = [c for _, c in PIECEWISE_AR_PIECES]
    for t in range(-burn, T):
        piece = 0
        while t >= 0 and t + 1 > tails[piece]:
            piece += 1
        c = coeffs[piece if t >= 0 else 0]
        val = c[0] * y1 + (c[1] * y2 if len(c) > 1 else 0.0) + rng.normal()
        y2, y1 = y1, val
        if t >= 0:
            out[t] = val
    cps = np.array([end for end, _ in PIECEWISE_AR_PIECES[:-1]], dtype=int)
    return out, Partition(cps=cps, T=T)


def tvar_coefficient(t: np.ndarray) -> np.ndarray:
    """Slowly varying lag-1 coefficient a_t = 0.8 (1 - 0.5 cos(pi t / 1031))."""
    return 0.8 * (1.0 - 0.5 * np.cos(np.pi * np.asarray(t, dtype=float) / 1031.0))


def gen_tvar(seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Time-varying AR(2) series y_t = a_t y_{t-1} - 0.81 y_{t-2} + e_t, T = 1031.

    Also returns the spectral-peak trajectory of the frozen AR(2) at each t,
    omega*(t) = arccos(a_t (1 + 0.81) / 3.24) / (2 pi), which drifts
    monotonically over the sample.
    """
    rng = np.random.default_rng(seed)
    T = 1031
    y = np.empty(T)
    y1, y2 = 0.0, 0.0
    for t in range(1, T + 1):
        a_t = float(tvar_coefficient(t))
        val = a_t * y1 - 0.81 * y2 + rng.normal()
        y2, y1 = y1, val
        y[t - 1] = val
    t_all = np.arange(1, T + 1)
    peak = np.arccos(tvar_coefficient(t_all) * 1.81 / 3.24) / (2.0 * np.pi)
    return y, peak


def gen_white_noise(T: int = 1000, sigma: float = 3.0, seed: int = 0) -> np.ndarray:
    """Pure white noise N(0, sigma^2), the no-change null scenario."""
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, sigma, size=T)
