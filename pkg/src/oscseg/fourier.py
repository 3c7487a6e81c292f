"""Frequency grids, sinusoidal design matrices, periodograms and closed-form
trigonometric sums.

Frequencies are expressed in cycles per sample and live strictly inside
(0, 1/2). Design matrices are always indexed by absolute time, so the column
for frequency w evaluated over the window (u, v] contains sin(2*pi*w*t) for
t = u+1, ..., v. Keeping the absolute index makes sums over any window
expressible as a difference of two prefix sums, which is what the closed-form
helpers in this module provide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import DegenerateFrequencyError, InputError

_DENOM_TOL = 1e-10
_DEDUP_TOL = 1e-12
_EDGE_TOL = 1e-9

GRID_EQUAL = "equal"
GRID_PERIODOGRAM = "periodogram"
GRID_CUSTOM = "custom"


@dataclass(frozen=True)
class FrequencyGrid:
    """Ordered candidate frequencies in (0, 1/2).

    Parameters
    ----------
    freqs : np.ndarray
        Strictly increasing frequencies, each in the open interval (0, 1/2).
    source : str
        How the grid was built: "equal", "periodogram" or "custom".
    """

    freqs: np.ndarray
    source: str = GRID_CUSTOM

    def __post_init__(self) -> None:
        freqs = np.asarray(self.freqs, dtype=float)
        object.__setattr__(self, "freqs", freqs)
        if freqs.ndim != 1 or freqs.size < 1:
            raise InputError("frequency grid must be a non-empty 1-D array")
        if not np.all(np.isfinite(freqs)):
            raise InputError("frequency grid contains non-finite values")
        if np.any(freqs <= 0.0) or np.any(freqs >= 0.5):
            raise InputError("grid frequencies must lie strictly in (0, 1/2)")
        if np.any(np.diff(freqs) <= 0.0):
            raise InputError("grid frequencies must be strictly increasing")

    @property
    def p(self) -> int:
        return int(self.freqs.size)

    @property
    def theta(self) -> np.ndarray:
        """Angular frequencies 2*pi*w."""
        return 2.0 * np.pi * self.freqs

    @classmethod
    def from_values(cls, values, source: str = GRID_CUSTOM) -> "FrequencyGrid":
        """Build a grid from user-supplied values, deduplicating near-equal
        entries and rejecting values that touch 0 or 1/2."""
        arr = np.sort(np.asarray(values, dtype=float).ravel())
        if arr.size == 0:
            raise InputError("empty frequency list")
        if np.any(arr < _EDGE_TOL) or np.any(arr > 0.5 - _EDGE_TOL):
            raise InputError("frequencies must stay clear of 0 and 1/2")
        keep = np.concatenate(([True], np.diff(arr) > _DEDUP_TOL))
        return cls(arr[keep], source=source)


@dataclass(frozen=True)
class DesignPair:
    """Paired sine and cosine design matrices over a window (u, v].

    Row t-u-1 of each matrix corresponds to absolute time index t, and column
    k to the k-th grid frequency: sin_cols[t-u-1, k] = sin(2*pi*w_k*t).
    """

    sin_cols: np.ndarray
    cos_cols: np.ndarray
    window: Tuple[int, int]

    @property
    def n(self) -> int:
        return int(self.window[1] - self.window[0])


@dataclass(frozen=True)
class Periodogram:
    """Power at the canonical frequencies {j/n : j = 1..floor(n/2)}."""

    freqs: np.ndarray
    powers: np.ndarray


def build_grid_equal(p: int) -> FrequencyGrid:
    """Equally spaced grid of p interior frequencies {k/(2(p+1)) : k=1..p}.

    The spacing places every point strictly inside (0, 1/2); the endpoints are
    excluded because their sine or cosine columns are degenerate.

    Parameters
    ----------
    p : int
        Number of grid points, at least 1.

    Returns
    -------
    FrequencyGrid
    """
    if p < 1:
        raise InputError("grid size p must be at least 1")
    k = np.arange(1, p + 1, dtype=float)
    return FrequencyGrid(k / (2.0 * (p + 1)), source=GRID_EQUAL)


def periodogram(series: np.ndarray) -> Periodogram:
    """Periodogram of a series at its canonical frequencies.

    power[j-1] = (1/n) * [ (sum_t y_t cos(2 pi j t / n))^2
                         + (sum_t y_t sin(2 pi j t / n))^2 ]  for j = 1..floor(n/2).

    Computed through the FFT, which matches the direct summation above to
    floating point round-off.

    Parameters
    ----------
    series : np.ndarray
        Real-valued series of length n >= 4.

    Returns
    -------
    Periodogram
    """
    y = np.asarray(series, dtype=float).ravel()
    n = y.size
    if n < 4:
        raise InputError("series too short for a periodogram (need n >= 4)")
    if not np.all(np.isfinite(y)):
        raise InputError("series contains non-finite values")
    spec = np.fft.rfft(y)[1 : n // 2 + 1]
    powers = (spec.real**2 + spec.imag**2) / n
    freqs = np.arange(1, n // 2 + 1, dtype=float) / n
    return Periodogram(freqs=freqs, powers=powers)


def build_grid_periodogram(series: np.ndarray, p: int) -> FrequencyGrid:
    """Grid of the p canonical frequencies with the largest periodogram power.

    For a multivariate input of shape (d, n), powers are averaged across the
    d rows before ranking. Ties in power break toward the lower frequency.
    The Nyquist frequency 1/2 (present for even n) is never selectable since
    its sine column vanishes identically.

    Parameters
    ----------
    series : np.ndarray
        Shape (n,) or (d, n).
    p : int
        Number of frequencies to keep.

    Returns
    -------
    FrequencyGrid
    """
    arr = np.asarray(series, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise InputError("series must be 1-D or 2-D")
    pgrams = [periodogram(row) for row in arr]
    freqs = pgrams[0].freqs
    powers = np.mean([pg.powers for pg in pgrams], axis=0)
    sub_nyquist = freqs < 0.5 - _EDGE_TOL
    freqs, powers = freqs[sub_nyquist], powers[sub_nyquist]
    if p < 1 or p > freqs.size:
        raise InputError(
            f"p must be between 1 and {freqs.size} for this series length"
        )
    # Stable sort on (-power, freq): equal powers keep the lower frequency first.
    order = np.lexsort((freqs, -powers))[:p]
    return FrequencyGrid(np.sort(freqs[order]), source=GRID_PERIODOGRAM)


def design(grid: FrequencyGrid, window: Tuple[int, int]) -> DesignPair:
    """Sine and cosine design matrices for a grid over the window (u, v].

    Parameters
    ----------
    grid : FrequencyGrid
    window : (int, int)
        Bounds (u, v] with 0 <= u < v; rows run over absolute t = u+1..v.

    Returns
    -------
    DesignPair
    """
    u, v = int(window[0]), int(window[1])
    if u < 0 or v <= u:
        raise InputError(f"invalid window ({u}, {v}]")
    t = np.arange(u + 1, v + 1, dtype=float)
    ang = np.outer(t, grid.theta)
    return DesignPair(sin_cols=np.sin(ang), cos_cols=np.cos(ang), window=(u, v))


def _check_denominator(value: float, what: str) -> None:
    if abs(value) < _DENOM_TOL:
        raise DegenerateFrequencyError(
            f"vanishing denominator {what}; use a direct sum or perturb the frequency"
        )


def lagrange_cos_sum(delta, n):
    """sum_{t=1}^{n} cos(delta * t) in closed form.

    Vectorized over `delta`; entries with delta == 0 (mod 2 pi) are returned
    as n exactly. `n` may be a scalar or an array broadcastable with delta.
    """
    delta = np.asarray(delta, dtype=float)
    nn = np.asarray(n, dtype=float)
    half = 0.5 * delta
    s = np.sin(half)
    degenerate = np.abs(s) < _DENOM_TOL
    safe = np.where(degenerate, 1.0, s)
    out = -0.5 + np.sin((nn + 0.5) * delta) / (2.0 * safe)
    return np.where(degenerate, nn, out)


def lagrange_sin_sum(delta, n):
    """sum_{t=1}^{n} sin(delta * t) in closed form.

    Vectorized like `lagrange_cos_sum`; entries with delta == 0 return 0.
    """
    delta = np.asarray(delta, dtype=float)
    nn = np.asarray(n, dtype=float)
    half = 0.5 * delta
    s = np.sin(half)
    degenerate = np.abs(s) < _DENOM_TOL
    safe = np.where(degenerate, 1.0, s)
    out = (np.cos(half) - np.cos((nn + 0.5) * delta)) / (2.0 * safe)
    return np.where(degenerate, 0.0, out)


SIN_SIN_SAME = "sin_sin_same"
COS_COS_SAME = "cos_cos_same"
SIN_COS_SAME = "sin_cos_same"
SIN_SIN_CROSS = "sin_sin_cross"
COS_COS_CROSS = "cos_cos_cross"
SIN_COS_CROSS = "sin_cos_cross"
COS_SIN_CROSS = "cos_sin_cross"

_GRAM_KINDS = (
    SIN_SIN_SAME,
    COS_COS_SAME,
    SIN_COS_SAME,
    SIN_SIN_CROSS,
    COS_COS_CROSS,
    SIN_COS_CROSS,
    COS_SIN_CROSS,
)


def gram_identity(kind: str, theta1: float, theta2: Optional[float], n: int) -> float:
    """Closed form for sums of sine and cosine products over t = 1..n.

    The seven supported kinds, with theta angular (theta = 2*pi*w):

    - "sin_sin_same":  sum sin(theta1 t)^2            = n/2 + 1/4 - sin((2n+1)theta1)/(4 sin theta1)
    - "cos_cos_same":  sum cos(theta1 t)^2            = n/2 - 1/4 + sin((2n+1)theta1)/(4 sin theta1)
    - "sin_cos_same":  sum sin(theta1 t) cos(theta1 t) = [cos theta1 - cos((2n+1)theta1)]/(4 sin theta1)
    - "sin_sin_cross": sum sin(theta1 t) sin(theta2 t)
    - "cos_cos_cross": sum cos(theta1 t) cos(theta2 t)
    - "sin_cos_cross": sum sin(theta1 t) cos(theta2 t)
    - "cos_sin_cross": sum cos(theta1 t) sin(theta2 t)

    The cross forms combine the two one-frequency sums at delta = theta1 -+ theta2.
    A vanishing denominator (sin theta1 for the same-frequency kinds, or
    sin(delta/2) for the cross kinds) raises DegenerateFrequencyError; callers
    needing theta1 == theta2 must use the *_same kinds.

    Parameters
    ----------
    kind : str
        One of the seven names above.
    theta1, theta2 : float
        Angular frequencies; theta2 is ignored by the *_same kinds.
    n : int
        Number of terms, n >= 1.

    Returns
    -------
    float
    """
    if kind not in _GRAM_KINDS:
        raise InputError(f"unknown gram identity kind {kind!r}")
    if n < 1:
        raise InputError("n must be at least 1")
    t1 = float(theta1)
    if kind in (SIN_SIN_SAME, COS_COS_SAME, SIN_COS_SAME):
        s = np.sin(t1)
        _check_denominator(s, "sin(theta)")
        ratio = np.sin((2 * n + 1) * t1) / (4.0 * s)
        if kind == SIN_SIN_SAME:
            return n / 2.0 + 0.25 - ratio
        if kind == COS_COS_SAME:
            return n / 2.0 - 0.25 + ratio
        return (np.cos(t1) - np.cos((2 * n + 1) * t1)) / (4.0 * s)
    t2 = float(theta2)
    d_minus = t1 - t2
    d_plus = t1 + t2
    _check_denominator(np.sin(0.5 * d_minus), "sin((theta1-theta2)/2)")
    _check_denominator(np.sin(0.5 * d_plus), "sin((theta1+theta2)/2)")
    if kind == SIN_SIN_CROSS:
        return 0.5 * float(lagrange_cos_sum(d_minus, n) - lagrange_cos_sum(d_plus, n))
    if kind == COS_COS_CROSS:
        return 0.5 * float(lagrange_cos_sum(d_minus, n) + lagrange_cos_sum(d_plus, n))
    if kind == SIN_COS_CROSS:
        return 0.5 * float(lagrange_sin_sum(d_minus, n) + lagrange_sin_sum(d_plus, n))
    # cos_sin_cross: sin(b)cos(a) = [sin(b-a) + sin(b+a)]/2 with a = theta1 t.
    return 0.5 * float(lagrange_sin_sum(-d_minus, n) + lagrange_sin_sum(d_plus, n))


def window_gram(theta: np.ndarray, u: int, v: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gram blocks of the paired design over the window (u, v] in closed form.

    Returns (SS, SC, CC) where, for absolute t = u+1..v,

        SS[j, k] = sum sin(theta_j t) sin(theta_k t)
        SC[j, k] = sum sin(theta_j t) cos(theta_k t)
        CC[j, k] = sum cos(theta_j t) cos(theta_k t)

    The full Gram of [sin_cols | cos_cols] is [[SS, SC], [SC.T, CC]]. Valid for
    any distinct grid frequencies in (0, 1/2); the diagonal (equal-frequency)
    entries are handled exactly through the zero-argument limit of the prefix
    sums. Cost is O(p^2) independent of the window length.
    """
    theta = np.asarray(theta, dtype=float)
    d_minus = theta[:, None] - theta[None, :]
    d_plus = theta[:, None] + theta[None, :]
    cm = lagrange_cos_sum(d_minus, v) - lagrange_cos_sum(d_minus, u)
    cp = lagrange_cos_sum(d_plus, v) - lagrange_cos_sum(d_plus, u)
    sm = lagrange_sin_sum(d_minus, v) - lagrange_sin_sum(d_minus, u)
    sp = lagrange_sin_sum(d_plus, v) - lagrange_sin_sum(d_plus, u)
    ss = 0.5 * (cm - cp)
    cc = 0.5 * (cm + cp)
    sc = 0.5 * (sm + sp)
    return ss, sc, cc


def continuity_compatible_frequencies(
    omega1: float, t0: int, beta: Optional[Tuple[float, float]] = None
) -> np.ndarray:
    """Frequencies whose sinusoid matches omega1's value at the boundary t0.

    Consider a signal that follows b1*sin(2 pi w t) + b2*cos(2 pi w t) with
    frequency omega1 up to time t0 and a second frequency omega2 afterwards,
    the coefficient pair shared across the switch. The returned set contains
    the omega2 in (0, 1/2) at which the two mean functions agree at t = t0.

    Writing the pair as A*sin(2 pi w t + phi), agreement at the boundary holds
    when the boundary angles coincide modulo a full turn, giving the shift set
    {omega1 + k/t0}, or when they are mirror images of each other through the
    sine's reflection symmetry. The mirror set depends on the phase phi of the
    coefficient pair:

    - with `beta` supplied, phi = atan2(b2, b1) and the mirror set is
      {(2k+1)/(2 t0) - phi/(pi t0) - omega1}; every returned frequency then
      matches the boundary value exactly for that coefficient pair;
    - with `beta` omitted, the phase-free convention {1/2 - omega1 + k/t0} is
      used; its members preserve the boundary value only for particular
      coefficient pairs (for instance a pure sine with odd t0).

    Parameters
    ----------
    omega1 : float
        Left-segment frequency in (0, 1/2).
    t0 : int
        Boundary time index, at least 1.
    beta : (float, float), optional
        Coefficient pair (b1, b2) shared across the switch.

    Returns
    -------
    np.ndarray
        Sorted, deduplicated frequencies in (0, 1/2).
    """
    if not (0.0 < omega1 < 0.5):
        raise InputError("omega1 must lie in (0, 1/2)")
    if t0 < 1:
        raise InputError("t0 must be a positive integer")
    step = 1.0 / t0
    if beta is None:
        mirror_base = 0.5 - omega1
    else:
        phi = float(np.arctan2(beta[1], beta[0]))
        mirror_base = 0.5 * step - phi * step / np.pi - omega1
    values = []
    for base in (omega1, mirror_base):
        k_lo = int(np.ceil((-base) / step)) - 1
        k_hi = int(np.floor((0.5 - base) / step)) + 1
        for k in range(k_lo, k_hi + 1):
            w = base + k * step
            if _DEDUP_TOL < w < 0.5 - _DEDUP_TOL:
                values.append(w)
    values.sort()
    out = []
    for w in values:
        if not out or w - out[-1] > _DEDUP_TOL:
            out.append(w)
    return np.asarray(out)
