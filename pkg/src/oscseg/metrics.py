"""Segmentation-quality and signal-recovery metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError


@dataclass
class EvalReport:
    """Bundle of evaluation metrics for one estimated partition."""

    coverage: float
    hausdorff: float
    bias: int
    rmse_signal: Optional[float] = None
    rmse_fit: Optional[float] = None


def _check_pair(truth, est) -> None:
    if truth.T != est.T:
        raise InputError("partitions cover different series lengths")


def coverage(truth, est) -> float:
    """Length-weighted best Jaccard overlap of true segments by estimated ones.

    C = (1/T) * sum over true segments A of |A| * max over estimated segments
    B of |A n B| / |A u B|. Equals 1 exactly when the partitions coincide.
    """
    _check_pair(truth, est)
    total = 0.0
    for a_lo, a_hi in truth.segments():
        len_a = a_hi - a_lo
        best = 0.0
        for b_lo, b_hi in est.segments():
            inter = min(a_hi, b_hi) - max(a_lo, b_lo)
            if inter <= 0:
                continue
            union = len_a + (b_hi - b_lo) - inter
            best = max(best, inter / union)
        total += len_a * best
    return total / truth.T


def hausdorff(truth, est) -> float:
    """Symmetric Hausdorff distance between boundary sets, scaled by T.

    Boundaries include 0 and T, so identical partitions score 0 and a single
    displaced change point scores its displacement over T.
    """
    _check_pair(truth, est)
    a = truth.boundaries()
    b = est.boundaries()
    d_ab = max(min(abs(x - y) for y in b) for x in a)
    d_ba = max(min(abs(x - y) for y in a) for x in b)
    return max(d_ab, d_ba) / truth.T


def bias(truth, est) -> int:
    """Absolute difference in the number of change points."""
    return abs(truth.m - est.m)


def rmse(a: np.ndarray, b: np.ndarray) -> float:
    """Root mean squared difference of two equal-length vectors."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size != b.size:
        raise InputError("rmse inputs differ in length")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def evaluate(
    truth,
    est,
    truth_mean: Optional[np.ndarray] = None,
    fitted_mean: Optional[np.ndarray] = None,
    observed: Optional[np.ndarray] = None,
) -> EvalReport:
    """Full metric bundle; RMSE entries are filled when means are supplied.

    rmse_signal compares the fitted mean against the true mean, rmse_fit
    against the observed series.
    """
    report = EvalReport(
        coverage=coverage(truth, est),
        hausdorff=hausdorff(truth, est),
        bias=bias(truth, est),
    )
    if fitted_mean is not None and truth_mean is not None:
        report.rmse_signal = rmse(truth_mean, fitted_mean)
    if fitted_mean is not None and observed is not None:
        report.rmse_fit = rmse(observed, fitted_mean)
    return report
