"""Shared oracle helpers for the test suite.

Every oracle here recomputes a quantity along an independent route: direct
summation instead of closed forms, quadrature instead of Gaussian algebra,
exhaustive enumeration instead of vectorized shortcuts. Tests compare the
library against these, never against itself.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp, roots_hermite

from oscseg import bayes_linear
from oscseg.fourier import DesignPair


def brute_force_ser(y, dp, prior_pi, sigma_sq, sigma0_sq):
    """Single effect posterior by per-candidate closed-form regression.

    Returns (alpha, means, covs) with alpha from prior-weighted marginal
    likelihoods normalized explicitly.
    """
    y = np.asarray(y, dtype=float).ravel()
    p = dp.sin_cols.shape[1]
    log_w = np.empty(p)
    means = np.empty((p, 2))
    covs = np.empty((p, 2, 2))
    for k in range(p):
        X = np.column_stack([dp.sin_cols[:, k], dp.cos_cols[:, k]])
        post = bayes_linear.posterior(y, X, sigma_sq, sigma0_sq)
        means[k] = post.mean
        covs[k] = post.covariance
        log_w[k] = np.log(prior_pi[k]) + bayes_linear.log_marginal(
            y, X, sigma_sq, sigma0_sq
        )
    alpha = np.exp(log_w - logsumexp(log_w))
    alpha /= alpha.sum()
    return alpha, means, covs


def gauss_hermite_log_marginal(y, X, sigma_sq, sigma0_sq, order=250):
    """2-D Gauss-Hermite quadrature of int N(y; Xb, s2 I) N(b; 0, s02 I) db.

    Substituting b = sqrt(2 s02) z turns the prior into the Hermite weight
    e^{-|z|^2} / pi; the sum over the tensor node grid is taken in log space.
    The order is high enough that the quadrature error sits well below the
    1e-6 comparison tolerance.
    """
    y = np.asarray(y, dtype=float).ravel()
    X = np.asarray(X, dtype=float)
    n = y.size
    nodes, weights = roots_hermite(order)
    scale = np.sqrt(2.0 * sigma0_sq)
    b1, b2 = np.meshgrid(nodes * scale, nodes * scale, indexing="ij")
    # Extreme-node weights underflow to zero; -inf entries drop out below.
    with np.errstate(divide="ignore"):
        lw = np.log(weights)
    log_w2 = lw[:, None] + lw[None, :] - np.log(np.pi)
    resid = y[None, None, :] - (
        b1[:, :, None] * X[:, 0][None, None, :]
        + b2[:, :, None] * X[:, 1][None, None, :]
    )
    log_lik = -0.5 * n * np.log(2.0 * np.pi * sigma_sq) - 0.5 * np.sum(
        resid**2, axis=2
    ) / sigma_sq
    return float(logsumexp(log_w2 + log_lik))


def direct_gram_sum(kind, theta1, theta2, n):
    """Trigonometric product sum over t = 1..n by explicit summation."""
    t = np.arange(1, n + 1, dtype=float)
    a = {"sin": np.sin, "cos": np.cos}
    left, right, share = kind.split("_")
    t2 = theta1 if share == "same" else theta2
    return float(np.sum(a[left](theta1 * t) * a[right](t2 * t)))


def dense_pair(y_len, freqs, u=0):
    """Explicit DesignPair over (u, u + y_len] for a raw frequency list."""
    freqs = np.asarray(freqs, dtype=float)
    t = np.arange(u + 1, u + y_len + 1, dtype=float)
    ang = 2.0 * np.pi * np.outer(t, freqs)
    return DesignPair(sin_cols=np.sin(ang), cos_cols=np.cos(ang), window=(u, u + y_len))


def _segments_of(cps, T):
    bounds = [0] + [int(c) for c in cps] + [T]
    return [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]


def oracle_coverage(truth_cps, est_cps, T):
    """Coverage by a double loop over segment pairs with explicit Jaccard."""
    total = 0.0
    for a_lo, a_hi in _segments_of(truth_cps, T):
        best = 0.0
        for b_lo, b_hi in _segments_of(est_cps, T):
            inter = max(0, min(a_hi, b_hi) - max(a_lo, b_lo))
            union = (a_hi - a_lo) + (b_hi - b_lo) - inter
            best = max(best, inter / union)
        total += (a_hi - a_lo) * best
    return total / T


def oracle_hausdorff(truth_cps, est_cps, T):
    """Boundary-set Hausdorff distance by a double loop."""
    a_pts = [0] + [int(c) for c in truth_cps] + [T]
    b_pts = [0] + [int(c) for c in est_cps] + [T]

    def directed(src, dst):
        return max(min(abs(a - b) for b in dst) for a in src)

    return max(directed(a_pts, b_pts), directed(b_pts, a_pts)) / T


def random_partition_cps(rng, T, max_m=5):
    """Random sorted distinct interior change points for oracle tests."""
    m = int(rng.integers(0, max_m + 1))
    if m == 0:
        return []
    cps = rng.choice(np.arange(1, T), size=min(m, T - 1), replace=False)
    return sorted(int(c) for c in cps)
