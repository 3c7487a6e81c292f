"""Closed-form Bayesian linear regression with an isotropic Gaussian prior.

The model is y = X b + e with e ~ N(0, sigma_sq * I_n) and prior
b ~ N(0, sigma0_sq * I_q). Both the posterior over b and the marginal
likelihood of y are available in closed form; they serve as the kernel for
single-effect frequency selection and as the null-model scorer.

All linear algebra goes through a Cholesky factorization of the symmetric
positive-definite system X'X/sigma_sq + I/sigma0_sq, whose prior term bounds
the condition number away from singularity.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import InputError


class GaussianPosterior:
    """Multivariate Gaussian posterior over regression coefficients.

    Attributes
    ----------
    mean : np.ndarray
        Posterior mean, length q.
    covariance : np.ndarray
        Posterior covariance, q x q symmetric positive definite.
    """

    __slots__ = ("mean", "covariance")

    def __init__(self, mean: np.ndarray, covariance: np.ndarray) -> None:
        self.mean = mean
        self.covariance = covariance


def _validate(y: np.ndarray, X: np.ndarray, sigma_sq: float, sigma0_sq: float):
    y = np.asarray(y, dtype=float).ravel()
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise InputError("X must be n x q with n matching len(y)")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(X))):
        raise InputError("non-finite values in y or X")
    if not (sigma_sq > 0.0 and np.isfinite(sigma_sq)):
        raise InputError("sigma_sq must be a positive finite number")
    if not (sigma0_sq > 0.0 and np.isfinite(sigma0_sq)):
        raise InputError("sigma0_sq must be a positive finite number")
    return y, X


def _factor(X: np.ndarray, sigma_sq: float, sigma0_sq: float):
    q = X.shape[1]
    A = X.T @ X / sigma_sq + np.eye(q) / sigma0_sq
    return cho_factor(A, lower=True)


def posterior(
    y: np.ndarray, X: np.ndarray, sigma_sq: float, sigma0_sq: float
) -> GaussianPosterior:
    """Posterior over b given y.

    Sigma = (X'X/sigma_sq + I/sigma0_sq)^{-1} and mu = Sigma X'y / sigma_sq.

    Parameters
    ----------
    y : np.ndarray
        Observations, length n.
    X : np.ndarray
        Design, n x q.
    sigma_sq : float
        Noise variance.
    sigma0_sq : float
        Prior variance of each coefficient.

    Returns
    -------
    GaussianPosterior
    """
    y, X = _validate(y, X, sigma_sq, sigma0_sq)
    q = X.shape[1]
    c = _factor(X, sigma_sq, sigma0_sq)
    mean = cho_solve(c, X.T @ y / sigma_sq)
    cov = cho_solve(c, np.eye(q))
    cov = 0.5 * (cov + cov.T)
    return GaussianPosterior(mean=mean, covariance=cov)


def log_marginal(
    y: np.ndarray, X: np.ndarray, sigma_sq: float, sigma0_sq: float
) -> float:
    """Log marginal likelihood log p(y) = log int N(y; Xb, sigma_sq I) N(b; 0, sigma0_sq I) db.

    Evaluated through the exact Gaussian integral

        -(n/2) log(2 pi sigma_sq) - y'y/(2 sigma_sq)
        - (q/2) log(sigma0_sq) + (1/2) log|Sigma| + (1/2) mu' Sigma^{-1} mu

    with mu, Sigma the posterior moments. Valid for any q >= 1.

    Parameters
    ----------
    y, X, sigma_sq, sigma0_sq
        As in `posterior`.

    Returns
    -------
    float
    """
    y, X = _validate(y, X, sigma_sq, sigma0_sq)
    n, q = X.shape
    c = _factor(X, sigma_sq, sigma0_sq)
    b = X.T @ y / sigma_sq
    mu = cho_solve(c, b)
    # log|Sigma| = -log|A| with A the factored system matrix.
    log_det_sigma = -2.0 * float(np.sum(np.log(np.diag(c[0]))))
    return float(
        -0.5 * n * np.log(2.0 * np.pi * sigma_sq)
        - 0.5 * (y @ y) / sigma_sq
        - 0.5 * q * np.log(sigma0_sq)
        + 0.5 * log_det_sigma
        + 0.5 * (b @ mu)
    )


def log_marginal_null(y: np.ndarray, sigma_sq: float) -> float:
    """Log density of y under the zero-coefficient model N(y; 0, sigma_sq I)."""
    y = np.asarray(y, dtype=float).ravel()
    if not (sigma_sq > 0.0 and np.isfinite(sigma_sq)):
        raise InputError("sigma_sq must be a positive finite number")
    n = y.size
    return float(-0.5 * n * np.log(2.0 * np.pi * sigma_sq) - 0.5 * (y @ y) / sigma_sq)
