"""Estimate the reveal-probability function from a completed matrix.

Entries are binned by their estimated value on a randomly jittered grid of
``2b + 2`` intervals covering ``[-1 - 1/b, 1 + 1/b]``; the estimate on each
interval is the fraction of its entries that were revealed.
"""

from dataclasses import dataclass

import numpy as np

from .obsmodel import rng_for

__all__ = ["PiecewiseConstantFn", "estimate_f", "evaluate_piecewise", "integrated_sq_error"]


@dataclass(frozen=True)
class PiecewiseConstantFn:
    """Step function on ``[breakpoints[0], breakpoints[-1]]``.

    ``values[l]`` applies on ``[breakpoints[l], breakpoints[l + 1])``; the
    last interval also includes its right endpoint.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.breakpoints, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if a.ndim != 1 or v.ndim != 1 or a.size != v.size + 1 or v.size < 1:
            raise ValueError("need len(breakpoints) == len(values) + 1 >= 2")
        if not (np.diff(a) > 0).all():
            raise ValueError("breakpoints must be strictly increasing")
        if a[0] > -1.0 or a[-1] < 1.0:
            raise ValueError("breakpoints must cover [-1, 1]")
        if (v < 0).any() or (v > 1).any():
            raise ValueError("values must lie in [0, 1]")
        object.__setattr__(self, "breakpoints", a)
        object.__setattr__(self, "values", v)

    @property
    def n_intervals(self):
        return self.values.size

    def bin_index(self, x):
        x = np.asarray(x, dtype=np.float64)
        a = self.breakpoints
        if (x < a[0]).any() or (x > a[-1]).any():
            raise ValueError(f"argument outside coverage [{a[0]}, {a[-1]}]")
        idx = np.searchsorted(a, x, side="right") - 1
        return np.minimum(idx, self.n_intervals - 1)

    def __call__(self, x):
        return self.values[self.bin_index(x)]


def evaluate_piecewise(fhat, x):
    out = fhat(x)
    return float(out) if np.ndim(out) == 0 else out


def estimate_f(mask, M_hat, b, seed):
    """Randomized-bin estimate of the reveal function.

    Parameters
    ----------
    mask : array of bool, shape (m, n)
        Reveal pattern.
    M_hat : array, shape (m, n)
        Estimate of the true matrix, entries in [-1, 1].
    b : int
        Resolution; the grid has ``2b + 2`` intervals of width about ``1/b``.
    seed : int
        Seeds the breakpoint jitter.
    """
    b = int(b)
    if b < 1:
        raise ValueError("b must be a positive integer")
    mask = np.asarray(mask, dtype=bool)
    M_hat = np.asarray(M_hat, dtype=np.float64)
    if mask.shape != M_hat.shape:
        raise ValueError("mask and estimate must have the same shape")
    if np.abs(M_hat).max(initial=0.0) > 1.0:
        raise ValueError("estimate entries must lie in [-1, 1]")

    centers = -1.0 + (np.arange(1, 2 * b + 4) - 2.0) / b
    half = 1.0 / (4.0 * b)
    a = centers + rng_for(seed, "jitter").uniform(-half, half, centers.size)

    nbins = 2 * b + 2
    idx = np.minimum(np.searchsorted(a, M_hat.ravel(), side="right") - 1, nbins - 1)
    total = np.bincount(idx, minlength=nbins)
    revealed = np.bincount(idx, weights=mask.ravel().astype(np.float64), minlength=nbins)
    values = np.zeros(nbins)
    np.divide(revealed, total, out=values, where=total > 0)
    return PiecewiseConstantFn(breakpoints=a, values=values)


def integrated_sq_error(fhat, f_true, M):
    """Mean of ``(fhat(m) - f(m))^2`` over the entries ``m`` of ``M``."""
    M = np.asarray(M, dtype=np.float64)
    diff = fhat(M) - np.asarray(f_true(M), dtype=np.float64)
    return float(np.mean(diff * diff))
