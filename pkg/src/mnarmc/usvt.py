"""Modified universal singular value thresholding.

The revealed values and the reveal mask are each denoised by hard
thresholding their singular values, and the entrywise ratio of the two
corrects for the value-dependent reveal probabilities.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import clamp_entries, sv_hard_threshold

__all__ = ["UsvtParams", "modified_usvt", "usvt_core", "usvt_threshold"]

ZERO_RATIO_GUARD = 1e-12


@dataclass(frozen=True)
class UsvtParams:
    """Tuning for :func:`modified_usvt`.

    eta : float
        Threshold slack in (0, 1); singular values at least
        ``(2 + eta) * sqrt(max(m, n))`` are kept.
    mask_clamp_nonneg : bool
        Clamp the denoised mask to [0, 1] (default) instead of [-1, 1].
        Negative entries would otherwise flip signs in the ratio.
    """

    eta: float = 0.02
    mask_clamp_nonneg: bool = True

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0, 1)")


def usvt_threshold(shape, eta):
    m, n = shape
    return (2.0 + eta) * np.sqrt(max(m, n))


def usvt_core(Z, eta, lo=-1.0, hi=1.0):
    """Hard-threshold ``Z`` at ``(2 + eta) * sqrt(max(m, n))`` and clamp to ``[lo, hi]``."""
    Z = np.asarray(Z, dtype=np.float64)
    return clamp_entries(sv_hard_threshold(Z, usvt_threshold(Z.shape, eta)), lo, hi)


def modified_usvt(obs, params=None):
    """Estimate the full matrix from an :class:`~mnarmc.obsmodel.ObservedMatrix`.

    Returns an array with every entry in [-1, 1].
    """
    params = params or UsvtParams()
    Y = np.where(obs.mask, obs.values, 0.0)
    P = obs.mask.astype(np.float64)
    Q_hat = usvt_core(Y, params.eta)
    R_hat = usvt_core(P, params.eta, lo=0.0 if params.mask_clamp_nonneg else -1.0)
    nonzero = np.abs(R_hat) > ZERO_RATIO_GUARD
    W = np.zeros_like(Q_hat)
    np.divide(Q_hat, R_hat, out=W, where=nonzero)
    return clamp_entries(W, -1.0, 1.0)
