"""Dense linear-algebra kernels: SVD, singular-value thresholding, norms.

The SVD is a one-sided Jacobi method.  Its inner loop lives in a compiled
extension (``_jacobi``); when that extension is unavailable, or when the
environment variable ``MNARMC_BACKEND=python`` is set, a vectorized numpy
implementation of the same rotations is used instead.
"""

import os
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BACKEND",
    "SvdConvergenceError",
    "SvdFactors",
    "as_dense",
    "clamp_entries",
    "nuclear_norm",
    "scaled_frobenius",
    "set_backend",
    "sv_hard_threshold",
    "sv_soft_threshold",
    "svd",
]

ZERO_SV_RTOL = 1e-12
MAX_SWEEPS = 60


def _load_backend(name=None):
    name = name or os.environ.get("MNARMC_BACKEND", "auto")
    if name not in ("auto", "compiled", "python"):
        raise ValueError(f"unknown backend {name!r}")
    if name in ("auto", "compiled"):
        try:
            from . import _jacobi
            return "compiled", _jacobi.jacobi_sweeps
        except ImportError:
            if name == "compiled":
                raise
    from . import _jacobi_py
    return "python", _jacobi_py.jacobi_sweeps


BACKEND, _sweeps = _load_backend()


def set_backend(name):
    """Switch the Jacobi kernel at runtime (``"compiled"`` or ``"python"``)."""
    global BACKEND, _sweeps
    BACKEND, _sweeps = _load_backend(name)
    return BACKEND


class SvdConvergenceError(RuntimeError):
    """Raised when the Jacobi iteration fails to converge."""


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``A = U @ diag(sigma) @ V.T`` with ``r = min(m, n)``."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    sweeps: int = 0

    def reconstruct(self, sigma=None):
        s = self.sigma if sigma is None else sigma
        return (self.U * s) @ self.V.T


def as_dense(A, name="matrix"):
    """Return ``A`` as a 2-D float64 array, rejecting NaN/Inf."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError(f"{name} contains non-finite entries")
    return A


def _complete_basis(U, keep):
    """Replace columns of ``U`` not in ``keep`` by an orthonormal completion."""
    m = U.shape[0]
    B = U[:, keep]
    out = U.copy()
    for j in np.flatnonzero(~keep):
        # standard basis vector with the largest component outside span(B)
        e = int(np.argmax(1.0 - np.einsum("ij,ij->i", B, B)))
        x = np.zeros(m)
        x[e] = 1.0
        for _ in range(2):
            x -= B @ (B.T @ x)
        x /= np.linalg.norm(x)
        out[:, j] = x
        B = np.column_stack([B, x])
    return out


def svd(A, warm_start=None):
    """Full thin singular value decomposition.

    Parameters
    ----------
    A : array_like, shape (m, n)
    warm_start : SvdFactors, optional
        Factors of a nearby matrix of the same shape.  Their right (or left,
        for wide ``A``) singular vectors pre-rotate ``A`` so that only a few
        Jacobi sweeps are needed.  Ignored when those vectors have drifted
        from orthonormality.

    Returns
    -------
    SvdFactors
        ``sigma`` sorted nonincreasing; values below ``1e-12 * sigma_max``
        (or below the rounding floor ``m * eps * ||A||_F``, if larger) are
        reported as exact zeros.
    """
    A = as_dense(A)
    wide = A.shape[0] < A.shape[1]
    if wide:
        A = A.T
    m, n = A.shape

    V0 = None
    if warm_start is not None:
        V0 = warm_start.U if wide else warm_start.V
        if V0.shape != (n, n):
            V0 = None
        elif np.abs(V0.T @ V0 - np.eye(n)).max() > 1e-10:
            V0 = None
    if V0 is None:
        G = np.array(A.T, order="C")
        Vt = np.eye(n)
    else:
        G = np.array((A @ V0).T, order="C")
        Vt = np.array(V0.T, order="C")

    eps = np.finfo(float).eps
    # columns this small are rounding residue; rotating them never converges
    floor = m * eps * np.linalg.norm(A)
    sweeps = _sweeps(G, Vt, m * eps, floor * floor, MAX_SWEEPS)
    if sweeps < 0:
        raise SvdConvergenceError(f"Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")

    sigma = np.sqrt(np.einsum("ij,ij->i", G, G))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    G = G[order]
    V = Vt[order].T
    smax = sigma[0]
    keep = sigma > max(ZERO_SV_RTOL * smax, floor)
    sigma = np.where(keep, sigma, 0.0)
    U = np.zeros((m, n))
    U[:, keep] = (G[keep] / sigma[keep, None]).T
    if not keep.all():
        U = _complete_basis(U, keep)

    if wide:
        U, V = V, U
    return SvdFactors(U=U, sigma=sigma, V=V, sweeps=sweeps)


def sv_hard_threshold(A, tau, factors=None):
    """Keep the singular components with ``sigma >= tau`` (ties retained)."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    F = factors if factors is not None else svd(A)
    return F.reconstruct(np.where(F.sigma >= tau, F.sigma, 0.0))


def sv_soft_threshold(A, tau, factors=None):
    """Proximal operator of ``tau * ||.||_*``: shrink every singular value by ``tau``."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    F = factors if factors is not None else svd(A)
    return F.reconstruct(np.maximum(F.sigma - tau, 0.0))


def clamp_entries(A, lo, hi):
    if lo > hi:
        raise ValueError("lo must not exceed hi")
    return np.clip(np.asarray(A, dtype=np.float64), lo, hi)


def nuclear_norm(A):
    return float(svd(A).sigma.sum())


def scaled_frobenius(A):
    """Root-mean-square of the entries, i.e. ``||A||_F / sqrt(mn)``."""
    A = as_dense(A)
    return float(np.sqrt(np.mean(A * A)))
