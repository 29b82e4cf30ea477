"""Error and spectrum summaries."""

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .linalg import as_dense, svd
from .nucmin import SolverParams, modified_candes_recht
from .usvt import UsvtParams, modified_usvt

__all__ = ["EstimatorReport", "mse", "rank_energy_curve", "run_estimator", "seed_summary"]


def mse(M_hat, M):
    """Mean squared entrywise error of one realization."""
    M_hat = as_dense(M_hat, "estimate")
    M = as_dense(M, "truth")
    if M_hat.shape != M.shape:
        raise ValueError(f"shape mismatch: {M_hat.shape} vs {M.shape}")
    d = M_hat - M
    return float(np.mean(d * d))


def rank_energy_curve(A):
    """Fraction of squared singular-value mass in the top ``k`` components, k = 1..min(m, n)."""
    sigma = svd(A).sigma
    energy = sigma * sigma
    total = energy.sum()
    if total == 0:
        raise ValueError("energy curve undefined for the zero matrix")
    # rounding can push partial sums past 1; clip so the curve stays monotone
    curve = np.minimum(np.cumsum(energy) / total, 1.0)
    curve[-1] = 1.0
    return curve


@dataclass
class EstimatorReport:
    estimate: np.ndarray
    method: str
    wall_time_seconds: float
    mse: float | None = None
    params_echo: dict = field(default_factory=dict)
    diagnostics: dict | None = None

    def __post_init__(self):
        if self.method not in ("usvt", "candes_recht"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.mse is not None and not 0.0 <= self.mse <= 4.0:
            raise ValueError("mse must lie in [0, 4] for entries in [-1, 1]")

    def to_dict(self):
        out = {
            "method": self.method,
            "wall_time_seconds": self.wall_time_seconds,
            "params": self.params_echo,
            "shape": list(self.estimate.shape),
        }
        if self.mse is not None:
            out["mse"] = self.mse
        if self.diagnostics is not None:
            out["diagnostics"] = self.diagnostics
        return out


def run_estimator(method, obs, truth=None, usvt_params=None, solver_params=None):
    """Run one estimator and wrap the result in an :class:`EstimatorReport`."""
    t0 = time.perf_counter()
    diagnostics = None
    if method == "usvt":
        params = usvt_params or UsvtParams()
        estimate = modified_usvt(obs, params)
    elif method == "candes_recht":
        params = solver_params or SolverParams()
        estimate, diag = modified_candes_recht(obs, params)
        diagnostics = diag.to_dict()
    else:
        raise ValueError(f"unknown method {method!r}")
    elapsed = time.perf_counter() - t0
    return EstimatorReport(
        estimate=estimate,
        method=method,
        wall_time_seconds=elapsed,
        mse=None if truth is None else mse(estimate, truth),
        params_echo=asdict(params),
        diagnostics=diagnostics,
    )


def seed_summary(values):
    """Median, mean and range of a per-seed statistic."""
    v = np.asarray(values, dtype=np.float64)
    return {
        "n": int(v.size),
        "median": float(np.median(v)),
        "mean": float(v.mean()),
        "min": float(v.min()),
        "max": float(v.max()),
    }
