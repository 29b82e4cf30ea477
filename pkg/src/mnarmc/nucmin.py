"""Box-constrained nuclear-norm minimization (modified Candes-Recht).

Solves

    minimize ||A||_*  subject to  A[i, j] = x[i, j] on revealed entries,
                                  -1 <= A[i, j] <= 1 everywhere

with over-relaxed ADMM on the splitting ``||A||_* + 1_C(B)``, ``A = B``.
The A-step is singular-value soft-thresholding, the B-step is the
projection onto the feasible set C.  The penalty starts at ``rho`` and is
doubled or halved whenever the primal and dual residuals drift more than
``balance``-fold apart.  Each SVD is warm-started from the previous one.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import nuclear_norm, svd

__all__ = [
    "SolveDiagnostics",
    "SolverParams",
    "certify_solution",
    "modified_candes_recht",
    "project_feasible",
]


@dataclass(frozen=True)
class SolverParams:
    rho: float = 1.0
    tol: float = 1e-6
    max_iters: int = 5000
    over_relaxation: float = 1.6
    # residual balancing: rescale rho when one residual exceeds the other by this factor
    balance: float | None = 10.0

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not 1.0 <= self.over_relaxation <= 1.9:
            raise ValueError("over_relaxation must lie in [1, 1.9]")
        if self.balance is not None and self.balance <= 1:
            raise ValueError("balance must exceed 1")


@dataclass
class SolveDiagnostics:
    iterations: int
    primal_residual: float
    dual_residual: float
    converged: bool
    final_nuclear_norm: float
    # (iteration, primal, dual) for every iteration
    history: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "converged": self.converged,
            "final_nuclear_norm": self.final_nuclear_norm,
        }


def project_feasible(A, obs):
    """Euclidean projection onto ``{A : A = x on revealed, |A| <= 1}``."""
    A = np.asarray(A, dtype=np.float64)
    if A.shape != obs.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {obs.shape}")
    return np.where(obs.mask, obs.values, np.clip(A, -1.0, 1.0))


def modified_candes_recht(obs, params=None):
    """Approximate minimizer of the nuclear norm over the feasible set.

    Returns ``(estimate, diagnostics)``.  The estimate is always exactly
    feasible.  If the residuals do not fall below tolerance within
    ``max_iters``, the iterate with the smallest residual is returned and
    ``diagnostics.converged`` is False.
    """
    params = params or SolverParams()
    if obs.n_revealed == 0:
        raise ValueError("no revealed entries")
    rho, alpha = params.rho, params.over_relaxation
    scale = params.tol * (1.0 + np.linalg.norm(obs.values))

    B = np.zeros(obs.shape)
    U = np.zeros(obs.shape)
    factors = None
    history = []
    best = (np.inf, None, np.inf, np.inf)
    converged = False
    for it in range(1, params.max_iters + 1):
        factors = svd(B - U, warm_start=factors)
        A = factors.reconstruct(np.maximum(factors.sigma - 1.0 / rho, 0.0))
        A_relaxed = alpha * A + (1.0 - alpha) * B
        B_new = project_feasible(A_relaxed + U, obs)
        U += A_relaxed - B_new
        r = float(np.linalg.norm(A - B_new))
        s = float(rho * np.linalg.norm(B_new - B))
        B = B_new
        history.append((it, r, s))
        if params.balance is not None:
            if r > params.balance * s:
                rho *= 2.0
                U /= 2.0
            elif s > params.balance * r:
                rho /= 2.0
                U *= 2.0
        if max(r, s) < best[0]:
            best = (max(r, s), A, r, s)
        if r <= scale and s <= scale:
            converged = True
            break

    _, A, r, s = best
    estimate = project_feasible(A, obs)
    diag = SolveDiagnostics(
        iterations=it,
        primal_residual=r,
        dual_residual=s,
        converged=converged,
        final_nuclear_norm=nuclear_norm(estimate),
        history=history,
    )
    return estimate, diag


def certify_solution(M_hat, obs, reference):
    """Feasibility violation of ``M_hat`` and its nuclear-norm gap to a feasible ``reference``."""
    M_hat = np.asarray(M_hat, dtype=np.float64)
    eq = np.abs(M_hat - obs.values)[obs.mask]
    box = np.maximum(np.abs(M_hat) - 1.0, 0.0)
    violation = float(max(eq.max(initial=0.0), box.max(initial=0.0)))
    nuc_hat = nuclear_norm(M_hat)
    nuc_ref = nuclear_norm(reference)
    return {
        "violation": violation,
        "nuclear_norm": nuc_hat,
        "reference_nuclear_norm": nuc_ref,
        "gap": nuc_hat - nuc_ref,
    }
