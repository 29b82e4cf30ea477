"""Observation model: reveal masks driven by the true entry values, noise,
and the low-rank Uniform constructions used in the simulations.

Every random operation takes an integer seed and draws from its own
stream, keyed by ``(seed, stream tag)``.  Masks and noise generated from
the same seed are therefore independent, and every call is reproducible.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import as_dense

__all__ = [
    "Constant",
    "Identity",
    "ObservedMatrix",
    "Quadratic",
    "apply_missingness",
    "bernoulli_noise",
    "empirical_entry_distribution",
    "generate_uniform_low_rank",
    "parse_fspec",
    "rng_for",
    "simulate",
]

_STREAMS = {"low_rank": 1, "mask": 2, "noise": 3, "jitter": 4}


def rng_for(seed, stream):
    """Independent generator for ``stream`` under a 64-bit ``seed``."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, _STREAMS[stream]])))


@dataclass(frozen=True)
class ObservedMatrix:
    """Revealed values plus a boolean reveal mask (``True`` = revealed).

    Hidden positions of ``values`` are stored as 0.
    """

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        values = as_dense(self.values, "values")
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != values.shape:
            raise ValueError(f"mask shape {mask.shape} != values shape {values.shape}")
        values = np.where(mask, values, 0.0)
        if np.abs(values).max(initial=0.0) > 1.0:
            raise ValueError("revealed values must lie in [-1, 1]")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    @property
    def shape(self):
        return self.values.shape

    @property
    def n_revealed(self):
        return int(self.mask.sum())


# Missingness functions.  Any callable mapping an array in [-1, 1] to
# probabilities works; these are the ones used by the CLI.

@dataclass(frozen=True)
class Constant:
    c: float

    def __post_init__(self):
        if not 0.0 <= self.c <= 1.0:
            raise ValueError("constant reveal probability must be in [0, 1]")

    def __call__(self, x):
        return np.full(np.shape(x), float(self.c))

    def __str__(self):
        return f"const:{self.c:g}"


@dataclass(frozen=True)
class Quadratic:
    """``0.5 x^2 + 0.3``."""

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * x * x + 0.3

    def __str__(self):
        return "quad"


@dataclass(frozen=True)
class Identity:
    """``x`` clipped to [0, 1], for matrices with entries in [0, 1]."""

    def __call__(self, x):
        return np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)

    def __str__(self):
        return "identity"


def parse_fspec(spec):
    """Parse ``const:<c>``, ``quad`` or ``identity``."""
    spec = spec.strip()
    if spec == "quad":
        return Quadratic()
    if spec == "identity":
        return Identity()
    if spec.startswith("const:"):
        try:
            c = float(spec.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad constant in f-spec {spec!r}") from None
        return Constant(c)
    raise ValueError(f"unknown f-spec {spec!r}; expected const:<c>, quad or identity")


def generate_uniform_low_rank(n, r, shift_to_pm1, seed):
    """Random ``n x n`` matrix of rank ``r`` with Uniform marginals.

    Sums dyadic terms ``2^-i u_i v_i^T`` whose vectors have i.i.d.
    Bernoulli(1/sqrt 2) entries, so each ``u_i[j] v_i[k]`` is a fair bit,
    plus ``1 v^T`` with ``v`` Uniform[0, 2^-k] to fill in below the last
    bit.  Entries are then marginally Uniform[0, 1].  With
    ``shift_to_pm1`` the result is ``2 M - 1`` (Uniform[-1, 1]).

    ``r - 1`` dyadic terms are used in both cases.  The shift only changes
    the all-ones term (``1 (2v - 1)^T``), so the rank is ``r`` either way.
    """
    n = int(n)
    r = int(r)
    if n < 1:
        raise ValueError("n must be positive")
    if not 2 <= r <= 20:
        raise ValueError("rank must be between 2 and 20")
    rng = rng_for(seed, "low_rank")
    k = r - 1
    p = 1.0 / np.sqrt(2.0)
    M = np.zeros((n, n))
    for i in range(1, k + 1):
        u = (rng.random(n) < p).astype(np.float64)
        v = (rng.random(n) < p).astype(np.float64)
        M += 2.0**-i * np.outer(u, v)
    M += np.outer(np.ones(n), rng.uniform(0.0, 2.0**-k, n))
    if shift_to_pm1:
        M = 2.0 * M - 1.0
    return M


def apply_missingness(M, X, f, seed):
    """Reveal ``X[i, j]`` with probability ``f(M[i, j])``.

    The probability depends on the true entry ``M``, never on the noisy
    ``X``.
    """
    M = as_dense(M, "M")
    X = as_dense(X, "X")
    if M.shape != X.shape:
        raise ValueError(f"shape mismatch: M {M.shape} vs X {X.shape}")
    prob = np.asarray(f(M), dtype=np.float64)
    if prob.shape != M.shape or (prob < 0).any() or (prob > 1).any():
        raise ValueError("missingness function must map entries to [0, 1]")
    mask = rng_for(seed, "mask").random(M.shape) < prob
    return ObservedMatrix(values=np.where(mask, X, 0.0), mask=mask)


def bernoulli_noise(M, seed):
    """``X[i, j] = 1`` with probability ``M[i, j]``, else 0."""
    M = as_dense(M, "M")
    if (M < 0).any() or (M > 1).any():
        raise ValueError("Bernoulli noise needs entries in [0, 1]")
    return (rng_for(seed, "noise").random(M.shape) < M).astype(np.float64)


def empirical_entry_distribution(M, nbins):
    """Normalized histogram of the entries over ``nbins`` equal bins of [-1, 1].

    Returns ``(masses, edges)``.
    """
    if nbins < 1:
        raise ValueError("nbins must be >= 1")
    M = as_dense(M, "M")
    counts, edges = np.histogram(M.ravel(), bins=int(nbins), range=(-1.0, 1.0))
    return counts / M.size, edges


def simulate(n, rank, f, noise="none", seed=0):
    """Build one simulated instance.

    ``noise="none"`` gives Uniform[-1, 1] entries observed without noise;
    ``noise="bernoulli"`` gives Uniform[0, 1] entries with 0/1 observations.

    Returns ``(M, X, obs)``.
    """
    if noise == "none":
        M = generate_uniform_low_rank(n, rank, True, seed)
        X = M
    elif noise == "bernoulli":
        M = generate_uniform_low_rank(n, rank, False, seed)
        X = bernoulli_noise(M, seed)
    else:
        raise ValueError(f"unknown noise model {noise!r}")
    return M, X, apply_missingness(M, X, f, seed)
