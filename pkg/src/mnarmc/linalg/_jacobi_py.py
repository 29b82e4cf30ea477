"""Pure-numpy one-sided Jacobi kernel.

Same contract as the compiled ``_jacobi.jacobi_sweeps``.  Rotations are
applied to disjoint column pairs simultaneously using a round-robin
(tournament) ordering, so every sweep touches each pair exactly once.
"""

import numpy as np


def _round_robin(n):
    """Pairings for one sweep over ``n`` indices; ``-1`` marks a bye."""
    players = list(range(n))
    if n % 2:
        players.append(-1)
    k = len(players)
    rounds = []
    for _ in range(k - 1):
        pairs = [(players[i], players[k - 1 - i]) for i in range(k // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a >= 0 and b >= 0]
        if pairs:
            rounds.append(np.array(pairs, dtype=np.intp).T)
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_sweeps(G, V, tol, floor, max_sweeps):
    n = G.shape[0]
    rounds = _round_robin(n)
    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for p, q in rounds:
            gp, gq = G[p], G[q]
            alpha = np.einsum("ij,ij->i", gp, gp)
            beta = np.einsum("ij,ij->i", gq, gq)
            gamma = np.einsum("ij,ij->i", gp, gq)
            act = np.abs(gamma) > tol * np.sqrt(alpha) * np.sqrt(beta)
            act &= (alpha > floor) & (beta > floor)
            if not act.any():
                continue
            rotated = True
            p, q = p[act], q[act]
            alpha, beta, gamma = alpha[act], beta[act], gamma[act]
            zeta = (beta - alpha) / (2.0 * gamma)
            with np.errstate(over="ignore", divide="ignore"):
                root = np.sqrt(1.0 + zeta * zeta)
                t = np.where(
                    np.abs(zeta) > 1e150,
                    0.5 / zeta,
                    np.sign(zeta + (zeta == 0)) / (np.abs(zeta) + root),
                )
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = (c * t)[:, None]
            c = c[:, None]
            gp, gq = G[p], G[q]
            G[p] = c * gp - s * gq
            G[q] = s * gp + c * gq
            vp, vq = V[p], V[q]
            V[p] = c * vp - s * vq
            V[q] = s * vp + c * vq
        if not rotated:
            return sweep
    return -1
