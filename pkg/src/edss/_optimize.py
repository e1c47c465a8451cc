"""Deterministic optimizer over the qubit Bloch sphere.

A fixed (theta, phi) grid followed by a compass pattern search that halves
its step whenever no neighbour improves.  No randomness, so results are
reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

Objective = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SphereOptimum:
    theta: float
    phi: float
    value: float
    grid_best: float
    evaluations: int


def sphere_grid(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    """theta in [0, pi] inclusive, phi in [0, 2 pi) exclusive, theta-major order."""
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.arange(n_phi) * (2 * np.pi / n_phi)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    return tt.ravel(), pp.ravel()


def optimize_on_sphere(
    objective: Objective,
    *,
    maximize: bool,
    n_theta: int = 64,
    n_phi: int = 128,
    step_tol: float = 1e-5,
    tie_tol: float = 1e-12,
    max_iter: int = 20000,
    polar_rings: int = 0,
) -> SphereOptimum:
    """Grid search then compass refinement.

    ``polar_rings`` adds that many log-spaced theta rings around each pole
    (after the regular grid, so ties still resolve to regular grid points).
    They catch optima squeezed against a pole, closer than one grid step.
    """
    sign = 1.0 if maximize else -1.0

    def f(t, p):
        return sign * np.asarray(objective(np.asarray(t, float), np.asarray(p, float)), float)

    tt, pp = sphere_grid(n_theta, n_phi)
    if polar_rings:
        rt, rp = polar_ring_points(polar_rings, n_phi, np.pi / max(n_theta - 1, 1))
        tt, pp = np.concatenate([tt, rt]), np.concatenate([pp, rp])
    vals = f(tt, pp)
    grid_best = float(vals.max())
    # first grid index within tie_tol of the best: smallest theta, then smallest phi
    idx = int(np.flatnonzero(vals >= grid_best - tie_tol)[0])
    theta, phi, best = float(tt[idx]), float(pp[idx]), float(vals[idx])
    evals = vals.size

    st = np.pi / max(n_theta - 1, 1)
    sp = 2 * np.pi / n_phi
    for _ in range(max_iter):
        if max(st, sp) < step_tol:
            break
        cand_t = np.clip(np.array([theta + st, theta - st, theta, theta]), 0.0, np.pi)
        cand_p = np.mod(np.array([phi, phi, phi + sp, phi - sp]), 2 * np.pi)
        cv = f(cand_t, cand_p)
        evals += 4
        j = int(np.argmax(cv))
        if cv[j] > best + tie_tol:
            theta, phi, best = float(cand_t[j]), float(cand_p[j]), float(cv[j])
        else:
            st /= 2
            sp /= 2
    return SphereOptimum(theta, phi, sign * best, sign * grid_best, evals)


def polar_ring_points(n_rings: int, n_phi: int, spacing: float) -> tuple[np.ndarray, np.ndarray]:
    """Rings at theta = spacing * 10^(-k/2), k = 1..n_rings, around both poles."""
    offsets = spacing * 10.0 ** (-0.5 * np.arange(1, n_rings + 1))
    thetas = np.concatenate([offsets, np.pi - offsets])
    phis = np.arange(n_phi) * (2 * np.pi / n_phi)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    return tt.ravel(), pp.ravel()


def bloch_kets(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Batch of kets cos(t/2)|0> + sin(t/2) e^{i p}|1>, shape (n, 2)."""
    thetas = np.atleast_1d(thetas)
    phis = np.atleast_1d(phis)
    return np.stack([np.cos(thetas / 2) + 0j, np.sin(thetas / 2) * np.exp(1j * phis)], axis=-1)
