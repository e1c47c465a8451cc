"""Entropy, negativity and one-sided quantum discord."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ._optimize import bloch_kets, optimize_on_sphere
from .qstate import BlochProjector, DensityMatrix, partial_trace, partial_transpose

NEGATIVITY_CLAMP = 1e-12
BOUND_SLACK = 1e-6


@dataclass(frozen=True)
class Bipartition:
    left: frozenset[str]
    right: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))
        if not self.left or not self.right:
            raise ValueError("both sides of a bipartition must be non-empty")
        if self.left & self.right:
            raise ValueError(f"sides overlap on {sorted(self.left & self.right)}")

    @classmethod
    def parse(cls, text: str) -> "Bipartition":
        """'A:BK' -> ({A}, {B, K}); single-character labels only."""
        left, right = text.split(":")
        return cls(frozenset(left), frozenset(right))

    def check(self, rho: DensityMatrix) -> None:
        if self.left | self.right != set(rho.labels):
            raise ValueError(f"bipartition {self} does not cover layout {rho.labels}")

    def __str__(self):
        return "".join(sorted(self.left)) + ":" + "".join(sorted(self.right))


@dataclass(frozen=True)
class DiscordResult:
    value: float
    optimal_measurement: BlochProjector
    measured: str


def _entropy_from_eigenvalues(lam: np.ndarray) -> np.ndarray:
    lam = np.clip(lam, 0.0, None)
    safe = np.where(lam > 0, lam, 1.0)
    return -(lam * np.log2(safe)).sum(axis=-1)


def entropy(rho) -> float:
    """Von Neumann entropy in bits."""
    m = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    lam = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return float(max(_entropy_from_eigenvalues(lam), 0.0))


def negativity(rho: DensityMatrix, cut: Bipartition | Iterable[str]) -> float:
    """Sum of |negative eigenvalues| of the partial transpose across ``cut``."""
    if isinstance(cut, Bipartition):
        cut.check(rho)
        left = cut.left
    else:
        left = frozenset(cut)
    pt = partial_transpose(rho, sorted(left, key=rho.labels.index))
    lam = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    lam = np.where(np.abs(lam) < NEGATIVITY_CLAMP, 0.0, lam)
    n = float(np.sum(np.abs(lam) - lam) / 2)
    return 0.0 if n < NEGATIVITY_CLAMP else n


def _measured_blocks(rho: DensityMatrix, measured: str, other: list[str]) -> np.ndarray:
    """Reorder as (measured, others) and return R[k, :, l, :] = <k| rho |l>."""
    order = [measured] + other
    perm = [rho.index(l) for l in order]
    n = len(rho.dims)
    t = rho.data.reshape(rho.dims + rho.dims).transpose(perm + [n + p for p in perm])
    d = int(np.prod([rho.dims[p] for p in perm[1:]]))
    return t.reshape(2, d, 2, d)


def _conditional_entropy_batch(blocks: np.ndarray, kets: np.ndarray) -> np.ndarray:
    """Sum_i p_i S(rho_other|i) for the basis {psi, psi_perp} of every ket."""
    d = blocks.shape[1]
    w = (kets.conj()[:, :, None] * kets[:, None, :]).reshape(-1, 4)
    flat = blocks.transpose(0, 2, 1, 3).reshape(4, d * d)
    sigma = (w @ flat).reshape(-1, d, d)
    rest = blocks[0, :, 0, :] + blocks[1, :, 1, :]
    out = np.zeros(len(kets))
    for s in (sigma, rest[None] - sigma):
        lam = np.clip(np.linalg.eigvalsh(s), 0.0, None)
        p = lam.sum(axis=-1, keepdims=True)
        ratio = np.where(lam > 0, lam / np.where(p > 0, p, 1.0), 1.0)
        out += -(lam * np.log2(ratio)).sum(axis=-1)
    return out


def discord(
    rho: DensityMatrix,
    measured: str,
    other: Iterable[str] | None = None,
    *,
    n_theta: int = 64,
    n_phi: int = 128,
    step_tol: float = 1e-5,
) -> DiscordResult:
    """One-sided discord with a rank-1 projective measurement on qubit ``measured``.

    D = S(rho_measured) - S(rho) + min_{Pi} sum_i p_i S(rho_other | i).

    ``rho`` must have exactly two subsystems unless ``other`` names the
    labels forming the unmeasured party (they are then treated as one).
    """
    if other is None:
        if len(rho.labels) != 2:
            raise ValueError(f"discord needs a bipartite layout, got {rho.labels}; pass `other` to merge subsystems")
        other = [l for l in rho.labels if l != measured]
    other = sorted(other, key=rho.index)
    if measured in other or set(other) | {measured} != set(rho.labels):
        raise ValueError(f"{measured!r} and {other} do not split layout {rho.labels}")
    if rho.dims[rho.index(measured)] != 2:
        raise ValueError("the measured subsystem must be a qubit")

    blocks = _measured_blocks(rho, measured, list(other))
    base = entropy(partial_trace(rho, [measured])) - entropy(rho)
    opt = optimize_on_sphere(
        lambda t, p: _conditional_entropy_batch(blocks, bloch_kets(t, p)),
        maximize=False,
        n_theta=n_theta,
        n_phi=n_phi,
        step_tol=step_tol,
    )
    return DiscordResult(max(base + opt.value, 0.0), BlochProjector(opt.theta, opt.phi), measured)


def check_distribution_bound(e_initial: float, e_final: float, d_comm: float) -> bool:
    """True iff the distributed entanglement does not exceed the communicated discord."""
    for name, v in (("e_initial", e_initial), ("e_final", e_final), ("d_comm", d_comm)):
        if v < 0:
            raise ValueError(f"{name}={v} must be non-negative")
    return e_final - e_initial <= d_comm + BOUND_SLACK
