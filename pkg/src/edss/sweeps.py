"""Measurement optimization and noise sweeps over the three protocols."""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, Iterable, Sequence

import numpy as np

from ._optimize import bloch_kets, optimize_on_sphere
from .channels import CARRIER_KINDS, MEMORY_KINDS, ChannelKind, NoiseScenario
from .correlations import NEGATIVITY_CLAMP, _measured_blocks, negativity
from .protocols import CUT_A_B, run_alpha, run_beta, run_ded
from .qstate import X1, Z0, BlochProjector, DensityMatrix, OutcomeUnobservable, postselect

PROTOCOLS = ("alpha", "beta-1", "beta-2", "beta-3", "beta-4", "ded")
DEFAULT_STEPS = 101
DEFAULT_GRID_STEPS = 51
# outcomes rarer than this are not considered by the optimizer
MIN_OUTCOME_PROBABILITY = 1e-9
# strong noise pins the useful carrier outcome close to a pole
POLAR_RINGS = 8


@dataclass(frozen=True)
class MeasurementChoice:
    projector: BlochProjector
    outcome_index: int
    negativity: float
    probability: float
    grid_best: float


@dataclass(frozen=True)
class SweepRecord:
    p: float
    protocol: str
    negativity: float
    success_probability: float
    theta: float
    phi: float
    scenario: NoiseScenario


@dataclass(frozen=True)
class DeltaRecord:
    p1: float
    p2: float
    p3: float
    delta_alpha_beta: float
    delta_alpha_ded: float
    delta_beta_ded: float
    n_alpha: float
    n_beta: float
    n_ded: float


def worker_count(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("EDSS_THREADS")
    return max(1, int(env)) if env else 1


def _ordered_map(fn: Callable, items: Sequence, workers: int | None) -> list:
    n = worker_count(workers)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(n) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))


# --------------------------------------------------------------------------
# measurement optimization


def _pt_blocks(blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Partially transposed (on A) K-blocks flattened for a single GEMM, plus their traces."""
    pt = blocks.reshape(2, 2, 2, 2, 2, 2).transpose(0, 4, 2, 3, 1, 5).reshape(2, 4, 2, 4)
    flat = pt.transpose(0, 2, 1, 3).reshape(4, 16)
    traces = np.einsum("kala->kl", blocks).reshape(4)
    return flat, traces


def _postselected_negativity_batch(flat: np.ndarray, traces: np.ndarray, kets: np.ndarray) -> np.ndarray:
    # partial transposition is linear, so mix the transposed blocks directly
    w = (kets.conj()[:, :, None] * kets[:, None, :]).reshape(-1, 4)
    prob = (w @ traces).real
    ok = prob > MIN_OUTCOME_PROBABILITY
    pt = (w @ flat).reshape(-1, 4, 4) / np.where(ok, prob, 1.0)[:, None, None]
    lam = np.linalg.eigvalsh(pt)
    lam = np.where(np.abs(lam) < NEGATIVITY_CLAMP, 0.0, lam)
    neg = (np.abs(lam) - lam).sum(axis=-1) / 2
    return np.where(ok, neg, 0.0)


def outcome_index(proj: BlochProjector) -> int:
    """0 if ``proj`` is the first member of its basis (upper hemisphere, then
    smaller phi on the equator), else 1."""
    if abs(proj.theta - np.pi / 2) < 1e-12:
        return 0 if proj.phi < np.pi else 1
    return 0 if proj.theta < np.pi / 2 else 1


def optimize_measurement(
    rho_abk: DensityMatrix,
    *,
    n_theta: int = 64,
    n_phi: int = 128,
    step_tol: float = 1e-6,
) -> MeasurementChoice:
    """Rank-1 projective outcome on K that maximizes the post-selected A:B negativity.

    A flat all-zero landscape returns the projector theta = phi = 0.
    """
    if "K" not in rho_abk.labels:
        raise ValueError(f"no carrier K in layout {rho_abk.labels}")
    flat, traces = _pt_blocks(_measured_blocks(rho_abk, "K", ["A", "B"]))
    opt = optimize_on_sphere(
        lambda t, p: _postselected_negativity_batch(flat, traces, bloch_kets(t, p)),
        maximize=True,
        n_theta=n_theta,
        n_phi=n_phi,
        step_tol=step_tol,
        polar_rings=POLAR_RINGS,
    )
    proj = BlochProjector(opt.theta, opt.phi)
    try:
        final, prob = postselect(rho_abk, proj, "K")
        n = negativity(final, CUT_A_B)
    except OutcomeUnobservable as exc:
        prob, n = exc.probability, 0.0
    return MeasurementChoice(proj, outcome_index(proj), n, prob, opt.grid_best)


# --------------------------------------------------------------------------
# sweeps


def _default_grid(p_grid, steps=DEFAULT_STEPS):
    grid = np.linspace(0.0, 1.0, steps) if p_grid is None else np.asarray(p_grid, float)
    if grid.size and (grid.min() < 0 or grid.max() > 1):
        raise ValueError("noise strengths must lie in [0, 1]")
    return [float(p) for p in grid]


def _beta_depths(protocols: Iterable[str]) -> list[int]:
    depths = []
    for name in protocols:
        if name.startswith("beta"):
            depths.append(int(name.split("-")[1]) if "-" in name else 1)
    return depths


def _records_for(scenario: NoiseScenario, p: float, protocols: tuple[str, ...], measurement: str) -> list[SweepRecord]:
    results: dict[str, tuple[float, float, float, float]] = {}
    if "alpha" in protocols:
        try:
            o = run_alpha(scenario, measurement)
            results["alpha"] = (o.negativity_ab, o.success_probability, o.measurement.theta, o.measurement.phi)
        except OutcomeUnobservable:
            results["alpha"] = (0.0, 0.0, Z0.theta, Z0.phi)
    depths = _beta_depths(protocols)
    if depths:
        try:
            o = run_beta(scenario, max(depths), measurement)
            for n in depths:
                m = o.iteration_measurements[n - 1]
                prob = float(np.prod(o.iteration_probabilities[:n]))
                results[f"beta-{n}"] = (o.iteration_negativities[n - 1], prob, m.theta, m.phi)
        except OutcomeUnobservable:
            for n in depths:
                results[f"beta-{n}"] = (0.0, 0.0, X1.theta, X1.phi)
    if "ded" in protocols:
        o = run_ded(scenario)
        results["ded"] = (o.negativity_ab, 1.0, float("nan"), float("nan"))
    out = []
    for name in protocols:
        key = "beta-1" if name == "beta" else name
        n, prob, t, ph = results[key]
        out.append(SweepRecord(p, key, n, prob, t, ph, scenario))
    return out


def _single_point(p, kind, protocols, measurement):
    return _records_for(NoiseScenario.single(kind, p), p, protocols, measurement)


def _uniform_point(p, memory_kind, carrier_kind, protocols, measurement, reexposure):
    scenario = NoiseScenario.uniform(memory_kind, carrier_kind, p, memory_reexposure=reexposure)
    return _records_for(scenario, p, protocols, measurement)


def _check_protocols(protocols) -> tuple[str, ...]:
    protocols = tuple(protocols)
    for name in protocols:
        if name not in PROTOCOLS and name != "beta":
            raise ValueError(f"unknown protocol {name!r}; choose from {PROTOCOLS}")
    return protocols


def sweep_single_channel(
    kind,
    p_grid: Sequence[float] | None = None,
    protocols: Sequence[str] = PROTOCOLS,
    *,
    measurement: str = "optimal",
    workers: int | None = None,
) -> list[SweepRecord]:
    """Noise on the transmitted resource only: the EDSS carrier, or both DED qubits."""
    kind = ChannelKind.parse(kind)
    fn = partial(_single_point, kind=kind, protocols=_check_protocols(protocols), measurement=measurement)
    return [r for rows in _ordered_map(fn, _default_grid(p_grid), workers) for r in rows]


def sweep_multichannel_uniform(
    memory_kind,
    carrier_kind,
    p_grid: Sequence[float] | None = None,
    protocols: Sequence[str] = PROTOCOLS,
    *,
    measurement: str = "optimal",
    memory_reexposure: bool = False,
    workers: int | None = None,
) -> list[SweepRecord]:
    """Memories and carrier all noisy at the same strength p."""
    memory_kind = ChannelKind.parse(memory_kind)
    carrier_kind = ChannelKind.parse(carrier_kind)
    if memory_kind not in MEMORY_KINDS or carrier_kind not in CARRIER_KINDS:
        warnings.warn(f"memory {memory_kind.value} / carrier {carrier_kind.value} is not one of the studied combinations")
    fn = partial(
        _uniform_point,
        memory_kind=memory_kind,
        carrier_kind=carrier_kind,
        protocols=_check_protocols(protocols),
        measurement=measurement,
        reexposure=memory_reexposure,
    )
    return [r for rows in _ordered_map(fn, _default_grid(p_grid), workers) for r in rows]


def _delta_point(point, memory_kind, carrier_kind, measurement):
    p1, p2, p3 = point
    scenario = NoiseScenario.dissimilar(memory_kind, carrier_kind, p1, p2, p3)
    recs = {r.protocol: r.negativity for r in _records_for(scenario, p1, ("alpha", "beta-1", "ded"), measurement)}
    na, nb, nd = recs["alpha"], recs["beta-1"], recs["ded"]
    return DeltaRecord(p1, p2, p3, nb - na, min(0.0, na - nd), min(0.0, nb - nd), na, nb, nd)


def sweep_grid_delta(
    memory_kind,
    carrier_kind,
    p1_grid: Sequence[float] | None = None,
    p2_grid: Sequence[float] | None = None,
    p3: float = 0.1,
    *,
    measurement: str = "optimal",
    workers: int | None = None,
) -> list[DeltaRecord]:
    """Dissimilar strengths: p1 on A, p2 on B, p3 on the carrier; one beta iteration.

    Rows are ordered p1-major.
    """
    p1s = _default_grid(p1_grid, DEFAULT_GRID_STEPS)
    p2s = _default_grid(p2_grid, DEFAULT_GRID_STEPS)
    if not 0.0 <= p3 <= 1.0:
        raise ValueError(f"p3={p3} outside [0, 1]")
    points = [(a, b, float(p3)) for a in p1s for b in p2s]
    fn = partial(
        _delta_point,
        memory_kind=ChannelKind.parse(memory_kind),
        carrier_kind=ChannelKind.parse(carrier_kind),
        measurement=measurement,
    )
    return _ordered_map(fn, points, workers)


def probability_curves(protocol: str, kind, p_grid: Sequence[float] | None = None) -> list[tuple[float, float]]:
    """Success probability of the noiseless-optimal outcome (|0> for alpha,
    |x_1> for beta) with only the carrier noisy."""
    kind = ChannelKind.parse(kind)
    runner = {"alpha": run_alpha, "beta": run_beta}[protocol]
    return [(p, runner(NoiseScenario.single(kind, p)).success_probability) for p in _default_grid(p_grid)]


def ded_death_threshold(kind, *, model: str = "single", memory_kind=None, tol: float = 1e-4) -> tuple[float, float]:
    """Bracket (alive, dead) of the noise strength where DED negativity vanishes.

    Bisection on [0, 1]; the returned interval has width <= ``tol``.  If DED
    survives up to p = 1 exclusive, the bracket closes onto 1.
    """

    def alive(p):
        if model == "single":
            scenario = NoiseScenario.single(kind, p)
        else:
            scenario = NoiseScenario.uniform(memory_kind, kind, p)
        return run_ded(scenario).negativity_ab > 0.0

    lo, hi = 0.0, 1.0
    if alive(hi):
        return hi, hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if alive(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi
