"""Acceptance gate.

Each test checks one criterion at its stated tolerance and prints a single
``[criterion N] PASS|FAIL ...`` line; the lines are repeated in the pytest
terminal summary.  Run with ``pytest tests/test_acceptance.py -v``.
"""

from __future__ import annotations

import os
import subprocess
import sys
import time

import numpy as np
import pytest

from edss.channels import NoiseScenario
from edss.correlations import negativity
from edss.protocols import (
    AB,
    CUT_A_BK,
    CUT_K_AB,
    adversary_scan,
    build_alpha_initial,
    build_beta_resource,
    distribution_bound_checks,
    run_alpha,
    run_beta,
    run_ded,
    zalm_map,
)
from edss.correlations import discord
from edss.qstate import X0, X1, Z0, Z1, fidelity_with_pure, partial_trace, random_density_matrix
from edss.sweeps import (
    ded_death_threshold,
    probability_curves,
    sweep_grid_delta,
    sweep_single_channel,
)

RESULTS: dict[int, str] = {}
PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)


def report(n: int, ok: bool, detail: str) -> None:
    line = f"[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def test_criterion_01_alpha_noiseless():
    out, dt = timed(run_alpha)
    p_err = abs(out.success_probability - 1 / 3)
    fid = fidelity_with_pure(out.final_state, PHI_PLUS)
    n_err = abs(out.negativity_ab - 0.5)
    ok = p_err <= 1e-12 and fid >= 1 - 1e-12 and n_err <= 1e-12 and dt < 1.0
    report(1, ok, f"p={out.success_probability:.15f} F={fid:.15f} N={out.negativity_ab:.15f} t={dt:.3f}s")


def test_criterion_02_beta_noiseless():
    out, dt = timed(run_beta, iterations=4)
    n_abk = negativity(out.transmissions[0].encoded, CUT_A_BK)
    n = np.array(out.iteration_negativities)
    p1 = out.iteration_probabilities[0]
    ok = (
        abs(n_abk - 1 / 16) <= 1e-12
        and abs(n[0] - 0.1) <= 1e-12
        and abs(p1 - 5 / 8) <= 1e-12
        and abs(n[1] - 0.143) <= 1e-3
        and bool(np.all(np.diff(n) > 0))
        and bool(np.all(n < 1 / 6))
        and dt < 5.0
    )
    report(2, ok, f"N_A:BK={n_abk:.15f} N_iter={np.round(n, 6).tolist()} p1={p1:.15f} t={dt:.3f}s")


def test_criterion_03_discord_golden_values():
    alpha_ab = partial_trace(build_alpha_initial(), AB)
    da, ta = timed(discord, alpha_ab, "B")
    db, tb = timed(discord, build_beta_resource(), "B")
    ok = abs(da.value - 0.126) <= 2e-3 and abs(db.value - 0.0613) <= 1e-3 and ta < 10 and tb < 10
    report(3, ok, f"D_alpha={da.value:.6f} ({ta:.2f}s) D_beta={db.value:.6f} ({tb:.2f}s)")


def test_criterion_04_carrier_separability():
    worst_a = run_alpha().max_carrier_negativity()
    worst_b = run_beta(iterations=4).max_carrier_negativity()
    stages = len(run_alpha().carrier_negativity_trace) + len(run_beta(iterations=4).carrier_negativity_trace)
    ok = worst_a <= 1e-12 and worst_b <= 1e-12
    report(4, ok, f"max N_K:AB alpha={worst_a:.2e} beta={worst_b:.2e} over {stages} stages")


def test_criterion_05_zalm_transfer():
    def check():
        rng = np.random.default_rng(2024)
        worst_p = worst_d = 0.0
        for _ in range(100):
            for r in zalm_map(random_density_matrix(rng, ("PA", "PB"))):
                worst_p = max(worst_p, abs(r.probability - 0.25))
                worst_d = max(worst_d, r.transfer_error)
        return worst_p, worst_d

    (worst_p, worst_d), dt = timed(check)
    ok = worst_p <= 1e-12 and worst_d < 1e-10 and dt < 10
    report(5, ok, f"max|p-1/4|={worst_p:.2e} max trace distance={worst_d:.2e} t={dt:.2f}s")


def test_criterion_06_probability_curves():
    p = np.linspace(0, 1, 101)
    forms = {
        ("alpha", "depolarizing"): 1 / 3 + 2 * p / 9,
        ("beta", "depolarizing"): 5 / 8 - p / 6,
        ("alpha", "dephasing"): np.full_like(p, 1 / 3),
        ("beta", "dephasing"): 5 / 8 - p / 8,
        ("alpha", "amplitude-damping"): 1 / 3 + p / 6,
        ("beta", "amplitude-damping"): 1 / 2 + np.sqrt(1 - p) / 8,
    }
    worst = 0.0
    for (protocol, kind), want in forms.items():
        got = np.array([q for _, q in probability_curves(protocol, kind, p)])
        worst = max(worst, float(np.abs(got - want).max()))
    report(6, worst <= 1e-9, f"max deviation over 6 curves x 101 points = {worst:.2e}")


def test_criterion_07_adversary():
    beta_x = adversary_scan("beta", [X0.theta, X1.theta], [X0.phi, X1.phi])
    beta_x = np.array([beta_x[0, 0], beta_x[1, 1]])
    beta_z = adversary_scan("beta", [Z0.theta, Z1.theta], [0.0])[:, 0]
    phis = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    alpha_eq = adversary_scan("alpha", [np.pi / 2], phis)[0]
    ok = (
        bool(np.all(beta_x < 1e-6))
        and bool(np.all(np.abs(beta_z - 0.0613) <= 1e-3))
        and bool(np.all(np.abs(alpha_eq - 0.126) <= 2e-3))
    )
    report(
        7,
        ok,
        f"beta x-basis D={beta_x.max():.1e}, z-basis D={beta_z.min():.6f}..{beta_z.max():.6f}, "
        f"alpha theta=pi/2 D={alpha_eq.min():.6f}..{alpha_eq.max():.6f} (16 phis)",
    )


EDSS = ("alpha", "beta-1", "beta-2", "beta-3", "beta-4")


def test_criterion_08_fig3_qualitative():
    details, ok = [], True
    # monotone non-increasing curves for every protocol/channel pair
    grid = np.linspace(0, 1, 21)
    for kind in ("depolarizing", "dephasing", "amplitude-damping"):
        recs = sweep_single_channel(kind, grid)
        for name in EDSS + ("ded",):
            n = np.array([r.negativity for r in recs if r.protocol == name])
            if np.any(np.diff(n) > 1e-9):
                ok = False
                details.append(f"{kind}/{name} not monotone")
    # EDSS entanglement at the first dead point of the DED curve
    for kind in ("dephasing", "amplitude-damping"):
        lo, hi = ded_death_threshold(kind, tol=1e-4)
        best = {p: max(r.negativity for r in sweep_single_channel(kind, [p], EDSS)) for p in (lo, hi)}
        details.append(
            f"{kind}: DED dies in [{lo:.5f}, {hi:.5f}], best EDSS N={best[hi]:.2e} at the dead end "
            f"({best[lo]:.2e} at the alive end)"
        )
        ok = ok and best[hi] > 1e-3
    report(8, ok, "; ".join(details))


def test_criterion_09_grid_sweeps():
    steps = np.linspace(0, 1, 51)
    t0 = time.perf_counter()
    low = sweep_grid_delta("dephasing", "depolarizing", steps, steps, p3=0.1)
    t_grid = time.perf_counter() - t0
    high = sweep_grid_delta("dephasing", "depolarizing", steps, steps, p3=0.4)
    (origin,) = sweep_grid_delta("dephasing", "depolarizing", [0.0], [0.0], p3=0.0)
    worst_delta = max(max(r.delta_alpha_ded, r.delta_beta_ded) for r in low + high)
    ded_low = [format(r.n_ded, ".12g") for r in low]
    ded_high = [format(r.n_ded, ".12g") for r in high]
    ok = (
        worst_delta <= 0.0
        and abs(origin.delta_alpha_beta + 0.4) <= 1e-12
        and ded_low == ded_high
        and t_grid < 600
    )
    report(
        9,
        ok,
        f"max delta_jDED={worst_delta:.1e}, delta_ab(0,0,0)={origin.delta_alpha_beta:.15f}, "
        f"DED columns identical={ded_low == ded_high}, 51x51 grid in {t_grid:.0f}s",
    )


def test_criterion_10_distribution_bound():
    rows, ok = [], True
    for name, outcome in (("alpha", run_alpha()), ("beta", run_beta(iterations=4))):
        for i, c in enumerate(distribution_bound_checks(outcome), 1):
            rows.append(f"{name}#{i}: E_dis={c.e_final - c.e_initial:.6f} D_comm={c.d_comm:.6f}")
            ok = ok and c.holds
    report(10, ok, "; ".join(rows))


def _cli(args, threads, out):
    env = dict(os.environ, EDSS_THREADS=str(threads))
    subprocess.run([sys.executable, "-m", "edss", *args, "--out", out], check=True, env=env, capture_output=True)
    with open(out, "rb") as fh:
        return fh.read()


def test_criterion_11_determinism(tmp_path):
    out = str(tmp_path / "o.csv")
    commands = [
        ["sweep", "--model", "single", "--carrier-noise", "amplitude-damping", "--steps", "11"],
        ["sweep", "--model", "uniform", "--memory-noise", "dephasing", "--carrier-noise", "depolarizing", "--steps", "6"],
        ["grid", "--memory-noise", "amplitude-damping", "--carrier-noise", "amplitude-damping", "--p3", "0.4", "--steps", "4"],
    ]
    same = []
    for args in commands:
        blobs = [_cli(args, t, out) for t in (1, 2, 1)]
        same.append(len(set(blobs)) == 1)
    report(11, all(same), f"byte-identical across EDSS_THREADS=1,2 and reruns: {same}")
