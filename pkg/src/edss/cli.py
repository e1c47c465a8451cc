"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numerical invariant violated.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .channels import ChannelKind, NoiseScenario
from .correlations import discord
from .protocols import (
    adversary_scan,
    build_alpha_initial,
    build_beta_resource,
    run_alpha,
    run_beta,
    run_ded,
    run_edss_via_zalm,
    zalm_map,
)
from .qstate import InvariantViolation, OutcomeUnobservable, partial_trace, random_density_matrix
from .sweeps import (
    PROTOCOLS,
    DeltaRecord,
    SweepRecord,
    probability_curves,
    sweep_grid_delta,
    sweep_multichannel_uniform,
    sweep_single_channel,
)

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4

COMMANDS = ("run", "discord", "adversary", "sweep", "grid", "probcurves", "zalm-check")
KINDS = [k.value for k in ChannelKind]
SWEEP_COLUMNS = ("p", "protocol", "negativity", "probability", "theta", "phi")
GRID_COLUMNS = ("p1", "p2", "p3", "delta_alpha_beta", "delta_alpha_ded", "delta_beta_ded")
PROBCURVE_COLUMNS = ("p", "protocol", "channel", "probability")
ADVERSARY_COLUMNS = ("protocol", "theta", "phi", "discord")
RUN_COLUMNS = ("protocol", "iteration", "negativity", "probability", "theta", "phi")


@dataclass
class RunConfig:
    command: str
    protocol: str = "alpha"
    model: str = "single"
    memory_noise: str | None = None
    carrier_noise: str | None = None
    p: float = 0.0
    p1: float | None = None
    p2: float | None = None
    p3: float | None = None
    iterations: int = 1
    allow_extended: bool = False
    measurement: str = "nominal"
    via_zalm: bool = False
    steps: int = 101
    theta_steps: int = 33
    phi_steps: int = 64
    mode: str = "postselect"
    protocols: list[str] = field(default_factory=lambda: list(PROTOCOLS))
    fix_basis: bool = False
    memory_reexposure: bool = False
    samples: int = 100
    seed: int = 0
    measured: str = "B"
    out: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    def scenario(self) -> NoiseScenario:
        if self.model == "single":
            if self.carrier_noise is None:
                return NoiseScenario.noiseless()
            return NoiseScenario.single(self.carrier_noise, self.p)
        p1 = self.p if self.p1 is None else self.p1
        p2 = self.p if self.p2 is None else self.p2
        p3 = self.p if self.p3 is None else self.p3
        return NoiseScenario.dissimilar(
            self.memory_noise, self.carrier_noise, p1, p2, p3, memory_reexposure=self.memory_reexposure
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edss", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def noise_args(sp, model_choices=("single", "multichannel")):
        sp.add_argument("--model", choices=model_choices, default=model_choices[0])
        sp.add_argument("--memory-noise", choices=KINDS)
        sp.add_argument("--carrier-noise", choices=KINDS)
        sp.add_argument("--memory-reexposure", action="store_true", help="memory noise before every beta iteration")

    def strengths(sp):
        sp.add_argument("--p", type=float, default=0.0)
        sp.add_argument("--p1", type=float)
        sp.add_argument("--p2", type=float)
        sp.add_argument("--p3", type=float)

    run = sub.add_parser("run", help="run one protocol")
    run.add_argument("--protocol", choices=("alpha", "beta", "ded"), default="alpha")
    run.add_argument("--iterations", type=int, default=1)
    run.add_argument("--allow-extended", action="store_true", help="permit more than 4 beta iterations")
    run.add_argument("--measurement", choices=("nominal", "optimal"), default="nominal")
    run.add_argument("--via-zalm", action="store_true", help="map the memory resource through the photon-spin interface first")
    noise_args(run)
    strengths(run)
    run.add_argument("--out")

    dis = sub.add_parser("discord", help="discord of a protocol's initial memory state")
    dis.add_argument("--protocol", choices=("alpha", "beta"), default="alpha")
    dis.add_argument("--measured", choices=("A", "B"), default="B")

    adv = sub.add_parser("adversary", help="discord left after an eavesdropper measures the carrier")
    adv.add_argument("--protocol", choices=("alpha", "beta"), default="alpha")
    adv.add_argument("--theta-steps", type=int, default=33)
    adv.add_argument("--phi-steps", type=int, default=64)
    adv.add_argument("--mode", choices=("postselect", "average"), default="postselect")
    adv.add_argument("--out", required=True)

    sw = sub.add_parser("sweep", help="negativity versus a single noise strength")
    sw.add_argument("--model", choices=("single", "uniform", "multichannel"), default="single")
    sw.add_argument("--memory-noise", choices=KINDS)
    sw.add_argument("--carrier-noise", choices=KINDS, required=True)
    sw.add_argument("--memory-reexposure", action="store_true")
    sw.add_argument("--steps", type=int, default=101)
    sw.add_argument("--protocols", default=",".join(PROTOCOLS))
    sw.add_argument("--fix-basis", action="store_true", help="use the nominal measurement instead of optimizing")
    sw.add_argument("--out", required=True)

    gr = sub.add_parser("grid", help="delta metrics over p1 x p2 at fixed carrier strength p3")
    gr.add_argument("--memory-noise", choices=KINDS, required=True)
    gr.add_argument("--carrier-noise", choices=KINDS, required=True)
    gr.add_argument("--p3", type=float, required=True)
    gr.add_argument("--steps", type=int, default=51)
    gr.add_argument("--fix-basis", action="store_true")
    gr.add_argument("--out", required=True)

    pc = sub.add_parser("probcurves", help="success probability of the nominal outcome versus carrier noise")
    pc.add_argument("--steps", type=int, default=101)
    pc.add_argument("--out", required=True)

    zc = sub.add_parser("zalm-check", help="randomized photon-to-spin transfer check")
    zc.add_argument("--samples", type=int, default=100)
    zc.add_argument("--seed", type=int, default=0)
    return parser


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    values = {k: v for k, v in vars(ns).items() if v is not None}
    if "protocols" in values:
        values["protocols"] = [s.strip() for s in values["protocols"].split(",") if s.strip()]
        bad = [s for s in values["protocols"] if s not in PROTOCOLS]
        if bad:
            parser.error(f"--protocols: unknown protocol(s) {', '.join(bad)}")
    if values.get("model") in ("uniform",):
        values["model"] = "multichannel"
    cfg = RunConfig(**values)

    for name in ("p", "p1", "p2", "p3"):
        v = getattr(cfg, name)
        if v is not None and not 0.0 <= v <= 1.0:
            parser.error(f"--{name}: {v} outside [0, 1]")
    for name in ("steps", "theta_steps", "phi_steps"):
        if getattr(cfg, name) < 2:
            parser.error(f"--{name.replace('_', '-')}: resolution must be >= 2")
    if cfg.iterations < 1 or (cfg.iterations > 4 and not cfg.allow_extended):
        parser.error(f"--iterations: {cfg.iterations} outside [1, 4] (use --allow-extended)")
    if cfg.samples < 1:
        parser.error("--samples: must be >= 1")
    if cfg.seed < 0 or cfg.seed >= 2**64:
        parser.error("--seed: must be an unsigned 64-bit integer")
    if cfg.command in ("run", "sweep") and cfg.model == "multichannel":
        if cfg.memory_noise is None or cfg.carrier_noise is None:
            parser.error("--memory-noise and --carrier-noise are required with --model multichannel")
    return cfg


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".12g")


def _rows(records) -> tuple[tuple[str, ...], list[list]]:
    first = records[0]
    if isinstance(first, SweepRecord):
        rows = [[r.p, r.protocol, r.negativity, r.success_probability, r.theta, r.phi] for r in records]
        return SWEEP_COLUMNS, rows
    if isinstance(first, DeltaRecord):
        rows = [[r.p1, r.p2, r.p3, r.delta_alpha_beta, r.delta_alpha_ded, r.delta_beta_ded] for r in records]
        return GRID_COLUMNS, rows
    columns = tuple(first)
    return columns, [[r[c] for c in columns] for r in records]


def emit_csv(records, path: str, config: RunConfig | None = None) -> None:
    """Write records as CSV with a leading '# {config json}' line.

    Records may be SweepRecords, DeltaRecords or dicts sharing the same keys.
    """
    if not records:
        raise ValueError("no records to write")
    columns, rows = _rows(records)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if config is not None:
            fh.write("# " + config.to_json() + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _run(cfg: RunConfig) -> int:
    scenario = cfg.scenario()
    if cfg.protocol == "ded":
        outcome = run_ded(scenario)
    elif cfg.via_zalm:
        outcome = run_edss_via_zalm(cfg.protocol, scenario, cfg.iterations, cfg.measurement)
    elif cfg.protocol == "alpha":
        outcome = run_alpha(scenario, cfg.measurement)
    else:
        outcome = run_beta(scenario, cfg.iterations, cfg.measurement)
    print(f"protocol: {cfg.protocol}")
    print(f"negativity A:B: {outcome.negativity_ab:.12g}")
    print(f"success probability: {outcome.success_probability:.12g}")
    if outcome.measurement is not None:
        print(f"measurement: theta={outcome.measurement.theta:.12g} phi={outcome.measurement.phi:.12g}")
    for i, (n, p) in enumerate(zip(outcome.iteration_negativities, outcome.iteration_probabilities), 1):
        if len(outcome.iteration_negativities) > 1:
            print(f"  iteration {i}: negativity={n:.12g} probability={p:.12g}")
    if outcome.carrier_negativity_trace:
        print(f"max K:AB negativity over all stages: {outcome.max_carrier_negativity():.3g}")
    if cfg.out:
        rows = []
        for i, (n, p) in enumerate(zip(outcome.iteration_negativities, outcome.iteration_probabilities), 1):
            m = outcome.iteration_measurements[i - 1] if outcome.iteration_measurements else None
            rows.append(
                dict(
                    protocol=cfg.protocol,
                    iteration=i,
                    negativity=n,
                    probability=p,
                    theta=m.theta if m else float("nan"),
                    phi=m.phi if m else float("nan"),
                )
            )
        emit_csv(rows, cfg.out, cfg)
    return 0


def _discord(cfg: RunConfig) -> int:
    if cfg.protocol == "alpha":
        state = partial_trace(build_alpha_initial(), ["A", "B"])
    else:
        state = build_beta_resource()
    res = discord(state, cfg.measured)
    m = res.optimal_measurement
    print(f"discord (measured {res.measured}): {res.value:.12g}")
    print(f"optimal measurement: theta={m.theta:.12g} phi={m.phi:.12g}")
    return 0


def _adversary(cfg: RunConfig) -> int:
    thetas = np.linspace(0.0, np.pi, cfg.theta_steps)
    phis = np.arange(cfg.phi_steps) * (2 * np.pi / cfg.phi_steps)
    grid = adversary_scan(cfg.protocol, thetas, phis, cfg.mode)
    rows = [
        dict(protocol=cfg.protocol, theta=t, phi=p, discord=grid[i, j])
        for i, t in enumerate(thetas)
        for j, p in enumerate(phis)
    ]
    emit_csv(rows, cfg.out, cfg)
    return 0


def _sweep(cfg: RunConfig) -> int:
    grid = np.linspace(0.0, 1.0, cfg.steps)
    measurement = "nominal" if cfg.fix_basis else "optimal"
    if cfg.model == "single":
        records = sweep_single_channel(cfg.carrier_noise, grid, cfg.protocols, measurement=measurement)
    else:
        records = sweep_multichannel_uniform(
            cfg.memory_noise,
            cfg.carrier_noise,
            grid,
            cfg.protocols,
            measurement=measurement,
            memory_reexposure=cfg.memory_reexposure,
        )
    emit_csv(records, cfg.out, cfg)
    return 0


def _grid(cfg: RunConfig) -> int:
    grid = np.linspace(0.0, 1.0, cfg.steps)
    measurement = "nominal" if cfg.fix_basis else "optimal"
    records = sweep_grid_delta(cfg.memory_noise, cfg.carrier_noise, grid, grid, cfg.p3, measurement=measurement)
    emit_csv(records, cfg.out, cfg)
    return 0


def _probcurves(cfg: RunConfig) -> int:
    grid = np.linspace(0.0, 1.0, cfg.steps)
    rows = []
    for protocol in ("alpha", "beta"):
        for kind in ("depolarizing", "dephasing", "amplitude-damping"):
            for p, prob in probability_curves(protocol, kind, grid):
                rows.append(dict(p=p, protocol=protocol, channel=kind, probability=prob))
    emit_csv(rows, cfg.out, cfg)
    return 0


def _zalm_check(cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    worst_error = 0.0
    worst_prob = 0.0
    for _ in range(cfg.samples):
        for report in zalm_map(random_density_matrix(rng, ("PA", "PB"))):
            worst_error = max(worst_error, report.transfer_error)
            worst_prob = max(worst_prob, abs(report.probability - 0.25))
    print(f"samples: {cfg.samples}")
    print(f"max transfer error: {worst_error:.3e}")
    print(f"max |outcome probability - 1/4|: {worst_prob:.3e}")
    if worst_error >= 1e-10 or worst_prob > 1e-12:
        print("transfer identity violated", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


HANDLERS = {
    "run": _run,
    "discord": _discord,
    "adversary": _adversary,
    "sweep": _sweep,
    "grid": _grid,
    "probcurves": _probcurves,
    "zalm-check": _zalm_check,
}


def main(argv: Sequence[str] | None = None) -> int:
    cfg = parse_args(argv)
    try:
        return HANDLERS[cfg.command](cfg)
    except OSError as exc:
        print(f"edss: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvariantViolation, OutcomeUnobservable) as exc:
        print(f"edss: numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"edss: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
