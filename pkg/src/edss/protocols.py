"""End-to-end protocol runs: alpha (CNOT carrier), beta (CPHASE carrier), DED,
the eavesdropper scan and the photon-to-spin ZALM mapping."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .channels import NoiseScenario, apply_carrier_noise, apply_ded_noise, apply_memory_noise
from .correlations import Bipartition, check_distribution_bound, discord, negativity
from .qstate import (
    SIGMA_X,
    X0,
    X1,
    Z0,
    Z1,
    BlochProjector,
    DensityMatrix,
    OutcomeUnobservable,
    UnitaryGate,
    apply_unitary,
    bell_phi_plus,
    cnot,
    cphase,
    hadamard,
    ket,
    kron,
    partial_trace,
    postselect,
    tensor,
    trace_distance,
)

Measurement = Union[str, BlochProjector]

AB = ("A", "B")
ABK = ("A", "B", "K")
CUT_K_AB = Bipartition({"K"}, {"A", "B"})
CUT_A_BK = Bipartition({"A"}, {"B", "K"})
CUT_AK_B = Bipartition({"A", "K"}, {"B"})
CUT_A_B = Bipartition({"A"}, {"B"})

BETA_CARRIER_CX = -0.5
MAX_STUDIED_ITERATIONS = 4


@dataclass(frozen=True)
class Transmission:
    """Carrier state as it leaves Alice and as Bob has decoded it."""

    encoded: DensityMatrix
    decoded: DensityMatrix


@dataclass(frozen=True)
class ProtocolOutcome:
    final_state: DensityMatrix
    success_probability: float
    negativity_ab: float
    carrier_negativity_trace: tuple[tuple[str, float], ...]
    measurement: BlochProjector | None
    iteration_probabilities: tuple[float, ...] = ()
    iteration_negativities: tuple[float, ...] = ()
    iteration_measurements: tuple[BlochProjector, ...] = ()
    transmissions: tuple[Transmission, ...] = ()

    def max_carrier_negativity(self) -> float:
        return max((v for _, v in self.carrier_negativity_trace), default=0.0)


@dataclass(frozen=True)
class BoundCheck:
    e_initial: float
    e_final: float
    d_comm: float
    holds: bool


# --------------------------------------------------------------------------
# initial states


def _gamma(j: int) -> np.ndarray:
    return ket(1, np.exp(1j * j * np.pi / 2))


def build_alpha_initial() -> DensityMatrix:
    z = [ket(1, 0), ket(0, 1)]
    rho = np.zeros((8, 8), dtype=complex)
    for j in range(4):
        v = kron(_gamma(j), _gamma(-j), z[0])
        rho += np.outer(v, v.conj())
    for l in range(2):
        v = kron(z[l], z[l], z[1])
        rho += np.outer(v, v.conj())
    return DensityMatrix(rho / 6, ABK, (2, 2, 2))


def build_beta_resource() -> DensityMatrix:
    """The separable Bell-diagonal memory state shared before protocol beta."""
    terms = [
        (1.0, Z0, Z0),
        (1.0, Z1, Z1),
        (0.5, X0, X0),
        (0.5, X1, X1),
        (0.5, BlochProjector(np.pi / 2, np.pi / 2), BlochProjector(np.pi / 2, 3 * np.pi / 2)),
        (0.5, BlochProjector(np.pi / 2, 3 * np.pi / 2), BlochProjector(np.pi / 2, np.pi / 2)),
    ]
    rho = sum(w * np.kron(a.matrix, b.matrix) for w, a, b in terms) / 4
    return DensityMatrix(rho, AB, (2, 2))


def carrier_state(c_x: float, label: str = "K") -> DensityMatrix:
    if not -1.0 <= c_x <= 1.0:
        raise ValueError(f"c_x={c_x} outside [-1, 1]")
    return DensityMatrix((np.eye(2) + c_x * SIGMA_X) / 2, (label,), (2,))


def build_beta_initial(c_x: float = BETA_CARRIER_CX) -> DensityMatrix:
    return tensor(build_beta_resource(), carrier_state(c_x))


# --------------------------------------------------------------------------
# shared machinery


def _resolve_measurement(measurement: Measurement, nominal: BlochProjector, decoded: DensityMatrix) -> BlochProjector:
    if isinstance(measurement, BlochProjector):
        return measurement
    if measurement == "nominal":
        return nominal
    if measurement == "optimal":
        from .sweeps import optimize_measurement

        return optimize_measurement(decoded).projector
    raise ValueError(f"unknown measurement {measurement!r}; use 'nominal', 'optimal' or a BlochProjector")


def _apply_eve(rho: DensityMatrix, eve: UnitaryGate | None) -> DensityMatrix:
    if eve is None:
        return rho
    if eve.targets != ("K",):
        raise ValueError("eavesdropper rotation must act on the carrier K only")
    return apply_unitary(rho, eve)


def _transmit(state, encode, decode, scenario, eve, trace, prefix):
    """Encode, send K through its channel, decode; appends K:AB negativities."""
    encoded = apply_unitary(state, encode)
    trace.append((prefix + "encoded", negativity(encoded, CUT_K_AB)))
    noisy = apply_carrier_noise(_apply_eve(encoded, eve), scenario.carrier_channel())
    trace.append((prefix + "carrier-noise", negativity(noisy, CUT_K_AB)))
    decoded = apply_unitary(noisy, decode)
    trace.append((prefix + "decoded", negativity(decoded, CUT_K_AB)))
    return encoded, decoded


def _memory_noise(state: DensityMatrix, scenario: NoiseScenario) -> DensityMatrix:
    mem = scenario.memory_channels()
    if mem is None:
        return state
    return apply_memory_noise(state, *mem)


# --------------------------------------------------------------------------
# protocols


def run_alpha(
    noise: NoiseScenario | None = None,
    measurement: Measurement = "nominal",
    *,
    initial: DensityMatrix | None = None,
    eve: UnitaryGate | None = None,
) -> ProtocolOutcome:
    """CNOT(A->K), carrier channel, CNOT(B->K), post-select K.

    The nominal measurement is the computational outcome |0>.
    """
    noise = noise or NoiseScenario.noiseless()
    state = build_alpha_initial() if initial is None else initial
    trace = [("initial", negativity(state, CUT_K_AB))]
    state = _memory_noise(state, noise)
    if noise.memory_channels() is not None:
        trace.append(("memory-noise", negativity(state, CUT_K_AB)))
    encoded, decoded = _transmit(state, cnot("A", "K"), cnot("B", "K"), noise, eve, trace, "")
    proj = _resolve_measurement(measurement, Z0, decoded)
    final, prob = postselect(decoded, proj, "K")
    final.validate()
    n = negativity(final, CUT_A_B)
    return ProtocolOutcome(
        final_state=final,
        success_probability=prob,
        negativity_ab=n,
        carrier_negativity_trace=tuple(trace),
        measurement=proj,
        iteration_probabilities=(prob,),
        iteration_negativities=(n,),
        iteration_measurements=(proj,),
        transmissions=(Transmission(encoded, decoded),),
    )


def run_beta(
    noise: NoiseScenario | None = None,
    iterations: int = 1,
    measurement: Measurement = "nominal",
    *,
    c_x: float = BETA_CARRIER_CX,
    initial_ab: DensityMatrix | None = None,
    eve: UnitaryGate | None = None,
) -> ProtocolOutcome:
    """Iterated CPHASE protocol with a fresh carrier (I + c_x sigma_x)/2 each round.

    The nominal measurement is |x_1>.  ``success_probability`` is the product
    of the per-iteration probabilities.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if iterations > MAX_STUDIED_ITERATIONS:
        warnings.warn(f"{iterations} iterations of protocol beta exceed the studied range of {MAX_STUDIED_ITERATIONS}")
    noise = noise or NoiseScenario.noiseless()
    ab = build_beta_resource() if initial_ab is None else initial_ab
    trace: list[tuple[str, float]] = []
    probs, negs, projs, sends = [], [], [], []
    for i in range(iterations):
        prefix = f"iter{i + 1}:"
        state = tensor(ab, carrier_state(c_x))
        trace.append((prefix + "initial", negativity(state, CUT_K_AB)))
        if i == 0 or noise.memory_reexposure:
            if noise.memory_channels() is not None:
                state = _memory_noise(state, noise)
                trace.append((prefix + "memory-noise", negativity(state, CUT_K_AB)))
        encoded, decoded = _transmit(state, cphase("A", "K"), cphase("B", "K"), noise, eve, trace, prefix)
        proj = _resolve_measurement(measurement, X1, decoded)
        ab, prob = postselect(decoded, proj, "K")
        ab.validate()
        probs.append(prob)
        negs.append(negativity(ab, CUT_A_B))
        projs.append(proj)
        sends.append(Transmission(encoded, decoded))
    return ProtocolOutcome(
        final_state=ab,
        success_probability=float(np.prod(probs)),
        negativity_ab=negs[-1],
        carrier_negativity_trace=tuple(trace),
        measurement=projs[-1],
        iteration_probabilities=tuple(probs),
        iteration_negativities=tuple(negs),
        iteration_measurements=tuple(projs),
        transmissions=tuple(sends),
    )


def run_ded(noise: NoiseScenario | None = None) -> ProtocolOutcome:
    noise = noise or NoiseScenario.noiseless()
    final = apply_ded_noise(bell_phi_plus(), noise).validate()
    n = negativity(final, CUT_A_B)
    return ProtocolOutcome(final, 1.0, n, (), None, (1.0,), (n,))


def distribution_bound_checks(outcome: ProtocolOutcome, **discord_kw) -> list[BoundCheck]:
    """Per carrier transmission: entanglement gained across A:BK versus the
    discord of the sent carrier (measured on K, against AB)."""
    checks = []
    for t in outcome.transmissions:
        e_initial = negativity(t.encoded, CUT_AK_B)
        e_final = negativity(t.decoded, CUT_A_BK)
        d_comm = discord(t.encoded, "K", other=AB, **discord_kw).value
        checks.append(BoundCheck(e_initial, e_final, d_comm, check_distribution_bound(e_initial, e_final, d_comm)))
    return checks


# --------------------------------------------------------------------------
# eavesdropper


def eve_measurement_state(protocol: str, proj: BlochProjector, mode: str = "postselect") -> DensityMatrix:
    """AB state after Eve measures the freshly encoded carrier.

    ``mode="postselect"`` keeps the outcome ``proj``; ``mode="average"``
    mixes both outcomes of the basis (which leaves the AB marginal unchanged).
    """
    if protocol == "alpha":
        encoded = apply_unitary(build_alpha_initial(), cnot("A", "K"))
    elif protocol == "beta":
        encoded = apply_unitary(build_beta_initial(), cphase("A", "K"))
    else:
        raise ValueError(f"unknown protocol {protocol!r}")
    if mode == "postselect":
        return postselect(encoded, proj, "K")[0]
    if mode == "average":
        mixed = np.zeros((4, 4), dtype=complex)
        for outcome in (proj, proj.complement()):
            try:
                state, p = postselect(encoded, outcome, "K")
            except OutcomeUnobservable:
                continue
            mixed += p * state.data
        return DensityMatrix(mixed, AB, (2, 2))
    raise ValueError(f"unknown mode {mode!r}")


def adversary_scan(
    protocol: str,
    thetas: Sequence[float],
    phis: Sequence[float],
    mode: str = "postselect",
    **discord_kw,
) -> np.ndarray:
    """Discord D_{A|B} left after Eve's measurement, shape (len(thetas), len(phis)).

    Points where Eve's outcome cannot occur are NaN.
    """
    out = np.full((len(thetas), len(phis)), np.nan)
    for i, t in enumerate(thetas):
        for j, p in enumerate(phis):
            try:
                state = eve_measurement_state(protocol, BlochProjector(t, p), mode)
            except OutcomeUnobservable:
                continue
            out[i, j] = discord(state, "B", **discord_kw).value
    return out


# --------------------------------------------------------------------------
# ZALM photon-to-spin mapping

PHOTONS = ("PA", "PB")
# beam-splitter output modes (|a_H> +- i|a_V>)/sqrt(2), i.e. (I +- sigma_y)/2
A_PLUS = BlochProjector(np.pi / 2, np.pi / 2)
A_MINUS = BlochProjector(np.pi / 2, 3 * np.pi / 2)
ZALM_OUTCOMES = {"A+": A_PLUS, "A-": A_MINUS}
ZALM_PHASES = {"A+": -np.pi / 2, "A-": np.pi / 2}


@dataclass(frozen=True)
class ZalmMapReport:
    outcome: tuple[str, str]
    probability: float
    final_spin_state: DensityMatrix
    transfer_error: float


def photon_spin_gate(photon: str, spin: str) -> UnitaryGate:
    """Cavity-reflection gate in the basis (a_H, a_V) x (up, down), spin up = |0>.

    a_H picks up +1 / -1 for spin up / down, a_V a constant -1.
    """
    return UnitaryGate(np.diag([1, -1, -1, -1]), (photon, spin), "U_PJ")


def correction_unitary(outcome: str, spin: str) -> UnitaryGate:
    phase = ZALM_PHASES[outcome]
    return UnitaryGate(np.array([[0, 1], [np.exp(1j * phase), 0]]), (spin,), f"U^{outcome}")


def zalm_map(rho_photons: DensityMatrix) -> list[ZalmMapReport]:
    if rho_photons.dims != (2, 2):
        raise ValueError(f"expected a two-qubit photon state, got layout {rho_photons.layout}")
    photons = rho_photons.relabel(PHOTONS)
    spins = DensityMatrix.from_ket(kron(ket(1, 1), ket(1, 1)), AB)
    state = tensor(photons, spins)
    state = apply_unitary(state, photon_spin_gate("PA", "A"))
    state = apply_unitary(state, photon_spin_gate("PB", "B"))
    target = rho_photons.relabel(AB)
    reports = []
    for j, pj in ZALM_OUTCOMES.items():
        after_a, prob_a = postselect(state, pj, "PA")
        for k, pk in ZALM_OUTCOMES.items():
            spin, prob_b = postselect(after_a, pk, "PB")
            for gate in (hadamard("A"), hadamard("B"), correction_unitary(j, "A"), correction_unitary(k, "B")):
                spin = apply_unitary(spin, gate)
            reports.append(ZalmMapReport((j, k), prob_a * prob_b, spin, trace_distance(spin, target)))
    return reports


def zalm_transfer(rho_photons: DensityMatrix) -> DensityMatrix:
    """Spin state averaged over the four heralded outcomes."""
    reports = zalm_map(rho_photons)
    data = sum(r.probability * r.final_spin_state.data for r in reports)
    return DensityMatrix(data, AB, (2, 2))


def _zalm_alpha_initial() -> DensityMatrix:
    """Map each K-conditioned branch of the alpha state through ZALM.

    The K correlations are classical in the computational basis, so the
    source can prepare branch k with probability p_k and flag k to Alice.
    """
    rho = build_alpha_initial()
    blocks = rho.data.reshape(4, 2, 4, 2)
    if np.abs(blocks[:, 0, :, 1]).max() > 1e-14:
        raise ValueError("alpha initial state is not classical on K")
    data = np.zeros((8, 8), dtype=complex)
    for bit, proj in enumerate((Z0, Z1)):
        branch, p = postselect(rho, proj, "K")
        mapped = zalm_transfer(branch)
        data += p * np.kron(mapped.data, proj.matrix)
    return DensityMatrix(data, ABK, (2, 2, 2))


def run_edss_via_zalm(
    protocol: str,
    noise: NoiseScenario | None = None,
    iterations: int = 1,
    measurement: Measurement = "nominal",
) -> ProtocolOutcome:
    if protocol == "alpha":
        return run_alpha(noise, measurement, initial=_zalm_alpha_initial())
    if protocol == "beta":
        return run_beta(noise, iterations, measurement, initial_ab=zalm_transfer(build_beta_resource()))
    raise ValueError(f"unknown protocol {protocol!r}")
