"""Dense density-matrix algebra over labelled subsystems.

States carry an ordered layout of ``(label, dimension)`` pairs.  All
embeddings (gates on a subset of subsystems, partial traces, partial
transposes) are done by reshaping the matrix into one axis per subsystem
and contracting, so nothing here assumes qubits except where a qubit
projector is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

TRACE_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = -1e-10
UNITARY_TOL = 1e-12
MIN_PROBABILITY = 1e-14


class InvariantViolation(ArithmeticError):
    """A state or operator broke one of its numerical invariants."""


class OutcomeUnobservable(ValueError):
    """A post-selected outcome has (numerically) zero probability."""

    def __init__(self, probability: float):
        super().__init__(f"outcome probability {probability:.3e} is below {MIN_PROBABILITY:g}")
        self.probability = probability


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    data: np.ndarray
    labels: tuple[str, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if len(self.labels) != len(self.dims):
            raise ValueError("labels and dims differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate labels in {self.labels}")
        n = int(np.prod(self.dims))
        if data.shape != (n, n):
            raise ValueError(f"matrix shape {data.shape} does not match layout dims {self.dims}")

    @classmethod
    def from_ket(cls, ket: Sequence[complex], labels: Sequence[str], dims: Sequence[int] | None = None):
        ket = np.asarray(ket, dtype=complex)
        if dims is None:
            dims = (2,) * len(labels)
        return cls(np.outer(ket, ket.conj()), tuple(labels), tuple(dims))

    @classmethod
    def maximally_mixed(cls, labels: Sequence[str], dims: Sequence[int] | None = None):
        if dims is None:
            dims = (2,) * len(labels)
        n = int(np.prod(dims))
        return cls(np.eye(n) / n, tuple(labels), tuple(dims))

    @property
    def layout(self) -> list[tuple[str, int]]:
        return list(zip(self.labels, self.dims))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(_hermitian_part(self.data))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown subsystem label {label!r}; layout is {self.labels}") from None

    def relabel(self, labels: Sequence[str]) -> "DensityMatrix":
        return DensityMatrix(self.data, tuple(labels), self.dims)

    def validate(self) -> "DensityMatrix":
        """Raise InvariantViolation unless this is a unit-trace, Hermitian, PSD matrix."""
        tr = np.trace(self.data)
        if abs(tr - 1) > TRACE_TOL:
            raise InvariantViolation(f"trace is {tr}, expected 1")
        herm = np.abs(self.data - self.data.conj().T).max()
        if herm > HERMITIAN_TOL:
            raise InvariantViolation(f"not Hermitian (max deviation {herm:.2e})")
        lam = self.eigenvalues().min()
        if lam < PSD_TOL:
            raise InvariantViolation(f"not positive semidefinite (min eigenvalue {lam:.2e})")
        return self

    def allclose(self, other: "DensityMatrix", atol: float = 1e-12) -> bool:
        return self.labels == other.labels and self.dims == other.dims and np.allclose(
            self.data, other.data, rtol=0, atol=atol
        )

    def __repr__(self):
        layout = ", ".join(f"{l}:{d}" for l, d in self.layout)
        return f"DensityMatrix([{layout}])"


@dataclass(frozen=True, eq=False)
class UnitaryGate:
    data: np.ndarray
    targets: tuple[str, ...]
    name: str = field(default="U")

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "targets", tuple(self.targets))
        dev = np.abs(data.conj().T @ data - np.eye(data.shape[0])).max()
        if dev > UNITARY_TOL:
            raise ValueError(f"{self.name} is not unitary (max |U^dag U - I| = {dev:.2e})")

    @property
    def dagger(self) -> "UnitaryGate":
        return UnitaryGate(self.data.conj().T, self.targets, self.name + "^dag")


@dataclass(frozen=True)
class BlochProjector:
    """Rank-1 qubit projector onto cos(theta/2)|0> + sin(theta/2) e^{i phi} |1>."""

    theta: float
    phi: float

    def __post_init__(self):
        if not -1e-12 <= self.theta <= np.pi + 1e-12:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        object.__setattr__(self, "theta", float(min(max(self.theta, 0.0), np.pi)))
        object.__setattr__(self, "phi", float(np.mod(self.phi, 2 * np.pi)))

    @property
    def ket(self) -> np.ndarray:
        return np.array([np.cos(self.theta / 2), np.sin(self.theta / 2) * np.exp(1j * self.phi)])

    @property
    def matrix(self) -> np.ndarray:
        v = self.ket
        return np.outer(v, v.conj())

    def complement(self) -> "BlochProjector":
        """The orthogonal outcome of the same basis (antipodal Bloch vector)."""
        return BlochProjector(np.pi - self.theta, self.phi + np.pi)

    def bloch_vector(self) -> np.ndarray:
        t, p = self.theta, self.phi
        return np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])


# Computational and Pauli eigenbasis projectors.  |k_j> has eigenvalue (-1)^j.
Z0 = BlochProjector(0.0, 0.0)
Z1 = BlochProjector(np.pi, 0.0)
X0 = BlochProjector(np.pi / 2, 0.0)
X1 = BlochProjector(np.pi / 2, np.pi)
Y0 = BlochProjector(np.pi / 2, np.pi / 2)
Y1 = BlochProjector(np.pi / 2, 3 * np.pi / 2)

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def ket(*amplitudes) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex)
    return v / np.linalg.norm(v)


def kron(*ops) -> np.ndarray:
    return reduce(np.kron, ops)


def bell_phi_plus(labels: Sequence[str] = ("A", "B")) -> DensityMatrix:
    return DensityMatrix.from_ket(ket(1, 0, 0, 1), labels)


def cnot(control: str, target: str) -> UnitaryGate:
    p0, p1 = np.diag([1, 0]), np.diag([0, 1])
    return UnitaryGate(np.kron(p0, I2) + np.kron(p1, SIGMA_X), (control, target), "CNOT")


def cphase(a: str, b: str) -> UnitaryGate:
    return UnitaryGate(np.diag([1, 1, 1, -1]), (a, b), "CPHASE")


def hadamard(target: str) -> UnitaryGate:
    return UnitaryGate(HADAMARD, (target,), "H")


def pauli(axis: str, target: str) -> UnitaryGate:
    mat = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}[axis.lower()]
    return UnitaryGate(mat, (target,), "sigma_" + axis.lower())


def _hermitian_part(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def _axes(rho: DensityMatrix, labels: Iterable[str]) -> list[int]:
    return [rho.index(l) for l in labels]


def _apply_operator(rho: DensityMatrix, op: np.ndarray, targets: Sequence[str]) -> np.ndarray:
    """Return op rho op^dag with op acting on ``targets`` (identity elsewhere)."""
    axes = _axes(rho, targets)
    tdims = [rho.dims[a] for a in axes]
    k = len(axes)
    n = len(rho.dims)
    if op.shape != (int(np.prod(tdims)),) * 2:
        raise ValueError(f"operator of shape {op.shape} does not fit subsystems {tuple(targets)} with dims {tdims}")
    t = rho.data.reshape(rho.dims + rho.dims)
    opt = op.reshape(tdims + tdims)
    # left multiply on the row axes
    t = np.tensordot(opt, t, axes=(list(range(k, 2 * k)), axes))
    t = np.moveaxis(t, list(range(k)), axes)
    # right multiply by op^dag on the column axes
    col_axes = [n + a for a in axes]
    t = np.tensordot(t, opt.conj(), axes=(col_axes, list(range(k, 2 * k))))
    t = np.moveaxis(t, list(range(2 * n - k, 2 * n)), col_axes)
    return t.reshape(rho.data.shape)


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(np.kron(a.data, b.data), a.labels + b.labels, a.dims + b.dims)


def partial_trace(rho: DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    keep = set(keep)
    if not keep:
        raise ValueError("must keep at least one subsystem")
    unknown = keep - set(rho.labels)
    if unknown:
        raise KeyError(f"unknown subsystem labels {sorted(unknown)}; layout is {rho.labels}")
    n = len(rho.dims)
    kept = [i for i, l in enumerate(rho.labels) if l in keep]
    traced = [i for i in range(n) if i not in kept]
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for i in traced:
        cols[i] = rows[i]
    out = "".join(rows[i] for i in kept) + "".join(cols[i] for i in kept)
    t = np.einsum("".join(rows) + "".join(cols) + "->" + out, rho.data.reshape(rho.dims + rho.dims))
    dims = tuple(rho.dims[i] for i in kept)
    d = int(np.prod(dims))
    return DensityMatrix(t.reshape(d, d), tuple(rho.labels[i] for i in kept), dims)


def partial_transpose(rho: DensityMatrix, subset: Iterable[str]) -> np.ndarray:
    axes = _axes(rho, subset)
    n = len(rho.dims)
    perm = list(range(2 * n))
    for a in axes:
        perm[a], perm[a + n] = perm[a + n], perm[a]
    return rho.data.reshape(rho.dims + rho.dims).transpose(perm).reshape(rho.data.shape)


def apply_unitary(rho: DensityMatrix, gate: UnitaryGate) -> DensityMatrix:
    return DensityMatrix(_apply_operator(rho, gate.data, gate.targets), rho.labels, rho.dims)


def apply_kraus(rho: DensityMatrix, operators: Sequence[np.ndarray], targets: Sequence[str]) -> DensityMatrix:
    """Sum_j M_j rho M_j^dag with each M_j acting on ``targets``."""
    out = sum(_apply_operator(rho, np.asarray(m, dtype=complex), targets) for m in operators)
    return DensityMatrix(out, rho.labels, rho.dims)


def apply_channel(rho: DensityMatrix, ch, target: str) -> DensityMatrix:
    """Apply a single-subsystem Kraus channel (anything with ``.operators``)."""
    ops = [np.asarray(m, dtype=complex) for m in ch.operators]
    completeness = sum(m.conj().T @ m for m in ops)
    dev = np.abs(completeness - np.eye(completeness.shape[0])).max()
    if dev > 1e-10:
        raise ValueError(f"Kraus set is not trace preserving (max |sum M^dag M - I| = {dev:.2e})")
    return apply_kraus(rho, ops, (target,))


def measure_probability(rho: DensityMatrix, proj: BlochProjector, target: str) -> float:
    i = rho.index(target)
    if rho.dims[i] != 2:
        raise ValueError(f"subsystem {target!r} has dimension {rho.dims[i]}, expected a qubit")
    marginal = partial_trace(rho, [target]).data
    return float(np.real(np.trace(proj.matrix @ marginal)))


def postselect(rho: DensityMatrix, proj: BlochProjector, target: str) -> tuple[DensityMatrix, float]:
    """Condition on outcome ``proj`` of the qubit ``target``.

    Returns the normalized state of the remaining subsystems and the outcome
    probability Tr[(I x proj) rho].
    """
    i = rho.index(target)
    if rho.dims[i] != 2:
        raise ValueError(f"subsystem {target!r} has dimension {rho.dims[i]}, expected a qubit")
    if len(rho.labels) == 1:
        raise ValueError("cannot post-select the only subsystem")
    v = proj.ket
    t = rho.data.reshape(rho.dims + rho.dims)
    n = len(rho.dims)
    # <v|_target rho |v>_target
    t = np.tensordot(v.conj(), t, axes=([0], [i]))
    t = np.tensordot(t, v, axes=([n - 1 + i], [0]))
    rest = [l for l in rho.labels if l != target]
    dims = tuple(d for j, d in enumerate(rho.dims) if j != i)
    d = int(np.prod(dims))
    m = t.reshape(d, d)
    prob = float(np.trace(m).real)
    if prob < MIN_PROBABILITY:
        raise OutcomeUnobservable(prob)
    return DensityMatrix(_hermitian_part(m) / prob, tuple(rest), dims), prob


def trace_distance(a: DensityMatrix | np.ndarray, b: DensityMatrix | np.ndarray) -> float:
    da = a.data if isinstance(a, DensityMatrix) else a
    db = b.data if isinstance(b, DensityMatrix) else b
    return float(0.5 * np.abs(np.linalg.eigvalsh(_hermitian_part(da - db))).sum())


def fidelity_with_pure(rho: DensityMatrix, psi: np.ndarray) -> float:
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(psi.conj() @ rho.data @ psi))


def random_density_matrix(rng: np.random.Generator, labels: Sequence[str] = ("A", "B"), n_pure: int = 4) -> DensityMatrix:
    """Seeded random mixed state.

    Construction: ``n_pure`` pure states, each a normalized vector of i.i.d.
    standard complex Gaussians (Haar-distributed), mixed with weights drawn
    from a flat Dirichlet distribution.  Draw order: for each pure state the
    real parts then the imaginary parts, then the Dirichlet weights.
    """
    d = 2 ** len(labels)
    rho = np.zeros((d, d), dtype=complex)
    kets = []
    for _ in range(n_pure):
        re = rng.standard_normal(d)
        im = rng.standard_normal(d)
        v = re + 1j * im
        kets.append(v / np.linalg.norm(v))
    weights = rng.dirichlet(np.ones(n_pure))
    for w, v in zip(weights, kets):
        rho += w * np.outer(v, v.conj())
    return DensityMatrix(rho, tuple(labels), (2,) * len(labels))
