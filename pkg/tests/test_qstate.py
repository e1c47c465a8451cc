import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edss.qstate import (
    X0,
    X1,
    Y0,
    Y1,
    Z0,
    Z1,
    BlochProjector,
    DensityMatrix,
    InvariantViolation,
    OutcomeUnobservable,
    UnitaryGate,
    apply_kraus,
    apply_unitary,
    bell_phi_plus,
    cnot,
    cphase,
    hadamard,
    measure_probability,
    partial_trace,
    partial_transpose,
    postselect,
    random_density_matrix,
    tensor,
    trace_distance,
)

from . import oracles

LABELS = ("A", "B", "K")
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_abk(seed):
    rng = np.random.default_rng(seed)
    return DensityMatrix(oracles.random_state(rng, 8), LABELS, (2, 2, 2))


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([["A"], ["B"], ["K"], ["A", "B"], ["A", "K"], ["B", "K"]]))
def test_partial_trace_matches_oracle(seed, keep):
    rho = random_abk(seed)
    got = partial_trace(rho, keep)
    want = oracles.partial_trace(rho.data, rho.dims, [rho.index(l) for l in keep])
    assert got.labels == tuple(keep)
    np.testing.assert_allclose(got.data, want, atol=1e-13)


def test_partial_trace_keeps_layout_order():
    rho = random_abk(3)
    assert partial_trace(rho, ["K", "A"]).allclose(partial_trace(rho, ["A", "K"]), atol=0)
    assert partial_trace(rho, ["K", "A"]).labels == ("A", "K")


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([["A"], ["K"], ["A", "B"], ["B", "K"]]))
def test_partial_transpose_matches_oracle(seed, subset):
    rho = random_abk(seed)
    want = oracles.partial_transpose(rho.data, rho.dims, [rho.index(l) for l in subset])
    np.testing.assert_allclose(partial_transpose(rho, subset), want, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from([("A", "K"), ("K", "A"), ("B", "K"), ("A", "B")]))
def test_two_qubit_gates_match_full_embedding(seed, pair):
    rho = random_abk(seed)
    for gate in (cnot(*pair), cphase(*pair)):
        full = oracles.embed(gate.data, [rho.index(l) for l in pair], rho.dims)
        got = apply_unitary(rho, gate)
        np.testing.assert_allclose(got.data, full @ rho.data @ full.conj().T, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_unitaries_preserve_state_invariants(seed):
    rho = random_abk(seed)
    for gate in (cnot("A", "K"), cphase("B", "K"), hadamard("A")):
        out = apply_unitary(rho, gate).validate()
        assert abs(out.trace() - 1) < 1e-12
        np.testing.assert_allclose(np.sort(out.eigenvalues()), np.sort(rho.eigenvalues()), atol=1e-12)
        back = apply_unitary(out, gate.dagger)
        assert back.allclose(rho, atol=1e-13)


def test_kraus_sum_matches_embedding(rng):
    rho = random_abk(11)
    ops = [np.sqrt(0.7) * np.eye(2), np.sqrt(0.3) * np.diag([1, -1])]
    got = apply_kraus(rho, ops, ("B",))
    want = sum(oracles.embed(m, [1], rho.dims) @ rho.data @ oracles.embed(m, [1], rho.dims).conj().T for m in ops)
    np.testing.assert_allclose(got.data, want, atol=1e-14)


def test_tensor_layout_and_trace():
    a = DensityMatrix.maximally_mixed(["A"])
    b = bell_phi_plus(("B", "K"))
    t = tensor(a, b)
    assert t.labels == ("A", "B", "K") and t.dims == (2, 2, 2)
    assert partial_trace(t, ["B", "K"]).allclose(b)


def test_bell_state_and_projectors():
    phi = bell_phi_plus()
    np.testing.assert_allclose(phi.data, oracles.bell_phi_plus(), atol=1e-15)
    for a, b in ((Z0, Z1), (X0, X1), (Y0, Y1)):
        assert abs(np.vdot(a.ket, b.ket)) < 1e-15
        np.testing.assert_allclose(a.matrix + b.matrix, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(a.complement().matrix, b.matrix, atol=1e-15)
    np.testing.assert_allclose(X1.bloch_vector(), [-1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(Y0.bloch_vector(), [0, 1, 0], atol=1e-15)


def test_bloch_projector_range_checks():
    with pytest.raises(ValueError):
        BlochProjector(-0.1, 0.0)
    with pytest.raises(ValueError):
        BlochProjector(np.pi + 0.1, 0.0)
    assert BlochProjector(0.3, 7.0).phi == pytest.approx(7.0 - 2 * np.pi)


def test_postselect_probability_and_state():
    rho = random_abk(5)
    for proj in (Z0, X1, BlochProjector(1.1, 4.0)):
        cond, p = postselect(rho, proj, "K")
        P = oracles.embed(proj.matrix, [2], rho.dims)
        want = oracles.partial_trace(P @ rho.data @ P, rho.dims, [0, 1])
        assert p == pytest.approx(np.trace(want).real, abs=1e-14)
        assert p == pytest.approx(measure_probability(rho, proj, "K"), abs=1e-14)
        np.testing.assert_allclose(cond.data, want / p, atol=1e-13)


def test_postselect_zero_probability_raises():
    rho = DensityMatrix.from_ket([1, 0, 0, 0], ("A", "K"))
    with pytest.raises(OutcomeUnobservable) as info:
        postselect(rho, Z1, "K")
    assert info.value.probability < 1e-14


def test_invariant_violation_and_layout_errors():
    with pytest.raises(InvariantViolation):
        DensityMatrix(np.diag([1.2, -0.2]), ("A",), (2,)).validate()
    with pytest.raises(InvariantViolation):
        DensityMatrix(np.diag([0.6, 0.6]), ("A",), (2,)).validate()
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(4) / 4, ("A",), (2,))
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(4) / 4, ("A", "A"), (2, 2))
    with pytest.raises(KeyError):
        random_abk(0).index("Z")
    with pytest.raises(ValueError):
        UnitaryGate(np.array([[1, 1], [0, 1]]), ("A",))


def test_density_matrix_is_read_only():
    rho = random_abk(1)
    with pytest.raises(ValueError):
        rho.data[0, 0] = 1


def test_random_density_matrix_is_seeded_and_valid():
    a = random_density_matrix(np.random.default_rng(7))
    b = random_density_matrix(np.random.default_rng(7))
    assert a.allclose(b, atol=0)
    a.validate()
    assert trace_distance(a, random_density_matrix(np.random.default_rng(8))) > 1e-3
