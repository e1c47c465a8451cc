import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edss.channels import (
    ChannelKind,
    NoiseScenario,
    apply_ded_noise,
    apply_memory_noise,
    completeness_error,
    make_channel,
)
from edss.qstate import SIGMA_X, SIGMA_Y, SIGMA_Z, DensityMatrix, bell_phi_plus

from . import oracles

KINDS = ["depolarizing", "dephasing", "amplitude-damping", "identity"]
probs = st.floats(min_value=0.0, max_value=1.0)


def bloch(rho):
    return np.array([np.trace(rho @ s).real for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)])


def from_bloch(r):
    return (np.eye(2) + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z) / 2


def expected_bloch(kind, p, r):
    x, y, z = r
    if kind == "depolarizing":
        return (1 - 4 * p / 3) * r
    if kind == "dephasing":
        return np.array([(1 - p) * x, (1 - p) * y, z])
    if kind == "amplitude-damping":
        s = np.sqrt(1 - p)
        return np.array([s * x, s * y, p + (1 - p) * z])
    return r


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(KINDS), probs)
def test_completeness(kind, p):
    assert completeness_error(make_channel(kind, p).operators) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(KINDS[:3]), probs, st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_bloch_vector_action(kind, p, x, y, z):
    r = np.array([x, y, z])
    if np.linalg.norm(r) > 1:
        r = r / np.linalg.norm(r)
    rho = DensityMatrix(from_bloch(r), ("K",), (2,))
    out = make_channel(kind, p)(rho, "K")
    np.testing.assert_allclose(bloch(out.data), expected_bloch(kind, p, r), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(KINDS), probs, st.integers(0, 2**31), st.sampled_from(["A", "B", "K"]))
def test_channel_keeps_a_valid_state(kind, p, seed, target):
    rho = DensityMatrix(oracles.random_state(np.random.default_rng(seed), 8), ("A", "B", "K"), (2, 2, 2))
    out = make_channel(kind, p)(rho, target)
    out.validate()
    # untouched subsystems keep their marginal
    rest = [i for i in range(3) if i != rho.index(target)]
    np.testing.assert_allclose(
        oracles.partial_trace(out.data, out.dims, rest), oracles.partial_trace(rho.data, rho.dims, rest), atol=1e-13
    )


def test_identity_at_zero_and_edges():
    rho = bell_phi_plus()
    for kind in KINDS:
        assert make_channel(kind, 0.0)(rho, "A").allclose(rho, atol=1e-15)
    # full amplitude damping resets to |0>
    ad = make_channel("ad", 1.0)(DensityMatrix(np.eye(2) / 2, ("K",), (2,)), "K")
    np.testing.assert_allclose(ad.data, np.diag([1, 0]), atol=1e-15)


@pytest.mark.parametrize("p", [-0.01, 1.01, np.nan])
def test_strength_out_of_range(p):
    with pytest.raises(ValueError):
        make_channel("depolarizing", p)


def test_kind_aliases():
    assert ChannelKind.parse("ad") is ChannelKind.AMPLITUDE_DAMPING
    assert ChannelKind.parse("amplitude_damping") is ChannelKind.AMPLITUDE_DAMPING
    assert ChannelKind.parse("Depo") is ChannelKind.DEPOLARIZING
    with pytest.raises(ValueError):
        ChannelKind.parse("bitflip")


def test_scenario_roles():
    s = NoiseScenario.single("dephasing", 0.3)
    assert s.memory_channels() is None
    assert s.carrier_channel().p == 0.3
    assert [c.kind for c in s.ded_channels()] == [ChannelKind.DEPHASING] * 2

    m = NoiseScenario.dissimilar("dephasing", "amplitude-damping", 0.1, 0.2, 0.4)
    a, b = m.memory_channels()
    assert (a.p, b.p, m.carrier_channel().p) == (0.1, 0.2, 0.4)
    assert m.carrier_channel().kind is ChannelKind.AMPLITUDE_DAMPING
    assert [c.kind for c in m.ded_channels()] == [ChannelKind.DEPHASING] * 2
    assert m.is_studied_combination
    assert not NoiseScenario.uniform("depolarizing", "dephasing", 0.1).is_studied_combination
    assert NoiseScenario.noiseless().carrier_channel() is None
    with pytest.raises(ValueError):
        NoiseScenario.uniform("dephasing", "depolarizing", 1.5)


def test_ded_and_memory_noise_match_full_kraus_sum():
    s = NoiseScenario.dissimilar("dephasing", "depolarizing", 0.2, 0.6, 0.0)
    out = apply_ded_noise(bell_phi_plus(), s)
    a, b = s.ded_channels()
    want = sum(
        np.kron(ma, mb) @ oracles.bell_phi_plus() @ np.kron(ma, mb).conj().T for ma in a.operators for mb in b.operators
    )
    np.testing.assert_allclose(out.data, want, atol=1e-14)

    rho = DensityMatrix(oracles.random_state(np.random.default_rng(2), 8), ("A", "B", "K"), (2, 2, 2))
    got = apply_memory_noise(rho, a, b)
    want = sum(
        np.kron(np.kron(ma, mb), np.eye(2)) @ rho.data @ np.kron(np.kron(ma, mb), np.eye(2)).conj().T
        for ma in a.operators
        for mb in b.operators
    )
    np.testing.assert_allclose(got.data, want, atol=1e-14)
