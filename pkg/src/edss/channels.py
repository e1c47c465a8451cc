"""Single-qubit Kraus noise families and where they strike in each protocol."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .qstate import SIGMA_X, SIGMA_Y, SIGMA_Z, DensityMatrix, apply_channel


class ChannelKind(str, Enum):
    DEPOLARIZING = "depolarizing"
    DEPHASING = "dephasing"
    AMPLITUDE_DAMPING = "amplitude-damping"
    IDENTITY = "identity"

    @classmethod
    def parse(cls, value) -> "ChannelKind":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("_", "-")
        aliases = {"depo": "depolarizing", "deph": "dephasing", "ad": "amplitude-damping", "amp": "amplitude-damping"}
        return cls(aliases.get(key, key))


MEMORY_KINDS = frozenset({ChannelKind.DEPHASING, ChannelKind.AMPLITUDE_DAMPING})
CARRIER_KINDS = frozenset({ChannelKind.DEPOLARIZING, ChannelKind.AMPLITUDE_DAMPING})


@dataclass(frozen=True, eq=False)
class KrausChannel:
    kind: ChannelKind
    p: float
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        dev = completeness_error(self.operators)
        if dev > 1e-12:
            raise ValueError(f"{self.kind.value}({self.p}) violates completeness by {dev:.2e}")

    def __call__(self, rho: DensityMatrix, target: str) -> DensityMatrix:
        return apply_channel(rho, self, target)

    def __repr__(self):
        return f"KrausChannel({self.kind.value}, p={self.p})"


def completeness_error(operators) -> float:
    s = sum(np.asarray(m).conj().T @ np.asarray(m) for m in operators)
    return float(np.abs(s - np.eye(s.shape[0])).max())


def make_channel(kind, p: float) -> KrausChannel:
    kind = ChannelKind.parse(kind)
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise strength p={p} outside [0, 1]")
    if kind is ChannelKind.DEPOLARIZING:
        ops = [np.sqrt(1 - p) * np.eye(2)] + [np.sqrt(p / 3) * s for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)]
    elif kind is ChannelKind.DEPHASING:
        ops = [np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * np.diag([1.0, 0.0]), np.sqrt(p) * np.diag([0.0, 1.0])]
    elif kind is ChannelKind.AMPLITUDE_DAMPING:
        ops = [np.diag([1.0, np.sqrt(1 - p)]), np.array([[0.0, np.sqrt(p)], [0.0, 0.0]])]
    else:
        ops = [np.eye(2)]
    return KrausChannel(kind, p, tuple(np.asarray(m, dtype=complex) for m in ops))


@dataclass(frozen=True)
class NoiseScenario:
    """Where noise acts and how strongly.

    ``model="single"``: only the transmitted resource is noisy.  EDSS carriers
    see ``carrier_kind`` at ``p3``; the DED Bell pair sees ``carrier_kind`` on
    both qubits at ``p1``/``p2``.

    ``model="multichannel"``: memories A and B see ``memory_kind`` at ``p1``
    and ``p2`` before encoding, the carrier sees ``carrier_kind`` at ``p3``
    between encoding and decoding.  DED only suffers the memory noise.

    ``memory_reexposure`` makes memory noise strike again before every
    iteration of protocol beta instead of only before the first.
    """

    model: str = "single"
    memory_kind: ChannelKind | None = None
    carrier_kind: ChannelKind | None = None
    p1: float = 0.0
    p2: float = 0.0
    p3: float = 0.0
    memory_reexposure: bool = False

    def __post_init__(self):
        if self.model not in ("single", "multichannel"):
            raise ValueError(f"unknown noise model {self.model!r}")
        for name in ("p1", "p2", "p3"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.memory_kind is not None:
            object.__setattr__(self, "memory_kind", ChannelKind.parse(self.memory_kind))
        if self.carrier_kind is not None:
            object.__setattr__(self, "carrier_kind", ChannelKind.parse(self.carrier_kind))

    @classmethod
    def noiseless(cls) -> "NoiseScenario":
        return cls()

    @classmethod
    def single(cls, kind, p: float) -> "NoiseScenario":
        return cls("single", None, ChannelKind.parse(kind), p, p, p)

    @classmethod
    def uniform(cls, memory_kind, carrier_kind, p: float, **kw) -> "NoiseScenario":
        return cls("multichannel", memory_kind, carrier_kind, p, p, p, **kw)

    @classmethod
    def dissimilar(cls, memory_kind, carrier_kind, p1: float, p2: float, p3: float, **kw) -> "NoiseScenario":
        return cls("multichannel", memory_kind, carrier_kind, p1, p2, p3, **kw)

    @property
    def is_studied_combination(self) -> bool:
        """False for memory/carrier combinations outside dephasing|AD x depolarizing|AD."""
        if self.model == "single":
            return True
        mem_ok = self.memory_kind is None or self.memory_kind in MEMORY_KINDS
        car_ok = self.carrier_kind is None or self.carrier_kind in CARRIER_KINDS
        return mem_ok and car_ok

    def carrier_channel(self) -> KrausChannel | None:
        if self.carrier_kind is None:
            return None
        return make_channel(self.carrier_kind, self.p3)

    def memory_channels(self) -> tuple[KrausChannel, KrausChannel] | None:
        if self.model != "multichannel" or self.memory_kind is None:
            return None
        return make_channel(self.memory_kind, self.p1), make_channel(self.memory_kind, self.p2)

    def ded_channels(self) -> tuple[KrausChannel, KrausChannel] | None:
        kind = self.memory_kind if self.model == "multichannel" else self.carrier_kind
        if kind is None:
            return None
        return make_channel(kind, self.p1), make_channel(kind, self.p2)

    def describe(self) -> dict:
        return {
            "model": self.model,
            "memory_kind": self.memory_kind.value if self.memory_kind else None,
            "carrier_kind": self.carrier_kind.value if self.carrier_kind else None,
            "p1": self.p1,
            "p2": self.p2,
            "p3": self.p3,
            "memory_reexposure": self.memory_reexposure,
            "studied_combination": self.is_studied_combination,
        }


def apply_ded_noise(bell: DensityMatrix, scenario: NoiseScenario) -> DensityMatrix:
    chans = scenario.ded_channels()
    if chans is None:
        return bell
    a, b = bell.labels
    return chans[1](chans[0](bell, a), b)


def apply_carrier_noise(rho_abk: DensityMatrix, ch: KrausChannel | None, carrier: str = "K") -> DensityMatrix:
    if ch is None:
        return rho_abk
    return ch(rho_abk, carrier)


def apply_memory_noise(rho_abk: DensityMatrix, mem_a: KrausChannel | None, mem_b: KrausChannel | None) -> DensityMatrix:
    # M_{i,A} x M_{j,B} summed over i, j factorises into two single-site channels
    if mem_a is not None:
        rho_abk = mem_a(rho_abk, "A")
    if mem_b is not None:
        rho_abk = mem_b(rho_abk, "B")
    return rho_abk
