"""Noise channels, noise models and stochastic trajectory steps.

Attachment rule: after every gate, each qubit the gate touches is one noise
location.  At a location every after-gate channel of the model fires once, in
the order depolarizing, thermal relaxation, amplitude damping, phase damping.
Readout error acts on the sampled classical bits only.
"""
from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Union

import numpy as np

from . import _kernels
from .circuit import GATE_SPECS, Gate
from .rng import RandomStream
from .statevector import Statevector

_I = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


class NoiseModelError(ValueError):
    """Invalid noise configuration; ``field`` names the offending entry."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


def _check_prob(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise NoiseModelError("expected a number", name)
    value = float(value)
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise NoiseModelError(f"probability {value} outside [0, 1]", name)
    return value


@dataclass(frozen=True)
class Depolarizing:
    p: float
    p_2q: float | None = None

    def __post_init__(self):
        _check_prob(self.p, "depolarizing.p")
        if self.p_2q is not None:
            _check_prob(self.p_2q, "depolarizing.p_2q")

    def rate(self, n_gate_qubits: int = 1) -> float:
        if n_gate_qubits == 2 and self.p_2q is not None:
            return self.p_2q
        return self.p


@dataclass(frozen=True)
class ThermalRelaxation:
    t1_us: float
    t2_us: float
    gate_time_ns: Mapping[str, float] = field(default_factory=lambda: {"default": 0.0})

    def __post_init__(self):
        if not self.t1_us > 0:
            raise NoiseModelError("T1 must be positive", "thermal.t1_us")
        if not 0 < self.t2_us <= 2 * self.t1_us:
            raise NoiseModelError(
                f"need 0 < T2 <= 2*T1, got T1={self.t1_us}, T2={self.t2_us}", "thermal.t2_us"
            )
        times = {k if k == "default" else k.upper(): v for k, v in self.gate_time_ns.items()}
        if "default" not in times:
            raise NoiseModelError("missing 'default' gate time", "thermal.gate_time_ns")
        for key, t in times.items():
            if isinstance(t, bool) or not isinstance(t, (int, float)) or t < 0:
                raise NoiseModelError("gate time must be a non-negative number",
                                      f"thermal.gate_time_ns.{key}")
        object.__setattr__(self, "gate_time_ns", times)

    def __hash__(self):
        return hash((self.t1_us, self.t2_us, tuple(sorted(self.gate_time_ns.items()))))

    def gate_time(self, tag: str | None = None) -> float:
        if tag is not None and tag.upper() in self.gate_time_ns:
            return float(self.gate_time_ns[tag.upper()])
        return float(self.gate_time_ns["default"])

    def damping(self, tag: str | None = None) -> tuple[float, float]:
        """(gamma, lambda) of the amplitude-then-phase damping decomposition."""
        t_us = self.gate_time(tag) * 1e-3
        gamma = 1.0 - math.exp(-t_us / self.t1_us)
        lam = 1.0 - math.exp(-2.0 * t_us * (1.0 / self.t2_us - 0.5 / self.t1_us))
        return gamma, max(lam, 0.0)


@dataclass(frozen=True)
class AmplitudeDamping:
    gamma: float

    def __post_init__(self):
        _check_prob(self.gamma, "amplitude_damping.gamma")


@dataclass(frozen=True)
class PhaseDamping:
    lam: float

    def __post_init__(self):
        _check_prob(self.lam, "phase_damping.lambda")


@dataclass(frozen=True)
class Readout:
    p01: float
    p10: float

    def __post_init__(self):
        _check_prob(self.p01, "readout.p01")
        _check_prob(self.p10, "readout.p10")


NoiseChannel = Union[Depolarizing, ThermalRelaxation, AmplitudeDamping, PhaseDamping, Readout]
_AFTER_GATE_ORDER = (Depolarizing, ThermalRelaxation, AmplitudeDamping, PhaseDamping)


@dataclass(frozen=True)
class KrausSet:
    operators: tuple[np.ndarray, ...]

    def completeness_error(self) -> float:
        total = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(total - _I)))

    def superoperator(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.operators)

    def kernel_form(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, bool]:
        """(operators, weights, identity flags, mixed-unitary flag) for the kernels.

        When every K_i satisfies K_i^dag K_i = w_i I the selection
        probabilities are the constants w_i; the unitary parts K_i/sqrt(w_i)
        are stored instead of K_i.
        """
        ops = np.array(self.operators, dtype=np.complex128).reshape(-1, 2, 2)
        weights = np.zeros(len(ops))
        fixed = True
        for i, k in enumerate(ops):
            kk = k.conj().T @ k
            w = kk[0, 0].real
            weights[i] = w
            if abs(kk[0, 1]) > 1e-12 or abs(kk[1, 1] - kk[0, 0]) > 1e-12:
                fixed = False
        if fixed:
            ops = np.array([k / math.sqrt(w) if w > 0 else _I for k, w in zip(ops, weights)])
        ident = np.array([np.allclose(k, _I, rtol=0, atol=1e-15) for k in ops], dtype=np.bool_)
        return ops, weights, ident, fixed


def _prune(ops) -> KrausSet:
    kept = tuple(np.asarray(k, dtype=np.complex128) for k in ops if np.max(np.abs(k)) > 0)
    return KrausSet(kept if kept else (_I.copy(),))


def _amplitude_damping_ops(gamma: float):
    return (
        np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=np.complex128),
        np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=np.complex128),
    )


def _phase_damping_ops(lam: float):
    return (
        np.array([[1, 0], [0, math.sqrt(1 - lam)]], dtype=np.complex128),
        np.array([[0, 0], [0, math.sqrt(lam)]], dtype=np.complex128),
    )


def kraus_for(channel: NoiseChannel, gate_tag: str | None = None) -> KrausSet:
    """Kraus operators of an after-gate channel.

    ``gate_tag`` selects two-qubit depolarizing rates and per-tag thermal gate
    times; zero operators are dropped.
    """
    if isinstance(channel, Depolarizing):
        n = GATE_SPECS[gate_tag.upper()][0] if gate_tag else 1
        p = channel.rate(n)
        a, b = math.sqrt(1 - p), math.sqrt(p / 3)
        return _prune((a * _I, b * _X, b * _Y, b * _Z))
    if isinstance(channel, AmplitudeDamping):
        return _prune(_amplitude_damping_ops(channel.gamma))
    if isinstance(channel, PhaseDamping):
        return _prune(_phase_damping_ops(channel.lam))
    if isinstance(channel, ThermalRelaxation):
        gamma, lam = channel.damping(gate_tag)
        return _prune(
            tuple(p @ a for a in _amplitude_damping_ops(gamma) for p in _phase_damping_ops(lam))
        )
    if isinstance(channel, Readout):
        raise TypeError("readout error has no Kraus representation; it acts on classical bits")
    raise TypeError(f"unknown channel {channel!r}")


def insertion_probability(channel: NoiseChannel, gate_tag: str | None = None) -> float:
    """Probability that ``channel`` inserts a non-identity operator at one location.

    For damping channels this is the worst case (qubit fully excited).
    """
    if isinstance(channel, Depolarizing):
        n = GATE_SPECS[gate_tag.upper()][0] if gate_tag else 1
        return channel.rate(n)
    if isinstance(channel, AmplitudeDamping):
        return channel.gamma
    if isinstance(channel, PhaseDamping):
        return channel.lam
    if isinstance(channel, ThermalRelaxation):
        gamma, lam = channel.damping(gate_tag)
        return 1.0 - (1.0 - gamma) * (1.0 - lam)
    return 0.0


@dataclass(frozen=True)
class NoiseModel:
    channels: tuple[NoiseChannel, ...] = ()

    def __post_init__(self):
        chans = tuple(self.channels)
        if sum(isinstance(c, Readout) for c in chans) > 1:
            raise NoiseModelError("at most one readout channel", "readout")
        for kind in _AFTER_GATE_ORDER:
            if sum(isinstance(c, kind) for c in chans) > 1:
                raise NoiseModelError(f"duplicate {kind.__name__} channel")
        chans = tuple(sorted(
            chans,
            key=lambda c: _AFTER_GATE_ORDER.index(type(c)) if not isinstance(c, Readout) else 99,
        ))
        object.__setattr__(self, "channels", chans)

    @property
    def after_gate(self) -> tuple[NoiseChannel, ...]:
        return tuple(c for c in self.channels if not isinstance(c, Readout))

    @property
    def readout(self) -> Readout | None:
        for c in self.channels:
            if isinstance(c, Readout):
                return c
        return None

    @property
    def is_noiseless(self) -> bool:
        return all(insertion_probability(c) == 0 for c in self.after_gate) and (
            self.readout is None or (self.readout.p01 == 0 and self.readout.p10 == 0)
        )

    def location_error(self, g: Gate) -> float:
        """Probability that any channel fires at one location of gate ``g``."""
        keep = 1.0
        for c in self.after_gate:
            keep *= 1.0 - insertion_probability(c, g.tag)
        return 1.0 - keep

    def without_readout(self) -> "NoiseModel":
        return NoiseModel(self.after_gate)


def _section(data: Mapping, name: str, keys: dict[str, bool]) -> dict:
    body = data[name]
    if not isinstance(body, Mapping):
        raise NoiseModelError("expected an object", name)
    for key in body:
        if key not in keys:
            raise NoiseModelError("unknown field", f"{name}.{key}")
    for key, required in keys.items():
        if required and key not in body:
            raise NoiseModelError("missing required field", f"{name}.{key}")
    return dict(body)


def load_noise_model(source: str | Mapping) -> NoiseModel:
    """Build a validated :class:`NoiseModel` from JSON text or a parsed dict."""
    from .qasm import QASM_GATES

    if isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise NoiseModelError(f"invalid JSON: {exc}") from None
    else:
        data = source
    if not isinstance(data, Mapping):
        raise NoiseModelError("top level must be an object")
    known = ("depolarizing", "thermal", "amplitude_damping", "phase_damping", "readout")
    for key in data:
        if key not in known:
            raise NoiseModelError("unknown section", key)
    if not data:
        raise NoiseModelError("at least one noise section is required")

    chans: list[NoiseChannel] = []
    if "depolarizing" in data:
        d = _section(data, "depolarizing", {"p": True, "p_2q": False})
        p = _check_prob(d["p"], "depolarizing.p")
        p2 = _check_prob(d["p_2q"], "depolarizing.p_2q") if d.get("p_2q") is not None else None
        chans.append(Depolarizing(p, p2))
    if "thermal" in data:
        d = _section(data, "thermal", {"t1_us": True, "t2_us": True, "gate_time_ns": True})
        for key in ("t1_us", "t2_us"):
            if isinstance(d[key], bool) or not isinstance(d[key], (int, float)):
                raise NoiseModelError("expected a number", f"thermal.{key}")
        times = d["gate_time_ns"]
        if not isinstance(times, Mapping):
            raise NoiseModelError("expected an object", "thermal.gate_time_ns")
        norm = {}
        for key, value in times.items():
            if key == "default":
                norm["default"] = value
            elif key.lower() in QASM_GATES:
                norm[QASM_GATES[key.lower()]] = value
            elif key.upper() in GATE_SPECS:
                norm[key.upper()] = value
            else:
                raise NoiseModelError("unknown gate tag", f"thermal.gate_time_ns.{key}")
        chans.append(ThermalRelaxation(float(d["t1_us"]), float(d["t2_us"]), norm))
    if "amplitude_damping" in data:
        d = _section(data, "amplitude_damping", {"gamma": True})
        chans.append(AmplitudeDamping(_check_prob(d["gamma"], "amplitude_damping.gamma")))
    if "phase_damping" in data:
        d = _section(data, "phase_damping", {"lambda": True})
        chans.append(PhaseDamping(_check_prob(d["lambda"], "phase_damping.lambda")))
    if "readout" in data:
        d = _section(data, "readout", {"p01": True, "p10": True})
        chans.append(Readout(_check_prob(d["p01"], "readout.p01"),
                             _check_prob(d["p10"], "readout.p10")))
    return NoiseModel(tuple(chans))


def noise_model_to_dict(m: NoiseModel) -> dict:
    out: dict[str, Any] = {}
    for c in m.channels:
        if isinstance(c, Depolarizing):
            out["depolarizing"] = {"p": c.p} | ({"p_2q": c.p_2q} if c.p_2q is not None else {})
        elif isinstance(c, ThermalRelaxation):
            out["thermal"] = {"t1_us": c.t1_us, "t2_us": c.t2_us,
                              "gate_time_ns": dict(c.gate_time_ns)}
        elif isinstance(c, AmplitudeDamping):
            out["amplitude_damping"] = {"gamma": c.gamma}
        elif isinstance(c, PhaseDamping):
            out["phase_damping"] = {"lambda": c.lam}
        elif isinstance(c, Readout):
            out["readout"] = {"p01": c.p01, "p10": c.p10}
    return out


@functools.lru_cache(maxsize=256)
def _kernel_form(channel: NoiseChannel, gate_tag: str | None):
    return kraus_for(channel, gate_tag).kernel_form()


def trajectory_noise_step(
    s: Statevector,
    qubit: int,
    channel: NoiseChannel,
    rng: RandomStream,
    gate_tag: str | None = None,
) -> int:
    """Sample K_i with probability ||K_i psi||^2, apply it to ``qubit`` and renormalize.

    Consumes one uniform from ``rng``; returns the index of the applied operator.
    """
    ops, weights, ident, fixed = _kernel_form(channel, gate_tag)
    return int(_kernels.noise_event(
        s.amplitudes, qubit, ops, weights, ident, 0, len(ops), fixed, rng.random()
    ))


def apply_readout_error(bits: str, channel: Readout, rng: RandomStream) -> str:
    """Flip each measured bit independently (qubit 0 is the rightmost character).

    Draws one uniform per bit, starting at qubit 0.
    """
    out = list(bits)
    for pos in range(len(bits) - 1, -1, -1):
        u = rng.random()
        if bits[pos] == "1":
            if u < channel.p10:
                out[pos] = "0"
        elif u < channel.p01:
            out[pos] = "1"
    return "".join(out)
