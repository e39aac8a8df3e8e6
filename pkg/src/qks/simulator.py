"""Dense statevector simulation, tuned for single-shot episode throughput.

Conventions: qubit 0 is the least-significant bit of a computational-basis
index, so for two qubits the amplitude order is |00>, |01>, |10>, |11> with
the left bit belonging to qubit 1. RX(theta) = [[cos(t/2), -i sin(t/2)],
[-i sin(t/2), cos(t/2)]].

Two execution paths share the same gate kernels:

* single-state helpers (:func:`apply_gate`, :func:`sample_shot`,
  :func:`run_episode`) for clarity and unit testing, and
* :class:`EpisodeEngine`, which runs one template over a batch of parameter
  vectors at once, storing the batch as a (B, 2**n) complex array and
  applying each gate with reshaped views. Its workspace is allocated once
  and reused, so per-episode cost is pure vectorized arithmetic plus one
  uniform variate's worth of inverse-CDF sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .quil import CircuitTemplate, GateKind, GateOp, ParamRef

MAX_QUBITS = 16

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Shot:
    """One measured bit pattern; bit j of ``bits`` is qubit j's outcome."""

    bits: int
    num_qubits: int

    def bit(self, qubit: int) -> int:
        if not 0 <= qubit < self.num_qubits:
            raise IndexError(f"qubit {qubit} out of range")
        return (self.bits >> qubit) & 1

    def to_array(self) -> np.ndarray:
        """Outcome as a uint8 vector, index j = qubit j."""
        return ((self.bits >> np.arange(self.num_qubits)) & 1).astype(np.uint8)


@dataclass
class StateVector:
    """Dense complex amplitudes over the computational basis."""

    amplitudes: np.ndarray
    num_qubits: int

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        """The all-zeros basis state |0...0>."""
        if not 1 <= num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}]")
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps, num_qubits)

    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real * a.real + a.imag * a.imag


# ---------------------------------------------------------------------------
# Gate kernels on (B, 2**n) batches. All operate in place via reshaped views.


def _apply_rx_batch(states: np.ndarray, n: int, qubit: int, cos_half, sin_half):
    """cos_half/sin_half are scalars or (B, 1, 1) arrays."""
    b = states.shape[0]
    lo = 1 << qubit
    hi = 1 << (n - qubit - 1)
    s3 = states.reshape(b, hi, 2, lo)
    a0 = s3[:, :, 0, :]
    a1 = s3[:, :, 1, :]
    isin = 1j * sin_half
    t1 = a1 * cos_half
    t1 -= isin * a0
    a0 *= cos_half
    a0 -= isin * a1
    a1[:] = t1


def _apply_h_batch(states: np.ndarray, n: int, qubit: int):
    b = states.shape[0]
    lo = 1 << qubit
    hi = 1 << (n - qubit - 1)
    s3 = states.reshape(b, hi, 2, lo)
    a0 = s3[:, :, 0, :]
    a1 = s3[:, :, 1, :]
    t1 = a0 - a1
    a0 += a1
    a0 *= _SQRT_HALF
    t1 *= _SQRT_HALF
    a1[:] = t1


def _two_qubit_view(states: np.ndarray, n: int, qa: int, qb: int):
    """Reshape so axis 2 indexes bit max(qa,qb) and axis 4 bit min(qa,qb)."""
    b = states.shape[0]
    h, l = max(qa, qb), min(qa, qb)
    lo = 1 << l
    mid = 1 << (h - l - 1)
    hi = 1 << (n - h - 1)
    return states.reshape(b, hi, 2, mid, 2, lo), h


def _apply_cnot_batch(states: np.ndarray, n: int, control: int, target: int):
    s6, high_bit = _two_qubit_view(states, n, control, target)
    if control == high_bit:
        sub = s6[:, :, 1]  # control=1 slab; target is now axis 3
        t0 = sub[:, :, :, 0, :]
        t1 = sub[:, :, :, 1, :]
    else:
        sub = s6[:, :, :, :, 1, :]  # control is the low bit
        t0 = sub[:, :, 0]
        t1 = sub[:, :, 1]
    tmp = t0.copy()
    t0[:] = t1
    t1[:] = tmp


def _apply_cz_batch(states: np.ndarray, n: int, qa: int, qb: int):
    s6, _ = _two_qubit_view(states, n, qa, qb)
    s6[:, :, 1, :, 1, :] *= -1.0


def _apply_gate_batch(states: np.ndarray, n: int, gate: GateOp):
    """Dispatch one gate with a concrete (float) angle onto a batch."""
    if gate.kind is GateKind.RX:
        angle = gate.angle
        if isinstance(angle, ParamRef):
            raise ValueError(
                f"cannot simulate unresolved parameter %{angle.name}; "
                "instantiate the template first"
            )
        half = 0.5 * angle
        _apply_rx_batch(states, n, gate.qubits[0], math.cos(half), math.sin(half))
    elif gate.kind is GateKind.H:
        _apply_h_batch(states, n, gate.qubits[0])
    elif gate.kind is GateKind.CNOT:
        _apply_cnot_batch(states, n, gate.qubits[0], gate.qubits[1])
    elif gate.kind is GateKind.CZ:
        _apply_cz_batch(states, n, gate.qubits[0], gate.qubits[1])
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unhandled gate kind {gate.kind}")


# ---------------------------------------------------------------------------
# Single-state API.


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Apply one gate, returning a new StateVector (the input is untouched)."""
    if max(gate.qubits) >= state.num_qubits:
        raise ValueError(
            f"gate touches qubit {max(gate.qubits)} but the state has "
            f"{state.num_qubits} qubit(s)"
        )
    amps = state.amplitudes[np.newaxis, :].copy()
    _apply_gate_batch(amps, state.num_qubits, gate)
    return StateVector(amps[0], state.num_qubits)


def sample_shot(state: StateVector, rng: np.random.Generator) -> Shot:
    """Measure all qubits once, consuming exactly one uniform variate.

    The outcome index is found by inverse-CDF lookup: searchsorted with
    side='right' on the cumulative probabilities, clamped to the last
    outcome in case rounding leaves the final cumulative sum below 1.
    """
    cdf = np.cumsum(state.probabilities())
    u = rng.random()
    z = int(np.searchsorted(cdf, u, side="right"))
    z = min(z, len(cdf) - 1)
    return Shot(z, state.num_qubits)


def run_circuit(gates: Sequence[GateOp], num_qubits: int) -> StateVector:
    """Run concrete gates from |0...0>, returning the final state."""
    state = StateVector.zero(num_qubits)
    amps = state.amplitudes[np.newaxis, :]
    for g in gates:
        if max(g.qubits) >= num_qubits:
            raise ValueError(f"gate touches qubit {max(g.qubits)} out of range")
        _apply_gate_batch(amps, num_qubits, g)
    return state


# ---------------------------------------------------------------------------
# Batched engine.


class EpisodeEngine:
    """Executes one template across batches of parameter vectors.

    The template's gates are compiled once into a dispatch list; RX angles
    refer to columns of the incoming theta matrix (or are fixed literals).
    With ``layers`` > 1 the gate list is repeated and layer l's rotations
    read parameter columns offset by ``l * template.num_params``.
    """

    def __init__(
        self,
        template: CircuitTemplate,
        layers: int = 1,
        chunk_bytes: int = 32 << 20,
    ):
        if layers < 1:
            raise ValueError("layers must be >= 1")
        if template.num_qubits > MAX_QUBITS:
            raise ValueError(
                f"template uses {template.num_qubits} qubits; the dense "
                f"simulator supports at most {MAX_QUBITS}"
            )
        self.template = template
        self.layers = layers
        self.num_qubits = template.num_qubits
        self.num_params = layers * template.num_params
        self.dim = 1 << self.num_qubits

        self._ops: list[tuple] = []
        base = template.num_params
        for layer in range(layers):
            for g in template.gates:
                if g.kind is GateKind.RX and isinstance(g.angle, ParamRef):
                    col = layer * base + template.params.index(g.angle.name)
                    self._ops.append(("rx_param", g.qubits[0], col))
                elif g.kind is GateKind.RX:
                    half = 0.5 * g.angle
                    self._ops.append(
                        ("rx_const", g.qubits[0], math.cos(half), math.sin(half))
                    )
                else:
                    self._ops.append((g.kind, g.qubits))

        row_bytes = 16 * self.dim
        self.chunk_size = max(1, min(1 << 16, chunk_bytes // row_bytes))
        self._state = np.empty((self.chunk_size, self.dim), dtype=np.complex128)

    def _run_chunk(self, thetas: np.ndarray) -> np.ndarray:
        """Evolve a (b, num_params) chunk; returns the (b, dim) state view."""
        b = thetas.shape[0]
        s = self._state[:b]
        s[:] = 0.0
        s[:, 0] = 1.0
        n = self.num_qubits
        for op in self._ops:
            tag = op[0]
            if tag == "rx_param":
                half = 0.5 * thetas[:, op[2]]
                cos = np.cos(half)[:, None, None]
                sin = np.sin(half)[:, None, None]
                _apply_rx_batch(s, n, op[1], cos, sin)
            elif tag == "rx_const":
                _apply_rx_batch(s, n, op[1], op[2], op[3])
            elif tag is GateKind.H:
                _apply_h_batch(s, n, op[1][0])
            elif tag is GateKind.CNOT:
                _apply_cnot_batch(s, n, op[1][0], op[1][1])
            else:
                _apply_cz_batch(s, n, op[1][0], op[1][1])
        return s

    def _check_thetas(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.asarray(thetas, dtype=np.float64)
        if thetas.ndim != 2 or thetas.shape[1] != self.num_params:
            raise ValueError(
                f"expected thetas of shape (B, {self.num_params}), "
                f"got {thetas.shape}"
            )
        return thetas

    def probabilities(self, thetas: np.ndarray) -> np.ndarray:
        """Exact outcome distributions, one row of 2**n probabilities each."""
        thetas = self._check_thetas(thetas)
        out = np.empty((thetas.shape[0], self.dim), dtype=np.float64)
        for start in range(0, thetas.shape[0], self.chunk_size):
            stop = min(start + self.chunk_size, thetas.shape[0])
            s = self._run_chunk(thetas[start:stop])
            np.add(s.real * s.real, s.imag * s.imag, out=out[start:stop])
        return out

    def sample(self, thetas: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
        """One shot per row: inverse-CDF with the given uniform variates.

        Bitwise identical to :func:`sample_shot` applied row by row with the
        same uniforms: counting cdf entries <= u equals searchsorted(right).
        """
        thetas = self._check_thetas(thetas)
        uniforms = np.asarray(uniforms, dtype=np.float64)
        if uniforms.shape != (thetas.shape[0],):
            raise ValueError("need exactly one uniform variate per episode")
        out = np.empty(thetas.shape[0], dtype=np.int64)
        for start in range(0, thetas.shape[0], self.chunk_size):
            stop = min(start + self.chunk_size, thetas.shape[0])
            s = self._run_chunk(thetas[start:stop])
            probs = s.real * s.real + s.imag * s.imag
            cdf = np.cumsum(probs, axis=1)
            z = (cdf <= uniforms[start:stop, None]).sum(axis=1)
            np.minimum(z, self.dim - 1, out=z)
            out[start:stop] = z
        return out


@lru_cache(maxsize=64)
def _cached_engine(template: CircuitTemplate, layers: int = 1) -> EpisodeEngine:
    return EpisodeEngine(template, layers)


def exact_probabilities(
    template: CircuitTemplate, theta: Sequence[float]
) -> np.ndarray:
    """Outcome distribution of a template at one parameter setting."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 1:
        raise ValueError("theta must be one-dimensional")
    return _cached_engine(template).probabilities(theta[np.newaxis, :])[0]


def run_episode(
    template: CircuitTemplate, theta: Sequence[float], rng: np.random.Generator
) -> Shot:
    """Instantiate, simulate, and measure once (one uniform variate)."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 1:
        raise ValueError("theta must be one-dimensional")
    engine = _cached_engine(template)
    u = rng.random()
    z = engine.sample(theta[np.newaxis, :], np.array([u]))
    return Shot(int(z[0]), engine.num_qubits)
