"""Dense statevector simulation of the search and estimation circuits.

Register layout, most significant to least significant index bits:
scenario register (b qubits) | decision register (c qubits) | optional mark
ancilla (1 qubit) | sample register (m qubits). Within each block the
integer value of the register is the standard binary value (bit j carries
weight 2^j). Amplitudes are stored as a contiguous complex128 array of
shape (2^b, 2^c, 2 or 1, 2^m); sample-register qubit j controls the 2^j-th
power of the estimation operator.

Operators never renormalize: norm drift beyond tolerance raises
ConsistencyError. Oracle uses are charged to the oracle's ledger at the
black-box rate (2 per target reflection, 1 per mark), independent of the
bitmap fast path used internally.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .distributions import ScenarioDistribution
from .errors import CapacityError, ConsistencyError, InputError, StateShapeError
from .oracles import Oracle
from .schedule import AngleSchedule

MAX_TOTAL_QUBITS = 26

# cumulative drift allowance over a full estimation run
NORM_TOL = 1e-7

_MAGIC = b"SVST"


@dataclass(frozen=True)
class RegisterLayout:
    scenario_bits: int
    decision_bits: int
    has_mark: bool
    sample_bits: int = 0

    def __post_init__(self) -> None:
        if self.scenario_bits < 1 or self.decision_bits < 1 or self.sample_bits < 0:
            raise InputError(f"invalid register layout {self}")
        if self.scenario_bits + self.decision_bits + 1 + self.sample_bits > MAX_TOTAL_QUBITS:
            raise CapacityError(
                f"layout {self} exceeds the {MAX_TOTAL_QUBITS}-qubit simulation limit"
            )

    @property
    def total_qubits(self) -> int:
        return (
            self.scenario_bits
            + self.decision_bits
            + (1 if self.has_mark else 0)
            + self.sample_bits
        )

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (
            1 << self.scenario_bits,
            1 << self.decision_bits,
            2 if self.has_mark else 1,
            1 << self.sample_bits,
        )


class OperatorTrace:
    """Append-only record of applied operators and consumed oracle calls."""

    def __init__(self) -> None:
        self.events: list[str] = []
        self.oracle_calls = 0

    def record(self, tag: str, calls: int = 0) -> None:
        self.events.append(tag)
        self.oracle_calls += calls

    def __str__(self) -> str:
        lines = [f"{i:4d}  {tag}" for i, tag in enumerate(self.events)]
        lines.append(f"oracle calls consumed: {self.oracle_calls}")
        return "\n".join(lines)


class StateVector:
    def __init__(self, layout: RegisterLayout, amps: np.ndarray, trace: OperatorTrace | None = None):
        if amps.shape != layout.shape:
            raise StateShapeError(f"amplitude shape {amps.shape} does not match layout {layout}")
        self.layout = layout
        self.amps = np.ascontiguousarray(amps, dtype=np.complex128)
        self.trace = trace

    # -- bookkeeping ---------------------------------------------------------

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def check_norm(self, tol: float = NORM_TOL) -> None:
        n = self.norm()
        if abs(n - 1.0) > tol:
            raise ConsistencyError(f"state norm drifted to {n} (tolerance {tol})")

    def _finish(self, tag: str, oracle: Oracle | None = None, calls: int = 0) -> None:
        if oracle is not None and calls:
            oracle.record_calls(calls)
        if self.trace is not None:
            self.trace.record(tag, calls)
        self.check_norm()

    def copy(self) -> "StateVector":
        return StateVector(self.layout, self.amps.copy())

    def flat(self) -> np.ndarray:
        return self.amps.reshape(-1).copy()

    # -- marginals -----------------------------------------------------------

    def scenario_masses(self) -> np.ndarray:
        """Probability mass per scenario index (sum over all other registers)."""
        return np.sum(np.abs(self.amps) ** 2, axis=(1, 2, 3))

    def marked_mass_by_scenario(self, mask: np.ndarray) -> np.ndarray:
        """Per-scenario mass lying inside the oracle's marked set."""
        dens = np.sum(np.abs(self.amps) ** 2, axis=(2, 3))
        return np.sum(np.where(mask, dens, 0.0), axis=1)

    def per_scenario_success(self, dist: ScenarioDistribution, mask: np.ndarray) -> np.ndarray:
        """Marked mass conditioned on each scenario; NaN where p(scenario)=0."""
        p = dist.probabilities
        marked = self.marked_mass_by_scenario(mask)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(p > 0.0, marked / p, np.nan)
        return out

    def mark_one_mass(self) -> float:
        if not self.layout.has_mark:
            raise StateShapeError("state has no mark ancilla")
        return float(np.sum(np.abs(self.amps[:, :, 1, :]) ** 2))

    def sample_distribution(self) -> np.ndarray:
        """Exact outcome distribution over the sample register."""
        if self.layout.sample_bits == 0:
            raise StateShapeError("state has no sample register")
        probs = np.sum(np.abs(self.amps) ** 2, axis=(0, 1, 2))
        total = float(probs.sum())
        if abs(total - 1.0) > 1e-10:
            raise ConsistencyError(f"sample distribution sums to {total}")
        return probs

    # -- binary dump ----------------------------------------------------------

    def dump(self, path: str | Path) -> None:
        lay = self.layout
        header = _MAGIC + struct.pack(
            "<IIIII", 1, lay.scenario_bits, lay.decision_bits, 1 if lay.has_mark else 0, lay.sample_bits
        )
        Path(path).write_bytes(header + self.amps.astype("<c16").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "StateVector":
        raw = Path(path).read_bytes()
        if raw[:4] != _MAGIC:
            raise InputError(f"{path} is not a statevector dump")
        version, b, c, mark, m = struct.unpack("<IIIII", raw[4:24])
        if version != 1:
            raise InputError(f"unsupported statevector dump version {version}")
        layout = RegisterLayout(b, c, bool(mark), m)
        amps = np.frombuffer(raw[24:], dtype="<c16").reshape(layout.shape)
        return cls(layout, amps.astype(np.complex128))


# -- state preparation --------------------------------------------------------


def prepare_initial(
    dist: ScenarioDistribution,
    c: int,
    with_mark: bool = False,
    trace: OperatorTrace | None = None,
) -> StateVector:
    """Scenario amplitudes on the x register, uniform decision register,
    mark ancilla (if requested) in |0>."""
    layout = RegisterLayout(dist.b, c, with_mark, 0)
    shape = layout.shape
    amps = np.zeros(shape, dtype=np.complex128)
    amps[:, :, 0, 0] = dist.amplitudes()[:, None] / math.sqrt(1 << c)
    state = StateVector(layout, amps, trace)
    state._finish("prepare_initial")
    return state


# -- raw-array primitives (arr has shape (B, C, A, K)) ------------------------


def _phase_marked(arr: np.ndarray, mask: np.ndarray, beta: float) -> None:
    factors = np.where(mask, np.exp(-1j * beta), 1.0 + 0.0j)
    arr *= factors[:, :, None, None]


def _mix_decision(arr: np.ndarray, alpha: float) -> None:
    # Mixer phase is the conjugate of the target-reflection phase; the pair
    # (e^{-i beta}, e^{+i alpha}) with the antisymmetric schedule is what
    # reproduces the Chebyshev success law (checked against an independent
    # two-level simulation and by the engine equivalence tests).
    coef = 1.0 - np.exp(1j * alpha)
    arr -= coef * arr.mean(axis=1, keepdims=True)


def _mark_toggle(arr: np.ndarray, mask: np.ndarray) -> None:
    sub = arr[mask]
    arr[mask] = sub[:, ::-1, :]


def _reflect_zero(arr: np.ndarray) -> None:
    arr[0, 0, 0, :] *= -1.0


def _neg_z_mark(arr: np.ndarray) -> None:
    arr[:, :, 0, :] *= -1.0


def _hadamard_decision(arr: np.ndarray) -> None:
    b_dim, c_dim, a_dim, k_dim = arr.shape
    c = c_dim.bit_length() - 1
    for k in range(c):
        v = arr.reshape(b_dim, c_dim >> (k + 1), 2, 1 << k, a_dim, k_dim)
        lo = v[:, :, 0].copy()
        hi = v[:, :, 1].copy()
        v[:, :, 0] = lo + hi
        v[:, :, 1] = lo - hi
    arr *= 2.0 ** (-c / 2.0)


def _prep_scenario(arr: np.ndarray, sqrtp: np.ndarray) -> None:
    """Householder reflection mapping |0> to the scenario amplitude vector.

    Real, symmetric, and involutive, so it serves as both the preparation
    unitary and its adjoint.
    """
    b_dim = arr.shape[0]
    u = -sqrtp.astype(np.float64).copy()
    u[0] += 1.0
    nsq = float(u @ u)
    if nsq < 1e-30:
        return
    flat = arr.reshape(b_dim, -1)
    proj = u @ flat
    flat -= np.multiply.outer((2.0 / nsq) * u, proj)


def _apply_search(arr: np.ndarray, mask: np.ndarray, schedule: AngleSchedule, adjoint: bool = False) -> int:
    """Full iterate sequence; returns oracle calls consumed (2 per iterate)."""
    l = schedule.iterations
    if not adjoint:
        for j in range(l):
            _phase_marked(arr, mask, schedule.betas[j])
            _mix_decision(arr, schedule.alphas[j])
            np.negative(arr, out=arr)
    else:
        for j in range(l - 1, -1, -1):
            _mix_decision(arr, -schedule.alphas[j])
            _phase_marked(arr, mask, -schedule.betas[j])
            np.negative(arr, out=arr)
    return 2 * l


def _apply_prep(arr: np.ndarray, sqrtp: np.ndarray, adjoint: bool = False) -> None:
    if not adjoint:
        _hadamard_decision(arr)
        _prep_scenario(arr, sqrtp)
    else:
        _prep_scenario(arr, sqrtp)
        _hadamard_decision(arr)


def _apply_marking(arr: np.ndarray, mask: np.ndarray, schedule: AngleSchedule, sqrtp: np.ndarray, adjoint: bool = False) -> int:
    """The marking operator: state prep, search, oracle mark (or its adjoint).

    Consumes depth-many oracle calls (2 per iterate plus 1 for the mark).
    """
    if not adjoint:
        _apply_prep(arr, sqrtp)
        calls = _apply_search(arr, mask, schedule)
        _mark_toggle(arr, mask)
    else:
        _mark_toggle(arr, mask)
        calls = _apply_search(arr, mask, schedule, adjoint=True)
        _apply_prep(arr, sqrtp, adjoint=True)
    return calls + 1


def _apply_estimation_step(arr: np.ndarray, mask: np.ndarray, schedule: AngleSchedule, sqrtp: np.ndarray) -> int:
    """One application of the estimation operator: marking o zero-reflection
    o adjoint marking o (-Z on the mark ancilla)."""
    _neg_z_mark(arr)
    calls = _apply_marking(arr, mask, schedule, sqrtp, adjoint=True)
    _reflect_zero(arr)
    calls += _apply_marking(arr, mask, schedule, sqrtp)
    return calls


# -- public operators ----------------------------------------------------------


def apply_target_reflection(state: StateVector, oracle: Oracle, beta: float) -> None:
    """Phase e^{-i beta} on every marked (scenario, decision) pair.

    Realized as oracle-mark / ancilla phase / oracle-unmark, so it charges
    two oracle calls.
    """
    _check_oracle(state, oracle)
    _phase_marked(state.amps, oracle.marked_mask(), beta)
    state._finish(f"target_reflection(beta={beta:.12g})", oracle, calls=2)


def apply_mixer_reflection(state: StateVector, alpha: float) -> None:
    """Reflection about the uniform decision state, acting on the decision
    register only; scenario marginals are untouched."""
    _mix_decision(state.amps, alpha)
    state._finish(f"mixer_reflection(alpha={alpha:.12g})")


def grover_iterate(state: StateVector, oracle: Oracle, alpha: float, beta: float) -> None:
    """One parameterized iterate: global minus, mixer after target."""
    _check_oracle(state, oracle)
    _phase_marked(state.amps, oracle.marked_mask(), beta)
    _mix_decision(state.amps, alpha)
    np.negative(state.amps, out=state.amps)
    state._finish(f"grover_iterate(alpha={alpha:.12g}, beta={beta:.12g})", oracle, calls=2)


def run_search(state: StateVector, oracle: Oracle, schedule: AngleSchedule) -> StateVector:
    """Apply the full iterate sequence (first schedule entry first)."""
    for j in range(schedule.iterations):
        grover_iterate(state, oracle, float(schedule.alphas[j]), float(schedule.betas[j]))
    return state


def iterate_search(state: StateVector, oracle: Oracle, schedule: AngleSchedule):
    """Generator form of run_search, yielding (iterate_index, state) after
    each iterate; useful for convergence-dynamics inspection."""
    for j in range(schedule.iterations):
        grover_iterate(state, oracle, float(schedule.alphas[j]), float(schedule.betas[j]))
        yield j + 1, state


def apply_oracle_mark(state: StateVector, oracle: Oracle) -> None:
    """XOR the oracle bit into the mark ancilla (one oracle call)."""
    _check_oracle(state, oracle)
    if not state.layout.has_mark:
        raise StateShapeError("oracle marking requires a mark ancilla")
    _mark_toggle(state.amps, oracle.marked_mask())
    state._finish("oracle_mark", oracle, calls=1)


def apply_state_prep(state: StateVector, dist: ScenarioDistribution, adjoint: bool = False) -> None:
    """The initial-state unitary (uniform decision register, scenario
    amplitudes on x), or its adjoint."""
    if dist.b != state.layout.scenario_bits:
        raise InputError("distribution does not match the scenario register")
    _apply_prep(state.amps, dist.amplitudes(), adjoint=adjoint)
    state._finish("state_prep_adjoint" if adjoint else "state_prep")


def apply_qae_operator(state: StateVector, oracle: Oracle, dist: ScenarioDistribution, schedule: AngleSchedule) -> None:
    """One application of the estimation (Grover-like) operator."""
    _check_oracle(state, oracle)
    if not state.layout.has_mark:
        raise StateShapeError("the estimation operator requires a mark ancilla")
    calls = _apply_estimation_step(state.amps, oracle.marked_mask(), schedule, dist.amplitudes())
    state._finish("estimation_operator", oracle, calls=calls)


def qft_inverse(state: StateVector, register: str = "sample") -> None:
    """Inverse discrete Fourier transform over the sample register."""
    if register != "sample":
        raise InputError(f"inverse QFT is supported on the sample register only, got {register!r}")
    if state.layout.sample_bits == 0:
        raise StateShapeError("state has no sample register")
    m_dim = state.amps.shape[3]
    state.amps = np.ascontiguousarray(np.fft.fft(state.amps, axis=3) / math.sqrt(m_dim))
    state._finish("qft_inverse")


def qft(state: StateVector, register: str = "sample") -> None:
    """Forward transform, the inverse of qft_inverse."""
    if register != "sample":
        raise InputError(f"QFT is supported on the sample register only, got {register!r}")
    if state.layout.sample_bits == 0:
        raise StateShapeError("state has no sample register")
    m_dim = state.amps.shape[3]
    state.amps = np.ascontiguousarray(np.fft.ifft(state.amps, axis=3) * math.sqrt(m_dim))
    state._finish("qft")


def phase_estimation(
    oracle: Oracle,
    dist: ScenarioDistribution,
    schedule: AngleSchedule,
    sample_bits: int,
    trace: OperatorTrace | None = None,
    return_state: bool = False,
):
    """Run the full estimation circuit and return the EXACT outcome
    distribution over the sample register (no sampling noise).

    Sample qubit j controls the 2^j-th power of the estimation operator, so
    the controlled stage consumes 2^m - 1 operator applications in total.
    """
    if sample_bits < 1:
        raise InputError(f"sample register needs at least 1 qubit, got {sample_bits}")
    layout = RegisterLayout(dist.b, oracle.c, True, sample_bits)
    _check_compat(oracle, dist)
    mask = oracle.marked_mask()
    sqrtp = dist.amplitudes()
    b_dim, c_dim, a_dim, m_dim = layout.shape

    psi = np.zeros((b_dim, c_dim, a_dim, 1), dtype=np.complex128)
    psi[0, 0, 0, 0] = 1.0
    calls = _apply_marking(psi, mask, schedule, sqrtp)
    oracle.record_calls(calls)
    if trace is not None:
        trace.record("marking", calls)

    # sample register |0..0> -> uniform (Hadamard on every sample qubit)
    amps = np.repeat(psi / math.sqrt(m_dim), m_dim, axis=3)
    state = StateVector(layout, amps, trace)
    state._finish("sample_hadamards")

    for j in range(sample_bits):
        view = state.amps.reshape(b_dim, c_dim, a_dim, m_dim >> (j + 1), 2, 1 << j)
        sub = np.ascontiguousarray(view[:, :, :, :, 1, :]).reshape(b_dim, c_dim, a_dim, -1)
        calls = 0
        for _ in range(1 << j):
            calls += _apply_estimation_step(sub, mask, schedule, sqrtp)
        view[:, :, :, :, 1, :] = sub.reshape(b_dim, c_dim, a_dim, m_dim >> (j + 1), 1 << j)
        oracle.record_calls(calls)
        if trace is not None:
            trace.record(f"ctrl_estimation_pow2^{j}", calls)
        state.check_norm()

    qft_inverse(state)
    probs = state.sample_distribution()
    return (probs, state) if return_state else probs


def sample_outcomes(probs: np.ndarray, rng: np.random.Generator, shots: int) -> np.ndarray:
    """Seeded shot sampling from an exact outcome distribution."""
    cdf = np.cumsum(probs)
    cdf = cdf / cdf[-1]
    return np.searchsorted(cdf, rng.random(shots), side="right").astype(np.int64)


def dense_operator(layout: RegisterLayout, apply_fn) -> np.ndarray:
    """Materialize an operator as a dense matrix by applying it to every
    basis state (test/debug helper; intended for small layouts)."""
    n = 1 << layout.total_qubits
    if layout.total_qubits > 14:
        raise CapacityError("dense operator materialization limited to 14 qubits")
    cols = np.zeros((n, n), dtype=np.complex128)
    for k in range(n):
        amps = np.zeros(n, dtype=np.complex128)
        amps[k] = 1.0
        state = StateVector(layout, amps.reshape(layout.shape))
        apply_fn(state)
        cols[:, k] = state.amps.reshape(-1)
    return cols


def _check_oracle(state: StateVector, oracle: Oracle) -> None:
    if oracle.b != state.layout.scenario_bits or oracle.c != state.layout.decision_bits:
        raise InputError(
            f"oracle registers (b={oracle.b}, c={oracle.c}) do not match state layout {state.layout}"
        )


def _check_compat(oracle: Oracle, dist: ScenarioDistribution) -> None:
    if oracle.b != dist.b:
        raise InputError(f"oracle has b={oracle.b} but distribution has b={dist.b}")
