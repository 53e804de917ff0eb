"""
Circuit-level depolarizing noise on the small codes. Each stabilizer generator is measured with its own ancilla;
the protocol extracts the syndrome once, repeats the extraction and decodes with the lookup table when the first
outcome is nontrivial, then reads the data qubits out destructively in the Z basis.
"""
from dataclasses import dataclass
from enum import Enum
import time
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from subsystem_codes import logger
from subsystem_codes.codes.base import SubsystemCode
from subsystem_codes.decoders.induced import LogicalOutcome
from subsystem_codes.decoders.lookup import LookupDecoder, lookup_decoder_build
from subsystem_codes.gf2 import BitVector, gf2_matmul
from subsystem_codes.metrics import NoCrossingError, crossing_point
from subsystem_codes.pauli import PauliType
from subsystem_codes.simulation.pheno import BLOCK_SIZE, SimResult, block_sizes
from subsystem_codes.utils import chunks, derive_seed, parallel_map, stream

FAULT_BATCH = 4096
SINGLE_QUBIT_PAULIS = 3
TWO_QUBIT_PAULIS = 15


class Op(Enum):
    PREP = "PREP"
    H = "H"
    CNOT = "CNOT"
    MEASURE = "MEASURE"


@dataclass(frozen=True)
class Instruction:
    op: Op
    qubits: Tuple[int, ...]

    def __post_init__(self):
        arity = 2 if self.op is Op.CNOT else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.op.value} acts on {arity} qubit(s), got {self.qubits}")
        if self.op is Op.CNOT and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"CNOT control and target coincide: {self.qubits[0]}")

    def __str__(self) -> str:
        return " ".join([self.op.value, *map(str, self.qubits)])


@dataclass(frozen=True)
class Circuit:
    """
    One syndrome-extraction round. Qubits 0..n_data-1 hold data, ancilla a is qubit n_data + a and measures
    stabilizer generator a of type ancilla_types[a]. Fault locations are instruction indices.
    """

    n_data: int
    ancilla_types: Tuple[PauliType, ...]
    instructions: Tuple[Instruction, ...]

    def __post_init__(self):
        measured = [ins.qubits[0] for ins in self.instructions if ins.op is Op.MEASURE]
        expected = list(range(self.n_data, self.n_qubits))
        if sorted(measured) != expected:
            raise ValueError(f"Every ancilla must be measured exactly once per round, measured {sorted(measured)}")
        for ins in self.instructions:
            if max(ins.qubits) >= self.n_qubits:
                raise ValueError(f"{ins} addresses a qubit outside the {self.n_qubits}-qubit roster")

    @property
    def n_ancillas(self) -> int:
        return len(self.ancilla_types)

    @property
    def n_qubits(self) -> int:
        return self.n_data + self.n_ancillas

    def cnot_support(self, ancilla: int) -> List[int]:
        """Data qubits the ancilla interacts with, in gate order."""
        qubit = self.n_data + ancilla
        return [
            ins.qubits[1] if ins.qubits[0] == qubit else ins.qubits[0]
            for ins in self.instructions
            if ins.op is Op.CNOT and qubit in ins.qubits
        ]

    def dump(self) -> str:
        lines = [f"# data {self.n_data} qubits {self.n_qubits}"]
        current = None
        for ins in self.instructions:
            ancilla = max(ins.qubits) - self.n_data
            if ancilla != current and ancilla >= 0:
                current = ancilla
                lines.append(f"# ancilla {ancilla} {self.ancilla_types[ancilla].value}")
            lines.append(str(ins))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dump(cls, text: str) -> "Circuit":
        n_data, types, instructions = None, {}, []
        for number, line in enumerate(text.splitlines(), start=1):
            fields = line.split()
            if not fields:
                continue
            if fields[0] == "#":
                if fields[1:2] == ["data"]:
                    n_data = int(fields[2])
                elif fields[1:2] == ["ancilla"]:
                    types[int(fields[2])] = PauliType(fields[3])
                continue
            try:
                instructions.append(Instruction(Op(fields[0]), tuple(int(q) for q in fields[1:])))
            except ValueError as e:
                raise ValueError(f"Line {number} of circuit dump: {e}") from e
        if n_data is None:
            raise ValueError("Circuit dump lacks the '# data N qubits M' header")
        return cls(n_data, tuple(types[a] for a in sorted(types)), tuple(instructions))


def build_extraction_circuit(code: SubsystemCode) -> Circuit:
    """
    X stabilizers first, then Z. An X-type ancilla is prepared in |+> and controls CNOTs onto its support
    column by column; a Z-type ancilla is the target of CNOTs from its support row by row. Gauge operators are
    therefore visited one at a time and a propagated ancilla fault stays within one of them.
    """
    layout = code.layout
    instructions: List[Instruction] = []
    types: List[PauliType] = []

    def visit_order(support: Iterable[int], kind: PauliType) -> List[int]:
        def key(q):
            tag, i, j = layout[q]
            return (tag.value, j, i) if kind is PauliType.X else (tag.value, i, j)

        return sorted(support, key=key)

    for kind in (PauliType.X, PauliType.Z):
        for support in code.stabilizers(kind).row_supports():
            ancilla = code.N + len(types)
            types.append(kind)
            instructions.append(Instruction(Op.PREP, (ancilla,)))
            if kind is PauliType.X:
                instructions.append(Instruction(Op.H, (ancilla,)))
                instructions.extend(Instruction(Op.CNOT, (ancilla, q)) for q in visit_order(support, kind))
                instructions.append(Instruction(Op.H, (ancilla,)))
            else:
                instructions.extend(Instruction(Op.CNOT, (q, ancilla)) for q in visit_order(support, kind))
            instructions.append(Instruction(Op.MEASURE, (ancilla,)))
    circuit = Circuit(code.N, tuple(types), tuple(instructions))
    logger.debug(f"Extraction circuit for {code.name}: {circuit.n_qubits} qubits, {len(instructions)} instructions")
    return circuit


@dataclass(frozen=True)
class DepolarizingModel:
    """One error rate p for gates, measurements, memory and readout unless overridden."""

    p: float
    p_meas: Optional[float] = None
    p_memory: Optional[float] = None
    p_readout: Optional[float] = None

    def __post_init__(self):
        for name in ("p_meas", "p_memory", "p_readout"):
            if getattr(self, name) is None:
                object.__setattr__(self, name, self.p)
        for name in ("p", "p_meas", "p_memory", "p_readout"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

    @classmethod
    def noiseless(cls) -> "DepolarizingModel":
        return cls(0.0)


class PauliFrame:
    """X and Z flip records of every qubit for a batch of shots, shape (qubits, shots)."""

    def __init__(self, n_qubits: int, shots: int):
        self.x = np.zeros((n_qubits, shots), dtype=bool)
        self.z = np.zeros((n_qubits, shots), dtype=bool)

    @property
    def shots(self) -> int:
        return self.x.shape[1]

    def prep(self, q: int):
        self.x[q] = False
        self.z[q] = False

    def hadamard(self, q: int):
        self.x[q], self.z[q] = self.z[q].copy(), self.x[q].copy()

    def cnot(self, control: int, target: int):
        self.x[target] ^= self.x[control]
        self.z[control] ^= self.z[target]

    def apply(self, q: int, x, z):
        self.x[q] ^= np.asarray(x, dtype=bool)
        self.z[q] ^= np.asarray(z, dtype=bool)

    def measure(self, q: int) -> np.ndarray:
        """Z-basis outcome flips."""
        return self.x[q].astype(np.uint8)

    def take(self, shots: np.ndarray) -> "PauliFrame":
        frame = PauliFrame(0, 0)
        frame.x, frame.z = self.x[:, shots], self.z[:, shots]
        return frame

    def put(self, shots: np.ndarray, other: "PauliFrame"):
        self.x[:, shots] = other.x
        self.z[:, shots] = other.z


@dataclass(frozen=True)
class Fault:
    """
    A single fault. stage is "memory" or "readout" (location = data qubit) or "round1" (location = instruction).
    pauli encodes (x, z) bits as 2x + z for one qubit and 8xc + 4zc + 2xt + zt after a CNOT; readout and
    measurement faults use pauli = 1.
    """

    stage: str
    location: int
    pauli: int


def _single_bits(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return (values >> 1) & 1, values & 1


class _NoiseSource:
    def __init__(self, rng: Optional[np.random.Generator], shots: int, injected: Optional[Dict] = None):
        self.rng = rng
        self.shots = shots
        self.injected = injected or {}

    def draw(self, stage: str, location: int, kinds: int, p: float) -> np.ndarray:
        """Per-shot fault label in 0..kinds, 0 meaning no fault; nonzero labels are equally likely."""
        values = np.zeros(self.shots, dtype=np.int64)
        if p > 0 and self.rng is not None:
            r = self.rng.random(self.shots)
            hit = r < p
            values[hit] = 1 + np.minimum(kinds - 1, (r[hit] * kinds / p).astype(np.int64))
        if (stage, location) in self.injected:
            shots, labels = self.injected[(stage, location)]
            values[shots] = labels
        return values


def _extraction_round(
    circuit: Circuit, frame: PauliFrame, noise: _NoiseSource, model: DepolarizingModel, stage: str
) -> np.ndarray:
    outcomes = np.zeros((circuit.n_ancillas, frame.shots), dtype=np.uint8)
    for location, ins in enumerate(circuit.instructions):
        if ins.op is Op.PREP:
            frame.prep(ins.qubits[0])
        elif ins.op is Op.H:
            q = ins.qubits[0]
            frame.hadamard(q)
            frame.apply(q, *_single_bits(noise.draw(stage, location, SINGLE_QUBIT_PAULIS, model.p)))
        elif ins.op is Op.CNOT:
            control, target = ins.qubits
            frame.cnot(control, target)
            labels = noise.draw(stage, location, TWO_QUBIT_PAULIS, model.p)
            frame.apply(control, (labels >> 3) & 1, (labels >> 2) & 1)
            frame.apply(target, (labels >> 1) & 1, labels & 1)
        else:
            q = ins.qubits[0]
            flips = noise.draw(stage, location, 1, model.p_meas).astype(np.uint8)
            outcomes[q - circuit.n_data] = frame.measure(q) ^ flips
    return outcomes


@dataclass
class _ProtocolOutcome:
    flips: np.ndarray
    second_round: np.ndarray
    unknown: np.ndarray


def _run_protocol(
    code: SubsystemCode,
    circuit: Circuit,
    decoder: LookupDecoder,
    model: DepolarizingModel,
    shots: int,
    rng: Optional[np.random.Generator],
    injected: Optional[Dict] = None,
) -> _ProtocolOutcome:
    n, mx = circuit.n_data, code.stab_x.rows
    noise = _NoiseSource(rng, shots, injected)
    frame = PauliFrame(circuit.n_qubits, shots)
    for q in range(n):
        frame.apply(q, *_single_bits(noise.draw("memory", q, SINGLE_QUBIT_PAULIS, model.p_memory)))
    first = _extraction_round(circuit, frame, noise, model, "round1")
    repeat = first.any(axis=0)
    if repeat.any():
        shots_again = np.flatnonzero(repeat)
        again = frame.take(shots_again)
        second = _extraction_round(circuit, again, _NoiseSource(rng, shots_again.size), model, "round2")
        x_corr, _ = decoder.correct(PauliType.X, second[mx:].T)
        z_corr, _ = decoder.correct(PauliType.Z, second[:mx].T)
        again.x[:n] ^= x_corr.T.astype(bool)
        again.z[:n] ^= z_corr.T.astype(bool)
        frame.put(shots_again, again)
    readout_flips = np.stack([noise.draw("readout", q, 1, model.p_readout) for q in range(n)]).astype(np.uint8)
    readout = (frame.x[:n].astype(np.uint8) ^ readout_flips).T
    correction, known = decoder.correct(PauliType.X, decoder.syndromes(PauliType.X, readout))
    readout ^= correction
    flips = gf2_matmul(readout, code.logical_z.to_array().T).astype(bool)
    flips[~known] = True
    return _ProtocolOutcome(flips, repeat, ~known)


def _inject(faults: Sequence[Fault]) -> Dict[Tuple[str, int], Tuple[np.ndarray, np.ndarray]]:
    grouped: Dict[Tuple[str, int], Tuple[List[int], List[int]]] = {}
    for shot, fault in enumerate(faults):
        shots, labels = grouped.setdefault((fault.stage, fault.location), ([], []))
        shots.append(shot)
        labels.append(fault.pauli)
    return {key: (np.array(shots), np.array(labels)) for key, (shots, labels) in grouped.items()}


def enumerate_single_faults(circuit: Circuit, code: Optional[SubsystemCode] = None) -> List[Fault]:
    """Every single fault: memory and readout on each data qubit and every Pauli after each gate of round one."""
    n = circuit.n_data if code is None else code.N
    faults = [Fault("memory", q, pauli) for q in range(n) for pauli in range(1, SINGLE_QUBIT_PAULIS + 1)]
    for location, ins in enumerate(circuit.instructions):
        kinds = {Op.H: SINGLE_QUBIT_PAULIS, Op.CNOT: TWO_QUBIT_PAULIS, Op.MEASURE: 1}.get(ins.op, 0)
        faults.extend(Fault("round1", location, pauli) for pauli in range(1, kinds + 1))
    faults.extend(Fault("readout", q, 1) for q in range(n))
    return faults


def run_faults(
    code: SubsystemCode, circuit: Circuit, faults: Sequence[Fault], decoder: Optional[LookupDecoder] = None
) -> np.ndarray:
    """Logical readout flips (faults x K) of the protocol with exactly one injected fault per row."""
    decoder = decoder or lookup_decoder_build(code)
    model = DepolarizingModel.noiseless()
    outcomes = [
        _run_protocol(code, circuit, decoder, model, len(batch), None, _inject(batch)).flips
        for batch in chunks(list(faults), FAULT_BATCH)
    ]
    return np.concatenate(outcomes) if outcomes else np.zeros((0, code.K), dtype=bool)


def run_protocol_trial(
    code: SubsystemCode,
    circuit: Circuit,
    model: DepolarizingModel,
    seed: int = 0,
    fault: Optional[Fault] = None,
    decoder: Optional[LookupDecoder] = None,
) -> LogicalOutcome:
    """
    One run of the adaptive protocol from an error-free logical |0...0>. With `fault` given, only that fault
    occurs and `model` is ignored.
    """
    decoder = decoder or lookup_decoder_build(code)
    if fault is not None:
        flips = run_faults(code, circuit, [fault], decoder)[0]
    else:
        flips = _run_protocol(code, circuit, decoder, model, 1, stream(seed, 0)).flips[0]
    return LogicalOutcome(BitVector.from_array(flips.astype(np.uint8)), PauliType.X)


def _protocol_block(job) -> Tuple[int, np.ndarray, int, int]:
    code, circuit, decoder, model, seed, block, shots = job
    outcome = _run_protocol(code, circuit, decoder, model, shots, stream(seed, block))
    return (
        int(outcome.flips.any(axis=1).sum()),
        outcome.flips.sum(axis=0).astype(np.int64),
        int(outcome.second_round.sum()),
        int(outcome.unknown.sum()),
    )


def simulate_protocol(
    code: SubsystemCode,
    circuit: Optional[Circuit],
    model: DepolarizingModel,
    trials: int,
    seed: int = 0,
    n_jobs: int = 1,
    decoder: Optional[LookupDecoder] = None,
    code_id: str = "",
) -> SimResult:
    """Monte Carlo over `trials` protocol runs, in blocks of BLOCK_SIZE seeded by (seed, block index)."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    start = time.perf_counter()
    circuit = circuit or build_extraction_circuit(code)
    decoder = decoder or lookup_decoder_build(code)
    jobs = [
        (code, circuit, decoder, model, seed, block, shots)
        for block, shots in enumerate(block_sizes(trials, BLOCK_SIZE))
    ]
    counts = parallel_map(_protocol_block, jobs, n_jobs)
    block_failures = sum(c[0] for c in counts)
    per_qubit = np.sum([c[1] for c in counts], axis=0)
    repeated, unknown = sum(c[2] for c in counts), sum(c[3] for c in counts)
    result = SimResult(
        p=model.p,
        trials=trials,
        block_failures=block_failures,
        per_qubit_failures=per_qubit,
        x_block_failures=block_failures,
        x_qubit_failures=per_qubit.copy(),
        unresolved=unknown,
        wall_time=time.perf_counter() - start,
        seed=seed,
        p_meas=model.p_meas,
        code_id=code_id or code.name,
    )
    logger.info(
        f"{result.code_id} circuit p={model.p:.3g}: {block_failures}/{trials} block failures, "
        f"{repeated} second rounds, {result.wall_time:.1f}s"
    )
    if unknown:
        logger.warning(f"{unknown} readouts had a syndrome outside the lookup table")
    return result


@dataclass
class PseudothresholdResult:
    block: float
    per_qubit: Optional[float]
    qubits: List[int]
    results: List[SimResult]


def protocol_sweep(
    code: SubsystemCode,
    p_grid: Sequence[float],
    trials: Union[int, Sequence[int]],
    seed: int = 0,
    n_jobs: int = 1,
    circuit: Optional[Circuit] = None,
) -> List[SimResult]:
    """simulate_protocol at every grid point; point i is seeded with derive_seed(seed, i)."""
    schedule = [trials] * len(p_grid) if isinstance(trials, int) else list(trials)
    if len(schedule) != len(p_grid):
        raise ValueError(f"{len(schedule)} trial counts for {len(p_grid)} grid points")
    circuit = circuit or build_extraction_circuit(code)
    decoder = lookup_decoder_build(code)
    return [
        simulate_protocol(code, circuit, DepolarizingModel(p), n, derive_seed(seed, i), n_jobs, decoder)
        for i, (p, n) in enumerate(zip(p_grid, schedule))
    ]


def threshold_from_results(
    results: Sequence[SimResult], qubits: Optional[Sequence[int]] = None
) -> PseudothresholdResult:
    """
    Block crossing of P_L = p, plus the crossing of the mean failure rate of the logical qubits in `qubits`
    (default all). Raises NoCrossingError when the block curve does not cross.
    """
    p_values = [r.p for r in results]
    block = crossing_point(p_values, [r.block_rate for r in results])
    k = len(results[0].per_qubit_failures)
    chosen = list(range(k)) if qubits is None else list(qubits)
    try:
        per_qubit = crossing_point(p_values, [float(np.mean(r.per_qubit_rates[chosen])) for r in results])
    except NoCrossingError as e:
        logger.warning(f"No per-qubit pseudothreshold for qubits {chosen}: {e}")
        per_qubit = None
    logger.info(f"{results[0].code_id} pseudothreshold: block {block:.3g}, qubits {chosen} {per_qubit}")
    return PseudothresholdResult(block, per_qubit, chosen, list(results))


def pseudothreshold(
    code: SubsystemCode,
    p_grid: Sequence[float],
    trials: Union[int, Sequence[int]],
    seed: int = 0,
    qubits: Optional[Sequence[int]] = None,
    n_jobs: int = 1,
    circuit: Optional[Circuit] = None,
) -> PseudothresholdResult:
    """Physical rate where the protocol's block failure rate equals p, estimated on `p_grid`."""
    if not p_grid:
        raise NoCrossingError("Empty grid")
    return threshold_from_results(protocol_sweep(code, p_grid, trials, seed, n_jobs, circuit), qubits)
