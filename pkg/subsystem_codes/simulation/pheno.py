"""
Phenomenological noise: independent bit and phase flips on the data qubits at p_data and a flipped outcome for
every stabilizer generator at p_meas. X and Z errors are sampled, decoded and classified separately.
"""
from dataclasses import dataclass, field
import math
import time
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import binom

from subsystem_codes import logger
from subsystem_codes.codes.base import SubsystemCode
from subsystem_codes.decoders.bp import DEFAULT_MAX_ITERS, BpConfig
from subsystem_codes.decoders.induced import InducedDecoder, classify_residual_batch, residual_syndromes
from subsystem_codes.metrics import Estimator, binomial_std
from subsystem_codes.pauli import PauliType
from subsystem_codes.utils import derive_seed, parallel_map, stream

BLOCK_SIZE = 1024
ERROR_TYPES = ("x", "z", "any")


@dataclass(frozen=True)
class PhenoModel:
    p_data: float
    p_meas: Optional[float] = None

    def __post_init__(self):
        if self.p_meas is None:
            object.__setattr__(self, "p_meas", self.p_data)
        for label, value in (("p_data", self.p_data), ("p_meas", self.p_meas)):
            if not 0 <= value < 1:
                raise ValueError(f"{label} must lie in [0, 1), got {value}")

    def decoder_config(self, max_iters: int = DEFAULT_MAX_ITERS) -> BpConfig:
        """Noisy-round config; measurement-error nodes are only switched on when outcomes can be wrong."""
        measured = self.p_meas > 0
        return BpConfig.for_channel(
            self.p_data, self.p_meas if measured else None, max_iters=max_iters, measurement_errors=measured
        )


@dataclass
class SimResult:
    p: float
    trials: int
    block_failures: int
    per_qubit_failures: np.ndarray
    x_block_failures: int = 0
    z_block_failures: int = 0
    x_qubit_failures: Optional[np.ndarray] = None
    z_qubit_failures: Optional[np.ndarray] = None
    unresolved: int = 0
    unconverged: int = 0
    wall_time: float = 0.0
    seed: int = 0
    estimator: Estimator = Estimator.direct
    p_meas: Optional[float] = None
    code_id: str = ""

    def __post_init__(self):
        k = len(self.per_qubit_failures)
        if self.x_qubit_failures is None:
            self.x_qubit_failures = np.zeros(k, dtype=np.int64)
        if self.z_qubit_failures is None:
            self.z_qubit_failures = np.zeros(k, dtype=np.int64)

    def block_count(self, error_type: str = "any") -> int:
        return {"x": self.x_block_failures, "z": self.z_block_failures, "any": self.block_failures}[error_type]

    def qubit_counts(self, error_type: str = "any") -> np.ndarray:
        return {"x": self.x_qubit_failures, "z": self.z_qubit_failures, "any": self.per_qubit_failures}[error_type]

    @property
    def block_rate(self) -> float:
        return self.block_failures / self.trials

    @property
    def block_std(self) -> float:
        return float(binomial_std(self.block_failures, self.trials))

    @property
    def per_qubit_rates(self) -> np.ndarray:
        return self.per_qubit_failures / self.trials

    def rate(self, error_type: str = "any") -> float:
        return self.block_count(error_type) / self.trials


@dataclass
class _Tally:
    """Failure counts of one block of trials; blocks add up in any order."""

    trials: int
    x_block: int
    z_block: int
    any_block: int
    x_qubits: np.ndarray
    z_qubits: np.ndarray
    any_qubits: np.ndarray
    unresolved: int
    unconverged: int

    def __add__(self, other: "_Tally") -> "_Tally":
        return _Tally(
            *(getattr(self, name) + getattr(other, name) for name in self.__dataclass_fields__),
        )


def _decode_type(
    code: SubsystemCode,
    decoder: InducedDecoder,
    kind: PauliType,
    errors: np.ndarray,
    meas_flips: np.ndarray,
    noisy_cfg: BpConfig,
    perfect_cfg: BpConfig,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    One noisy decode followed by one perfect-measurement decode of what is left.
    :return: (shots x K logical flips, unresolved flags, unconverged flags)
    """
    syndromes = residual_syndromes(code, errors, kind) ^ meas_flips
    correction, converged = decoder.correct(kind, syndromes, noisy_cfg)
    residual = errors ^ correction
    cleanup, cleanup_converged = decoder.correct(kind, residual_syndromes(code, residual, kind), perfect_cfg)
    residual ^= cleanup
    flips, resolved = classify_residual_batch(code, residual, kind)
    flips[~resolved] = 1
    return flips.astype(bool), ~resolved, ~(converged & cleanup_converged)


def _run_block(
    code: SubsystemCode, decoder: InducedDecoder, model: PhenoModel, shots: int, rng: np.random.Generator
) -> _Tally:
    noisy_cfg = model.decoder_config()
    perfect_cfg = BpConfig.for_channel(model.p_data, max_iters=noisy_cfg.max_iters)
    outcomes = {}
    for kind in (PauliType.X, PauliType.Z):
        m = code.stabilizers(kind.opposite).rows
        errors = (rng.random((shots, code.N)) < model.p_data).astype(np.uint8)
        meas_flips = (rng.random((shots, m)) < model.p_meas).astype(np.uint8)
        outcomes[kind] = _decode_type(code, decoder, kind, errors, meas_flips, noisy_cfg, perfect_cfg)
    x_flips, x_unresolved, x_unconv = outcomes[PauliType.X]
    z_flips, z_unresolved, z_unconv = outcomes[PauliType.Z]
    any_flips = x_flips | z_flips
    return _Tally(
        trials=shots,
        x_block=int(x_flips.any(axis=1).sum()),
        z_block=int(z_flips.any(axis=1).sum()),
        any_block=int(any_flips.any(axis=1).sum()),
        x_qubits=x_flips.sum(axis=0).astype(np.int64),
        z_qubits=z_flips.sum(axis=0).astype(np.int64),
        any_qubits=any_flips.sum(axis=0).astype(np.int64),
        unresolved=int((x_unresolved | z_unresolved).sum()),
        unconverged=int((x_unconv | z_unconv).sum()),
    )


def _block_job(job) -> _Tally:
    code, decoder, model, seed, block, shots = job
    return _run_block(code, decoder, model, shots, stream(seed, block))


def block_sizes(trials: int, block_size: int = BLOCK_SIZE) -> List[int]:
    return [min(block_size, trials - start) for start in range(0, trials, block_size)]


def run_trials(
    code: SubsystemCode,
    decoder: InducedDecoder,
    model: PhenoModel,
    trials: int,
    seed: int = 0,
    n_jobs: int = 1,
    code_id: str = "",
) -> SimResult:
    """
    Monte Carlo estimate of the logical failure rates at one noise point.
    Trials run in blocks of BLOCK_SIZE, block b drawing from stream(seed, b), so counts do not depend on n_jobs.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    start = time.perf_counter()
    jobs = [(code, decoder, model, seed, block, shots) for block, shots in enumerate(block_sizes(trials))]
    tallies = parallel_map(_block_job, jobs, n_jobs)
    total = tallies[0]
    for tally in tallies[1:]:
        total = total + tally
    result = SimResult(
        p=model.p_data,
        trials=trials,
        block_failures=total.any_block,
        per_qubit_failures=total.any_qubits,
        x_block_failures=total.x_block,
        z_block_failures=total.z_block,
        x_qubit_failures=total.x_qubits,
        z_qubit_failures=total.z_qubits,
        unresolved=total.unresolved,
        unconverged=total.unconverged,
        wall_time=time.perf_counter() - start,
        seed=seed,
        p_meas=model.p_meas,
        code_id=code_id or code.name,
    )
    logger.info(
        f"{result.code_id} p={model.p_data:.3g}: {result.block_failures}/{trials} block failures "
        f"(x {result.x_block_failures}, z {result.z_block_failures}) in {result.wall_time:.1f}s"
    )
    if total.unresolved:
        logger.warning(f"{total.unresolved} trials left a nonzero syndrome after the perfect round")
    if total.unconverged:
        logger.debug(f"{total.unconverged} trials had an unconverged classical decode")
    return result


@dataclass
class ImportanceResult:
    """
    Failure counts conditioned on the number of faults w among the error locations of each Pauli type.
    P_L(p) = sum_w Binom(w; loci, p) P(fail | w), plus an untracked tail above weight_max.
    """

    loci: Dict[str, int]
    weights: List[int]
    samples: Dict[str, np.ndarray]
    failures: Dict[str, np.ndarray]
    qubit_failures: Dict[str, np.ndarray]
    seed: int = 0
    code_id: str = ""
    includes_measurements: bool = True
    wall_time: float = 0.0
    K: int = field(default=0)

    def conditional_rates(self, error_type: str) -> np.ndarray:
        return self.failures[error_type] / np.maximum(self.samples[error_type], 1)

    def _single(self, error_type: str, p: float, counts: np.ndarray) -> Tuple[float, float]:
        pmf = binom.pmf(self.weights, self.loci[error_type], p)
        samples = np.maximum(self.samples[error_type], 1)
        rates = counts / samples
        estimate = float(np.sum(pmf * rates))
        variance = float(np.sum(pmf**2 * rates * (1 - rates) / samples))
        return estimate, math.sqrt(variance)

    def tail_mass(self, p: float, error_type: str) -> float:
        return float(binom.sf(max(self.weights), self.loci[error_type], p))

    def at(self, p: float, error_type: str = "any") -> Tuple[float, float, float]:
        """(P_L, standard error, probability mass of the unsampled weights) at physical rate p."""
        x, sx = self._single("x", p, self.failures["x"])
        z, sz = self._single("z", p, self.failures["z"])
        if error_type == "x":
            return x, sx, self.tail_mass(p, "x")
        if error_type == "z":
            return z, sz, self.tail_mass(p, "z")
        combined = 1 - (1 - x) * (1 - z)
        std = math.sqrt(((1 - z) * sx) ** 2 + ((1 - x) * sz) ** 2)
        return combined, std, 1 - (1 - self.tail_mass(p, "x")) * (1 - self.tail_mass(p, "z"))

    def qubit_at(self, p: float, error_type: str = "any") -> Tuple[np.ndarray, np.ndarray]:
        """Per-logical-qubit (P_L, standard error) at physical rate p."""
        per_type = {}
        for kind in ("x", "z"):
            pairs = [self._single(kind, p, self.qubit_failures[kind][:, i]) for i in range(self.K)]
            per_type[kind] = (np.array([e for e, _ in pairs]), np.array([s for _, s in pairs]))
        if error_type in ("x", "z"):
            return per_type[error_type]
        (x, sx), (z, sz) = per_type["x"], per_type["z"]
        return 1 - (1 - x) * (1 - z), np.sqrt(((1 - z) * sx) ** 2 + ((1 - x) * sz) ** 2)


def _sample_weight(rng: np.random.Generator, shots: int, loci: int, weight: int) -> np.ndarray:
    """Uniformly random fault sets of exactly `weight` loci."""
    faults = np.zeros((shots, loci), dtype=np.uint8)
    if weight:
        chosen = np.argsort(rng.random((shots, loci)), axis=1)[:, :weight]
        np.put_along_axis(faults, chosen, 1, axis=1)
    return faults


def run_importance(
    code: SubsystemCode,
    decoder: InducedDecoder,
    model: PhenoModel,
    weight_max: int,
    samples_per_weight: int,
    seed: int = 0,
    code_id: str = "",
) -> ImportanceResult:
    """
    Stratified sampling over the total number of faults on data and measurement loci.
    The decoder runs with the priors of `model`; measurement loci are included when model.p_meas > 0, which
    then has to equal model.p_data so that every fault set of a given size is equally likely.
    """
    if weight_max < 1:
        raise ValueError(f"weight_max must be >= 1, got {weight_max}")
    if samples_per_weight < 1:
        raise ValueError(f"samples_per_weight must be >= 1, got {samples_per_weight}")
    with_measurements = model.p_meas > 0
    if with_measurements and not math.isclose(model.p_meas, model.p_data):
        raise ValueError(f"Importance sampling needs p_meas in {{0, p_data}}, got p_meas={model.p_meas}")
    start = time.perf_counter()
    noisy_cfg = model.decoder_config()
    perfect_cfg = BpConfig.for_channel(model.p_data, max_iters=noisy_cfg.max_iters)
    weights = list(range(weight_max + 1))
    samples, failures, qubit_failures = {}, {}, {}
    loci_per_type = {}
    for t, kind in enumerate((PauliType.X, PauliType.Z)):
        label = kind.value.lower()
        m = code.stabilizers(kind.opposite).rows if with_measurements else 0
        loci = code.N + m
        loci_per_type[label] = loci
        counts = np.zeros(len(weights), dtype=np.int64)
        qubit_counts = np.zeros((len(weights), code.K), dtype=np.int64)
        for w in weights:
            if w > loci:
                continue
            rng = stream(seed, t, w)
            faults = _sample_weight(rng, samples_per_weight, loci, w)
            errors = faults[:, : code.N]
            if with_measurements:
                meas_flips = faults[:, code.N :]
            else:
                meas_flips = np.zeros((samples_per_weight, code.stabilizers(kind.opposite).rows), dtype=np.uint8)
            flips, _, _ = _decode_type(code, decoder, kind, errors, meas_flips, noisy_cfg, perfect_cfg)
            counts[w] = int(flips.any(axis=1).sum())
            qubit_counts[w] = flips.sum(axis=0)
            logger.debug(f"{kind.value} stratum w={w}: {counts[w]}/{samples_per_weight} failures")
        samples[label] = np.array([samples_per_weight if w <= loci else 0 for w in weights], dtype=np.int64)
        failures[label] = counts
        qubit_failures[label] = qubit_counts
    result = ImportanceResult(
        loci=loci_per_type,
        weights=weights,
        samples=samples,
        failures=failures,
        qubit_failures=qubit_failures,
        seed=seed,
        code_id=code_id or code.name,
        includes_measurements=with_measurements,
        wall_time=time.perf_counter() - start,
        K=code.K,
    )
    logger.info(f"Importance sampling of {result.code_id} up to weight {weight_max} took {result.wall_time:.1f}s")
    return result


def trials_schedule(
    p_grid: Sequence[float],
    target_failures: int = 100,
    cap: int = 1_000_000,
    floor: int = 1_000,
    exponent: float = 2.0,
    amplitude: float = 1.0,
) -> List[int]:
    """
    Trials per grid point aiming at `target_failures` failures under the guess P_L = amplitude * p**exponent,
    clipped to [floor, cap]; lower p gets more trials. Noiseless points cannot fail and get `floor` trials.
    """
    schedule = []
    for p in p_grid:
        if p <= 0:
            schedule.append(int(min(cap, floor)))
            continue
        expected = min(1.0, amplitude * p**exponent)
        trials = math.ceil(target_failures / expected) if expected > 0 else cap
        schedule.append(int(min(cap, max(floor, trials))))
    return schedule


def sweep(
    code: SubsystemCode,
    decoder: InducedDecoder,
    p_grid: Sequence[float],
    trials: Union[int, Sequence[int]],
    seed: int = 0,
    p_meas: Optional[float] = None,
    n_jobs: int = 1,
    code_id: str = "",
    csv_path=None,
) -> List[SimResult]:
    """
    run_trials over a grid of p; point i is seeded with derive_seed(seed, i). p_meas=None keeps p_meas = p.
    Writes the CSV (and a gnuplot .dat next to it) when `csv_path` is given.
    """
    schedule = [trials] * len(p_grid) if isinstance(trials, int) else list(trials)
    if len(schedule) != len(p_grid):
        raise ValueError(f"{len(schedule)} trial counts for {len(p_grid)} grid points")
    results = []
    for i, (p, n) in enumerate(zip(p_grid, schedule)):
        model = PhenoModel(p, p if p_meas is None else p_meas)
        results.append(run_trials(code, decoder, model, n, derive_seed(seed, i), n_jobs, code_id))
    if csv_path is not None and results:
        from subsystem_codes.evaluation import write_results

        write_results(code, results, csv_path)
    return results
