"""
Induced decoders: a BBS or SHP syndrome is turned into classical decoding problems on the underlying codes,
and the classical bit corrections are lifted back to single-qubit corrections on whole rows or columns.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from subsystem_codes.codes.base import SubsystemCode
from subsystem_codes.codes.bbs import BBSCode
from subsystem_codes.codes.shp import SHPCode
from subsystem_codes.decoders.bp import BpBatchResult, BpConfig, BpDecoder
from subsystem_codes.decoders.exact import ExactDecoder
from subsystem_codes.gf2 import BinaryMatrix, BitVector, gf2_matmul
from subsystem_codes.pauli import PauliOp, PauliType

STRATEGIES = ("bp", "exact", "auto")


@dataclass
class SyndromeFrame:
    x_syndrome: BitVector
    z_syndrome: BitVector

    @classmethod
    def of_error(cls, code: SubsystemCode, error: PauliOp) -> "SyndromeFrame":
        x_syndrome, z_syndrome = code.syndrome(error)
        return cls(BitVector.from_array(x_syndrome), BitVector.from_array(z_syndrome))


@dataclass
class CorrectionFrame:
    x_corr: BitVector
    z_corr: BitVector
    converged: bool = True

    def as_pauli(self) -> PauliOp:
        return PauliOp(self.x_corr, self.z_corr)


@dataclass
class LogicalOutcome:
    per_qubit_flips: BitVector
    error_type: PauliType

    @property
    def block_failure(self) -> bool:
        return self.per_qubit_flips.any()


class ClassicalDecoder:
    """Decodes one classical parity-check matrix with BP, the exact table, or whichever fits ("auto")."""

    def __init__(self, H: BinaryMatrix, strategy: str = "auto"):
        if strategy not in STRATEGIES:
            raise ValueError(f"Unknown classical strategy {strategy!r}, expected one of {STRATEGIES}")
        self.H = H
        self.strategy = strategy
        self.bp = BpDecoder(H)
        self.exact = ExactDecoder(H)

    def uses_exact(self, cfg: BpConfig) -> bool:
        if self.strategy == "auto":
            return ExactDecoder.feasible(self.H, cfg.measurement_errors)
        return self.strategy == "exact"

    def decode_batch(self, cfg: BpConfig, syndromes: np.ndarray) -> BpBatchResult:
        if self.H.rows == 0:
            batch = np.atleast_2d(syndromes).shape[0]
            return BpBatchResult(
                data_corrections=np.zeros((batch, self.H.cols), dtype=np.uint8),
                meas_corrections=np.zeros((batch, 0), dtype=np.uint8),
                converged=np.ones(batch, dtype=bool),
                iterations=np.zeros(batch, dtype=np.int64),
                posterior_llrs=np.zeros((batch, 0)),
            )
        decoder = self.exact if self.uses_exact(cfg) else self.bp
        return decoder.decode_batch(cfg, syndromes)


class InducedDecoder(ABC):
    def __init__(self, code: SubsystemCode, classical: str = "auto"):
        self.code = code
        self.classical = classical

    @abstractmethod
    def correct_x_errors(self, z_syndromes: np.ndarray, cfg: BpConfig) -> Tuple[np.ndarray, np.ndarray]:
        """
        X corrections for a batch of Z-stabilizer syndromes.
        :return: (shots x N corrections, per-shot convergence of every classical decode involved)
        """
        pass

    @abstractmethod
    def correct_z_errors(self, x_syndromes: np.ndarray, cfg: BpConfig) -> Tuple[np.ndarray, np.ndarray]:
        pass

    def correct(self, kind: PauliType, syndromes: np.ndarray, cfg: BpConfig) -> Tuple[np.ndarray, np.ndarray]:
        """Corrections for errors of the given type; X errors are seen by the Z stabilizers and vice versa."""
        syndromes = np.atleast_2d(np.asarray(syndromes, dtype=np.uint8))
        if kind is PauliType.X:
            return self.correct_x_errors(syndromes, cfg)
        return self.correct_z_errors(syndromes, cfg)

    def decode(self, syndrome: SyndromeFrame, cfg: BpConfig) -> CorrectionFrame:
        x_corr, x_ok = self.correct_x_errors(syndrome.z_syndrome.to_array()[None, :], cfg)
        z_corr, z_ok = self.correct_z_errors(syndrome.x_syndrome.to_array()[None, :], cfg)
        return CorrectionFrame(
            BitVector.from_array(x_corr[0]), BitVector.from_array(z_corr[0]), bool(x_ok[0] and z_ok[0])
        )


class BBSInducedDecoder(InducedDecoder):
    """
    X errors are decoded through their column parities, which form a word of the column code checked by the Z
    stabilizers; each flipped classical bit becomes an X on the first qubit of its column. Z errors likewise
    through row parities.
    """

    def __init__(self, code: BBSCode, classical: str = "auto"):
        super().__init__(code, classical)
        self.column_decoder = ClassicalDecoder(code.h2_basis, classical)
        self.row_decoder = ClassicalDecoder(code.h1_basis, classical)
        self.column_targets = np.array([g[0] if g else -1 for g in code.lattice.column_groups()], dtype=np.int64)
        self.row_targets = np.array([g[0] if g else -1 for g in code.lattice.row_groups()], dtype=np.int64)

    def _lift(self, bits: np.ndarray, targets: np.ndarray) -> np.ndarray:
        out = np.zeros((bits.shape[0], self.code.N), dtype=np.uint8)
        present = targets >= 0
        out[:, targets[present]] = bits[:, present]
        return out

    def correct_x_errors(self, z_syndromes: np.ndarray, cfg: BpConfig) -> Tuple[np.ndarray, np.ndarray]:
        result = self.column_decoder.decode_batch(cfg, z_syndromes)
        return self._lift(result.data_corrections, self.column_targets), result.converged

    def correct_z_errors(self, x_syndromes: np.ndarray, cfg: BpConfig) -> Tuple[np.ndarray, np.ndarray]:
        result = self.row_decoder.decode_batch(cfg, x_syndromes)
        return self._lift(result.data_corrections, self.row_targets), result.converged


class SHPInducedDecoder(InducedDecoder):
    """
    For X errors E on the lattice, the Z-stabilizer outcomes G1[a] (x) h2_basis[j] are the syndrome of the
    row combination G1[a] E under H2, giving k1 independent classical problems; correction a goes on lattice
    row pivots1[a], the pivot column of G1[a]. Z errors use the column combinations E G2[i]^T under H1.
    """

    def __init__(self, code: SHPCode, classical: str = "auto"):
        super().__init__(code, classical)
        self.n1, self.n2 = code.c1.n, code.c2.n
        self.row_decoder = ClassicalDecoder(code.h2_basis, classical)
        self.column_decoder = ClassicalDecoder(code.h1_basis, classical)

    def correct_x_errors(self, z_syndromes: np.ndarray, cfg: BpConfig) -> Tuple[np.ndarray, np.ndarray]:
        code: SHPCode = self.code
        shots, k1, m2 = z_syndromes.shape[0], code.c1.k, code.h2_basis.rows
        corrections = np.zeros((shots, self.n1, self.n2), dtype=np.uint8)
        if k1 == 0:
            return corrections.reshape(shots, -1), np.ones(shots, dtype=bool)
        problems = z_syndromes.reshape(shots * k1, m2)
        result = self.row_decoder.decode_batch(cfg, problems)
        corrections[:, code.pivots1, :] = result.data_corrections.reshape(shots, k1, self.n2)
        return corrections.reshape(shots, -1), result.converged.reshape(shots, k1).all(axis=1)

    def correct_z_errors(self, x_syndromes: np.ndarray, cfg: BpConfig) -> Tuple[np.ndarray, np.ndarray]:
        code: SHPCode = self.code
        shots, k2, m1 = x_syndromes.shape[0], code.c2.k, code.h1_basis.rows
        corrections = np.zeros((shots, self.n1, self.n2), dtype=np.uint8)
        if k2 == 0:
            return corrections.reshape(shots, -1), np.ones(shots, dtype=bool)
        problems = x_syndromes.reshape(shots, m1, k2).transpose(0, 2, 1).reshape(shots * k2, m1)
        result = self.column_decoder.decode_batch(cfg, problems)
        columns = result.data_corrections.reshape(shots, k2, self.n1).transpose(0, 2, 1)
        corrections[:, :, code.pivots2] = columns
        return corrections.reshape(shots, -1), result.converged.reshape(shots, k2).all(axis=1)


def induced_decoder_for(code: SubsystemCode, classical: str = "auto") -> InducedDecoder:
    if isinstance(code, BBSCode):
        return BBSInducedDecoder(code, classical)
    if isinstance(code, SHPCode):
        return SHPInducedDecoder(code, classical)
    raise ValueError(f"No induced decoder for {type(code).__name__}; only BBS and SHP codes have one")


def bbs_decode(code: BBSCode, syndrome: SyndromeFrame, cfg: BpConfig, classical: str = "auto") -> CorrectionFrame:
    return BBSInducedDecoder(code, classical).decode(syndrome, cfg)


def shp_decode(code: SHPCode, syndrome: SyndromeFrame, cfg: BpConfig, classical: str = "auto") -> CorrectionFrame:
    return SHPInducedDecoder(code, classical).decode(syndrome, cfg)


def residual_syndromes(code: SubsystemCode, residuals: np.ndarray, kind: PauliType) -> np.ndarray:
    """Outcomes of the stabilizers of the opposite type on a batch of pure residuals of type `kind`."""
    return gf2_matmul(np.atleast_2d(residuals), code.stabilizers(kind.opposite).to_array().T)


def classify_residual_batch(
    code: SubsystemCode, residuals: np.ndarray, kind: PauliType
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Logical flips of a batch of pure residuals: qubit i flips when the residual anticommutes with the opposite
    bare logical i.
    :return: (shots x K flips, per-shot flag telling whether the residual has a trivial syndrome)
    """
    residuals = np.atleast_2d(np.asarray(residuals, dtype=np.uint8))
    resolved = ~residual_syndromes(code, residuals, kind).any(axis=1)
    flips = gf2_matmul(residuals, code.logicals(kind.opposite).to_array().T)
    return flips, resolved


def classify_residual(code: SubsystemCode, residual: PauliOp) -> LogicalOutcome:
    kind = residual.kind
    if kind is None:
        if residual.x_support.any():
            raise ValueError("Residual mixes X and Z; classify each type separately")
        kind = PauliType.X
    flips, resolved = classify_residual_batch(code, residual.support_of(kind).to_array()[None, :], kind)
    if not resolved[0]:
        raise ValueError(f"Residual {kind.value} error has a nonzero stabilizer syndrome")
    return LogicalOutcome(BitVector.from_array(flips[0]), kind)
