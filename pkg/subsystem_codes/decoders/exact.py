"""
Table decoder returning the most likely (data flips, measurement flips) pattern for a syndrome, by enumerating
every pattern once. Only for short codes: the table has 2**(n + m) entries with measurement errors on.
"""
from typing import Dict, Tuple

import numpy as np

from subsystem_codes import logger
from subsystem_codes.decoders.bp import BpBatchResult, BpConfig
from subsystem_codes.gf2 import BinaryMatrix

MAX_EXACT_LOCI = 22


def error_loci(H: BinaryMatrix, measurement_errors: bool) -> int:
    return H.cols + (H.rows if measurement_errors else 0)


class ExactDecoder:
    def __init__(self, H: BinaryMatrix):
        self.H = H
        self._tables: Dict[Tuple[float, float, bool], np.ndarray] = {}

    @staticmethod
    def feasible(H: BinaryMatrix, measurement_errors: bool) -> bool:
        return error_loci(H, measurement_errors) <= MAX_EXACT_LOCI

    def _contributions(self, measurement_errors: bool) -> np.ndarray:
        """Syndrome of each single fault, as an integer with bit j for check j."""
        weights = 1 << np.arange(self.H.rows, dtype=np.int64)
        columns = self.H.to_array().T.astype(np.int64) @ weights
        if measurement_errors:
            columns = np.concatenate([columns, weights])
        return columns

    def table(self, cfg: BpConfig) -> np.ndarray:
        """Best pattern (bit t = fault on locus t, data loci first) for each syndrome integer; -1 if unreachable."""
        key = (cfg.p_data, cfg.p_meas, cfg.measurement_errors)
        if key in self._tables:
            return self._tables[key]
        loci = error_loci(self.H, cfg.measurement_errors)
        if loci > MAX_EXACT_LOCI:
            raise ValueError(f"Exact decoding needs at most {MAX_EXACT_LOCI} error loci, got {loci}")
        syndromes = np.zeros(1, dtype=np.int64)
        data_flips = np.zeros(1, dtype=np.int64)
        meas_flips = np.zeros(1, dtype=np.int64)
        for t, contribution in enumerate(self._contributions(cfg.measurement_errors)):
            syndromes = np.concatenate([syndromes, syndromes ^ contribution])
            is_data = int(t < self.H.cols)
            data_flips = np.concatenate([data_flips, data_flips + is_data])
            meas_flips = np.concatenate([meas_flips, meas_flips + 1 - is_data])
        # negative log-likelihood up to a constant; equal flip counts give bit-identical costs
        cost = data_flips * np.log((1 - cfg.p_data) / cfg.p_data) + meas_flips * np.log((1 - cfg.p_meas) / cfg.p_meas)
        patterns = np.arange(syndromes.size, dtype=np.int64)
        order = np.lexsort((patterns, cost))
        values, first = np.unique(syndromes[order], return_index=True)
        table = np.full(1 << self.H.rows, -1, dtype=np.int64)
        table[values] = order[first]
        logger.debug(f"Exact table over {loci} loci: {values.size} of {table.size} syndromes reachable")
        self._tables[key] = table
        return table

    def decode_batch(self, cfg: BpConfig, syndromes: np.ndarray) -> BpBatchResult:
        s = np.atleast_2d(np.asarray(syndromes, dtype=np.int64))
        if s.shape[1] != self.H.rows:
            raise ValueError(f"Syndrome length {s.shape[1]} does not match {self.H.rows} checks")
        batch = s.shape[0]
        table = self.table(cfg)
        best = table[s @ (1 << np.arange(self.H.rows, dtype=np.int64))]
        converged = best >= 0
        best = np.where(converged, best, 0)
        loci = error_loci(self.H, cfg.measurement_errors)
        bits = ((best[:, None] >> np.arange(loci, dtype=np.int64)) & 1).astype(np.uint8)
        data = bits[:, : self.H.cols]
        meas = bits[:, self.H.cols :] if cfg.measurement_errors else np.zeros((batch, self.H.rows), dtype=np.uint8)
        return BpBatchResult(
            data_corrections=data,
            meas_corrections=meas,
            converged=converged,
            iterations=np.zeros(batch, dtype=np.int64),
            posterior_llrs=np.zeros((batch, 0)),
        )
