from itertools import combinations
from typing import Dict, Tuple

import numpy as np

from subsystem_codes import logger
from subsystem_codes.codes.base import SubsystemCode
from subsystem_codes.gf2 import gf2_matmul
from subsystem_codes.pauli import PauliType


def _key(syndrome: np.ndarray) -> bytes:
    return np.packbits(syndrome.astype(np.uint8)).tobytes()


def _build_table(checks: np.ndarray) -> Dict[bytes, Tuple[int, ...]]:
    """Smallest-weight support for each syndrome of weight <= 2 errors, lowest qubit indices first."""
    m, n = checks.shape
    columns = checks.T
    table: Dict[bytes, Tuple[int, ...]] = {_key(np.zeros(m, dtype=np.uint8)): ()}
    for q in range(n):
        table.setdefault(_key(columns[q]), (q,))
    for q1, q2 in combinations(range(n), 2):
        table.setdefault(_key(columns[q1] ^ columns[q2]), (q1, q2))
    return table


class LookupDecoder:
    """Syndrome -> minimum-weight correction tables for a distance-3 code, one per Pauli type."""

    def __init__(self, code: SubsystemCode):
        self.code = code
        self._checks = {
            PauliType.X: code.stab_z.to_array(),
            PauliType.Z: code.stab_x.to_array(),
        }
        self.tables = {kind: _build_table(checks) for kind, checks in self._checks.items()}
        sizes = {kind.value: len(table) for kind, table in self.tables.items()}
        logger.debug(f"Lookup tables for {code!r}: {sizes} syndromes per error type")

    def syndromes(self, kind: PauliType, errors: np.ndarray) -> np.ndarray:
        return gf2_matmul(np.atleast_2d(errors), self._checks[kind].T)

    def correct(self, kind: PauliType, syndromes: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Corrections of the given type for a batch of syndromes (X corrections answer Z-stabilizer outcomes).
        :return: (shots x N corrections, per-shot flag telling whether the syndrome was in the table)
        """
        syndromes = np.atleast_2d(np.asarray(syndromes, dtype=np.uint8))
        table = self.tables[kind]
        unique, inverse = np.unique(syndromes, axis=0, return_inverse=True)
        corrections = np.zeros((unique.shape[0], self.code.N), dtype=np.uint8)
        known = np.zeros(unique.shape[0], dtype=bool)
        for row, syndrome in enumerate(unique):
            support = table.get(_key(syndrome))
            if support is not None:
                corrections[row, list(support)] = 1
                known[row] = True
        inverse = inverse.reshape(-1)
        return corrections[inverse], known[inverse]


def lookup_decoder_build(code: SubsystemCode) -> LookupDecoder:
    if code.distance is not None and code.distance < 3:
        name = code.name or code.parameters
        raise ValueError(f"Weight-2 lookup tables need distance >= 3, {name} has distance {code.distance}")
    return LookupDecoder(code)
