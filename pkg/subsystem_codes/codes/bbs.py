"""
Bravyi-Bacon-Shor codes BBS(A) with A = G1^T Q G2: qubits sit on the ones of A, XX gauge operators join
neighbouring qubits of a column and ZZ gauge operators neighbouring qubits of a row.
"""
from typing import Dict, List, Optional, Sequence

import numpy as np

from subsystem_codes import logger
from subsystem_codes.codes.base import (
    QubitLattice,
    SubsystemCode,
    canonical_logicals,
    matrix_from_rows,
    matrix_rows,
)
from subsystem_codes.codes.classical import ClassicalCode
from subsystem_codes.gf2 import BinaryMatrix, gf2_matmul, independent_rows, rank
from subsystem_codes.utils import flatten


class BBSCode(SubsystemCode):
    kind = "bbs"

    def __init__(
        self,
        lattice: QubitLattice,
        gauge_x: BinaryMatrix,
        gauge_z: BinaryMatrix,
        stab_x: BinaryMatrix,
        stab_z: BinaryMatrix,
        logical_x: BinaryMatrix,
        logical_z: BinaryMatrix,
        c1: ClassicalCode,
        c2: ClassicalCode,
        Q: BinaryMatrix,
        name: str = "",
        distance: Optional[int] = None,
    ):
        super().__init__([lattice], gauge_x, gauge_z, stab_x, stab_z, logical_x, logical_z, name, distance)
        self._attach(c1, c2, Q)

    def _attach(self, c1: ClassicalCode, c2: ClassicalCode, Q: BinaryMatrix):
        self.c1 = c1
        self.c2 = c2
        self.Q = Q
        self.A = c1.G.T @ Q @ c2.G
        # stab_x[t] comes from h1_basis[t], stab_z[t] from h2_basis[t]
        self.h1_basis = c1.H.select_rows(independent_rows(c1.H))
        self.h2_basis = c2.H.select_rows(independent_rows(c2.H))

    @property
    def lattice(self) -> QubitLattice:
        return self.lattices[0]

    def construction(self) -> Dict:
        return {
            "G1": matrix_rows(self.c1.G),
            "H1": matrix_rows(self.c1.H),
            "d1": self.c1.d,
            "name1": self.c1.name,
            "G2": matrix_rows(self.c2.G),
            "H2": matrix_rows(self.c2.H),
            "d2": self.c2.d,
            "name2": self.c2.name,
            "Q": matrix_rows(self.Q),
        }

    def _restore(self, construction: Dict):
        c1 = ClassicalCode(
            matrix_from_rows(construction["G1"]),
            matrix_from_rows(construction["H1"]),
            d=construction.get("d1"),
            name=construction.get("name1", ""),
        )
        c2 = ClassicalCode(
            matrix_from_rows(construction["G2"]),
            matrix_from_rows(construction["H2"]),
            d=construction.get("d2"),
            name=construction.get("name2", ""),
        )
        self._attach(c1, c2, matrix_from_rows(construction["Q"]))

    def rebuild(self) -> "BBSCode":
        return build_bbs(self.c1, self.c2, self.Q, name=self.name)


def _adjacent_pairs(groups: Sequence[List[int]]) -> List[List[int]]:
    return [[group[t], group[t + 1]] for group in groups for t in range(len(group) - 1)]


def _group_unions(selectors: np.ndarray, groups: Sequence[List[int]]) -> List[List[int]]:
    """Union of the groups picked out by each 0/1 selector row."""
    return [sorted(flatten(groups[i] for i in np.flatnonzero(row))) for row in selectors]


def build_bbs(c1: ClassicalCode, c2: ClassicalCode, q: BinaryMatrix, name: str = "") -> BBSCode:
    """
    BBS(G1^T Q G2).
    Stabilizers follow the parity checks: X on every row i of A with r_i = 1 for r in a basis of rowspace(H1),
    Z on every column j with c_j = 1 for c in a basis of rowspace(H2). Bare logicals are X on full rows and Z
    on full columns, put in canonical form.
    :param q: k x k invertible matrix; it changes the qubit count but not K or D.
    """
    k = c1.k
    if c2.k != k:
        raise ValueError(f"Both classical codes need the same dimension, got k1={c1.k} and k2={c2.k}")
    if q.shape != (k, k):
        raise ValueError(f"Q must be {k}x{k}, got {q.rows}x{q.cols}")
    q_rank = rank(q)
    if q_rank < k:
        raise ValueError(f"rank(Q)={q_rank} < k={k}")

    A = c1.G.T @ q @ c2.G
    lattice = QubitLattice(A)
    n_qubits = lattice.size
    rows, columns = lattice.row_groups(), lattice.column_groups()

    gauge_x = BinaryMatrix.from_supports(_adjacent_pairs(columns), n_qubits)
    gauge_z = BinaryMatrix.from_supports(_adjacent_pairs(rows), n_qubits)
    h1_basis = c1.H.select_rows(independent_rows(c1.H))
    h2_basis = c2.H.select_rows(independent_rows(c2.H))
    stab_x = BinaryMatrix.from_supports(_group_unions(h1_basis.to_array(), rows), n_qubits)
    stab_z = BinaryMatrix.from_supports(_group_unions(h2_basis.to_array(), columns), n_qubits)

    x_candidates = BinaryMatrix.from_supports([group for group in rows if group], n_qubits)
    z_candidates = BinaryMatrix.from_supports([group for group in columns if group], n_qubits)
    logical_x, logical_z = canonical_logicals(x_candidates, z_candidates, stab_x, stab_z)

    distance = min(c1.d, c2.d) if c1.d is not None and c2.d is not None else None
    code = BBSCode(
        lattice,
        gauge_x,
        gauge_z,
        stab_x,
        stab_z,
        logical_x,
        logical_z,
        c1,
        c2,
        q,
        name=name or f"bbs({c1.name or 'c1'},{c2.name or 'c2'})",
        distance=distance,
    )
    logger.info(f"Built {code!r}: |A|={n_qubits}, rank(A)={rank(A)}, {code.gauge_qubit_count} gauge qubits")
    return code


def qubit_count(c1: ClassicalCode, c2: ClassicalCode, q: BinaryMatrix) -> int:
    return (c1.G.T @ q @ c2.G).weight


def _random_invertible(k: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        candidate = rng.integers(0, 2, size=(k, k), dtype=np.uint8)
        if rank(BinaryMatrix.from_array(candidate)) == k:
            return candidate


def minimize_qubits_q(c1: ClassicalCode, c2: ClassicalCode, attempts: int = 1000, seed: int = 0) -> BinaryMatrix:
    """
    Random search for the invertible Q giving the fewest qubits; the identity is always the first candidate.
    Ties go to the lexicographically smallest A.
    """
    k = c1.k
    if c2.k != k:
        raise ValueError(f"Both classical codes need the same dimension, got k1={c1.k} and k2={c2.k}")
    if attempts < 1:
        raise ValueError(f"attempts must be >= 1, got {attempts}")
    rng = np.random.default_rng(seed)
    g1t, g2 = c1.G.to_array().T, c2.G.to_array()
    best_q, best_key = None, None
    for attempt in range(attempts):
        q = np.eye(k, dtype=np.uint8) if attempt == 0 else _random_invertible(k, rng)
        a = gf2_matmul(gf2_matmul(g1t, q), g2)
        key = (int(a.sum()), tuple(a.ravel().tolist()))
        if best_key is None or key < best_key:
            best_q, best_key = q, key
            logger.debug(f"Attempt {attempt}: |A|={key[0]}")
    logger.info(f"Best Q after {attempts} attempts gives {best_key[0]} qubits")
    return BinaryMatrix.from_array(best_q)
