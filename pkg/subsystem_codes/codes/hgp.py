from typing import Dict, Optional

from subsystem_codes import logger
from subsystem_codes.codes.base import (
    LatticeTag,
    QubitLattice,
    SubsystemCode,
    canonical_logicals,
    matrix_from_rows,
    matrix_rows,
)
from subsystem_codes.codes.classical import DISTANCE_CAP, ClassicalCode, min_distance_bruteforce
from subsystem_codes.gf2 import BinaryMatrix


class HGPCode(SubsystemCode):
    """
    Hypergraph product stabilizer code: the n1 x n2 large lattice first, then the m1 x m2 small lattice.
    Gauge group and stabilizer group coincide.
    """

    kind = "hgp"

    def __init__(
        self,
        lattices,
        stab_x: BinaryMatrix,
        stab_z: BinaryMatrix,
        logical_x: BinaryMatrix,
        logical_z: BinaryMatrix,
        h1: BinaryMatrix,
        h2: BinaryMatrix,
        name: str = "",
        distance: Optional[int] = None,
    ):
        super().__init__(lattices, stab_x, stab_z, stab_x, stab_z, logical_x, logical_z, name, distance)
        self._attach(h1, h2)

    def _attach(self, h1: BinaryMatrix, h2: BinaryMatrix):
        self.h1 = h1
        self.h2 = h2

    def construction(self) -> Dict:
        return {"H1": matrix_rows(self.h1), "H2": matrix_rows(self.h2)}

    def _restore(self, construction: Dict):
        self._attach(matrix_from_rows(construction["H1"]), matrix_from_rows(construction["H2"]))

    def rebuild(self) -> "HGPCode":
        return build_hgp(self.h1, self.h2, name=self.name)


def hgp_distance_bound(c1: ClassicalCode, c2: ClassicalCode, cap: int = DISTANCE_CAP) -> Optional[int]:
    """
    min(d1, d2, d1^T, d2^T) over the codes among c1, c2 and their transposes that encode something;
    None when one of the distances is out of brute-force reach or no code encodes anything.
    """
    distances = []
    for code in (c1, c2, c1.transpose(), c2.transpose()):
        if code.k == 0:
            continue
        d = min_distance_bruteforce(code, cap)
        if d is None:
            return None
        distances.append(d)
    return min(distances) if distances else None


def build_hgp(h1: BinaryMatrix, h2: BinaryMatrix, name: str = "", distance_cap: int = DISTANCE_CAP) -> HGPCode:
    """
    S_X = [H1 (x) I_n2 | I_m1 (x) H2^T], S_Z = [I_n1 (x) H2 | H1^T (x) I_m2].
    Logical candidates are [I (x) ker(H2) | 0], [0 | ker(H1^T) (x) I] for X and [ker(H1) (x) I | 0],
    [0 | I (x) ker(H2^T)] for Z, put in canonical form.
    """
    c1 = ClassicalCode.from_parity_check(h1)
    c2 = ClassicalCode.from_parity_check(h2)
    t1, t2 = c1.transpose(), c2.transpose()
    (m1, n1), (m2, n2) = h1.shape, h2.shape
    large_size, small_size = n1 * n2, m1 * m2
    lattices = [
        QubitLattice.full(n1, n2, LatticeTag.large),
        QubitLattice.full(m1, m2, LatticeTag.small, offset=large_size),
    ]

    eye = BinaryMatrix.identity
    stab_x = h1.kron(eye(n2)).hstack(eye(m1).kron(h2.T))
    stab_z = eye(n1).kron(h2).hstack(h1.T.kron(eye(m2)))
    x_candidates = eye(n1).kron(c2.G).hstack(BinaryMatrix.zeros(n1 * c2.k, small_size)).vstack(
        BinaryMatrix.zeros(t1.k * m2, large_size).hstack(t1.G.kron(eye(m2)))
    )
    z_candidates = c1.G.kron(eye(n2)).hstack(BinaryMatrix.zeros(c1.k * n2, small_size)).vstack(
        BinaryMatrix.zeros(m1 * t2.k, large_size).hstack(eye(m1).kron(t2.G))
    )
    logical_x, logical_z = canonical_logicals(x_candidates, z_candidates, stab_x, stab_z)

    code = HGPCode(
        lattices,
        stab_x,
        stab_z,
        logical_x,
        logical_z,
        h1,
        h2,
        name=name or f"hgp({n1}x{n2})",
        distance=hgp_distance_bound(c1, c2, distance_cap),
    )
    expected = c1.k * c2.k + t1.k * t2.k
    if code.K != expected:
        logger.warning(f"{code!r}: K={code.K} differs from k1 k2 + k1^T k2^T = {expected}")
    logger.info(f"Built {code!r} on {large_size} + {small_size} qubits")
    return code
