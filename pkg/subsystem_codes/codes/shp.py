from typing import Dict, Optional

from subsystem_codes import logger
from subsystem_codes.codes.base import (
    QubitLattice,
    SubsystemCode,
    canonical_logicals,
    matrix_from_rows,
    matrix_rows,
)
from subsystem_codes.codes.classical import ClassicalCode, min_distance_bruteforce
from subsystem_codes.gf2 import BinaryMatrix, independent_rows, rref

DEFAULT_DISTANCE_CAP = 16


class SHPCode(SubsystemCode):
    """
    Subsystem hypergraph product on the n1 x n2 lattice, qubit (a, b) at index a * n2 + b.
    Gauge group H1 (x) I (X type) and I (x) H2 (Z type); stabilizers H1 (x) G2 and G1 (x) H2 with G1, G2 in
    reduced row echelon form, so stab_x[j * k2 + i] = h1_basis[j] (x) G2[i] and stab_z[a * m2 + j] = G1[a] (x)
    h2_basis[j] where m2 = rank(H2).
    """

    kind = "shp"

    def __init__(
        self,
        lattice: QubitLattice,
        gauge_x: BinaryMatrix,
        gauge_z: BinaryMatrix,
        stab_x: BinaryMatrix,
        stab_z: BinaryMatrix,
        logical_x: BinaryMatrix,
        logical_z: BinaryMatrix,
        h1: BinaryMatrix,
        h2: BinaryMatrix,
        name: str = "",
        distance: Optional[int] = None,
    ):
        super().__init__([lattice], gauge_x, gauge_z, stab_x, stab_z, logical_x, logical_z, name, distance)
        self._attach(h1, h2)

    def _attach(self, h1: BinaryMatrix, h2: BinaryMatrix):
        self.h1 = h1
        self.h2 = h2
        self.c1 = ClassicalCode.from_parity_check(h1)
        self.c2 = ClassicalCode.from_parity_check(h2)
        self.pivots1 = rref(self.c1.G)[1]
        self.pivots2 = rref(self.c2.G)[1]
        self.h1_basis = h1.select_rows(independent_rows(h1))
        self.h2_basis = h2.select_rows(independent_rows(h2))

    @property
    def lattice(self) -> QubitLattice:
        return self.lattices[0]

    def construction(self) -> Dict:
        return {"H1": matrix_rows(self.h1), "H2": matrix_rows(self.h2)}

    def _restore(self, construction: Dict):
        self._attach(matrix_from_rows(construction["H1"]), matrix_from_rows(construction["H2"]))

    def rebuild(self) -> "SHPCode":
        return build_shp(self.h1, self.h2, name=self.name)


def _classical_distance(code: ClassicalCode, cap: int) -> Optional[int]:
    return min_distance_bruteforce(code, cap) if code.k else None


def build_shp(h1: BinaryMatrix, h2: BinaryMatrix, name: str = "", distance_cap: int = DEFAULT_DISTANCE_CAP) -> SHPCode:
    """
    [[n1 n2, k1 k2, min(d1, d2)]] subsystem hypergraph product of the codes ker(h1) and ker(h2).
    The distance is filled in when both classical distances can be enumerated within 2**distance_cap codewords.
    """
    c1 = ClassicalCode.from_parity_check(h1)
    c2 = ClassicalCode.from_parity_check(h2)
    n1, n2 = c1.n, c2.n
    lattice = QubitLattice.full(n1, n2)
    h1_basis = h1.select_rows(independent_rows(h1))
    h2_basis = h2.select_rows(independent_rows(h2))

    gauge_x = h1.kron(BinaryMatrix.identity(n2))
    gauge_z = BinaryMatrix.identity(n1).kron(h2)
    stab_x = h1_basis.kron(c2.G)
    stab_z = c1.G.kron(h2_basis)
    logical_x, logical_z = canonical_logicals(
        BinaryMatrix.identity(n1).kron(c2.G), c1.G.kron(BinaryMatrix.identity(n2)), stab_x, stab_z
    )

    d1, d2 = _classical_distance(c1, distance_cap), _classical_distance(c2, distance_cap)
    distance = min(d1, d2) if d1 is not None and d2 is not None else None
    code = SHPCode(
        lattice,
        gauge_x,
        gauge_z,
        stab_x,
        stab_z,
        logical_x,
        logical_z,
        h1,
        h2,
        name=name or f"shp({n1}x{n2})",
        distance=distance,
    )
    if code.K != c1.k * c2.k:
        logger.warning(f"{code!r}: K={code.K} differs from k1 k2 = {c1.k * c2.k}")
    logger.info(f"Built {code!r}: {stab_x.rows + stab_z.rows} stabilizers, {code.gauge_qubit_count} gauge qubits")
    return code
