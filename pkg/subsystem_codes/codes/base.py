from enum import Enum
import itertools
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from subsystem_codes.codes.classical import DISTANCE_CAP, span_blocks
from subsystem_codes.gf2 import BinaryMatrix, gf2_matmul, independent_rows, pack_rows, popcount, rank
from subsystem_codes.pauli import PauliOp, PauliType

MANIFEST_FORMAT = "subsystem-codes/code"
MANIFEST_VERSION = 1
_COMBINATION_CHUNK = 1 << 16


def matrix_rows(matrix: BinaryMatrix) -> List[str]:
    """Dense text form of a matrix as a list of lines, header first, for JSON manifests."""
    return matrix.to_text().splitlines()


def matrix_from_rows(rows: Sequence[str]) -> BinaryMatrix:
    return BinaryMatrix.from_text("\n".join(rows))


class LatticeTag(Enum):
    single = "single"
    large = "L"
    small = "l"


class QubitLattice:
    """Qubits on the sites (i, j) where `mask` is 1, numbered row-major from `offset`."""

    def __init__(self, mask: BinaryMatrix, tag: LatticeTag = LatticeTag.single, offset: int = 0):
        self.mask = mask
        self.tag = tag
        self.offset = offset
        rows, cols = np.nonzero(mask.to_array())
        self.coordinates: List[Tuple[int, int]] = list(zip(rows.tolist(), cols.tolist()))
        self._index = {site: offset + q for q, site in enumerate(self.coordinates)}

    @classmethod
    def full(cls, rows: int, cols: int, tag: LatticeTag = LatticeTag.single, offset: int = 0) -> "QubitLattice":
        return cls(BinaryMatrix.from_array(np.ones((rows, cols), dtype=np.uint8)), tag, offset)

    @property
    def size(self) -> int:
        return len(self.coordinates)

    def index(self, i: int, j: int) -> int:
        return self._index[(i, j)]

    def row_groups(self) -> List[List[int]]:
        """Qubit indices of each lattice row, by increasing column."""
        groups: List[List[int]] = [[] for _ in range(self.mask.rows)]
        for (i, _), q in zip(self.coordinates, range(self.offset, self.offset + self.size)):
            groups[i].append(q)
        return groups

    def column_groups(self) -> List[List[int]]:
        """Qubit indices of each lattice column, by increasing row."""
        groups: List[List[int]] = [[] for _ in range(self.mask.cols)]
        for (_, j), q in zip(self.coordinates, range(self.offset, self.offset + self.size)):
            groups[j].append(q)
        return groups

    def embed(self, bits: np.ndarray, n_qubits: int) -> np.ndarray:
        """Maps rows of lattice-shaped masks (flattened row-major) onto qubit-indexed rows."""
        flat = np.asarray(bits, dtype=np.uint8).reshape(bits.shape[0], -1)
        sites = [i * self.mask.cols + j for i, j in self.coordinates]
        out = np.zeros((flat.shape[0], n_qubits), dtype=np.uint8)
        out[:, self.offset : self.offset + self.size] = flat[:, sites]
        return out


def canonical_logicals(
    x_candidates: BinaryMatrix,
    z_candidates: BinaryMatrix,
    stab_x: Optional[BinaryMatrix] = None,
    stab_z: Optional[BinaryMatrix] = None,
) -> Tuple[BinaryMatrix, BinaryMatrix]:
    """
    Symplectic Gram-Schmidt over bare logical candidates.
    At each step the lightest X candidate that anticommutes with a remaining Z candidate is paired with the
    lightest such partner (ties by position); the remaining candidates are then cleaned so they commute with
    the new pair. Finally each chosen operator is slimmed by stabilizer generators while that lowers its weight.
    :return: (logical_x, logical_z) with logical_x[i] . logical_z[j] = delta_ij.
    """
    xs = x_candidates.to_array().copy()
    zs = z_candidates.to_array().copy()
    products = gf2_matmul(xs, zs.T)
    x_alive = np.ones(xs.shape[0], dtype=bool)
    z_alive = np.ones(zs.shape[0], dtype=bool)
    chosen_x, chosen_z = [], []
    while True:
        x_weights, z_weights = xs.sum(axis=1), zs.sum(axis=1)
        pick = None
        for i in sorted(np.flatnonzero(x_alive), key=lambda i: (x_weights[i], i)):
            partners = np.flatnonzero(z_alive & (products[i] == 1))
            if partners.size:
                pick = i, min(partners, key=lambda j: (z_weights[j], j))
                break
        if pick is None:
            break
        i, j = pick
        rows = np.flatnonzero(x_alive & (products[:, j] == 1))
        rows = rows[rows != i]
        xs[rows] ^= xs[i]
        products[rows] ^= products[i]
        cols = np.flatnonzero(z_alive & (products[i] == 1))
        cols = cols[cols != j]
        zs[cols] ^= zs[j]
        products[:, cols] ^= products[:, [j]]
        chosen_x.append(xs[i].copy())
        chosen_z.append(zs[j].copy())
        x_alive[i] = False
        z_alive[j] = False
    n = x_candidates.cols
    logical_x = np.array([_slim(v, stab_x) for v in chosen_x], dtype=np.uint8).reshape(-1, n)
    logical_z = np.array([_slim(v, stab_z) for v in chosen_z], dtype=np.uint8).reshape(-1, n)
    return BinaryMatrix.from_array(logical_x), BinaryMatrix.from_array(logical_z)


def _slim(vector: np.ndarray, stabilizers: Optional[BinaryMatrix]) -> np.ndarray:
    if stabilizers is None or stabilizers.rows == 0:
        return vector
    generators = stabilizers.to_array()
    current = vector.copy()
    improved = True
    while improved:
        improved = False
        weights = (generators ^ current).sum(axis=1)
        best = int(np.argmin(weights))
        if weights[best] < current.sum():
            current = current ^ generators[best]
            improved = True
    return current


class SubsystemCode:
    """CSS subsystem code: qubit layout plus generating sets of the gauge, stabilizer and bare logical groups."""

    kind = "subsystem"

    def __init__(
        self,
        lattices: Sequence[QubitLattice],
        gauge_x: BinaryMatrix,
        gauge_z: BinaryMatrix,
        stab_x: BinaryMatrix,
        stab_z: BinaryMatrix,
        logical_x: BinaryMatrix,
        logical_z: BinaryMatrix,
        name: str = "",
        distance: Optional[int] = None,
    ):
        self.lattices = list(lattices)
        self.N = sum(lattice.size for lattice in self.lattices)
        for label, matrix in (
            ("gauge_x", gauge_x),
            ("gauge_z", gauge_z),
            ("stab_x", stab_x),
            ("stab_z", stab_z),
            ("logical_x", logical_x),
            ("logical_z", logical_z),
        ):
            if matrix.cols != self.N:
                raise ValueError(f"{label} acts on {matrix.cols} qubits, layout has {self.N}")
        if logical_x.rows != logical_z.rows:
            raise ValueError(f"{logical_x.rows} X logicals but {logical_z.rows} Z logicals")
        self.gauge_x = gauge_x
        self.gauge_z = gauge_z
        self.stab_x = stab_x
        self.stab_z = stab_z
        self.logical_x = logical_x
        self.logical_z = logical_z
        self.name = name
        self.distance = distance

    @property
    def K(self) -> int:
        return self.logical_x.rows

    @property
    def layout(self) -> List[Tuple[LatticeTag, int, int]]:
        return [(lattice.tag, i, j) for lattice in self.lattices for i, j in lattice.coordinates]

    @property
    def gauge_qubit_count(self) -> int:
        doubled = rank(self.gauge_x) + rank(self.gauge_z) - rank(self.stab_x) - rank(self.stab_z)
        return doubled // 2

    @property
    def parameters(self) -> str:
        d = f",{self.distance}" if self.distance is not None else ""
        return f"[[{self.N},{self.K}{d}]]"

    def stabilizers(self, kind: PauliType) -> BinaryMatrix:
        return self.stab_x if kind is PauliType.X else self.stab_z

    def gauges(self, kind: PauliType) -> BinaryMatrix:
        return self.gauge_x if kind is PauliType.X else self.gauge_z

    def logicals(self, kind: PauliType) -> BinaryMatrix:
        return self.logical_x if kind is PauliType.X else self.logical_z

    def generators(self, kind: PauliType, group: str = "stab") -> List[PauliOp]:
        matrix = {"gauge": self.gauges, "stab": self.stabilizers, "logical": self.logicals}[group](kind)
        return [PauliOp.from_vector(kind, v) for v in matrix.row_vectors()]

    def syndrome(self, error: PauliOp) -> Tuple[np.ndarray, np.ndarray]:
        """(X-stabilizer outcomes, Z-stabilizer outcomes) of an error."""
        x_syndrome = gf2_matmul(self.stab_x.to_array(), error.z_support.to_array()[:, None])[:, 0]
        z_syndrome = gf2_matmul(self.stab_z.to_array(), error.x_support.to_array()[:, None])[:, 0]
        return x_syndrome, z_syndrome

    def validate(self):
        """Runs the commutation, pairing and bookkeeping checks; raises VerificationError on a violation."""
        from subsystem_codes.codes.verification import check_code

        check_code(self)

    def construction(self) -> Dict:
        return {}

    def _restore(self, construction: Dict):
        pass

    def rebuild(self) -> Optional["SubsystemCode"]:
        """Fresh code from the stored construction inputs; None for codes without a construction."""
        return None

    def to_manifest(self) -> Dict:
        return {
            "format": MANIFEST_FORMAT,
            "version": MANIFEST_VERSION,
            "kind": self.kind,
            "name": self.name,
            "N": self.N,
            "K": self.K,
            "D": self.distance,
            "lattices": [
                {"tag": lattice.tag.value, "offset": lattice.offset, "mask": matrix_rows(lattice.mask)}
                for lattice in self.lattices
            ],
            "layout": [[tag.value, i, j] for tag, i, j in self.layout],
            "gauge_x": self.gauge_x.row_supports(),
            "gauge_z": self.gauge_z.row_supports(),
            "stab_x": self.stab_x.row_supports(),
            "stab_z": self.stab_z.row_supports(),
            "logical_x": self.logical_x.row_supports(),
            "logical_z": self.logical_z.row_supports(),
            "construction": self.construction(),
        }

    @classmethod
    def from_manifest(cls, data: Dict) -> "SubsystemCode":
        if data.get("format") != MANIFEST_FORMAT:
            raise ValueError(f"Not a code manifest: format={data.get('format')!r}")
        if data.get("version") != MANIFEST_VERSION:
            raise ValueError(f"Unsupported manifest version {data.get('version')}")
        kinds = {klass.kind: klass for klass in _all_subclasses(SubsystemCode)}
        kinds[SubsystemCode.kind] = SubsystemCode
        klass = kinds.get(data["kind"])
        if klass is None:
            raise ValueError(f"Unknown code kind {data['kind']!r}")
        lattices = [
            QubitLattice(matrix_from_rows(entry["mask"]), LatticeTag(entry["tag"]), entry["offset"])
            for entry in data["lattices"]
        ]
        n = sum(lattice.size for lattice in lattices)
        code = klass.__new__(klass)
        SubsystemCode.__init__(
            code,
            lattices,
            *(BinaryMatrix.from_supports(data[key], n) for key in ("gauge_x", "gauge_z", "stab_x", "stab_z")),
            BinaryMatrix.from_supports(data["logical_x"], n),
            BinaryMatrix.from_supports(data["logical_z"], n),
            name=data.get("name", ""),
            distance=data.get("D"),
        )
        code._restore(data.get("construction", {}))
        return code

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name or self.kind} {self.parameters})"


def _all_subclasses(klass):
    for sub in klass.__subclasses__():
        yield sub
        yield from _all_subclasses(sub)


def min_weight_logical(code: SubsystemCode, kind: PauliType, cap: int = DISTANCE_CAP) -> Optional[PauliOp]:
    """
    Lightest dressed logical of the given type: commutes with the opposite-type stabilizers and anticommutes
    with at least one opposite-type bare logical. None when neither search fits in 2**cap candidates.
    """
    if code.K == 0:
        return None
    gauge = code.gauges(kind)
    gauge_basis = gauge.select_rows(independent_rows(gauge)) if gauge.rows else gauge
    if gauge_basis.rows + code.K <= cap:
        return _search_span(code, kind, gauge_basis)
    return _search_by_weight(code, kind, cap)


def _search_span(code: SubsystemCode, kind: PauliType, gauge_basis: BinaryMatrix) -> PauliOp:
    logical_words = code.logicals(kind).words
    best_weight, best_words = code.N + 1, None
    current = np.zeros(logical_words.shape[1], dtype=np.uint64)
    for h in range(1, 1 << code.K):
        bit = (h & -h).bit_length() - 1
        current = current ^ logical_words[bit]
        for _, block in span_blocks(gauge_basis.words):
            candidates = block ^ current
            weights = popcount(candidates)
            i = int(np.argmin(weights))
            if weights[i] < best_weight:
                best_weight, best_words = int(weights[i]), candidates[i].copy()
    vector = BinaryMatrix(best_words[None, :], 1, code.N).row(0)
    return PauliOp.from_vector(kind, vector)


def _search_by_weight(code: SubsystemCode, kind: PauliType, cap: int) -> Optional[PauliOp]:
    opposite = kind.opposite
    stab_columns = pack_rows(code.stabilizers(opposite).to_array().T)
    logical_columns = pack_rows(code.logicals(opposite).to_array().T)
    budget = 1 << cap
    spent = 0
    for weight in range(1, code.N + 1):
        spent += comb(code.N, weight)
        if spent > budget:
            return None
        combinations = itertools.combinations(range(code.N), weight)
        while True:
            chunk = np.fromiter(
                itertools.chain.from_iterable(itertools.islice(combinations, _COMBINATION_CHUNK)), dtype=np.int64
            ).reshape(-1, weight)
            if chunk.size == 0:
                break
            stab_hits = np.bitwise_xor.reduce(stab_columns[chunk], axis=1).any(axis=1)
            logical_hits = np.bitwise_xor.reduce(logical_columns[chunk], axis=1).any(axis=1)
            found = np.flatnonzero(~stab_hits & logical_hits)
            if found.size:
                return PauliOp.of_type(kind, chunk[found[0]].tolist(), code.N)
    return None


def subsystem_distance_bruteforce(code: SubsystemCode, cap: int = DISTANCE_CAP) -> Optional[int]:
    """Minimum dressed logical weight over both types, or None when the search is too large."""
    weights = []
    for kind in (PauliType.X, PauliType.Z):
        witness = min_weight_logical(code, kind, cap)
        if witness is None:
            return None
        weights.append(witness.weight)
    return min(weights)
