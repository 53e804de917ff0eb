from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

WORD_BITS = 64
_POPCOUNT8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)

ArrayLike = Union[np.ndarray, Sequence[Sequence[int]]]


def _as_bits(values, ndim: int) -> np.ndarray:
    bits = np.asarray(values)
    if bits.dtype == bool:
        bits = bits.astype(np.uint8)
    if bits.ndim != ndim:
        raise ValueError(f"Expected a {ndim}-dimensional 0/1 array, got shape {bits.shape}")
    if bits.size and np.any((bits != 0) & (bits != 1)):
        raise ValueError("Entries of a GF(2) array must be 0 or 1")
    return bits.astype(np.uint8)


def _n_words(cols: int) -> int:
    return max(1, -(-cols // WORD_BITS))


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Packs a (rows, cols) 0/1 array into little-endian uint64 words, bit c in word c // 64."""
    rows, cols = bits.shape
    n_words = _n_words(cols)
    padded = np.zeros((rows, n_words * WORD_BITS), dtype=np.uint8)
    padded[:, :cols] = bits
    packed = np.ascontiguousarray(np.packbits(padded, axis=1, bitorder="little"))
    return packed.view("<u8").reshape(rows, n_words).astype(np.uint64)


def unpack_rows(words: np.ndarray, cols: int) -> np.ndarray:
    rows = words.shape[0]
    as_bytes = np.ascontiguousarray(words.astype("<u8")).view(np.uint8).reshape(rows, words.shape[1] * 8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols].copy()


def popcount(words: np.ndarray) -> np.ndarray:
    """Number of set bits along the last axis of a uint64 word array."""
    as_bytes = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    return _POPCOUNT8[as_bytes].reshape(*words.shape[:-1], words.shape[-1] * 8).sum(axis=-1)


def gf2_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of dense 0/1 arrays over GF(2); float BLAS is exact below 2**53 terms."""
    product = np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)
    return (np.rint(product).astype(np.int64) & 1).astype(np.uint8)


def _eliminate(words: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Full Gauss-Jordan elimination in place; pivots are taken at the lowest row and column index."""
    rows = words.shape[0]
    pivots: List[int] = []
    r = 0
    one = np.uint64(1)
    while r < rows:
        remaining = words[r:]
        nonzero_words = np.flatnonzero(remaining.any(axis=0))
        if nonzero_words.size == 0:
            break
        w = int(nonzero_words[0])
        merged = int(np.bitwise_or.reduce(remaining[:, w]))
        b = (merged & -merged).bit_length() - 1
        shift = np.uint64(b)
        candidates = np.flatnonzero((remaining[:, w] >> shift) & one)
        p = r + int(candidates[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        mask = ((words[:, w] >> shift) & one).astype(bool)
        mask[r] = False
        words[mask] ^= words[r]
        pivots.append(w * WORD_BITS + b)
        r += 1
    return words, pivots


class BitVector:
    __slots__ = ("_len", "_words")

    def __init__(self, words: np.ndarray, length: int):
        self._words = words
        self._words.setflags(write=False)
        self._len = length

    @classmethod
    def from_array(cls, values) -> "BitVector":
        bits = _as_bits(values, 1)
        return cls(pack_rows(bits[None, :])[0], bits.shape[0])

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(np.zeros(_n_words(length), dtype=np.uint64), length)

    @classmethod
    def from_support(cls, support: Iterable[int], length: int) -> "BitVector":
        bits = np.zeros(length, dtype=np.uint8)
        indices = list(support)
        if indices and (min(indices) < 0 or max(indices) >= length):
            raise ValueError(f"Support {indices} out of range for length {length}")
        bits[indices] = 1
        return cls.from_array(bits)

    @property
    def words(self) -> np.ndarray:
        return self._words

    def to_array(self) -> np.ndarray:
        return unpack_rows(self._words[None, :], self._len)[0]

    def support(self) -> List[int]:
        return np.flatnonzero(self.to_array()).tolist()

    @property
    def weight(self) -> int:
        return int(popcount(self._words[None, :])[0])

    def any(self) -> bool:
        return bool(self._words.any())

    def dot(self, other: "BitVector") -> int:
        self._check_len(other)
        return int(popcount((self._words & other._words)[None, :])[0]) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        self._check_len(other)
        return BitVector(self._words ^ other._words, self._len)

    def __getitem__(self, index: int) -> int:
        if not 0 <= index < self._len:
            raise IndexError(index)
        return int((int(self._words[index // WORD_BITS]) >> (index % WORD_BITS)) & 1)

    def __len__(self) -> int:
        return self._len

    def __eq__(self, other) -> bool:
        return isinstance(other, BitVector) and self._len == other._len and np.array_equal(self._words, other._words)

    def __hash__(self) -> int:
        return hash((self._len, self._words.tobytes()))

    def __repr__(self) -> str:
        return f"BitVector({''.join(map(str, self.to_array()))})"

    def _check_len(self, other: "BitVector"):
        if self._len != other._len:
            raise ValueError(f"Length mismatch: {self._len} != {other._len}")


class BinaryMatrix:
    """Immutable GF(2) matrix stored as rows of packed uint64 words."""

    __slots__ = ("rows", "cols", "_words")

    def __init__(self, words: np.ndarray, rows: int, cols: int):
        self.rows = rows
        self.cols = cols
        self._words = words
        self._words.setflags(write=False)

    @classmethod
    def from_array(cls, values: ArrayLike, cols: Optional[int] = None) -> "BinaryMatrix":
        bits = np.asarray(values)
        if bits.size == 0 and bits.ndim < 2:
            bits = np.zeros((0, cols or 0), dtype=np.uint8)
        bits = _as_bits(bits, 2)
        return cls(pack_rows(bits), bits.shape[0], bits.shape[1])

    @classmethod
    def from_strings(cls, lines: Sequence[str], cols: Optional[int] = None) -> "BinaryMatrix":
        if not lines:
            return cls.zeros(0, cols or 0)
        return cls.from_array([[int(ch) for ch in line.strip()] for line in lines])

    @classmethod
    def from_supports(cls, supports: Sequence[Iterable[int]], cols: int) -> "BinaryMatrix":
        bits = np.zeros((len(supports), cols), dtype=np.uint8)
        for i, support in enumerate(supports):
            bits[i, list(support)] = 1
        return cls.from_array(bits)

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector], cols: Optional[int] = None) -> "BinaryMatrix":
        if not vectors:
            return cls.zeros(0, cols or 0)
        return cls(np.stack([v.words for v in vectors]).copy(), len(vectors), len(vectors[0]))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinaryMatrix":
        return cls(np.zeros((rows, _n_words(cols)), dtype=np.uint64), rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls.from_array(np.eye(n, dtype=np.uint8))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def words(self) -> np.ndarray:
        return self._words

    def to_array(self) -> np.ndarray:
        return unpack_rows(self._words, self.cols)

    @property
    def weight(self) -> int:
        return int(popcount(self._words).sum()) if self.rows else 0

    def row(self, i: int) -> BitVector:
        return BitVector(self._words[i].copy(), self.cols)

    def row_vectors(self) -> List[BitVector]:
        return [self.row(i) for i in range(self.rows)]

    def row_supports(self) -> List[List[int]]:
        bits = self.to_array()
        return [np.flatnonzero(r).tolist() for r in bits]

    @property
    def T(self) -> "BinaryMatrix":
        return BinaryMatrix.from_array(self.to_array().T)

    def __matmul__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if self.cols != other.rows:
            raise ValueError(f"Shape mismatch for product: {self.shape} @ {other.shape}")
        return BinaryMatrix.from_array(gf2_matmul(self.to_array(), other.to_array()))

    def kron(self, other: "BinaryMatrix") -> "BinaryMatrix":
        return BinaryMatrix.from_array(np.kron(self.to_array(), other.to_array()))

    def hstack(self, other: "BinaryMatrix") -> "BinaryMatrix":
        return BinaryMatrix.from_array(np.hstack([self.to_array(), other.to_array()]))

    def vstack(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if self.cols != other.cols:
            raise ValueError(f"Column mismatch for vstack: {self.cols} != {other.cols}")
        return BinaryMatrix(np.vstack([self._words, other._words]), self.rows + other.rows, self.cols)

    def select_rows(self, indices: Sequence[int]) -> "BinaryMatrix":
        return BinaryMatrix(self._words[list(indices)].copy(), len(indices), self.cols)

    def select_columns(self, indices: Sequence[int]) -> "BinaryMatrix":
        return BinaryMatrix.from_array(self.to_array()[:, list(indices)])

    def is_zero(self) -> bool:
        return not self._words.any()

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        lines.extend("".join(map(str, r)) for r in self.to_array())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BinaryMatrix":
        lines = text.splitlines()
        if not lines:
            raise ValueError("Empty matrix text")
        header = lines[0].split()
        if len(header) != 2:
            raise ValueError(f"Malformed header line: {lines[0]!r}")
        rows, cols = int(header[0]), int(header[1])
        body = [line.strip() for line in lines[1 : 1 + rows]]
        body += [""] * (rows - len(body)) if cols == 0 else []
        if len(body) != rows or any(len(line) != cols or set(line) - {"0", "1"} for line in body):
            raise ValueError(f"Matrix body does not match header {rows}x{cols}")
        if rows == 0:
            return cls.zeros(0, cols)
        return cls.from_array(np.array([[int(ch) for ch in line] for line in body], dtype=np.uint8).reshape(rows, cols))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BinaryMatrix) and self.shape == other.shape and np.array_equal(self._words, other._words)
        )

    def __hash__(self) -> int:
        return hash((self.shape, self._words.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.rows}x{self.cols}, weight={self.weight})"


def rank(m: BinaryMatrix) -> int:
    _, pivots = _eliminate(m.words.copy())
    return len(pivots)


def rref(m: BinaryMatrix) -> Tuple[BinaryMatrix, List[int]]:
    """Reduced row echelon form with the pivot column of each nonzero row."""
    words, pivots = _eliminate(m.words.copy())
    return BinaryMatrix(words, m.rows, m.cols), pivots


def kernel_basis(m: BinaryMatrix) -> BinaryMatrix:
    reduced, pivots = rref(m)
    dense = reduced.to_array()
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    basis = np.zeros((len(free), m.cols), dtype=np.uint8)
    basis[np.arange(len(free)), free] = 1
    if pivots and free:
        basis[:, pivots] = dense[: len(pivots)][:, free].T
    return BinaryMatrix.from_array(basis) if free else BinaryMatrix.zeros(0, m.cols)


def solve(m: BinaryMatrix, b: BitVector) -> Optional[BitVector]:
    """Some x with m x = b, or None when the system is inconsistent."""
    if len(b) != m.rows:
        raise ValueError(f"Right-hand side has length {len(b)}, expected {m.rows}")
    augmented = BinaryMatrix.from_array(np.hstack([m.to_array(), b.to_array()[:, None]]))
    reduced, pivots = rref(augmented)
    if m.cols in pivots:
        return None
    x = np.zeros(m.cols, dtype=np.uint8)
    if pivots:
        x[pivots] = reduced.to_array()[: len(pivots), m.cols]
    return BitVector.from_array(x)


def row_space_contains(m: BinaryMatrix, v: BitVector) -> bool:
    if len(v) != m.cols:
        raise ValueError(f"Vector has length {len(v)}, expected {m.cols}")
    return row_space_includes(m, BinaryMatrix.from_vectors([v])) is None


def reduce_rows(m: BinaryMatrix, vectors: np.ndarray) -> np.ndarray:
    """Reduces each row of a dense 0/1 array modulo rowspace(m); zero rows are exactly the members."""
    reduced, pivots = rref(m)
    basis = reduced.to_array()[: len(pivots)]
    out = np.array(vectors, dtype=np.uint8, copy=True)
    for i, p in enumerate(pivots):
        hit = out[:, p] == 1
        out[hit] ^= basis[i]
    return out


def row_space_includes(big: BinaryMatrix, small: BinaryMatrix) -> Optional[int]:
    """Index of the first row of `small` outside rowspace(`big`), or None if all rows are inside."""
    if small.rows == 0:
        return None
    if big.cols != small.cols:
        raise ValueError(f"Column mismatch: {big.cols} != {small.cols}")
    residue = reduce_rows(big, small.to_array())
    outside = np.flatnonzero(residue.any(axis=1))
    return int(outside[0]) if outside.size else None


def row_space_equal(a: BinaryMatrix, b: BinaryMatrix) -> bool:
    return row_space_includes(a, b) is None and row_space_includes(b, a) is None


def independent_rows(m: BinaryMatrix) -> List[int]:
    """Lowest-index maximal set of linearly independent rows."""
    if m.rows == 0:
        return []
    _, pivots = rref(m.T)
    return pivots


def inverse(m: BinaryMatrix) -> BinaryMatrix:
    if m.rows != m.cols:
        raise ValueError(f"Only square matrices are invertible, got {m.shape}")
    n = m.rows
    reduced, pivots = rref(m.hstack(BinaryMatrix.identity(n)))
    if len(pivots) < n or pivots[:n] != list(range(n)):
        raise ValueError("Matrix is singular over GF(2)")
    return reduced.select_columns(range(n, 2 * n))
