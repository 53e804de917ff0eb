from enum import Enum
from typing import Iterable

import numpy as np

from subsystem_codes.gf2 import BinaryMatrix, BitVector, gf2_matmul


class PauliType(Enum):
    X = "X"
    Z = "Z"

    @property
    def opposite(self) -> "PauliType":
        return PauliType.Z if self is PauliType.X else PauliType.X


class PauliOp:
    """Pauli operator up to phase, as an (x, z) pair of support vectors over n qubits."""

    __slots__ = ("n_qubits", "x_support", "z_support")

    def __init__(self, x_support: BitVector, z_support: BitVector):
        if len(x_support) != len(z_support):
            raise ValueError(f"X and Z supports differ in length: {len(x_support)} != {len(z_support)}")
        self.n_qubits = len(x_support)
        self.x_support = x_support
        self.z_support = z_support

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliOp":
        return cls(BitVector.zeros(n_qubits), BitVector.zeros(n_qubits))

    @classmethod
    def x(cls, support: Iterable[int], n_qubits: int) -> "PauliOp":
        return cls(BitVector.from_support(support, n_qubits), BitVector.zeros(n_qubits))

    @classmethod
    def z(cls, support: Iterable[int], n_qubits: int) -> "PauliOp":
        return cls(BitVector.zeros(n_qubits), BitVector.from_support(support, n_qubits))

    @classmethod
    def of_type(cls, kind: PauliType, support: Iterable[int], n_qubits: int) -> "PauliOp":
        return cls.x(support, n_qubits) if kind is PauliType.X else cls.z(support, n_qubits)

    @classmethod
    def from_vector(cls, kind: PauliType, vector: BitVector) -> "PauliOp":
        zeros = BitVector.zeros(len(vector))
        return cls(vector, zeros) if kind is PauliType.X else cls(zeros, vector)

    @classmethod
    def from_string(cls, text: str) -> "PauliOp":
        """Parses a dense label such as 'IXZY'."""
        if set(text) - set("IXYZ"):
            raise ValueError(f"Invalid Pauli label {text!r}")
        x = np.array([ch in "XY" for ch in text], dtype=np.uint8)
        z = np.array([ch in "ZY" for ch in text], dtype=np.uint8)
        return cls(BitVector.from_array(x), BitVector.from_array(z))

    def symplectic_product(self, other: "PauliOp") -> int:
        return self.x_support.dot(other.z_support) ^ self.z_support.dot(other.x_support)

    def commutes_with(self, other: "PauliOp") -> bool:
        return self.symplectic_product(other) == 0

    @property
    def weight(self) -> int:
        return len(set(self.x_support.support()) | set(self.z_support.support()))

    @property
    def kind(self):
        """PauliType.X or PauliType.Z for pure operators, None for mixed ones and the identity."""
        has_x, has_z = self.x_support.any(), self.z_support.any()
        if has_x and not has_z:
            return PauliType.X
        if has_z and not has_x:
            return PauliType.Z
        return None

    def support_of(self, kind: PauliType) -> BitVector:
        return self.x_support if kind is PauliType.X else self.z_support

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        return PauliOp(self.x_support ^ other.x_support, self.z_support ^ other.z_support)

    def __eq__(self, other) -> bool:
        return isinstance(other, PauliOp) and self.x_support == other.x_support and self.z_support == other.z_support

    def __hash__(self) -> int:
        return hash((self.x_support, self.z_support))

    def __str__(self) -> str:
        x, z = self.x_support.to_array(), self.z_support.to_array()
        return "".join("IXZY"[a + 2 * b] for a, b in zip(x, z))

    def __repr__(self) -> str:
        return f"PauliOp({self})"


def symplectic_products(a: BinaryMatrix, b: BinaryMatrix) -> np.ndarray:
    """Commutation matrix between X-type rows of `a` and Z-type rows of `b`: entry (i, j) = a_i . b_j mod 2."""
    return gf2_matmul(a.to_array(), b.to_array().T)
