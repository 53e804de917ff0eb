import itertools

import numpy as np
import pytest

from subsystem_codes.gf2 import (
    BinaryMatrix,
    BitVector,
    gf2_matmul,
    independent_rows,
    inverse,
    kernel_basis,
    pack_rows,
    popcount,
    rank,
    row_space_contains,
    row_space_equal,
    row_space_includes,
    rref,
    solve,
    unpack_rows,
)


def random_matrix(rng, rows, cols):
    return BinaryMatrix.from_array(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))


class TestPacking:
    @pytest.mark.parametrize("cols", [1, 7, 63, 64, 65, 130])
    def test_pack_unpack_preserves_bits(self, rng, cols):
        bits = rng.integers(0, 2, size=(5, cols), dtype=np.uint8)
        assert np.array_equal(unpack_rows(pack_rows(bits), cols), bits)

    def test_unpack_of_empty_matrix(self):
        assert unpack_rows(np.zeros((0, 2), dtype=np.uint64), 100).shape == (0, 100)

    def test_popcount(self, rng):
        bits = rng.integers(0, 2, size=(4, 150), dtype=np.uint8)
        assert popcount(pack_rows(bits)).tolist() == bits.sum(axis=1).tolist()

    def test_entries_must_be_binary(self):
        with pytest.raises(ValueError):
            BinaryMatrix.from_array([[0, 2]])


class TestBitVector:
    def test_support_weight_and_dot(self):
        a = BitVector.from_support([0, 3, 70], 80)
        b = BitVector.from_support([3, 70, 79], 80)
        assert a.support() == [0, 3, 70]
        assert a.weight == 3
        assert a.dot(b) == 0
        assert (a ^ b).support() == [0, 79]
        assert a[70] == 1 and a[71] == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            BitVector.zeros(3) ^ BitVector.zeros(4)

    def test_support_out_of_range(self):
        with pytest.raises(ValueError):
            BitVector.from_support([5], 5)


class TestElimination:
    def test_rank_of_identity_and_zero(self):
        assert rank(BinaryMatrix.identity(9)) == 9
        assert rank(BinaryMatrix.zeros(4, 100)) == 0

    def test_hamming_parity_check(self, hamming):
        assert rank(hamming.H) == 3
        reduced, pivots = rref(hamming.H)
        assert len(pivots) == 3
        assert row_space_equal(reduced, hamming.H)

    @pytest.mark.parametrize("shape", [(5, 9), (12, 12), (20, 70), (3, 130)])
    def test_kernel_is_orthogonal_and_complete(self, rng, shape):
        m = random_matrix(rng, *shape)
        kernel = kernel_basis(m)
        assert kernel.rows == m.cols - rank(m)
        if kernel.rows:
            assert (m @ kernel.T).is_zero()
            assert rank(kernel) == kernel.rows

    def test_solve_consistent_and_inconsistent(self, rng):
        m = random_matrix(rng, 6, 10)
        x = BitVector.from_array(rng.integers(0, 2, size=10, dtype=np.uint8))
        b = BitVector.from_array(gf2_matmul(m.to_array(), x.to_array()))
        y = solve(m, b)
        assert np.array_equal(gf2_matmul(m.to_array(), y.to_array()), b.to_array())
        singular = BinaryMatrix.from_strings(["110", "110"])
        assert solve(singular, BitVector.from_array([1, 0])) is None

    def test_row_space_membership(self, hamming):
        for word in hamming.G.row_vectors():
            assert row_space_contains(hamming.G, word)
        assert not row_space_contains(hamming.G, BitVector.from_support([0], 7))

    def test_row_space_includes_reports_first_outside_row(self, hamming):
        extended = hamming.G.vstack(BinaryMatrix.from_supports([[0]], 7))
        assert row_space_includes(hamming.G, extended) == 4
        assert row_space_includes(hamming.G, hamming.G) is None

    def test_independent_rows_prefers_low_indices(self):
        m = BinaryMatrix.from_strings(["1100", "1100", "0011", "1111", "1000"])
        assert independent_rows(m) == [0, 2, 4]

    def test_inverse(self, rng):
        while True:
            m = random_matrix(rng, 6, 6)
            if rank(m) == 6:
                break
        assert m @ inverse(m) == BinaryMatrix.identity(6)
        with pytest.raises(ValueError):
            inverse(BinaryMatrix.from_strings(["11", "11"]))


class TestMatrixOps:
    def test_product_transpose_and_kron(self, rng):
        a, b = random_matrix(rng, 3, 4), random_matrix(rng, 4, 5)
        assert (a @ b).T == b.T @ a.T
        assert a.kron(BinaryMatrix.identity(2)).shape == (6, 8)

    def test_text_round_trip_of_empty_matrix(self):
        empty = BinaryMatrix.zeros(0, 7)
        assert BinaryMatrix.from_text(empty.to_text()) == empty

    def test_malformed_text(self):
        with pytest.raises(ValueError):
            BinaryMatrix.from_text("2 3\n101\n10\n")


def small_matrices(count: int, max_size: int = 8):
    rng = np.random.default_rng(2024)
    return [
        random_matrix(rng, int(rng.integers(1, max_size + 1)), int(rng.integers(1, max_size + 1))) for _ in range(count)
    ]


class TestSmallMatrixProperties:
    @pytest.mark.parametrize("m", small_matrices(30))
    def test_rref_is_idempotent(self, m):
        reduced, pivots = rref(m)
        again, again_pivots = rref(reduced)
        assert again == reduced
        assert again_pivots == pivots
        assert row_space_equal(reduced, m)

    @pytest.mark.parametrize("m", small_matrices(30))
    def test_rank_of_transpose(self, m):
        assert rank(m) == rank(m.T)

    @pytest.mark.parametrize("m", small_matrices(30))
    def test_kernel_against_enumeration(self, m):
        words = np.array(list(itertools.product([0, 1], repeat=m.cols)), dtype=np.uint8)
        solutions = {tuple(x) for x in words[~gf2_matmul(m.to_array(), words.T).any(axis=0)]}
        kernel = kernel_basis(m)
        assert len(solutions) == 2 ** (m.cols - rank(m))
        assert kernel.rows == rank(kernel) == m.cols - rank(m)
        assert all(tuple(row) in solutions for row in kernel.to_array())
