from typing import Optional

import numpy as np
import pytest

from subsystem_codes.codes import (
    BBSCode,
    ClassicalCode,
    HGPCode,
    SHPCode,
    SubsystemCode,
    VerificationError,
    build_bbs,
    build_hgp,
    build_shp,
    check_code,
    check_construction,
    code_from_graph,
    min_weight_logical,
    min_distance_bruteforce,
    minimize_qubits_q,
    sample_biregular,
    subsystem_distance_bruteforce,
    verify_gauge_fixing,
)
from subsystem_codes.codes.bbs import qubit_count
from subsystem_codes.gf2 import BinaryMatrix, rank, row_space_equal
from subsystem_codes.pauli import PauliOp, PauliType, symplectic_products

BBS21_A = ["0010011", "0101010", "1000110", "0100101", "0011100", "1110000", "1001001"]
BBS21_STAB_X = [
    [0, 1, 2, 3, 4, 5, 9, 10, 11, 12, 13, 14],
    [0, 1, 2, 6, 7, 8, 9, 10, 11, 15, 16, 17],
    [3, 4, 5, 6, 7, 8, 9, 10, 11, 18, 19, 20],
]
BBS21_STAB_Z = [
    [3, 4, 6, 7, 9, 10, 13, 14, 15, 16, 18, 19],
    [0, 1, 4, 5, 6, 8, 12, 13, 15, 17, 18, 19],
    [0, 2, 3, 4, 9, 11, 12, 13, 16, 17, 19, 20],
]
BBS21_LOGICAL_X = [[0, 1, 2], [3, 4, 5], [6, 7, 8], [3, 4, 5, 9, 10, 11]]
BBS21_LOGICAL_Z = [[0, 12, 17], [3, 9, 16], [6, 15, 18], [3, 4, 9, 13, 16, 19]]


def supports(matrix: BinaryMatrix):
    return sorted(tuple(s) for s in matrix.row_supports())


def random_parity_check(rng: np.random.Generator, max_rows: int = 5, max_cols: int = 8) -> BinaryMatrix:
    """Random m x n parity check with m <= max_rows, m < n <= max_cols and no zero rows."""
    m = int(rng.integers(1, max_rows + 1))
    n = int(rng.integers(m + 1, max_cols + 1))
    h = rng.integers(0, 2, size=(m, n), dtype=np.uint8)
    for i in range(m):
        while not h[i].any():
            h[i] = rng.integers(0, 2, size=n, dtype=np.uint8)
    return BinaryMatrix.from_array(h)


def random_invertible(rng: np.random.Generator, k: int) -> BinaryMatrix:
    while True:
        q = BinaryMatrix.from_array(rng.integers(0, 2, size=(k, k), dtype=np.uint8))
        if rank(q) == k:
            return q


def code_without_idle_bits(rng: np.random.Generator, k: Optional[int] = None) -> ClassicalCode:
    """Random code with every bit in the support of some codeword, optionally of a given dimension."""
    while True:
        code = ClassicalCode.from_parity_check(random_parity_check(rng, max_rows=4, max_cols=7))
        if (k is None or code.k == k) and code.G.to_array().any(axis=0).all():
            return code


class TestPauli:
    def test_products_and_weight(self):
        a, b = PauliOp.from_string("XXZI"), PauliOp.from_string("ZIZY")
        assert a.symplectic_product(b) == 1
        assert str(a * b) == "YXIY"
        assert (a * b).weight == 3
        assert a.kind is None and PauliOp.x([1], 4).kind is PauliType.X

    def test_invalid_label(self):
        with pytest.raises(ValueError):
            PauliOp.from_string("XA")


class TestBBS21:
    def test_parameters(self, bbs21):
        assert isinstance(bbs21, BBSCode)
        assert (bbs21.N, bbs21.K, bbs21.distance) == (21, 4, 3)
        assert bbs21.A == BinaryMatrix.from_strings(BBS21_A)

    def test_stabilizers(self, bbs21):
        assert row_space_equal(bbs21.stab_x, BinaryMatrix.from_supports(BBS21_STAB_X, 21))
        assert row_space_equal(bbs21.stab_z, BinaryMatrix.from_supports(BBS21_STAB_Z, 21))
        assert bbs21.stab_x.rows == bbs21.stab_z.rows == 3

    def test_logicals(self, bbs21):
        assert supports(bbs21.logical_x) == sorted(map(tuple, BBS21_LOGICAL_X))
        assert supports(bbs21.logical_z) == sorted(map(tuple, BBS21_LOGICAL_Z))

    def test_full_block_logical_is_a_product(self, bbs21):
        # X3..X11 anticommutes with Z6 Z15 Z18, so it is not one of the paired X logicals
        combined = BinaryMatrix.from_supports([BBS21_LOGICAL_X[2]], 21).row(0) ^ BinaryMatrix.from_supports(
            [BBS21_LOGICAL_X[3]], 21
        ).row(0)
        assert combined.support() == list(range(3, 12))
        assert combined.dot(BinaryMatrix.from_supports([[6, 15, 18]], 21).row(0)) == 1

    def test_weight_three_dressed_logical(self, bbs21):
        z = BinaryMatrix.from_supports([[4, 13, 19]], 21)
        assert not symplectic_products(bbs21.stab_x, z).any()
        assert symplectic_products(bbs21.logical_x, z).any()

    def test_distance_and_gauge_qubits(self, bbs21):
        assert subsystem_distance_bruteforce(bbs21) == 3
        assert bbs21.gauge_qubit_count == 21 - 4 - 6
        check_code(bbs21)


class TestBBSConstruction:
    def test_bacon_shor(self, bacon_shor):
        assert (bacon_shor.N, bacon_shor.K, bacon_shor.distance) == (9, 1, 3)
        assert bacon_shor.gauge_qubit_count == 4
        assert min_weight_logical(bacon_shor, PauliType.X).weight == 3

    def test_singular_q(self, hamming):
        with pytest.raises(ValueError):
            build_bbs(hamming, hamming, BinaryMatrix.zeros(4, 4))

    def test_dimension_mismatch(self, hamming, rep3):
        with pytest.raises(ValueError):
            build_bbs(hamming, rep3, BinaryMatrix.identity(4))

    def test_minimize_keeps_identity_without_search(self, hamming):
        assert minimize_qubits_q(hamming, hamming, attempts=1) == BinaryMatrix.identity(4)

    def test_minimize_never_increases_qubits(self, hamming):
        q = minimize_qubits_q(hamming, hamming, attempts=100, seed=3)
        assert rank(q) == 4
        assert qubit_count(hamming, hamming, q) <= qubit_count(hamming, hamming, BinaryMatrix.identity(4))

    @pytest.mark.parametrize("seed", range(50))
    def test_qubit_count_bounds(self, seed):
        rng = np.random.default_rng(seed)
        c1 = code_without_idle_bits(rng)
        c2 = code_without_idle_bits(rng, k=c1.k)
        code = build_bbs(c1, c2, random_invertible(rng, c1.k))
        d1, d2 = min_distance_bruteforce(c1), min_distance_bruteforce(c2)
        # every row of A is a nonzero codeword of C2 and every column one of C1
        assert max(c1.n * d2, d1 * c2.n) <= code.N <= c1.n * c2.n
        assert code.K == c1.k

    @pytest.mark.slow
    def test_minimize_reaches_21_qubits(self, hamming):
        q = minimize_qubits_q(hamming, hamming, attempts=2000)
        assert qubit_count(hamming, hamming, q) == 21


class TestSHP:
    def test_parameters(self, shp49):
        assert isinstance(shp49, SHPCode)
        assert (shp49.N, shp49.K, shp49.distance) == (49, 16, 3)
        assert shp49.stab_x.rows + shp49.stab_z.rows == 24
        assert shp49.gauge_qubit_count == 9
        check_code(shp49)

    def test_distance(self, shp49):
        assert subsystem_distance_bruteforce(shp49) == 3

    def test_qubit_numbering(self, shp49):
        assert shp49.layout[7 * 2 + 5][1:] == (2, 5)

    def test_asymmetric_product(self, hamming, rep3):
        code = build_shp(hamming.H, rep3.H)
        assert (code.N, code.K, code.distance) == (21, 4, 3)
        check_code(code)

    def test_repetition_product_is_bacon_shor(self, rep3, bacon_shor):
        code = build_shp(rep3.H, rep3.H)
        assert code.layout == bacon_shor.layout
        assert code.K == bacon_shor.K
        for group in ("gauge_x", "gauge_z", "stab_x", "stab_z"):
            assert row_space_equal(getattr(code, group), getattr(bacon_shor, group)), group

    @pytest.mark.parametrize("seed", range(5))
    def test_row_equivalent_checks_give_the_same_groups(self, seed):
        rng = np.random.default_rng(seed)
        h1, h2 = random_parity_check(rng), random_parity_check(rng)
        mixed = random_invertible(rng, h1.rows) @ h1
        redundant = mixed.vstack(mixed.select_rows([0]))
        reference = build_shp(h1, h2)
        for h in (mixed, redundant):
            code = build_shp(h, h2)
            assert code.K == reference.K
            for group in ("gauge_x", "gauge_z", "stab_x", "stab_z"):
                assert row_space_equal(getattr(code, group), getattr(reference, group)), group


class TestHGP:
    def test_surface_code_from_repetition(self, rep3):
        code = build_hgp(rep3.H, rep3.H)
        assert isinstance(code, HGPCode)
        assert (code.N, code.K, code.distance) == (13, 1, 3)
        assert code.gauge_qubit_count == 0
        check_code(code)
        assert subsystem_distance_bruteforce(code) == 3

    def test_lattice_offsets(self, hamming):
        code = build_hgp(hamming.H, hamming.H)
        assert [lattice.size for lattice in code.lattices] == [49, 9]
        assert code.lattices[1].offset == 49
        assert code.K == 16
        check_code(code)


class TestGaugeFixing:
    def test_hamming(self, hamming):
        report = verify_gauge_fixing(hamming.H, hamming.H)
        assert report.passed, report.witness
        assert report.k_subsystem == report.k_hgp == 16

    def test_repetition(self, rep3):
        report = verify_gauge_fixing(rep3.H, rep3.H)
        assert report.passed, report.witness
        assert report.k_hgp == 1

    @pytest.mark.parametrize("seed", range(20))
    def test_random_pairs(self, seed):
        rng = np.random.default_rng(seed)
        h1, h2 = random_parity_check(rng), random_parity_check(rng)
        report = verify_gauge_fixing(h1, h2)
        assert report.passed, report.witness
        assert all(report.checks.values())
        assert report.k_subsystem == report.k_hgp

    @pytest.mark.parametrize("seed", [0, 1])
    def test_biregular_pairs(self, seed):
        h1 = code_from_graph(sample_biregular(8, 2, 4, seed=seed)).H
        h2 = code_from_graph(sample_biregular(6, 2, 3, seed=seed + 10)).H
        assert verify_gauge_fixing(h1, h2).passed


class TestManifest:
    @pytest.mark.parametrize("fixture", ["bbs21", "shp49", "bacon_shor"])
    def test_round_trip(self, request, fixture):
        code = request.getfixturevalue(fixture)
        restored = SubsystemCode.from_manifest(code.to_manifest())
        assert type(restored) is type(code)
        assert (restored.N, restored.K, restored.distance, restored.name) == (code.N, code.K, code.distance, code.name)
        assert restored.stab_x == code.stab_x and restored.logical_z == code.logical_z
        check_code(restored)
        check_construction(restored)

    def test_hgp_round_trip(self, rep3):
        code = build_hgp(rep3.H, rep3.H)
        restored = SubsystemCode.from_manifest(code.to_manifest())
        assert restored.layout == code.layout
        check_construction(restored)

    def test_corrupted_stabilizer_is_reported(self, bbs21):
        manifest = bbs21.to_manifest()
        manifest["stab_x"][0] = sorted(manifest["stab_x"][0] + [6])
        with pytest.raises(VerificationError, match="anticommutes"):
            SubsystemCode.from_manifest(manifest).validate()

    def test_swapped_logicals_are_reported(self, bbs21):
        manifest = bbs21.to_manifest()
        manifest["logical_z"] = manifest["logical_z"][::-1]
        with pytest.raises(VerificationError, match="logical_x"):
            check_code(SubsystemCode.from_manifest(manifest))

    def test_foreign_manifest(self):
        with pytest.raises(ValueError):
            SubsystemCode.from_manifest({"format": "something-else"})

    def test_edited_construction_is_reported(self, bbs21):
        manifest = bbs21.to_manifest()
        manifest["construction"]["Q"] = BinaryMatrix.identity(4).to_text().splitlines()
        with pytest.raises(VerificationError):
            check_construction(SubsystemCode.from_manifest(manifest))
