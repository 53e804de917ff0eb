from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from subsystem_codes import logger
from subsystem_codes.codes.base import SubsystemCode
from subsystem_codes.gf2 import BinaryMatrix, rank, row_space_equal, row_space_includes
from subsystem_codes.pauli import symplectic_products


class VerificationError(Exception):
    """A code invariant does not hold; the message carries a witness."""


def _first_anticommuting(a: BinaryMatrix, b: BinaryMatrix) -> Optional[Tuple[int, int]]:
    if a.rows == 0 or b.rows == 0:
        return None
    hits = np.argwhere(symplectic_products(a, b) == 1)
    return (int(hits[0][0]), int(hits[0][1])) if hits.size else None


def check_code(code: SubsystemCode):
    """
    Full quadratic check of the commutation relations, the canonical pairing of bare logicals, the inclusion of
    the stabilizers in the gauge group and the identity K = N - rank(S_X) - rank(S_Z) - g.
    """
    groups = {
        "stab_x": code.stab_x,
        "stab_z": code.stab_z,
        "gauge_x": code.gauge_x,
        "gauge_z": code.gauge_z,
        "logical_x": code.logical_x,
        "logical_z": code.logical_z,
    }
    must_commute = [
        ("stab_x", "stab_z"),
        ("stab_x", "gauge_z"),
        ("gauge_x", "stab_z"),
        ("stab_x", "logical_z"),
        ("logical_x", "stab_z"),
        ("logical_x", "gauge_z"),
        ("gauge_x", "logical_z"),
    ]
    for x_label, z_label in must_commute:
        pair = _first_anticommuting(groups[x_label], groups[z_label])
        if pair is not None:
            raise VerificationError(f"{x_label}[{pair[0]}] anticommutes with {z_label}[{pair[1]}]")

    if code.K:
        pairing = symplectic_products(code.logical_x, code.logical_z)
        wrong = np.argwhere(pairing != np.eye(code.K, dtype=np.uint8))
        if wrong.size:
            i, j = (int(v) for v in wrong[0])
            relation = "anticommutes" if pairing[i, j] else "commutes"
            raise VerificationError(f"logical_x[{i}] {relation} with logical_z[{j}]")

    for stab_label, gauge_label in (("stab_x", "gauge_x"), ("stab_z", "gauge_z")):
        outside = row_space_includes(groups[gauge_label], groups[stab_label])
        if outside is not None:
            raise VerificationError(f"{stab_label}[{outside}] is not generated by {gauge_label}")

    expected = code.N - rank(code.stab_x) - rank(code.stab_z) - code.gauge_qubit_count
    if code.K != expected:
        raise VerificationError(f"K={code.K} but N - rank(S_X) - rank(S_Z) - g = {expected}")
    logger.debug(f"{code!r}: all commutation and bookkeeping checks passed")


def check_construction(code: SubsystemCode):
    """Rebuilds the code from its stored construction inputs and compares the generated groups."""
    rebuilt = code.rebuild()
    if rebuilt is None:
        return
    if (rebuilt.N, rebuilt.K) != (code.N, code.K):
        raise VerificationError(f"Stored [[{code.N},{code.K}]] but construction gives [[{rebuilt.N},{rebuilt.K}]]")
    for label in ("gauge_x", "gauge_z", "stab_x", "stab_z"):
        stored, fresh = getattr(code, label), getattr(rebuilt, label)
        outside = row_space_includes(fresh, stored)
        if outside is not None:
            raise VerificationError(f"{label}[{outside}] is not in the group the construction generates")
        if not row_space_equal(stored, fresh):
            raise VerificationError(f"{label} generates a smaller group than the construction")


@dataclass
class GaugeFixingReport:
    passed: bool
    k_subsystem: int
    k_hgp: int
    gauge_qubits: Tuple[int, int]
    checks: Dict[str, bool] = field(default_factory=dict)
    witness: Optional[str] = None

    def summary(self) -> str:
        verdict = "pass" if self.passed else f"FAIL ({self.witness})"
        return f"gauge fixing {verdict}: K(shp pair)={self.k_subsystem}, K(hgp)={self.k_hgp}"


def _small_lattice_permutation(m1: int, m2: int) -> List[int]:
    """Position on the m1 x m2 small lattice of each site (i, j) of an m2 x m1 lattice, row-major."""
    return [j * m2 + i for i in range(m2) for j in range(m1)]


def _block_diagonal(large: BinaryMatrix, small: BinaryMatrix, permutation: List[int]) -> BinaryMatrix:
    n_large, n_small = large.cols, small.cols
    out = np.zeros((large.rows + small.rows, n_large + n_small), dtype=np.uint8)
    out[: large.rows, :n_large] = large.to_array()
    out[large.rows :, n_large + np.array(permutation, dtype=np.int64)] = small.to_array()
    return BinaryMatrix.from_array(out)


def verify_gauge_fixing(h1: BinaryMatrix, h2: BinaryMatrix) -> GaugeFixingReport:
    """
    Checks that HGP(h1, h2) gauge-fixes the pair SHP(h1, h2) on the large lattice and SHP(h2^T, h1^T) on the
    small lattice, with site (i, j) of the second code sitting on small-lattice site (j, i):
    S(pair) <= S(hgp) <= G(pair) for both Pauli types, and both codes encode the same number of qubits.
    """
    from subsystem_codes.codes.hgp import build_hgp
    from subsystem_codes.codes.shp import build_shp

    hgp = build_hgp(h1, h2)
    large = build_shp(h1, h2)
    small = build_shp(h2.T, h1.T)
    permutation = _small_lattice_permutation(h1.rows, h2.rows)

    checks: Dict[str, bool] = {}
    witness = None
    for kind in ("x", "z"):
        stab = _block_diagonal(getattr(large, f"stab_{kind}"), getattr(small, f"stab_{kind}"), permutation)
        gauge = _block_diagonal(getattr(large, f"gauge_{kind}"), getattr(small, f"gauge_{kind}"), permutation)
        hgp_stab = getattr(hgp, f"stab_{kind}")
        outside = row_space_includes(hgp_stab, stab)
        checks[f"S_{kind}(shp) <= S_{kind}(hgp)"] = outside is None
        if outside is not None and witness is None:
            witness = f"shp stab_{kind}[{outside}] is not a stabilizer of the hgp code"
        outside = row_space_includes(gauge, hgp_stab)
        checks[f"S_{kind}(hgp) <= G_{kind}(shp)"] = outside is None
        if outside is not None and witness is None:
            witness = f"hgp stab_{kind}[{outside}] is not in the shp gauge group"
    k_pair = large.K + small.K
    checks["K(shp) = K(hgp)"] = k_pair == hgp.K
    if k_pair != hgp.K and witness is None:
        witness = f"K(shp pair)={k_pair} != K(hgp)={hgp.K}"

    report = GaugeFixingReport(
        passed=all(checks.values()),
        k_subsystem=k_pair,
        k_hgp=hgp.K,
        gauge_qubits=(large.gauge_qubit_count, small.gauge_qubit_count),
        checks=checks,
        witness=witness,
    )
    logger.info(report.summary())
    return report
