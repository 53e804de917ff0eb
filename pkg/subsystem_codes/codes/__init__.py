from .classical import (
    BipartiteGraph,
    ClassicalCode,
    code_from_graph,
    hamming_7_4,
    min_distance_bruteforce,
    min_distance_information_set,
    repetition,
    sample_biregular,
    select_best_code,
)
from .base import LatticeTag, QubitLattice, SubsystemCode, min_weight_logical, subsystem_distance_bruteforce
from .bbs import BBSCode, build_bbs, minimize_qubits_q
from .shp import SHPCode, build_shp
from .hgp import HGPCode, build_hgp, hgp_distance_bound
from .verification import GaugeFixingReport, VerificationError, check_code, check_construction, verify_gauge_fixing
