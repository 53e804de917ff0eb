from collections import Counter
from dataclasses import dataclass
import itertools
import random
import statistics
from typing import List, Optional, Tuple

import networkx as nx
import numpy as np

from subsystem_codes import logger
from subsystem_codes.gf2 import BinaryMatrix, kernel_basis, popcount, rank, rref
from subsystem_codes.utils import derive_seed, parallel_map

DISTANCE_CAP = 24
SELECTION_CHANNEL_P = 0.03
MAX_GRAPH_ATTEMPTS = 1000


class ClassicalCode:
    """[n, k, d] binary linear code with generator G (k x n) and parity check H (m x n)."""

    def __init__(self, G: BinaryMatrix, H: BinaryMatrix, d: Optional[int] = None, name: str = ""):
        if G.cols != H.cols:
            raise ValueError(f"G has {G.cols} columns but H has {H.cols}")
        if H.rows and G.rows and not (G @ H.T).is_zero():
            raise ValueError("G H^T != 0")
        if rank(G) != G.rows:
            raise ValueError(f"G has dependent rows: rank {rank(G)} < {G.rows}")
        if G.rows != G.cols - rank(H):
            raise ValueError(f"k={G.rows} but n - rank(H) = {G.cols - rank(H)}")
        self.G = G
        self.H = H
        self.d = d
        self.name = name

    @classmethod
    def from_parity_check(cls, H: BinaryMatrix, d: Optional[int] = None, name: str = "") -> "ClassicalCode":
        reduced, pivots = rref(kernel_basis(H))
        G = reduced.select_rows(range(len(pivots)))
        return cls(G, H, d=d, name=name)

    @property
    def n(self) -> int:
        return self.H.cols

    @property
    def k(self) -> int:
        return self.G.rows

    @property
    def m(self) -> int:
        return self.H.rows

    def transpose(self) -> "ClassicalCode":
        """The code with parity check H^T, of length m and dimension m - rank(H)."""
        return ClassicalCode.from_parity_check(self.H.T, name=f"{self.name}^T" if self.name else "")

    def tanner_graph(self) -> "BipartiteGraph":
        return BipartiteGraph.from_parity_check(self.H)

    def __repr__(self) -> str:
        d = self.d if self.d is not None else "?"
        return f"ClassicalCode({self.name or 'code'} [{self.n},{self.k},{d}])"


@dataclass(frozen=True)
class BipartiteGraph:
    n_var: int
    n_check: int
    edges: Tuple[Tuple[int, int], ...]

    @classmethod
    def from_parity_check(cls, H: BinaryMatrix) -> "BipartiteGraph":
        checks, variables = np.nonzero(H.to_array())
        edges = tuple(sorted(zip(variables.tolist(), checks.tolist())))
        return cls(H.cols, H.rows, edges)

    def var_degrees(self) -> List[int]:
        degrees = [0] * self.n_var
        for v, _ in self.edges:
            degrees[v] += 1
        return degrees

    def check_degrees(self) -> List[int]:
        degrees = [0] * self.n_check
        for _, c in self.edges:
            degrees[c] += 1
        return degrees

    def is_simple(self) -> bool:
        return len(set(self.edges)) == len(self.edges)

    def is_biregular(self, b: int, c: int) -> bool:
        return set(self.var_degrees()) <= {b} and set(self.check_degrees()) <= {c}

    def to_parity_check(self) -> BinaryMatrix:
        h = np.zeros((self.n_check, self.n_var), dtype=np.uint8)
        for v, c in self.edges:
            h[c, v] ^= 1
        return BinaryMatrix.from_array(h)


def hamming_7_4() -> ClassicalCode:
    G = BinaryMatrix.from_strings(["1000110", "0100101", "0010011", "0001111"])
    H = BinaryMatrix.from_strings(["1101100", "1011010", "0111001"])
    return ClassicalCode(G, H, d=3, name="hamming7")


def repetition(n: int) -> ClassicalCode:
    if n < 1:
        raise ValueError(f"Repetition code needs n >= 1, got {n}")
    h = np.zeros((n - 1, n), dtype=np.uint8)
    for i in range(n - 1):
        h[i, i] = h[i, i + 1] = 1
    H = BinaryMatrix.from_array(h) if n > 1 else BinaryMatrix.zeros(0, 1)
    return ClassicalCode(BinaryMatrix.from_array(np.ones((1, n), dtype=np.uint8)), H, d=n, name=f"rep{n}")


def design_dimension(n_var: int, b: int, c: int) -> int:
    return n_var - n_var * b // c


def sample_biregular(n_var: int, b: int, c: int, seed: int, max_attempts: int = MAX_GRAPH_ATTEMPTS) -> BipartiteGraph:
    """
    Configuration-model (b, c)-biregular graph. The pairing is drawn as a multigraph and every repeated edge is
    then removed by a degree-preserving swap with a random other edge.
    :param max_attempts: swap picks allowed to fail before giving up.
    """
    if n_var <= 0 or b <= 0 or c <= 0:
        raise ValueError(f"Invalid degrees or size: n_var={n_var}, b={b}, c={c}")
    if (n_var * b) % c:
        raise ValueError(f"n_var * b = {n_var * b} is not divisible by c = {c}")
    n_check = n_var * b // c
    if b > n_check or c > n_var:
        raise ValueError(f"No simple ({b},{c})-biregular graph has {n_var} variables and {n_check} checks")
    rng = random.Random(seed)
    graph = nx.bipartite.configuration_model([b] * n_var, [c] * n_check, create_using=nx.MultiGraph, seed=rng)
    edges = sorted((min(u, v), max(u, v) - n_var) for u, v in graph.edges())
    edges = _remove_parallel_edges(edges, rng, max_attempts)
    logger.debug(f"Simple ({b},{c}) graph on {n_var} variables")
    return BipartiteGraph(n_var, n_check, tuple(sorted(edges)))


def _remove_parallel_edges(
    edges: List[Tuple[int, int]], rng: random.Random, max_attempts: int
) -> List[Tuple[int, int]]:
    """
    Each swap replaces one copy of a repeated edge (u, v) and an edge (u', v') with (u, v') and (u', v),
    both new, so the excess multiplicity drops by at least one and all degrees are kept.
    """
    counts = Counter(edges)
    failures = 0
    while True:
        repeated = sorted(edge for edge, count in counts.items() if count > 1)
        if not repeated:
            return edges
        u, v = repeated[rng.randrange(len(repeated))]
        partners = [
            i
            for i, (u2, v2) in enumerate(edges)
            if u2 != u and v2 != v and (u, v2) not in counts and (u2, v) not in counts
        ]
        if not partners:
            failures += 1
            if failures >= max_attempts:
                raise RuntimeError(f"Could not remove repeated edge ({u}, {v}) after {failures} failed swaps")
            continue
        i = partners[rng.randrange(len(partners))]
        u2, v2 = edges[i]
        j = edges.index((u, v))
        for old in ((u, v), (u2, v2)):
            counts[old] -= 1
            if not counts[old]:
                del counts[old]
        edges[j], edges[i] = (u, v2), (u2, v)
        counts[(u, v2)] += 1
        counts[(u2, v)] += 1


def code_from_graph(g: BipartiteGraph, name: str = "") -> ClassicalCode:
    return ClassicalCode.from_parity_check(g.to_parity_check(), name=name)


def span_table(basis: np.ndarray) -> np.ndarray:
    """All 2**r combinations of r packed rows, combination index i selecting rows by its bits."""
    table = np.zeros((1, basis.shape[1]), dtype=np.uint64)
    for row in basis:
        table = np.vstack([table, table ^ row])
    return table


def span_blocks(basis: np.ndarray, block_bits: int = 16):
    """Yields (high index, packed words) blocks that together cover the span of the rows of `basis`."""
    r = basis.shape[0]
    low = min(r, block_bits)
    table = span_table(basis[:low])
    high = basis[low:]
    current = np.zeros(basis.shape[1], dtype=np.uint64)
    for h in range(1 << (r - low)):
        if h:
            bit = (h & -h).bit_length() - 1
            current = current ^ high[bit]
        yield h, table ^ current


def min_distance_bruteforce(code: ClassicalCode, cap: int = DISTANCE_CAP) -> Optional[int]:
    if code.k == 0 or code.k > cap:
        return None
    best = code.n
    for _, block in span_blocks(code.G.words):
        weights = popcount(block)
        nonzero = weights[weights > 0]
        if nonzero.size:
            best = min(best, int(nonzero.min()))
    return best


def min_distance_information_set(code: ClassicalCode, iterations: int = 200, seed: int = 0, p: int = 3) -> int:
    """Lee-Brickell search: an upper bound on d that is exact with high probability for short codes."""
    if code.k == 0:
        raise ValueError("A zero-dimensional code has no nonzero codewords")
    rng = np.random.default_rng(seed)
    G = code.G.to_array()
    best = code.n
    for _ in range(iterations):
        permutation = rng.permutation(code.n)
        reduced, _ = rref(BinaryMatrix.from_array(G[:, permutation]))
        rows = reduced.to_array()[: code.k].astype(np.int64)
        for size in range(1, min(p, code.k) + 1):
            combos = np.array(list(itertools.combinations(range(code.k), size)))
            weights = (rows[combos].sum(axis=1) & 1).sum(axis=1)
            best = min(best, int(weights.min()))
    return best


def _candidate_failure_rate(job: Tuple[int, int, int, int, int, float, int]) -> float:
    from subsystem_codes.decoders.bp import bsc_failure_rate

    n_var, b, c, seed, index, channel_p, shots = job
    code = code_from_graph(sample_biregular(n_var, b, c, derive_seed(seed, index)))
    return bsc_failure_rate(code, channel_p, shots, seed=derive_seed(seed, index, 1))


def evaluate_candidates(
    n_var: int,
    b: int,
    c: int,
    trials: int,
    channel_p: float = SELECTION_CHANNEL_P,
    seed: int = 0,
    shots: int = 200,
    n_jobs: int = 1,
) -> List[float]:
    """BSC failure rate of each of `trials` sampled graphs, candidate i seeded from (seed, i)."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    jobs = [(n_var, b, c, seed, index, channel_p, shots) for index in range(trials)]
    return parallel_map(_candidate_failure_rate, jobs, n_jobs)


def select_best_code(
    n_var: int,
    b: int,
    c: int,
    trials: int,
    channel_p: float = SELECTION_CHANNEL_P,
    seed: int = 0,
    shots: int = 200,
    n_jobs: int = 1,
) -> ClassicalCode:
    """
    Samples `trials` configuration-model codes and keeps the one BP decodes best on a BSC.
    :param channel_p: bit-flip probability of the ranking channel.
    :param shots: BSC samples per candidate.
    :return: the winning code; ties go to the lower candidate index.
    """
    rates = evaluate_candidates(n_var, b, c, trials, channel_p, seed, shots, n_jobs)
    best = min(range(trials), key=lambda i: (rates[i], i))
    logger.info(
        f"Selected candidate {best} of {trials} ({b},{c}) codes on {n_var} bits: "
        f"failure rate {rates[best]:.4f} (median {statistics.median(rates):.4f})"
    )
    graph = sample_biregular(n_var, b, c, derive_seed(seed, best))
    return code_from_graph(graph, name=f"({b},{c})-n{n_var}-s{seed}-c{best}")
