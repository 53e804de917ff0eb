"""
Sum-product belief propagation on a Tanner graph, flooding schedule.

With measurement errors on, every check j gets an extra variable node n_data + j of degree one, and every check
also hears from a syndrome node that keeps sending +clip (syndrome bit 0) or -clip (syndrome bit 1) and never
listens. Check updates are done in sign/magnitude form with phi(x) = -log(tanh(x / 2)), which is its own inverse,
so the tanh rule never overflows.
"""
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np
from scipy import sparse

from subsystem_codes.gf2 import BinaryMatrix, BitVector

DEFAULT_MAX_ITERS = 60
DEFAULT_CLIP = 50.0
_PROBABILITY_FLOOR = 1e-12

SyndromeLike = Union[BitVector, np.ndarray]


def phi(x: np.ndarray) -> np.ndarray:
    return np.log1p(2.0 / np.expm1(x))


@dataclass(frozen=True)
class BpConfig:
    p_data: float = 0.01
    p_meas: float = 0.01
    max_iters: int = DEFAULT_MAX_ITERS
    clip: float = DEFAULT_CLIP
    measurement_errors: bool = False

    def __post_init__(self):
        if not 0 < self.p_data < 0.5 or not 0 < self.p_meas < 0.5:
            raise ValueError(f"BP priors must lie in (0, 1/2): p_data={self.p_data}, p_meas={self.p_meas}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.clip <= 0:
            raise ValueError(f"clip must be positive, got {self.clip}")

    @classmethod
    def for_channel(cls, p: float, q: Optional[float] = None, **kwargs) -> "BpConfig":
        """Config for a channel flipping bits at p and syndromes at q (default p), clamped into (0, 1/2)."""
        q = p if q is None else q

        def clamp(x: float) -> float:
            return min(max(x, _PROBABILITY_FLOOR), 0.5 - _PROBABILITY_FLOOR)

        return cls(p_data=clamp(p), p_meas=clamp(q), **kwargs)


@dataclass(frozen=True)
class NodeLlrs:
    data: float
    meas: float
    syndrome: np.ndarray


@dataclass
class BpResult:
    data_correction: BitVector
    meas_correction: BitVector
    converged: bool
    iterations: int
    posterior_llrs: np.ndarray


@dataclass
class BpBatchResult:
    data_corrections: np.ndarray
    meas_corrections: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray
    posterior_llrs: np.ndarray

    def __getitem__(self, i: int) -> BpResult:
        return BpResult(
            data_correction=BitVector.from_array(self.data_corrections[i]),
            meas_correction=BitVector.from_array(self.meas_corrections[i]),
            converged=bool(self.converged[i]),
            iterations=int(self.iterations[i]),
            posterior_llrs=self.posterior_llrs[i],
        )


def init_llrs(cfg: BpConfig, syndrome: SyndromeLike) -> NodeLlrs:
    s = _as_syndrome_array(syndrome)
    return NodeLlrs(
        data=float(np.log((1 - cfg.p_data) / cfg.p_data)),
        meas=float(np.log((1 - cfg.p_meas) / cfg.p_meas)),
        syndrome=np.where(s == 1, -cfg.clip, cfg.clip).astype(np.float64),
    )


class TannerGraph:
    """Edge lists of a parity-check matrix, optionally extended by one measurement-error node per check."""

    def __init__(self, H: BinaryMatrix, measurement_errors: bool = False):
        dense = H.to_array()
        self.n_data = H.cols
        self.n_check = H.rows
        self.measurement_errors = measurement_errors
        checks, variables = np.nonzero(dense)
        if measurement_errors:
            checks = np.concatenate([checks, np.arange(self.n_check)])
            variables = np.concatenate([variables, self.n_data + np.arange(self.n_check)])
        order = np.lexsort((variables, checks))
        self.edge_check = checks[order]
        self.edge_var = variables[order]
        self.n_nodes = self.n_data + (self.n_check if measurement_errors else 0)
        n_edges = self.edge_var.size
        ones = np.ones(n_edges)
        self._var_incidence = sparse.csr_matrix((ones, (self.edge_var, np.arange(n_edges))), (self.n_nodes, n_edges))
        self._check_incidence = sparse.csr_matrix(
            (ones, (self.edge_check, np.arange(n_edges))), (self.n_check, n_edges)
        )
        self._checks = sparse.csr_matrix(dense.astype(np.float64))

    @classmethod
    def from_code(cls, code, measurement_errors: bool = False) -> "TannerGraph":
        return cls(code.H, measurement_errors=measurement_errors)

    @property
    def n_edges(self) -> int:
        return int(self.edge_var.size)

    def check_adjacency(self) -> List[List[int]]:
        return [self.edge_var[self.edge_check == j].tolist() for j in range(self.n_check)]

    def var_adjacency(self) -> List[List[int]]:
        return [sorted(self.edge_check[self.edge_var == i].tolist()) for i in range(self.n_nodes)]

    def priors(self, cfg: BpConfig) -> np.ndarray:
        llrs = init_llrs(cfg, np.zeros(self.n_check, dtype=np.uint8))
        return np.concatenate([np.full(self.n_data, llrs.data), np.full(self.n_nodes - self.n_data, llrs.meas)])

    def sum_into_vars(self, edge_values: np.ndarray) -> np.ndarray:
        return (self._var_incidence @ edge_values.T).T

    def sum_into_checks(self, edge_values: np.ndarray) -> np.ndarray:
        return (self._check_incidence @ edge_values.T).T

    def syndromes_of(self, data: np.ndarray, meas: Optional[np.ndarray] = None) -> np.ndarray:
        """H data (xor meas) for a batch of rows."""
        parity = np.rint((self._checks @ np.asarray(data, dtype=np.float64).T).T).astype(np.int64) & 1
        if meas is not None:
            parity ^= np.asarray(meas, dtype=np.int64)
        return parity.astype(np.uint8)


def _as_syndrome_array(syndrome: SyndromeLike) -> np.ndarray:
    if isinstance(syndrome, BitVector):
        return syndrome.to_array()
    return np.asarray(syndrome, dtype=np.uint8)


def _split(graph: TannerGraph, hard: np.ndarray):
    data = hard[:, : graph.n_data]
    meas = hard[:, graph.n_data :] if graph.measurement_errors else None
    return data, meas


def decode_batch(graph: TannerGraph, cfg: BpConfig, syndromes: np.ndarray, early_stop: bool = True) -> BpBatchResult:
    """Decodes every row of `syndromes`; rows stop updating once their checks are all satisfied."""
    s = np.atleast_2d(np.asarray(syndromes, dtype=np.uint8))
    if s.shape[1] != graph.n_check:
        raise ValueError(f"Syndrome length {s.shape[1]} does not match {graph.n_check} checks")
    batch = s.shape[0]
    priors = graph.priors(cfg)
    lo = float(phi(np.float64(cfg.clip)))
    ev, ec = graph.edge_var, graph.edge_check

    posterior = np.tile(priors, (batch, 1))
    hard = (posterior < 0).astype(np.uint8)
    converged = np.all(graph.syndromes_of(*_split(graph, hard)) == s, axis=1)
    iterations = np.zeros(batch, dtype=np.int64)
    messages = np.zeros((batch, graph.n_edges))
    active = ~converged if early_stop else np.ones(batch, dtype=bool)

    it = 0
    while it < cfg.max_iters and active.any():
        it += 1
        rows = np.flatnonzero(active)
        h = messages[rows]
        # variable to check
        g = priors[ev] + graph.sum_into_vars(h)[:, ev] - h
        magnitude = phi(np.clip(np.abs(g), lo, cfg.clip))
        negative = (g < 0).astype(np.float64)
        # check to variable; the syndrome node adds phi(clip) to every check and its sign bit
        totals = graph.sum_into_checks(magnitude) + lo
        signs = np.rint(graph.sum_into_checks(negative)).astype(np.int64) + s[rows]
        others = np.maximum(totals[:, ec] - magnitude, lo)
        parity = (signs[:, ec] - negative.astype(np.int64)) & 1
        h = np.where(parity == 1, -phi(others), phi(others))
        messages[rows] = h

        post = priors + graph.sum_into_vars(h)
        decided = (post < 0).astype(np.uint8)
        satisfied = np.all(graph.syndromes_of(*_split(graph, decided)) == s[rows], axis=1)
        posterior[rows] = post
        hard[rows] = decided
        iterations[rows] = it
        converged[rows] = satisfied
        if early_stop:
            active[rows[satisfied]] = False

    data = hard[:, : graph.n_data]
    meas = hard[:, graph.n_data :] if graph.measurement_errors else np.zeros((batch, graph.n_check), dtype=np.uint8)
    return BpBatchResult(data, meas, converged, iterations, posterior)


def decode(graph: TannerGraph, cfg: BpConfig, syndrome: SyndromeLike, early_stop: bool = True) -> BpResult:
    return decode_batch(graph, cfg, _as_syndrome_array(syndrome)[None, :], early_stop=early_stop)[0]


def _sample_channel(code, p: float, q: float, shots: int, rng: np.random.Generator):
    errors = (rng.random((shots, code.n)) < p).astype(np.uint8)
    flips = (rng.random((shots, code.m)) < q).astype(np.uint8)
    return errors, flips


def bsc_trial(code, p: float, q: float = 0.0, seed: int = 0, max_iters: int = DEFAULT_MAX_ITERS) -> bool:
    """One BSC(p) transmission with syndrome flips at q; success iff the correction equals the error."""
    return bsc_failure_rate(code, p, 1, seed=seed, q=q, max_iters=max_iters) == 0.0


def bsc_failure_rate(
    code, p: float, shots: int, seed: int = 0, q: float = 0.0, max_iters: int = DEFAULT_MAX_ITERS
) -> float:
    rng = np.random.default_rng(seed)
    errors, flips = _sample_channel(code, p, q, shots, rng)
    graph = TannerGraph(code.H, measurement_errors=q > 0)
    cfg = BpConfig.for_channel(p, q if q > 0 else None, max_iters=max_iters, measurement_errors=q > 0)
    syndromes = graph.syndromes_of(errors, flips)
    result = decode_batch(graph, cfg, syndromes)
    failures = np.any(result.data_corrections != errors, axis=1)
    return float(failures.mean())


class BpDecoder:
    """BP on one parity-check matrix; keeps a Tanner graph per measurement-error setting."""

    def __init__(self, H: BinaryMatrix):
        self.H = H
        self._graphs = {}

    def graph(self, measurement_errors: bool) -> TannerGraph:
        if measurement_errors not in self._graphs:
            self._graphs[measurement_errors] = TannerGraph(self.H, measurement_errors=measurement_errors)
        return self._graphs[measurement_errors]

    def decode_batch(self, cfg: BpConfig, syndromes: np.ndarray) -> BpBatchResult:
        return decode_batch(self.graph(cfg.measurement_errors), cfg, syndromes)
