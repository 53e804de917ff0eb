from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from subsystem_codes import logger
from subsystem_codes.codes.base import SubsystemCode
from subsystem_codes.custom_io import PathLike, create_dir_if_dont_exist, write_gnuplot
from subsystem_codes.metrics import Estimator, FitResult, binomial_std, fit_power_law
from subsystem_codes.simulation.pheno import ERROR_TYPES, ImportanceResult, SimResult

CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = [
    "code_id",
    "n_classical",
    "N",
    "K",
    "p",
    "trials",
    "block_failures",
    "qubit_index",
    "qubit_failures",
    "estimator",
    "seed",
    "error_type",
    "failure_rate",
    "std_error",
]


def classical_length(code: SubsystemCode) -> int:
    """Block length of the first classical code the quantum code was built from, -1 when there is none."""
    if hasattr(code, "c1"):
        return code.c1.n
    if hasattr(code, "h1"):
        return code.h1.cols
    return -1


def results_frame(code: SubsystemCode, results: Sequence[SimResult]) -> pd.DataFrame:
    """
    One block row (qubit_index = -1) and K per-qubit rows for each result and error type.
    :return: A pandas DataFrame with the CSV_COLUMNS columns
    """
    rows = []
    for result in results:
        base = {
            "code_id": result.code_id or code.name,
            "n_classical": classical_length(code),
            "N": code.N,
            "K": code.K,
            "p": result.p,
            "trials": result.trials,
            "estimator": result.estimator.value,
            "seed": result.seed,
        }
        for error_type in ERROR_TYPES:
            block = result.block_count(error_type)
            counts = [block] + result.qubit_counts(error_type).tolist()
            for index, failures in zip(range(-1, code.K), counts):
                rows.append(
                    {
                        **base,
                        "block_failures": block,
                        "qubit_index": index,
                        "qubit_failures": failures,
                        "error_type": error_type,
                        "failure_rate": failures / result.trials,
                        "std_error": float(binomial_std(failures, result.trials)),
                    }
                )
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def importance_frame(code: SubsystemCode, importance: ImportanceResult, p_grid: Sequence[float]) -> pd.DataFrame:
    """Same schema as results_frame; importance estimates have no trial or failure counts."""
    rows = []
    for p in p_grid:
        for error_type in ERROR_TYPES:
            block_rate, block_std, tail = importance.at(p, error_type)
            if tail > 1e-3 * max(block_rate, 1e-300):
                logger.warning(f"p={p:.3g}: unsampled weights carry probability {tail:.3g}, comparable to P_L")
            qubit_rates, qubit_stds = importance.qubit_at(p, error_type)
            estimates = [(block_rate, block_std)] + list(zip(qubit_rates.tolist(), qubit_stds.tolist()))
            for index, (rate, std) in zip(range(-1, code.K), estimates):
                rows.append(
                    {
                        "code_id": importance.code_id or code.name,
                        "n_classical": classical_length(code),
                        "N": code.N,
                        "K": code.K,
                        "p": p,
                        "trials": np.nan,
                        "block_failures": np.nan,
                        "qubit_index": index,
                        "qubit_failures": np.nan,
                        "estimator": Estimator.importance.value,
                        "seed": importance.seed,
                        "error_type": error_type,
                        "failure_rate": rate,
                        "std_error": std,
                    }
                )
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def write_frame(df: pd.DataFrame, csv_path: PathLike) -> Path:
    """Writes the CSV and one gnuplot file per error type (columns p, block rate, std) next to it."""
    csv_path = Path(csv_path)
    create_dir_if_dont_exist(csv_path.parent)
    df.to_csv(csv_path, index=False)
    blocks = df[df["qubit_index"] == -1]
    for error_type in ERROR_TYPES:
        selected = blocks[blocks["error_type"] == error_type]
        rows = selected[["p", "failure_rate", "std_error"]].values.tolist()
        write_gnuplot(rows, ["p", "rate", "std"], csv_path.with_name(f"{csv_path.stem}_{error_type}.dat"))
    logger.info(f"Wrote {len(df)} rows to {csv_path}")
    return csv_path


def write_results(code: SubsystemCode, results: Sequence[SimResult], csv_path: PathLike) -> Path:
    return write_frame(results_frame(code, results), csv_path)


def read_results(csv_path: PathLike) -> pd.DataFrame:
    df = pd.read_csv(csv_path)
    missing = [c for c in CSV_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"{csv_path} is not a results file, missing columns {missing}")
    return df


def fit_results(df: pd.DataFrame, error_type: str = "any") -> Dict[str, FitResult]:
    """Power-law fit of the block failure rate of every code in a results table."""
    if error_type not in ERROR_TYPES:
        raise ValueError(f"error_type must be one of {ERROR_TYPES}, got {error_type!r}")
    blocks = df[(df["qubit_index"] == -1) & (df["error_type"] == error_type)]
    fits = {}
    for code_id, group in blocks.groupby("code_id", sort=True):
        points = list(zip(group["p"].tolist(), group["failure_rate"].tolist()))
        try:
            fits[code_id] = fit_power_law(points)
        except ValueError as e:
            logger.warning(f"No fit for {code_id}: {e}")
            continue
        logger.info(f"{code_id}: A={fits[code_id].A:.4g} D={fits[code_id].D:.4f}")
    return fits


def fit_summary(fits: Dict[str, FitResult]) -> List[str]:
    return [f"{code_id} A={fit.A:.6g} D={fit.D:.6f} residual={fit.residual:.3g}" for code_id, fit in fits.items()]


def log_grid(start: float, stop: float, points: int) -> List[float]:
    """Logarithmically spaced grid from start to stop inclusive."""
    if points < 1 or start <= 0 or stop <= 0:
        raise ValueError(f"Invalid log grid {start}:{stop}:{points}")
    return np.geomspace(start, stop, points).tolist()


def parse_grid(text: Union[str, Sequence[float]]) -> List[float]:
    """'0.001,0.002' lists the points; '1e-3:1e-2:5' is a 5-point log grid."""
    if not isinstance(text, str):
        return [float(p) for p in text]
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"Grid {text!r} must look like start:stop:points")
        return log_grid(float(parts[0]), float(parts[1]), int(parts[2]))
    return [float(p) for p in text.split(",")]
