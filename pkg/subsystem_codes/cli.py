"""
Command-line front end.

    subsystem-codes build --kind bbs --code hamming7 --minimize-q
    subsystem-codes simulate --mode pheno --manifest results/bbs.json --grid 1e-3:3e-2:6
    subsystem-codes verify --manifest results/bbs.json
    subsystem-codes select-code --n 60 --b 5 --c 6 --trials 20
    subsystem-codes fit --csv results/pheno.csv

Exit codes: 0 success, 1 usage or invalid input, 2 verification failure, 3 any other error.
"""
import argparse
import logging
import math
import re
import sys
from pathlib import Path
from typing import List, Optional

from subsystem_codes import logger
from subsystem_codes.codes.base import SubsystemCode, subsystem_distance_bruteforce
from subsystem_codes.codes.bbs import build_bbs, minimize_qubits_q
from subsystem_codes.codes.classical import (
    ClassicalCode,
    code_from_graph,
    hamming_7_4,
    min_distance_information_set,
    repetition,
    sample_biregular,
    select_best_code,
)
from subsystem_codes.codes.hgp import build_hgp
from subsystem_codes.codes.shp import SHPCode, build_shp
from subsystem_codes.codes.verification import VerificationError, check_code, check_construction, verify_gauge_fixing
from subsystem_codes.config import RunConfig, load_config, write_run_manifest
from subsystem_codes.custom_io import (
    create_dir_if_dont_exist,
    read_dense,
    read_json,
    read_parity_check,
    write_alist,
    write_json,
)
from subsystem_codes.decoders.induced import induced_decoder_for
from subsystem_codes.evaluation import (
    CSV_SCHEMA_VERSION,
    fit_results,
    fit_summary,
    importance_frame,
    parse_grid,
    read_results,
    results_frame,
    write_frame,
)
from subsystem_codes.gf2 import BinaryMatrix, rank
from subsystem_codes.metrics import NoCrossingError
from subsystem_codes.simulation.circuit import protocol_sweep, threshold_from_results
from subsystem_codes.simulation.pheno import PhenoModel, run_importance, sweep, trials_schedule

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2
EXIT_RUNTIME = 3


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_classical(text: str) -> ClassicalCode:
    """hamming7 | repN | alist:PATH | dense:PATH | ensemble:N,B,C,SEED"""
    if text == "hamming7":
        return hamming_7_4()
    match = re.fullmatch(r"rep(\d+)", text)
    if match:
        return repetition(int(match.group(1)))
    prefix, _, rest = text.partition(":")
    if prefix in ("alist", "dense") and rest:
        h = read_parity_check(rest) if prefix == "alist" else read_dense(rest)
        return ClassicalCode.from_parity_check(h, name=Path(rest).stem)
    if prefix == "ensemble" and rest:
        try:
            n, b, c, seed = (int(x) for x in rest.split(","))
        except ValueError:
            raise UsageError(f"Ensemble code {text!r} must look like ensemble:N,B,C,SEED")
        return code_from_graph(sample_biregular(n, b, c, seed), name=f"({b},{c})-n{n}-s{seed}")
    raise UsageError(f"Unknown classical code {text!r}")


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "code"


def _pair(config: RunConfig) -> List[ClassicalCode]:
    first = config.get("h1") or config.get("code")
    second = config.get("h2") or config.get("code")
    if first is None or second is None:
        raise UsageError("Give --code, or both --h1 and --h2")
    return [parse_classical(first), parse_classical(second)]


def build_code(config: RunConfig) -> SubsystemCode:
    kind = config.get("kind")
    c1, c2 = _pair(config)
    name = config.get("name", "")
    if kind == "bbs":
        if config.get("q"):
            prefix, _, path = config.get("q").partition(":")
            if prefix != "dense" or not path:
                raise UsageError(f"--q takes dense:PATH, got {config.get('q')!r}")
            q = read_dense(path)
        elif config.get("minimize_q"):
            q = minimize_qubits_q(c1, c2, attempts=config.get("q_attempts"), seed=config.seed)
        else:
            q = BinaryMatrix.identity(c1.k)
        return build_bbs(c1, c2, q, name=name)
    if kind == "shp":
        return build_shp(c1.H, c2.H, name=name, distance_cap=config.get("distance_cap"))
    if kind == "hgp":
        return build_hgp(c1.H, c2.H, name=name, distance_cap=config.get("distance_cap"))
    raise UsageError(f"Unknown code kind {kind!r}, expected bbs, shp or hgp")


def cmd_build(config: RunConfig) -> int:
    code = build_code(config)
    code.validate()
    distance = subsystem_distance_bruteforce(code, cap=config.get("distance_cap"))
    if distance is not None:
        code.distance = distance
    required = config.get("require_distance")
    if required is not None:
        if distance is None:
            cap = config.get("distance_cap")
            raise RuntimeError(f"Distance of {code.name} is out of brute-force reach with cap {cap}")
        if distance < required:
            raise VerificationError(f"{code.name} has distance {distance} < required {required}")
    create_dir_if_dont_exist(config.output_dir)
    manifest_path = config.output_dir / f"{_slug(code.name)}.json"
    write_json(code.to_manifest(), manifest_path)
    report = {
        "name": code.name,
        "kind": code.kind,
        "parameters": code.parameters,
        "N": code.N,
        "K": code.K,
        "D": code.distance,
        "gauge_qubits": code.gauge_qubit_count,
        "stabilizer_generators": code.stab_x.rows + code.stab_z.rows,
        "stabilizer_rank": rank(code.stab_x) + rank(code.stab_z),
    }
    write_run_manifest(config, {"code_manifest": str(manifest_path), "report": report})
    print(f"{code.name} {code.parameters} gauge qubits {code.gauge_qubit_count} -> {manifest_path}")
    return EXIT_OK


def _load_code(config: RunConfig) -> SubsystemCode:
    path = config.get("manifest")
    if path is None:
        raise UsageError("--manifest is required")
    if not Path(path).exists():
        raise FileNotFoundError(f"Code manifest {path} does not exist")
    return SubsystemCode.from_manifest(read_json(path))


def _schedule(config: RunConfig, grid: List[float], exponent: float = 2.0, amplitude: float = 1.0):
    if config.get("trials") is not None:
        return [config.get("trials")] * len(grid)
    return trials_schedule(
        grid,
        target_failures=config.get("target_failures"),
        cap=config.get("max_trials"),
        floor=config.get("min_trials"),
        exponent=exponent,
        amplitude=amplitude,
    )


def cmd_simulate(config: RunConfig) -> int:
    code = _load_code(config)
    grid = parse_grid(config.get("grid"))
    mode = config.get("mode")
    csv_path = config.output_dir / f"{mode}.csv"
    summary: List[str] = []
    if mode == "pheno":
        decoder = induced_decoder_for(code, config.get("classical"))
        if config.get("estimator") == "importance":
            p_ref = math.exp(sum(math.log(p) for p in grid) / len(grid)) if grid else 0.01
            p_meas = config.get("p_meas")
            model = PhenoModel(p_ref, p_ref if p_meas is None or p_meas > 0 else 0.0)
            importance = run_importance(
                code, decoder, model, config.get("weight_max"), config.get("samples_per_weight"), config.seed
            )
            df = importance_frame(code, importance, grid)
        elif config.get("estimator") == "direct":
            trials = _schedule(config, grid)
            results = sweep(code, decoder, grid, trials, config.seed, config.get("p_meas"), config.jobs)
            df = results_frame(code, results)
        else:
            raise UsageError(f"Unknown estimator {config.get('estimator')!r}")
    elif mode == "circuit":
        results = protocol_sweep(code, grid, _schedule(config, grid, amplitude=100.0), config.seed, config.jobs)
        df = results_frame(code, results)
        qubits = [int(q) for q in config.get("qubits").split(",")] if config.get("qubits") else None
        try:
            threshold = threshold_from_results(results, qubits)
            summary.append(f"pseudothreshold block {threshold.block:.4g} per-qubit {threshold.per_qubit}")
        except NoCrossingError as e:
            summary.append(f"no pseudothreshold: {e}")
    else:
        raise UsageError(f"Unknown mode {mode!r}, expected pheno or circuit")
    write_frame(df, csv_path)
    if len(grid) >= 2:
        summary.extend(fit_summary(fit_results(df)))
    with open(config.output_dir / f"{mode}_summary.txt", "w") as f:
        f.write("".join(line + "\n" for line in summary))
    write_run_manifest(
        config,
        {
            "code_manifest": str(config.get("manifest")),
            "code": code.parameters,
            "csv": str(csv_path),
            "csv_schema_version": CSV_SCHEMA_VERSION,
        },
    )
    for line in summary:
        print(line)
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    failures = []
    if config.get("manifest"):
        code = _load_code(config)
        check_code(code)
        check_construction(code)
        print(f"{code.name} {code.parameters}: commutation, pairing and construction checks pass")
        if isinstance(code, SHPCode):
            report = verify_gauge_fixing(code.h1, code.h2)
            print(report.summary())
            if not report.passed:
                failures.append(report.witness)
    elif config.get("h1") and config.get("h2"):
        c1, c2 = parse_classical(config.get("h1")), parse_classical(config.get("h2"))
        report = verify_gauge_fixing(c1.H, c2.H)
        print(report.summary())
        if not report.passed:
            failures.append(report.witness)
    else:
        raise UsageError("Give --manifest or both --h1 and --h2")
    if failures:
        raise VerificationError("; ".join(failures))
    return EXIT_OK


def cmd_select_code(config: RunConfig) -> int:
    n, b, c = config.get("n"), config.get("b"), config.get("c")
    if None in (n, b, c):
        raise UsageError("--n, --b and --c are required")
    code = select_best_code(
        n, b, c, config.get("trials"), config.get("channel_p"), config.seed, config.get("shots"), config.jobs
    )
    create_dir_if_dont_exist(config.output_dir)
    path = config.output_dir / f"{_slug(code.name)}.alist"
    write_alist(code.H, path)
    d = min_distance_information_set(code, seed=config.seed) if code.k else None
    write_run_manifest(config, {"alist": str(path), "n": code.n, "k": code.k, "d_upper_bound": d})
    print(f"{code.name}: n={code.n} k={code.k} d<={d} -> {path}")
    return EXIT_OK


def cmd_fit(config: RunConfig) -> int:
    if config.get("csv") is None:
        raise UsageError("--csv is required")
    fits = fit_results(read_results(config.get("csv")), config.get("error_type"))
    if not fits:
        logger.warning(f"No code in {config.get('csv')} has enough nonzero points for a fit")
    for line in fit_summary(fits):
        print(line)
    return EXIT_OK


COMMANDS = {
    "build": cmd_build,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "select-code": cmd_select_code,
    "fit": cmd_fit,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="INI file with [general] and per-command sections")
    common.add_argument("--seed", type=int)
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--jobs", type=float, help="1 serial, -1 all CPUs, a fraction for a share of them")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("-q", "--quiet", action="store_true")

    parser = _Parser(
        prog="subsystem-codes", description="Subsystem codes from classical codes: build, verify, simulate."
    )
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands.required = True

    build = commands.add_parser("build", parents=[common], help="construct a BBS, SHP or HGP code")
    build.add_argument("kind", nargs="?", choices=["bbs", "shp", "hgp"])
    build.add_argument("--kind", dest="kind_flag", choices=["bbs", "shp", "hgp"])
    build.add_argument("--code", help="hamming7 | repN | alist:PATH | dense:PATH | ensemble:N,B,C,SEED")
    build.add_argument("--h1")
    build.add_argument("--h2")
    build.add_argument("--q", help="dense:PATH with an invertible k x k matrix (BBS)")
    build.add_argument("--minimize-q", dest="minimize_q", action="store_const", const=True)
    build.add_argument("--q-attempts", dest="q_attempts", type=int)
    build.add_argument("--distance-cap", dest="distance_cap", type=int)
    build.add_argument("--require-distance", dest="require_distance", type=int)
    build.add_argument("--name")

    simulate = commands.add_parser("simulate", parents=[common], help="phenomenological or circuit-level Monte Carlo")
    simulate.add_argument("--mode", choices=["pheno", "circuit"])
    simulate.add_argument("--manifest")
    simulate.add_argument("--grid", help="comma list or start:stop:points log grid")
    simulate.add_argument("--trials", type=int)
    simulate.add_argument("--target-failures", dest="target_failures", type=int)
    simulate.add_argument("--estimator", choices=["direct", "importance"])
    simulate.add_argument("--weight-max", dest="weight_max", type=int)
    simulate.add_argument("--samples-per-weight", dest="samples_per_weight", type=int)
    simulate.add_argument("--p-meas", dest="p_meas", type=float)
    simulate.add_argument("--classical", choices=["bp", "exact", "auto"])
    simulate.add_argument("--qubits", help="comma list of logical qubits for the per-qubit pseudothreshold")

    verify = commands.add_parser("verify", parents=[common], help="check a code manifest or an SHP/HGP pair")
    verify.add_argument("--manifest")
    verify.add_argument("--h1")
    verify.add_argument("--h2")

    select = commands.add_parser("select-code", parents=[common], help="pick the best of sampled (b,c) codes")
    select.add_argument("--n", type=int)
    select.add_argument("--b", type=int)
    select.add_argument("--c", type=int)
    select.add_argument("--trials", type=int)
    select.add_argument("--channel-p", dest="channel_p", type=float)
    select.add_argument("--shots", type=int)

    fit = commands.add_parser("fit", parents=[common], help="fit P_L = A p^D per code in a results CSV")
    fit.add_argument("--csv")
    fit.add_argument("--error-type", dest="error_type", choices=["x", "z", "any"])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    verbose = False
    try:
        args = build_parser().parse_args(argv)
        verbose = args.verbose
        logger.setLevel(logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO)
        flags = vars(args).copy()
        if flags.get("kind_flag"):
            flags["kind"] = flags["kind_flag"]
        config = load_config(args.command, args.config, flags)
        return COMMANDS[args.command](config)
    except VerificationError as e:
        logger.error(f"Verification failed: {e}")
        return EXIT_VERIFICATION
    except ValueError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except Exception as e:
        if verbose:
            logger.exception(e)
        else:
            logger.error(f"{type(e).__name__}: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
