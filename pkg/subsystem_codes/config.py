"""
Run configuration. Values come from built-in defaults, then an INI file ([general] plus one section per command),
then the environment (a .env file is honoured), then command-line flags; later sources win.
"""
import configparser
from dataclasses import dataclass, field
import os
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from dotenv import load_dotenv

from subsystem_codes import __version__, logger
from subsystem_codes.custom_io import PathLike, create_dir_if_dont_exist, write_json

load_dotenv()

ENV_OUTPUT_DIR = "SUBSYSTEM_CODES_OUTPUT_DIR"
ENV_JOBS = "SUBSYSTEM_CODES_JOBS"
DEFAULT_OUTPUT_DIR = "results"


def to_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"Not a boolean: {value!r}")


def to_jobs(value) -> float:
    """Worker count; fractions in (0, 1) are a share of the CPUs."""
    number = float(value)
    return int(number) if number.is_integer() else number


@dataclass(frozen=True)
class Option:
    convert: Callable[[Any], Any]
    default: Any = None


GENERAL_OPTIONS: Dict[str, Option] = {
    "seed": Option(int, 0),
    "output_dir": Option(str, DEFAULT_OUTPUT_DIR),
    "jobs": Option(to_jobs, 1),
}

COMMAND_OPTIONS: Dict[str, Dict[str, Option]] = {
    "build": {
        "kind": Option(str, "bbs"),
        "code": Option(str),
        "h1": Option(str),
        "h2": Option(str),
        "q": Option(str),
        "minimize_q": Option(to_bool, False),
        "q_attempts": Option(int, 2000),
        "distance_cap": Option(int, 16),
        "require_distance": Option(int),
        "name": Option(str, ""),
    },
    "simulate": {
        "mode": Option(str, "pheno"),
        "manifest": Option(str),
        "grid": Option(str, "1e-3:1e-2:5"),
        "trials": Option(int),
        "target_failures": Option(int, 100),
        "min_trials": Option(int, 1000),
        "max_trials": Option(int, 1_000_000),
        "estimator": Option(str, "direct"),
        "weight_max": Option(int, 6),
        "samples_per_weight": Option(int, 2000),
        "p_meas": Option(float),
        "classical": Option(str, "auto"),
        "qubits": Option(str),
    },
    "verify": {
        "manifest": Option(str),
        "h1": Option(str),
        "h2": Option(str),
    },
    "select-code": {
        "n": Option(int),
        "b": Option(int),
        "c": Option(int),
        "trials": Option(int, 20),
        "channel_p": Option(float, 0.03),
        "shots": Option(int, 200),
    },
    "fit": {
        "csv": Option(str),
        "error_type": Option(str, "any"),
    },
}


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    output_dir: Path = Path(DEFAULT_OUTPUT_DIR)
    jobs: float = 1
    options: Dict[str, Any] = field(default_factory=dict)
    config_file: Optional[str] = None

    def get(self, name: str, default=None):
        value = self.options.get(name)
        return default if value is None else value

    def to_manifest(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "seed": self.seed,
            "output_dir": str(self.output_dir),
            "jobs": self.jobs,
            "options": dict(sorted(self.options.items())),
            "config_file": self.config_file,
            "version": __version__,
        }


def _read_file(path: PathLike) -> configparser.ConfigParser:
    if not Path(path).exists():
        raise FileNotFoundError(f"Config file {path} does not exist")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read(path)
    return parser


def _convert(section: str, name: str, option: Option, value):
    try:
        return option.convert(value)
    except (TypeError, ValueError) as e:
        raise ValueError(f"Invalid value {value!r} for {section}.{name}: {e}") from e


def _environment() -> Dict[str, str]:
    values = {}
    if os.getenv(ENV_OUTPUT_DIR):
        values["output_dir"] = os.getenv(ENV_OUTPUT_DIR)
    if os.getenv(ENV_JOBS):
        values["jobs"] = os.getenv(ENV_JOBS)
    return values


def load_config(
    command: str, config_file: Optional[PathLike] = None, flags: Optional[Dict[str, Any]] = None
) -> RunConfig:
    """
    Resolves every option of `command`.
    :param flags: values given on the command line; None means the flag was not passed.
    """
    if command not in COMMAND_OPTIONS:
        raise ValueError(f"Unknown command {command!r}")
    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    parser = _read_file(config_file) if config_file else None
    resolved: Dict[str, Any] = {}
    for section, options in (("general", GENERAL_OPTIONS), (command, COMMAND_OPTIONS[command])):
        file_values = dict(parser[section]) if parser is not None and parser.has_section(section) else {}
        unknown = set(file_values) - set(options)
        if unknown:
            logger.warning(f"Ignoring unknown keys in [{section}]: {sorted(unknown)}")
        env_values = _environment() if section == "general" else {}
        for name, option in options.items():
            value = option.default
            for source in (file_values, env_values, flags):
                if name in source:
                    value = _convert(section, name, option, source[name])
            resolved[name] = value
    return RunConfig(
        command=command,
        seed=resolved.pop("seed"),
        output_dir=Path(resolved.pop("output_dir")),
        jobs=resolved.pop("jobs"),
        options=resolved,
        config_file=str(config_file) if config_file else None,
    )


def write_run_manifest(config: RunConfig, extra: Optional[Dict[str, Any]] = None) -> Path:
    """manifest.json with the resolved config; no timestamps so reruns reproduce it byte for byte."""
    create_dir_if_dont_exist(config.output_dir)
    path = config.output_dir / "manifest.json"
    write_json({**config.to_manifest(), **(extra or {})}, path)
    logger.debug(f"Wrote {path}")
    return path
