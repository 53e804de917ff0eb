from pathlib import Path

import pytest

from subsystem_codes.config import ENV_JOBS, ENV_OUTPUT_DIR, load_config, to_bool, to_jobs, write_run_manifest


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(
        "[general]\nseed = 11\noutput_dir = from-file\n\n[simulate]\ntrials = 500 ; per point\nmode = circuit\n"
    )
    return path


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    monkeypatch.delenv(ENV_OUTPUT_DIR, raising=False)
    monkeypatch.delenv(ENV_JOBS, raising=False)


class TestPrecedence:
    def test_defaults(self):
        config = load_config("simulate")
        assert (config.seed, config.output_dir, config.jobs) == (0, Path("results"), 1)
        assert config.get("mode") == "pheno"
        assert config.get("trials") is None

    def test_file_over_defaults(self, config_file):
        config = load_config("simulate", config_file)
        assert config.seed == 11
        assert config.get("trials") == 500
        assert config.get("mode") == "circuit"

    def test_environment_over_file(self, config_file, monkeypatch):
        monkeypatch.setenv(ENV_OUTPUT_DIR, "from-env")
        monkeypatch.setenv(ENV_JOBS, "4")
        config = load_config("simulate", config_file)
        assert config.output_dir == Path("from-env")
        assert config.jobs == 4

    def test_flags_over_everything(self, config_file, monkeypatch):
        monkeypatch.setenv(ENV_OUTPUT_DIR, "from-env")
        config = load_config("simulate", config_file, {"output_dir": "from-flag", "seed": 3, "trials": None})
        assert config.output_dir == Path("from-flag")
        assert config.seed == 3
        assert config.get("trials") == 500


class TestErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_config("build", tmp_path / "missing.ini")

    def test_unknown_command(self):
        with pytest.raises(ValueError):
            load_config("deploy")

    def test_bad_value(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[build]\nminimize_q = perhaps\n")
        with pytest.raises(ValueError, match="build.minimize_q"):
            load_config("build", path)


def test_converters():
    assert to_bool("Yes") and not to_bool("0")
    assert to_jobs("2") == 2 and isinstance(to_jobs("2"), int)
    assert to_jobs("0.5") == 0.5


def test_run_manifest_is_reproducible(tmp_path):
    config = load_config("fit", flags={"output_dir": str(tmp_path / "out"), "csv": "x.csv"})
    first = write_run_manifest(config, {"extra": 1}).read_bytes()
    assert write_run_manifest(config, {"extra": 1}).read_bytes() == first
    assert b'"csv": "x.csv"' in first
