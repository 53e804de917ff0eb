import json

import pandas as pd
import pytest

from subsystem_codes.cli import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_VERIFICATION, main, parse_classical
from subsystem_codes.evaluation import CSV_COLUMNS


@pytest.fixture
def built(tmp_path):
    """Builds the 21-qubit-lattice SHP code of rep3 x hamming7 and returns its manifest path."""
    out = tmp_path / "codes"
    assert main(["build", "shp", "--h1", "rep3", "--h2", "hamming7", "--name", "shp21", "--output-dir", str(out)]) == 0
    return out / "shp21.json"


class TestBuild:
    def test_bbs(self, tmp_path, capsys):
        code = main(["build", "--kind", "bbs", "--code", "hamming7", "--name", "bbs25", "--output-dir", str(tmp_path)])
        assert code == EXIT_OK
        manifest = json.loads((tmp_path / "bbs25.json").read_text())
        assert (manifest["N"], manifest["K"], manifest["D"]) == (25, 4, 3)
        assert "[[25,4,3]]" in capsys.readouterr().out
        run = json.loads((tmp_path / "manifest.json").read_text())
        assert run["report"]["gauge_qubits"] == 25 - 4 - 6

    def test_shp(self, built):
        manifest = json.loads(built.read_text())
        assert (manifest["kind"], manifest["N"], manifest["K"], manifest["D"]) == ("shp", 21, 4, 3)

    def test_hgp(self, tmp_path):
        assert main(["build", "hgp", "--code", "rep3", "--name", "surface", "--output-dir", str(tmp_path)]) == 0
        manifest = json.loads((tmp_path / "surface.json").read_text())
        assert (manifest["N"], manifest["K"], manifest["D"]) == (13, 1, 3)

    def test_required_distance_not_met(self, tmp_path):
        argv = ["build", "hgp", "--code", "rep3", "--require-distance", "4", "--output-dir", str(tmp_path)]
        assert main(argv) == EXIT_VERIFICATION

    def test_unknown_classical_code(self, tmp_path):
        assert main(["build", "bbs", "--code", "golay", "--output-dir", str(tmp_path)]) == EXIT_USAGE

    def test_dense_classical_code(self, tmp_path, hamming):
        path = tmp_path / "h.txt"
        path.write_text(hamming.H.to_text())
        assert parse_classical(f"dense:{path}").k == 4


class TestVerify:
    def test_manifest_passes(self, built, capsys):
        assert main(["verify", "--manifest", str(built)]) == EXIT_OK
        assert "gauge fixing pass" in capsys.readouterr().out

    def test_corrupted_manifest(self, built, tmp_path):
        manifest = json.loads(built.read_text())
        manifest["stab_x"][0] = sorted(set(manifest["stab_x"][0]) ^ {0})
        broken = tmp_path / "broken.json"
        broken.write_text(json.dumps(manifest))
        assert main(["verify", "--manifest", str(broken)]) == EXIT_VERIFICATION

    def test_classical_pair(self):
        assert main(["verify", "--h1", "rep3", "--h2", "hamming7"]) == EXIT_OK

    def test_nothing_to_verify(self):
        assert main(["verify"]) == EXIT_USAGE


class TestSimulate:
    def test_noiseless_pheno(self, built, tmp_path):
        out = tmp_path / "sim"
        argv = ["simulate", "--manifest", str(built), "--grid", "0", "--trials", "300", "--output-dir", str(out)]
        assert main(argv) == EXIT_OK
        df = pd.read_csv(out / "pheno.csv")
        assert list(df.columns) == CSV_COLUMNS
        assert len(df) == 3 * (4 + 1)
        assert (df["block_failures"] == 0).all()
        assert (out / "pheno_x.dat").exists()

    def test_reruns_are_byte_identical(self, built, tmp_path):
        out = tmp_path / "sim"
        argv = ["simulate", "--manifest", str(built), "--grid", "0.02,0.05", "--trials", "400", "--seed", "5"]
        assert main(argv + ["--output-dir", str(out)]) == EXIT_OK
        first = {name: (out / name).read_bytes() for name in ("pheno.csv", "manifest.json", "pheno_summary.txt")}
        assert main(argv + ["--output-dir", str(out)]) == EXIT_OK
        assert first == {name: (out / name).read_bytes() for name in first}

    def test_importance(self, built, tmp_path):
        out = tmp_path / "imp"
        argv = ["simulate", "--manifest", str(built), "--grid", "0.01,0.02", "--estimator", "importance"]
        argv += ["--weight-max", "3", "--samples-per-weight", "50", "--p-meas", "0", "--output-dir", str(out)]
        assert main(argv) == EXIT_OK
        df = pd.read_csv(out / "pheno.csv")
        assert set(df["estimator"]) == {"importance"}

    def test_circuit(self, tmp_path):
        codes = tmp_path / "codes"
        assert main(["build", "bbs", "--code", "rep3", "--name", "bs", "--output-dir", str(codes)]) == 0
        out = tmp_path / "circuit"
        argv = ["simulate", "--mode", "circuit", "--manifest", str(codes / "bs.json"), "--grid", "0.001,0.2"]
        assert main(argv + ["--trials", "200", "--output-dir", str(out)]) == EXIT_OK
        assert (out / "circuit_summary.txt").exists()
        assert len(pd.read_csv(out / "circuit.csv")) == 2 * 3 * 2

    def test_missing_manifest(self, tmp_path):
        argv = ["simulate", "--manifest", str(tmp_path / "nope.json"), "--output-dir", str(tmp_path)]
        assert main(argv) == EXIT_RUNTIME

    def test_hgp_has_no_induced_decoder(self, tmp_path):
        assert main(["build", "hgp", "--code", "rep3", "--name", "s", "--output-dir", str(tmp_path)]) == 0
        argv = ["simulate", "--manifest", str(tmp_path / "s.json"), "--grid", "0.01", "--trials", "10"]
        assert main(argv + ["--output-dir", str(tmp_path)]) == EXIT_USAGE


class TestOtherCommands:
    def test_select_code(self, tmp_path):
        argv = ["select-code", "--n", "12", "--b", "3", "--c", "4", "--trials", "2", "--shots", "10"]
        assert main(argv + ["--output-dir", str(tmp_path)]) == EXIT_OK
        assert len(list(tmp_path.glob("*.alist"))) == 1

    def test_fit(self, built, tmp_path, capsys):
        out = tmp_path / "sim"
        argv = ["simulate", "--manifest", str(built), "--grid", "0.03,0.08", "--trials", "2000"]
        assert main(argv + ["--output-dir", str(out)]) == EXIT_OK
        capsys.readouterr()
        assert main(["fit", "--csv", str(out / "pheno.csv")]) == EXIT_OK
        assert "shp21 A=" in capsys.readouterr().out

    def test_no_command(self):
        assert main([]) == EXIT_USAGE

    def test_unknown_option(self):
        assert main(["build", "--frobnicate"]) == EXIT_USAGE
