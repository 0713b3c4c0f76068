"""
Unit tests for the command line
"""

import json

import numpy as np
import pytest

from src.cli import main
from src.config import DatasetSchema
from src.data.dataio import load_csv


@pytest.fixture
def dataset_csv(tmp_path):
    path = tmp_path / "friedman.csv"
    argv = ["simulate", "--family", "friedman", "--n", "60", "--p", "6", "--seed", "1"]
    code = main(argv + ["--out", str(path)])
    assert code == 0
    return path


@pytest.fixture
def kernel_files(tmp_path, dataset_csv):
    kernel, target = tmp_path / "K.csv", tmp_path / "y.csv"
    argv = ["kernel", "--data", str(dataset_csv), "--target", "y", "--trees", "10"]
    code = main(argv + ["--out", str(kernel), "--target-out", str(target)])
    assert code == 0
    return kernel, target


class TestSimulate:
    """Test suite for simulate"""

    def test_writes_dataset(self, dataset_csv):
        """Test simulate writes an n by p dataset"""
        data = load_csv(dataset_csv, DatasetSchema(target_column="y"))
        assert data.X.shape == (60, 6)

    def test_p_below_minimum_is_data_error(self, tmp_path):
        """Test too few features for a family exits with code 2"""
        argv = ["simulate", "--family", "checkerboard", "--n", "10", "--p", "5"]
        assert main(argv + ["--out", str(tmp_path / "c.csv")]) == 2


class TestKernelCommands:
    """Test suite for kernel, align and landmark"""

    def test_kernel_file(self, kernel_files):
        """Test the kernel file is n by n with a unit diagonal"""
        kernel, target = kernel_files
        K = np.loadtxt(kernel, delimiter=",")
        assert K.shape == (60, 60)
        assert np.all(np.diag(K) == 1.0)
        assert len(target.read_text().splitlines()) == 60

    def test_align_prints_summary(self, kernel_files, tmp_path, capsys):
        """Test align prints the summary and writes the spectrum"""
        kernel, target = kernel_files
        out = tmp_path / "spectrum.csv"
        argv = ["align", "--kernel", str(kernel), "--target", str(target), "--components", "10"]
        assert main(argv + ["--out", str(out)]) == 0
        assert "top5of10" in capsys.readouterr().out
        assert len(out.read_text().splitlines()) == 11

    def test_landmark(self, kernel_files, tmp_path):
        """Test landmark writes one spectrum per landmark count"""
        kernel, target = kernel_files
        out = tmp_path / "landmark.csv"
        argv = ["landmark", "--kernel", str(kernel), "--target", str(target)]
        assert main(argv + ["--nproto", "10,20", "--components", "10", "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == "n_landmarks,component,value,alignment"

    def test_asymmetric_kernel_is_numerical_error(self, tmp_path):
        """Test an asymmetric kernel exits with code 3"""
        kernel, target = tmp_path / "K.csv", tmp_path / "y.csv"
        kernel.write_text("1,0.5\n0,1\n")
        target.write_text("1\n2\n")
        assert main(["align", "--kernel", str(kernel), "--target", str(target)]) == 3

    def test_missing_data_is_data_error(self, tmp_path):
        """Test a missing data file exits with code 2"""
        argv = ["kernel", "--data", str(tmp_path / "absent.csv"), "--target", "y"]
        assert main(argv + ["--out", str(tmp_path / "K.csv")]) == 2

    def test_kernel_needs_target(self, dataset_csv, tmp_path):
        """Test kernel without --target exits with code 1"""
        assert main(["kernel", "--data", str(dataset_csv), "--out", str(tmp_path / "K.csv")]) == 1


class TestExperimentCommand:
    """Test suite for experiment and plot"""

    def _config(self, tmp_path):
        path = tmp_path / "experiment.json"
        config = {
            "name": "cli",
            "scenario": {"family": "meier1", "n": 80, "p": 4},
            "models": ["RF_kernel", "XGB"],
            "replicates": 2,
            "landmark_counts": [10],
            "n_components": 10,
            "rf": {"m_trees": 10},
            "gbt": {"m_rounds": 5},
        }
        path.write_text(json.dumps(config))
        return path

    def test_experiment_and_plot(self, tmp_path):
        """Test experiment writes the report and plot redraws its charts"""
        out = tmp_path / "results"
        argv = ["experiment", "--config", str(self._config(tmp_path)), "--output-dir", str(out)]
        assert main(argv + ["--workers", "1"]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["replicates_completed"] == 2
        assert (out / "spectrum_RF_kernel.svg").exists()

        (out / "spectrum_RF_kernel.svg").unlink()
        assert main(["plot", "--report", str(out)]) == 0
        assert (out / "spectrum_RF_kernel.svg").exists()

    def test_missing_config_is_usage_error(self, tmp_path):
        """Test a missing config file exits with code 1"""
        assert main(["experiment", "--config", str(tmp_path / "absent.json")]) == 1

    def test_invalid_config_is_usage_error(self, tmp_path):
        """Test an invalid config exits with code 1"""
        path = tmp_path / "bad.json"
        config = {"scenario": {"family": "friedman", "n": 80, "p": 5}, "replicates": 0}
        path.write_text(json.dumps(config))
        assert main(["experiment", "--config", str(path)]) == 1


class TestUsage:
    """Test suite for argument errors"""

    def test_no_command(self):
        """Test running without a command exits with code 1"""
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == 1

    def test_unknown_family(self, tmp_path):
        """Test an unknown family exits with code 1"""
        with pytest.raises(SystemExit) as excinfo:
            main(["simulate", "--family", "sinc", "--n", "5", "--p", "5", "--out", "x.csv"])
        assert excinfo.value.code == 1

    def test_bad_landmark_list(self):
        """Test a malformed --nproto list exits with code 1"""
        with pytest.raises(SystemExit) as excinfo:
            main(["landmark", "--kernel", "K.csv", "--target", "y.csv", "--nproto", "10,a"])
        assert excinfo.value.code == 1
