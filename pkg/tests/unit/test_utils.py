"""
Unit tests for seeds, statistics helpers and the S3 archive
"""

from unittest.mock import MagicMock, patch

import numpy as np
import pytest

from src.utils import derive_seed, make_rng, mean_squared_error, pearson, upload_outputs_to_s3


class TestDeriveSeed:
    """Test suite for derive_seed"""

    def test_deterministic(self):
        """Test the same master seed and index give the same seed"""
        assert derive_seed(42, 7) == derive_seed(42, 7)

    def test_streams_differ(self):
        """Test a thousand replicate indices give distinct seeds"""
        seeds = {derive_seed(42, i) for i in range(1000)}
        assert len(seeds) == 1000

    def test_master_seed_matters(self):
        """Test different master seeds give different seeds"""
        assert derive_seed(1, 0) != derive_seed(2, 0)

    def test_non_negative_63_bit(self):
        """Test derived seeds fit in a non-negative 63-bit integer"""
        for i in range(100):
            assert 0 <= derive_seed(-5, i) < 2**63

    def test_feeds_numpy(self):
        """Test a derived seed drives a reproducible generator"""
        a = make_rng(derive_seed(3, 1)).uniform(size=4)
        b = make_rng(derive_seed(3, 1)).uniform(size=4)
        assert np.array_equal(a, b)


class TestPearson:
    """Test suite for pearson"""

    def test_perfect(self):
        """Test proportional vectors correlate at 1"""
        assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)

    def test_anti(self):
        """Test reversed vectors correlate at -1"""
        assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_constant_vector_is_zero(self):
        """Test a constant vector has zero correlation"""
        assert pearson([1, 1, 1], [1, 2, 3]) == 0.0


def test_mean_squared_error():
    """Test mean squared error of a two-point prediction"""
    assert mean_squared_error([0, 0], [1, 3]) == 5.0


class TestUploadOutputs:
    """Test suite for the S3 archive"""

    def test_no_bucket_skips(self, tmp_path, monkeypatch):
        """Test uploading without a bucket does nothing"""
        monkeypatch.delenv("REPORTS_BUCKET", raising=False)
        assert upload_outputs_to_s3([tmp_path / "summary.json"], "run") == {}

    @patch("src.utils.boto3.client")
    def test_uploads_and_presigns_summary(self, mock_client, tmp_path):
        """Test every file is uploaded and summary.json is presigned"""
        s3 = MagicMock()
        s3.generate_presigned_url.return_value = "https://example.invalid/summary"
        mock_client.return_value = s3
        files = []
        for name in ("report.csv", "summary.json", "spectrum_RF_kernel.svg"):
            path = tmp_path / name
            path.write_text("x")
            files.append(path)

        result = upload_outputs_to_s3(files, "friedman", bucket_name="bucket")

        assert len(result["s3_uris"]) == 3
        assert all(uri.startswith("s3://bucket/reports/friedman/") for uri in result["s3_uris"])
        assert result["presigned_url"] == "https://example.invalid/summary"
        content_types = [c.kwargs["ContentType"] for c in s3.put_object.call_args_list]
        assert content_types == ["text/csv", "application/json", "image/svg+xml"]
        assert s3.generate_presigned_url.call_args.kwargs["ExpiresIn"] == 3600

    @patch("src.utils.boto3.client")
    def test_failure_returns_empty(self, mock_client, tmp_path):
        """Test an S3 error returns an empty dict"""
        mock_client.return_value.put_object.side_effect = Exception("AccessDenied")
        path = tmp_path / "summary.json"
        path.write_text("{}")
        assert upload_outputs_to_s3([path], "run", bucket_name="bucket") == {}
