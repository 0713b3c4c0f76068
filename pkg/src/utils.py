"""
Utility functions for treekta

Seed derivation, small statistics helpers and the S3 report archive.
"""

import logging
import os
from datetime import datetime
from pathlib import Path
from typing import Dict, Iterable, Optional

import boto3
import numpy as np

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def splitmix64(value: int) -> int:
    """One splitmix64 output step applied to ``value``."""
    z = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """
    Derive an independent child seed from a master seed and a stream index.

    The result depends only on the two integers, never on scheduling, so work
    split across any number of workers draws identical random streams.

    Args:
        master_seed: Seed of the parent stream
        index: Position of the child stream (tree index, replicate index, ...)

    Returns:
        Non-negative 63-bit seed
    """
    mixed = splitmix64((master_seed & _MASK64) ^ splitmix64(index & _MASK64))
    return mixed >> 1


def make_rng(seed: int) -> np.random.Generator:
    """Seeded numpy generator"""
    return np.random.default_rng(seed)


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """
    Pearson correlation of two equal-length vectors.

    Returns 0.0 when either vector has zero variance.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ac = a - a.mean()
    bc = b - b.mean()
    denom = np.sqrt(np.dot(ac, ac) * np.dot(bc, bc))
    if denom <= 0.0 or not np.isfinite(denom):
        return 0.0
    return float(np.dot(ac, bc) / denom)


def mean_squared_error(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    residual = np.asarray(y_true, dtype=np.float64) - np.asarray(y_pred, dtype=np.float64)
    return float(np.mean(residual**2))


def upload_outputs_to_s3(
    files: Iterable[Path], run_id: str, bucket_name: Optional[str] = None
) -> Dict[str, object]:
    """
    Upload experiment output files to S3 and presign the summary.

    Args:
        files: Paths of the files to upload
        run_id: Identifier used as the key prefix
        bucket_name: Target bucket; falls back to the REPORTS_BUCKET env var

    Returns:
        Dict containing 's3_uris' and, when summary.json was uploaded, 'presigned_url'.
        Empty when no bucket is configured or the upload failed.
    """
    bucket_name = bucket_name or os.getenv("REPORTS_BUCKET")

    if not bucket_name:
        logger.warning("⚠️ REPORTS_BUCKET env var not set. Skipping upload.")
        return {}

    s3_client = boto3.client("s3")
    timestamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
    prefix = f"reports/{run_id}/{timestamp}"

    content_types = {
        ".json": "application/json",
        ".csv": "text/csv",
        ".svg": "image/svg+xml",
    }

    uris = []
    summary_key = None
    try:
        for path in files:
            path = Path(path)
            object_key = f"{prefix}/{path.name}"
            s3_client.put_object(
                Bucket=bucket_name,
                Key=object_key,
                Body=path.read_bytes(),
                ContentType=content_types.get(path.suffix, "application/octet-stream"),
                CacheControl="max-age=3600",
            )
            uris.append(f"s3://{bucket_name}/{object_key}")
            if path.name == "summary.json":
                summary_key = object_key

        result: Dict[str, object] = {"s3_uris": uris}
        if summary_key:
            result["presigned_url"] = s3_client.generate_presigned_url(
                "get_object",
                Params={"Bucket": bucket_name, "Key": summary_key},
                ExpiresIn=3600,  # 1 hour
            )
        return result

    except Exception as e:
        logger.error(f"❌ Failed to upload outputs to S3: {e}")
        return {}
