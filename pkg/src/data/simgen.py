"""
Simulation Generators

Five regression benchmarks: Friedman, Checkerboard (correlated normal
features), van der Laan, Meier 1 and Meier 2. Targets are Y = f(X) + eps with
the noise drawn once.
"""

import itertools
from typing import Dict, List, Tuple

import numpy as np

from ..config import Family, ScenarioSpec
from ..errors import DataError
from .dataset import Dataset

FAMILY_MIN_FEATURES: Dict[Family, int] = {
    Family.FRIEDMAN: 5,
    Family.CHECKERBOARD: 20,
    Family.VAN_DER_LAAN: 10,
    Family.MEIER1: 4,
    Family.MEIER2: 4,
}

# N(0, 0.5) for van der Laan and the Meier models is read as variance 0.5.
FAMILY_NOISE_SD: Dict[Family, float] = {
    Family.FRIEDMAN: 1.0,
    Family.CHECKERBOARD: 1.0,
    Family.VAN_DER_LAAN: float(np.sqrt(0.5)),
    Family.MEIER1: float(np.sqrt(0.5)),
    Family.MEIER2: float(np.sqrt(0.5)),
}

CHECKERBOARD_RHO = 0.9

SCENARIO_SIZES: Tuple[int, ...] = (800, 1600)
SCENARIO_WIDTHS: Tuple[int, ...] = (20, 40)


def checkerboard_covariance(p: int, rho: float = CHECKERBOARD_RHO) -> np.ndarray:
    """Sigma[j, k] = rho^|j - k|"""
    index = np.arange(p)
    return rho ** np.abs(index[:, None] - index[None, :])


def evaluate_signal(family: Family, X: np.ndarray) -> np.ndarray:
    """
    Noiseless f(X) for a family (columns are 0-based; X_1 is X[:, 0]).

    Raises:
        DataError: too few columns for the family
    """
    family = Family(family)
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] < FAMILY_MIN_FEATURES[family]:
        raise DataError(
            f"{family.value} needs p >= {FAMILY_MIN_FEATURES[family]}, got {X.shape[1]}"
        )

    if family is Family.FRIEDMAN:
        return (
            10.0 * np.sin(np.pi * X[:, 0] * X[:, 1])
            + 20.0 * (X[:, 2] - 0.5) ** 2
            + 10.0 * X[:, 3]
            + 5.0 * X[:, 4]
        )
    if family is Family.CHECKERBOARD:
        return 2.0 * X[:, 4] * X[:, 9] + 2.0 * X[:, 14] * X[:, 19]

    Z = 2.0 * (X - 0.5)
    if family is Family.VAN_DER_LAAN:
        return Z[:, 0] * Z[:, 1] + Z[:, 2] ** 2 + Z[:, 7] * Z[:, 9] - Z[:, 5] ** 2
    if family is Family.MEIER1:
        return -np.sin(2.0 * Z[:, 0]) + Z[:, 1] ** 2 + Z[:, 2] - np.exp(Z[:, 3])
    # Meier 2
    angle3 = 2.0 * np.pi * Z[:, 2]
    angle4 = 2.0 * np.pi * Z[:, 3]
    return (
        -Z[:, 0]
        + (2.0 * Z[:, 1] - 1.0) ** 2
        + np.sin(angle3) / (2.0 - np.sin(angle4))
        + 2.0 * np.cos(angle4)
        + 4.0 * np.cos(angle4) ** 2
    )


def generate(spec: ScenarioSpec) -> Dataset:
    """
    Draw one dataset for a scenario.

    Features are Uniform(0, 1) except Checkerboard, which draws N(0, Sigma)
    through the Cholesky factor of Sigma. Deterministic under spec.seed.

    Raises:
        DataError: p below the family minimum
    """
    family = spec.family
    if spec.p < FAMILY_MIN_FEATURES[family]:
        raise DataError(f"{family.value} needs p >= {FAMILY_MIN_FEATURES[family]}, got {spec.p}")

    rng = np.random.default_rng(spec.seed)
    if family is Family.CHECKERBOARD:
        chol = np.linalg.cholesky(checkerboard_covariance(spec.p))
        X = rng.standard_normal((spec.n, spec.p)) @ chol.T
    else:
        X = rng.uniform(0.0, 1.0, size=(spec.n, spec.p))

    noise_sd = spec.noise_sd if spec.noise_sd is not None else FAMILY_NOISE_SD[family]
    y = evaluate_signal(family, X) + noise_sd * rng.standard_normal(spec.n)
    return Dataset(X, y)


def split_train_test(
    data: Dataset, train_fraction: float, rng: np.random.Generator
) -> Tuple[Dataset, Dataset]:
    """
    Uniform random split into floor(fraction * n) training rows and the rest.

    Raises:
        DataError: fraction outside (0, 1) or either part empty
    """
    if not 0.0 < train_fraction < 1.0:
        raise DataError(f"train fraction must lie in (0, 1), got {train_fraction}")
    n_train = int(np.floor(train_fraction * data.n))
    if n_train < 1 or n_train >= data.n:
        raise DataError(f"degenerate split: {n_train} train / {data.n - n_train} test rows")
    permutation = rng.permutation(data.n)
    return data.subset(permutation[:n_train]), data.subset(permutation[n_train:])


def scenario_grid(
    sizes: Tuple[int, ...] = SCENARIO_SIZES, widths: Tuple[int, ...] = SCENARIO_WIDTHS
) -> List[ScenarioSpec]:
    """All family x n x p simulation scenarios (20 with the defaults)"""
    return [
        ScenarioSpec(family=family, n=n, p=p)
        for family, n, p in itertools.product(Family, sizes, widths)
    ]

