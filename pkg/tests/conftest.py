"""
Shared fixtures
"""

import numpy as np
import pytest

from src.config import Family, ScenarioSpec, TreeConfig
from src.data.dataset import Dataset
from src.data.simgen import generate
from src.ensembles import fit_gbt, fit_rf


@pytest.fixture
def step_data():
    """1-D step: X=[1,2,3,4], Y=[0,0,1,1]"""
    return Dataset(np.array([[1.0], [2.0], [3.0], [4.0]]), np.array([0.0, 0.0, 1.0, 1.0]))


@pytest.fixture
def friedman_small():
    """Friedman n=120, p=6"""
    return generate(ScenarioSpec(family=Family.FRIEDMAN, n=120, p=6, seed=11))


@pytest.fixture
def small_forest(friedman_small):
    return fit_rf(friedman_small, m_trees=25, config=TreeConfig(), master_seed=3)


@pytest.fixture
def small_boosted(friedman_small):
    return fit_gbt(friedman_small, m_rounds=15, master_seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
