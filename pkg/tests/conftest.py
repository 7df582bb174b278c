"""Shared fixtures: bundled frameworks, their datasets and small builders."""

import numpy as np
import pytest

from config.framework_registry import get_framework_document, get_framework_path
from config.settings import PROJECT_ROOT
from core.dataset import Dataset, load_dataset
from core.domains import AttributeDomain
from core.loader import load_framework


def bundled_framework(framework_id, grid_step=None):
    return load_framework(get_framework_path(framework_id), grid_step=grid_step)


def bundled_dataset(framework_id, framework=None):
    framework = framework or bundled_framework(framework_id)
    doc = get_framework_document(framework_id)
    return load_dataset(PROJECT_ROOT / doc["dataset"], framework.attributes)


@pytest.fixture
def bundled():
    """bundled(id) -> (framework, dataset)."""

    def load(framework_id, grid_step=None):
        framework = bundled_framework(framework_id, grid_step)
        return framework, bundled_dataset(framework_id, framework)

    return load


@pytest.fixture
def binary_domain():
    return AttributeDomain.finite([0, 1])


@pytest.fixture
def make_dataset():
    """make_dataset({name: (values, domain)}) -> Dataset."""

    def build(columns):
        return Dataset.from_columns({k: v[0] for k, v in columns.items()}, {k: v[1] for k, v in columns.items()})

    return build


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
