"""Shared fixtures: the synthetic input corpus is generated once per
session and reused read-only; runs write into per-test output dirs."""

import pytest

from noveldyn.config import load_config
from noveldyn.synthdata import build_fixture


@pytest.fixture(scope="session")
def fixture_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("synth")
    build_fixture(root, seed=0)
    return root


@pytest.fixture(scope="session")
def fixture_config(fixture_root):
    return load_config(fixture_root / "config.yaml")
