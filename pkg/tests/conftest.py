from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from instructkit.config import load_run_config
from instructkit.pipeline import run_pipeline
from instructkit.toydata import write_toy_corpus


@pytest.fixture(scope="session")
def toy_root(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("toy")
    write_toy_corpus(root)
    return root


@pytest.fixture(scope="session")
def toy_config(toy_root):
    return load_run_config(toy_root / "config.yaml")


@pytest.fixture(scope="session")
def toy_run(toy_root, toy_config, tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("run") / "out"
    run_pipeline(toy_config, out, config_path=toy_root / "config.yaml")
    return out
