import subprocess
import sys

import pytest

from mixtrain import config as cmod


@pytest.fixture(scope="session")
def sweep_json_text() -> str:
    """Real sweep document from the producer CLI; skip when absent.

    The harness talks to the planner only through this JSON, so the
    integration tests exercise the genuine artifact rather than a
    vendored copy.
    """
    proc = subprocess.run(
        [sys.executable, "-m", "srk.cli", "sweep"], capture_output=True, text=True
    )
    if proc.returncode != 0:
        pytest.skip("sweep producer CLI is not installed")
    return proc.stdout


@pytest.fixture(scope="session")
def sweep_config(sweep_json_text: str) -> cmod.SweepConfig:
    return cmod.config_from_json(sweep_json_text)


@pytest.fixture()
def tiny_hyper() -> cmod.Hyperparameters:
    return cmod.Hyperparameters(
        optimizer="adam",
        lr=1e-3,
        weight_decay=5e-5,
        betas=(0.9, 0.999),
        batch_size=64,
        epochs=2,
        patch=(4, 4),
        dropout=0.1,
        augment=("normalize",),
    )
