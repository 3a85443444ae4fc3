"""Shared fixtures for the test suite."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from utils.noclick import decay_spectrum, find_t_opt  # noqa: E402
from utils.oat import PrepSpec, prepare  # noqa: E402


@pytest.fixture(scope="session")
def operating_point():
    """N=100, chi=0.2, theta=0 state with its spectrum and t_opt."""
    state0 = prepare(PrepSpec(100, 0.2))
    spectrum = decay_spectrum(100)
    return state0, spectrum, find_t_opt(state0, spectrum)


@pytest.fixture
def isolated_output(tmp_path, monkeypatch):
    """Point every default output directory at a temporary path."""
    from config.settings import Paths

    for name in ("OUTPUT", "FIGURES", "SWEEPS", "TRAJECTORIES"):
        monkeypatch.setattr(Paths, name, tmp_path / name.lower())
    monkeypatch.delenv("SUPERRADIANCE_WORKERS", raising=False)
    return tmp_path
