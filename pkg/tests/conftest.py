"""Shared fixtures; the modules live at the repository root."""

import json
import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from models import PiecewisePowerLaw, SystemParams  # noqa: E402


@pytest.fixture
def params():
    return SystemParams(L=4, alpha=4.0, sigma2=1e-12, r_T=10.0)


@pytest.fixture
def homogeneous():
    return PiecewisePowerLaw.single(0.01)


@pytest.fixture
def small_config():
    """A quick power-law run configuration as a JSON tree."""
    return {
        "system": {"L": 2, "alpha": 4.0, "sigma2": 1e-12, "r_T": 10.0},
        "model": {"type": "power_law", "rho": 0.005, "epsilon": 0.0},
        "gamma_grid": {"min": -10.0, "max": 20.0, "points": 7, "scale": "log", "units": "db"},
        "trials": 200,
        "seed": 7,
        "tail_tolerance": 0.01,
        "desk": {"trials": 50},
    }


@pytest.fixture
def write_config(tmp_path):
    def _write(data, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data, indent=2))
        return str(path)
    return _write


@pytest.fixture
def ledger_url(tmp_path, monkeypatch):
    url = f"sqlite:///{tmp_path / 'runs.db'}"
    monkeypatch.setenv("DATABASE_URL", url)
    return url
