"""Pytest fixtures and utilities for rcbo tests."""

import logging
from pathlib import Path
from typing import Generator

import numpy as np
import pytest

from rcbo.domain import Ball, Box, HeartRegion
from rcbo.dynamics import Scheme, SolverConfig


@pytest.fixture(autouse=True)
def _isolated_output(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path
) -> Generator[None, None, None]:
    """Keep RCBO_OUT and RCBO_SEED from the developer's shell out of tests."""
    monkeypatch.delenv("RCBO_SEED", raising=False)
    monkeypatch.setenv("RCBO_OUT", str(tmp_path / "rcbo-out"))
    yield
    # CliRunner closes the stream a handler was bound to
    logging.getLogger("rcbo").handlers.clear()


@pytest.fixture
def clean_caches() -> Generator[None, None, None]:
    """Drop the bundled-table and reference-minimizer caches around a test."""
    from rcbo import data_loader, objective

    data_loader.clear_cache()
    objective.clear_cache()
    yield
    data_loader.clear_cache()
    objective.clear_cache()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def unit_ball() -> Ball:
    return Ball(np.zeros(2), 1.0)


@pytest.fixture
def ackley_ball() -> Ball:
    return Ball(np.zeros(2), 3.0)


@pytest.fixture
def unit_box() -> Box:
    return Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0]))


@pytest.fixture
def heart() -> HeartRegion:
    return HeartRegion()


@pytest.fixture
def ackley_cfg() -> SolverConfig:
    """Small projection-scheme run on the Ackley problem."""
    return SolverConfig(
        scheme=Scheme.PROJECTION,
        alpha=1e4,
        beta="1",
        sigma="4",
        h=0.1,
        steps=10,
        particles=50,
        seed=42,
    )


@pytest.fixture
def ackley_config_file(tmp_path: Path) -> Path:
    path = tmp_path / "ackley.toml"
    path.write_text(
        "\n".join(
            [
                'objective = "ackley"',
                'scheme = "projection"',
                "alpha = 1e4",
                'beta = "const:1"',
                'sigma = "const:4"',
                "h = 0.1",
                "steps = 10",
                "particles = 50",
                "seed = 7",
                "",
                "[domain]",
                'kind = "ball"',
                "center = [0.0, 0.0]",
                "radius = 3.0",
                "",
            ]
        )
    )
    return path
