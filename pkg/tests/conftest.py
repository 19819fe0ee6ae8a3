from pathlib import Path

import pytest

from fractalhisto.core_model import (
    ContractionSpec,
    Histogram,
    ModulusSpec,
    ScalingSpec,
    assemble_system,
    build_partition,
)
from fractalhisto.histopolation import HistopolationProblem, solve

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

HALF = build_partition([0.0, 0.5, 1.0])
LINEAR_HALF = ModulusSpec("linear", 0.5)
HYPERBOLIC = ModulusSpec("hyperbolic")
SINE = ContractionSpec("scaled-sine", 0.5, LINEAR_HALF)
RECIPROCAL = ContractionSpec("reciprocal", 1.0, HYPERBOLIC)
TANH = ContractionSpec("scaled-tanh", 0.5, LINEAR_HALF)


def example3_system(m2=1.75, mode="construction"):
    return assemble_system(
        HALF, (0.5, 0.25), (1 / 3, 1 / 6),
        (ScalingSpec.linear(1.5), ScalingSpec.linear(m2)), (SINE, SINE), mode,
    )


def example4_problem(K=2 ** 14, **kw):
    return HistopolationProblem(
        HALF, Histogram((5.0, 6.0)), (0.5, 0.25),
        (ScalingSpec.constant(0.5), ScalingSpec.constant(0.25)),
        (RECIPROCAL, RECIPROCAL), K=K, **kw,
    )


def affine_system():
    zero = ScalingSpec.constant(0.0)
    return assemble_system(HALF, (1.0, -0.5), (2.0, 3.0), (zero, zero), (SINE, SINE))


def tanh3_problem(K=2 ** 14):
    return HistopolationProblem(
        build_partition([0.0, 0.25, 0.5, 1.0]), Histogram((1.0, -0.5, 2.0)),
        (0.3, -0.4, 0.2),
        (ScalingSpec.constant(0.9), ScalingSpec.constant(-0.6), ScalingSpec.constant(0.8)),
        (TANH, TANH, TANH), K=K,
    )


@pytest.fixture(scope="session")
def example3():
    return example3_system()


@pytest.fixture(scope="session")
def example4_solution():
    return solve(example4_problem())


@pytest.fixture(scope="session")
def tanh3_solution():
    return solve(tanh3_problem())


@pytest.fixture
def affine():
    return affine_system()


# -- acceptance summary ---------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
