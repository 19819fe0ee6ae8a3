import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import HALF, LINEAR_HALF, RECIPROCAL, example3_system, tanh3_problem
from fractalhisto import kernels
from fractalhisto.attractor import chaos_game, map_choices
from fractalhisto.core_model import ContractionSpec, ScalingSpec, assemble_system

BACKENDS = kernels.backends()


def double_loop(pts, bt, bx, eta):
    out = []
    for t, x in pts:
        out.append(min(abs(t - u) + eta * abs(x - v) for u, v in zip(bt, bx)))
    return np.array(out)


def sorted_target(rng, n):
    bt = np.sort(rng.uniform(0, 1, n))
    return bt, rng.normal(size=n)


@pytest.mark.parametrize("name", sorted(BACKENDS))
@pytest.mark.parametrize("seed", range(4))
def test_min_deta_matches_double_loop(name, seed):
    rng = np.random.default_rng(seed)
    pts = np.column_stack([rng.uniform(-0.1, 1.1, 120), rng.normal(size=120)])
    bt, bx = sorted_target(rng, 90)
    got = BACKENDS[name].min_deta(pts, bt, bx, 1 / 6, 1)
    assert np.array_equal(got, double_loop(pts, bt, bx, 1 / 6))


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_min_deta_thread_count_irrelevant(name):
    rng = np.random.default_rng(9)
    pts = np.column_stack([rng.uniform(0, 1, 5000), rng.normal(size=5000)])
    bt, bx = sorted_target(rng, 3000)
    one = BACKENDS[name].min_deta(pts, bt, bx, 0.25, 1)
    four = BACKENDS[name].min_deta(pts, bt, bx, 0.25, 4)
    assert np.array_equal(one, four)


def test_min_deta_read_only_inputs():
    rng = np.random.default_rng(2)
    pts = rng.random((10, 2))
    bt, bx = sorted_target(rng, 10)
    for arr in (pts, bt, bx):
        arr.setflags(write=False)
    results = [b.min_deta(pts, bt, bx, 0.5, 1) for b in BACKENDS.values()]
    assert all(np.array_equal(results[0], r) for r in results)


def _systems():
    lin = ContractionSpec("linear", 0.4, LINEAR_HALF)
    yield example3_system()
    yield tanh3_problem(64).system((0.1, -0.2, 0.3))
    yield assemble_system(HALF, (0.5, 0.25), (4.6, 5.8),
                          (ScalingSpec.constant(0.5), ScalingSpec.constant(0.25)),
                          (RECIPROCAL, RECIPROCAL))
    yield assemble_system(HALF, (0.2, -0.3), (0.0, 1.0),
                          (ScalingSpec.linear(0.9), ScalingSpec.constant(-0.5)), (lin, lin))


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")
@pytest.mark.parametrize("idx", range(4))
def test_chaos_orbit_backends_bit_identical(idx):
    sys_ = list(_systems())[idx]
    a = chaos_game(sys_, 20_000, seed=idx, backend=BACKENDS["cython"])
    b = chaos_game(sys_, 20_000, seed=idx, backend=BACKENDS["python"])
    assert np.array_equal(a.points, b.points)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_chaos_orbit_reports_pole_step(name):
    # with c = 0 and d = -1 the second step evaluates 1/(1 + x) at its pole
    sys_ = assemble_system(HALF, (0.0, 0.0), (-1.0, -1.0),
                           (ScalingSpec.constant(0.0), ScalingSpec.constant(0.0)),
                           (RECIPROCAL, RECIPROCAL))
    arr = sys_.kernel_arrays()
    choices = map_choices(2, 10, 0)
    _, bad = BACKENDS[name].chaos_orbit(
        arr["a"], arr["b"], arr["c"], arr["d"], arr["s_code"], arr["s_par"],
        arr["dl_code"], arr["dl_par"], choices, 0.0, 0.0, 0)
    assert bad == 1


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("FRACTALHISTO_THREADS", "3")
    assert kernels.thread_count() == 3
    monkeypatch.setenv("FRACTALHISTO_THREADS", "junk")
    assert kernels.thread_count() == 1


def test_pure_python_switch():
    env = dict(os.environ, FRACTALHISTO_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from fractalhisto import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_default_backend_prefers_extension():
    expected = "cython" if "cython" in BACKENDS else "python"
    if os.environ.get("FRACTALHISTO_PURE_PYTHON"):
        expected = "python"
    assert kernels.BACKEND == expected


coords = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.tuples(coords, coords), min_size=1, max_size=40),
    st.lists(st.tuples(st.integers(-5, 5).map(float) | coords, coords), min_size=1, max_size=40),
    st.floats(1e-3, 10.0),
)
def test_min_deta_property_all_backends(pts, target, eta):
    pts = np.array(pts, dtype=float)
    target = np.array(sorted(target), dtype=float)
    bt, bx = np.ascontiguousarray(target[:, 0]), np.ascontiguousarray(target[:, 1])
    oracle = double_loop(pts, bt, bx, eta)
    for mod in BACKENDS.values():
        assert np.array_equal(mod.min_deta(pts, bt, bx, eta, 1), oracle)
