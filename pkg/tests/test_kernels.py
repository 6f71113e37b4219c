import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given

from quadham import _fallback, kernels
from quadham.poly import phase_space

from conftest import polys

needs_ext = pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled extension not built")


def system(backend):
    t, (q1, q2), (p1, p2) = phase_space(2)
    rhs = [p1, p2 * q1, -q1 - q1 * q1 * q2 / 3, t * p1 - 2]
    return kernels.compile_system(rhs, backend)


def test_python_backend_forced():
    assert system("python")._impl is _fallback


@given(polys(max_degree=3))
def test_eval_matches_exact(f):
    x = np.array([0.5, -1.25, 0.75, 2.0, -0.5])
    got = kernels.compile_system([f])(x)[0]
    assert abs(got - float(f.evaluate_exact(list(x)))) <= 1e-9 * max(1.0, abs(got))


@needs_ext
@given(polys(max_degree=3), polys(max_degree=3))
def test_backends_agree_on_evaluation(f, g):
    x = np.array([0.3, -0.7, 1.1, 0.2, -1.9])
    a = kernels.compile_system([f, g], "python")(x)
    b = kernels.compile_system([f, g])(x)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)


@needs_ext
def test_backends_agree_on_rk4():
    s0 = [0.0, 0.3, -0.2, 0.1, 0.4]
    a, na = system("python").rk4(s0, 1e-2, 300)
    b, nb = system(None).rk4(s0, 1e-2, 300)
    assert na == nb == 301
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("backend", ["python", None])
def test_divergence_marks_rows(backend):
    t, (q1,), (p1,) = phase_space(1)
    sysm = kernels.compile_system([p1 * p1, p1 * p1 * p1], backend)
    samples, n_good = sysm.rk4([0.0, 0.0, 1.0], 0.05, 200)
    assert n_good < 201
    assert np.all(np.isfinite(samples[:n_good])) and np.all(np.isnan(samples[n_good:]))


def test_wrong_shape_rejected():
    t, (q1,), (p1,) = phase_space(1)
    with pytest.raises(ValueError):
        kernels.compile_system([p1]).rk4([0.0, 1.0, 0.0], 0.1, 1)


def test_env_var_selects_fallback():
    env = dict(os.environ, QUADHAM_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from quadham import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
