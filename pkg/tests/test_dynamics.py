import math

import numpy as np
import pytest

from quadham.dynamics import (
    DivergenceError,
    NotApplicableError,
    Trajectory,
    constrained_equation_check,
    constraint_drift,
    energy_drift,
    integrate_hamilton,
    lagrange_residual,
    split_residuals,
)
from quadham.hamiltonian import build_hamiltonian, hamiltonian_from_poly
from quadham.model import QuadraticModel, ReferenceFrame
from quadham.poly import CoeffPoly, PolyMatrix, phase_space
from quadham.split import build_sigma, solve_connection


def setup(model, upsilon=None):
    split = build_sigma(model)
    frame = solve_connection(model, split, upsilon)
    return split, frame, build_hamiltonian(model, split, frame)


def free_model():
    return QuadraticModel(2, PolyMatrix.from_rows([[1, 0], [0, 0]], num_q=2), (0, 0), 0)


class TestIntegrate:
    def test_oscillator(self, m_reg):
        _, _, H = setup(m_reg)
        traj = integrate_hamilton(H, (0, [1], [0]), 1.0, 1e-3)
        assert abs(traj.q[-1, 0] - math.cos(1)) <= 1e-6
        assert len(traj) == 1001 and traj.t[-1] == 1.0

    def test_linear_motion(self, m_deg1):
        _, _, H = setup(m_deg1)
        traj = integrate_hamilton(H, (0, [0, 0], [1, 0]), 2.0, 1e-2)
        np.testing.assert_allclose(traj.q[:, 0], traj.t, atol=1e-12)
        np.testing.assert_array_equal(traj.q[:, 1], 0)
        np.testing.assert_array_equal(traj.p, np.tile([1, 0], (len(traj), 1)))

    def test_zero_hamiltonian(self):
        H = hamiltonian_from_poly(CoeffPoly.zero(2, 2))
        traj = integrate_hamilton(H, (0.5, [1, 2], [3, 4]), 1.5, 0.1)
        np.testing.assert_array_equal(traj.samples[:, 1:], np.tile([1, 2, 3, 4], (len(traj), 1)))
        assert traj.t[0] == 0.5

    def test_divergence(self):
        t, (q1,), (p1,) = phase_space(1)
        H = hamiltonian_from_poly(-q1 * p1 * p1 * p1)
        with pytest.raises(DivergenceError) as err:
            integrate_hamilton(H, (0, [0], [1]), 5.0, 0.05)
        assert np.all(np.isfinite(err.value.last_good))

    def test_bad_arguments(self, m_reg):
        _, _, H = setup(m_reg)
        with pytest.raises(ValueError):
            integrate_hamilton(H, (0, [1], [0]), 1.0, 0.0)
        with pytest.raises(ValueError):
            integrate_hamilton(H, (1, [1], [0]), 1.0, 0.1)

    def test_python_backend_matches(self, m_reg):
        _, _, H = setup(m_reg)
        a = integrate_hamilton(H, (0, [1], [0]), 1.0, 1e-2)
        b = integrate_hamilton(H, (0, [1], [0]), 1.0, 1e-2, backend="python")
        np.testing.assert_allclose(a.samples, b.samples, rtol=1e-12, atol=1e-14)


class TestMonitors:
    def test_drift_on_and_off(self, m_deg1):
        split, _, H = setup(m_deg1)
        on = integrate_hamilton(H, (0, [0, 0], [1, 0]), 10.0, 1e-3)
        assert constraint_drift(on, split) <= 1e-8
        off = integrate_hamilton(H, (0, [0, 0], [1, 1]), 1.0, 1e-3)
        assert constraint_drift(off, split) == 1.0

    def test_regular_has_no_drift(self, m_reg):
        split, _, H = setup(m_reg)
        traj = integrate_hamilton(H, (0, [1], [0.3]), 1.0, 1e-2)
        assert constraint_drift(traj, split) == 0

    def test_energy(self, m_reg):
        _, _, H = setup(m_reg)
        traj = integrate_hamilton(H, (0, [1], [0]), 10.0, 1e-3)
        assert energy_drift(traj, H.hfun) <= 1e-6

    def test_noether(self):
        _, _, H = setup(free_model())
        traj = integrate_hamilton(H, (0, [0.2, 0.5], [1, 0]), 10.0, 1e-3)
        assert np.max(np.abs(traj.p[:, 1] - traj.p[0, 1])) <= 1e-10


class TestResiduals:
    def test_lagrange(self, m_reg, m_deg1):
        for model, init in ((m_reg, (0, [1], [0])), (m_deg1, (0, [0.3, -0.2], [1, 0]))):
            _, _, H = setup(model)
            traj = integrate_hamilton(H, init, 1.0, 1e-3)
            assert lagrange_residual(traj, model) <= 1e-4

    def test_static(self):
        model = free_model()
        traj = Trajectory.from_arrays(np.linspace(0, 1, 11), np.ones((11, 2)), np.zeros((11, 2)))
        assert lagrange_residual(traj, model) == 0
        H = hamiltonian_from_poly(CoeffPoly.zero(2, 2))
        assert constrained_equation_check(traj, build_sigma(model), model, H) == 0

    def test_split_residuals(self, m_deg1):
        split, frame, H = setup(m_deg1)
        traj = integrate_hamilton(H, (0, [0, 0], [1, 0]), 1.0, 1e-3)
        gauge, mom = split_residuals(traj, split, m_deg1, frame)
        assert gauge <= 1e-4 and mom <= 1e-4
        wrong = ReferenceFrame((CoeffPoly.zero(2), CoeffPoly.const(1, 2)))
        gauge2, mom2 = split_residuals(traj, split, m_deg1, wrong)
        assert abs(gauge2 - 1) <= 1e-6 and mom2 == mom

    def test_regular_gauge_vacuous(self, m_reg):
        split, frame, H = setup(m_reg)
        traj = integrate_hamilton(H, (0, [1], [0]), 1.0, 1e-3)
        gauge, _ = split_residuals(traj, split, m_reg, frame)
        assert gauge <= 1e-6

    def test_lifted_lagrange_solution(self):
        # q1 = t, q2 = t^2 / 2 solves the free degenerate system; its kernel
        # velocity t is matched by Gamma = (0, t)
        model = free_model()
        t = CoeffPoly.var("t", 2)
        split, frame, H = setup(model, [0, t])
        ts = np.linspace(0, 1, 1001)
        traj = Trajectory.from_arrays(ts, np.column_stack([ts, ts**2 / 2]), np.tile([1.0, 0.0], (len(ts), 1)))
        gauge, mom = split_residuals(traj, split, model, frame)
        assert gauge <= 1e-4 and mom <= 1e-4
        assert constrained_equation_check(traj, split, model, H) <= 1e-4

    def test_constrained_check(self, m_deg1):
        split, _, H = setup(m_deg1)
        traj = integrate_hamilton(H, (0, [0, 0], [1, 0]), 1.0, 1e-3)
        assert constrained_equation_check(traj, split, m_deg1, H) <= 1e-4
        ts = np.linspace(0, 1, 101)
        bad = Trajectory.from_arrays(ts, np.column_stack([ts**2, 0 * ts]), np.tile([1.0, 0.0], (101, 1)))
        assert constrained_equation_check(bad, split, m_deg1, H) > 0.5

    def test_off_constraint_not_applicable(self, m_deg1):
        split, _, H = setup(m_deg1)
        traj = integrate_hamilton(H, (0, [0, 0], [1, 1]), 1.0, 1e-2)
        with pytest.raises(NotApplicableError):
            constrained_equation_check(traj, split, m_deg1, H)

    def test_too_few_samples(self, m_reg):
        traj = Trajectory.from_arrays([0, 0.1, 0.2], [[0], [0], [0]], [[0], [0], [0]])
        with pytest.raises(ValueError):
            lagrange_residual(traj, m_reg)


class TestTrajectory:
    def test_csv_round_trip(self, m_reg):
        _, _, H = setup(m_reg)
        traj = integrate_hamilton(H, (0, [1], [0]), 0.1, 1e-2)
        text = traj.to_csv()
        assert text.splitlines()[0] == "t,q1,p1"
        back = Trajectory.from_csv(text)
        np.testing.assert_array_equal(back.samples, traj.samples)

    def test_nonuniform_rejected(self):
        with pytest.raises(ValueError):
            Trajectory.from_arrays([0, 0.1, 0.3], [[0]] * 3, [[0]] * 3)
