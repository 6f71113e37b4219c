"""Integration of the Hamilton equations and residual checks along trajectories."""

from __future__ import annotations

from dataclasses import dataclass, field
import io

import numpy as np

from .hamiltonian import HamiltonianForm
from .kernels import compile_system
from .model import QuadraticModel, ReferenceFrame
from .split import SigmaSplit

__all__ = [
    "DivergenceError",
    "NotApplicableError",
    "Trajectory",
    "integrate_hamilton",
    "constraint_drift",
    "lagrange_residual",
    "split_residuals",
    "constrained_equation_check",
    "energy_drift",
]


class DivergenceError(RuntimeError):
    def __init__(self, msg, last_good=None):
        super().__init__(msg)
        self.last_good = last_good


class NotApplicableError(ValueError):
    pass


@dataclass
class Trajectory:
    """Uniformly sampled curve ``(t, q, p)``; ``samples`` has shape (n, 1 + 2m)."""

    samples: np.ndarray
    step: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or (s.shape[1] - 1) % 2:
            raise ValueError("samples must have 1 + 2m columns")
        if len(s) > 1:
            dt = np.diff(s[:, 0])
            if np.any(dt <= 0) or np.max(np.abs(dt - self.step)) > 1e-9 * max(1.0, abs(s[-1, 0])):
                raise ValueError("sample times must increase with uniform step")
        self.samples = s

    @classmethod
    def from_arrays(cls, t, q, p, meta=None) -> "Trajectory":
        t = np.asarray(t, dtype=float)
        q = np.asarray(q, dtype=float).reshape(len(t), -1)
        p = np.asarray(p, dtype=float).reshape(len(t), -1)
        step = float(t[1] - t[0]) if len(t) > 1 else 0.0
        return cls(np.column_stack([t, q, p]), step, dict(meta or {}))

    @property
    def m(self) -> int:
        return (self.samples.shape[1] - 1) // 2

    @property
    def t(self):
        return self.samples[:, 0]

    @property
    def q(self):
        return self.samples[:, 1 : 1 + self.m]

    @property
    def p(self):
        return self.samples[:, 1 + self.m :]

    def __len__(self):
        return len(self.samples)

    def to_csv(self) -> str:
        m = self.m
        buf = io.StringIO()
        header = ["t"] + [f"q{i + 1}" for i in range(m)] + [f"p{i + 1}" for i in range(m)]
        buf.write(",".join(header) + "\n")
        for row in self.samples:
            buf.write(",".join(format(float(x), ".17g") for x in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Trajectory":
        lines = [ln for ln in text.strip().splitlines() if ln]
        data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
        step = float(data[1, 0] - data[0, 0]) if len(data) > 1 else 0.0
        return cls(data, step)


def integrate_hamilton(H: HamiltonianForm, initial, t_end: float, step: float, backend=None) -> Trajectory:
    """Classical RK4 for qdot = dh/dp, pdot = -dh/dq.

    ``initial`` is ``(t0, q0, p0)``. The right-hand side is compiled from the
    exact polynomial gradients once and evaluated in floating point.

    Raises
    ------
    DivergenceError
        If the state becomes nonfinite; carries the last finite sample.
    """
    t0, q0, p0 = initial
    m = H.m
    q0 = np.asarray(q0, dtype=float).reshape(m)
    p0 = np.asarray(p0, dtype=float).reshape(m)
    if step <= 0:
        raise ValueError("step must be positive")
    if t_end <= t0:
        raise ValueError("t_end must exceed t0")
    nsteps = int(round((t_end - t0) / step))
    rhs = H.momentum_gradient() + [-g for g in H.position_gradient()]
    system = compile_system(rhs, backend)
    samples, n_good = system.rk4(np.concatenate([[t0], q0, p0]), step, nsteps)
    if n_good < nsteps + 1:
        raise DivergenceError(
            f"nonfinite state after t={samples[n_good - 1, 0]}", last_good=samples[n_good - 1].copy()
        )
    return Trajectory(samples, float(step), {"integrator": "rk4", "backend": system._impl.__name__})


def _projectors(split: SigmaSplit, traj: Trajectory):
    if split.symbolic and split.projector().is_constant():
        proj = np.array(split.projector().constant_values(), dtype=float)
        return np.broadcast_to(proj, (len(traj), *proj.shape))
    return np.array([split.projector_at(t, q) for t, q in zip(traj.t, traj.q)])


def constraint_drift(traj: Trajectory, split: SigmaSplit, model: QuadraticModel | None = None) -> float:
    """max over samples of |R(t, q, p)|_inf with R = (1 - a sigma0) p."""
    proj = _projectors(split, traj)
    r = traj.p - np.einsum("nij,nj->ni", proj, traj.p)
    return float(np.max(np.abs(r))) if r.size else 0.0


class _ModelTables:
    """Vectorized evaluation of a, b, c and their q-derivatives along a curve."""

    def __init__(self, model: QuadraticModel):
        m = model.m
        polys = list(model.a.entries) + list(model.b) + [model.c]
        self.m = m
        self.values = compile_system(polys)
        derivs = []
        for i in range(m):
            v = f"q{i + 1}"
            derivs += [f.diff(v) for f in polys]
        self.derivs = compile_system(derivs)

    def at(self, t, q):
        m = self.m
        x = np.concatenate([[t], q])
        v = self.values(x)
        a = v[: m * m].reshape(m, m)
        b = v[m * m : m * m + m]
        c = v[-1]
        return a, b, c

    def grad_at(self, t, q):
        m = self.m
        x = np.concatenate([[t], q])
        d = self.derivs(x).reshape(m, m * m + m + 1)
        da = d[:, : m * m].reshape(m, m, m)
        db = d[:, m * m : m * m + m]
        dc = d[:, -1]
        return da, db, dc


def _central(values: np.ndarray, h: float) -> np.ndarray:
    return (values[2:] - values[:-2]) / (2.0 * h)


def _need_samples(traj: Trajectory, n: int = 5):
    if len(traj) < n:
        raise ValueError(f"need at least {n} samples, got {len(traj)}")


def lagrange_residual(traj: Trajectory, model: QuadraticModel) -> float:
    """max |dL/dq^i - d/dt pi_i| along the projected curve, by central differences.

    ``qdot`` is reconstructed on interior samples, ``pi = a qdot + b`` is
    formed there and differentiated again, so the residual is O(step^2).
    """
    _need_samples(traj)
    h = traj.step
    tables = _ModelTables(model)
    qdot = _central(traj.q, h)
    ts, qs = traj.t[1:-1], traj.q[1:-1]
    pis, dls = [], []
    for t, q, v in zip(ts, qs, qdot):
        a, b, _ = tables.at(t, q)
        da, db, dc = tables.grad_at(t, q)
        pis.append(a @ v + b)
        dls.append(0.5 * np.einsum("ijk,j,k->i", da, v, v) + db @ v + dc)
    pis = np.array(pis)
    dls = np.array(dls)
    res = dls[1:-1] - _central(pis, h)
    return float(np.max(np.abs(res)))


def _gamma_values(frame: ReferenceFrame, ts, qs):
    system = compile_system([g for g in frame.gamma])
    return np.array([system(np.concatenate([[t], q])) for t, q in zip(ts, qs)])


def _kernel_parts(traj: Trajectory, split: SigmaSplit, model: QuadraticModel):
    """Interior samples with qdot, F = sigma0 (a qdot + b) and sigma0 p."""
    _need_samples(traj)
    tables = _ModelTables(model)
    qdot = _central(traj.q, traj.step)
    ts, qs, ps = traj.t[1:-1], traj.q[1:-1], traj.p[1:-1]
    fs, s0ps = [], []
    for t, q, p, v in zip(ts, qs, ps, qdot):
        a, b, _ = tables.at(t, q)
        s0 = split.sigma0_at(t, q)
        fs.append(s0 @ (a @ v + b))
        s0ps.append(s0 @ p)
    return ts, qs, qdot, np.array(fs), np.array(s0ps)


def split_residuals(traj: Trajectory, split: SigmaSplit, model: QuadraticModel, frame: ReferenceFrame):
    """Gauge residual |S(qdot) - Gamma| and momentum residual |sigma0 (a qdot + b) - sigma0 p|."""
    ts, qs, qdot, fs, s0ps = _kernel_parts(traj, split, model)
    gam = _gamma_values(frame, ts, qs)
    gauge = float(np.max(np.abs(qdot - fs - gam)))
    mom = float(np.max(np.abs(fs - s0ps)))
    return gauge, mom


def constrained_equation_check(
    traj: Trajectory,
    split: SigmaSplit,
    model: QuadraticModel,
    H: HamiltonianForm,
    drift_tol: float = 1e-8,
) -> float:
    """Residual of pdot = -dh/dq together with sigma0 (a qdot + b) = sigma0 p on N_L.

    Raises
    ------
    NotApplicableError
        If the curve leaves the constraint space by more than ``drift_tol``.
    """
    _need_samples(traj)
    drift = constraint_drift(traj, split, model)
    if drift > drift_tol:
        raise NotApplicableError(f"trajectory leaves N_L (drift {drift:.3g})")
    h = traj.step
    pdot = _central(traj.p, h)
    force = compile_system(H.position_gradient())
    ts, qs, ps = traj.t[1:-1], traj.q[1:-1], traj.p[1:-1]
    hres = 0.0
    for t, q, p, dp in zip(ts, qs, ps, pdot):
        hres = max(hres, float(np.max(np.abs(dp + force(np.concatenate([[t], q, p]))))))
    _, _, _, fs, s0ps = _kernel_parts(traj, split, model)
    return max(hres, float(np.max(np.abs(fs - s0ps))))


def energy_drift(traj: Trajectory, energy) -> float:
    """max |E(sample) - E(initial)| for a phase-space polynomial ``energy``."""
    system = compile_system([energy])
    vals = np.array([system(row)[0] for row in traj.samples])
    return float(np.max(np.abs(vals - vals[0])))
