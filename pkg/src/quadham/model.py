"""Quadratic Lagrangians L = 1/2 a_ij qdot^i qdot^j + b_i qdot^i + c and their Legendre map."""

from __future__ import annotations

from dataclasses import dataclass, field
import itertools
import json
from pathlib import Path

import numpy as np

from .linalg import DEFAULT_TOL, numeric_rank, sym_pinv
from .poly import CoeffPoly, PolyMatrix

__all__ = [
    "ModelError",
    "ConstantRankError",
    "ZeroSectionError",
    "QuadraticModel",
    "ReferenceFrame",
    "ValidationReport",
    "validate_model",
    "default_grid",
    "lagrangian_eval",
    "legendre_map",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "oscillator_model",
    "degenerate_diag_model",
    "degenerate_full_model",
]


class ModelError(ValueError):
    """Malformed model description."""


class ConstantRankError(ModelError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


class ZeroSectionError(ModelError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


@dataclass(frozen=True)
class QuadraticModel:
    """The data (a, b, c) of a quadratic Lagrangian on R x R^m.

    ``a`` is a symmetric m x m matrix, ``b`` a length-m vector and ``c`` a
    scalar, all polynomials in (t, q) (signature ``num_q=m, num_p=0``).
    ``domain`` holds the (t, q) boxes used to build validation grids.
    """

    m: int
    a: PolyMatrix
    b: tuple
    c: CoeffPoly
    domain: dict = field(default_factory=dict, compare=False)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        m = self.m
        if m < 1:
            raise ModelError("dimension m must be >= 1")
        a = self.a
        if not isinstance(a, PolyMatrix):
            a = PolyMatrix.from_rows(a, num_q=m)
        if a.shape != (m, m):
            raise ModelError(f"a must be {m}x{m}")
        if a.num_p:
            raise ModelError("a must not depend on momenta")
        a = a.lift(m, 0) if a.num_q != m else a
        if not a.is_symmetric():
            raise ModelError("a must be exactly symmetric")
        b = tuple(_as_config_poly(x, m) for x in self.b)
        if len(b) != m:
            raise ModelError(f"b must have length {m}")
        c = _as_config_poly(self.c, m)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def is_time_independent(self) -> bool:
        polys = list(self.a.entries) + list(self.b) + [self.c]
        return not any(f.depends_on("t") for f in polys)

    def a_at(self, t, q) -> np.ndarray:
        return self.a.evaluate((t, *q))

    def b_at(self, t, q) -> np.ndarray:
        pt = (t, *q)
        return np.array([float(f.evaluate_exact(pt)) for f in self.b])

    def c_at(self, t, q) -> float:
        return float(self.c.evaluate_exact((t, *q)))

    def box(self):
        t_box = tuple(self.domain.get("t", (0.0, 1.0)))
        q_box = self.domain.get("q") or [(-1.0, 1.0)] * self.m
        return t_box, [tuple(b) for b in q_box]


@dataclass(frozen=True)
class ReferenceFrame:
    """Components Gamma^i(t, q) of the horizontal field d_t + Gamma^i d_i."""

    gamma: tuple

    def at(self, t, q) -> np.ndarray:
        pt = (t, *q)
        return np.array([float(g.evaluate_exact(pt)) for g in self.gamma])


def _as_config_poly(x, m) -> CoeffPoly:
    if isinstance(x, CoeffPoly):
        if x.num_p:
            raise ModelError("Lagrangian coefficients must not depend on momenta")
        return x.lift(m, 0) if x.num_q != m else x
    return CoeffPoly.const(x, m, 0)


@dataclass
class ValidationReport:
    rank: int | None
    max_b_residual: float
    points: int
    ok: bool
    message: str = ""
    rank_change_at: list | None = None

    def to_dict(self):
        return {
            "rank": self.rank,
            "max_b_residual": self.max_b_residual,
            "points": self.points,
            "ok": self.ok,
            "message": self.message,
            "rank_change_at": self.rank_change_at,
        }


def default_grid(model: QuadraticModel, n: int = 3) -> list[tuple]:
    """An n^(m+1) lattice over the model's declared (t, q) boxes."""
    t_box, q_box = model.box()
    axes = [np.linspace(t_box[0], t_box[1], n)] + [np.linspace(lo, hi, n) for lo, hi in q_box]
    return [tuple(float(x) for x in pt) for pt in itertools.product(*axes)]


def validate_model(model: QuadraticModel, grid=None, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check the constant-rank and zero-section hypotheses on a grid of (t, q) points.

    Raises
    ------
    ConstantRankError
        If the numerical rank of ``a`` changes across the grid.
    ZeroSectionError
        If ``(1 - a sigma0) b`` exceeds ``tol`` somewhere, i.e. b is not in Im a.
    """
    if grid is None:
        grid = default_grid(model)
    grid = list(grid)
    if not grid:
        raise ModelError("validation grid is empty")
    rank = None
    worst = 0.0
    for pt in grid:
        t, q = pt[0], pt[1:]
        a = model.a_at(t, q)
        r = numeric_rank(a, tol)
        if rank is None:
            rank = r
        elif r != rank:
            report = ValidationReport(
                rank=None,
                max_b_residual=worst,
                points=len(grid),
                ok=False,
                message=f"constant-rank violation: rank {rank} vs {r}",
                rank_change_at=list(pt),
            )
            raise ConstantRankError(report.message, report)
        s0 = sym_pinv(a, tol)
        b = model.b_at(t, q)
        res = b - a @ (s0 @ b)
        worst = max(worst, float(np.max(np.abs(res))) if res.size else 0.0)
    if worst > tol:
        report = ValidationReport(rank, worst, len(grid), False, "zero-section violation: b not in Im a")
        raise ZeroSectionError(report.message, report)
    return ValidationReport(rank, worst, len(grid), True, "ok")


def lagrangian_eval(model: QuadraticModel, t, q, qdot) -> float:
    v = np.asarray(qdot, dtype=float)
    return float(0.5 * v @ model.a_at(t, q) @ v + model.b_at(t, q) @ v + model.c_at(t, q))


def legendre_map(model: QuadraticModel, t, q, qdot) -> np.ndarray:
    v = np.asarray(qdot, dtype=float)
    return model.a_at(t, q) @ v + model.b_at(t, q)


# file format


def model_from_dict(d: dict, name: str = "") -> QuadraticModel:
    try:
        m = int(d["m"])
        a = PolyMatrix.from_rows(
            [[CoeffPoly.from_literal(x, m) for x in row] for row in d["a"]], num_q=m
        )
        b = [CoeffPoly.from_literal(x, m) for x in d.get("b", [0] * m)]
        c = CoeffPoly.from_literal(d.get("c", 0), m)
        domain = d.get("domain", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed model description: {exc}") from exc
    return QuadraticModel(m, a, tuple(b), c, domain, name or d.get("name", ""))


def model_to_dict(model: QuadraticModel) -> dict:
    t_box, q_box = model.box()
    return {
        "m": model.m,
        "a": model.a.to_literal(),
        "b": [f.to_literal() for f in model.b],
        "c": model.c.to_literal(),
        "domain": {"t": list(t_box), "q": [list(x) for x in q_box]},
    }


def load_model(path) -> QuadraticModel:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError(f"cannot read model file {path}: {exc}") from exc
    return model_from_dict(data, name=path.stem)


# reference models used throughout the tests and docs


def oscillator_model() -> QuadraticModel:
    """m=1, L = 1/2 qdot^2 - 1/2 q^2 (regular)."""
    q1 = CoeffPoly.var("q1", 1)
    return QuadraticModel(1, PolyMatrix.from_rows([[1]], num_q=1), (0,), -q1 * q1 / 2, name="M_reg")


def degenerate_diag_model(c: CoeffPoly | None = None) -> QuadraticModel:
    """m=2, a = diag(1, 0), b = 0; the second velocity is invisible."""
    return QuadraticModel(
        2, PolyMatrix.from_rows([[1, 0], [0, 0]], num_q=2), (0, 0), c if c is not None else 0, name="M_deg1"
    )


def degenerate_full_model() -> QuadraticModel:
    """m=2, a = [[1, 1], [1, 1]], b = 0, c = 0 (rank one, non-diagonal)."""
    return QuadraticModel(2, PolyMatrix.from_rows([[1, 1], [1, 1]], num_q=2), (0, 0), 0, name="M_deg2")
