"""Splitting maps sigma0/sigma1 and the velocity, momentum and constraint splittings.

``sigma0`` is a symmetric solution of ``a s a = a`` and ``s a s = s``
(the Moore-Penrose pseudoinverse by default); ``sigma1`` is a symmetric
matrix with ``a sigma1 = sigma1 a = 0`` chosen by the user. ``P = a sigma0``
projects momenta onto the Lagrangian constraint space and ``1 - P`` gives the
(reducible) constraints ``R_i = p_i - a_ij sigma0^jk p_k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .linalg import DEFAULT_TOL, exact_pinv, sym_pinv
from .model import QuadraticModel, ReferenceFrame
from .poly import CoeffPoly, PolyMatrix

__all__ = [
    "InvalidSigmaError",
    "InvalidOffsetError",
    "SigmaSplit",
    "build_sigma",
    "solve_connection",
    "velocity_split",
    "momentum_split",
    "constraint_values",
    "constraint_polys",
    "c_prime",
    "c_prime_at",
    "split_identity_residuals",
]


class InvalidSigmaError(ValueError):
    pass


class InvalidOffsetError(ValueError):
    pass


@dataclass(frozen=True)
class SigmaSplit:
    """sigma0 and sigma1 for a model.

    In symbolic mode ``sigma0`` is a :class:`PolyMatrix` with exact entries;
    otherwise it is ``None`` and :meth:`sigma0_at` evaluates the symmetric
    pseudoinverse of ``a(t, q)`` pointwise.
    """

    model: QuadraticModel
    sigma0: PolyMatrix | None
    sigma1: PolyMatrix
    symbolic: bool
    tol: float = DEFAULT_TOL

    def sigma0_at(self, t, q) -> np.ndarray:
        if self.symbolic:
            return self.sigma0.evaluate((t, *q))
        return sym_pinv(self.model.a_at(t, q), self.tol)

    def sigma1_at(self, t, q) -> np.ndarray:
        return self.sigma1.evaluate((t, *q))

    def projector_at(self, t, q) -> np.ndarray:
        """P = a sigma0 at a point."""
        return self.model.a_at(t, q) @ self.sigma0_at(t, q)

    def projector(self) -> PolyMatrix:
        """P = a sigma0 as an exact polynomial matrix (symbolic mode only)."""
        self._require_symbolic()
        return self.model.a @ self.sigma0

    def complement(self) -> PolyMatrix:
        """1 - a sigma0 (symbolic mode only)."""
        m = self.model.m
        return PolyMatrix.identity(m, m, 0) - self.projector()

    def _require_symbolic(self):
        if not self.symbolic:
            raise InvalidSigmaError("operation needs a symbolic (polynomial) sigma0")


def _exact_check(model: QuadraticModel, s0: PolyMatrix, s1: PolyMatrix) -> list[str]:
    a = model.a
    problems = []
    if not s0.is_symmetric():
        problems.append("sigma0 not symmetric")
    if not s1.is_symmetric():
        problems.append("sigma1 not symmetric")
    if a @ s0 @ a != a:
        problems.append("a sigma0 a != a")
    if s0 @ a @ s0 != s0:
        problems.append("sigma0 a sigma0 != sigma0")
    if not (a @ s1).is_zero():
        problems.append("a sigma1 != 0")
    if not (s1 @ a).is_zero():
        problems.append("sigma1 a != 0")
    return problems


def build_sigma(
    model: QuadraticModel,
    sigma1_choice: PolyMatrix | None = None,
    sigma0_override: PolyMatrix | None = None,
    tol: float = DEFAULT_TOL,
) -> SigmaSplit:
    """Construct the splitting maps for ``model``.

    Symbolic mode is used when ``a`` is constant (exact rational
    pseudoinverse) or when a verified ``sigma0_override`` is supplied.
    Otherwise sigma0 is evaluated pointwise with :func:`sym_pinv`.
    """
    m = model.m
    s1 = sigma1_choice if sigma1_choice is not None else PolyMatrix.zeros(m, m, m, 0)
    if s1.shape != (m, m):
        raise InvalidSigmaError(f"sigma1 must be {m}x{m}")
    s1 = s1.lift(m, 0)
    if not s1.is_symmetric():
        raise InvalidSigmaError("sigma1 not symmetric")
    if not (model.a @ s1).is_zero() or not (s1 @ model.a).is_zero():
        raise InvalidSigmaError("sigma1 must satisfy a sigma1 = sigma1 a = 0")

    if sigma0_override is not None:
        s0 = sigma0_override.lift(m, 0)
        problems = _exact_check(model, s0, s1)
        if problems:
            raise InvalidSigmaError("; ".join(problems))
        return SigmaSplit(model, s0, s1, True, tol)

    if model.a.is_constant():
        pinv = exact_pinv(model.a.constant_values())
        s0 = PolyMatrix.from_rows(pinv, num_q=m)
        return SigmaSplit(model, s0, s1, True, tol)

    return SigmaSplit(model, None, s1, False, tol)


def solve_connection(model: QuadraticModel, split: SigmaSplit, upsilon=None, tol: float = 1e-10) -> ReferenceFrame:
    """Gamma = -sigma0 b + upsilon, with a upsilon = 0 required.

    Raises
    ------
    InvalidOffsetError
        If ``upsilon`` is not in the kernel of ``a``.
    """
    m = model.m
    if upsilon is None:
        upsilon = [CoeffPoly.zero(m, 0)] * m
    ups = [u.lift(m, 0) if isinstance(u, CoeffPoly) else CoeffPoly.const(u, m, 0) for u in upsilon]
    if len(ups) != m:
        raise InvalidOffsetError(f"upsilon must have {m} components")
    a_ups = model.a.apply(ups)
    if not all(x.is_zero() for x in a_ups):
        raise InvalidOffsetError("upsilon is not in the kernel of a")
    split._require_symbolic()
    s0b = split.sigma0.apply(list(model.b))
    gamma = tuple(u - x for u, x in zip(ups, s0b))
    check = [x + y for x, y in zip(model.a.apply(list(gamma)), model.b)]
    if not all(x.is_zero() for x in check):
        raise InvalidOffsetError("a Gamma + b != 0; b is not in the image of a")
    return ReferenceFrame(gamma)


def velocity_split(split: SigmaSplit, model: QuadraticModel, t, q, qdot):
    """(S, F) with F = sigma0 (a qdot + b) and S = qdot - F."""
    v = np.asarray(qdot, dtype=float)
    f = split.sigma0_at(t, q) @ (model.a_at(t, q) @ v + model.b_at(t, q))
    return v - f, f


def momentum_split(split: SigmaSplit, model: QuadraticModel, t, q, p):
    """(R, P) with P = a sigma0 p and R = p - P."""
    p = np.asarray(p, dtype=float)
    pp = split.projector_at(t, q) @ p
    return p - pp, pp


def constraint_values(split: SigmaSplit, model: QuadraticModel, t, q, p) -> np.ndarray:
    return momentum_split(split, model, t, q, p)[0]


def constraint_polys(split: SigmaSplit) -> list[CoeffPoly]:
    """R_i = p_i - (a sigma0)_i^k p_k as phase-space polynomials (symbolic mode)."""
    m = split.model.m
    comp = split.complement().lift(m, m)
    ps = [CoeffPoly.var(f"p{i + 1}", m, m) for i in range(m)]
    return comp.apply(ps)


def c_prime(model: QuadraticModel, split: SigmaSplit):
    """c' = c - 1/2 b^T sigma0 b, so that L = 1/2 a F F + c'.

    Returns a :class:`CoeffPoly` in symbolic mode and a pointwise callable
    ``(t, q) -> float`` otherwise.
    """
    if split.symbolic:
        s0b = split.sigma0.apply(list(model.b))
        quad = CoeffPoly.zero(model.m, 0)
        for bi, x in zip(model.b, s0b):
            quad = quad + bi * x
        return model.c - quad * Fraction(1, 2)
    return lambda t, q: c_prime_at(model, split, t, q)


def c_prime_at(model: QuadraticModel, split: SigmaSplit, t, q) -> float:
    b = model.b_at(t, q)
    return model.c_at(t, q) - 0.5 * b @ split.sigma0_at(t, q) @ b


def split_identity_residuals(split: SigmaSplit, points) -> dict:
    """Max-norm residuals of the defining identities over a list of (t, q) points."""
    model = split.model
    m = model.m
    eye = np.eye(m)
    out = {
        "a_s0_a": 0.0,
        "s0_a_s0": 0.0,
        "s0_symmetric": 0.0,
        "a_s1": 0.0,
        "s1_a": 0.0,
        "P_idempotent": 0.0,
        "R_idempotent": 0.0,
        "b_in_image": 0.0,
    }
    for pt in points:
        t, q = pt[0], pt[1:]
        a = model.a_at(t, q)
        s0 = split.sigma0_at(t, q)
        s1 = split.sigma1_at(t, q)
        p = a @ s0
        r = eye - p
        b = model.b_at(t, q)
        vals = {
            "a_s0_a": a @ s0 @ a - a,
            "s0_a_s0": s0 @ a @ s0 - s0,
            "s0_symmetric": s0 - s0.T,
            "a_s1": a @ s1,
            "s1_a": s1 @ a,
            "P_idempotent": p @ p - p,
            "R_idempotent": r @ r - r,
            "b_in_image": r @ b,
        }
        for k, v in vals.items():
            out[k] = max(out[k], float(np.max(np.abs(v))) if v.size else 0.0)
    return out
