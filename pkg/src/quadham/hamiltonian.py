"""Canonical Poisson bracket on (t, q, p), quadratic Hamiltonian forms, flows and currents.

A Hamiltonian form is ``H = p_i dq^i - h dt``; only the scalar ``h`` is
stored. For a quadratic Lagrangian with splitting maps (sigma0, sigma1) and a
connection Gamma solving ``a Gamma + b = 0``::

    h = p_i Gamma^i + 1/2 sigma0^ij p_i p_j + sigma1^ij p_i p_j - c'
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import QuadraticModel, ReferenceFrame, default_grid
from .poly import CoeffPoly, SignatureError, as_fraction
from .split import SigmaSplit, c_prime

__all__ = [
    "InvalidFrameError",
    "HamiltonianForm",
    "ProjectableField",
    "poisson_v",
    "build_hamiltonian",
    "hamiltonian_from_poly",
    "hamiltonian_vector_field",
    "evolution",
    "extended_bracket",
    "current",
    "vertical_lie_bracket",
    "AssociationReport",
    "check_association",
]


class InvalidFrameError(ValueError):
    pass


def _dims(f: CoeffPoly) -> int:
    if f.num_q != f.num_p:
        raise SignatureError("phase-space polynomial needs num_q == num_p")
    return f.num_q


def poisson_v(f: CoeffPoly, g: CoeffPoly) -> CoeffPoly:
    """{f, g} = df/dp_i dg/dq^i - dg/dp_i df/dq^i."""
    m = _dims(f)
    f._check(g)
    out = CoeffPoly.zero(m, m)
    for i in range(1, m + 1):
        fp, gq = f.diff(f"p{i}"), g.diff(f"q{i}")
        if fp and gq:
            out = out + fp * gq
        gp, fq = g.diff(f"p{i}"), f.diff(f"q{i}")
        if gp and fq:
            out = out - gp * fq
    return out


@dataclass(frozen=True)
class HamiltonianForm:
    """H = p dq - h dt with ``hfun`` = h(t, q, p)."""

    hfun: CoeffPoly
    frame: ReferenceFrame | None = None
    split: SigmaSplit | None = None

    @property
    def m(self) -> int:
        return self.hfun.num_q

    def momentum_gradient(self) -> list[CoeffPoly]:
        return [self.hfun.diff(f"p{i + 1}") for i in range(self.m)]

    def position_gradient(self) -> list[CoeffPoly]:
        return [self.hfun.diff(f"q{i + 1}") for i in range(self.m)]


def hamiltonian_from_poly(h: CoeffPoly) -> HamiltonianForm:
    _dims(h)
    return HamiltonianForm(h)


def build_hamiltonian(model: QuadraticModel, split: SigmaSplit, frame: ReferenceFrame) -> HamiltonianForm:
    """The quadratic Hamiltonian form of ``model`` for the given splitting and connection.

    Raises
    ------
    InvalidFrameError
        If ``a Gamma + b`` is not identically zero.
    """
    m = model.m
    gamma = [g.lift(m, 0) for g in frame.gamma]
    if len(gamma) != m:
        raise InvalidFrameError(f"frame must have {m} components")
    residual = [x + y for x, y in zip(model.a.apply(gamma), model.b)]
    if not all(r.is_zero() for r in residual):
        raise InvalidFrameError("connection does not satisfy a Gamma + b = 0")
    split._require_symbolic()
    ps = [CoeffPoly.var(f"p{i + 1}", m, m) for i in range(m)]
    s0 = split.sigma0.lift(m, m)
    s1 = split.sigma1.lift(m, m)
    h = CoeffPoly.zero(m, m)
    for i in range(m):
        h = h + ps[i] * gamma[i].lift(m, m)
    half = Fraction(1, 2)
    for i in range(m):
        for j in range(m):
            w = s0[i, j] * half + s1[i, j]
            if w:
                h = h + w * ps[i] * ps[j]
    h = h - c_prime(model, split).lift(m, m)
    return HamiltonianForm(h, frame, split)


def hamiltonian_vector_field(H: HamiltonianForm):
    """Components ``(1, [dh/dp_i], [-dh/dq^i])`` of d_t + dh/dp_i d_i - dh/dq^i d^i."""
    return 1, H.momentum_gradient(), [-x for x in H.position_gradient()]


def evolution(f: CoeffPoly, H: HamiltonianForm) -> CoeffPoly:
    """Derivative of ``f`` along the Hamiltonian connection: d_t f + {h, f}."""
    return f.diff("t") + poisson_v(H.hfun, f)


def extended_bracket(f: CoeffPoly, H: HamiltonianForm) -> CoeffPoly:
    """Bracket of h* = p + h with the pull-back of ``f`` on the cotangent bundle.

    On T*Q with coordinates (t, q, p0, p), h* = p0 + h and the pull-back of f
    does not depend on p0, so the canonical bracket reduces to
    d_t f + {h, f}_V.
    """
    _dims(f)
    # {p0 + h, f}_T: the (t, p0) pair contributes d(p0 + h)/dp0 * df/dt = df/dt
    return f.diff("t") + poisson_v(H.hfun, f)


@dataclass(frozen=True)
class ProjectableField:
    """u = u^t d_t + u^i(t, q) d_i with constant u^t."""

    ut: Fraction
    components: tuple

    def __init__(self, ut, components: Sequence[CoeffPoly]):
        object.__setattr__(self, "ut", as_fraction(ut))
        object.__setattr__(self, "components", tuple(components))

    @property
    def vertical(self) -> bool:
        return self.ut == 0


def current(u: ProjectableField, H: HamiltonianForm) -> CoeffPoly:
    """J_u = p_i u^i - u^t h."""
    m = H.m
    if len(u.components) != m:
        raise SignatureError(f"field must have {m} components")
    j = CoeffPoly.zero(m, m)
    for i, ui in enumerate(u.components):
        if ui.degree("p") > 0:
            raise SignatureError("field components must not depend on momenta")
        j = j + CoeffPoly.var(f"p{i + 1}", m, m) * ui.lift(m, m)
    if u.ut:
        j = j - H.hfun * u.ut
    return j


def vertical_lie_bracket(u: Sequence[CoeffPoly], v: Sequence[CoeffPoly]) -> list[CoeffPoly]:
    """[u, v]^i = u^j d_j v^i - v^j d_j u^i for vertical fields."""
    m = len(u)
    out = []
    for i in range(m):
        acc = CoeffPoly.zero(*u[0].signature())
        for j in range(m):
            acc = acc + u[j] * v[i].diff(f"q{j + 1}") - v[j] * u[i].diff(f"q{j + 1}")
        out.append(acc)
    return out


@dataclass
class AssociationReport:
    mode: str
    max_residual: float
    points: int

    def to_dict(self):
        return {"mode": self.mode, "max_residual": self.max_residual, "points": self.points}


def default_momenta(m: int) -> list[tuple]:
    vecs = [tuple(int(i == j) for j in range(m)) for i in range(m)]
    vecs.append(tuple([1] * m))
    vecs.append(tuple((-1) ** j * (j + 1) for j in range(m)))
    return vecs


def check_association(
    model: QuadraticModel,
    split: SigmaSplit,
    H: HamiltonianForm,
    mode: str = "full",
    grid=None,
    momenta=None,
) -> AssociationReport:
    """Residual of h = p_i dh/dp_i - L(t, q, dh/dp) on sample points.

    ``mode="weak"`` projects each momentum sample onto the constraint space
    (p -> a sigma0 p) before evaluating; ``mode="full"`` uses the raw sample.
    Evaluation is exact over the rationals and converted to float at the end.
    """
    if mode not in ("weak", "full"):
        raise ValueError("mode must be 'weak' or 'full'")
    m = model.m
    grid = default_grid(model) if grid is None else list(grid)
    momenta = default_momenta(m) if momenta is None else [tuple(p) for p in momenta]
    grad = H.momentum_gradient()
    worst = Fraction(0)
    count = 0
    proj = split.projector() if split.symbolic else None
    for pt in grid:
        t = as_fraction(pt[0])
        q = [as_fraction(x) for x in pt[1:]]
        tq = (t, *q)
        a = [[model.a[i, j].evaluate_exact(tq) for j in range(m)] for i in range(m)]
        b = [f.evaluate_exact(tq) for f in model.b]
        c = model.c.evaluate_exact(tq)
        if mode == "weak":
            if proj is None:
                pm = split.projector_at(float(t), [float(x) for x in q])
                P = [[as_fraction(pm[i, j]) for j in range(m)] for i in range(m)]
            else:
                P = [[proj[i, j].evaluate_exact(tq) for j in range(m)] for i in range(m)]
        for p in momenta:
            p = [as_fraction(x) for x in p]
            if mode == "weak":
                p = [sum((P[i][k] * p[k] for k in range(m)), Fraction(0)) for i in range(m)]
            z = (t, *q, *p)
            v = [g.evaluate_exact(z) for g in grad]
            lag = (
                sum(a[i][j] * v[i] * v[j] for i in range(m) for j in range(m)) / 2
                + sum(b[i] * v[i] for i in range(m))
                + c
            )
            rhs = sum(p[i] * v[i] for i in range(m)) - lag
            worst = max(worst, abs(H.hfun.evaluate_exact(z) - rhs))
            count += 1
    return AssociationReport(mode, float(worst), count)
