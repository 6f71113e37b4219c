"""Koszul-Tate differential for the reducible constraints R = (1 - a sigma0) p.

With P = a sigma0 the differential acts on antighosts by::

    delta c[i,1]    = (1 - P)_i^k p_k
    delta c[i,2r]   = P_i^k c[k,2r-1]          r >= 1
    delta c[i,2r+1] = (1 - P)_i^k c[k,2r]      r >= 1

and is extended as an odd derivation; delta^2 = 0 follows from P^2 = P.
The BRST charge Q = sum cb[i,l] delta(c[i,l]) reproduces delta through the
ghost part of the super-bracket. Complex phases are absorbed into the ghost
normalization so every coefficient stays rational.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
import math
import random

from .graded import ANTIGHOST, Generator, GradedElement, antighost, ghost, left_derivative
from .linalg import exact_rank, subspace_intersection_dim
from .model import QuadraticModel
from .poly import CoeffPoly, PolyMatrix
from .split import InvalidSigmaError, SigmaSplit

__all__ = [
    "TruncationError",
    "KTComplex",
    "kt_delta",
    "check_nilpotency",
    "HomologyReport",
    "homology",
    "quotient_dimension_oracle",
    "brst_charge",
    "super_bracket",
    "verify_charge",
    "random_element",
]

NORMALIZATION_NOTE = "ghosts rescaled by a complex unit; all coefficients rational"


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class KTComplex:
    """The antighost tower truncated at level ``K`` for a symbolic splitting."""

    model: QuadraticModel
    split: SigmaSplit
    K: int = 4
    images: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.K < 1:
            raise TruncationError("truncation K must be >= 1")
        if not self.split.symbolic:
            raise InvalidSigmaError("Koszul-Tate complex needs a polynomial sigma0")
        object.__setattr__(self, "images", self._generator_images())

    @property
    def m(self) -> int:
        return self.model.m

    def projector(self) -> PolyMatrix:
        return self.split.projector().lift(self.m, self.m)

    def _generator_images(self) -> dict:
        m = self.m
        P = self.projector()
        one = PolyMatrix.identity(m, m, m)
        comp = one - P
        ps = [CoeffPoly.var(f"p{i + 1}", m, m) for i in range(m)]
        R = comp.apply(ps)
        images = {}
        for i in range(m):
            images[antighost(i + 1, 1)] = GradedElement.scalar(R[i], m)
        for lvl in range(2, self.K + 1):
            mat = P if lvl % 2 == 0 else comp
            for i in range(m):
                acc = GradedElement.zero(m)
                for k in range(m):
                    if mat[i, k]:
                        acc = acc + GradedElement.generator(antighost(k + 1, lvl - 1), m) * mat[i, k]
                images[antighost(i + 1, lvl)] = acc
        return images

    def antighosts(self) -> list[Generator]:
        return [antighost(i + 1, lvl) for lvl in range(1, self.K + 1) for i in range(self.m)]

    def ghosts(self) -> list[Generator]:
        return [ghost(i + 1, lvl) for lvl in range(1, self.K + 1) for i in range(self.m)]

    def constraints(self) -> list[CoeffPoly]:
        return [self.images[antighost(i + 1, 1)].coefficient() for i in range(self.m)]

    def irreducible(self, at=None) -> bool:
        """True when the nonzero constraints R_i are linearly independent.

        Only meaningful fibrewise, so the projector is evaluated at ``at``
        (a (t, q) point) unless it is constant.
        """
        comp = _frozen_values(PolyMatrix.identity(self.m, self.m, self.m) - self.projector(), at)
        rows = [r for r in comp if any(r)]
        return exact_rank(rows) == len(rows)


def _frozen_values(mat: PolyMatrix, at=None):
    m = mat.rows
    if at is None:
        if not mat.is_constant():
            raise TruncationError("matrix depends on (t, q); pass a point to freeze it")
        return mat.constant_values()
    pt = (*at, *([0] * mat.num_p))
    return [[mat[i, j].evaluate_exact(pt) for j in range(mat.cols)] for i in range(m)]


def _check_element(x: GradedElement, cx: KTComplex):
    for g in x.generators():
        if g.kind != ANTIGHOST:
            raise TruncationError(f"delta is defined on antighosts only, got {g}")
        if g.level > cx.K:
            raise TruncationError(f"generator {g} above truncation K={cx.K}")
        if g.index > cx.m:
            raise TruncationError(f"generator {g} outside dimension {cx.m}")


def kt_delta(x: GradedElement, cx: KTComplex) -> GradedElement:
    """delta(x) = sum_g delta(g) * d_L x / d g (odd left derivation)."""
    _check_element(x, cx)
    out = GradedElement.zero(cx.m)
    for g in sorted(x.generators(), key=Generator.sort_key):
        d = left_derivative(x, g)
        if d:
            out = out + cx.images[g] * d
    return out


@dataclass
class NilpotencyReport:
    generators_checked: int
    random_checked: int
    counterexamples: list

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_dict(self):
        return {
            "generators_checked": self.generators_checked,
            "random_checked": self.random_checked,
            "counterexamples": self.counterexamples,
            "pass": self.ok,
        }


def random_element(
    cx: KTComplex, rng: random.Random, n_terms: int = 3, max_factors: int = 3, coeff_degree: int = 3
) -> GradedElement:
    """A random antighost polynomial with (t, q, p) coefficients of degree <= coeff_degree."""
    m = cx.m
    gens = cx.antighosts()
    x = GradedElement.zero(m)
    for _ in range(n_terms):
        mono = GradedElement.scalar(_random_poly(rng, m, coeff_degree), m)
        for _ in range(rng.randint(1, max_factors)):
            mono = mono * GradedElement.generator(rng.choice(gens), m)
        x = x + mono
    return x


def _random_poly(rng: random.Random, m: int, degree: int, n_terms: int = 3, momenta_only=False) -> CoeffPoly:
    nv = 1 + 2 * m
    terms = {}
    for _ in range(n_terms):
        e = [0] * nv
        for _ in range(rng.randint(0, degree)):
            idx = rng.randrange(1 + m, nv) if momenta_only else rng.randrange(nv)
            e[idx] += 1
        terms[tuple(e)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return CoeffPoly(terms, m, m)


def check_nilpotency(cx: KTComplex, trials: int = 20, seed: int = 0) -> NilpotencyReport:
    """delta(delta(x)) == 0 exactly on every generator and on random elements."""
    bad = []
    for g in cx.antighosts():
        dd = kt_delta(kt_delta(GradedElement.generator(g, cx.m), cx), cx)
        if dd:
            bad.append({"element": str(g), "delta2": str(dd)})
    rng = random.Random(seed)
    for _ in range(trials):
        x = random_element(cx, rng)
        dd = kt_delta(kt_delta(x, cx), cx)
        if dd:
            bad.append({"element": str(x), "delta2": str(dd)})
    return NilpotencyReport(len(cx.antighosts()), trials, bad)


# homology


def _antighost_monomials(m: int, K: int, number: int):
    """Normal-ordered antighost monomials with the given antighost number."""
    gens = sorted((antighost(i + 1, lvl) for lvl in range(1, K + 1) for i in range(m)), key=Generator.sort_key)
    out = []

    def rec(start, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for j in range(start, len(gens)):
            g = gens[j]
            if g.level > remaining:
                continue
            max_n = 1 if g.odd else remaining // g.level
            for n in range(max_n, 0, -1):
                acc.append((g, n))
                rec(j + 1, remaining - n * g.level, acc)
                acc.pop()

    rec(0, number, [])
    return out


def _p_monomials(m: int, degree: int):
    """Exponent vectors over (t, q, p) with only p-exponents, total degree == degree."""
    out = []
    for combo in combinations_with_replacement(range(m), degree):
        e = [0] * (1 + 2 * m)
        for i in combo:
            e[1 + m + i] += 1
        out.append(tuple(e))
    return out


def _factor_count(mono) -> int:
    return sum(n for _, n in mono)


def _basis(m, K, k, weight):
    """Basis (p-exponent, monomial) of antighost number k and total weight."""
    out = []
    for mono in _antighost_monomials(m, K, k):
        d = weight - _factor_count(mono)
        if d < 0:
            continue
        for e in _p_monomials(m, d):
            out.append((e, mono))
    return out


@dataclass
class HomologyReport:
    k: int
    D: int
    cycles: int
    boundaries: int
    h_dim: int
    complete: bool
    max_witness_p_degree: int

    def to_dict(self):
        return {
            "k": self.k,
            "D": self.D,
            "cycles": self.cycles,
            "boundaries": self.boundaries,
            "h_dim": self.h_dim,
            "complete": self.complete,
            "max_witness_p_degree": self.max_witness_p_degree,
        }


def _frozen_complex(cx: KTComplex, at):
    if at is None:
        if not cx.projector().is_constant():
            raise TruncationError("projector depends on (t, q); pass a point to freeze it")
        return cx
    from .split import build_sigma

    m = cx.m
    pt = tuple(at)
    a = PolyMatrix.from_rows([[cx.model.a[i, j].evaluate_exact(pt) for j in range(m)] for i in range(m)], num_q=m)
    s0 = PolyMatrix.from_rows(
        [[cx.split.sigma0[i, j].evaluate_exact(pt) for j in range(m)] for i in range(m)], num_q=m
    )
    model = QuadraticModel(m, a, tuple([0] * m), 0)
    return KTComplex(model, build_sigma(model, sigma0_override=s0), cx.K)


def homology(cx: KTComplex, k: int, D: int, at=None) -> HomologyReport:
    """Dimensions of cycles, boundaries and H_k on elements of p-degree <= D.

    The complex is computed fibrewise: coefficients are polynomials in p only,
    with (t, q) frozen (the projector must be constant, or ``at`` given).
    delta preserves the weight (p-degree + number of antighost factors), so
    boundaries are found weight by weight using every witness of that weight;
    the witness space is therefore complete whenever k + 1 <= K.
    """
    if k < 0 or D < 0:
        raise TruncationError("k and D must be non-negative")
    if k + 1 > cx.K:
        raise TruncationError(f"need k + 1 <= K (k={k}, K={cx.K})")
    cx = _frozen_complex(cx, at)
    m = cx.m

    def vec_of(x: GradedElement, index):
        v = {}
        for mono, c in x.items():
            for e, val in c.items():
                v[index[(e, mono)]] = val
        return v

    def element(e, mono):
        x = GradedElement.scalar(CoeffPoly._raw({e: Fraction(1)}, m, m), m)
        for g, n in mono:
            for _ in range(n):
                x = x * GradedElement.generator(g, m)
        return x

    mono_min = min((_factor_count(mn) for mn in _antighost_monomials(m, cx.K, k)), default=0)
    mono_max = max((_factor_count(mn) for mn in _antighost_monomials(m, cx.K, k)), default=0)
    cycles = 0
    boundaries = 0
    max_wit = 0
    for w in range(mono_min, mono_max + D + 1):
        full = _basis(m, cx.K, k, w)
        if not full:
            continue
        index = {be: j for j, be in enumerate(full)}
        allowed = [j for j, (e, _) in enumerate(full) if sum(e) <= D]
        if not allowed:
            continue
        # cycles inside the bounded part
        n_allowed = len(allowed)
        if k == 0:
            cycles += n_allowed
        else:
            lower = _basis(m, cx.K, k - 1, w)
            lindex = {be: j for j, be in enumerate(lower)}
            rows = [vec_of(kt_delta(element(*full[j]), cx), lindex) for j in allowed]
            cycles += n_allowed - exact_rank(rows)
        # boundaries: image of every weight-w witness, intersected with the bounded part
        witnesses = _basis(m, cx.K, k + 1, w)
        images = [vec_of(kt_delta(element(e, mono), cx), index) for e, mono in witnesses]
        images = [v for v in images if v]
        if images:
            b = subspace_intersection_dim(images, allowed)
            if b:
                max_wit = max(max_wit, max(sum(e) for e, _ in witnesses))
            boundaries += b
    return HomologyReport(k, D, cycles, boundaries, cycles - boundaries, k + 1 <= cx.K, max_wit)


def quotient_dimension_oracle(cx: KTComplex, D: int, seed: int = 0, at=None) -> int:
    """dim of p-polynomials of degree <= D restricted to N_L, by point evaluation.

    Independent of delta: evaluates every monomial at random rational points
    p = P x of the constraint space and returns the exact rank of the
    evaluation matrix.
    """
    m = cx.m
    P = cx.projector()
    point = tuple(at) if at is not None else (0,) * (1 + m)
    Pv = [[P[i, j].evaluate_exact((*point, *([0] * m))) for j in range(m)] for i in range(m)]
    monos = [e for d in range(D + 1) for e in _p_monomials(m, d)]
    rng = random.Random(seed)
    npts = 2 * len(monos) + 5
    rows = []
    for _ in range(npts):
        x = [Fraction(rng.randint(-50, 50), rng.randint(1, 7)) for _ in range(m)]
        p = [sum((Pv[i][j] * x[j] for j in range(m)), Fraction(0)) for i in range(m)]
        rows.append([math.prod(p[i] ** e[1 + m + i] for i in range(m)) for e in monos])
    return exact_rank(rows)


# BRST charge and super-bracket


def brst_charge(cx: KTComplex) -> GradedElement:
    """Q = sum over levels l <= K of cb[i,l] * delta(c[i,l])."""
    m = cx.m
    Q = GradedElement.zero(m)
    for g in cx.antighosts():
        Q = Q + GradedElement.generator(ghost(g.index, g.level), m) * cx.images[g]
    return Q


def super_bracket(x: GradedElement, y: GradedElement, cx: KTComplex | None = None) -> GradedElement:
    """Graded Poisson bracket pairing cb[i,k] with c[i,k].

    {x, y} = sum (-1)^(k|x|) [ (-1)^k dx/dcb dy/dc - dx/dc dy/dcb ]
    with left derivatives. Phase-space coefficients are inert: the bracket of
    the vertically extended phase space involves only dotted variables, on
    which no element here depends.
    """
    if x.m != y.m:
        raise ValueError("dimension mismatch")
    m = x.m
    gens = x.generators() | y.generators()
    pairs = {(g.index, g.level) for g in gens}
    if cx is not None:
        for i, lvl in pairs:
            if lvl > cx.K:
                raise TruncationError(f"level {lvl} above truncation K={cx.K}")
    out = GradedElement.zero(m)
    for px, xpart in _parity_parts(x):
        for i, lvl in sorted(pairs):
            a, c = antighost(i, lvl), ghost(i, lvl)
            term = GradedElement.zero(m)
            dx_ghost, dy_anti = left_derivative(xpart, c), left_derivative(y, a)
            if dx_ghost and dy_anti:
                t1 = dx_ghost * dy_anti
                term = term + (t1 if lvl % 2 == 0 else -t1)
            dx_anti, dy_ghost = left_derivative(xpart, a), left_derivative(y, c)
            if dx_anti and dy_ghost:
                term = term - dx_anti * dy_ghost
            if lvl % 2 and px:
                term = -term
            out = out + term
    return out


def _parity_parts(x: GradedElement):
    parts = {0: {}, 1: {}}
    for mono, c in x.items():
        parts[sum(n for g, n in mono if g.odd) % 2][mono] = c
    return [(p, GradedElement(t, x.m)) for p, t in parts.items() if t]


@dataclass
class ChargeReport:
    generators_checked: int
    random_checked: int
    mismatches: list
    normalization: str = NORMALIZATION_NOTE

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self):
        return {
            "generators_checked": self.generators_checked,
            "random_checked": self.random_checked,
            "mismatches": self.mismatches,
            "normalization": self.normalization,
            "pass": self.ok,
        }


def verify_charge(cx: KTComplex, trials: int = 10, seed: int = 0) -> ChargeReport:
    """{Q, x} == delta(x) exactly on generators and random antighost elements."""
    Q = brst_charge(cx)
    bad = []
    for g in cx.antighosts():
        x = GradedElement.generator(g, cx.m)
        lhs, rhs = super_bracket(Q, x, cx), kt_delta(x, cx)
        if lhs != rhs:
            bad.append({"element": str(x), "bracket": str(lhs), "delta": str(rhs)})
    rng = random.Random(seed)
    for _ in range(trials):
        x = random_element(cx, rng)
        lhs, rhs = super_bracket(Q, x, cx), kt_delta(x, cx)
        if lhs != rhs:
            bad.append({"element": str(x), "bracket": str(lhs), "delta": str(rhs)})
    return ChargeReport(len(cx.antighosts()), trials, bad)
