"""Graded-commutative algebra of BRST functions over phase space.

Generators are antighosts ``c[i,k]`` and ghosts ``cb[i,k]`` (index i, level
k >= 1) with Grassmann parity ``k mod 2``. Monomials are stored in normal
order (ghosts before antighosts, then by level, then by index); odd
generators appear at most once. Coefficients are phase-space
:class:`~quadham.poly.CoeffPoly` and are even.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .poly import CoeffPoly, as_fraction

__all__ = [
    "Generator",
    "GradedElement",
    "antighost",
    "ghost",
    "graded_mul",
    "left_derivative",
]

ANTIGHOST = "c"
GHOST = "cb"


class Generator(NamedTuple):
    kind: str
    index: int
    level: int

    @property
    def parity(self) -> int:
        return self.level % 2

    @property
    def odd(self) -> bool:
        return bool(self.level % 2)

    def sort_key(self):
        return (0 if self.kind == GHOST else 1, self.level, self.index)

    def __str__(self):
        return f"{self.kind}[{self.index},{self.level}]"


def antighost(index: int, level: int) -> Generator:
    if index < 1 or level < 1:
        raise ValueError("index and level start at 1")
    return Generator(ANTIGHOST, index, level)


def ghost(index: int, level: int) -> Generator:
    if index < 1 or level < 1:
        raise ValueError("index and level start at 1")
    return Generator(GHOST, index, level)


# A monomial is a tuple of (Generator, multiplicity) pairs in normal order.


def _mono_parity(mono) -> int:
    return sum(n for g, n in mono if g.odd) % 2


def _mono_mul(a, b):
    """Normal-ordered product of two monomials: (sign, monomial) or (0, None)."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    sign = 1
    odd_a = [g.sort_key() for g, _ in a if g.odd]
    for g, _ in b:
        if not g.odd:
            continue
        gk = g.sort_key()
        # every odd factor of ``a`` sorting after g must be passed
        passed = 0
        for k in odd_a:
            if k == gk:
                return 0, None
            if k > gk:
                passed += 1
        if passed % 2:
            sign = -sign
    merged = dict(a)
    for g, n in b:
        merged[g] = merged.get(g, 0) + n
    mono = tuple(sorted(merged.items(), key=lambda gn: gn[0].sort_key()))
    return sign, mono


class GradedElement:
    """Finite sum of coefficient x normal-ordered generator monomial."""

    __slots__ = ("_terms", "m")

    def __init__(self, terms=None, m: int = 1):
        self.m = m
        clean = {}
        for mono, c in (terms or {}).items():
            if not isinstance(c, CoeffPoly):
                c = CoeffPoly.const(c, m, m)
            if c:
                mono = tuple(mono)
                for g, n in mono:
                    if g.odd and n > 1:
                        break
                else:
                    prev = clean.get(mono)
                    c = c if prev is None else prev + c
                    if c:
                        clean[mono] = c
                    else:
                        clean.pop(mono, None)
        self._terms = clean

    @classmethod
    def _raw(cls, terms, m):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj.m = m
        return obj

    @classmethod
    def scalar(cls, f, m: int) -> "GradedElement":
        if not isinstance(f, CoeffPoly):
            f = CoeffPoly.const(f, m, m)
        return cls._raw({(): f} if f else {}, m)

    @classmethod
    def generator(cls, g: Generator, m: int) -> "GradedElement":
        if not 1 <= g.index <= m:
            raise ValueError(f"generator index {g.index} outside 1..{m}")
        return cls._raw({((g, 1),): CoeffPoly.const(1, m, m)}, m)

    @classmethod
    def zero(cls, m: int) -> "GradedElement":
        return cls._raw({}, m)

    # inspection

    def items(self):
        return self._terms.items()

    @property
    def terms(self):
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def generators(self) -> set:
        return {g for mono in self._terms for g, _ in mono}

    def parity(self) -> int:
        """Grassmann parity; raises if the element mixes parities."""
        ps = {_mono_parity(mono) for mono in self._terms}
        if len(ps) > 1:
            raise ValueError("element is not homogeneous in parity")
        return ps.pop() if ps else 0

    def antighost_numbers(self) -> set:
        return {sum(g.level * n for g, n in mono if g.kind == ANTIGHOST) for mono in self._terms}

    def ghost_numbers(self) -> set:
        return {sum(g.level * n for g, n in mono if g.kind == GHOST) for mono in self._terms}

    def coefficient(self, mono=()) -> CoeffPoly:
        return self._terms.get(tuple(mono), CoeffPoly.zero(self.m, self.m))

    # arithmetic

    def _coerce(self, other) -> "GradedElement":
        if isinstance(other, GradedElement):
            if other.m != self.m:
                raise ValueError("dimension mismatch")
            return other
        return GradedElement.scalar(other, self.m)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            v = out[mono] + c if mono in out else c
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
        return GradedElement._raw(out, self.m)

    __radd__ = __add__

    def __neg__(self):
        return GradedElement._raw({k: -v for k, v in self._terms.items()}, self.m)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (CoeffPoly, int, Fraction)):
            if isinstance(other, CoeffPoly):
                c = other
            else:
                c = CoeffPoly.const(as_fraction(other), self.m, self.m)
            out = {}
            for mono, v in self._terms.items():
                w = v * c
                if w:
                    out[mono] = w
            return GradedElement._raw(out, self.m)
        return graded_mul(self, self._coerce(other))

    def __rmul__(self, other):
        # scalars are even, so they commute with everything
        return self.__mul__(other)

    def __eq__(self, other):
        if isinstance(other, GradedElement):
            return self.m == other.m and self._terms == other._terms
        if isinstance(other, (int, Fraction, CoeffPoly)):
            return self == GradedElement.scalar(other, self.m)
        return NotImplemented

    def __hash__(self):
        return hash((self.m, frozenset(self._terms.items())))

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for mono in sorted(self._terms, key=_mono_sort_key):
            c = self._terms[mono]
            factors = "*".join(f"{g}^{n}" for g, n in mono)
            cs = str(c)
            if not factors:
                parts.append(cs)
                continue
            if c == 1:
                parts.append(factors)
            elif c == -1:
                parts.append(f"-{factors}")
            elif len(c) == 1:
                parts.append(f"{cs}*{factors}")
            else:
                parts.append(f"({cs})*{factors}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"GradedElement({self})"


def _mono_sort_key(mono):
    return tuple((g.sort_key(), n) for g, n in mono)


def graded_mul(x: GradedElement, y: GradedElement) -> GradedElement:
    """Product with Koszul signs; odd generators square to zero."""
    if x.m != y.m:
        raise ValueError("dimension mismatch")
    m = x.m
    out: dict = {}
    for ma, ca in x._terms.items():
        for mb, cb in y._terms.items():
            sign, mono = _mono_mul(ma, mb)
            if not sign:
                continue
            c = ca * cb
            if sign < 0:
                c = -c
            prev = out.get(mono)
            out[mono] = c if prev is None else prev + c
    return GradedElement._raw({k: v for k, v in out.items() if v}, m)


def left_derivative(x: GradedElement, g: Generator) -> GradedElement:
    """Graded left derivative d/dg.

    For odd ``g`` the factor is removed with sign (-1)^(odd factors to its
    left); for even ``g`` the multiplicity comes down as a factor.
    """
    out: dict = {}
    m = x.m
    for mono, c in x._terms.items():
        sign = 1
        new = None
        for pos, (h, n) in enumerate(mono):
            if h == g:
                if g.odd:
                    new = mono[:pos] + mono[pos + 1 :]
                    coeff = c if sign > 0 else -c
                else:
                    rest = ((h, n - 1),) if n > 1 else ()
                    new = mono[:pos] + rest + mono[pos + 1 :]
                    coeff = c * n
                break
            if h.odd:
                sign = -sign
        if new is None:
            continue
        prev = out.get(new)
        out[new] = coeff if prev is None else prev + coeff
    return GradedElement._raw({k: v for k, v in out.items() if v}, m)
