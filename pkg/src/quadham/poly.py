"""Exact multivariate polynomials in (t, q^1..q^m, p_1..p_m) with rational coefficients.

Variables are always ordered ``t, q1..qm, p1..pm``; an exponent vector has
length ``1 + num_q + num_p``. Configuration-space functions (the coefficients
of a Lagrangian) use ``num_p = 0`` and are lifted to phase space with
:meth:`CoeffPoly.lift`.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
import re

import numpy as np

__all__ = [
    "CoeffPoly",
    "PolyMatrix",
    "SignatureError",
    "as_fraction",
    "phase_space",
    "poly_arith",
    "differentiate",
    "evaluate",
    "substitute",
]


class SignatureError(ValueError):
    """Operands do not live on the same variable set, or a variable is unknown."""


def as_fraction(x) -> Fraction:
    """Convert an int, Fraction, rational string or float to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x)).limit_denominator(10**12)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


_VAR_RE = re.compile(r"^(t|q(\d+)|p(\d+))$")


class CoeffPoly:
    """Immutable sparse polynomial with Fraction coefficients.

    Parameters
    ----------
    terms : dict, optional
        Mapping exponent tuple -> coefficient. Zero coefficients are dropped.
    num_q, num_p : int
        Number of configuration and momentum variables.
    """

    __slots__ = ("_terms", "num_q", "num_p", "_hash")

    def __init__(self, terms=None, num_q: int = 0, num_p: int = 0):
        self.num_q = int(num_q)
        self.num_p = int(num_p)
        n = self.nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(k) for k in e)
                if len(e) != n:
                    raise SignatureError(
                        f"exponent vector {e} has length {len(e)}, expected {n}"
                    )
                if any(k < 0 for k in e):
                    raise ValueError(f"negative exponent in {e}")
                c = as_fraction(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
                    if not clean[e]:
                        del clean[e]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms, num_q, num_p):
        # trusted constructor: terms already normalized
        obj = cls.__new__(cls)
        obj._terms = terms
        obj.num_q = num_q
        obj.num_p = num_p
        obj._hash = None
        return obj

    # construction helpers

    @classmethod
    def zero(cls, num_q=0, num_p=0):
        return cls._raw({}, num_q, num_p)

    @classmethod
    def const(cls, value, num_q=0, num_p=0):
        c = as_fraction(value)
        n = 1 + num_q + num_p
        return cls._raw({(0,) * n: c} if c else {}, num_q, num_p)

    @classmethod
    def var(cls, name, num_q=0, num_p=0):
        """The coordinate function named ``name`` (``"t"``, ``"q2"``, ``"p1"``...)."""
        probe = cls._raw({}, num_q, num_p)
        idx = probe.var_index(name)
        e = [0] * probe.nvars
        e[idx] = 1
        return cls._raw({tuple(e): Fraction(1)}, num_q, num_p)

    # introspection

    @property
    def nvars(self) -> int:
        return 1 + self.num_q + self.num_p

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def var_names(self) -> list[str]:
        return (
            ["t"]
            + [f"q{i + 1}" for i in range(self.num_q)]
            + [f"p{i + 1}" for i in range(self.num_p)]
        )

    def var_index(self, var) -> int:
        """Position of ``var`` in the exponent vector.

        ``var`` may be a name (``"t"``, ``"q1"``, ``"p2"``) or a raw index.
        """
        if isinstance(var, (int, np.integer)):
            if not 0 <= var < self.nvars:
                raise SignatureError(f"variable index {var} out of range")
            return int(var)
        m = _VAR_RE.match(str(var))
        if m is None:
            raise SignatureError(f"unknown variable {var!r}")
        if m.group(1) == "t":
            return 0
        if m.group(2) is not None:
            i = int(m.group(2))
            if not 1 <= i <= self.num_q:
                raise SignatureError(f"{var} not in signature (num_q={self.num_q})")
            return i
        i = int(m.group(3))
        if not 1 <= i <= self.num_p:
            raise SignatureError(f"{var} not in signature (num_p={self.num_p})")
        return self.num_q + i

    def signature(self) -> tuple[int, int]:
        return (self.num_q, self.num_p)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def degree(self, block: str = "all") -> int:
        """Total degree, or the degree in ``"t"``, ``"q"`` or ``"p"`` only."""
        if not self._terms:
            return -1
        sl = {
            "all": slice(None),
            "t": slice(0, 1),
            "q": slice(1, 1 + self.num_q),
            "p": slice(1 + self.num_q, None),
        }[block]
        return max(sum(e[sl]) for e in self._terms)

    def depends_on(self, var) -> bool:
        i = self.var_index(var)
        return any(e[i] for e in self._terms)

    # signature changes

    def lift(self, num_q=None, num_p=None) -> "CoeffPoly":
        """Embed into a signature with at least as many q/p variables."""
        nq = self.num_q if num_q is None else num_q
        np_ = self.num_p if num_p is None else num_p
        if nq < self.num_q or np_ < self.num_p:
            raise SignatureError("lift cannot drop variables")
        if (nq, np_) == (self.num_q, self.num_p):
            return self
        padq = (0,) * (nq - self.num_q)
        padp = (0,) * (np_ - self.num_p)
        out = {}
        for e, c in self._terms.items():
            out[e[: 1 + self.num_q] + padq + e[1 + self.num_q :] + padp] = c
        return CoeffPoly._raw(out, nq, np_)

    def drop_momenta(self) -> "CoeffPoly":
        """Restrict the signature to (t, q); fails if any p-variable occurs."""
        if self.degree("p") > 0:
            raise SignatureError("polynomial depends on momenta")
        k = 1 + self.num_q
        return CoeffPoly._raw({e[:k]: c for e, c in self._terms.items()}, self.num_q, 0)

    # arithmetic

    def _check(self, other: "CoeffPoly"):
        if (self.num_q, self.num_p) != (other.num_q, other.num_p):
            raise SignatureError(
                f"signature mismatch {(self.num_q, self.num_p)} vs {(other.num_q, other.num_p)}"
            )

    def _coerce(self, other) -> "CoeffPoly":
        if isinstance(other, CoeffPoly):
            self._check(other)
            return other
        return CoeffPoly.const(other, self.num_q, self.num_p)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return CoeffPoly._raw(out, self.num_q, self.num_p)

    __radd__ = __add__

    def __neg__(self):
        return CoeffPoly._raw({e: -c for e, c in self._terms.items()}, self.num_q, self.num_p)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CoeffPoly):
            try:
                c = as_fraction(other)
            except TypeError:
                return NotImplemented
            if not c:
                return CoeffPoly.zero(self.num_q, self.num_p)
            return CoeffPoly._raw(
                {e: v * c for e, v in self._terms.items()}, self.num_q, self.num_p
            )
        self._check(other)
        out: dict = {}
        get = out.get
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple([a + b for a, b in zip(e1, e2)])
                out[e] = get(e, 0) + c1 * c2
        out = {e: c for e, c in out.items() if c}
        return CoeffPoly._raw(out, self.num_q, self.num_p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_fraction(other)
        return self * (1 / c)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = CoeffPoly.const(1, self.num_q, self.num_p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, CoeffPoly):
            return (
                self.num_q == other.num_q
                and self.num_p == other.num_p
                and self._terms == other._terms
            )
        try:
            c = as_fraction(other)
        except TypeError:
            return NotImplemented
        return self._terms == ({(0,) * self.nvars: c} if c else {})

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_q, self.num_p, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # calculus and evaluation

    def diff(self, var) -> "CoeffPoly":
        i = self.var_index(var)
        out = {}
        for e, c in self._terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1 :]
                out[ne] = c * k
        return CoeffPoly._raw(out, self.num_q, self.num_p)

    def _point_tuple(self, point):
        n = self.nvars
        if isinstance(point, dict):
            names = self.var_names()
            missing = [v for v in names if v not in point and self.depends_on(v)]
            if missing:
                raise ValueError(f"missing coordinates: {', '.join(missing)}")
            return tuple(point.get(v, 0) for v in names)
        pt = tuple(point)
        if len(pt) != n:
            raise ValueError(f"point has {len(pt)} coordinates, expected {n}")
        return pt

    def evaluate_exact(self, point) -> Fraction:
        pt = tuple(as_fraction(x) for x in self._point_tuple(point))
        total = Fraction(0)
        for e, c in self._terms.items():
            v = c
            for x, k in zip(pt, e):
                if k:
                    v *= x**k
            total += v
        return total

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (dict, list, tuple, np.ndarray)):
            point = point[0]
        pt = self._point_tuple(point)
        total = 0.0
        for e, c in self._terms.items():
            v = float(c)
            for x, k in zip(pt, e):
                if k:
                    v *= float(x) ** k
            total += v
        return total

    def substitute(self, assignments: dict) -> "CoeffPoly":
        """Replace variables by polynomials of the same signature."""
        repl = {}
        for var, g in assignments.items():
            if not isinstance(g, CoeffPoly):
                g = CoeffPoly.const(g, self.num_q, self.num_p)
            self._check(g)
            repl[self.var_index(var)] = g
        if not repl:
            return self
        powers: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = repl[i] ** k
            return powers[key]

        out = CoeffPoly.zero(self.num_q, self.num_p)
        for e, c in self._terms.items():
            kept = tuple(0 if i in repl else k for i, k in enumerate(e))
            term = CoeffPoly._raw({kept: c}, self.num_q, self.num_p)
            for i, k in enumerate(e):
                if k and i in repl:
                    term = term * power(i, k)
            out = out + term
        return out

    # encoding

    def to_literal(self) -> list[dict]:
        out = []
        for e in sorted(self._terms):
            c = self._terms[e]
            out.append({"coeff": _frac_str(c), "exps": list(e)})
        return out

    @classmethod
    def from_literal(cls, lit, num_q, num_p=0) -> "CoeffPoly":
        """Decode ``[{"coeff": "p/q", "exps": [...]}, ...]``; bare numbers are constants."""
        if isinstance(lit, (int, float, str, Fraction)):
            return cls.const(as_fraction(lit), num_q, num_p)
        terms: dict = {}
        n = 1 + num_q + num_p
        for item in lit:
            exps = tuple(item["exps"])
            if len(exps) != n:
                raise SignatureError(f"literal exps {list(exps)} must have length {n}")
            c = as_fraction(item["coeff"])
            terms[exps] = terms.get(exps, 0) + c
        return cls(terms, num_q, num_p)

    def __str__(self):
        if not self._terms:
            return "0"
        names = self.var_names()
        parts = []
        for e in sorted(self._terms, key=lambda e: (-sum(e), tuple(-k for k in e))):
            c = self._terms[e]
            mono = "*".join(
                (n if k == 1 else f"{n}^{k}") for n, k in zip(names, e) if k
            )
            sign = "-" if c < 0 else ""
            cs = _frac_str(abs(c))
            if not mono:
                parts.append(f"{sign}({cs})" if "/" in cs else f"{sign}{cs}")
            elif abs(c) == 1:
                parts.append(f"{sign}{mono}")
            elif "/" in cs:
                parts.append(f"{sign}({cs})*{mono}")
            else:
                parts.append(f"{sign}{cs}*{mono}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    def __repr__(self):
        return f"CoeffPoly({self}; num_q={self.num_q}, num_p={self.num_p})"


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def phase_space(m: int, momenta: bool = True):
    """Coordinate functions ``(t, [q1..qm], [p1..pm])`` for a signature of dimension m."""
    num_p = m if momenta else 0
    t = CoeffPoly.var("t", m, num_p)
    qs = [CoeffPoly.var(f"q{i + 1}", m, num_p) for i in range(m)]
    ps = [CoeffPoly.var(f"p{i + 1}", m, num_p) for i in range(num_p)]
    return t, qs, ps


def poly_arith(lhs: CoeffPoly, rhs: CoeffPoly, kind: str) -> CoeffPoly:
    lhs._check(rhs)
    if kind == "add":
        return lhs + rhs
    if kind == "sub":
        return lhs - rhs
    if kind == "mul":
        return lhs * rhs
    raise ValueError(f"unknown operation {kind!r}")


def differentiate(f: CoeffPoly, var) -> CoeffPoly:
    return f.diff(var)


def evaluate(f: CoeffPoly, point) -> float:
    return float(f.evaluate_exact(point))


def substitute(f: CoeffPoly, assignments: dict) -> CoeffPoly:
    return f.substitute(assignments)


class PolyMatrix:
    """Dense rows x cols matrix of :class:`CoeffPoly` entries sharing one signature."""

    __slots__ = ("rows", "cols", "entries", "num_q", "num_p")

    def __init__(self, rows: int, cols: int, entries, num_q=None, num_p=None):
        entries = list(entries)
        if rows <= 0 or cols <= 0:
            raise ValueError("matrix dimensions must be positive")
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        sig = None
        for e in entries:
            if isinstance(e, CoeffPoly):
                sig = e.signature()
                break
        if sig is None:
            sig = (num_q or 0, num_p or 0)
        if num_q is not None:
            sig = (num_q, sig[1] if num_p is None else num_p)
        conv = []
        for e in entries:
            if not isinstance(e, CoeffPoly):
                e = CoeffPoly.const(e, *sig)
            elif e.signature() != sig:
                e = e.lift(*sig)
            conv.append(e)
        self.rows = rows
        self.cols = cols
        self.entries = tuple(conv)
        self.num_q, self.num_p = sig

    @classmethod
    def from_rows(cls, rows, num_q=0, num_p=0) -> "PolyMatrix":
        rows = [list(r) for r in rows]
        return cls(len(rows), len(rows[0]), [x for r in rows for x in r], num_q, num_p)

    @classmethod
    def identity(cls, n, num_q=0, num_p=0):
        return cls(n, n, [int(i == j) for i in range(n) for j in range(n)], num_q, num_p)

    @classmethod
    def zeros(cls, rows, cols, num_q=0, num_p=0):
        return cls(rows, cols, [0] * (rows * cols), num_q, num_p)

    def __getitem__(self, ij) -> CoeffPoly:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols : (i + 1) * self.cols]

    @property
    def shape(self):
        return (self.rows, self.cols)

    def signature(self):
        return (self.num_q, self.num_p)

    def lift(self, num_q=None, num_p=None) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, [e.lift(num_q, num_p) for e in self.entries])

    def is_symmetric(self) -> bool:
        if self.rows != self.cols:
            return False
        return all(self[i, j] == self[j, i] for i in range(self.rows) for j in range(i))

    def is_constant(self) -> bool:
        return all(e.is_constant() for e in self.entries)

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def constant_values(self) -> list[list[Fraction]]:
        if not self.is_constant():
            raise ValueError("matrix entries depend on variables")
        return [[self[i, j].constant_value() for j in range(self.cols)] for i in range(self.rows)]

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(
            self.cols, self.rows, [self[i, j] for j in range(self.cols) for i in range(self.rows)]
        )

    def __add__(self, other: "PolyMatrix"):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "PolyMatrix"):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return PolyMatrix(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, c) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, [a * c for a in self.entries])

    def __matmul__(self, other):
        if isinstance(other, PolyMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            out = []
            for i in range(self.rows):
                for j in range(other.cols):
                    acc = CoeffPoly.zero(self.num_q, self.num_p)
                    for k in range(self.cols):
                        a, b = self[i, k], other[k, j]
                        if a and b:
                            acc = acc + a * b
                    out.append(acc)
            return PolyMatrix(self.rows, other.cols, out, self.num_q, self.num_p)
        return self.apply(other)

    def apply(self, vec) -> list[CoeffPoly]:
        """Matrix times a vector of polynomials (lifted to a common signature)."""
        vec = list(vec)
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        sig = _common_signature([self.signature()] + [v.signature() for v in vec])
        out = []
        for i in range(self.rows):
            acc = CoeffPoly.zero(*sig)
            for k in range(self.cols):
                a = self[i, k]
                if a and vec[k]:
                    acc = acc + a.lift(*sig) * vec[k].lift(*sig)
            out.append(acc)
        return out

    def evaluate(self, point) -> np.ndarray:
        return np.array([float(e.evaluate_exact(point)) for e in self.entries]).reshape(
            self.rows, self.cols
        )

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for a, b in zip(self.entries, other.entries)
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def to_literal(self):
        return [[self[i, j].to_literal() for j in range(self.cols)] for i in range(self.rows)]

    def __repr__(self):
        rows = ["[" + ", ".join(str(e) for e in self.row(i)) + "]" for i in range(self.rows)]
        return "PolyMatrix[" + ", ".join(rows) + "]"


def _common_signature(sigs):
    return (max(s[0] for s in sigs), max(s[1] for s in sigs))
