"""Constraint ideals on phase space: membership, first/second class split, constraint algorithm.

The Lagrangian constraint space N_L is the graph of the projector
P = a sigma0, so restricting a function to N_L is the substitution
p -> P p. A constraint set adds further generators (secondary constraints,
or user-supplied ones); membership in the ideal they generate together with
I_N is decided by restricting to N_L and then dividing by the restricted
generators in lex order. Division is exact whenever the restricted
generators have pairwise coprime leading monomials (they then form a Groebner
basis); reports carry that flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .hamiltonian import HamiltonianForm, extended_bracket, poisson_v
from .model import QuadraticModel, default_grid
from .poly import CoeffPoly
from .split import SigmaSplit

__all__ = [
    "InvalidConstraintError",
    "ConstraintSet",
    "ConstraintIdeal",
    "Classification",
    "classify_constraints",
    "AlgorithmResult",
    "constraint_algorithm",
]


class InvalidConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class ConstraintSet:
    generators: tuple
    metadata: dict = field(default_factory=dict, compare=False)

    def __init__(self, generators, metadata=None):
        object.__setattr__(self, "generators", tuple(generators))
        object.__setattr__(self, "metadata", dict(metadata or {}))

    def __len__(self):
        return len(self.generators)


def _lex_key(num_q, num_p):
    # momenta outrank positions, which outrank t
    order = list(range(1 + num_q, 1 + num_q + num_p)) + list(range(1, 1 + num_q)) + [0]

    def key(e):
        return tuple(e[i] for i in order)

    return key


def _leading(f: CoeffPoly, key):
    e = max(f.terms, key=key)
    return e, f.terms[e]


def _divides(e1, e2):
    return all(a <= b for a, b in zip(e1, e2))


class ConstraintIdeal:
    """The ideal I_N + <generators> with a normal-form reducer."""

    def __init__(self, split: SigmaSplit, generators=()):
        split._require_symbolic()
        self.split = split
        m = split.model.m
        self.m = m
        proj = split.projector().lift(m, m)
        ps = [CoeffPoly.var(f"p{i + 1}", m, m) for i in range(m)]
        pp = proj.apply(ps)
        self._restrict_map = {f"p{i + 1}": pp[i] for i in range(m)}
        self._key = _lex_key(m, m)
        self.basis: list[CoeffPoly] = []
        for g in generators:
            self.add(g)

    def restrict(self, f: CoeffPoly) -> CoeffPoly:
        """Pull-back of ``f`` to N_L, written back in ambient coordinates."""
        return f.substitute(self._restrict_map)

    def reduce(self, f: CoeffPoly) -> CoeffPoly:
        """Normal form of ``f`` modulo the ideal (zero iff member, when exact)."""
        f = self.restrict(f)
        rem = CoeffPoly.zero(self.m, self.m)
        key = self._key
        lead = [(_leading(g, key), g) for g in self.basis]
        while f:
            e, c = _leading(f, key)
            for (ge, gc), g in lead:
                if _divides(ge, e):
                    mono = tuple(a - b for a, b in zip(e, ge))
                    f = f - CoeffPoly._raw({mono: c / gc}, self.m, self.m) * g
                    break
            else:
                term = CoeffPoly._raw({e: c}, self.m, self.m)
                rem = rem + term
                f = f - term
        return rem

    def contains(self, f: CoeffPoly) -> bool:
        return self.reduce(f).is_zero()

    def add(self, g: CoeffPoly) -> CoeffPoly | None:
        """Adjoin ``g``; returns the monic reduced generator actually added, or None."""
        r = self.reduce(g)
        if r.is_zero():
            return None
        _, c = _leading(r, self._key)
        r = r / c
        if r.is_constant():
            raise InvalidConstraintError("constraints are inconsistent: ideal contains 1")
        self.basis.append(r)
        return r

    @property
    def exact(self) -> bool:
        leads = [_leading(g, self._key)[0] for g in self.basis]
        for i in range(len(leads)):
            for j in range(i):
                if any(a and b for a, b in zip(leads[i], leads[j])):
                    return False
        return True


@dataclass
class Classification:
    tags: list
    table: list
    exact: bool

    def to_dict(self):
        return {
            "tags": self.tags,
            "bracket_table": [[str(x) for x in row] for row in self.table],
            "membership_exact": self.exact,
        }


def classify_constraints(
    cset: ConstraintSet,
    split: SigmaSplit,
    model: QuadraticModel | None = None,
    mode: str = "symbolic",
    grid=None,
    tol: float = 1e-9,
    seed: int = 0,
) -> Classification:
    """Tag each generator first or second class.

    A generator is first class iff its bracket with every generator lies in
    the constraint ideal. In ``symbolic`` mode the ideal is I_N plus the
    generators; in ``sampled`` mode every generator must vanish on N_L and
    membership of a bracket means vanishing at sampled points of N_L.
    """
    model = model if model is not None else split.model
    gens = list(cset.generators)
    table = [[poisson_v(f, g) for g in gens] for f in gens]
    if mode == "symbolic":
        ideal = ConstraintIdeal(split, gens)
        member = [[ideal.contains(x) for x in row] for row in table]
        exact = ideal.exact
    elif mode == "sampled":
        points = _sample_constraint_space(split, model, grid, seed)

        def vanishes(f):
            return all(abs(f(z)) <= tol for z in points)

        for g in gens:
            if not vanishes(g):
                raise InvalidConstraintError(f"generator {g} does not vanish on N_L")
        member = [[vanishes(x) for x in row] for row in table]
        exact = False
    else:
        raise ValueError("mode must be 'symbolic' or 'sampled'")
    tags = ["first" if all(row) else "second" for row in member]
    return Classification(tags, table, exact)


def _sample_constraint_space(split, model, grid, seed, per_point=3):
    rng = np.random.default_rng(seed)
    grid = default_grid(model) if grid is None else list(grid)
    pts = []
    for pt in grid:
        t, q = pt[0], pt[1:]
        proj = split.projector_at(t, q)
        for _ in range(per_point):
            p = proj @ rng.uniform(-2, 2, size=model.m)
            pts.append((t, *q, *p))
    return pts


@dataclass
class AlgorithmResult:
    constraints: ConstraintSet
    closed: bool
    rounds: int
    chain: list
    exact: bool

    def to_dict(self):
        return {
            "closed": self.closed,
            "rounds": self.rounds,
            "chain": [[str(g) for g in step] for step in self.chain],
            "final": [str(g) for g in self.constraints.generators],
            "membership_exact": self.exact,
        }


def constraint_algorithm(
    H: HamiltonianForm,
    initial: ConstraintSet,
    split: SigmaSplit,
    model: QuadraticModel | None = None,
    max_rounds: int = 10,
) -> AlgorithmResult:
    """Adjoin secondary, tertiary, ... constraints until the set is preserved by the flow.

    Each round brackets every current generator with h* (the extended bracket);
    results not already in the ideal are reduced, made monic and adjoined.
    ``closed`` is False if ``max_rounds`` is exhausted first.
    """
    ideal = ConstraintIdeal(split)
    gens: list[CoeffPoly] = []
    for g in initial.generators:
        gens.append(g)
        ideal.add(g)
    chain = [list(gens)]
    if not gens:
        return AlgorithmResult(ConstraintSet(gens), True, 0, chain, True)
    for rnd in range(1, max_rounds + 1):
        added = []
        for f in list(gens):
            new = ideal.add(extended_bracket(f, H))
            if new is not None:
                added.append(new)
        if not added:
            return AlgorithmResult(ConstraintSet(gens), True, rnd, chain, ideal.exact)
        gens.extend(added)
        chain.append(list(gens))
    return AlgorithmResult(ConstraintSet(gens), False, max_rounds, chain, ideal.exact)
