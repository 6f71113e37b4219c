import pytest

from quadham.constraints import (
    ConstraintIdeal,
    ConstraintSet,
    InvalidConstraintError,
    classify_constraints,
    constraint_algorithm,
)
from quadham.hamiltonian import build_hamiltonian
from quadham.model import QuadraticModel
from quadham.poly import CoeffPoly, PolyMatrix, phase_space
from quadham.split import build_sigma, constraint_polys, solve_connection

T, (Q1, Q2), (P1, P2) = phase_space(2)


def form(model):
    split = build_sigma(model)
    return build_hamiltonian(model, split, solve_connection(model, split)), split


class TestIdeal:
    def test_restriction_membership(self, m_deg1, m_deg2):
        ideal = ConstraintIdeal(build_sigma(m_deg1))
        assert ideal.contains(P2) and ideal.contains(Q1 * P2 * P2)
        assert not ideal.contains(P1)
        ideal2 = ConstraintIdeal(build_sigma(m_deg2))
        assert ideal2.contains(P1 - P2) and not ideal2.contains(P1 + P2)

    def test_generators(self, m_deg1):
        ideal = ConstraintIdeal(build_sigma(m_deg1), [Q2])
        assert ideal.contains(Q2 * Q1 + P2) and not ideal.contains(Q1)
        assert ideal.exact

    def test_add_returns_monic(self, m_deg1):
        ideal = ConstraintIdeal(build_sigma(m_deg1))
        assert ideal.add(-3 * Q2) == Q2
        assert ideal.add(Q2 * T) is None

    def test_inconsistent(self, m_deg1):
        ideal = ConstraintIdeal(build_sigma(m_deg1), [Q2])
        with pytest.raises(InvalidConstraintError):
            ideal.add(Q2 + 1)

    def test_exactness_flag(self, m_deg1):
        ideal = ConstraintIdeal(build_sigma(m_deg1), [Q1 * Q2, Q2 * Q2 + Q1])
        assert not ideal.exact


class TestClassify:
    def test_single_first_class(self, m_deg1):
        cls = classify_constraints(ConstraintSet([P2]), build_sigma(m_deg1))
        assert cls.tags == ["first"]

    def test_second_class_pair(self, m_deg1):
        cls = classify_constraints(ConstraintSet([P2, Q2]), build_sigma(m_deg1))
        assert cls.tags == ["second", "second"]
        assert [[str(x) for x in row] for row in cls.table] == [["0", "1"], ["-1", "0"]]
        assert cls.exact

    def test_reducible_first_class(self, m_deg2):
        split = build_sigma(m_deg2)
        cls = classify_constraints(ConstraintSet(constraint_polys(split)), split)
        assert cls.tags == ["first", "first"]
        assert all(x.is_zero() for row in cls.table for x in row)

    def test_sampled_mode(self, m_deg2):
        split = build_sigma(m_deg2)
        cls = classify_constraints(ConstraintSet(constraint_polys(split)), split, mode="sampled")
        assert cls.tags == ["first", "first"] and not cls.exact

    def test_sampled_rejects_nonconstraint(self, m_deg1):
        with pytest.raises(InvalidConstraintError):
            classify_constraints(ConstraintSet([P1]), build_sigma(m_deg1), mode="sampled")

    def test_bad_mode(self, m_deg1):
        with pytest.raises(ValueError):
            classify_constraints(ConstraintSet([P2]), build_sigma(m_deg1), mode="guess")


class TestAlgorithm:
    def test_closes_immediately(self, m_deg1):
        H, split = form(m_deg1)
        res = constraint_algorithm(H, ConstraintSet([P2]), split)
        assert res.closed and [[str(g) for g in c] for c in res.chain] == [["p2"]]

    def test_two_rounds(self, m_deg1_potential):
        H, split = form(m_deg1_potential)
        res = constraint_algorithm(H, ConstraintSet([P2]), split)
        assert res.closed and res.exact
        assert [[str(g) for g in c] for c in res.chain] == [["p2"], ["p2", "q2"]]

    def test_empty(self, m_deg1):
        H, split = form(m_deg1)
        res = constraint_algorithm(H, ConstraintSet([]), split)
        assert res.closed and res.rounds == 0

    def test_round_limit(self):
        # the secondary constraint q2^2 + 1 appears in round one; closure needs round two
        q2 = CoeffPoly.var("q2", 2)
        model = QuadraticModel(2, PolyMatrix.from_rows([[1, 0], [0, 0]], num_q=2), (0, 0), q2 * q2 * q2 / 3 + q2)
        H, split = form(model)
        res = constraint_algorithm(H, ConstraintSet([P2]), split, max_rounds=1)
        assert not res.closed

    def test_report(self, m_deg1_potential):
        H, split = form(m_deg1_potential)
        d = constraint_algorithm(H, ConstraintSet([P2]), split).to_dict()
        assert d["final"] == ["p2", "q2"] and d["closed"]
