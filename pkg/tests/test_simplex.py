from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from specker_kit.services import simplex


def test_optimum_is_exact():
    result = simplex.solve([[1, 1]], [1], [1, 2])
    assert result.status == simplex.OPTIMAL
    assert result.x == (Fraction(1), Fraction(0))
    assert result.objective == 1


def test_negative_right_hand_side():
    # x - y = -1 forces y >= 1
    result = simplex.solve([[1, -1]], [-1], [0, 1])
    assert result.status == simplex.OPTIMAL
    assert result.x == (Fraction(0), Fraction(1))


def test_unbounded():
    result = simplex.solve([[1, -1]], [0], [-1, 0])
    assert result.status == simplex.UNBOUNDED


def test_redundant_rows_are_dropped():
    result = simplex.solve([[1, 1], [2, 2]], [1, 2], [1, 0])
    assert result.status == simplex.OPTIMAL
    assert result.objective == 0
    assert result.x == (Fraction(0), Fraction(1))


def test_feasibility_only():
    result = simplex.solve([[1, 1, 1]], [Fraction(1, 3)])
    assert result.feasible
    assert sum(result.x) == Fraction(1, 3)


def test_infeasible_system_carries_farkas_vector():
    A = [[1, 1], [1, 1]]
    b = [1, 2]
    result = simplex.solve(A, b)
    assert result.status == simplex.INFEASIBLE
    y = result.farkas
    for col in range(2):
        assert sum(yi * row[col] for yi, row in zip(y, A)) <= 0
    assert sum(yi * bi for yi, bi in zip(y, b)) > 0


def test_lexicographic_minimum():
    result = simplex.solve_lexicographic([[1, 1, 1]], [1], order=[0, 1, 2])
    assert result.x == (Fraction(0), Fraction(0), Fraction(1))
    result = simplex.solve_lexicographic([[1, 1, 1]], [1], order=[2, 1, 0])
    assert result.x == (Fraction(1), Fraction(0), Fraction(0))


small = st.fractions(min_value=-3, max_value=3, max_denominator=6)


@settings(max_examples=150, deadline=None)
@given(
    A=st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=3),
    b=st.lists(small, min_size=3, max_size=3),
)
def test_verdict_is_certified(A, b):
    b = b[:len(A)]
    result = simplex.solve(A, b)
    if result.feasible:
        assert all(v >= 0 for v in result.x)
        for row, bi in zip(A, b):
            assert sum(a * x for a, x in zip(row, result.x)) == bi
    else:
        y = result.farkas
        for col in range(3):
            assert sum(yi * row[col] for yi, row in zip(y, A)) <= 0
        assert sum(yi * bi for yi, bi in zip(y, b)) > 0
