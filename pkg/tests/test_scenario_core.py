import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import vertex
from specker_kit.exceptions import ChainViolation, SpeckerKitError
from specker_kit.services.sampling import make_generator, random_point, random_six_tuple
from specker_kit.services.scenario_core import (
    SixParams,
    chain_violations,
    from_six_params,
    marginals,
    mix,
    parse_rational,
    snap_rational,
    table_from_six_params,
    to_six_params,
)

F = Fraction


def test_six_params_of_correlated_vertex():
    six = to_six_params(vertex(0))
    assert six == SixParams(0, 0, 0, 1, 1, 1)


def test_six_params_of_anticorrelated_vertex():
    six = to_six_params(vertex(11))
    assert six.w == (1, 1, 1)
    assert six.p == (F(1, 2),) * 3


def test_vertex_five_entries():
    cv = vertex(5)
    assert cv.entry("12", 1, 0) == 1
    assert cv.entry("23", 0, 1) == 1
    assert cv.entry("13", 1, 1) == 1


def test_broken_chain_is_refused():
    with pytest.raises(ChainViolation) as e:
        from_six_params(SixParams(F(0), F(0), F(0), F(1), F(0), F(0)))
    assert e.value.chains


@pytest.mark.parametrize("vid", range(12))
def test_six_params_round_trip_on_vertices(vid):
    cv = vertex(vid)
    assert from_six_params(to_six_params(cv)) == cv


def test_marginals_and_mix(uniform):
    half = mix([vertex(0), vertex(7)], [F(1, 2), F(1, 2)])
    assert marginals(half) == (F(1, 2),) * 3
    assert mix([uniform], [1]) == uniform


def test_mix_rejects_bad_weights():
    with pytest.raises(ValueError):
        mix([vertex(0), vertex(1)], [F(1, 2), F(1, 3)])


def test_random_points_round_trip():
    rng = make_generator(11)
    for _ in range(500):
        cv = random_point(rng)
        assert from_six_params(to_six_params(cv)) == cv


def test_chain_test_matches_table_positivity():
    rng = make_generator(2024)
    for _ in range(10_000):
        six = random_six_tuple(rng)
        nonnegative = all(v >= 0 for v in table_from_six_params(six).flat())
        assert (not chain_violations(six)) == nonnegative


probability = st.fractions(min_value=0, max_value=1, max_denominator=40)


@settings(max_examples=300, deadline=None)
@given(st.tuples(*(probability,) * 6))
def test_accepted_six_params_rebuild_a_valid_table(values):
    six = SixParams(*values)
    if chain_violations(six):
        with pytest.raises(ChainViolation):
            from_six_params(six)
        return
    cv = from_six_params(six)
    assert to_six_params(cv) == six
    for table in cv.pairs:
        assert sum(table) == 1
        assert all(v >= 0 for v in table)


def test_snap_rational():
    assert snap_rational(0.5) == F(1, 2)
    assert snap_rational(1 / 3) == F(1, 3)
    assert snap_rational(F(2, 7)) == F(2, 7)
    assert snap_rational(1) == 1


@pytest.mark.parametrize("value", [2.5e-7, math.nan, True])
def test_snap_rational_refuses(value):
    with pytest.raises(SpeckerKitError):
        snap_rational(value)


def test_parse_rational():
    assert parse_rational(" 3/8 ") == F(3, 8)
    assert parse_rational("0.1") == F(1, 10)
    assert parse_rational(0.25) == F(1, 4)
    with pytest.raises(SpeckerKitError):
        parse_rational("one half")
