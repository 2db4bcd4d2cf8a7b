import numpy as np
import pytest

from choco.configuration import (
    AlgebraicConfiguration,
    enumerate_configurations,
    identity_residual,
    instantiate,
    is_square,
    parse_shorthand,
    partitions,
)
from choco.errors import InvalidConfiguration, ParseError
from choco.fixtures import DEG10_SOLUTION, DEG20_CONFIG, DEG20_TABLE_CONFIG, QUARTIC_SOLUTION
from choco.polynomial import Polynomial
from choco.stability import UNSTABLE, classify


def test_parse_degree10_winner():
    c = parse_shorthand("[3,1],[2],[1]")
    assert (c.j, c.kexp, c.l) == ((3, 1), (2,), (1,))
    assert (c.deg_x, c.deg_z, c.c) == (10, 12, 10)


def test_parse_empty_brackets():
    c = parse_shorthand("[1],[],[]")
    assert c.deg_x == 4 and c.deg_y == 0 and c.c == 6


def test_parse_degree20_shorthands():
    # the c = deg z - 2 sum(l) rule: [2,2,1] leaves s^12, [2,1,1] leaves s^14
    assert parse_shorthand(DEG20_TABLE_CONFIG).c == 12
    c = parse_shorthand(DEG20_CONFIG)
    assert c.deg_x == 20 and c.c == 14


def test_parse_canonicalizes_order_and_spacing():
    assert parse_shorthand(" [1, 3] , [2] , [] ") == parse_shorthand("[3,1],[2],[]")


@pytest.mark.parametrize("bad", ["[1],[]", "3,1,2", "[a],[],[]", "[1],[],[]x", ""])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_shorthand(bad)


@pytest.mark.parametrize("bad", ["[0],[],[]", "[1],[-1],[]", "[1],[],[4]", "[1],[2],[]"])
def test_invalid_configurations(bad):
    with pytest.raises(InvalidConfiguration):
        parse_shorthand(bad)


def test_is_square_examples():
    assert is_square(parse_shorthand(DEG20_TABLE_CONFIG))
    assert is_square(parse_shorthand(DEG20_CONFIG))
    c = parse_shorthand("[3,1],[2],[1]")
    assert is_square(c) and len(c.unknowns) == 6 == c.n_equations
    assert not is_square(parse_shorthand("[1],[1],[]"))


def test_partitions_order_and_count():
    assert list(partitions(4)) == [(1, 1, 1, 1), (2, 1, 1), (2, 2), (3, 1), (4,)]
    assert sum(1 for _ in partitions(10)) == 42


def test_enumerate_degree4_exactly_one():
    assert [str(c) for c in enumerate_configurations(4)] == ["[1],[],[]"]


def test_enumerate_contains_winners():
    assert parse_shorthand("[3,1],[2],[1]") in enumerate_configurations(10)
    deg20 = enumerate_configurations(20)
    assert parse_shorthand(DEG20_TABLE_CONFIG) in deg20
    assert parse_shorthand(DEG20_CONFIG) in deg20


def test_enumerate_counts_and_invariants():
    counts = {d: len(enumerate_configurations(d)) for d in (4, 6, 8, 10, 12)}
    assert counts == {4: 1, 6: 7, 8: 32, 10: 154, 12: 517}
    for c in enumerate_configurations(12):
        assert is_square(c) and c.deg_y < c.deg_x and c.c >= 0
        assert list(c.j) == sorted(c.j, reverse=True)


def test_enumerate_is_deterministic_and_sorted():
    a = enumerate_configurations(10)
    assert a == enumerate_configurations(10)
    keys = [(c.j, c.kexp, c.l) for c in a]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)


@pytest.mark.parametrize("deg", [3, 2, 7])
def test_enumerate_rejects_bad_degree(deg):
    with pytest.raises(ValueError):
        enumerate_configurations(deg)


def test_format_parse_round_trip():
    for d in (4, 6, 8, 10):
        for c in enumerate_configurations(d):
            assert parse_shorthand(str(c)) == c
            assert AlgebraicConfiguration.from_json(c.to_json()) == c


def test_json_form():
    assert parse_shorthand("[3,1],[2],[1]").to_json() == {"j": [3, 1], "k": [2], "l": [1]}


def test_symmetry_groups():
    c = parse_shorthand("[4,2,2,1],[3,2],[2,1,1]")
    assert c.symmetry_groups() == [["A2", "A3"], ["C2", "C3"]]


def test_instantiate_degenerate_values():
    c = parse_shorthand("[1],[],[]")
    x, y, z = instantiate(c, {"delta": 1, "A1": 0, "k": 0})
    assert x == Polynomial([1, 2, 1]) * Polynomial.monomial(2)
    assert y.is_zero() and z == Polynomial.monomial(6)


def test_instantiate_quartic_example():
    c = parse_shorthand("[1],[],[]")
    x, y, z = instantiate(c, QUARTIC_SOLUTION)
    assert z == Polynomial.monomial(6)
    assert classify(x).is_quasi_stable
    assert identity_residual(QUARTIC_SOLUTION["delta"], x, y, z).norm_inf() < 1e-12


def test_instantiate_degree10_printed_values():
    c = parse_shorthand("[3,1],[2],[1]")
    x, y, z = instantiate(c, DEG10_SOLUTION)
    for p in (x, y, z):
        assert classify(p).is_quasi_stable
    assert identity_residual(DEG10_SOLUTION["delta"], x, y, z).norm_inf() <= 1e-5 * z.norm_inf()


def test_degrees_and_quasi_stability_on_random_feasible_values():
    rng = np.random.default_rng(11)
    for deg in (4, 6, 8):
        for c in enumerate_configurations(deg):
            for _ in range(10):
                vals = {n: rng.uniform(0.05, 5) for n in c.unknowns}
                vals["delta"] = rng.uniform(0.01, 1)
                vals["k"] = rng.uniform(-5, 5)
                x, y, z = instantiate(c, vals)
                assert (x.degree, y.degree, z.degree) == (c.deg_x, c.deg_y, c.deg_z)
                for p in (x, y, z):
                    assert classify(p).classification != UNSTABLE
