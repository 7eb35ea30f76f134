"""Tests for the canonical example structures."""

import pytest

from koszul.ainfty import (
    check_costasheff,
    check_stasheff,
    check_weight_grading,
    quotient_algebra,
)
from koszul.cli.fixtures import (
    FixtureError,
    available_fixtures,
    cpn,
    cpn_dual,
    exterior_algebra,
    get_fixture,
    massey_toy,
    seven_manifold_coalgebra,
    seven_manifold_presentation,
    seven_manifold_ring,
)


# ---------------------------------------------------------------------------
# exterior / toy


def test_exterior_products_frozen():
    alg = exterior_algebra(("x1", "x2", "y"))
    assert dict(alg.op_value(2, ("x1", "x2"))) == {"x1x2": 1}
    assert dict(alg.op_value(2, ("x2", "x1"))) == {"x1x2": -1}
    assert dict(alg.op_value(2, ("x1", "x2y"))) == {"x1x2y": 1}
    assert dict(alg.op_value(2, ("y", "x1x2"))) == {"x1x2y": 1}
    assert alg.op_value(2, ("x1", "x1")).is_zero()
    assert alg.op_value(2, ("x1", "x1x2")).is_zero()


def test_exterior_differential_is_bare_on_the_toy():
    alg = massey_toy()
    assert dict(alg.op_value(1, ("y",))) == {"x1x2": 1}
    # every derivation-rule term on a product hits a repeated generator
    for other in ("x1", "x2", "x1x2", "x1y", "x2y", "x1x2y"):
        assert alg.op_value(1, (other,)).is_zero(), other


def test_toy_satisfies_all_identities():
    alg = massey_toy()
    assert check_weight_grading(alg) == []
    assert check_stasheff(alg) == []


def test_exterior_rejects_duplicate_names():
    with pytest.raises(FixtureError):
        exterior_algebra(("x", "x"))


# ---------------------------------------------------------------------------
# the projective family


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cpn_is_a_valid_structure(n):
    alg = cpn(n, max_degree=8 * n)
    assert check_weight_grading(alg) == []
    assert check_stasheff(alg) == []


def test_cp1_squares_and_products():
    alg = cpn(1, max_degree=12)
    assert dict(alg.op_value(2, ("a", "a"))) == {"b1": 1}
    assert dict(alg.op_value(2, ("a", "b1"))) == {"ab1": 1}
    assert dict(alg.op_value(2, ("b1", "a"))) == {"ab1": 1}
    assert dict(alg.op_value(2, ("ab1", "a"))) == {"b2": 1}
    assert dict(alg.op_value(2, ("ab1", "ab2"))) == {"b4": 1}
    assert 3 not in alg.operations


def test_cp2_higher_operation():
    alg = cpn(2, max_degree=16)
    assert alg.op_value(2, ("a", "a")).is_zero()
    assert dict(alg.op_value(2, ("b1", "b2"))) == {"b3": 1}
    assert dict(alg.op_value(3, ("a", "a", "a"))) == {"b1": 1}
    assert dict(alg.op_value(3, ("a", "ab1", "a"))) == {"b2": 1}
    assert alg.op_value(3, ("a", "b1", "a")).is_zero()


def test_cpn_element_census():
    alg = cpn(3, max_degree=20)
    ids = {e.id for e in alg.module.elements}
    assert ids == {"1", "a", "b1", "ab1", "b2", "ab2", "b3", "ab3"}
    assert alg.module["b3"].degree == 18
    assert alg.module["ab3"].weight == -7


# ---------------------------------------------------------------------------
# dual-side fixtures


@pytest.mark.parametrize("n", [1, 3])
def test_cpn_dual_shape(n):
    co = cpn_dual(n)
    assert [e.degree for e in co.module.elements] == [2 * i for i in range(n + 1)]
    assert all(e.weight == 0 for e in co.module.elements)
    assert check_weight_grading(co) == []
    assert check_costasheff(co) == []


def test_cpn_dual_splitting():
    co = cpn_dual(3)
    assert dict(co.coop_value(2, "x3")) == {
        ("x1", "x2"): 1,
        ("x2", "x1"): 1,
    }
    assert co.coop_value(2, "x1").is_zero()
    full = dict(co.coop_value(2, "x1", reduced=False))
    assert full == {("x0", "x1"): 1, ("x1", "x0"): 1}


# ---------------------------------------------------------------------------
# the seven-manifold side


def test_seven_manifold_is_a_valid_coalgebra():
    co = seven_manifold_coalgebra()
    assert check_weight_grading(co) == []
    assert check_costasheff(co) == []
    assert dict(co.coop_value(2, "M")) == {
        ("a", "x"): 1,
        ("x", "a"): 1,
        ("b", "y"): -1,
        ("y", "b"): -1,
    }
    assert dict(co.coop_value(3, "y")) == {
        ("a", "a", "b"): 1,
        ("b", "a", "a"): -1,
    }


def test_seven_manifold_ring_counts():
    ring = seven_manifold_ring()
    assert [len(ring.basis(d)) for d in range(9)] == [
        1, 2, 4, 6, 9, 12, 16, 20, 25,
    ]


def test_presentation_matches_ring():
    pres = seven_manifold_presentation()
    table = quotient_algebra(pres, 6)
    ring = seven_manifold_ring()
    for d in range(7):
        assert table[d].torsion == ()
        assert table[d].free_rank == len(ring.basis(d))


# ---------------------------------------------------------------------------
# registry


def test_get_fixture_round_trip():
    assert get_fixture("cpn:2", max_degree=12).name == "CP2"
    assert get_fixture("seven-manifold").name == "M7"
    assert get_fixture("exterior:2").module["e1e2"].degree == -2
    assert get_fixture("massey").name == "exterior"
    assert get_fixture("cpn-dual:1").counit == "x0"


def test_get_fixture_errors():
    with pytest.raises(FixtureError):
        get_fixture("nope")
    with pytest.raises(FixtureError):
        get_fixture("cpn:zero")
    with pytest.raises(FixtureError):
        get_fixture("cpn:0")
    assert available_fixtures()
