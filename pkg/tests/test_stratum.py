import math

import pytest

from flatstrata.errors import NonPositiveOrder, OddTotalOrder
from flatstrata.stratum import crad_lower_bound, stratum_from_orders


def test_single_cone_point_genus_two():
    s = stratum_from_orders((2,))
    assert s.orders == (2,)
    assert s.genus == 2
    assert s.num_singularities == 1
    assert s.dim_complex == 4


def test_two_cone_points_genus_two():
    s = stratum_from_orders((1, 1))
    assert s.genus == 2
    assert s.dim_complex == 5


def test_orders_sorted_descending():
    s = stratum_from_orders((1, 2, 1))
    assert s.orders == (2, 1, 1)
    assert s.genus == 3
    assert s.dim_complex == 2 * 3 + 3 - 1


def test_marked_point_only_when_allowed():
    s = stratum_from_orders((0,), allow_marked_points=True)
    assert s.genus == 1
    assert s.dim_complex == 2
    with pytest.raises(NonPositiveOrder):
        stratum_from_orders((0,))


def test_mixed_marked_and_singular():
    s = stratum_from_orders((2, 0, 0), allow_marked_points=True)
    assert s.orders == (2, 0, 0)
    assert s.genus == 2
    assert s.num_singularities == 3
    assert s.dim_complex == 2 * 2 + 3 - 1


def test_negative_order_rejected():
    with pytest.raises(NonPositiveOrder):
        stratum_from_orders((3, -1))
    with pytest.raises(NonPositiveOrder):
        stratum_from_orders(())


def test_odd_total_rejected():
    with pytest.raises(OddTotalOrder):
        stratum_from_orders((1,))
    with pytest.raises(OddTotalOrder):
        stratum_from_orders((2, 1))


def test_str_form():
    assert str(stratum_from_orders((1, 1))) == "(1,1)"


def test_crad_lower_bound_values():
    # sqrt(2 / (3*sqrt(3) * (2g + l - 2))) for the two genus-2 strata
    b2 = crad_lower_bound(stratum_from_orders((2,)))
    b11 = crad_lower_bound(stratum_from_orders((1, 1)))
    assert b2 == pytest.approx(math.sqrt(2.0 / (3.0 * math.sqrt(3.0) * 3.0)))
    assert b2 == pytest.approx(0.3581899773, abs=1e-9)
    assert b11 == pytest.approx(0.3102016197, abs=1e-9)
    assert b11 < b2


def test_crad_lower_bound_decreasing_in_complexity():
    # 2g + l - 2 grows along this list, so the bound strictly shrinks
    prev = crad_lower_bound(stratum_from_orders((0,), allow_marked_points=True))
    for orders in ((2,), (1, 1), (4,), (2, 2), (6,)):
        b = crad_lower_bound(stratum_from_orders(orders))
        assert b < prev
        prev = b
